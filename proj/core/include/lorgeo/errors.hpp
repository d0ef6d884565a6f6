// lorgeo - error taxonomy shared across the library
#pragma once

#include <stdexcept>
#include <string>

namespace lorgeo {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Expression or document text could not be parsed.
class ParseError : public Error { public: using Error::Error; };
// Input is syntactically valid but inconsistent (dimensions, files, ranges).
class ConfigError : public Error { public: using Error::Error; };

// Evaluated coefficient matrix does not have signature (+,-,...,-).
class SignatureViolation : public Error { public: using Error::Error; };
// A coefficient expression evaluated to a non-finite value.
class EvaluationError : public Error { public: using Error::Error; };
// Matrix inversion refused: condition number above threshold.
class SingularMetric : public Error { public: using Error::Error; };

// Trajectory left the field's evaluation box.
class EscapedDomain : public Error { public: using Error::Error; };
// Adaptive step control underflowed the step size or exhausted the step budget.
class StepFailure : public Error { public: using Error::Error; };

// Initial data is not in the timelike-positive cone.
class NotTimelike : public Error { public: using Error::Error; };
// Table-mode oracle has no entry matching the query.
class MissingSample : public Error { public: using Error::Error; };
// Direction search exhausted its probe budget.
class NoTimelikeDirection : public Error { public: using Error::Error; };
// Polarization step underflowed before all queries became admissible.
class PolarizationFailure : public Error { public: using Error::Error; };
// Derivative order outside the supported range.
class UnsupportedOrder : public Error { public: using Error::Error; };

// Endpoint Jacobian too ill-conditioned for a Newton step (conjugate point).
class SingularJacobian : public Error { public: using Error::Error; };
// Newton shooting did not converge within the iteration budget.
class NoConvergence : public Error { public: using Error::Error; };

}  // namespace lorgeo
