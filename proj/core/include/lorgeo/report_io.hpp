// lorgeo - JSON report assembly for the pipeline outputs
#pragma once

#include <string>
#include <vector>

#include "lorgeo/flow.hpp"
#include "lorgeo/recovery.hpp"
#include "lorgeo/rigidity.hpp"

namespace lorgeo {

// Every report embeds the resolved configuration (a JSON document passed as
// text) and, unless disabled, a UTC timestamp under the key "timestamp".
// Keys are emitted in sorted order, so byte-identical inputs give
// byte-identical reports apart from that one field.

std::string trace_diagnostics_json(const GeodesicPath& path, const MetricField& field,
                                   const std::string& resolved_config_json,
                                   bool include_timestamp = true);

std::string recovery_report_json(const std::vector<PointRecovery>& results,
                                 const std::string& oracle_description,
                                 const std::string& resolved_config_json,
                                 bool include_timestamp = true);

std::string jet_report_json(const BoundaryJet& jet, const std::string& oracle_description,
                            const std::string& resolved_config_json,
                            bool include_timestamp = true);

std::string riemannian_report_json(const Vector& y, const SymmetricForm& form,
                                   const std::string& oracle_description,
                                   const std::string& resolved_config_json,
                                   bool include_timestamp = true);

std::string rigidity_report_json(const RigidityReport& report,
                                 const std::string& resolved_config_json,
                                 bool include_timestamp = true);

// {"error": message, ...config/timestamp} for commands that must still
// write a document on failure.
std::string error_report_json(const std::string& message,
                              const std::string& resolved_config_json,
                              bool include_timestamp = true);

}  // namespace lorgeo
