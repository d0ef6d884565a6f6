#include "lorgeo/report_io.hpp"

#include <cmath>
#include <ctime>

#include <nlohmann/json.hpp>

namespace lorgeo {

using nlohmann::json;

namespace {

json vec_json(const Vector& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json mat_json(const Matrix& m) {
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

json covector_json(const Covector& c) {
    json out = json::array();
    out.push_back(c.eta0);
    for (int i = 0; i < c.n(); ++i) out.push_back(c.eta[i]);
    return out;
}

void attach_common(json& doc, const std::string& resolved_config_json, bool include_timestamp) {
    if (!resolved_config_json.empty()) {
        doc["config"] = json::parse(resolved_config_json);
    }
    if (include_timestamp) {
        char buf[32];
        const std::time_t now = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&now, &tm);
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
        doc["timestamp"] = buf;
    }
}

}  // namespace

std::string trace_diagnostics_json(const GeodesicPath& path, const MetricField& field,
                                   const std::string& resolved_config_json,
                                   bool include_timestamp) {
    const PhaseState& end = path.samples().back();
    json doc = {
        {"H_defect", conservation_defect(path, field)},
        {"xi0_defect", time_covector_drift(path)},
        {"H0", path.initial_hamiltonian()},
        {"T", path.T()},
        {"endpoint", {{"t", end.t},
                      {"x0", end.xhat.x0},
                      {"x", vec_json(end.xhat.x)},
                      {"xi", covector_json(end.xihat)}}},
        {"steps", path.stats().accepted},
        {"rejected_steps", path.stats().rejected},
        {"max_step", path.stats().max_step},
        {"samples", static_cast<long>(path.samples().size())},
        {"field", field.id()},
    };
    attach_common(doc, resolved_config_json, include_timestamp);
    return doc.dump(2) + "\n";
}

std::string recovery_report_json(const std::vector<PointRecovery>& results,
                                 const std::string& oracle_description,
                                 const std::string& resolved_config_json,
                                 bool include_timestamp) {
    json points = json::array();
    int failures = 0;
    for (const auto& r : results) {
        json e;
        e["y"] = vec_json(r.y);
        if (r.ok()) {
            const auto& p = *r.point;
            e["Q"] = mat_json(p.Q.matrix());
            e["Qinv"] = mat_json(p.Qinv.matrix());
            e["epsilon"] = p.epsilon;
            e["seed"] = covector_json(p.seed);
            e["residual"] = p.residual;
            e["oracle_queries"] = p.oracle_queries;
        } else {
            ++failures;
            e["error"] = r.error;
        }
        points.push_back(std::move(e));
    }
    json doc = {
        {"oracle", oracle_description},
        {"points", points},
        {"failures", failures},
    };
    attach_common(doc, resolved_config_json, include_timestamp);
    return doc.dump(2) + "\n";
}

std::string jet_report_json(const BoundaryJet& jet, const std::string& oracle_description,
                            const std::string& resolved_config_json, bool include_timestamp) {
    json entries = json::array();
    for (const auto& e : jet.entries) {
        entries.push_back({{"alpha", e.alpha}, {"matrix", mat_json(e.value.matrix())}});
    }
    json doc = {
        {"oracle", oracle_description},
        {"y", vec_json(jet.y)},
        {"h", jet.h},
        {"order", jet.order},
        {"entries", entries},
    };
    attach_common(doc, resolved_config_json, include_timestamp);
    return doc.dump(2) + "\n";
}

std::string riemannian_report_json(const Vector& y, const SymmetricForm& form,
                                   const std::string& oracle_description,
                                   const std::string& resolved_config_json,
                                   bool include_timestamp) {
    json doc = {
        {"oracle", oracle_description},
        {"y", vec_json(y)},
        {"Q", mat_json(form.matrix())},
    };
    attach_common(doc, resolved_config_json, include_timestamp);
    return doc.dump(2) + "\n";
}

std::string rigidity_report_json(const RigidityReport& report,
                                 const std::string& resolved_config_json,
                                 bool include_timestamp) {
    json pairs = json::array();
    for (const auto& pr : report.pairs) {
        json taus = json::array();
        for (const auto& te : pr.tau_table) {
            taus.push_back({{"tau", te.tau},
                            {"eta", covector_json(te.etahat)},
                            {"residual", te.residual},
                            {"iterations", te.iterations},
                            {"x0_T", te.arrival_x0}});
        }
        json sweep = json::array();
        for (const auto& se : pr.sweep) {
            sweep.push_back({{"s", se.s},
                             {"Delta", se.Delta},
                             {"R1", se.R1},
                             {"R2", se.R2},
                             {"sup_norm", se.sup_norm},
                             {"path_norm", se.path_norm},
                             {"remainder", se.remainder},
                             {"inequality_holds", se.inequality_holds}});
        }
        pairs.push_back({{"y", vec_json(pr.pair.y)},
                         {"x_T", vec_json(pr.pair.x_T)},
                         {"T", pr.pair.T},
                         {"eta0", pr.pair.eta0},
                         {"Delta", pr.Delta},
                         {"R1", pr.R1},
                         {"R2", pr.R2},
                         {"l0", finite_or_null(pr.l0)},
                         {"l1", finite_or_null(pr.l1)},
                         {"path_norm", pr.path_norm},
                         {"C1", pr.C1},
                         {"C2", pr.C2},
                         {"slope", finite_or_null(pr.slope)},
                         {"inequality_holds", pr.inequality_holds},
                         {"tau_table", taus},
                         {"sweep", sweep}});
    }
    const PairReport& first = report.pairs.front();
    json doc = {
        {"pairs", pairs},
        {"Delta", first.Delta},
        {"R1", first.R1},
        {"R2", first.R2},
        {"l0", finite_or_null(first.l0)},
        {"l1", finite_or_null(first.l1)},
        {"sup_norm", report.sup_norm},
        {"path_norm", first.path_norm},
        {"C1", first.C1},
        {"C2", first.C2},
        {"slope", finite_or_null(first.slope)},
        {"inequality_holds", report.inequality_holds},
        {"max_abs_delta", report.max_abs_delta},
        {"rigid_at_data", report.rigid_at_data},
        {"degenerate_direction", report.degenerate_direction},
    };
    attach_common(doc, resolved_config_json, include_timestamp);
    return doc.dump(2) + "\n";
}

std::string error_report_json(const std::string& message,
                              const std::string& resolved_config_json, bool include_timestamp) {
    json doc = {{"error", message}};
    attach_common(doc, resolved_config_json, include_timestamp);
    return doc.dump(2) + "\n";
}

}  // namespace lorgeo
