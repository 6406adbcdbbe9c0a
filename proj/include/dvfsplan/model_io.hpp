#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dvfsplan/comptime.hpp"
#include "dvfsplan/planner.hpp"
#include "dvfsplan/power.hpp"
#include "dvfsplan/validation.hpp"

namespace dvfsplan {

/// Per-machine configuration: the nominal grid plus operator-supplied
/// effective MHz for synthetic turbo/low modes, which join the grid as
/// ordinary steps.
struct MachineConfig {
    std::string system_id;
    std::vector<int> grid_mhz;
    std::optional<int> turbo_effective_mhz;
    std::optional<int> low_effective_mhz;
    std::string notes;

    FrequencyGrid grid() const {
        std::vector<int> mhz = grid_mhz;
        if (turbo_effective_mhz)
            mhz.push_back(*turbo_effective_mhz);
        if (low_effective_mhz)
            mhz.push_back(*low_effective_mhz);
        return FrequencyGrid::validate_mhz(mhz);
    }
};

inline MachineConfig machine_config_from_json(const nlohmann::json& j) {
    MachineConfig cfg;
    cfg.system_id = j.at("system_id").get<std::string>();
    cfg.grid_mhz = j.at("grid_mhz").get<std::vector<int>>();
    if (j.contains("turbo_effective_mhz"))
        cfg.turbo_effective_mhz = j.at("turbo_effective_mhz").get<int>();
    if (j.contains("low_effective_mhz"))
        cfg.low_effective_mhz = j.at("low_effective_mhz").get<int>();
    if (j.contains("notes"))
        cfg.notes = j.at("notes").get<std::string>();
    return cfg;
}

inline nlohmann::json to_json(const PowerModel& m) {
    nlohmann::json j{{"system_id", m.system_id()},
                     {"grid_mhz", m.grid().steps_mhz()},
                     {"p_idle_fmax_w", m.p_idle_fmax()},
                     {"alpha_w", m.alpha()},
                     {"a_w", m.a()},
                     {"b_w", m.b()},
                     {"source", m.source()}};
    if (m.r_squared())
        j["r_squared"] = *m.r_squared();
    return j;
}

inline PowerModel power_model_from_json(const nlohmann::json& j) {
    std::optional<double> r2;
    if (j.contains("r_squared"))
        r2 = j.at("r_squared").get<double>();
    return PowerModel(j.at("system_id").get<std::string>(),
                      FrequencyGrid::validate_mhz(j.at("grid_mhz").get<std::vector<int>>()),
                      j.at("p_idle_fmax_w").get<double>(), j.at("alpha_w").get<double>(),
                      j.at("a_w").get<double>(), j.at("b_w").get<double>(),
                      j.at("source").get<std::string>(), r2);
}

inline nlohmann::json to_json(const CompletionTimeModel& m) {
    return {{"system_id", m.system_id()},
            {"workload_id", m.workload_id()},
            {"grid_mhz", m.grid().steps_mhz()},
            {"u", m.u()},
            {"theta_fmax", m.theta_fmax()},
            {"theta_fmin", m.theta_fmin()},
            {"k", m.k()},
            {"base_cpu", m.base_cpu().value()},
            {"ct_base_fmax_s", m.ct_base_fmax()},
            {"probe_cpu", m.probe_cpu().value()}};
}

inline CompletionTimeModel ct_model_from_json(const nlohmann::json& j) {
    return CompletionTimeModel(
        j.at("system_id").get<std::string>(), j.at("workload_id").get<std::string>(),
        FrequencyGrid::validate_mhz(j.at("grid_mhz").get<std::vector<int>>()),
        j.at("u").get<double>(), j.at("theta_fmax").get<double>(),
        j.at("theta_fmin").get<double>(), j.at("k").get<double>(),
        CpuFraction(j.at("base_cpu").get<double>()),
        CpuFraction(j.at("probe_cpu").get<double>()), j.at("ct_base_fmax_s").get<double>());
}

inline nlohmann::json to_json(const OperatingPoint& pt) {
    return {{"freq_mhz", pt.frequency.mhz()},
            {"cpu", pt.cpu},
            {"power_w", pt.predicted_power},
            {"ct_s", pt.predicted_ct}};
}

inline nlohmann::json to_json(const ProvisionPlan& plan) {
    nlohmann::json constraint;
    int scenario;
    if (plan.objective == Objective::min_power) {
        scenario = 1;
        constraint["ct_threshold_s"] = *plan.constraint.ct_threshold_s;
    } else {
        scenario = 2;
        constraint["power_budget_w"] = *plan.constraint.power_budget_w;
    }
    return {{"scenario", scenario},
            {"constraint", constraint},
            {"chosen", to_json(plan.chosen)},
            {"reference", to_json(plan.reference)},
            {"savings_percent", plan.savings_percent},
            {"candidates_considered", plan.candidates_considered}};
}

inline nlohmann::json to_json(const ErrorReport& report) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : report.per_point)
        points.push_back({{"cpu", p.cpu},
                          {"freq_mhz", p.frequency.mhz()},
                          {"measured", p.measured},
                          {"predicted", p.predicted},
                          {"percent", p.percent}});
    nlohmann::json cdf = nlohmann::json::array();
    for (const auto& [threshold, fraction] : report.cdf)
        cdf.push_back({{"percent_threshold", threshold}, {"fraction", fraction}});
    return {{"model_name", report.model_name},
            {"per_point", points},
            {"avg_percent", report.avg_percent},
            {"max_percent", report.max_percent},
            {"cdf", cdf}};
}

/// Two-column plot data: `percent fraction`, one line per CDF step.
inline void write_cdf_text(std::ostream& out, const ErrorReport& report) {
    out.precision(17);
    for (const auto& [threshold, fraction] : report.cdf)
        out << threshold << ' ' << fraction << '\n';
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

} // namespace dvfsplan
