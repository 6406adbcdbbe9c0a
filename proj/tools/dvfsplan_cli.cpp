// dvfsplan: calibrate, predict, validate and plan server power and
// completion time as functions of CPU allocation and DVFS frequency.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dvfsplan/comptime.hpp"
#include "dvfsplan/measurements.hpp"
#include "dvfsplan/model_io.hpp"
#include "dvfsplan/planner.hpp"
#include "dvfsplan/power.hpp"
#include "dvfsplan/types.hpp"
#include "dvfsplan/validation.hpp"

namespace {

using namespace dvfsplan;

// Tables print watts/seconds with 2 decimals; JSON keeps full precision.
std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

MeasurementSet load_measurements(const std::string& path, const std::string& system_id) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    return MeasurementSet::from_csv(in, system_id);
}

MachineConfig load_machine(const std::string& path) {
    return machine_config_from_json(load_json_file(path));
}

PowerCalibrationInputs power_corners(const MeasurementSet& ms, const FrequencyGrid& grid) {
    PowerCalibrationInputs in{grid, 0, 0, 0, 0};
    in.p_idle_fmin = ms.require(Metric::power_watts, "", 0.0, grid.f_min());
    in.p_idle_fmax = ms.require(Metric::power_watts, "", 0.0, grid.f_max());
    in.p_full_fmin = ms.require(Metric::power_watts, "", 1.0, grid.f_min());
    in.p_full_fmax = ms.require(Metric::power_watts, "", 1.0, grid.f_max());
    return in;
}

CtCalibrationInputs ct_corners(const MeasurementSet& ms, const FrequencyGrid& grid,
                               const std::string& workload, double base_cpu,
                               double probe_cpu) {
    CtCalibrationInputs in{grid, CpuFraction(base_cpu), CpuFraction(probe_cpu), 0, 0, 0, 0};
    in.ct_base_fmax = ms.require(Metric::completion_seconds, workload, base_cpu, grid.f_max());
    in.ct_base_fmin = ms.require(Metric::completion_seconds, workload, base_cpu, grid.f_min());
    in.ct_probe_fmax =
        ms.require(Metric::completion_seconds, workload, probe_cpu, grid.f_max());
    in.ct_probe_fmin =
        ms.require(Metric::completion_seconds, workload, probe_cpu, grid.f_min());
    return in;
}

// The four corner power inputs are recoverable from the calibrated constants,
// which lets the validate subcommand run the quadratic baseline without
// re-reading calibration files.
PowerCalibrationInputs corners_from_model(const PowerModel& m) {
    PowerCalibrationInputs in{m.grid(), 0, 0, 0, 0};
    in.p_idle_fmax = m.p_idle_fmax();
    in.p_idle_fmin = m.predict(0.0, m.grid().f_min());
    in.p_full_fmax = m.predict(1.0, m.grid().f_max());
    in.p_full_fmin = m.predict(1.0, m.grid().f_min());
    return in;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << '\n';
}

double default_cpu_step() {
    if (const char* env = std::getenv("DVFS_CPU_STEP")) {
        const double step = std::atof(env);
        if (!(step > 0.0) || step > 1.0)
            throw Error("DVFS_CPU_STEP must be in (0, 1]");
        return step;
    }
    return 0.01;
}

std::vector<Frequency> parse_core_freqs(const std::string& csv) {
    std::vector<Frequency> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        out.emplace_back(std::stoi(item));
    return out;
}

struct ValidationTarget {
    std::string name;
    Predictor predict;
    std::vector<PointKey> corners;
};

void run_validation(const MeasurementSet& ms, const std::string& system_id, Metric metric,
                    const std::string& workload, const std::vector<ValidationTarget>& targets,
                    bool exclude_corners, const std::string& out_prefix) {
    std::vector<ErrorReport> reports;
    for (const auto& t : targets)
        reports.push_back(evaluate(t.name, system_id, t.predict, ms, metric, workload,
                                   exclude_corners, t.corners));

    for (const auto& r : reports)
        std::cout << r.model_name << ": avg " << fixed2(r.avg_percent) << "% max "
                  << fixed2(r.max_percent) << "% over " << r.per_point.size()
                  << " points\n";
    if (reports.size() > 1) {
        const auto table = compare(reports);
        for (const auto& row : table.rows)
            if (row.winner)
                std::cout << "winner: " << row.model_name << '\n';
    }
    if (!out_prefix.empty()) {
        nlohmann::json all = nlohmann::json::array();
        for (const auto& r : reports) {
            all.push_back(to_json(r));
            std::ofstream cdf(out_prefix + "." + r.model_name + ".cdf.txt");
            if (!cdf)
                throw Error("cannot write CDF file for " + r.model_name);
            write_cdf_text(cdf, r);
        }
        write_json_file(out_prefix + ".report.json", all);
    }
}

void print_plan(const ProvisionPlan& plan, const std::string& system_id) {
    const char* metric = plan.objective == Objective::min_power ? "power" : "completion time";
    std::cout << system_id << ": " << plan.chosen.frequency.mhz() << " MHz at "
              << fixed2(plan.chosen.cpu * 100.0) << "% CPU -> "
              << fixed2(plan.chosen.predicted_power) << " W, "
              << fixed2(plan.chosen.predicted_ct) << " s (" << fixed2(plan.savings_percent)
              << "% " << metric << " improvement vs f_max, " << plan.candidates_considered
              << " candidates)\n";
}

int run(int argc, char** argv) {
    CLI::App app{"DVFS-aware power/completion-time modeling and VM provisioning planner"};
    app.require_subcommand(1);

    // calibrate-power
    auto* cal_p = app.add_subcommand("calibrate-power",
                                     "Calibrate a power model from measurements");
    std::string cp_meas, cp_machine, cp_out;
    bool cp_lsq = false;
    cal_p->add_option("--measurements", cp_meas, "measurement CSV")->required();
    cal_p->add_option("--machine", cp_machine, "machine config JSON")->required();
    cal_p->add_option("--output", cp_out, "output model JSON")->required();
    cal_p->add_flag("--least-squares", cp_lsq,
                    "fit over a full sweep instead of the four corner points");

    // calibrate-ct
    auto* cal_c = app.add_subcommand("calibrate-ct",
                                     "Calibrate a completion time model from measurements");
    std::string cc_meas, cc_machine, cc_out, cc_workload;
    double cc_base = 1.0, cc_probe = 0.2;
    cal_c->add_option("--measurements", cc_meas, "measurement CSV")->required();
    cal_c->add_option("--machine", cc_machine, "machine config JSON")->required();
    cal_c->add_option("--workload", cc_workload, "workload id")->required();
    cal_c->add_option("--output", cc_out, "output model JSON")->required();
    cal_c->add_option("--base-cpu", cc_base, "base cpu level (default 1.0)");
    cal_c->add_option("--probe-cpu", cc_probe, "probe cpu level (default 0.2)");

    // predict-power
    auto* pred_p = app.add_subcommand("predict-power", "Predict watts for (cpu, f)");
    std::string pp_model, pp_cores;
    double pp_cpu = 1.0;
    int pp_freq = 0;
    pred_p->add_option("--model", pp_model, "power model JSON")->required();
    pred_p->add_option("--cpu", pp_cpu, "cpu fraction in [0, 1]")->required();
    pred_p->add_option("--freq-mhz", pp_freq, "operating frequency");
    pred_p->add_option("--core-freqs", pp_cores,
                       "comma-separated per-core MHz; the highest is used");

    // predict-ct
    auto* pred_c = app.add_subcommand("predict-ct", "Predict seconds for (cpu, f)");
    std::string pc_model;
    double pc_cpu = 1.0;
    int pc_freq = 0;
    pred_c->add_option("--model", pc_model, "completion time model JSON")->required();
    pred_c->add_option("--cpu", pc_cpu, "cpu fraction in (0, 1]")->required();
    pred_c->add_option("--freq-mhz", pc_freq, "operating frequency")->required();

    // validate
    auto* val = app.add_subcommand("validate", "Compare predictions to measurements");
    std::string v_meas, v_power_model, v_ct_model, v_prefix, v_workload;
    bool v_baseline = false, v_exclude = false;
    val->add_option("--measurements", v_meas, "measurement CSV")->required();
    val->add_option("--power-model", v_power_model, "power model JSON");
    val->add_option("--ct-model", v_ct_model, "completion time model JSON");
    val->add_option("--workload", v_workload, "workload id for completion time rows");
    val->add_option("--output-prefix", v_prefix, "write <prefix>.report.json and CDF files");
    val->add_flag("--baseline", v_baseline, "also evaluate the quadratic/CPU-bound baseline");
    val->add_flag("--exclude-calibration-points", v_exclude,
                  "drop the calibration corners, exact by construction");

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "Choose an operating point");
    std::string pl_power, pl_ct, pl_out;
    int pl_scenario = 1;
    double pl_constraint = 0.0;
    std::optional<double> pl_step;
    std::vector<std::string> pl_compare;
    plan_cmd->add_option("--power-model", pl_power, "power model JSON")->required();
    plan_cmd->add_option("--ct-model", pl_ct, "completion time model JSON")->required();
    plan_cmd->add_option("--scenario", pl_scenario, "1: min power under CT threshold; "
                                                    "2: min CT under power budget")
        ->check(CLI::IsMember({1, 2}))
        ->required();
    plan_cmd->add_option("--constraint", pl_constraint,
                         "CT threshold in seconds (scenario 1) or power budget in watts "
                         "(scenario 2)")
        ->required();
    plan_cmd->add_option("--cpu-step", pl_step, "cpu granularity (default 0.01 or "
                                                "DVFS_CPU_STEP)");
    plan_cmd->add_option("--compare", pl_compare,
                         "additional power/ct model JSON pairs to plan against")
        ->expected(-2);
    plan_cmd->add_option("--output", pl_out, "output plan JSON");

    CLI11_PARSE(app, argc, argv);

    if (cal_p->parsed()) {
        const auto machine = load_machine(cp_machine);
        const auto grid = machine.grid();
        const auto ms = load_measurements(cp_meas, machine.system_id);
        std::vector<std::string> warnings;
        PowerModel model = [&] {
            if (cp_lsq)
                return fit_power_least_squares(grid, ms);
            return calibrate_power(machine.system_id, power_corners(ms, grid), &warnings);
        }();
        print_warnings(warnings);
        write_json_file(cp_out, to_json(model));
        const auto corners = corners_from_model(model);
        std::cout << "A = " << fixed2(model.a()) << " W, B = " << fixed2(model.b())
                  << " W, alpha = " << fixed2(model.alpha()) << " W\n"
                  << "dynamic range = " << fixed2(dynamic_range_percent(corners)) << "%\n";
        if (model.r_squared())
            std::cout << "R^2 = " << *model.r_squared() << '\n';
        return 0;
    }

    if (cal_c->parsed()) {
        const auto machine = load_machine(cc_machine);
        const auto grid = machine.grid();
        const auto ms = load_measurements(cc_meas, machine.system_id);
        std::vector<std::string> warnings;
        const auto model = calibrate_ct(machine.system_id, cc_workload,
                                        ct_corners(ms, grid, cc_workload, cc_base, cc_probe),
                                        &warnings);
        print_warnings(warnings);
        write_json_file(cc_out, to_json(model));
        std::cout << "U = " << model.u() << ", theta(f_max) = " << model.theta_fmax()
                  << ", theta(f_min) = " << model.theta_fmin() << ", K = " << model.k()
                  << '\n';
        return 0;
    }

    if (pred_p->parsed()) {
        const auto model = power_model_from_json(load_json_file(pp_model));
        Frequency f = [&] {
            if (!pp_cores.empty())
                return effective_frequency({parse_core_freqs(pp_cores)}, model.grid());
            if (pp_freq <= 0)
                throw Error("either --freq-mhz or --core-freqs is required");
            return Frequency(pp_freq);
        }();
        std::cout << fixed2(model.predict(pp_cpu, f)) << " W\n";
        return 0;
    }

    if (pred_c->parsed()) {
        const auto model = ct_model_from_json(load_json_file(pc_model));
        const CpuFraction cpu(pc_cpu);
        if (model.extrapolates(cpu))
            std::cerr << "warning: cpu above the calibration base of "
                      << model.base_cpu().value() << "; prediction is an extrapolation\n";
        std::cout << fixed2(model.predict(cpu, Frequency(pc_freq))) << " s\n";
        return 0;
    }

    if (val->parsed()) {
        if (v_power_model.empty() == v_ct_model.empty())
            throw Error("validate needs exactly one of --power-model / --ct-model");
        if (!v_power_model.empty()) {
            const auto model = power_model_from_json(load_json_file(v_power_model));
            const auto ms = load_measurements(v_meas, model.system_id());
            const auto corners = corners_from_model(model);
            const int fmin = model.grid().f_min().mhz();
            const int fmax = model.grid().f_max().mhz();
            std::vector<ValidationTarget> targets;
            targets.push_back({"power_model",
                               [&model](double cpu, Frequency f) {
                                   return model.predict(cpu, f);
                               },
                               {{0.0, fmin}, {0.0, fmax}, {1.0, fmin}, {1.0, fmax}}});
            if (v_baseline)
                targets.push_back({"petrucci_power",
                                   [corners](double cpu, Frequency f) {
                                       return petrucci_power(corners, cpu, f);
                                   },
                                   targets.front().corners});
            run_validation(ms, model.system_id(), Metric::power_watts, "", targets,
                           v_exclude, v_prefix);
        } else {
            const auto model = ct_model_from_json(load_json_file(v_ct_model));
            const auto ms = load_measurements(v_meas, model.system_id());
            const std::string workload =
                v_workload.empty() ? model.workload_id() : v_workload;
            const int fmin = model.grid().f_min().mhz();
            const int fmax = model.grid().f_max().mhz();
            const double base = model.base_cpu().value();
            const double probe = model.probe_cpu().value();
            std::vector<ValidationTarget> targets;
            targets.push_back({"ct_model",
                               [&model](double cpu, Frequency f) {
                                   return model.predict(CpuFraction(cpu), f);
                               },
                               {{base, fmin}, {base, fmax}, {probe, fmin}, {probe, fmax}}});
            if (v_baseline) {
                const double ct_full_fmax =
                    model.predict(CpuFraction(1.0), model.grid().f_max());
                const FrequencyGrid grid = model.grid();
                targets.push_back({"petrucci_ct",
                                   [ct_full_fmax, grid](double cpu, Frequency f) {
                                       return petrucci_ct(ct_full_fmax, CpuFraction(cpu), f,
                                                          grid);
                                   },
                                   targets.front().corners});
            }
            run_validation(ms, model.system_id(), Metric::completion_seconds, workload,
                           targets, v_exclude, v_prefix);
        }
        return 0;
    }

    if (plan_cmd->parsed()) {
        const double step = pl_step ? *pl_step : default_cpu_step();
        auto plan_pair = [&](const std::string& power_path, const std::string& ct_path) {
            const auto pm = power_model_from_json(load_json_file(power_path));
            const auto ctm = ct_model_from_json(load_json_file(ct_path));
            const ProvisionPlan plan = pl_scenario == 1
                                           ? plan_scenario1(pm, ctm, pl_constraint, step)
                                           : plan_scenario2(pm, ctm, pl_constraint, step);
            print_plan(plan, pm.system_id());
            return std::pair{pm.system_id(), plan};
        };
        auto [system_id, plan] = plan_pair(pl_power, pl_ct);
        auto best_id = system_id;
        auto best = plan;
        for (size_t i = 0; i + 1 < pl_compare.size(); i += 2) {
            auto [other_id, other] = plan_pair(pl_compare[i], pl_compare[i + 1]);
            const double best_value = pl_scenario == 1 ? best.chosen.predicted_power
                                                       : best.chosen.predicted_ct;
            const double other_value = pl_scenario == 1 ? other.chosen.predicted_power
                                                        : other.chosen.predicted_ct;
            if (other_value < best_value) {
                best = other;
                best_id = other_id;
            }
        }
        if (!pl_compare.empty())
            std::cout << "best machine: " << best_id << '\n';
        if (!pl_out.empty())
            write_json_file(pl_out, to_json(best));
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const dvfsplan::InfeasibleConstraintError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const dvfsplan::NoMatchingPointsError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
