#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dvfsplan/comptime.hpp"
#include "dvfsplan/power.hpp"
#include "dvfsplan/types.hpp"

namespace dvfsplan {

struct OperatingPoint {
    Frequency frequency;
    double cpu = 0.0;
    double predicted_power = 0.0;
    double predicted_ct = 0.0;
};

enum class Objective { min_power, min_ct };

struct PlanConstraint {
    std::optional<double> ct_threshold_s;
    std::optional<double> power_budget_w;
};

struct ProvisionPlan {
    OperatingPoint chosen;
    OperatingPoint reference;
    Objective objective = Objective::min_power;
    PlanConstraint constraint;
    std::size_t candidates_considered = 0;
    double savings_percent = 0.0;
};

namespace detail {

inline void require_same_machine(const PowerModel& pm, const CompletionTimeModel& ctm) {
    if (pm.grid() != ctm.grid())
        throw GridMismatchError("power and completion time models use different grids");
    if (pm.system_id() != ctm.system_id())
        throw SystemMismatchError("power model is for '" + pm.system_id() +
                                  "' but completion time model is for '" +
                                  ctm.system_id() + "'");
}

inline std::vector<double> cpu_levels(double cpu_step) {
    if (!(cpu_step > 0.0) || cpu_step > 1.0)
        throw Error("cpu step must be in (0, 1]");
    std::vector<double> levels;
    const double eps = 1e-9;
    for (int i = 1; i * cpu_step <= 1.0 + eps; ++i)
        levels.push_back(std::min(i * cpu_step, 1.0));
    if (levels.empty() || levels.back() < 1.0 - eps)
        levels.push_back(1.0);
    return levels;
}

// Objective value first, then lower frequency, then lower cpu.
inline bool better(double value_a, const OperatingPoint& a, double value_b,
                   const OperatingPoint& b) {
    if (value_a != value_b)
        return value_a < value_b;
    if (a.frequency != b.frequency)
        return a.frequency < b.frequency;
    return a.cpu < b.cpu;
}

} // namespace detail

/// Cartesian product of grid steps and cpu levels {step, 2*step, ..., 1.0},
/// filtered by whichever constraint is set. Each point carries both
/// predictions.
inline std::vector<OperatingPoint> enumerate_feasible(const PowerModel& pm,
                                                      const CompletionTimeModel& ctm,
                                                      const PlanConstraint& constraint,
                                                      double cpu_step) {
    detail::require_same_machine(pm, ctm);
    std::vector<OperatingPoint> feasible;
    for (Frequency f : pm.grid().steps()) {
        for (double cpu : detail::cpu_levels(cpu_step)) {
            OperatingPoint pt{f, cpu, pm.predict(cpu, f),
                              ctm.predict(CpuFraction(cpu), f)};
            if (constraint.ct_threshold_s && pt.predicted_ct > *constraint.ct_threshold_s)
                continue;
            if (constraint.power_budget_w && pt.predicted_power > *constraint.power_budget_w)
                continue;
            feasible.push_back(pt);
        }
    }
    if (feasible.empty())
        throw InfeasibleConstraintError("no (frequency, cpu) combination satisfies the "
                                        "constraint");
    return feasible;
}

/// Scenario 1: least power consuming combination meeting a completion time
/// threshold. Savings are relative to running at f_max with the smallest cpu
/// level that still meets the threshold there.
inline ProvisionPlan plan_scenario1(const PowerModel& pm, const CompletionTimeModel& ctm,
                                    double ct_threshold_s, double cpu_step) {
    PlanConstraint constraint;
    constraint.ct_threshold_s = ct_threshold_s;
    const auto feasible = enumerate_feasible(pm, ctm, constraint, cpu_step);

    const OperatingPoint* chosen = &feasible.front();
    for (const auto& pt : feasible)
        if (detail::better(pt.predicted_power, pt, chosen->predicted_power, *chosen))
            chosen = &pt;

    const OperatingPoint* reference = nullptr;
    for (const auto& pt : feasible) {
        if (pt.frequency != pm.grid().f_max())
            continue;
        if (!reference || pt.cpu < reference->cpu)
            reference = &pt;
    }
    if (!reference)
        reference = chosen; // threshold unreachable at f_max; no savings baseline

    const double savings = reference->predicted_power > 0.0
                               ? (reference->predicted_power - chosen->predicted_power) /
                                     reference->predicted_power * 100.0
                               : 0.0;
    return {*chosen, *reference, Objective::min_power, constraint, feasible.size(),
            savings};
}

/// Scenario 2: best completion time under a power budget. Speedup is
/// relative to the best-CT point at f_max within the same budget.
inline ProvisionPlan plan_scenario2(const PowerModel& pm, const CompletionTimeModel& ctm,
                                    double power_budget_w, double cpu_step) {
    PlanConstraint constraint;
    constraint.power_budget_w = power_budget_w;
    const auto feasible = enumerate_feasible(pm, ctm, constraint, cpu_step);

    const OperatingPoint* chosen = &feasible.front();
    for (const auto& pt : feasible)
        if (detail::better(pt.predicted_ct, pt, chosen->predicted_ct, *chosen))
            chosen = &pt;

    const OperatingPoint* reference = nullptr;
    for (const auto& pt : feasible) {
        if (pt.frequency != pm.grid().f_max())
            continue;
        if (!reference || pt.predicted_ct < reference->predicted_ct)
            reference = &pt;
    }
    if (!reference)
        reference = chosen; // budget excludes every f_max point

    const double savings = reference->predicted_ct > 0.0
                               ? (reference->predicted_ct - chosen->predicted_ct) /
                                     reference->predicted_ct * 100.0
                               : 0.0;
    return {*chosen, *reference, Objective::min_ct, constraint, feasible.size(), savings};
}

} // namespace dvfsplan
