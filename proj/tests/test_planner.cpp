#include <cmath>
#include <optional>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "dvfsplan/planner.hpp"
#include "golden.hpp"

using namespace dvfsplan;

namespace {

struct ModelPair {
    PowerModel pm;
    CompletionTimeModel ctm;
};

ModelPair random_models(std::mt19937& rng) {
    std::uniform_int_distribution<int> fmin_dist(800, 2000), span_dist(400, 2400),
        steps_dist(2, 8);
    std::uniform_real_distribution<double> idle_dist(20.0, 200.0), rise_dist(0.0, 10.0),
        dyn_dist(5.0, 80.0), ct_dist(10.0, 1000.0);
    const int steps = steps_dist(rng);
    const int fmin = fmin_dist(rng), fmax = fmin + span_dist(rng);
    std::vector<int> mhz{fmin, fmax};
    std::uniform_int_distribution<int> mid_dist(fmin + 1, fmax - 1);
    for (int i = 2; i < steps; ++i)
        mhz.push_back(mid_dist(rng));
    auto grid = FrequencyGrid::validate_mhz(mhz);

    PowerCalibrationInputs pin{grid, 0, 0, 0, 0};
    pin.p_idle_fmin = idle_dist(rng);
    pin.p_idle_fmax = pin.p_idle_fmin + rise_dist(rng);
    const double dyn_fmin = dyn_dist(rng);
    pin.p_full_fmin = pin.p_idle_fmin + dyn_fmin;
    pin.p_full_fmax = pin.p_idle_fmax + dyn_fmin + dyn_dist(rng);

    CtCalibrationInputs cin{grid, CpuFraction(1.0), CpuFraction(0.2), ct_dist(rng),
                            ct_dist(rng), ct_dist(rng), ct_dist(rng)};
    return {calibrate_power("m", pin), calibrate_ct("m", "w", cin)};
}

struct OracleBest {
    std::optional<OperatingPoint> point;
    std::size_t feasible = 0;
};

// Exhaustive search written directly against the model formulas, kept
// independent of enumerate_feasible.
OracleBest oracle(const ModelPair& models, const PlanConstraint& constraint,
                  double cpu_step, Objective objective) {
    OracleBest best;
    std::vector<double> levels;
    for (int i = 1; i * cpu_step <= 1.0 + 1e-9; ++i)
        levels.push_back(std::min(i * cpu_step, 1.0));
    if (levels.empty() || levels.back() < 1.0 - 1e-9)
        levels.push_back(1.0);
    for (Frequency f : models.pm.grid().steps()) {
        for (double cpu : levels) {
            const double power = models.pm.predict(cpu, f);
            const double ct = models.ctm.predict(CpuFraction(cpu), f);
            if (constraint.ct_threshold_s && ct > *constraint.ct_threshold_s)
                continue;
            if (constraint.power_budget_w && power > *constraint.power_budget_w)
                continue;
            ++best.feasible;
            OperatingPoint candidate{f, cpu, power, ct};
            if (!best.point) {
                best.point = candidate;
                continue;
            }
            const double cv = objective == Objective::min_power ? power : ct;
            const double bv = objective == Objective::min_power
                                  ? best.point->predicted_power
                                  : best.point->predicted_ct;
            if (cv < bv ||
                (cv == bv && (candidate.frequency < best.point->frequency ||
                              (candidate.frequency == best.point->frequency &&
                               candidate.cpu < best.point->cpu))))
                best.point = candidate;
        }
    }
    return best;
}

bool same_point(const OperatingPoint& a, const OperatingPoint& b) {
    return a.frequency == b.frequency && a.cpu == b.cpu &&
           a.predicted_power == b.predicted_power && a.predicted_ct == b.predicted_ct;
}

} // namespace

TEST_CASE("feasible set always contains the reference point for its own CT") {
    std::mt19937 rng(21);
    auto models = random_models(rng);
    const double threshold =
        models.ctm.predict(CpuFraction(1.0), models.pm.grid().f_max());
    auto feasible = enumerate_feasible(models.pm, models.ctm,
                                       {.ct_threshold_s = threshold}, 0.1);
    const bool found = std::any_of(feasible.begin(), feasible.end(),
                                   [&](const OperatingPoint& p) {
                                       return p.frequency == models.pm.grid().f_max() &&
                                              p.cpu == 1.0;
                                   });
    REQUIRE(found);
}

TEST_CASE("unreachable constraints raise InfeasibleConstraint") {
    std::mt19937 rng(22);
    auto models = random_models(rng);
    REQUIRE_THROWS_AS(enumerate_feasible(models.pm, models.ctm, {.ct_threshold_s = 1e-6},
                                         0.1),
                      InfeasibleConstraintError);
    REQUIRE_THROWS_AS(plan_scenario2(models.pm, models.ctm, 1.0, 0.1),
                      InfeasibleConstraintError);
}

TEST_CASE("mismatched grids or systems are rejected") {
    std::mt19937 rng(23);
    auto a = random_models(rng);
    auto b = random_models(rng);
    REQUIRE_THROWS_AS(enumerate_feasible(a.pm, b.ctm, {.ct_threshold_s = 1e9}, 0.1),
                      GridMismatchError);
}

TEST_CASE("compute-bound feasible set matches the closed-form region") {
    // U = 1, theta = 1: CT(cpu, f) = ct_base * (f_max/f) / cpu
    auto grid = FrequencyGrid::validate_mhz({1000, 1500, 2000, 3000, 4000});
    const double ct_base = 100.0;
    CtCalibrationInputs cin{grid, CpuFraction(1.0), CpuFraction(0.2), ct_base,
                            ct_base * 4.0, ct_base * 5.0, ct_base * 20.0};
    auto ctm = calibrate_ct("m", "w", cin);
    REQUIRE(ctm.u() == Catch::Approx(1.0));
    REQUIRE(ctm.theta_fmax() == Catch::Approx(1.0));

    PowerCalibrationInputs pin{grid, 40.0, 42.0, 60.0, 90.0};
    auto pm = calibrate_power("m", pin);

    const double threshold = 2.0 * ct_base;
    auto feasible = enumerate_feasible(pm, ctm, {.ct_threshold_s = threshold}, 0.1);
    for (const auto& p : feasible)
        REQUIRE((4000.0 / p.frequency.mhz()) / p.cpu <= 2.0 + 1e-9);
    // brute-force count of the region over the same lattice
    std::size_t expected = 0;
    for (auto f : grid.steps())
        for (int i = 1; i <= 10; ++i)
            if ((4000.0 / f.mhz()) / (i * 0.1) <= 2.0 + 1e-9)
                ++expected;
    REQUIRE(feasible.size() == expected);
}

TEST_CASE("planner equals exhaustive search on randomized cases") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double steps[] = {0.01, 0.05, 0.1};
    for (int i = 0; i < 120; ++i) {
        auto models = random_models(rng);
        const double cpu_step = steps[i % 3];

        // scenario 1: threshold drawn between min and max predicted CT
        const double ct_lo = models.ctm.predict(CpuFraction(1.0), models.pm.grid().f_max());
        const double ct_hi =
            models.ctm.predict(CpuFraction(cpu_step), models.pm.grid().f_min());
        const double threshold = std::min(ct_lo, ct_hi) +
                                 unit(rng) * std::abs(ct_hi - ct_lo) * 1.5;
        auto expected1 = oracle(models, {.ct_threshold_s = threshold}, cpu_step,
                                Objective::min_power);
        if (expected1.point) {
            auto plan = plan_scenario1(models.pm, models.ctm, threshold, cpu_step);
            REQUIRE(same_point(plan.chosen, *expected1.point));
            REQUIRE(plan.candidates_considered == expected1.feasible);
            REQUIRE(plan.chosen.predicted_ct <= threshold);
        } else {
            REQUIRE_THROWS_AS(plan_scenario1(models.pm, models.ctm, threshold, cpu_step),
                              InfeasibleConstraintError);
        }

        // scenario 2: budget drawn around the power surface
        const double p_lo = models.pm.predict(cpu_step, models.pm.grid().f_min());
        const double p_hi = models.pm.predict(1.0, models.pm.grid().f_max());
        const double budget = p_lo + unit(rng) * (p_hi - p_lo) * 1.2;
        auto expected2 = oracle(models, {.power_budget_w = budget}, cpu_step,
                                Objective::min_ct);
        if (expected2.point) {
            auto plan = plan_scenario2(models.pm, models.ctm, budget, cpu_step);
            REQUIRE(same_point(plan.chosen, *expected2.point));
            REQUIRE(plan.chosen.predicted_power <= budget);
        } else {
            REQUIRE_THROWS_AS(plan_scenario2(models.pm, models.ctm, budget, cpu_step),
                              InfeasibleConstraintError);
        }
    }
}

TEST_CASE("plans are deterministic") {
    std::mt19937 rng(99);
    auto models = random_models(rng);
    const double threshold =
        2.0 * models.ctm.predict(CpuFraction(1.0), models.pm.grid().f_max());
    auto a = plan_scenario1(models.pm, models.ctm, threshold, 0.05);
    auto b = plan_scenario1(models.pm, models.ctm, threshold, 0.05);
    REQUIRE(same_point(a.chosen, b.chosen));
    REQUIRE(a.savings_percent == b.savings_percent);
}

TEST_CASE("loosening the constraint never worsens the objective") {
    std::mt19937 rng(55);
    for (int i = 0; i < 30; ++i) {
        auto models = random_models(rng);
        const double base_ct =
            models.ctm.predict(CpuFraction(1.0), models.pm.grid().f_max());
        double prev_power = std::numeric_limits<double>::infinity();
        for (double factor : {1.0, 1.5, 2.0, 4.0}) {
            auto plan = plan_scenario1(models.pm, models.ctm, base_ct * factor, 0.1);
            REQUIRE(plan.chosen.predicted_power <= prev_power + 1e-12);
            prev_power = plan.chosen.predicted_power;
        }
    }
}

TEST_CASE("an unconstrained scenario 1 picks the smallest monotone point") {
    auto grid = FrequencyGrid::validate_mhz({1600, 2000, 2600, 3400});
    PowerCalibrationInputs pin{grid, 35.54, 36.14, 51.36, 92.56};
    auto pm = calibrate_power("m", pin);
    CtCalibrationInputs cin{grid, CpuFraction(1.0), CpuFraction(0.2), 57.0, 120.0, 280.0,
                            600.0};
    auto ctm = calibrate_ct("m", "w", cin);
    auto plan = plan_scenario1(pm, ctm, 1e12, 0.1);
    REQUIRE(plan.chosen.frequency == grid.f_min());
    REQUIRE(plan.chosen.cpu == Catch::Approx(0.1));
    REQUIRE(plan.savings_percent > 0.0);
}

TEST_CASE("a generous budget in scenario 2 picks full speed") {
    auto grid = FrequencyGrid::validate_mhz({1600, 2000, 2600, 3400});
    PowerCalibrationInputs pin{grid, 35.54, 36.14, 51.36, 92.56};
    auto pm = calibrate_power("m", pin);
    CtCalibrationInputs cin{grid, CpuFraction(1.0), CpuFraction(0.2), 57.0, 120.0, 280.0,
                            600.0};
    auto ctm = calibrate_ct("m", "w", cin);
    auto plan = plan_scenario2(pm, ctm, 1000.0, 0.1);
    REQUIRE(plan.chosen.frequency == grid.f_max());
    REQUIRE(plan.chosen.cpu == 1.0);
}
