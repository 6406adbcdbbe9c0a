#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dvfsplan/measurements.hpp"
#include "dvfsplan/types.hpp"

namespace dvfsplan {

/// The six calibration inputs of the power model: the grid endpoints plus
/// idle and full-load power at f_min and f_max.
struct PowerCalibrationInputs {
    FrequencyGrid grid;
    double p_idle_fmin = 0.0; // watts at cpu=0, f_min
    double p_idle_fmax = 0.0; // watts at cpu=0, f_max
    double p_full_fmin = 0.0; // watts at cpu=1, f_min
    double p_full_fmax = 0.0; // watts at cpu=1, f_max
};

/// Fraction of peak power under software control:
/// (peak - lowest idle) / peak * 100.
inline double dynamic_range_percent(const PowerCalibrationInputs& in) {
    return (in.p_full_fmax - in.p_idle_fmin) / in.p_full_fmax * 100.0;
}

/// TPower(cpu, f) = p_idle_fmax - alpha*(f_max - f)/f_max + (A*f/f_max + B)*cpu
class PowerModel {
public:
    PowerModel(std::string system_id, FrequencyGrid grid, double p_idle_fmax, double alpha,
               double a, double b, std::string source = "closed_form",
               std::optional<double> r_squared = std::nullopt)
        : system_id_(std::move(system_id)), grid_(std::move(grid)),
          p_idle_fmax_(p_idle_fmax), alpha_(alpha), a_(a), b_(b),
          source_(std::move(source)), r_squared_(r_squared) {}

    const std::string& system_id() const { return system_id_; }
    const FrequencyGrid& grid() const { return grid_; }
    double p_idle_fmax() const { return p_idle_fmax_; }
    double alpha() const { return alpha_; }
    double a() const { return a_; }
    double b() const { return b_; }
    const std::string& source() const { return source_; }
    std::optional<double> r_squared() const { return r_squared_; }

    /// Dynamic power slope at frequency f: beta(f) = A*f/f_max + B.
    double beta(Frequency f) const {
        return a_ * static_cast<double>(f.mhz()) / grid_.f_max().mhz() + b_;
    }

    double predict(double cpu, Frequency f) const {
        grid_.require(f);
        if (cpu < 0.0 || cpu > 1.0)
            throw Error("cpu must be in [0, 1] for power prediction");
        const double fmax = grid_.f_max().mhz();
        return p_idle_fmax_ - alpha_ * (fmax - f.mhz()) / fmax + beta(f) * cpu;
    }

private:
    std::string system_id_;
    FrequencyGrid grid_;
    double p_idle_fmax_;
    double alpha_;
    double a_;
    double b_;
    std::string source_;
    std::optional<double> r_squared_;
};

/// Closed-form calibration from the six inputs. Inverted idle/full orderings
/// only warn; a negative beta(f_min) aborts because every low-f, high-cpu
/// prediction would be non-physical.
inline PowerModel calibrate_power(const std::string& system_id,
                                  const PowerCalibrationInputs& in,
                                  std::vector<std::string>* warnings = nullptr) {
    const double fmin = in.grid.f_min().mhz();
    const double fmax = in.grid.f_max().mhz();

    if (!(in.p_idle_fmax < in.p_full_fmax))
        throw InvalidCalibrationError("no dynamic range: idle power at f_max must be "
                                      "below full-load power at f_max");
    auto warn = [&](const std::string& msg) {
        if (warnings)
            warnings->push_back(msg);
    };
    if (in.p_idle_fmin > in.p_idle_fmax)
        warn("idle power decreases with frequency (p_idle_fmin > p_idle_fmax)");
    if (in.p_full_fmin > in.p_full_fmax)
        warn("full-load power decreases with frequency (p_full_fmin > p_full_fmax)");

    const double dyn_fmax = in.p_full_fmax - in.p_idle_fmax;
    const double dyn_fmin = in.p_full_fmin - in.p_idle_fmin;
    const double a = (dyn_fmax - dyn_fmin) * fmax / (fmax - fmin);
    const double b = dyn_fmax - a;
    const double alpha = (in.p_idle_fmax - in.p_idle_fmin) * fmax / (fmax - fmin);

    const double beta_fmin = a * fmin / fmax + b;
    if (beta_fmin < 0.0)
        throw InvalidCalibrationError("beta(f_min) = " + std::to_string(beta_fmin) +
                                      " W is negative");

    return PowerModel(system_id, in.grid, in.p_idle_fmax, alpha, a, b);
}

struct CoreFrequencyAssignment {
    std::vector<Frequency> per_core;
};

/// Chip power is determined by the highest currently operating frequency
/// alone, so that is the f fed to the power model.
inline Frequency effective_frequency(const CoreFrequencyAssignment& assignment,
                                     const FrequencyGrid& grid) {
    if (assignment.per_core.empty())
        throw Error("core frequency assignment is empty");
    Frequency best = assignment.per_core.front();
    for (Frequency f : assignment.per_core) {
        grid.require(f);
        best = std::max(best, f);
    }
    return best;
}

/// Prior-work baseline: quadratic interpolation in relative frequency for
/// both idle and peak power, linear in cpu between them.
inline double petrucci_power(const PowerCalibrationInputs& in, double cpu, Frequency f) {
    in.grid.require(f);
    if (cpu < 0.0 || cpu > 1.0)
        throw Error("cpu must be in [0, 1] for power prediction");
    const double fmin = in.grid.f_min().mhz();
    const double fmax = in.grid.f_max().mhz();
    const double q = (f.mhz() - fmin) * (f.mhz() - fmin) / ((fmax - fmin) * (fmax - fmin));
    const double p_idle = in.p_idle_fmin + (in.p_idle_fmax - in.p_idle_fmin) * q;
    const double p_peak = in.p_full_fmin + (in.p_full_fmax - in.p_full_fmin) * q;
    return p_idle + (p_peak - p_idle) * cpu;
}

/// Fit of the dynamic coefficients (A, B) from per-frequency beta slopes,
/// regressed against relative frequency f/f_max.
inline LinearFit fit_dynamic_coefficients(const FrequencyGrid& grid,
                                          const std::vector<std::pair<Frequency, double>>& betas) {
    std::vector<double> x, y;
    for (const auto& [f, beta] : betas) {
        x.push_back(static_cast<double>(f.mhz()) / grid.f_max().mhz());
        y.push_back(beta);
    }
    return linear_fit(x, y);
}

struct PowerFitDiagnostics {
    double idle_r_squared = 1.0;
    double beta_r_squared = 1.0;
    std::map<int, double> beta_by_mhz;
};

/// Least-squares calibration over a full measurement sweep: alpha from the
/// idle rows, per-frequency beta slopes from the loaded rows, then (A, B)
/// from the beta line. The reported r_squared is the beta-line fit.
inline PowerModel fit_power_least_squares(const FrequencyGrid& grid,
                                          const MeasurementSet& measurements,
                                          PowerFitDiagnostics* diagnostics = nullptr) {
    std::map<int, std::vector<std::pair<double, double>>> by_freq; // mhz -> (cpu, watts)
    for (const auto& r : measurements.records()) {
        if (r.metric != Metric::power_watts)
            continue;
        grid.require(r.frequency);
        by_freq[r.frequency.mhz()].emplace_back(r.cpu, r.value);
    }
    if (by_freq.size() < 2)
        throw InsufficientDataError("need power rows at >= 2 distinct frequencies");

    const double fmax = grid.f_max().mhz();

    // Idle line: P(0, f) = p_idle_fmax - alpha * (fmax - f)/fmax.
    std::vector<double> ix, iy;
    for (const auto& [mhz, rows] : by_freq)
        for (const auto& [cpu, watts] : rows)
            if (cpu == 0.0) {
                ix.push_back((fmax - mhz) / fmax);
                iy.push_back(watts);
            }
    if (ix.size() < 2)
        throw InsufficientDataError("need idle (cpu=0) rows at >= 2 frequencies");
    const LinearFit idle = linear_fit(ix, iy);
    const double alpha = -idle.slope;
    const double p_idle_fmax = idle.intercept;

    // Per-frequency dynamic slope beta_f, then beta_f vs f/fmax.
    std::vector<std::pair<Frequency, double>> betas;
    std::map<int, double> beta_by_mhz;
    for (const auto& [mhz, rows] : by_freq) {
        std::vector<double> cx, cy;
        for (const auto& [cpu, watts] : rows) {
            cx.push_back(cpu);
            cy.push_back(watts);
        }
        if (cx.size() < 2)
            continue;
        const LinearFit per_f = linear_fit(cx, cy);
        betas.emplace_back(Frequency(mhz), per_f.slope);
        beta_by_mhz[mhz] = per_f.slope;
    }
    if (betas.size() < 2)
        throw InsufficientDataError("need >= 2 cpu levels at >= 2 frequencies");
    const LinearFit beta_line = fit_dynamic_coefficients(grid, betas);

    if (diagnostics) {
        diagnostics->idle_r_squared = idle.r_squared;
        diagnostics->beta_r_squared = beta_line.r_squared;
        diagnostics->beta_by_mhz = std::move(beta_by_mhz);
    }
    return PowerModel(measurements.system_id(), grid, p_idle_fmax, alpha, beta_line.slope,
                      beta_line.intercept, "least_squares", beta_line.r_squared);
}

} // namespace dvfsplan
