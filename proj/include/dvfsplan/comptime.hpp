#pragma once

#include <string>
#include <vector>

#include "dvfsplan/types.hpp"

namespace dvfsplan {

/// The seven calibration inputs of the completion time model: grid endpoints,
/// two cpu levels and the four completion times at their corners. base_cpu is
/// normally 1.0; 0.8 for workloads that degrade above 80% allocation.
struct CtCalibrationInputs {
    FrequencyGrid grid;
    CpuFraction base_cpu{1.0};
    CpuFraction probe_cpu{0.2};
    double ct_base_fmax = 0.0; // seconds at (base_cpu, f_max)
    double ct_base_fmin = 0.0;
    double ct_probe_fmax = 0.0;
    double ct_probe_fmin = 0.0;
};

/// CT(cpu, f) = [theta_f * base_cpu/cpu + (1 - theta_f)]
///            * [U * f_max/f + (1 - U)] * ct_base_fmax
/// with theta_f = K * (f_max/f - 1) + theta_fmax.
class CompletionTimeModel {
public:
    CompletionTimeModel(std::string system_id, std::string workload_id, FrequencyGrid grid,
                        double u, double theta_fmax, double theta_fmin, double k,
                        CpuFraction base_cpu, CpuFraction probe_cpu, double ct_base_fmax)
        : system_id_(std::move(system_id)), workload_id_(std::move(workload_id)),
          grid_(std::move(grid)), u_(u), theta_fmax_(theta_fmax), theta_fmin_(theta_fmin),
          k_(k), base_cpu_(base_cpu), probe_cpu_(probe_cpu), ct_base_fmax_(ct_base_fmax) {
        if (!(ct_base_fmax > 0.0))
            throw NonPositiveCtError("base completion time must be positive");
    }

    const std::string& system_id() const { return system_id_; }
    const std::string& workload_id() const { return workload_id_; }
    const FrequencyGrid& grid() const { return grid_; }
    double u() const { return u_; }
    double v() const { return 1.0 - u_; }
    double theta_fmax() const { return theta_fmax_; }
    double theta_fmin() const { return theta_fmin_; }
    double k() const { return k_; }
    CpuFraction base_cpu() const { return base_cpu_; }
    CpuFraction probe_cpu() const { return probe_cpu_; }
    double ct_base_fmax() const { return ct_base_fmax_; }

    /// Compute-bound fraction at frequency f, from the two-endpoint line.
    double theta(Frequency f) const {
        const double fmax = grid_.f_max().mhz();
        return k_ * (fmax / f.mhz() - 1.0) + theta_fmax_;
    }

    double predict(CpuFraction cpu, Frequency f) const {
        grid_.require(f);
        const double th = theta(f);
        const double cpu_bracket = th * base_cpu_.value() / cpu.value() + (1.0 - th);
        const double fmax = grid_.f_max().mhz();
        const double freq_bracket = u_ * fmax / f.mhz() + (1.0 - u_);
        return cpu_bracket * freq_bracket * ct_base_fmax_;
    }

    /// Predictions above the calibration base are extrapolations; some
    /// workloads run longer at 100% than at 80%.
    bool extrapolates(CpuFraction cpu) const { return cpu.value() > base_cpu_.value(); }

private:
    std::string system_id_;
    std::string workload_id_;
    FrequencyGrid grid_;
    double u_;
    double theta_fmax_;
    double theta_fmin_;
    double k_;
    CpuFraction base_cpu_;
    CpuFraction probe_cpu_;
    double ct_base_fmax_;
};

/// Closed-form calibration from the seven inputs. U or theta endpoints
/// outside [-0.1, 1.5] suggest bad measurements and warn without aborting.
inline CompletionTimeModel calibrate_ct(const std::string& system_id,
                                        const std::string& workload_id,
                                        const CtCalibrationInputs& in,
                                        std::vector<std::string>* warnings = nullptr) {
    if (!(in.ct_base_fmax > 0.0) || !(in.ct_base_fmin > 0.0) || !(in.ct_probe_fmax > 0.0) ||
        !(in.ct_probe_fmin > 0.0))
        throw NonPositiveCtError("all four calibration completion times must be positive");
    if (in.probe_cpu.value() >= in.base_cpu.value())
        throw DegenerateProbeError("probe cpu level must be below the base level");

    const double fmin = in.grid.f_min().mhz();
    const double fmax = in.grid.f_max().mhz();
    const double base = in.base_cpu.value();
    const double probe = in.probe_cpu.value();

    const double u =
        (in.ct_base_fmin - in.ct_base_fmax) / in.ct_base_fmax * fmin / (fmax - fmin);
    const double probe_ratio = probe / (base - probe);
    const double theta_fmax =
        probe_ratio * (in.ct_probe_fmax - in.ct_base_fmax) / in.ct_base_fmax;
    const double theta_fmin =
        probe_ratio * (in.ct_probe_fmin - in.ct_base_fmin) / in.ct_base_fmin;
    const double k = (theta_fmin - theta_fmax) * fmin / (fmax - fmin);

    if (warnings) {
        auto check = [&](const char* name, double v) {
            if (v < -0.1 || v > 1.5)
                warnings->push_back(std::string(name) + " = " + std::to_string(v) +
                                    " outside [-0.1, 1.5]; measurements look suspect");
        };
        check("U", u);
        check("theta_fmax", theta_fmax);
        check("theta_fmin", theta_fmin);
    }

    return CompletionTimeModel(system_id, workload_id, in.grid, u, theta_fmax, theta_fmin,
                               k, in.base_cpu, in.probe_cpu, in.ct_base_fmax);
}

/// Prior-work baseline: performance fully proportional to cpu * f, i.e.
/// CT = CT_fmax / (cpu * f/f_max). Assumes every task is CPU-bound.
inline double petrucci_ct(double ct_at_fmax, CpuFraction cpu, Frequency f,
                          const FrequencyGrid& grid) {
    grid.require(f);
    const double fmax = grid.f_max().mhz();
    return ct_at_fmax / (cpu.value() * f.mhz() / fmax);
}

} // namespace dvfsplan
