#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

namespace dvfsplan {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyGridError : Error { using Error::Error; };
struct SingleStepError : Error { using Error::Error; };
struct NonPositiveMeasuredError : Error { using Error::Error; };
struct FrequencyNotOnGridError : Error { using Error::Error; };
struct ZeroCpuError : Error { using Error::Error; };
struct InvalidCalibrationError : Error { using Error::Error; };
struct InsufficientDataError : Error { using Error::Error; };
struct NonPositiveCtError : Error { using Error::Error; };
struct DegenerateProbeError : Error { using Error::Error; };
struct DuplicateMeasurementError : Error { using Error::Error; };
struct CsvParseError : Error { using Error::Error; };
struct MissingCornerPointError : Error { using Error::Error; };
struct SystemMismatchError : Error { using Error::Error; };
struct NoMatchingPointsError : Error { using Error::Error; };
struct PointSetMismatchError : Error { using Error::Error; };
struct GridMismatchError : Error { using Error::Error; };
struct InfeasibleConstraintError : Error { using Error::Error; };

/// A processor frequency step in integer megahertz. Integer storage keeps
/// grid-membership checks exact.
class Frequency {
public:
    explicit Frequency(int mhz) : mhz_(mhz) {
        if (mhz <= 0)
            throw Error("frequency must be positive, got " + std::to_string(mhz) + " MHz");
    }

    int mhz() const { return mhz_; }
    double ghz() const { return mhz_ / 1000.0; }

    auto operator<=>(const Frequency&) const = default;

private:
    int mhz_;
};

/// Fraction of total machine CPU allocated, in (0, 1].
class CpuFraction {
public:
    explicit CpuFraction(double value) : value_(value) {
        if (!(value > 0.0))
            throw ZeroCpuError("cpu fraction must be positive");
        if (value > 1.0)
            throw Error("cpu fraction must not exceed 1.0");
    }

    double value() const { return value_; }

    auto operator<=>(const CpuFraction&) const = default;

private:
    double value_;
};

/// Ordered set of supported frequency steps of one machine. Synthetic
/// turbo/low modes enter as ordinary steps with operator-supplied
/// effective MHz.
class FrequencyGrid {
public:
    static FrequencyGrid validate(std::vector<Frequency> steps) {
        if (steps.empty())
            throw EmptyGridError("frequency grid has no steps");
        std::sort(steps.begin(), steps.end());
        steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
        if (steps.size() < 2)
            throw SingleStepError("frequency grid needs at least two distinct steps");
        return FrequencyGrid(std::move(steps));
    }

    static FrequencyGrid validate_mhz(const std::vector<int>& mhz) {
        std::vector<Frequency> steps;
        steps.reserve(mhz.size());
        for (int m : mhz)
            steps.emplace_back(m);
        return validate(std::move(steps));
    }

    const std::vector<Frequency>& steps() const { return steps_; }
    Frequency f_min() const { return steps_.front(); }
    Frequency f_max() const { return steps_.back(); }

    bool contains(Frequency f) const {
        return std::binary_search(steps_.begin(), steps_.end(), f);
    }

    void require(Frequency f) const {
        if (!contains(f))
            throw FrequencyNotOnGridError(std::to_string(f.mhz()) +
                                          " MHz is not a grid step");
    }

    std::vector<int> steps_mhz() const {
        std::vector<int> out;
        out.reserve(steps_.size());
        for (Frequency f : steps_)
            out.push_back(f.mhz());
        return out;
    }

    bool operator==(const FrequencyGrid&) const = default;

private:
    explicit FrequencyGrid(std::vector<Frequency> steps) : steps_(std::move(steps)) {}

    std::vector<Frequency> steps_;
};

struct PredictionError {
    double measured = 0.0;
    double predicted = 0.0;
    double percent = 0.0;
};

/// |measured - predicted| / measured * 100
inline PredictionError error_percent(double measured, double predicted) {
    if (!(measured > 0.0))
        throw NonPositiveMeasuredError("measured value must be positive");
    return {measured, predicted, std::abs(measured - predicted) / measured * 100.0};
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

/// Ordinary least squares y = slope * x + intercept. R^2 is 1 for a perfect
/// fit and also for a constant y (zero total variance).
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InsufficientDataError("linear fit needs at least two points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw InsufficientDataError("linear fit needs at least two distinct x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace dvfsplan
