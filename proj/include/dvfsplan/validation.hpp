#pragma once

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dvfsplan/measurements.hpp"
#include "dvfsplan/types.hpp"

namespace dvfsplan {

struct ErrorPoint {
    double cpu = 0.0;
    Frequency frequency;
    double measured = 0.0;
    double predicted = 0.0;
    double percent = 0.0;
};

struct ErrorReport {
    std::string model_name;
    std::vector<ErrorPoint> per_point;
    double avg_percent = 0.0;
    double max_percent = 0.0;
    // Empirical CDF over the distinct per-point percents: (threshold, fraction <=).
    std::vector<std::pair<double, double>> cdf;
};

using Predictor = std::function<double(double cpu, Frequency f)>;

/// Points identified by (cpu, frequency); used to drop calibration corners,
/// which are exact by construction and bias averages toward zero.
using PointKey = std::pair<double, int>;

inline ErrorReport evaluate(const std::string& model_name, const std::string& system_id,
                            const Predictor& predict, const MeasurementSet& measurements,
                            Metric metric, const std::string& workload_id = "",
                            bool exclude_calibration_points = false,
                            const std::vector<PointKey>& calibration_corners = {}) {
    if (system_id != measurements.system_id())
        throw SystemMismatchError("model calibrated for '" + system_id +
                                  "' but measurements are from '" +
                                  measurements.system_id() + "'");
    ErrorReport report;
    report.model_name = model_name;
    for (const auto& r : measurements.records()) {
        if (r.metric != metric || r.workload_id != workload_id)
            continue;
        const PointKey key{r.cpu, r.frequency.mhz()};
        if (exclude_calibration_points &&
            std::find(calibration_corners.begin(), calibration_corners.end(), key) !=
                calibration_corners.end())
            continue;
        const double predicted = predict(r.cpu, r.frequency);
        const PredictionError e = error_percent(r.value, predicted);
        report.per_point.push_back({r.cpu, r.frequency, r.value, predicted, e.percent});
    }
    if (report.per_point.empty())
        throw NoMatchingPointsError("no measurements match metric/workload '" +
                                    workload_id + "'");

    std::vector<double> percents;
    for (const auto& p : report.per_point)
        percents.push_back(p.percent);
    std::sort(percents.begin(), percents.end());
    // summing in sorted order keeps the mean permutation-invariant bit for bit
    double sum = 0.0;
    for (double p : percents)
        sum += p;
    report.avg_percent = sum / static_cast<double>(percents.size());
    report.max_percent = percents.back();

    const double n = static_cast<double>(percents.size());
    for (size_t i = 0; i < percents.size(); ++i) {
        const bool last_of_value = i + 1 == percents.size() || percents[i + 1] != percents[i];
        if (last_of_value)
            report.cdf.emplace_back(percents[i], static_cast<double>(i + 1) / n);
    }
    return report;
}

struct ComparisonRow {
    std::string model_name;
    double avg_percent = 0.0;
    double max_percent = 0.0;
    bool winner = false; // lowest average error
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
};

/// Side-by-side avg/max over reports covering the same point set.
inline ComparisonTable compare(const std::vector<ErrorReport>& reports) {
    if (reports.size() < 2)
        throw Error("comparison needs at least two reports");
    auto keys = [](const ErrorReport& r) {
        std::set<PointKey> out;
        for (const auto& p : r.per_point)
            out.insert({p.cpu, p.frequency.mhz()});
        return out;
    };
    const auto ref = keys(reports.front());
    for (const auto& r : reports)
        if (keys(r) != ref)
            throw PointSetMismatchError("reports cover different point sets");

    ComparisonTable table;
    double best = reports.front().avg_percent;
    for (const auto& r : reports)
        best = std::min(best, r.avg_percent);
    for (const auto& r : reports)
        table.rows.push_back({r.model_name, r.avg_percent, r.max_percent,
                              r.avg_percent == best});
    return table;
}

} // namespace dvfsplan
