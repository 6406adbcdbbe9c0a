#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dvfsplan/types.hpp"

namespace dvfsplan {

enum class Metric { power_watts, completion_seconds };

inline std::string to_string(Metric m) {
    return m == Metric::power_watts ? "power_watts" : "completion_seconds";
}

inline Metric metric_from_string(const std::string& s) {
    if (s == "power_watts")
        return Metric::power_watts;
    if (s == "completion_seconds")
        return Metric::completion_seconds;
    throw CsvParseError("unknown metric '" + s + "'");
}

struct Measurement {
    Metric metric = Metric::power_watts;
    std::string workload_id; // empty for power rows
    double cpu = 0.0;        // 0 permitted for power rows only
    Frequency frequency;
    double value = 0.0;
};

/// Raw calibration observations for one machine, keyed by
/// (metric, workload_id, cpu, frequency).
class MeasurementSet {
public:
    explicit MeasurementSet(std::string system_id) : system_id_(std::move(system_id)) {}

    const std::string& system_id() const { return system_id_; }
    const std::vector<Measurement>& records() const { return records_; }

    void add(Measurement m) {
        if (m.value < 0.0)
            throw Error("measurement value must be nonnegative");
        if (m.cpu < 0.0 || m.cpu > 1.0)
            throw Error("measurement cpu must be in [0, 1]");
        if (m.metric == Metric::completion_seconds && !(m.cpu > 0.0))
            throw Error("completion time rows require cpu > 0");
        if (find(m.metric, m.workload_id, m.cpu, m.frequency))
            throw DuplicateMeasurementError(
                "duplicate record for (" + to_string(m.metric) + ", " + m.workload_id +
                ", cpu=" + std::to_string(m.cpu) + ", " + std::to_string(m.frequency.mhz()) +
                " MHz)");
        records_.push_back(std::move(m));
    }

    std::optional<double> find(Metric metric, const std::string& workload_id, double cpu,
                               Frequency f) const {
        for (const auto& r : records_)
            if (r.metric == metric && r.workload_id == workload_id && r.cpu == cpu &&
                r.frequency == f)
                return r.value;
        return std::nullopt;
    }

    double require(Metric metric, const std::string& workload_id, double cpu,
                   Frequency f) const {
        auto v = find(metric, workload_id, cpu, f);
        if (!v)
            throw MissingCornerPointError("missing " + to_string(metric) + " record at cpu=" +
                                          std::to_string(cpu) + ", f=" +
                                          std::to_string(f.mhz()) + " MHz");
        return *v;
    }

    /// CSV format: header `metric,workload_id,cpu,freq_mhz,value`.
    static MeasurementSet from_csv(std::istream& in, std::string system_id) {
        MeasurementSet set(std::move(system_id));
        std::string line;
        if (!std::getline(in, line))
            throw CsvParseError("empty measurement file");
        if (strip(line) != "metric,workload_id,cpu,freq_mhz,value")
            throw CsvParseError("bad header: expected "
                                "'metric,workload_id,cpu,freq_mhz,value'");
        size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (strip(line).empty())
                continue;
            auto fields = split(line);
            if (fields.size() != 5)
                throw CsvParseError("line " + std::to_string(lineno) +
                                    ": expected 5 fields, got " +
                                    std::to_string(fields.size()));
            try {
                Measurement m{metric_from_string(fields[0]), fields[1],
                              std::stod(fields[2]), Frequency(std::stoi(fields[3])),
                              std::stod(fields[4])};
                set.add(std::move(m));
            } catch (const std::invalid_argument&) {
                throw CsvParseError("line " + std::to_string(lineno) + ": malformed number");
            }
        }
        return set;
    }

    void to_csv(std::ostream& out) const {
        out << "metric,workload_id,cpu,freq_mhz,value\n";
        for (const auto& r : records_) {
            std::ostringstream row;
            row.precision(17);
            row << to_string(r.metric) << ',' << r.workload_id << ',' << r.cpu << ','
                << r.frequency.mhz() << ',' << r.value;
            out << row.str() << '\n';
        }
    }

private:
    static std::string strip(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            return "";
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    static std::vector<std::string> split(const std::string& line) {
        std::vector<std::string> out;
        std::string field;
        std::istringstream ss(line);
        while (std::getline(ss, field, ','))
            out.push_back(strip(field));
        if (!line.empty() && line.back() == ',')
            out.push_back("");
        return out;
    }

    std::string system_id_;
    std::vector<Measurement> records_;
};

} // namespace dvfsplan
