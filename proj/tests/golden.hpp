#pragma once

// Published calibration inputs and constants for the five reference systems,
// shared by the unit and acceptance suites.

#include <string>
#include <vector>

#include "dvfsplan/power.hpp"
#include "dvfsplan/types.hpp"

namespace golden {

struct System {
    std::string id;
    std::vector<int> grid_mhz;
    double p_idle_fmin, p_idle_fmax, p_full_fmin, p_full_fmax; // watts
    double a, b, alpha;                                        // published constants
    double dynamic_range_percent;
};

inline std::vector<int> stepped(int fmin, int fmax, int step) {
    std::vector<int> out;
    for (int f = fmin; f <= fmax; f += step)
        out.push_back(f);
    return out;
}

inline const std::vector<System>& systems() {
    static const std::vector<System> all = {
        {"i7-2600", stepped(1600, 3400, 200), 35.54, 36.14, 51.36, 92.56, 76.72, -20.28,
         1.09, 61.60},
        {"i5-760", stepped(1862, 2793, 133), 55.75, 56.28, 107.25, 149.72, 125.82, -32.38,
         1.59, 62.76},
        {"xeon-e5507", stepped(1596, 2261, 133), 77.28, 77.46, 127.77, 148.82, 70.95, 0.41,
         0.61, 48.07},
        {"xeon-e5520", stepped(1596, 2261, 133), 191.01, 191.01, 208.38, 219.45, 37.638,
         -9.198, 0.00, 12.95},
        {"amd-9550", {1100, 2200}, 65.63, 71.62, 83.88, 125.44, 71.14, -17.32, 11.98,
         50.86},
    };
    return all;
}

inline dvfsplan::PowerCalibrationInputs inputs(const System& s) {
    return {dvfsplan::FrequencyGrid::validate_mhz(s.grid_mhz), s.p_idle_fmin, s.p_idle_fmax,
            s.p_full_fmin, s.p_full_fmax};
}

// Per-frequency dynamic power slopes for the i7, used by the least-squares
// diagnostics checks.
inline const std::vector<std::pair<int, double>>& i7_beta_table() {
    static const std::vector<std::pair<int, double>> table = {
        {3400, 57.77}, {3200, 52.49}, {3000, 45.84}, {2800, 40.04}, {2600, 34.93},
        {2400, 30.30}, {2200, 26.14}, {2000, 22.47}, {1800, 18.95}, {1600, 16.00},
    };
    return table;
}

} // namespace golden
