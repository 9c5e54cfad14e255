#pragma once

#include "hlab/grid.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace hlab {

/// Per-point verdict carrier shared by every inequality checker.
/// margin >= 0 means the inequality holds at that point.
struct EstimateReport {
    std::string name;
    std::vector<std::pair<std::string, double>> params;
    double tolerance = 5e-3;
    int dim = 1;

    std::vector<Point> points;
    std::vector<double> observed;
    std::vector<double> bound;
    std::vector<double> margin;
    std::vector<char> excluded;

    double min_margin = 0.0;
    double max_margin = 0.0;
    std::size_t argmin = 0;
    bool pass = false;
    std::size_t excluded_count = 0;
    std::vector<std::pair<std::string, double>> extras;

    void add(const Point &p, double obs, double bnd, double mrg, bool skip);
    /// Computes min/max margin, arg-min and the verdict. Throws ConfigError when
    /// every point is excluded.
    void finalize();

    double param(const std::string &key) const;
    double extra(const std::string &key) const;
    /// Largest |margin| over included points.
    double max_abs_margin() const;
};

nlohmann::ordered_json to_json(const EstimateReport &report);
void write_margins_csv(const std::string &path, const EstimateReport &report);

}  // namespace hlab
