#include "hlab/report.hpp"

#include "hlab/errors.hpp"
#include "hlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace hlab {

void EstimateReport::add(const Point &p, double obs, double bnd, double mrg, bool skip) {
    points.push_back(p);
    observed.push_back(obs);
    bound.push_back(bnd);
    margin.push_back(mrg);
    excluded.push_back(skip ? 1 : 0);
}

void EstimateReport::finalize() {
    min_margin = std::numeric_limits<double>::infinity();
    max_margin = -std::numeric_limits<double>::infinity();
    excluded_count = 0;
    bool any = false;
    for (std::size_t i = 0; i < margin.size(); ++i) {
        if (excluded[i] || !std::isfinite(margin[i])) {
            ++excluded_count;
            continue;
        }
        any = true;
        if (margin[i] < min_margin) {
            min_margin = margin[i];
            argmin = i;
        }
        max_margin = std::max(max_margin, margin[i]);
    }
    if (!any) {
        throw ConfigError(name + ": no points remain after exclusions");
    }
    pass = min_margin >= -tolerance;
}

double EstimateReport::param(const std::string &key) const {
    for (const auto &[k, v] : params) {
        if (k == key) {
            return v;
        }
    }
    throw std::out_of_range("report has no parameter " + key);
}

double EstimateReport::extra(const std::string &key) const {
    for (const auto &[k, v] : extras) {
        if (k == key) {
            return v;
        }
    }
    throw std::out_of_range("report has no extra " + key);
}

double EstimateReport::max_abs_margin() const {
    return std::max(std::abs(min_margin), std::abs(max_margin));
}

nlohmann::ordered_json to_json(const EstimateReport &r) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto &[k, v] : r.params) {
        params[k] = v;
    }
    j["params"] = params;
    j["tolerance"] = r.tolerance;
    j["min_margin"] = r.min_margin;
    j["max_margin"] = r.max_margin;
    nlohmann::ordered_json arg = nlohmann::ordered_json::array();
    if (!r.points.empty()) {
        for (int a = 0; a < r.dim; ++a) {
            arg.push_back(r.points[r.argmin][a]);
        }
    }
    j["argmin"] = arg;
    j["pass"] = r.pass;
    j["points"] = r.points.size();
    j["excluded"] = r.excluded_count;
    nlohmann::ordered_json extras = nlohmann::ordered_json::object();
    for (const auto &[k, v] : r.extras) {
        extras[k] = v;
    }
    j["extras"] = extras;
    return j;
}

void write_margins_csv(const std::string &path, const EstimateReport &r) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    static const char *axis[] = {"x", "y", "z"};
    for (int a = 0; a < r.dim; ++a) {
        os << axis[a] << ',';
    }
    os << "observed,bound,margin,excluded\n";
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        for (int a = 0; a < r.dim; ++a) {
            os << format_double(r.points[i][a]) << ',';
        }
        os << format_double(r.observed[i]) << ',' << format_double(r.bound[i]) << ',' << format_double(r.margin[i])
           << ',' << int(r.excluded[i]) << '\n';
    }
}

}  // namespace hlab
