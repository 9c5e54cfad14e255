#pragma once

#include "hlab/errors.hpp"
#include "hlab/flow.hpp"
#include "hlab/grid.hpp"
#include "hlab/pde.hpp"
#include "hlab/potentials.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hlab {

struct ConfigIssue {
    int line = 0;  ///< 0 when the problem is not tied to one line
    std::string message;
};

/// Every problem found while parsing, in line order.
class ConfigErrors : public ConfigError {
  public:
    explicit ConfigErrors(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue> &issues() const { return issues_; }

  private:
    std::vector<ConfigIssue> issues_;
};

struct IniEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct IniSection {
    std::string name;
    int line = 0;
    std::vector<IniEntry> entries;
};

/// Line-oriented `key = value` text with `[section]` headers and `#` comments.
/// Keys before the first header are global.
struct IniDocument {
    std::vector<IniEntry> globals;
    std::vector<IniSection> sections;

    const IniSection *find(const std::string &section) const;
    /// Sets (or appends) a key; an empty section name means a global key.
    void set(const std::string &section, const std::string &key, const std::string &value);
    void erase_section(const std::string &section);
    std::string to_text() const;
};

/// Syntax errors are appended to `issues`; parsing continues past them.
IniDocument parse_ini(const std::string &text, std::vector<ConfigIssue> &issues);

/// Initial datum for solver-based experiments.
struct InitialSpec {
    /// sharp, flow_sharp, heat_kernel, barenblatt, constant, random_trig
    std::string kind = "sharp";
    double k = 1.0;
    double value = 1.0;
    double base = 2.0;
    double amplitude = 0.5;
    int modes = 3;
    unsigned seed = 1;
    double m = 2.0;
    double C = 1.0;
    Point center{0.0, 0.0, 0.0};
};

struct EstimateBlock {
    std::optional<double> k;   ///< empty: smallest admissible value from the audit
    std::optional<double> k3;  ///< empty: from the audit
    double tolerance = 5e-3;
    int boundary_layers = 2;
    std::vector<double> times;
    std::string mode = "solve";  ///< solve or analytic (Li-Yau checks)
    double s = 0.0;
    double t = 1.0;
    std::vector<std::pair<Point, Point>> pairs;
    std::vector<double> ray;  ///< Harnack pairs (C sinh(k s), C sinh(k t)) along the first axis
    int random_pairs = 0;
    unsigned seed = 12345;
    Point x0{0.0, 0.0, 0.0};
    double sigma0 = 0.0;
    double core_fraction = 1e-6;
    int cost_nodes = 256;
    std::string comparison = "both";  ///< laplacian, hessian or both
    int support_band = 10;
    double support_factor = 1e3;
    Point seed_center{0.0, 0.0, 0.0};
    double seed_radius = 0.5;
    double seed_spacing = 0.05;
    double t0 = 0.0;
    double t1 = 1.0;
    int steps = 100;
    bool expect_constant = false;
    double steady_tolerance = 1e-6;
    double ratio_tolerance = 1e-4;
};

struct FlowBlock {
    std::string curve = "circle";  ///< circle or ellipse
    Point center{0.0, 0.0, 0.0};
    double radius = 1.0;
    double a = 1.0;
    double b = 1.0;
    int nodes = 256;
    HuiskenVariant variant = HuiskenVariant::weighted;
    std::optional<double> k;
    std::optional<double> K;
    std::optional<double> k3;
    double T = 1.0;
    std::vector<double> times;
    double dt_max = 1e-3;
    int redistribute_every = 10;
    double tolerance = 1e-3;
    bool expect_constant = false;
    bool radius_oracle = false;
    double radius_tolerance = 1e-4;
    std::string ambient = "solve";  ///< solve or exact
};

struct OutputBlock {
    std::string directory;
    bool json = true;
    bool csv = true;
    bool svg = true;
};

struct SweepBlock {
    std::string experiment;
    std::string parameter;  ///< section.key
    std::vector<std::string> values;
};

inline const std::vector<std::string> &experiment_tags() {
    static const std::vector<std::string> tags = {"liyau",       "matrix-liyau", "harnack", "cheeger-yau",
                                                  "ab",          "cost-compare", "flow",    "volume",
                                                  "liouville",   "sweep"};
    return tags;
}

struct ExperimentConfig {
    std::string experiment;
    std::string name;
    std::string description;
    GridSpec grid;
    PotentialSpec u1;
    PotentialSpec u2;
    SolverConfig solver;
    bool dt_auto = true;
    double m = 2.0;
    InitialSpec initial;
    EstimateBlock estimate;
    FlowBlock flow;
    OutputBlock output;
    SweepBlock sweep;
    IniDocument document;
};

/// Parses and validates. Throws ConfigErrors listing every problem.
ExperimentConfig parse_config(const std::string &text);
ExperimentConfig load_config(const std::string &path);

/// One child per sweep value, each with its own output subdirectory.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig &cfg);

/// Directory holding the shipped presets.
std::string preset_directory();
/// Preset names (file stems), sorted.
std::vector<std::string> preset_names();
/// A path to an existing file, or the name of a preset.
std::string resolve_config_path(const std::string &name_or_path);

/// U2 = (Delta U1 + |grad U1|^2 / 2) / 2 for a single trig term U1, which makes V == 0.
PotentialSpec liouville_partner(const PotentialSpec &u1);

}  // namespace hlab
