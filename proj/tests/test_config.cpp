#include "hlab/config.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>

using namespace hlab;

namespace {

const char *minimal_liyau = R"(experiment = liyau
[grid]
dim = 1
extent = 8
count = 64
[u1]
family = quadratic
quadratic.a = -1
[solver]
t_start = 0.1
t_end = 1
[estimate]
k = 1
times = 0.5
)";

std::vector<ConfigIssue> issues_of(const std::string &text) {
    try {
        parse_config(text);
    } catch (const ConfigErrors &e) {
        return e.issues();
    }
    return {};
}

bool has_issue(const std::vector<ConfigIssue> &issues, int line, const std::string &fragment) {
    return std::any_of(issues.begin(), issues.end(), [&](const ConfigIssue &i) {
        return i.line == line && i.message.find(fragment) != std::string::npos;
    });
}

}  // namespace

TEST_CASE("minimal liyau config parses with defaults") {
    const auto cfg = parse_config(minimal_liyau);
    CHECK(cfg.experiment == "liyau");
    CHECK(cfg.name == "liyau");
    CHECK(cfg.grid.dim() == 1);
    CHECK(cfg.grid.count(0) == 64);
    CHECK(cfg.grid.topology() == Topology::box);
    CHECK(cfg.u1.quadratic_part().a == -1.0);
    CHECK(cfg.u2.is_zero());
    CHECK(cfg.solver.scheme == Scheme::explicit_euler);
    CHECK(cfg.dt_auto);
    CHECK(cfg.initial.kind == "sharp");
    CHECK(cfg.estimate.k.value() == 1.0);
    CHECK(cfg.estimate.tolerance == 5e-3);
    CHECK(cfg.estimate.boundary_layers == 2);
    CHECK(cfg.estimate.mode == "solve");
    CHECK(cfg.output.directory == "out/liyau");
    CHECK(cfg.output.json);
}

TEST_CASE("negative k is reported with its line") {
    std::string text = minimal_liyau;
    text.replace(text.find("k = 1"), 5, "k = -1");
    const auto issues = issues_of(text);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].line == 13);
    CHECK(issues[0].message == "k must be ≥ 0");
}

TEST_CASE("every error is reported, not just the first") {
    const std::string text = R"(experiment = liyau
[grid]
dim = 2
extent = 8
count = four
colour = blue
[u1]
family = quadratic
quadratic.a = -1
[solver]
t_start = 0.1
t_end = 1
dt = -3
[estimate]
k = -2
tolerance = 0
times = 0.5
[bogus]
x = 1
)";
    const auto issues = issues_of(text);
    CHECK(has_issue(issues, 5, "count"));
    CHECK(has_issue(issues, 6, "unknown key 'colour'"));
    CHECK(has_issue(issues, 13, "dt must be > 0"));
    CHECK(has_issue(issues, 15, "k must be ≥ 0"));
    CHECK(has_issue(issues, 16, "tolerance"));
    CHECK(has_issue(issues, 18, "unknown section [bogus]"));
    CHECK(std::is_sorted(issues.begin(), issues.end(),
                         [](const ConfigIssue &a, const ConfigIssue &b) { return a.line < b.line; }));
}

TEST_CASE("missing sections and experiment") {
    CHECK(has_issue(issues_of("name = x\n"), 0, "missing global key 'experiment'"));
    CHECK(has_issue(issues_of("experiment = liyau\n"), 0, "missing section [grid]"));
    CHECK(has_issue(issues_of("experiment = nope\n"), 1, "unknown experiment"));
    CHECK(has_issue(issues_of(std::string(minimal_liyau) + "[estimate]\n"), 15, "appears twice"));
}

TEST_CASE("syntax errors carry line numbers") {
    std::string text = minimal_liyau;
    text += "this line has no equals sign\n";
    CHECK(has_issue(issues_of(text), 15, ""));
}

TEST_CASE("potential families") {
    const std::string text = R"(experiment = harnack
[grid]
dim = 2
extent = 6.283185307179586
count = 32
topology = torus
[u1]
family = trig:a + trig:b
a.amplitude = 0.5
a.mode = 1, 0
b.amplitude = 0.25
b.mode = 0, 2
b.phase = 1
[u2]
family = trig:c
c.amplitude = 0.1
c.mode = 1, 1
[solver]
t_end = 1
initial = constant
[estimate]
s = 0.5
t = 1
random_pairs = 3
)";
    const auto cfg = parse_config(text);
    CHECK(cfg.u1.terms().size() == 2);
    CHECK_FALSE(cfg.u2.is_zero());

    std::string bad = text;
    bad.replace(bad.find("trig:a"), 6, "wave:a");
    CHECK(has_issue(issues_of(bad), 8, "unknown potential family 'wave'"));

    std::string box = text;
    box.replace(box.find("topology = torus"), 16, "topology = box");
    CHECK(has_issue(issues_of(box), 8, "trig"));
}

TEST_CASE("liouville partner makes V vanish") {
    const double L = 6.283185307179586;
    const auto u1 = PotentialSpec::trig(2, 0.3, {1, 1, 0}, 0.4, {L, L, 1.0});
    const auto u2 = liouville_partner(u1);
    for (double x : {0.1, 1.3, 4.0}) {
        const Point p{x, 2.0 * x, 0.0};
        CHECK(schrodinger_value(u1, u2, p) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    }
}

TEST_CASE("sweep over k expands to three children with distinct directories") {
    std::string text = minimal_liyau;
    text.replace(0, std::string("experiment = liyau").size(), "experiment = sweep\nname = ks");
    text += "[sweep]\nexperiment = liyau\nparameter = estimate.k\nvalues = 0.5, 1, 2\n";
    const auto cfg = parse_config(text);
    const auto children = expand_sweep(cfg);
    REQUIRE(children.size() == 3);
    std::set<std::string> dirs;
    for (const auto &c : children) {
        CHECK(c.experiment == "liyau");
        dirs.insert(c.output.directory);
    }
    CHECK(dirs.size() == 3);
    CHECK(children[0].estimate.k.value() == 0.5);
    CHECK(children[2].estimate.k.value() == 2.0);
    CHECK(children[1].output.directory == "out/ks/k_1");

    // a child that fails validation is reported on the sweep
    std::string bad = text;
    bad.replace(bad.find("values = 0.5, 1, 2"), 18, "values = 1, -1");
    CHECK(!issues_of(bad).empty());
}

TEST_CASE("ini document round trip") {
    std::vector<ConfigIssue> issues;
    const auto doc = parse_ini(minimal_liyau, issues);
    CHECK(issues.empty());
    std::vector<ConfigIssue> again;
    const auto doc2 = parse_ini(doc.to_text(), again);
    CHECK(again.empty());
    CHECK(doc2.to_text() == doc.to_text());
    CHECK(doc.find("grid")->entries.size() == 3);
}

TEST_CASE("every shipped preset validates") {
    const auto names = preset_names();
    CHECK(names.size() >= 10);
    for (const auto &n : names) {
        CAPTURE(n);
        CHECK_NOTHROW(load_config(resolve_config_path(n)));
    }
    CHECK(std::find(names.begin(), names.end(), "sharp-liyau") != names.end());
    CHECK(std::find(names.begin(), names.end(), "flow-sharp") != names.end());
    CHECK_THROWS_AS(resolve_config_path("no-such-preset"), ConfigError);
}
