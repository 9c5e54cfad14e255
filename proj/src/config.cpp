#include "hlab/config.hpp"

#include "hlab/closed_forms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace hlab {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::string join_issue(const std::vector<ConfigIssue> &issues) {
    std::ostringstream os;
    for (std::size_t i = 0; i < issues.size(); ++i) {
        if (i) {
            os << '\n';
        }
        if (issues[i].line > 0) {
            os << "line " << issues[i].line << ": ";
        }
        os << issues[i].message;
    }
    return os.str();
}

bool parse_real(const std::string &s, double &out) {
    const std::string t = trim(s);
    if (t.empty()) {
        return false;
    }
    const char *b = t.data();
    const char *e = t.data() + t.size();
    if (*b == '+') {
        ++b;
    }
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e && std::isfinite(out);
}

bool parse_int(const std::string &s, long long &out) {
    const std::string t = trim(s);
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return !t.empty() && ec == std::errc() && p == t.data() + t.size();
}

std::string format_value(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Reads typed values out of an IniDocument, recording problems and which
// entries were consumed so leftovers can be reported as unknown keys.
class Reader {
  public:
    Reader(const IniDocument &doc, std::vector<ConfigIssue> &issues) : doc_(doc), issues_(issues) {}

    const IniEntry *entry(const std::string &section, const std::string &key) {
        const std::vector<IniEntry> *list = nullptr;
        if (section.empty()) {
            list = &doc_.globals;
        } else if (const IniSection *s = doc_.find(section)) {
            list = &s->entries;
        }
        if (!list) {
            return nullptr;
        }
        const IniEntry *found = nullptr;
        for (const auto &e : *list) {
            if (e.key == key) {
                found = &e;
            }
        }
        if (found) {
            used_.insert(found);
        }
        return found;
    }

    bool has(const std::string &section, const std::string &key) { return entry(section, key) != nullptr; }

    void error(int line, const std::string &msg) { issues_.push_back({line, msg}); }

    std::string text(const std::string &section, const std::string &key, const std::string &fallback) {
        const IniEntry *e = entry(section, key);
        return e ? e->value : fallback;
    }

    std::string choice(const std::string &section, const std::string &key, const std::string &fallback,
                       const std::vector<std::string> &allowed) {
        const IniEntry *e = entry(section, key);
        if (!e) {
            return fallback;
        }
        if (std::find(allowed.begin(), allowed.end(), e->value) == allowed.end()) {
            std::string list;
            for (const auto &a : allowed) {
                list += (list.empty() ? "" : ", ") + a;
            }
            error(e->line, key + " must be one of: " + list + " (got '" + e->value + "')");
            return fallback;
        }
        return e->value;
    }

    double real(const std::string &section, const std::string &key, double fallback) {
        const IniEntry *e = entry(section, key);
        if (!e) {
            return fallback;
        }
        double v = 0.0;
        if (!parse_real(e->value, v)) {
            error(e->line, key + " expects a number (got '" + e->value + "')");
            return fallback;
        }
        return v;
    }

    /// Number or the word `auto` (empty optional).
    std::optional<double> real_or_auto(const std::string &section, const std::string &key,
                                       std::optional<double> fallback) {
        const IniEntry *e = entry(section, key);
        if (!e) {
            return fallback;
        }
        if (e->value == "auto") {
            return std::nullopt;
        }
        double v = 0.0;
        if (!parse_real(e->value, v)) {
            error(e->line, key + " expects a number or auto (got '" + e->value + "')");
            return fallback;
        }
        return v;
    }

    long long integer(const std::string &section, const std::string &key, long long fallback) {
        const IniEntry *e = entry(section, key);
        if (!e) {
            return fallback;
        }
        long long v = 0;
        if (!parse_int(e->value, v)) {
            error(e->line, key + " expects an integer (got '" + e->value + "')");
            return fallback;
        }
        return v;
    }

    bool boolean(const std::string &section, const std::string &key, bool fallback) {
        const IniEntry *e = entry(section, key);
        if (!e) {
            return fallback;
        }
        if (e->value == "true" || e->value == "yes" || e->value == "on") {
            return true;
        }
        if (e->value == "false" || e->value == "no" || e->value == "off") {
            return false;
        }
        error(e->line, key + " expects true or false (got '" + e->value + "')");
        return fallback;
    }

    std::vector<double> reals(const std::string &section, const std::string &key, std::vector<double> fallback) {
        const IniEntry *e = entry(section, key);
        if (!e) {
            return fallback;
        }
        std::vector<double> out;
        for (const auto &part : split(e->value, ',')) {
            double v = 0.0;
            if (!parse_real(part, v)) {
                error(e->line, key + " expects a comma-separated list of numbers (got '" + e->value + "')");
                return fallback;
            }
            out.push_back(v);
        }
        return out;
    }

    /// d numbers; a single number is broadcast to every axis.
    Point point(const std::string &section, const std::string &key, int d, Point fallback) {
        const IniEntry *e = entry(section, key);
        if (!e) {
            return fallback;
        }
        std::vector<double> v;
        for (const auto &part : split(e->value, ',')) {
            double x = 0.0;
            if (!parse_real(part, x)) {
                error(e->line, key + " expects " + std::to_string(d) + " comma-separated numbers");
                return fallback;
            }
            v.push_back(x);
        }
        if (v.size() == 1) {
            v.assign(d, v[0]);
        }
        if (static_cast<int>(v.size()) != d) {
            error(e->line, key + " expects " + std::to_string(d) + " components, got " + std::to_string(v.size()));
            return fallback;
        }
        Point p{0.0, 0.0, 0.0};
        for (int a = 0; a < d; ++a) {
            p[a] = v[a];
        }
        return p;
    }

    int line_of(const std::string &section, const std::string &key) {
        const IniEntry *e = entry(section, key);
        if (e) {
            return e->line;
        }
        const IniSection *s = doc_.find(section);
        return s ? s->line : 0;
    }

    void report_unused() {
        for (const auto &e : doc_.globals) {
            if (!used_.count(&e)) {
                error(e.line, "unknown key '" + e.key + "'");
            }
        }
        for (const auto &s : doc_.sections) {
            for (const auto &e : s.entries) {
                if (!used_.count(&e)) {
                    error(e.line, "unknown key '" + e.key + "' in [" + s.name + "]");
                }
            }
        }
    }

  private:
    const IniDocument &doc_;
    std::vector<ConfigIssue> &issues_;
    std::set<const IniEntry *> used_;
};

const std::vector<std::string> known_sections = {"grid",   "u1",   "u2",     "solver",
                                                 "estimate", "flow", "output", "sweep"};

PotentialSpec read_potential(Reader &rd, const std::string &section, const GridSpec &grid, bool grid_ok) {
    const int d = grid.dim();
    PotentialSpec out(d);
    const std::string family = rd.text(section, "family", "zero");
    const int fline = rd.line_of(section, "family");
    std::set<std::string> labels;
    for (const auto &item : split(family, '+')) {
        std::string tag = item;
        std::string label = item;
        if (const auto colon = item.find(':'); colon != std::string::npos) {
            tag = trim(item.substr(0, colon));
            label = trim(item.substr(colon + 1));
        }
        if (!labels.insert(label).second) {
            rd.error(fline, "term label '" + label + "' appears twice in family; name terms as tag:label");
            continue;
        }
        const std::string p = label + ".";
        if (tag == "zero") {
            continue;
        }
        if (tag == "quadratic") {
            const double a = rd.real(section, p + "a", 0.0);
            const Point b = rd.point(section, p + "b", d, {0.0, 0.0, 0.0});
            const double c = rd.real(section, p + "c", 0.0);
            out.add(QuadraticTerm{a, b, c});
        } else if (tag == "gaussian_bump") {
            GaussianBumpTerm g;
            g.amplitude = rd.real(section, p + "amplitude", 0.0);
            g.center = rd.point(section, p + "center", d, {0.0, 0.0, 0.0});
            g.width = rd.real(section, p + "width", 1.0);
            if (!(g.width > 0.0)) {
                rd.error(rd.line_of(section, p + "width"), p + "width must be > 0");
                g.width = 1.0;
            }
            out.add(g);
        } else if (tag == "trig") {
            TrigTerm t;
            t.amplitude = rd.real(section, p + "amplitude", 0.0);
            const Point mode = rd.point(section, p + "mode", d, {1.0, 0.0, 0.0});
            for (int a = 0; a < d; ++a) {
                t.mode[a] = static_cast<int>(std::lround(mode[a]));
                if (std::abs(mode[a] - t.mode[a]) > 0.0) {
                    rd.error(rd.line_of(section, p + "mode"), p + "mode must be integers");
                }
            }
            t.phase = rd.real(section, p + "phase", 0.0);
            for (int a = 0; a < d; ++a) {
                t.period[a] = grid_ok ? grid.extent(a) : 1.0;
            }
            out.add(t);
        } else {
            rd.error(fline, "unknown potential family '" + tag +
                                "' (expected zero, quadratic, gaussian_bump, trig; u2 also accepts "
                                "liouville_partner and laplacian_u1)");
        }
    }
    return out;
}

bool is_derived_family(const std::string &family) {
    return family == "liouville_partner" || family == "laplacian_u1";
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<ConfigIssue> issues)
    : ConfigError(join_issue(issues)), issues_(std::move(issues)) {}

const IniSection *IniDocument::find(const std::string &section) const {
    for (const auto &s : sections) {
        if (s.name == section) {
            return &s;
        }
    }
    return nullptr;
}

void IniDocument::set(const std::string &section, const std::string &key, const std::string &value) {
    std::vector<IniEntry> *list = &globals;
    if (!section.empty()) {
        auto it = std::find_if(sections.begin(), sections.end(), [&](const IniSection &s) { return s.name == section; });
        if (it == sections.end()) {
            sections.push_back({section, 0, {}});
            it = sections.end() - 1;
        }
        list = &it->entries;
    }
    for (auto &e : *list) {
        if (e.key == key) {
            e.value = value;
            return;
        }
    }
    list->push_back({key, value, 0});
}

void IniDocument::erase_section(const std::string &section) {
    sections.erase(std::remove_if(sections.begin(), sections.end(),
                                  [&](const IniSection &s) { return s.name == section; }),
                   sections.end());
}

std::string IniDocument::to_text() const {
    std::ostringstream os;
    for (const auto &e : globals) {
        os << e.key << " = " << e.value << '\n';
    }
    for (const auto &s : sections) {
        os << "\n[" << s.name << "]\n";
        for (const auto &e : s.entries) {
            os << e.key << " = " << e.value << '\n';
        }
    }
    return os.str();
}

IniDocument parse_ini(const std::string &text, std::vector<ConfigIssue> &issues) {
    IniDocument doc;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    IniSection *current = nullptr;
    std::set<std::string> seen;
    while (std::getline(is, raw)) {
        ++line;
        if (line == 1 && raw.size() >= 3 && raw.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            raw.erase(0, 3);
        }
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        const std::string s = trim(raw);
        if (s.empty()) {
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3) {
                issues.push_back({line, "malformed section header '" + s + "'"});
                current = nullptr;
                continue;
            }
            const std::string name = trim(s.substr(1, s.size() - 2));
            if (std::find(known_sections.begin(), known_sections.end(), name) == known_sections.end()) {
                issues.push_back({line, "unknown section [" + name + "]"});
            }
            if (!seen.insert(name).second) {
                issues.push_back({line, "section [" + name + "] appears twice"});
            }
            doc.sections.push_back({name, line, {}});
            current = &doc.sections.back();
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            issues.push_back({line, "expected 'key = value' (got '" + s + "')"});
            continue;
        }
        IniEntry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
        if (e.key.empty()) {
            issues.push_back({line, "missing key before '='"});
            continue;
        }
        if (e.value.empty()) {
            issues.push_back({line, "missing value for '" + e.key + "'"});
            continue;
        }
        auto &list = current ? current->entries : doc.globals;
        for (const auto &prev : list) {
            if (prev.key == e.key) {
                issues.push_back({line, "duplicate key '" + e.key + "' (first set on line " +
                                            std::to_string(prev.line) + ")"});
            }
        }
        list.push_back(std::move(e));
    }
    return doc;
}

PotentialSpec liouville_partner(const PotentialSpec &u1) {
    if (u1.terms().size() != 1 || !std::holds_alternative<TrigTerm>(u1.terms().front())) {
        throw ConfigError("liouville_partner needs U1 to be a single trig term");
    }
    const TrigTerm &t = std::get<TrigTerm>(u1.terms().front());
    double w2 = 0.0;
    for (int a = 0; a < u1.dim(); ++a) {
        const double w = 2.0 * std::numbers::pi * t.mode[a] / t.period[a];
        w2 += w * w;
    }
    const double A = t.amplitude;
    PotentialSpec out(u1.dim());
    out.add(QuadraticTerm{0.0, {0.0, 0.0, 0.0}, A * A * w2 / 8.0});
    out.add(TrigTerm{-0.5 * A * w2, t.mode, t.phase, t.period});
    TrigTerm twice{-A * A * w2 / 8.0, {2 * t.mode[0], 2 * t.mode[1], 2 * t.mode[2]}, 2.0 * t.phase, t.period};
    out.add(twice);
    return out;
}

ExperimentConfig parse_config(const std::string &text) {
    std::vector<ConfigIssue> issues;
    ExperimentConfig cfg;
    cfg.document = parse_ini(text, issues);
    Reader rd(cfg.document, issues);

    const auto &tags = experiment_tags();
    cfg.experiment = rd.text("", "experiment", "");
    if (cfg.experiment.empty()) {
        rd.error(0, "missing global key 'experiment'");
    } else if (std::find(tags.begin(), tags.end(), cfg.experiment) == tags.end()) {
        rd.error(rd.line_of("", "experiment"), "unknown experiment '" + cfg.experiment + "'");
        cfg.experiment.clear();
    }
    cfg.name = rd.text("", "name", cfg.experiment);
    cfg.description = rd.text("", "description", "");
    const std::string &ex = cfg.experiment;

    if (ex == "sweep") {
        cfg.sweep.experiment = rd.text("sweep", "experiment", "");
        cfg.sweep.parameter = rd.text("sweep", "parameter", "");
        const std::string values = rd.text("sweep", "values", "");
        if (!cfg.document.find("sweep")) {
            rd.error(0, "missing section [sweep]");
        } else {
            if (cfg.sweep.experiment.empty() || cfg.sweep.experiment == "sweep" ||
                std::find(tags.begin(), tags.end(), cfg.sweep.experiment) == tags.end()) {
                rd.error(rd.line_of("sweep", "experiment"), "[sweep] experiment must name a non-sweep experiment");
            }
            if (cfg.sweep.parameter.find('.') == std::string::npos) {
                rd.error(rd.line_of("sweep", "parameter"), "[sweep] parameter must look like section.key");
            }
            for (const auto &v : split(values, ',')) {
                if (!v.empty()) {
                    cfg.sweep.values.push_back(v);
                }
            }
            if (cfg.sweep.values.empty()) {
                rd.error(rd.line_of("sweep", "values"), "[sweep] values must list at least one value");
            }
        }
        cfg.output.directory = rd.text("output", "directory", "out/" + cfg.name);
        rd.boolean("output", "json", true);
        rd.boolean("output", "csv", true);
        rd.boolean("output", "svg", true);
        // Child sections are validated when the children are parsed.
        for (const auto &s : cfg.document.sections) {
            for (const auto &e : s.entries) {
                rd.entry(s.name, e.key);
            }
        }
        rd.report_unused();
        if (issues.empty()) {
            try {
                expand_sweep(cfg);
            } catch (const ConfigErrors &e) {
                for (const auto &i : e.issues()) {
                    issues.push_back({i.line, "sweep child: " + i.message});
                }
            }
        }
        if (!issues.empty()) {
            std::stable_sort(issues.begin(), issues.end(),
                             [](const ConfigIssue &a, const ConfigIssue &b) { return a.line < b.line; });
            throw ConfigErrors(std::move(issues));
        }
        return cfg;
    }

    // [grid]
    bool grid_ok = false;
    if (!cfg.document.find("grid")) {
        rd.error(0, "missing section [grid]");
    }
    {
        const long long d = rd.integer("grid", "dim", 1);
        const int dim = static_cast<int>(std::clamp<long long>(d, 1, 3));
        if (d < 1 || d > 3) {
            rd.error(rd.line_of("grid", "dim"), "dim must be 1, 2 or 3");
        }
        const Point extent = rd.point("grid", "extent", dim, {1.0, 1.0, 1.0});
        const Point count = rd.point("grid", "count", dim, {64.0, 64.0, 64.0});
        std::string topo = rd.choice("grid", "topology", "box", {"box", "torus", "periodic"});
        std::array<double, 3> ext{1.0, 1.0, 1.0};
        std::array<int, 3> cnt{8, 1, 1};
        bool ok = true;
        for (int a = 0; a < dim; ++a) {
            ext[a] = extent[a];
            if (std::abs(count[a] - std::round(count[a])) > 0.0) {
                rd.error(rd.line_of("grid", "count"), "count must be integers");
                ok = false;
            }
            cnt[a] = static_cast<int>(std::lround(count[a]));
            if (cnt[a] < GridSpec::min_count) {
                rd.error(rd.line_of("grid", "count"), "count must be >= 8 on every axis");
                ok = false;
            }
            if (!(ext[a] > 0.0)) {
                rd.error(rd.line_of("grid", "extent"), "extent must be > 0");
                ok = false;
            }
        }
        if (ok) {
            try {
                cfg.grid = GridSpec(dim, ext, cnt, topology_from_string(topo));
                grid_ok = true;
            } catch (const std::exception &e) {
                rd.error(rd.line_of("grid", "dim"), e.what());
            }
        }
        if (!grid_ok) {
            cfg.grid = GridSpec::uniform(dim, 1.0, 8, Topology::box);
        }
    }
    const int n = cfg.grid.dim();

    // [u1], [u2]
    if (!cfg.document.find("u1")) {
        rd.error(0, "missing section [u1]");
    }
    cfg.u1 = read_potential(rd, "u1", cfg.grid, grid_ok);
    const std::string u2_family = rd.text("u2", "family", "zero");
    if (is_derived_family(u2_family)) {
        try {
            cfg.u2 = u2_family == "liouville_partner" ? liouville_partner(cfg.u1) : cfg.u1.laplacian_potential();
        } catch (const std::exception &e) {
            rd.error(rd.line_of("u2", "family"), e.what());
            cfg.u2 = PotentialSpec(n);
        }
    } else {
        cfg.u2 = read_potential(rd, "u2", cfg.grid, grid_ok);
    }
    if (ex == "flow") {
        if (cfg.document.find("u2") && !is_derived_family(u2_family)) {
            rd.error(cfg.document.find("u2")->line,
                     "flow derives U2 = Delta U from [u1]; drop [u2] or use family = laplacian_u1");
        }
        try {
            cfg.u2 = cfg.u1.laplacian_potential();
        } catch (const std::exception &e) {
            rd.error(rd.line_of("u1", "family"), std::string("flow needs Delta U in closed form: ") + e.what());
        }
    }
    if (grid_ok) {
        for (const auto *which : {"u1", "u2"}) {
            try {
                (std::string(which) == "u1" ? cfg.u1 : cfg.u2).check_admissible(cfg.grid);
            } catch (const std::exception &e) {
                rd.error(rd.line_of(which, "family"), e.what());
            }
        }
    }

    // [solver]
    const bool needs_solver = ex == "liyau" || ex == "matrix-liyau" || ex == "harnack" || ex == "cheeger-yau" ||
                              ex == "ab" || ex == "flow" || ex == "volume" || ex == "liouville";
    {
        cfg.solver.scheme = scheme_from_string(rd.choice("solver", "scheme", "explicit", {"explicit", "imex"}));
        const std::optional<double> dt = rd.real_or_auto("solver", "dt", std::nullopt);
        cfg.dt_auto = !dt.has_value();
        cfg.solver.dt = dt.value_or(0.0);
        if (dt && !(*dt > 0.0)) {
            rd.error(rd.line_of("solver", "dt"), "dt must be > 0");
        }
        cfg.solver.t_start = rd.real("solver", "t_start", 0.0);
        cfg.solver.t_end = rd.real("solver", "t_end", cfg.solver.t_start + 1.0);
        cfg.solver.floor = rd.real("solver", "floor", 1e-30);
        if (cfg.solver.floor < 0.0) {
            rd.error(rd.line_of("solver", "floor"), "floor must be >= 0");
        }
        cfg.m = rd.real("solver", "m", 2.0);
        InitialSpec &ini = cfg.initial;
        ini.kind = rd.choice("solver", "initial", "sharp",
                             {"sharp", "flow_sharp", "heat_kernel", "barenblatt", "constant", "random_trig"});
        ini.k = rd.real("solver", "initial.k", 1.0);
        ini.value = rd.real("solver", "initial.value", 1.0);
        ini.base = rd.real("solver", "initial.base", 2.0);
        ini.amplitude = rd.real("solver", "initial.amplitude", 0.5);
        ini.modes = static_cast<int>(rd.integer("solver", "initial.modes", 3));
        ini.seed = static_cast<unsigned>(rd.integer("solver", "initial.seed", 1));
        ini.m = cfg.m;
        ini.C = rd.real("solver", "initial.C", 1.0);
        ini.center = rd.point("solver", "initial.center", n, {0.0, 0.0, 0.0});
        if (needs_solver && !cfg.document.find("solver")) {
            rd.error(0, "missing section [solver]");
        }
        if (needs_solver && !(cfg.solver.t_end > cfg.solver.t_start)) {
            rd.error(rd.line_of("solver", "t_end"), "t_end must be > t_start");
        }
        if (ini.kind == "random_trig" && !(ini.base > ini.amplitude * ini.modes)) {
            rd.error(rd.line_of("solver", "initial.base"),
                     "initial.base must exceed initial.amplitude * initial.modes to keep the datum positive");
        }
        // cheeger-yau builds its own kernel and never reads the initial datum
        if ((ini.kind == "sharp" || ini.kind == "flow_sharp" || ini.kind == "heat_kernel") && needs_solver &&
            ex != "cheeger-yau" &&
            !(cfg.solver.t_start > 0.0)) {
            rd.error(rd.line_of("solver", "t_start"), "a " + ini.kind + " initial datum needs t_start > 0");
        }
        if (ini.kind == "constant" && !(ini.value > 0.0)) {
            rd.error(rd.line_of("solver", "initial.value"), "initial.value must be > 0");
        }
        if (ini.kind == "sharp" && ini.k < 0.0) {
            rd.error(rd.line_of("solver", "initial.k"), "initial.k must be ≥ 0");
        }
    }

    // [estimate]
    {
        EstimateBlock &e = cfg.estimate;
        e.k = rd.real_or_auto("estimate", "k", std::nullopt);
        if (e.k && *e.k < 0.0) {
            rd.error(rd.line_of("estimate", "k"), "k must be ≥ 0");
        }
        e.k3 = rd.real_or_auto("estimate", "k3", std::nullopt);
        e.tolerance = rd.real("estimate", "tolerance", 5e-3);
        if (!(e.tolerance > 0.0)) {
            rd.error(rd.line_of("estimate", "tolerance"), "tolerance must be > 0");
        }
        e.boundary_layers = static_cast<int>(rd.integer("estimate", "boundary_layers", 2));
        if (e.boundary_layers < 0) {
            rd.error(rd.line_of("estimate", "boundary_layers"), "boundary_layers must be >= 0");
        }
        e.times = rd.reals("estimate", "times", {});
        e.mode = rd.choice("estimate", "mode", "solve", {"solve", "analytic"});
        e.s = rd.real("estimate", "s", 0.0);
        e.t = rd.real("estimate", "t", 1.0);
        e.ray = rd.reals("estimate", "ray", {});
        e.random_pairs = static_cast<int>(rd.integer("estimate", "random_pairs", 0));
        e.seed = static_cast<unsigned>(rd.integer("estimate", "seed", 12345));
        if (const IniEntry *pe = rd.entry("estimate", "pairs")) {
            for (const auto &pair : split(pe->value, '|')) {
                const auto ends = split(pair, ';');
                if (ends.size() != 2) {
                    rd.error(pe->line, "pairs expects 'x ; y | x ; y ...' with comma-separated coordinates");
                    break;
                }
                Point pts[2];
                bool ok = true;
                for (int j = 0; j < 2 && ok; ++j) {
                    const auto comps = split(ends[j], ',');
                    if (static_cast<int>(comps.size()) != n) {
                        ok = false;
                        break;
                    }
                    pts[j] = {0.0, 0.0, 0.0};
                    for (int a = 0; a < n; ++a) {
                        ok = ok && parse_real(comps[a], pts[j][a]);
                    }
                }
                if (!ok) {
                    rd.error(pe->line, "pairs: each point needs " + std::to_string(n) + " numeric coordinates");
                    break;
                }
                e.pairs.emplace_back(pts[0], pts[1]);
            }
        }
        e.x0 = rd.point("estimate", "x0", n, {0.0, 0.0, 0.0});
        e.sigma0 = rd.real("estimate", "sigma0", 0.0);
        e.core_fraction = rd.real("estimate", "core_fraction", 1e-6);
        e.cost_nodes = static_cast<int>(rd.integer("estimate", "cost_nodes", 256));
        if (e.cost_nodes < 8) {
            rd.error(rd.line_of("estimate", "cost_nodes"), "cost_nodes must be >= 8");
        }
        e.comparison = rd.choice("estimate", "comparison", "both", {"laplacian", "hessian", "both"});
        e.support_band = static_cast<int>(rd.integer("estimate", "support_band", 10));
        e.support_factor = rd.real("estimate", "support_factor", 1e3);
        e.seed_center = rd.point("estimate", "seed_center", n, {0.0, 0.0, 0.0});
        e.seed_radius = rd.real("estimate", "seed_radius", 0.5);
        e.seed_spacing = rd.real("estimate", "seed_spacing", 0.05);
        if (!(e.seed_spacing > 0.0) || !(e.seed_radius > 0.0)) {
            rd.error(rd.line_of("estimate", "seed_spacing"), "seed_radius and seed_spacing must be > 0");
        }
        e.t0 = rd.real("estimate", "t0", cfg.solver.t_start);
        e.t1 = rd.real("estimate", "t1", cfg.solver.t_end);
        e.steps = static_cast<int>(rd.integer("estimate", "steps", 100));
        if (e.steps < 1) {
            rd.error(rd.line_of("estimate", "steps"), "steps must be >= 1");
        }
        e.expect_constant = rd.boolean("estimate", "expect_constant", false);
        e.steady_tolerance = rd.real("estimate", "steady_tolerance", 1e-6);
        e.ratio_tolerance = rd.real("estimate", "ratio_tolerance", 1e-4);

        const bool needs_estimate = ex != "flow" && !ex.empty();
        if (needs_estimate && !cfg.document.find("estimate")) {
            rd.error(0, "missing section [estimate]");
        }
        const bool timed = ex == "liyau" || ex == "matrix-liyau" || ex == "cheeger-yau" || ex == "ab";
        if (timed && e.times.empty()) {
            rd.error(rd.line_of("estimate", "times"), "estimate times are required for " + ex);
        }
        for (double t : e.times) {
            if (ex == "cheeger-yau" ? !(t > 0.0) : !(t > cfg.solver.t_start && t <= cfg.solver.t_end + 1e-12)) {
                rd.error(rd.line_of("estimate", "times"),
                         "estimate times must lie in (t_start, t_end] (got " + format_value(t) + ")");
                break;
            }
        }
        if (ex == "harnack") {
            if (!(e.s > cfg.solver.t_start && e.t > e.s && e.t <= cfg.solver.t_end + 1e-12)) {
                rd.error(rd.line_of("estimate", "t"), "harnack needs t_start < s < t <= t_end");
            }
            if (e.pairs.empty() && e.ray.empty() && e.random_pairs <= 0) {
                rd.error(rd.line_of("estimate", "pairs"), "harnack needs pairs, ray or random_pairs");
            }
        }
        if (ex == "cost-compare" && !(e.t > 0.0)) {
            rd.error(rd.line_of("estimate", "t"), "t must be > 0");
        }
        if (ex == "volume" && !(e.t1 > e.t0 && e.t0 >= cfg.solver.t_start && e.t1 <= cfg.solver.t_end + 1e-12)) {
            rd.error(rd.line_of("estimate", "t1"), "volume needs t_start <= t0 < t1 <= t_end");
        }
        if (ex == "ab" && !(cfg.m > 0.0 && cfg.m != 1.0 && cfg.m - 1.0 + 2.0 / n > 0.0)) {
            rd.error(rd.line_of("solver", "m"), "m must satisfy m > 0, m != 1 and m - 1 + 2/n > 0");
        }
    }

    // [flow]
    {
        FlowBlock &f = cfg.flow;
        f.curve = rd.choice("flow", "curve", "circle", {"circle", "ellipse"});
        f.center = rd.point("flow", "center", 2, {0.0, 0.0, 0.0});
        f.radius = rd.real("flow", "radius", 1.0);
        const Point axes = rd.point("flow", "axes", 2, {1.0, 1.0, 0.0});
        f.a = axes[0];
        f.b = axes[1];
        f.nodes = static_cast<int>(rd.integer("flow", "nodes", 256));
        try {
            f.variant = huisken_variant_from_string(rd.text("flow", "variant", "weighted"));
        } catch (const std::exception &err) {
            rd.error(rd.line_of("flow", "variant"), err.what());
        }
        f.k = rd.real_or_auto("flow", "k", std::nullopt);
        if (f.k && !(*f.k > 0.0)) {
            rd.error(rd.line_of("flow", "k"), "k must be > 0");
        }
        f.K = rd.real_or_auto("flow", "K", std::nullopt);
        f.k3 = rd.real_or_auto("flow", "k3", std::nullopt);
        f.T = rd.real("flow", "T", 1.0);
        f.times = rd.reals("flow", "times", {});
        f.dt_max = rd.real("flow", "dt_max", 1e-3);
        f.redistribute_every = static_cast<int>(rd.integer("flow", "redistribute_every", 10));
        f.tolerance = rd.real("flow", "tolerance", 1e-3);
        f.expect_constant = rd.boolean("flow", "expect_constant", false);
        f.radius_oracle = rd.boolean("flow", "radius_oracle", false);
        f.radius_tolerance = rd.real("flow", "radius_tolerance", 1e-4);
        f.ambient = rd.choice("flow", "ambient", "solve", {"solve", "exact"});
        if (ex == "flow") {
            if (!cfg.document.find("flow")) {
                rd.error(0, "missing section [flow]");
            }
            if (n != 2) {
                rd.error(rd.line_of("grid", "dim"), "flow runs on a 2-dimensional grid");
            }
            if (f.nodes < CurveState::min_nodes) {
                rd.error(rd.line_of("flow", "nodes"), "nodes must be >= 64");
            }
            if (f.times.size() < 2) {
                rd.error(rd.line_of("flow", "times"), "flow needs at least two sample times");
            }
            for (double t : f.times) {
                if (!(t >= 0.0 && t < f.T && f.T - t >= cfg.solver.t_start)) {
                    rd.error(rd.line_of("flow", "times"),
                             "flow times must satisfy 0 <= t < T and T - t >= solver t_start");
                    break;
                }
            }
            if (!(f.dt_max > 0.0)) {
                rd.error(rd.line_of("flow", "dt_max"), "dt_max must be > 0");
            }
            if (f.radius_oracle && !(f.curve == "circle" && cfg.u1.is_quadratic())) {
                rd.error(rd.line_of("flow", "radius_oracle"), "radius_oracle needs a circle and a quadratic U");
            }
            if (f.ambient == "exact" && !(cfg.u1.is_quadratic() && cfg.u1.quadratic_part().a < 0.0)) {
                rd.error(rd.line_of("flow", "ambient"), "ambient = exact needs U = -k|x|^2/2 with k > 0");
            }
        }
    }

    // [output]
    cfg.output.directory = rd.text("output", "directory", "out/" + cfg.name);
    cfg.output.json = rd.boolean("output", "json", true);
    cfg.output.csv = rd.boolean("output", "csv", true);
    cfg.output.svg = rd.boolean("output", "svg", true);

    if (cfg.document.find("sweep")) {
        rd.error(cfg.document.find("sweep")->line, "[sweep] is only valid with experiment = sweep");
        for (const auto &e : cfg.document.find("sweep")->entries) {
            rd.entry("sweep", e.key);
        }
    }
    rd.report_unused();
    if (!issues.empty()) {
        std::stable_sort(issues.begin(), issues.end(),
                         [](const ConfigIssue &a, const ConfigIssue &b) { return a.line < b.line; });
        throw ConfigErrors(std::move(issues));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw ConfigError("cannot read config file " + path);
    }
    std::ostringstream os;
    os << is.rdbuf();
    return parse_config(os.str());
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig &cfg) {
    if (cfg.experiment != "sweep") {
        return {cfg};
    }
    const auto dot = cfg.sweep.parameter.find('.');
    const std::string section = cfg.sweep.parameter.substr(0, dot);
    const std::string key = cfg.sweep.parameter.substr(dot + 1);
    std::vector<ExperimentConfig> out;
    std::vector<ConfigIssue> issues;
    std::set<std::string> dirs;
    for (const auto &value : cfg.sweep.values) {
        IniDocument doc = cfg.document;
        doc.erase_section("sweep");
        doc.set("", "experiment", cfg.sweep.experiment);
        const std::string child = key + "_" + value;
        doc.set("", "name", cfg.name + "/" + child);
        doc.set(section, key, value);
        doc.set("output", "directory", (fs::path(cfg.output.directory) / child).string());
        if (!dirs.insert(child).second) {
            issues.push_back({0, "sweep value '" + value + "' is repeated"});
            continue;
        }
        try {
            out.push_back(parse_config(doc.to_text()));
        } catch (const ConfigErrors &e) {
            for (const auto &i : e.issues()) {
                issues.push_back({0, child + ": " + i.message});
            }
        }
    }
    if (!issues.empty()) {
        throw ConfigErrors(std::move(issues));
    }
    return out;
}

std::string preset_directory() {
    if (const char *env = std::getenv("HLAB_PRESET_DIR")) {
        return env;
    }
    return HLAB_PRESET_DIR;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto &entry : fs::directory_iterator(preset_directory(), ec)) {
        if (entry.path().extension() == ".cfg") {
            names.push_back(entry.path().stem().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

std::string resolve_config_path(const std::string &name_or_path) {
    if (fs::exists(name_or_path) && !fs::is_directory(name_or_path)) {
        return name_or_path;
    }
    const fs::path preset = fs::path(preset_directory()) / (name_or_path + ".cfg");
    if (fs::exists(preset)) {
        return preset.string();
    }
    throw ConfigError("no config file or preset named '" + name_or_path + "'");
}

}  // namespace hlab
