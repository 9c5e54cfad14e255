// harnack-lab: run, list and validate experiment configs.

#include "hlab/config.hpp"
#include "hlab/experiments.hpp"
#include "hlab/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

namespace {

void print_summary(const hlab::RunSummary &s, const std::string &indent = "") {
    std::cout << indent << s.name << " [" << s.experiment << "] -> " << s.directory << '\n';
    for (const auto &c : s.checks) {
        std::cout << indent << "  " << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.statistic << " = "
                  << hlab::format_double(c.value) << "  (threshold " << hlab::format_double(c.threshold) << ")\n";
    }
    if (!s.error.empty()) {
        std::cout << indent << "  error: " << s.error << '\n';
    }
    for (const auto &c : s.children) {
        print_summary(c, indent + "  ");
    }
    std::cout << indent << "exit " << s.exit_code << (s.incomplete ? " (incomplete)" : "") << '\n';
}

void print_issues(const hlab::ConfigErrors &e, const std::string &path) {
    for (const auto &i : e.issues()) {
        std::cerr << path;
        if (i.line > 0) {
            std::cerr << ':' << i.line;
        }
        std::cerr << ": " << i.message << '\n';
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Numerical lab for Li-Yau type estimates of drift heat equations"};
    app.require_subcommand(1);

    std::string run_target;
    std::string out_dir;
    int jobs = 1;
    auto *run_cmd = app.add_subcommand("run", "Run a config file or a preset");
    run_cmd->add_option("config", run_target, "Config path or preset name")->required();
    run_cmd->add_option("--jobs,-j", jobs, "Parallel sweep children")->check(CLI::PositiveNumber);
    run_cmd->add_option("--out,-o", out_dir, "Output directory (overrides [output] directory)");

    auto *presets_cmd = app.add_subcommand("presets", "List shipped presets");

    std::string validate_target;
    auto *validate_cmd = app.add_subcommand("validate", "Parse and validate a config without running it");
    validate_cmd->add_option("config", validate_target, "Config path or preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : hlab::exit_config_error;
    }

    if (*presets_cmd) {
        for (const auto &name : hlab::preset_names()) {
            std::string description;
            try {
                description = hlab::load_config(hlab::resolve_config_path(name)).description;
            } catch (const std::exception &e) {
                description = std::string("(invalid: ") + e.what() + ")";
            }
            std::cout << name << "  " << description << '\n';
        }
        return 0;
    }

    const std::string &target = *run_cmd ? run_target : validate_target;
    std::string path;
    hlab::ExperimentConfig cfg;
    try {
        path = hlab::resolve_config_path(target);
        cfg = hlab::load_config(path);
    } catch (const hlab::ConfigErrors &e) {
        print_issues(e, path.empty() ? target : path);
        return hlab::exit_config_error;
    } catch (const std::exception &e) {
        std::cerr << target << ": " << e.what() << '\n';
        return hlab::exit_config_error;
    }

    if (*validate_cmd) {
        std::cout << path << ": ok (" << cfg.experiment << ", " << cfg.name << ")\n";
        if (cfg.experiment == "sweep") {
            for (const auto &child : hlab::expand_sweep(cfg)) {
                std::cout << "  " << child.name << " -> " << child.output.directory << '\n';
            }
        }
        return 0;
    }

    hlab::RunOptions opts;
    opts.jobs = jobs;
    opts.out_dir = out_dir;
    const hlab::RunSummary s = hlab::run(cfg, opts);
    print_summary(s);
    return s.exit_code;
}
