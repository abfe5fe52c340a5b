#include "dhj/cli/experiments.hpp"
#include "dhj/error.hpp"

#include <CLI11.hpp>

#include <iostream>

// Exit codes: 0 all monitors passed, 1 a monitor failed, 2 configuration
// error, 3 any other runtime error.
int main(int argc, char** argv)
{
    CLI::App app{"Diffusive Hamilton-Jacobi experiments"};
    std::string experiment, config, out = "runs";
    bool print_schema = false;
    app.add_flag("--schema", print_schema, "print the config keys and exit");
    app.add_option("experiment", experiment, "solve | elliptic | continue | threshold | profile | barrier-check | sweep");
    app.add_option("--config", config, "flat key = value config file");
    app.add_option("--out", out, "parent directory for run directories");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (print_schema) {
        for (const auto& k : dhj::cli::config_schema())
            std::cout << k.key << " (" << k.type << ", default " << k.default_value << "): " << k.description << "\n";
        return 0;
    }
    if (experiment.empty() || config.empty()) {
        std::cerr << "usage: dhjlab <experiment> --config <path> [--out <dir>]\n";
        return 2;
    }

    try {
        const auto cfg = dhj::cli::load_config(config);
        const auto res = dhj::cli::run_experiment(experiment, cfg, out);
        std::cout << res.dir.string() << "\n";
        for (const auto& m : res.manifest.monitors)
            std::cout << (m.passed ? "  pass  " : "  FAIL  ") << m.name << "\n";
        return res.passed ? 0 : 1;
    } catch (const dhj::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
