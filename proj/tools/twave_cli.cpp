#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twave/errors.hpp"
#include "twave/experiments.hpp"
#include "twave/snapshot_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string out;
    int workers = 1;
    bool print_config = false;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--workers", o.workers, "concurrent sweep jobs")->check(CLI::PositiveNumber);
    sub->add_flag("--print-config", o.print_config, "print the resolved config and exit");
    sub->add_option("--set", o.overrides, "override a config value, e.g. --set model.epsilon=0.05");
}

void write_error(const fs::path& out, const std::string& type, const std::string& what, const twave::json& extra) {
    twave::json rec = {{"error", type}, {"message", what}};
    rec.update(extra);
    std::cerr << rec.dump() << "\n";
    if (!out.empty()) {
        try {
            twave::atomic_write(out / "error.json", rec.dump(2) + "\n");
        } catch (const std::exception&) {
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Traveling waves of the alignment-advection-diffusion system"};
    app.require_subcommand(1);
    Options opt;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "run the PDE solver and analyse the fronts"},
        {"sweep-speeds", "leading and trailing front speeds over (alpha, epsilon)"},
        {"critical-curve", "critical speeds c_* and c^* against ag"},
        {"inversion-curve", "inversion-wave speed by shooting against a"},
        {"bifurcation-map", "eigenvalue classification of W = 0 over (c, ag)"},
        {"orbit", "integrate the unstable manifold of the W = U saddle"},
    };
    for (const auto& [name, help] : commands) {
        add_common(app.add_subcommand(name, help), opt);
    }
    CLI11_PARSE(app, argc, argv);
    const std::string experiment = app.get_subcommands().front()->get_name();

    const fs::path out = opt.out;
    try {
        const twave::json user = opt.config.empty() ? twave::json() : twave::load_config_file(opt.config);
        const auto cfg = twave::resolve_config(experiment, user, opt.overrides);
        if (opt.print_config) {
            std::cout << cfg.dump(2) << "\n";
            return 0;
        }
        if (!out.empty()) {
            fs::create_directories(out);
        }
        const auto summary = twave::run_experiment(cfg, out, opt.workers);
        std::cout << summary.dump(2) << "\n";
        return 0;
    } catch (const twave::ConfigError& e) {
        write_error(out, "config", e.what(), twave::json::object());
        return 2;
    } catch (const twave::DomainError& e) {
        write_error(out, "domain", e.what(), twave::json::object());
        return 2;
    } catch (const twave::SolverInstabilityError& e) {
        write_error(out, "solver-instability", e.what(), {{"cell", e.cell()}, {"time", e.time()}});
        return 3;
    } catch (const twave::BoundaryReachedError& e) {
        write_error(out, "boundary-reached", e.what(), {{"time", e.time()}});
        return 3;
    } catch (const twave::NumericalError& e) {
        write_error(out, "numerical", e.what(), twave::json::object());
        return 3;
    } catch (const fs::filesystem_error& e) {
        write_error({}, "config", e.what(), twave::json::object());
        return 2;
    }
}
