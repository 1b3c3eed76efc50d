#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "crnstab/commands.hpp"
#include "crnstab/crn.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    int jobs = 1;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "experiment config (JSON)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out_dir, "output directory (default .)");
    sub->add_option("--jobs", args.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option_function<std::uint64_t>(
        "--seed", [&args](std::uint64_t s) { args.seed = s; },
        "seed override (takes precedence over the config)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and drift-certification toolkit for a two-species reaction network"};
    app.require_subcommand(1);

    CommonArgs args;
    using Command = int (*)(crnstab::Config, const crnstab::CommandOptions&);
    struct Sub {
        const char* name;
        const char* help;
        Command run;
    };
    const Sub subs[] = {
        {"simulate", "exact event-driven simulation of the X/Y/Z chains", crnstab::cmd_simulate},
        {"verify", "exhaustive drift and interface-ordering certification", crnstab::cmd_verify},
        {"ode", "deterministic dynamics: integration, equilibria, blow-up", crnstab::cmd_ode},
        {"scaling", "Y-chain scaling limits vs closed forms", crnstab::cmd_scaling},
        {"couple", "shared-randomness coupling of Y and Z", crnstab::cmd_couple},
        {"ou", "Ornstein-Uhlenbeck hitting-time Monte Carlo vs tail bound", crnstab::cmd_ou},
        {"excursions", "long-run excursion scan and interarrival statistics",
         crnstab::cmd_excursions},
    };
    for (const auto& sub : subs) {
        CLI::App* s = app.add_subcommand(sub.name, sub.help);
        add_common(s, args);
        s->callback([&args, run = sub.run] {
            crnstab::Config config = args.config_path.empty()
                                         ? crnstab::default_config()
                                         : crnstab::load_config_file(args.config_path);
            if (args.seed) {
                config.seed = *args.seed;
                crnstab::refresh_resolved(config);
            }
            crnstab::CommandOptions options;
            options.out_dir = args.out_dir;
            options.jobs = args.jobs;
            const int code = run(std::move(config), options);
            if (code != 0) throw CLI::RuntimeError(code);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const crnstab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const crnstab::SmallStateError& e) {
        // mid-run failure, not a usage error (bad starting states are
        // rejected while the config is validated)
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
