// marketdef: batch market-definition toolkit.
//
// Subcommands:
//   cluster               two-step + elbow + gap-statistic clustering pipeline
//   cla                   critical-loss analysis calculators
//   screen                HHI merger screening
//   simulate-wholesalers  regenerate the simulated 30x9 wholesaler panel
//
// Flag precedence: command-line flags > config file > MARKETDEF_SEED > defaults.
// Exit codes: 0 ok, 2 config/schema error, 3 data/domain error, 4 no convergence.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "marketdef/pipeline.hpp"
#include "marketdef/version.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    marketdef::ConfigOverrides overrides;
    bool emit_svg_flag = false;
    bool drop_constant_flag = false;
};

void add_common_flags(CLI::App* cmd, CliArgs& args, bool cluster_flags) {
    cmd->add_option("--config", args.config_path, "JSON run configuration")->required();
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&args](std::uint64_t v) { args.overrides.seed = v; }, "RNG seed");
    cmd->add_option_function<std::string>(
        "--out", [&args](const std::string& v) { args.overrides.out_dir = v; },
        "Output directory");
    cmd->add_option_function<int>(
        "--threads", [&args](int v) { args.overrides.threads = v; },
        "Worker threads for restarts and gap replicates");
    if (!cluster_flags) return;
    cmd->add_option_function<std::size_t>(
        "--k", [&args](std::size_t v) { args.overrides.k = v; }, "Force the cluster count");
    cmd->add_option_function<std::size_t>(
        "--k-max", [&args](std::size_t v) { args.overrides.k_max = v; },
        "Largest k for the elbow and gap curves");
    cmd->add_option_function<int>(
        "--restarts", [&args](int v) { args.overrides.restarts = v; },
        "Independent k-means restarts");
    cmd->add_option_function<int>(
        "--B", [&args](int v) { args.overrides.B = v; }, "Gap-statistic reference sets");
    cmd->add_option_function<std::string>(
        "--reference", [&args](const std::string& v) { args.overrides.reference = v; },
        "Gap reference distribution: uniform or pca");
    cmd->add_option_function<std::string>(
        "--anchor", [&args](const std::string& v) { args.overrides.anchor = v; },
        "Product id seeding the first center");
    cmd->add_flag("--emit-svg", args.emit_svg_flag, "Write the cluster scatter SVG");
    cmd->add_flag("--drop-constant", args.drop_constant_flag,
                  "Drop constant feature columns instead of failing");
}

int run_one(const std::string& pipeline, CliArgs& args) {
    marketdef::RunConfig cfg = marketdef::load_config(args.config_path);
    if (cfg.pipeline != pipeline)
        throw marketdef::SchemaError("config pipeline is \"" + cfg.pipeline +
                                     "\" but the subcommand is \"" + pipeline + "\"");
    if (args.emit_svg_flag) args.overrides.emit_svg = true;
    if (args.drop_constant_flag) args.overrides.drop_constant = true;

    // Environment seed sits below config and flags.
    if (!args.overrides.seed && !cfg.seed_explicit) {
        if (const char* env = std::getenv("MARKETDEF_SEED")) {
            const std::string text = env;
            if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
                throw marketdef::SchemaError("MARKETDEF_SEED is not an unsigned integer: " + text);
            cfg.seed = std::stoull(text);
        }
    }
    marketdef::apply_overrides(cfg, args.overrides);

    const marketdef::AnalysisReport report = marketdef::run(cfg);
    marketdef::write_report(report, cfg.out_dir);
    std::cout << "wrote " << cfg.out_dir.string() << " (" << report.files.size() << " files)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic antitrust market-definition toolkit"};
    app.set_version_flag("--version", std::string("marketdef ") + marketdef::kVersion);
    app.require_subcommand(1);

    CliArgs cluster_args, cla_args, screen_args, sim_args;
    add_common_flags(app.add_subcommand("cluster", "Run the clustering pipeline"), cluster_args,
                     true);
    add_common_flags(app.add_subcommand("cla", "Run critical-loss analysis"), cla_args, false);
    add_common_flags(app.add_subcommand("screen", "Run HHI merger screening"), screen_args, false);
    add_common_flags(
        app.add_subcommand("simulate-wholesalers", "Regenerate the wholesaler panel CSV"),
        sim_args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("cluster")) return run_one("cluster", cluster_args);
        if (app.got_subcommand("cla")) return run_one("cla", cla_args);
        if (app.got_subcommand("screen")) return run_one("screen", screen_args);
        return run_one("simulate-wholesalers", sim_args);
    } catch (const marketdef::SchemaError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const marketdef::ConvergenceError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const marketdef::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
