// Command-line front end: one subcommand per experiment.
//
//   dimc sweep-n [config.ini] [--seed N] [--out-dir DIR] [--workers W]
//                [--paper-scale] [--set key=value ...]
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dimc/config.hpp"
#include "dimc/error.hpp"
#include "dimc/experiment.hpp"

namespace {

constexpr int exit_config_error = 1;
constexpr int exit_runtime_error = 2;

struct Options
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<unsigned> workers;
    bool paper_scale{false};
    std::vector<std::string> overrides;
};

std::string read_file(std::string const& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw dimc::ConfigError("config", "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string description(dimc::ExperimentKind kind)
{
    using K = dimc::ExperimentKind;
    switch (kind)
    {
    case K::diffusion_profile: return "analytical concentration vs position at snapshot times";
    case K::absorption_rate: return "FDM absorption rate and peak time per receiver distance";
    case K::rmse: return "RMSE between FDM field and analytical profile over time";
    case K::build_codebook: return "generate and save a DI codebook for block length n";
    case K::eval_errors: return "Type I/II error estimates and bounds for one codebook";
    case K::sweep_n: return "error estimates and bounds over n = n_min..n_max";
    case K::sweep_time: return "error estimates over the symbol duration grid";
    case K::particle_check: return "Brownian-particle absorption fraction vs erfc";
    }
    return {};
}

dimc::ExperimentConfig resolve(dimc::ExperimentKind kind, Options const& opt)
{
    dimc::ExperimentConfig cfg;
    if (!opt.config_path.empty())
        cfg = dimc::parse_config(read_file(opt.config_path));
    cfg.kind = kind;
    if (opt.paper_scale)
        dimc::apply_setting(cfg, "paper_scale", "true");
    for (auto const& item : opt.overrides)
    {
        auto const eq = item.find('=');
        if (eq == std::string::npos)
            throw dimc::ConfigError(item, "--set expects key=value");
        dimc::apply_setting(cfg, item.substr(0, eq), item.substr(eq + 1));
    }
    if (opt.seed)
        cfg.seed = *opt.seed;
    if (opt.out_dir)
        cfg.out_dir = *opt.out_dir;
    if (opt.workers)
        cfg.workers = *opt.workers;
    dimc::validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Deterministic identification over a diffusion-based Poisson channel"};
    app.require_subcommand(1);

    Options opt;
    std::vector<std::pair<CLI::App*, dimc::ExperimentKind>> commands;
    for (auto kind : dimc::all_kinds())
    {
        auto* sub = app.add_subcommand(std::string(dimc::to_string(kind)), description(kind));
        sub->add_option("config", opt.config_path, "key = value configuration file");
        sub->add_option("--seed", opt.seed, "master seed");
        sub->add_option("--out-dir", opt.out_dir, "directory for CSV artifacts");
        sub->add_option("--workers", opt.workers, "worker threads (0 = all cores)");
        sub->add_flag("--paper-scale", opt.paper_scale, "use 1e5 / 2000 Monte Carlo trials");
        sub->add_option("--set", opt.overrides, "override a configuration key (key=value)");
        commands.emplace_back(sub, kind);
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e);
        return exit_config_error;
    }

    try
    {
        for (auto const& [sub, kind] : commands)
        {
            if (!sub->parsed())
                continue;
            auto const cfg = resolve(kind, opt);
            auto const result = dimc::run_experiment(cfg);
            std::cout << result.summary << (result.warning ? " [warning]" : "") << '\n';
        }
    }
    catch (dimc::ConfigError const& e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config_error;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime_error;
    }
    return 0;
}
