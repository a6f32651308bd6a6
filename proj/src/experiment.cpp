#include "dimc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dimc/code.hpp"
#include "dimc/csv.hpp"
#include "dimc/error.hpp"
#include "dimc/montecarlo.hpp"
#include "dimc/pde.hpp"

namespace dimc {
namespace {

MetadataLines metadata_for(ExperimentConfig const& cfg)
{
    MetadataLines meta{{"generator", "dimc"}};
    auto described = describe(cfg);
    meta.insert(meta.end(), described.begin(), described.end());
    return meta;
}

std::int64_t steps_for(double t, double dt)
{
    return static_cast<std::int64_t>(std::llround(t / dt));
}

std::string micron_label(double metres)
{
    return format_number(std::round(metres * 1e9) / 1e3) + "um";
}

ExperimentResult diffusion_profile(ExperimentConfig const& cfg)
{
    auto times = cfg.snapshot_times;
    std::sort(times.begin(), times.end());
    auto const gcfg = GridConfig::for_horizon(cfg.channel(), times.back(), cfg.dl, cfg.dt,
                                              cfg.release_count);
    DiffusionGrid grid{gcfg};

    std::vector<std::vector<double>> snapshots;
    for (double t : times)
    {
        while (grid.step_index() < steps_for(t, cfg.dt))
            grid.step();
        snapshots.push_back(grid.cells());
    }

    std::vector<std::string> columns{"position_m"};
    for (double t : times)
        columns.push_back("t=" + format_number(t));
    CsvTable table(metadata_for(cfg), columns);
    for (std::size_t i = 0; i < grid.cells().size(); ++i)
    {
        std::vector<double> row{grid.position(i)};
        for (auto const& snap : snapshots)
            row.push_back(snap[i]);
        table.add_row(row);
    }
    auto const path = cfg.out_dir / "diffusion_profile.csv";
    table.write(path);
    return {{path},
            "diffusion-profile: " + std::to_string(times.size()) + " snapshots over "
                + std::to_string(grid.cells().size()) + " grid points -> " + path.string(),
            false};
}

ExperimentResult absorption_rate(ExperimentConfig const& cfg)
{
    std::vector<AbsorptionSeries> series;
    bool warning = false;
    for (double receiver : cfg.receiver_positions)
    {
        auto channel = cfg.channel();
        channel.receiver_pos = receiver;
        auto const gcfg = GridConfig::for_horizon(channel, cfg.pde_horizon, cfg.dl, cfg.dt,
                                                  cfg.release_count);
        series.push_back(run(gcfg, cfg.pde_horizon, cfg.stride));
        warning = warning || series.back().far_boundary_warning;
    }

    std::vector<std::string> columns{"time_s"};
    for (double receiver : cfg.receiver_positions)
        columns.push_back("rate_L=" + micron_label(receiver));
    for (double receiver : cfg.receiver_positions)
        columns.push_back("absorbed_fraction_L=" + micron_label(receiver));
    CsvTable table(metadata_for(cfg), columns);
    for (std::size_t k = 0; k < series.front().times.size(); ++k)
    {
        std::vector<double> row{series.front().times[k]};
        for (auto const& s : series)
            row.push_back(s.rate[k]);
        for (auto const& s : series)
            row.push_back(s.absorbed_cumulative[k] / s.release_count);
        table.add_row(row);
    }
    auto const path = cfg.out_dir / "absorption_rate.csv";
    table.write(path);

    CsvTable peaks(metadata_for(cfg), {"receiver_pos_m", "peak_time_s", "peak_rate_time_s",
                                       "far_boundary_warning"});
    std::string summary = "absorption-rate: peak times";
    for (std::size_t i = 0; i < series.size(); ++i)
    {
        auto channel = cfg.channel();
        channel.receiver_pos = cfg.receiver_positions[i];
        double const peak = series[i].times[series[i].peak_index()];
        peaks.add_row(std::vector<std::string>{format_number(channel.receiver_pos), format_number(peak),
                                               format_number(peak_rate_time(channel)),
                                               series[i].far_boundary_warning ? "1" : "0"});
        summary += " " + micron_label(channel.receiver_pos) + ":" + format_number(peak) + "s";
    }
    auto const peak_path = cfg.out_dir / "absorption_peaks.csv";
    peaks.write(peak_path);
    return {{path, peak_path}, summary + " -> " + path.string(), warning};
}

ExperimentResult rmse_curve(ExperimentConfig const& cfg)
{
    auto const gcfg = GridConfig::for_horizon(cfg.channel(), cfg.pde_horizon, cfg.dl, cfg.dt,
                                              cfg.release_count);
    DiffusionGrid grid{gcfg};
    auto const steps = steps_for(cfg.pde_horizon, cfg.dt);
    CsvTable table(metadata_for(cfg), {"time_s", "rmse", "mass_error"});
    double peak = 0.0;
    double last = 0.0;
    auto record = [&] {
        double const err = rmse(grid, gcfg.params);
        double const mass = grid.mass_in_domain() + grid.absorbed_total() - gcfg.release_count;
        table.add_row(std::vector<double>{grid.elapsed(), err, mass});
        peak = std::max(peak, err);
        last = err;
    };
    record();
    for (std::int64_t k = 1; k <= steps; ++k)
    {
        grid.step();
        if (k % static_cast<std::int64_t>(cfg.stride) == 0 || k == steps)
            record();
    }
    auto const path = cfg.out_dir / "rmse.csv";
    table.write(path);
    return {{path},
            "rmse: peak " + format_number(peak) + ", final/peak " + format_number(last / peak)
                + " -> " + path.string(),
            false};
}

Codebook build(ExperimentConfig const& cfg)
{
    return generate_codebook(cfg.code_params(cfg.n), cfg.seed, cfg.max_attempts);
}

ExperimentResult build_codebook(ExperimentConfig const& cfg)
{
    auto const cb = build(cfg);
    auto const path = cfg.out_dir / "codebook.txt";
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_codebook(os, cb);
    return {{path},
            "build-codebook: N = " + std::to_string(cb.size()) + " of " + std::to_string(cb.target_size)
                + " (min Hamming " + std::to_string(min_hamming(cb.r0, cb.params.amplitude)) + ")"
                + (cb.partial() ? " [partial]" : "") + " -> " + path.string(),
            cb.partial()};
}

ExperimentResult eval_errors(ExperimentConfig const& cfg)
{
    auto const cb = build(cfg);
    auto const params = cfg.code_params(cfg.n);
    auto const report = evaluate(cb, DecoderConfig{params, AbsorbProb{cfg.absorb_prob}}, cfg.plan());

    auto const path = cfg.out_dir / "eval_errors.csv";
    report_table(std::span(&report, 1), "n", metadata_for(cfg)).write(path);

    CsvTable per_word(metadata_for(cfg), {"index", "codeword", "weight", "type1", "ci_type1"});
    for (std::size_t i = 0; i < cb.size(); ++i)
    {
        auto const& r = report.type1[i];
        per_word.add_row(std::vector<std::string>{std::to_string(i), cb.words[i].to_string(),
                                                  std::to_string(cb.words[i].weight()),
                                                  format_number(r.rate()),
                                                  format_number(r.ci_halfwidth())});
    }
    auto const word_path = cfg.out_dir / "type1_per_codeword.csv";
    per_word.write(word_path);

    bool const warning = report.partial_codebook || !(report.bound1 <= 1.0) || !(report.bound2 <= 1.0);
    return {{path, word_path},
            "eval-errors: n = " + std::to_string(cfg.n) + ", N = " + std::to_string(cb.size())
                + ", max type I " + format_number(report.max_type1.rate()) + " (bound "
                + format_number(report.bound1) + "), max type II "
                + format_number(report.max_type2.rate()) + " (bound " + format_number(report.bound2)
                + ") in " + format_number(std::round(report.wall_seconds * 100) / 100) + " s -> "
                + path.string(),
            warning};
}

ExperimentResult sweep_n(ExperimentConfig const& cfg)
{
    auto const reports = sweep_blocklength(cfg.n_min, cfg.n_max, cfg.code_params(cfg.n_min),
                                           AbsorbProb{cfg.absorb_prob}, cfg.plan(), cfg.max_attempts);
    auto const path = cfg.out_dir / "sweep_n.csv";
    report_table(reports, "n", metadata_for(cfg)).write(path);
    bool warning = false;
    double wall = 0.0;
    for (auto const& r : reports)
    {
        warning = warning || r.partial_codebook || !(r.bound1 <= 1.0) || !(r.bound2 <= 1.0);
        wall += r.wall_seconds;
    }
    return {{path},
            "sweep-n: n = " + std::to_string(cfg.n_min) + ".." + std::to_string(cfg.n_max)
                + ", max type I at n_max " + format_number(reports.back().max_type1.rate())
                + ", max type II at n_max " + format_number(reports.back().max_type2.rate()) + " in "
                + format_number(std::round(wall)) + " s -> " + path.string(),
            warning};
}

ExperimentResult sweep_t(ExperimentConfig const& cfg)
{
    auto const times = cfg.time_grid();
    auto const reports = sweep_time(cfg.code_params(cfg.n), times, cfg.channel(), cfg.plan(),
                                    cfg.max_attempts);
    auto const path = cfg.out_dir / "sweep_time.csv";
    report_table(reports, "t", metadata_for(cfg)).write(path);
    bool warning = false;
    for (auto const& r : reports)
        warning = warning || r.partial_codebook || !(r.bound1 <= 1.0) || !(r.bound2 <= 1.0);
    return {{path},
            "sweep-time: n = " + std::to_string(cfg.n) + ", " + std::to_string(times.size())
                + " time points, max type I " + format_number(reports.front().max_type1.rate()) + " -> "
                + format_number(reports.back().max_type1.rate()) + ", max type II "
                + format_number(reports.front().max_type2.rate()) + " -> "
                + format_number(reports.back().max_type2.rate()) + " -> " + path.string(),
            warning};
}

ExperimentResult particle_check(ExperimentConfig const& cfg)
{
    auto const channel = cfg.channel();
    double const horizon = cfg.particle_horizon > 0.0 ? cfg.particle_horizon : peak_rate_time(channel);
    double const fraction = simulate_particles(cfg.particles, channel, horizon, cfg.seed,
                                               cfg.particle_dt, cfg.workers);
    double const expected = absorb_prob(horizon, channel).value();
    double const sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(cfg.particles));
    double const z = sigma > 0.0 ? (fraction - expected) / sigma : 0.0;

    CsvTable table(metadata_for(cfg),
                   {"particles", "horizon_s", "fraction", "expected", "binomial_sigma", "z_score"});
    table.add_row(std::vector<std::string>{std::to_string(cfg.particles), format_number(horizon),
                                           format_number(fraction), format_number(expected),
                                           format_number(sigma), format_number(z)});
    auto const path = cfg.out_dir / "particle_check.csv";
    table.write(path);
    return {{path},
            "particle-check: fraction " + format_number(fraction) + " vs erfc " + format_number(expected)
                + " (z = " + format_number(std::round(z * 100) / 100) + ") -> " + path.string(),
            std::fabs(z) > 3.0};
}

}  // namespace

ExperimentResult run_experiment(ExperimentConfig const& cfg)
{
    if (!cfg.kind)
        throw ConfigError("kind", "missing required key");
    validate(cfg);
    switch (*cfg.kind)
    {
        case ExperimentKind::diffusion_profile: return diffusion_profile(cfg);
        case ExperimentKind::absorption_rate: return absorption_rate(cfg);
        case ExperimentKind::rmse: return rmse_curve(cfg);
        case ExperimentKind::build_codebook: return build_codebook(cfg);
        case ExperimentKind::eval_errors: return eval_errors(cfg);
        case ExperimentKind::sweep_n: return sweep_n(cfg);
        case ExperimentKind::sweep_time: return sweep_t(cfg);
        case ExperimentKind::particle_check: return particle_check(cfg);
    }
    throw ConfigError("kind", "unhandled experiment kind");
}

}  // namespace dimc
