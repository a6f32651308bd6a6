// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                  run every criterion
//   acceptance peak-time ...    run the named criteria only
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dimc/channel.hpp"
#include "dimc/code.hpp"
#include "dimc/csv.hpp"
#include "dimc/decoder.hpp"
#include "dimc/experiment.hpp"
#include "dimc/montecarlo.hpp"
#include "dimc/pde.hpp"
#include "oracles.hpp"

using namespace dimc;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
    bool pass{false};
    std::string detail;
};

struct Criterion
{
    std::string name;
    std::function<Outcome()> run;
};

std::string num(double v)
{
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

// D = 4e-9 m^2/s, L_R = 40 um, A = 100.
ChannelParams table_channel()
{
    return ChannelParams{};
}

Outcome absorbing_probability()
{
    double const target = 0.0833;
    double const tol = 0.0005;
    double worst = 0.0;
    for (double d : {1e-11, 1e-10, 1e-9, 4e-9, 1e-8, 1e-7, 1e-6})
    {
        for (double l : {1e-6, 5e-6, 20e-6, 40e-6, 80e-6, 500e-6, 1e-2})
        {
            ChannelParams p;
            p.diffusion_coeff = d;
            p.receiver_pos = l;
            double const v = absorb_prob(peak_rate_time(p), p).value();
            worst = std::max(worst, std::fabs(v - target));
        }
    }
    double const table = absorb_prob(peak_rate_time(table_channel()), table_channel()).value();
    bool const pass = worst <= tol && std::fabs(table - 0.083) <= tol;
    return {pass, "absorb_prob(t_hat) = " + num(table) + " for D = 4e-9, L_R = 40 um; max |dev from 0.0833| over 49 (D, L_R) = "
                      + num(worst) + " (tol " + num(tol) + ")"};
}

Outcome peak_time()
{
    auto const p = table_channel();
    double const that = peak_rate_time(p);
    double const horizon = 0.2;
    std::size_t const stride = 1;
    auto const cfg = GridConfig::for_horizon(p, horizon);
    auto const series = run(cfg, horizon, stride);
    double const t_peak = series.times[series.peak_index()];
    double const spacing = static_cast<double>(stride) * cfg.time_step;
    bool const formula_ok = std::fabs(that - 0.06667) < 5e-6;
    bool const fdm_ok = std::fabs(t_peak - that) <= spacing;
    return {formula_ok && fdm_ok, "t_hat = " + num(that) + " s, FDM rate argmax = " + num(t_peak)
                                      + " s, |diff| = " + num(std::fabs(t_peak - that)) + " (tol one stride = "
                                      + num(spacing) + " s)"};
}

Outcome fdm_fidelity()
{
    auto const p = table_channel();
    double const horizon = 0.2;
    auto grid = init_grid(GridConfig::for_horizon(p, horizon));
    double const x0 = grid.config().release_count;
    double const r_zero = rmse(grid, p);
    auto const steps = static_cast<std::int64_t>(std::llround(horizon / grid.config().time_step));

    double peak = 0.0;
    std::int64_t peak_step = 0;
    double mass_err = 0.0;
    double last = 0.0;
    for (std::int64_t k = 1; k <= steps; ++k)
    {
        grid.step();
        last = rmse(grid, p);
        if (last > peak)
        {
            peak = last;
            peak_step = k;
        }
        mass_err = std::max(mass_err, std::fabs(grid.mass_in_domain() + grid.absorbed_total() - x0));
    }
    double const ratio = last / peak;
    bool const pass = r_zero == 0.0 && peak_step <= 10 && ratio < 0.1 && mass_err <= 1e-6 * x0;
    return {pass, "RMSE(0) = " + num(r_zero) + ", peak " + num(peak) + " at step " + std::to_string(peak_step)
                      + " (<= 10), RMSE(0.2 s)/peak = " + num(ratio) + " (< 0.1), max mass error = " + num(mass_err)
                      + " (<= " + num(1e-6 * x0) + ")"};
}

Outcome cross_validation()
{
    auto const p = table_channel();
    double const that = peak_rate_time(p);
    auto const cfg = GridConfig::for_horizon(p, 2.0 * that);
    auto const series = run(cfg, 2.0 * that);

    bool pass = true;
    std::string detail = "FDM vs erfc:";
    for (double frac : {0.5, 1.0, 2.0})
    {
        auto const idx = static_cast<std::size_t>(std::llround(frac * that / cfg.time_step));
        double const t = series.times[idx];
        double const fdm = series.absorbed_cumulative[idx] / series.release_count;
        double const exact = absorb_prob(t, p).value();
        double const rel = (fdm - exact) / exact;
        pass = pass && std::fabs(rel) <= 0.02;
        detail += " t=" + num(t) + " rel " + num(rel) + ";";
    }

    std::size_t const particles = 100000;
    double const frac = simulate_particles(particles, p, that, 20240101);
    double const expected = absorb_prob(that, p).value();
    double const sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(particles));
    double const z = (frac - expected) / sigma;
    pass = pass && std::fabs(z) <= 3.0;
    detail += " particles (1e5) " + num(frac) + " vs " + num(expected) + ", z = " + num(z) + " (|z| <= 3, FDM tol 2%)";
    return {pass, detail};
}

Codebook manual_book(std::size_t n, std::vector<Codeword> words)
{
    Codebook cb;
    cb.params.block_length = n;
    cb.r0 = sphere_radius(n, cb.params.radius_coeff, cb.params.radius_exp);
    cb.target_size = words.size();
    cb.words = std::move(words);
    return cb;
}

std::vector<double> slot_means(Codeword const& u, double lam, double amplitude)
{
    std::vector<double> m;
    for (double x : u.scaled(amplitude))
        m.push_back(lam * x);
    return m;
}

Outcome oracle_equivalence()
{
    // Every binary codeword and ordered pair for n = 1, 2, 3, at per-slot
    // means lambda * A in {2, 8.3, 10}.
    std::uint64_t const trials = 20000;
    std::size_t checks = 0;
    double worst_z = 0.0;
    std::string worst_case;
    std::uint64_t seed = 1;

    auto judge = [&](double estimate, double exact, std::string const& label) {
        double const sigma = std::max(std::sqrt(exact * (1.0 - exact) / static_cast<double>(trials)), 1e-9);
        double const z = std::fabs(estimate - exact) / sigma;
        ++checks;
        if (z > worst_z)
        {
            worst_z = z;
            worst_case = label + " est " + num(estimate) + " exact " + num(exact);
        }
    };

    for (double lam : {0.02, 0.083, 0.1})
    {
        for (std::size_t n = 1; n <= 3; ++n)
        {
            std::vector<Codeword> words;
            for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits)
            {
                Codeword w{n};
                for (std::size_t t = 0; t < n; ++t)
                    w.set(t, (bits >> t) & 1u);
                words.push_back(w);
            }
            CodeParams params;
            params.block_length = n;
            DecoderConfig const cfg{params, AbsorbProb{lam}};
            double const delta = cfg.threshold();

            std::string const tag = "n=" + std::to_string(n) + " lam*A=" + num(lam * 100.0) + " ";
            TrialPlan plan;
            plan.iter1 = trials;
            plan.iter2 = trials;
            plan.workers = 1;

            for (auto const& w : words)
            {
                auto const cb = manual_book(n, {w});
                plan.master_seed = seed++;
                auto const t1 = estimate_type1(cb, cfg, plan);
                auto const m = slot_means(w, lam, 100.0);
                judge(t1.per_codeword[0].rate(), 1.0 - oracle::region_probability(m, m, delta),
                      tag + "typeI u=" + w.to_string());
            }

            for (std::size_t i = 0; i < words.size(); ++i)
            {
                for (std::size_t j = i + 1; j < words.size(); ++j)
                {
                    auto const cb = manual_book(n, {words[i], words[j]});
                    plan.master_seed = seed++;
                    auto const t2 = estimate_type2(cb, cfg, plan);
                    std::uint64_t hits[2]{};
                    hits[t2.sent] = t2.max.errors;
                    hits[1 - t2.sent] = t2.pooled.errors - t2.max.errors;
                    for (std::size_t k = 0; k < 2; ++k)
                    {
                        auto const& sent = cb.words[k];
                        auto const& tested = cb.words[1 - k];
                        double const exact = oracle::region_probability(slot_means(sent, lam, 100.0),
                                                                        slot_means(tested, lam, 100.0), delta);
                        judge(static_cast<double>(hits[k]) / static_cast<double>(trials), exact,
                              tag + "typeII " + sent.to_string() + "->" + tested.to_string());
                    }
                }
            }
        }
    }
    return {worst_z <= 4.0, std::to_string(checks) + " Type I/II checks at " + std::to_string(trials)
                                + " trials; worst |z| = " + num(worst_z) + " (" + worst_case + "), tol 4 sigma"};
}

std::vector<double> column(std::vector<ErrorReport> const& reports, double ErrorReport::*field)
{
    std::vector<double> out;
    for (auto const& r : reports)
        out.push_back(r.*field);
    return out;
}

std::vector<double> max_rates(std::vector<ErrorReport> const& reports, RateEstimate ErrorReport::*field)
{
    std::vector<double> out;
    for (auto const& r : reports)
        out.push_back((r.*field).rate());
    return out;
}

Outcome bound_consistency()
{
    CodeParams templ;  // A = 100, R = 0.1, a = 500, b = 0.99, c = 1.5
    TrialPlan plan;
    plan.iter1 = 10000;
    plan.iter2 = 500;
    plan.master_seed = 1;
    auto const reports = sweep_blocklength(10, 26, templ, AbsorbProb{0.083}, plan);

    auto const n = column(reports, &ErrorReport::axis);
    auto const max1 = max_rates(reports, &ErrorReport::max_type1);
    auto const max2 = max_rates(reports, &ErrorReport::max_type2);

    std::size_t checked1 = 0, checked2 = 0, violations = 0;
    bool partial = false;
    for (auto const& r : reports)
    {
        partial = partial || r.partial_codebook;
        if (r.bound1 < 1.0)
        {
            ++checked1;
            violations += r.max_type1.rate() > r.bound1;
        }
        if (r.bound2 < 1.0)
        {
            ++checked2;
            violations += r.max_type2.rate() > r.bound2;
        }
    }
    double const rho1 = spearman(n, max1);
    double const rho2 = spearman(n, max2);
    std::size_t increases = 0;
    for (std::size_t k = 1; k < max2.size(); ++k)
        increases += max2[k] > max2[k - 1];

    bool const pass = violations == 0 && rho1 < 0.0 && rho2 < 0.0 && increases >= 2 && !partial;
    return {pass, "n = 10..26, iter1 = 1e4, iter2 = 500: bound violations " + std::to_string(violations) + " ("
                      + std::to_string(checked1) + " Type I points with bound < 1, " + std::to_string(checked2)
                      + " Type II points with bound < 1); Spearman(max I, n) = " + num(rho1)
                      + ", Spearman(max II, n) = " + num(rho2) + " (< 0); Type II local increases "
                      + std::to_string(increases) + " (>= 2)" + (partial ? "; partial codebook" : "")};
}

Outcome time_sweep()
{
    CodeParams params;
    params.block_length = 16;
    ExperimentConfig grid_cfg;
    grid_cfg.time_min = 0.01;
    grid_cfg.time_max = 0.15;
    grid_cfg.time_step = 0.01;
    auto const times = grid_cfg.time_grid();
    TrialPlan plan;
    plan.iter1 = 10000;
    plan.iter2 = 500;
    plan.master_seed = 1;
    auto const reports = sweep_time(params, times, table_channel(), plan);

    std::string detail = "n = 16, t = 10..150 ms;";
    bool pass = true;
    auto check = [&](char const* label, RateEstimate ErrorReport::*field) {
        std::size_t bad = 0;
        std::string first;
        for (std::size_t k = 1; k < reports.size(); ++k)
        {
            auto const& prev = reports[k - 1].*field;
            auto const& cur = reports[k].*field;
            double const slack = 2.0 * std::max(prev.ci_halfwidth(), cur.ci_halfwidth());
            if (cur.rate() > prev.rate() + slack)
            {
                if (bad++ == 0)
                {
                    first = " first at t = " + num(reports[k].axis) + " s: " + num(cur.rate()) + " > "
                            + num(prev.rate()) + " + " + num(slack);
                }
            }
        }
        pass = pass && bad == 0;
        detail += std::string(" ") + label + " increases beyond 2 CI: " + std::to_string(bad) + first + ";";
    };
    check("max Type I", &ErrorReport::max_type1);
    check("max Type II", &ErrorReport::max_type2);
    return {pass, detail};
}

Outcome capacity_slope()
{
    double const n = 1e6;
    double const a = 500.0;
    double const amplitude = 100.0;
    double const r0 = std::sqrt(a) * std::pow(n, 0.25);
    double const slope = packing_count_lower_bound(static_cast<std::size_t>(n), amplitude, r0) / (n * std::log2(n));
    return {std::fabs(slope - 0.25) <= 0.02, "A = 100, a = 500, b = 0, n = 1e6: log2(N_lower)/(n log2 n) = " + num(slope)
                                                 + ", |diff from 0.25| = " + num(std::fabs(slope - 0.25))
                                                 + " (tol 0.02)"};
}

std::string slurp(fs::path const& p)
{
    std::ifstream in{p, std::ios::binary};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism()
{
    auto const root = fs::temp_directory_path() / "dimc_acceptance_determinism";
    fs::remove_all(root);
    std::size_t files = 0, mismatches = 0;
    for (auto kind : all_kinds())
    {
        ExperimentConfig cfg;
        cfg.kind = kind;
        cfg.seed = 12345;
        cfg.iter1 = 1000;
        cfg.iter2 = 50;
        cfg.n_min = 10;
        cfg.n_max = 18;
        cfg.particles = 20000;
        cfg.pde_horizon = 0.2;

        cfg.out_dir = root / std::string(to_string(kind)) / "a";
        cfg.workers = 1;
        auto const first = run_experiment(cfg);
        cfg.out_dir = root / std::string(to_string(kind)) / "b";
        cfg.workers = 4;
        auto const second = run_experiment(cfg);
        for (std::size_t i = 0; i < first.outputs.size(); ++i)
        {
            ++files;
            bool const same = i < second.outputs.size() && slurp(first.outputs[i]) == slurp(second.outputs[i]);
            mismatches += !same;
        }
    }
    fs::remove_all(root);
    return {mismatches == 0 && files > 0, std::to_string(files) + " artifacts from " + std::to_string(all_kinds().size())
                                              + " experiments rerun with seed 12345 (1 vs 4 workers); "
                                              + std::to_string(mismatches) + " differ"};
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<Criterion> const criteria{
        {"absorbing-probability", absorbing_probability},
        {"peak-time", peak_time},
        {"fdm-fidelity", fdm_fidelity},
        {"cross-validation", cross_validation},
        {"oracle-equivalence", oracle_equivalence},
        {"bound-consistency", bound_consistency},
        {"time-sweep", time_sweep},
        {"capacity-slope", capacity_slope},
        {"determinism", determinism},
    };

    std::vector<std::string> selected(argv + 1, argv + argc);
    for (auto const& name : selected)
    {
        if (std::none_of(criteria.begin(), criteria.end(), [&](auto const& c) { return c.name == name; }))
        {
            std::cerr << "unknown criterion '" << name << "'\n";
            return 2;
        }
    }

    int failures = 0;
    for (auto const& c : criteria)
    {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end())
            continue;
        auto const start = std::chrono::steady_clock::now();
        Outcome outcome;
        try
        {
            outcome = c.run();
        }
        catch (std::exception const& e)
        {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !outcome.pass;
        std::cout << (outcome.pass ? "PASS " : "FAIL ") << c.name << ": " << outcome.detail << " [" << num(secs)
                  << " s]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
