#include "dimc/pde.hpp"

#include <cmath>
#include <string>

#include "dimc/error.hpp"
#include "doctest.h"

using namespace dimc;

namespace {

GridConfig small_grid()
{
    GridConfig cfg;
    cfg.domain_length = 20e-6;
    return cfg;
}

}  // namespace

TEST_CASE("stability factor")
{
    GridConfig cfg;
    CHECK(cfg.stability_factor() == doctest::Approx(0.4));
    cfg.time_step = 1.5e-4;
    CHECK(cfg.stability_factor() == doctest::Approx(0.6));
    try
    {
        cfg.validate();
        FAIL("expected ConfigError");
    }
    catch (ConfigError const& e)
    {
        CHECK(e.key() == "dt");
        CHECK(std::string(e.what()).find("0.6") != std::string::npos);
    }
    CHECK_THROWS_AS(DiffusionGrid{cfg}, ConfigError);
    cfg.time_step = 1.25e-4;  // exactly 0.5
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("grid layout")
{
    auto const grid = init_grid(small_grid());
    CHECK(grid.cells().size() == 61);
    CHECK(grid.origin_index() == 20);
    CHECK(grid.receiver_index() == 60);
    CHECK(grid.position(grid.origin_index()) == 0.0);
    CHECK(grid.position(grid.receiver_index()) == doctest::Approx(40e-6));
    CHECK(grid.cells()[20] == 1e4);
    CHECK(grid.mass_in_domain() == 1e4);
}

TEST_CASE("for_horizon domain sizing")
{
    ChannelParams const p;
    CHECK(GridConfig::for_horizon(p, 1e-3).domain_length == doctest::Approx(80e-6));
    CHECK(GridConfig::for_horizon(p, 0.5).domain_length == doctest::Approx(10.0 * std::sqrt(8e-9)));
}

TEST_CASE("single step of a spike uses the three-point stencil")
{
    auto grid = init_grid(small_grid());
    grid.step();
    auto const& c = grid.cells();
    std::size_t const o = grid.origin_index();
    CHECK(c[o] == doctest::Approx(1e4 * 0.2));
    CHECK(c[o - 1] == doctest::Approx(1e4 * 0.4));
    CHECK(c[o + 1] == doctest::Approx(1e4 * 0.4));
    CHECK(c[o - 2] == 0.0);
    CHECK(grid.elapsed() == doctest::Approx(1e-4));
}

TEST_CASE("uniform field is stationary without absorption")
{
    auto grid = init_grid(small_grid());
    grid.set_absorbing(false);
    grid.set_cells(std::vector<double>(grid.cells().size(), 3.0));
    for (int k = 0; k < 50; ++k)
        grid.step();
    for (double v : grid.cells())
        CHECK(v == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(grid.absorbed_total() == 0.0);
    CHECK_THROWS_AS(grid.set_cells({1.0, 2.0}), ContractViolation);
}

TEST_CASE("mass is conserved between field and receiver")
{
    auto grid = init_grid(GridConfig::for_horizon(ChannelParams{}, 0.3));
    for (int k = 0; k < 3000; ++k)
    {
        grid.step();
        if (k % 500 == 0)
            CHECK(grid.mass_in_domain() + grid.absorbed_total() == doctest::Approx(1e4).epsilon(1e-12));
    }
    CHECK(grid.cells()[grid.receiver_index()] == 0.0);
    for (double v : grid.cells())
        CHECK(v >= 0.0);
}

TEST_CASE("cumulative absorption tracks 1 - erfc law")
{
    ChannelParams const p;
    double const that = peak_rate_time(p);
    auto const series = run(GridConfig::for_horizon(p, 2.0 * that), 2.0 * that);
    CHECK_FALSE(series.far_boundary_warning);
    for (double frac : {1.0, 2.0})
    {
        auto const idx = static_cast<std::size_t>(std::llround(frac * that / 1e-4));
        double const t = series.times[idx];
        double const expected = 1e4 * absorb_prob(t, p).value();
        CAPTURE(t);
        CHECK(series.absorbed_cumulative[idx] == doctest::Approx(expected).epsilon(0.01));
    }
}

TEST_CASE("absorption rate peaks near L^2 / 6D")
{
    ChannelParams const p;
    double const that = peak_rate_time(p);
    auto const series = run(GridConfig::for_horizon(p, 0.2), 0.2);
    CHECK(series.times.size() == 2001);
    double const t_peak = series.times[series.peak_index()];
    CHECK(std::fabs(t_peak - that) / that < 0.05);
    CHECK(series.rate[0] == 0.0);
}

TEST_CASE("run argument checks")
{
    CHECK_THROWS_AS(run(small_grid(), 0.1, 0), ContractViolation);
    CHECK_THROWS_AS(run(small_grid(), 1e-5), ContractViolation);
    auto const series = run(small_grid(), 0.01, 10);
    CHECK(series.times.size() == 11);
    CHECK(series.times.back() == doctest::Approx(0.01));
}

TEST_CASE("narrow domain triggers the far-boundary warning")
{
    ChannelParams const p;
    GridConfig cfg;
    cfg.domain_length = 5e-6;
    CHECK(run(cfg, 0.2).far_boundary_warning);
}

TEST_CASE("rmse against the absorbing profile stays below 10% of peak")
{
    ChannelParams const p;
    auto grid = init_grid(GridConfig::for_horizon(p, 0.2));
    CHECK(rmse(grid, p) == 0.0);
    double peak = 0.0;
    double last = 0.0;
    for (int k = 1; k <= 2000; ++k)
    {
        grid.step();
        if (k % 20 == 0)
        {
            last = rmse(grid, p);
            peak = std::max(peak, last);
        }
    }
    CHECK(peak > 0.0);
    CHECK(last / peak < 0.1);
}

TEST_CASE("particle simulation matches erfc at the peak time")
{
    ChannelParams const p;
    double const that = peak_rate_time(p);
    std::size_t const n = 20000;
    double const frac = simulate_particles(n, p, that, 99);
    double const expected = absorb_prob(that, p).value();
    double const sigma = std::sqrt(expected * (1.0 - expected) / n);
    CHECK(std::fabs(frac - expected) < 4.0 * sigma);
    CHECK(simulate_particles(1000, p, that, 5, 1e-4, 1) == simulate_particles(1000, p, that, 5, 1e-4, 3));
    CHECK(simulate_particles(100, p, 0.0, 5) == 0.0);
}
