#include "dimc/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dimc/csv.hpp"
#include "dimc/error.hpp"
#include "dimc/parallel.hpp"

namespace dimc {

double GridConfig::stability_factor() const noexcept
{
    return params.diffusion_coeff * time_step / (space_step * space_step);
}

void GridConfig::validate() const
{
    params.validate();
    if (!(space_step > 0.0))
        throw ConfigError("dl", "space step must be > 0");
    if (!(time_step > 0.0))
        throw ConfigError("dt", "time step must be > 0");
    if (!(release_count > 0.0))
        throw ConfigError("release_count", "must be > 0");
    if (!(domain_length >= 0.0))
        throw ConfigError("domain_length", "must be >= 0");
    double const r = stability_factor();
    if (!(r < 0.5))
    {
        throw ConfigError("dt", "stability factor D*dt/dl^2 = " + format_number(r)
                                    + " must be below 0.5");
    }
    if (params.receiver_pos < space_step)
        throw ConfigError("dl", "receiver must lie at least one cell from the sender");
}

GridConfig GridConfig::for_horizon(ChannelParams params, double horizon, double space_step,
                                   double time_step, double release_count)
{
    GridConfig cfg;
    cfg.params = params;
    cfg.space_step = space_step;
    cfg.time_step = time_step;
    cfg.release_count = release_count;
    cfg.domain_length = std::max(10.0 * std::sqrt(4.0 * params.diffusion_coeff * horizon),
                                 2.0 * params.receiver_pos);
    return cfg;
}

DiffusionGrid::DiffusionGrid(GridConfig const& cfg) : cfg_(cfg)
{
    cfg_.validate();
    auto const behind = static_cast<std::size_t>(std::ceil(cfg_.domain_length / cfg_.space_step - 1e-9));
    // Receiver snaps to the nearest grid point (always within dl/2).
    auto const ahead = static_cast<std::size_t>(std::llround(cfg_.params.receiver_pos / cfg_.space_step));
    origin_ = behind;
    cells_.assign(behind + ahead + 1, 0.0);
    scratch_.assign(cells_.size(), 0.0);
    cells_[origin_] = cfg_.release_count;
    ratio_ = cfg_.stability_factor();
}

double DiffusionGrid::elapsed() const noexcept
{
    return static_cast<double>(steps_) * cfg_.time_step;
}

double DiffusionGrid::position(std::size_t i) const noexcept
{
    return (static_cast<double>(i) - static_cast<double>(origin_)) * cfg_.space_step;
}

double DiffusionGrid::mass_in_domain() const noexcept
{
    return std::accumulate(cells_.begin(), cells_.end(), 0.0);
}

void DiffusionGrid::set_cells(std::vector<double> cells)
{
    if (cells.size() != cells_.size())
        throw ContractViolation("set_cells: size mismatch");
    cells_ = std::move(cells);
}

void DiffusionGrid::step()
{
    std::size_t const last = cells_.size() - 1;
    double const r = ratio_;
    auto const& c = cells_;
    auto& next = scratch_;

    // Zero-flux ends: the far boundary, and the receiver side whose content
    // is removed below.
    next[0] = c[0] + r * (c[1] - c[0]);
    for (std::size_t i = 1; i < last; ++i)
        next[i] = c[i] + r * (c[i - 1] - 2.0 * c[i] + c[i + 1]);
    next[last] = c[last] + r * (c[last - 1] - c[last]);

    far_flux_ += r * c[0];
    cells_.swap(scratch_);
    if (absorbing_)
    {
        absorbed_ += cells_[last];
        cells_[last] = 0.0;
    }
    ++steps_;
}

DiffusionGrid init_grid(GridConfig const& cfg)
{
    return DiffusionGrid{cfg};
}

std::size_t AbsorptionSeries::peak_index() const
{
    if (rate.empty())
        throw ContractViolation("empty absorption series");
    return static_cast<std::size_t>(std::max_element(rate.begin(), rate.end()) - rate.begin());
}

AbsorptionSeries run(GridConfig const& cfg, double horizon, std::size_t stride)
{
    if (stride == 0)
        throw ContractViolation("stride must be >= 1");
    if (!(horizon >= cfg.time_step))
        throw ContractViolation("horizon must be at least one time step");

    DiffusionGrid grid{cfg};
    auto const steps = static_cast<std::int64_t>(std::llround(horizon / cfg.time_step));
    double const spacing = static_cast<double>(stride) * cfg.time_step;

    AbsorptionSeries series;
    series.release_count = cfg.release_count;
    series.times.push_back(0.0);
    series.absorbed_cumulative.push_back(0.0);
    series.rate.push_back(0.0);
    for (std::int64_t k = 1; k <= steps; ++k)
    {
        grid.step();
        if (k % static_cast<std::int64_t>(stride) != 0)
            continue;
        double const prev = series.absorbed_cumulative.back();
        series.times.push_back(grid.elapsed());
        series.absorbed_cumulative.push_back(grid.absorbed_total());
        series.rate.push_back((grid.absorbed_total() - prev) / spacing);
    }
    series.far_boundary_warning = grid.far_boundary_flux() > 1e-3 * cfg.release_count;
    return series;
}

double rmse(DiffusionGrid const& grid, ChannelParams const& p)
{
    if (grid.step_index() == 0)
        return 0.0;
    double const t = grid.elapsed();
    double const scale = grid.config().release_count * grid.config().space_step;
    auto const& cells = grid.cells();
    double sum = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        double const diff = cells[i] - scale * absorbing_concentration(grid.position(i), t, p);
        sum += diff * diff;
    }
    return std::sqrt(sum / static_cast<double>(cells.size()));
}

double simulate_particles(std::size_t n_particles, ChannelParams const& p, double horizon,
                          std::uint64_t seed, double time_step, unsigned workers)
{
    if (n_particles == 0)
        throw ContractViolation("simulate_particles needs at least one particle");
    if (!(p.receiver_pos > 0.0))
        throw ContractViolation("receiver_pos must be > 0");
    if (!(p.diffusion_coeff >= 0.0))
        throw ContractViolation("diffusion_coeff must be >= 0");
    if (!(time_step > 0.0))
        throw ContractViolation("time_step must be > 0");
    if (p.diffusion_coeff == 0.0 || !(horizon > 0.0))
        return 0.0;

    auto const steps = static_cast<std::int64_t>(std::ceil(horizon / time_step - 1e-9));
    double const dt_last = horizon - static_cast<double>(steps - 1) * time_step;
    double const target = p.receiver_pos;

    std::vector<unsigned char> absorbed(n_particles, 0);
    parallel_for(n_particles, workers, [&](std::size_t i) {
        Rng rng{derive_seed({seed, 0x5041525449434cULL, i})};
        double x = 0.0;
        for (std::int64_t k = 0; k < steps; ++k)
        {
            double const dt = (k + 1 == steps) ? dt_last : time_step;
            double const var = 2.0 * p.diffusion_coeff * dt;
            double const next = x + std::sqrt(var) * rng.normal();
            if (next >= target)
            {
                absorbed[i] = 1;
                return;
            }
            // Probability that the bridge between x and next touched L_R.
            double const cross = std::exp(-2.0 * (target - x) * (target - next) / var);
            if (rng.uniform() < cross)
            {
                absorbed[i] = 1;
                return;
            }
            x = next;
        }
    });
    auto const hits = std::count(absorbed.begin(), absorbed.end(), 1);
    return static_cast<double>(hits) / static_cast<double>(n_particles);
}

}  // namespace dimc
