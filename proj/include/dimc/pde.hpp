#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dimc/channel.hpp"

namespace dimc {

/// Discretization of the line l in [-domain_length, L_R] for the explicit
/// finite-difference solver.
struct GridConfig
{
    double space_step{1e-6};      //!< dl [m]
    double time_step{1e-4};       //!< dt [s]
    double domain_length{80e-6};  //!< extent behind the sender [m]
    double release_count{10000};  //!< x0 [molecules]
    ChannelParams params{};

    //! D dt / dl^2.
    double stability_factor() const noexcept;

    //! Throws ConfigError (naming the factor) when the scheme is unstable.
    void validate() const;

    //! Uses the truncated domain max(10 sqrt(4 D horizon), 2 L_R).
    static GridConfig for_horizon(ChannelParams params, double horizon, double space_step = 1e-6,
                                  double time_step = 1e-4, double release_count = 10000);
};

/// Concentration field in molecules per cell plus absorption bookkeeping.
/// The last cell is the receiver; it is emptied into `absorbed_total()`
/// after every diffusion update.
class DiffusionGrid
{
  public:
    explicit DiffusionGrid(GridConfig const& cfg);

    void step();

    GridConfig const& config() const noexcept { return cfg_; }
    std::vector<double> const& cells() const noexcept { return cells_; }
    double absorbed_total() const noexcept { return absorbed_; }
    double elapsed() const noexcept;
    std::int64_t step_index() const noexcept { return steps_; }

    std::size_t origin_index() const noexcept { return origin_; }
    std::size_t receiver_index() const noexcept { return cells_.size() - 1; }
    double position(std::size_t i) const noexcept;

    double mass_in_domain() const noexcept;
    //! Mass that an open far boundary would have let escape so far.
    double far_boundary_flux() const noexcept { return far_flux_; }

    //! Test hook: overwrite the field (e.g. uniform or spike initial data).
    void set_cells(std::vector<double> cells);
    //! Test hook: disable receiver absorption.
    void set_absorbing(bool absorbing) noexcept { absorbing_ = absorbing; }

  private:
    GridConfig cfg_;
    std::vector<double> cells_;
    std::vector<double> scratch_;
    std::size_t origin_{0};
    double ratio_{0.0};
    double absorbed_{0.0};
    double far_flux_{0.0};
    std::int64_t steps_{0};
    bool absorbing_{true};
};

DiffusionGrid init_grid(GridConfig const& cfg);

/// Cumulative absorption sampled every `stride` steps; rate is the
/// backward difference divided by the sample spacing.
struct AbsorptionSeries
{
    std::vector<double> times;
    std::vector<double> absorbed_cumulative;
    std::vector<double> rate;
    double release_count{0.0};
    bool far_boundary_warning{false};  //!< open-boundary loss would exceed 0.1% x0

    //! Index of the maximum rate sample.
    std::size_t peak_index() const;
};

AbsorptionSeries run(GridConfig const& cfg, double horizon, std::size_t stride = 1);

/// Root-mean-square difference between the simulated field and
/// x0 * rho_abs(l, t) * dl, where rho_abs is the absorbing-receiver image
/// solution. Zero before the first step.
double rmse(DiffusionGrid const& grid, ChannelParams const& p);

/// Independent Brownian walkers started at the origin, absorbed on first
/// passage of L_R. Crossings between time samples are caught with the
/// Brownian-bridge exceedance probability, so the fraction is unbiased in dt.
double simulate_particles(std::size_t n_particles, ChannelParams const& p, double horizon,
                          std::uint64_t seed, double time_step = 1e-4, unsigned workers = 1);

}  // namespace dimc
