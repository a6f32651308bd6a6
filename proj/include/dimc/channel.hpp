#pragma once

#include <cstdint>
#include <vector>

#include "dimc/random.hpp"

namespace dimc {

using Count = std::uint32_t;

/// Physical parameters of the 1D diffusion channel. The sender sits at the
/// origin; the receiver absorbs at `receiver_pos`.
struct ChannelParams
{
    double diffusion_coeff{4e-9};  //!< D [m^2/s]
    double receiver_pos{40e-6};    //!< L_R [m]
    double peak_amplitude{100.0};  //!< A [molecules per slot]
    double slot_time{0.0};         //!< sampling time [s]; 0 selects the peak-rate time

    static constexpr double sender_pos = 0.0;

    //! Throws ContractViolation naming the first invalid field.
    void validate() const;
};

/// Probability that a molecule released at the origin has been absorbed.
class AbsorbProb
{
  public:
    //! Throws ContractViolation unless 0 <= p <= 1.
    explicit AbsorbProb(double p);

    double value() const noexcept { return value_; }

  private:
    double value_;
};

/// Two-term image density (source plus mirror about the receiver) [1/m].
double concentration(double l, double t, ChannelParams const& p);

/// Image density for a perfectly absorbing receiver: zero for l >= L_R and
/// integrating to 1 - erfc(L_R / sqrt(4 D t)) over (-inf, L_R].
double absorbing_concentration(double l, double t, ChannelParams const& p);

/// erfc(L_R / sqrt(4 D t)); throws DomainError for t <= 0.
AbsorbProb absorb_prob(double t, ChannelParams const& p);

/// Time of maximum absorption rate, L_R^2 / (6 D).
double peak_rate_time(ChannelParams const& p);

/// Slot time used for lambda: `p.slot_time`, or the peak-rate time when unset.
double effective_slot_time(ChannelParams const& p);

/// Poisson pmf evaluated in log space. mean = 0 gives the point mass at 0.
double poisson_pmf(Count y, double mean);

/// W(y | x) for x released molecules; throws ContractViolation unless
/// 0 <= x <= amplitude.
double channel_pmf(Count y, double x, AbsorbProb lambda, double amplitude);

/// Exact Poisson sampler for a fixed mean: inversion over a precomputed
/// CDF table below mean 10, transformed rejection (PTRS) above.
class PoissonSampler
{
  public:
    explicit PoissonSampler(double mean);

    double mean() const noexcept { return mean_; }

    Count operator()(Rng& rng) const;

    static constexpr double inversion_limit() { return 10.0; }

  private:
    double mean_;
    std::vector<double> cdf_;
    // PTRS constants
    double log_mean_{};
    double b_{};
    double a_{};
    double inv_alpha_{};
    double vr_{};
};

/// One channel use: Poisson(x * lambda). Throws like channel_pmf.
Count sample_output(double x, AbsorbProb lambda, double amplitude, Rng& rng);

}  // namespace dimc
