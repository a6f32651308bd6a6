#include "dimc/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dimc/error.hpp"

namespace dimc {
namespace {

void require_positive_time(double t)
{
    if (!(t > 0.0))
        throw DomainError("time must be positive, got t = " + std::to_string(t));
}

void require_amplitude(double x, double amplitude)
{
    if (!(x >= 0.0) || x > amplitude)
    {
        throw ContractViolation("released molecules x = " + std::to_string(x)
                                + " outside [0, A = " + std::to_string(amplitude) + "]");
    }
}

double gaussian_kernel(double z, double t, double d)
{
    return std::exp(-z * z / (4.0 * d * t)) / std::sqrt(4.0 * std::numbers::pi * d * t);
}

}  // namespace

void ChannelParams::validate() const
{
    if (!(diffusion_coeff > 0.0))
        throw ContractViolation("diffusion_coeff must be > 0");
    if (!(receiver_pos > 0.0))
        throw ContractViolation("receiver_pos must be > 0");
    if (!(peak_amplitude > 0.0))
        throw ContractViolation("peak_amplitude must be > 0");
    if (slot_time < 0.0)
        throw ContractViolation("slot_time must be >= 0");
}

AbsorbProb::AbsorbProb(double p) : value_(p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw ContractViolation("absorbing probability " + std::to_string(p) + " outside [0, 1]");
}

double concentration(double l, double t, ChannelParams const& p)
{
    require_positive_time(t);
    double const d = p.diffusion_coeff;
    return gaussian_kernel(l, t, d) + gaussian_kernel(l - 2.0 * p.receiver_pos, t, d);
}

double absorbing_concentration(double l, double t, ChannelParams const& p)
{
    require_positive_time(t);
    if (l >= p.receiver_pos)
        return 0.0;
    double const d = p.diffusion_coeff;
    return gaussian_kernel(l, t, d) - gaussian_kernel(l - 2.0 * p.receiver_pos, t, d);
}

AbsorbProb absorb_prob(double t, ChannelParams const& p)
{
    require_positive_time(t);
    double const v = std::erfc(p.receiver_pos / std::sqrt(4.0 * p.diffusion_coeff * t));
    return AbsorbProb{std::fmin(1.0, std::fmax(0.0, v))};
}

double peak_rate_time(ChannelParams const& p)
{
    p.validate();
    return p.receiver_pos * p.receiver_pos / (6.0 * p.diffusion_coeff);
}

double effective_slot_time(ChannelParams const& p)
{
    return p.slot_time > 0.0 ? p.slot_time : peak_rate_time(p);
}

double poisson_pmf(Count y, double mean)
{
    if (mean == 0.0)
        return y == 0 ? 1.0 : 0.0;
    double const k = static_cast<double>(y);
    return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

double channel_pmf(Count y, double x, AbsorbProb lambda, double amplitude)
{
    require_amplitude(x, amplitude);
    return poisson_pmf(y, x * lambda.value());
}

PoissonSampler::PoissonSampler(double mean) : mean_(mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw ContractViolation("Poisson mean must be finite and >= 0");
    if (mean_ < inversion_limit())
    {
        // The tail past 200 terms is below double resolution for mean < 10.
        double term = std::exp(-mean_);
        double cdf = term;
        cdf_.push_back(cdf);
        for (Count k = 1; k <= 200; ++k)
        {
            term *= mean_ / static_cast<double>(k);
            cdf += term;
            cdf_.push_back(cdf);
        }
        return;
    }
    // Hormann (1993), "The transformed rejection method for generating
    // Poisson random variables".
    double const slam = std::sqrt(mean_);
    log_mean_ = std::log(mean_);
    b_ = 0.931 + 2.53 * slam;
    a_ = -0.059 + 0.02483 * b_;
    inv_alpha_ = 1.1239 + 1.1328 / (b_ - 3.4);
    vr_ = 0.9277 - 3.6224 / (b_ - 2.0);
}

Count PoissonSampler::operator()(Rng& rng) const
{
    if (mean_ == 0.0)
        return 0;

    if (mean_ < inversion_limit())
    {
        // Sequential search; u beyond the table's total restarts.
        for (;;)
        {
            double const u = rng.uniform();
            for (std::size_t k = 0; k < cdf_.size(); ++k)
                if (u <= cdf_[k])
                    return static_cast<Count>(k);
        }
    }

    for (;;)
    {
        double const u = rng.uniform() - 0.5;
        double const v = rng.uniform();
        double const us = 0.5 - std::fabs(u);
        double const k = std::floor((2.0 * a_ / us + b_) * u + mean_ + 0.43);
        if (us >= 0.07 && v <= vr_)
            return static_cast<Count>(k);
        if (k < 0.0 || (us < 0.013 && v > us))
            continue;
        if (std::log(v) + std::log(inv_alpha_) - std::log(a_ / (us * us) + b_)
            <= -mean_ + k * log_mean_ - std::lgamma(k + 1.0))
        {
            return static_cast<Count>(k);
        }
    }
}

Count sample_output(double x, AbsorbProb lambda, double amplitude, Rng& rng)
{
    require_amplitude(x, amplitude);
    return PoissonSampler{x * lambda.value()}(rng);
}

}  // namespace dimc
