#include "dimc/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dimc/error.hpp"

namespace dimc {
namespace {

double pairwise_sum(std::span<double const> v)
{
    if (v.size() <= 8)
    {
        double s = 0.0;
        for (double x : v)
            s += x;
        return s;
    }
    auto const half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

void check_absorb(std::vector<double> const& absorb, std::size_t n)
{
    if (absorb.size() != 1 && absorb.size() != n)
        throw ContractViolation("per-slot absorbing vector must have 1 or n entries");
    for (double v : absorb)
        AbsorbProb{v};
}

}  // namespace

double threshold(CodeParams const& params, AbsorbProb min_absorb)
{
    double const l = min_absorb.value();
    return params.radius_coeff * params.decode_coeff * l * l
           * std::pow(static_cast<double>(params.block_length), (params.radius_exp - 1.0) / 2.0);
}

DecoderConfig::DecoderConfig(CodeParams const& params, AbsorbProb absorb)
    : params_(params), absorb_{absorb.value()}, threshold_(dimc::threshold(params, absorb))
{
}

DecoderConfig::DecoderConfig(CodeParams const& params, std::vector<double> per_slot_absorb)
    : params_(params), absorb_(std::move(per_slot_absorb)), threshold_(0.0)
{
    check_absorb(absorb_, params_.block_length);
    threshold_ = dimc::threshold(params_, AbsorbProb{min_absorb()});
}

DecoderConfig::DecoderConfig(CodeParams const& params, std::vector<double> per_slot_absorb,
                             double threshold)
    : params_(params), absorb_(std::move(per_slot_absorb)), threshold_(threshold)
{
    check_absorb(absorb_, params_.block_length);
    if (!(threshold_ >= 0.0))
        throw ContractViolation("decoder threshold must be >= 0");
}

double DecoderConfig::min_absorb() const noexcept
{
    return *std::min_element(absorb_.begin(), absorb_.end());
}

double DecoderConfig::max_absorb() const noexcept
{
    return *std::max_element(absorb_.begin(), absorb_.end());
}

double distance_stat(std::span<Count const> y, std::span<double const> u_scaled,
                     std::span<double const> absorb)
{
    std::size_t const n = y.size();
    if (n == 0 || u_scaled.size() != n)
    {
        throw ContractViolation("distance_stat: output length " + std::to_string(n)
                                + " vs codeword length " + std::to_string(u_scaled.size()));
    }
    if (absorb.size() != 1 && absorb.size() != n)
        throw ContractViolation("distance_stat: absorbing vector must have 1 or n entries");

    std::vector<double> terms(n);
    for (std::size_t t = 0; t < n; ++t)
    {
        double const lam = (absorb.size() == 1 ? absorb[0] : absorb[t]) * u_scaled[t];
        double const yt = static_cast<double>(y[t]);
        double const diff = yt - lam;
        terms[t] = diff * diff - yt;
    }
    return pairwise_sum(terms) / static_cast<double>(n);
}

bool is_in_region(std::span<Count const> y, std::span<double const> u_scaled,
                  DecoderConfig const& cfg)
{
    return std::fabs(distance_stat(y, u_scaled, cfg.absorb())) <= cfg.threshold();
}

bool is_in_region(std::span<Count const> y, Codeword const& u, DecoderConfig const& cfg)
{
    auto const scaled = u.scaled(cfg.params().amplitude);
    return is_in_region(y, std::span<double const>(scaled), cfg);
}

}  // namespace dimc
