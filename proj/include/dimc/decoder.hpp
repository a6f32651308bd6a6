#pragma once

#include <span>
#include <vector>

#include "dimc/channel.hpp"
#include "dimc/code.hpp"

namespace dimc {

/// Absorbing probabilities per slot (one entry means time-constant) and
/// the acceptance threshold delta_n.
class DecoderConfig
{
  public:
    //! Threshold from params and the scalar absorbing probability.
    DecoderConfig(CodeParams const& params, AbsorbProb absorb);
    //! Threshold from params and min over the per-slot vector.
    DecoderConfig(CodeParams const& params, std::vector<double> per_slot_absorb);
    //! Explicit threshold (tests, degenerate regions).
    DecoderConfig(CodeParams const& params, std::vector<double> per_slot_absorb, double threshold);

    CodeParams const& params() const noexcept { return params_; }
    std::span<double const> absorb() const noexcept { return absorb_; }
    double threshold() const noexcept { return threshold_; }

    bool time_constant() const noexcept { return absorb_.size() == 1; }
    double absorb_at(std::size_t t) const noexcept { return absorb_.size() == 1 ? absorb_[0] : absorb_[t]; }
    double min_absorb() const noexcept;
    double max_absorb() const noexcept;

  private:
    CodeParams params_;
    std::vector<double> absorb_;
    double threshold_;
};

/// delta_n = a c lmin^2 n^((b-1)/2).
double threshold(CodeParams const& params, AbsorbProb min_absorb);

/// d(y, u) = (1/n) sum_t [(y_t - l_t u_t)^2 - y_t], with pairwise summation.
/// `absorb` has one entry (time-constant) or n entries. Throws
/// ContractViolation on length mismatch.
double distance_stat(std::span<Count const> y, std::span<double const> u_scaled,
                     std::span<double const> absorb);

/// |d(y, u)| <= delta_n for the scaled codeword u.
bool is_in_region(std::span<Count const> y, Codeword const& u, DecoderConfig const& cfg);
bool is_in_region(std::span<Count const> y, std::span<double const> u_scaled,
                  DecoderConfig const& cfg);

}  // namespace dimc
