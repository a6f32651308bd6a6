#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dimc/channel.hpp"
#include "dimc/code.hpp"
#include "dimc/csv.hpp"
#include "dimc/decoder.hpp"

namespace dimc {

struct TrialPlan
{
    std::uint64_t iter1{10000};  //!< Type I trials per codeword
    std::uint64_t iter2{500};    //!< Type II trials per transmitted codeword
    std::uint64_t master_seed{1};
    unsigned workers{0};  //!< 0 = machine parallelism

    void validate() const;
};

/// Error count out of a number of Bernoulli trials.
struct RateEstimate
{
    std::uint64_t errors{0};
    std::uint64_t trials{0};

    double rate() const noexcept;
    //! 95% normal-approximation half width; 3/trials (rule of three) when
    //! no errors were observed.
    double ci_halfwidth() const noexcept;
};

struct Type1Result
{
    std::vector<RateEstimate> per_codeword;

    double average() const noexcept;
    RateEstimate pooled() const noexcept;
    //! Lowest index attaining the maximum rate.
    std::size_t argmax() const noexcept;
};

struct Type2Result
{
    RateEstimate max;      //!< worst ordered pair (i transmitted, j tested)
    std::size_t sent{0};   //!< i
    std::size_t tested{0}; //!< j
    RateEstimate pooled;   //!< all ordered pairs i != j
};

/// Per-codeword Type I error: fraction of trials with Y ~ W(. | u_i)
/// falling outside D_i. Trial (i, k) draws from seed
/// derive_seed(master, 1, i, k).
Type1Result estimate_type1(Codebook const& cb, DecoderConfig const& cfg, TrialPlan const& plan);

/// Type II error over ordered pairs. Each trial's reception from u_i is
/// tested against every D_j, j != i; trial (i, k) draws from
/// derive_seed(master, 2, i, k). Throws ContractViolation when N < 2.
Type2Result estimate_type2(Codebook const& cb, DecoderConfig const& cfg, TrialPlan const& plan);

struct ErrorReport
{
    double axis{0.0};  //!< n for block-length sweeps, t for time sweeps
    std::size_t block_length{0};
    std::size_t codebook_size{0};
    std::uint64_t target_size{0};
    bool partial_codebook{false};
    double absorb{0.0};
    double threshold{0.0};

    std::vector<RateEstimate> type1;  //!< per codeword
    RateEstimate pooled_type1;
    double avg_type1{0.0};
    RateEstimate max_type1;
    std::size_t max_type1_index{0};

    RateEstimate max_type2;
    std::size_t max_type2_sent{0};
    std::size_t max_type2_tested{0};
    double avg_type2{0.0};

    //! NaN when the bound formula is undefined at this point.
    double bound1{0.0};
    double bound2{0.0};

    std::uint64_t seed{0};
    std::uint64_t codebook_seed{0};
    double wall_seconds{0.0};

    double avg_type1_ci() const noexcept { return pooled_type1.ci_halfwidth(); }
};

/// Type I and Type II estimates plus the closed-form bounds.
ErrorReport evaluate(Codebook const& cb, DecoderConfig const& cfg, TrialPlan const& plan);

/// One report per n in [n_min, n_max], each with its own codebook seeded
/// by derive_seed(master, 3, n).
std::vector<ErrorReport> sweep_blocklength(std::size_t n_min, std::size_t n_max,
                                           CodeParams const& templ, AbsorbProb absorb,
                                           TrialPlan const& plan,
                                           std::size_t max_attempts = default_attempts_per_word);

/// Fixed codebook, lambda = erfc(L_R / sqrt(4 D t)) per time point.
std::vector<ErrorReport> sweep_time(CodeParams const& params, std::span<double const> times,
                                    ChannelParams const& channel, TrialPlan const& plan,
                                    std::size_t max_attempts = default_attempts_per_word);

/// Rows keyed by `axis_name` ("n" or "t").
CsvTable report_table(std::span<ErrorReport const> reports, std::string const& axis_name,
                      MetadataLines metadata);

/// Spearman rank correlation with average ranks for ties; 0 when either
/// series is constant.
double spearman(std::span<double const> x, std::span<double const> y);

}  // namespace dimc
