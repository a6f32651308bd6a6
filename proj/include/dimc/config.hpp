#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dimc/channel.hpp"
#include "dimc/code.hpp"
#include "dimc/csv.hpp"
#include "dimc/montecarlo.hpp"

namespace dimc {

enum class ExperimentKind
{
    diffusion_profile,
    absorption_rate,
    rmse,
    build_codebook,
    eval_errors,
    sweep_n,
    sweep_time,
    particle_check,
};

std::string_view to_string(ExperimentKind kind) noexcept;
std::optional<ExperimentKind> parse_kind(std::string_view name) noexcept;
std::vector<ExperimentKind> all_kinds();

/// Fully resolved experiment settings. Defaults reproduce the macroscopic
/// simulation table (D = 4e-9, L_R = 40 um, dt = 1e-4, dl = 1e-6,
/// x0 = 10000) and the identification-code table (A = 100, lambda = 0.083,
/// n = 10..26, R = 0.1, a = 500, b = 0.99, c = 1.5) at desk-scale trial
/// counts.
struct ExperimentConfig
{
    std::optional<ExperimentKind> kind;
    std::uint64_t seed{1};
    std::filesystem::path out_dir{"out"};
    unsigned workers{0};
    bool paper_scale{false};

    // [channel]
    double diffusion_coeff{4e-9};
    double receiver_pos{40e-6};

    // [pde]
    double dt{1e-4};
    double dl{1e-6};
    double release_count{10000};
    double pde_horizon{0.5};
    std::size_t stride{1};
    std::vector<double> snapshot_times{0.013, 0.05, 0.1, 0.2};
    std::vector<double> receiver_positions{20e-6, 40e-6, 60e-6, 80e-6};

    // [code]
    std::size_t n{16};
    std::size_t n_min{10};
    std::size_t n_max{26};
    double rate{0.1};
    double a{500.0};
    double b{0.99};
    double c{1.5};
    double amplitude{100.0};
    double absorb_prob{0.083};
    std::size_t max_attempts{default_attempts_per_word};

    // [montecarlo]
    std::uint64_t iter1{10000};
    std::uint64_t iter2{500};
    double time_min{0.01};
    double time_max{0.15};
    double time_step{0.01};

    // [particles]
    std::size_t particles{100000};
    double particle_horizon{0.0};  //!< 0 selects the peak-rate time
    double particle_dt{1e-4};

    ChannelParams channel() const;
    CodeParams code_params(std::size_t block_length) const;
    TrialPlan plan() const;
    std::vector<double> time_grid() const;
};

inline constexpr std::uint64_t paper_iter1 = 100000;
inline constexpr std::uint64_t paper_iter2 = 2000;

/// Applies one `key = value` setting. `section` may be empty; when given it
/// must be the key's home section. Throws ConfigError naming the key.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value,
                   std::string_view section = {});

/// Parses line-oriented `key = value` text with optional `[section]`
/// headers and `#` comments over the defaults, then validates.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base);

/// Range and stability checks; throws ConfigError naming the key.
void validate(ExperimentConfig const& cfg);

/// Every result-affecting setting as `section.key = value`, in a fixed
/// order (output directory and worker count are omitted).
MetadataLines describe(ExperimentConfig const& cfg);

}  // namespace dimc
