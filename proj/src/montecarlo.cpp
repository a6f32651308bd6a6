#include "dimc/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "dimc/error.hpp"
#include "dimc/parallel.hpp"
#include "dimc/random.hpp"

namespace dimc {
namespace {

constexpr std::uint64_t type1_stream = 1;
constexpr std::uint64_t type2_stream = 2;
constexpr std::uint64_t codebook_stream = 3;

void check_consistent(Codebook const& cb, DecoderConfig const& cfg)
{
    if (cb.words.empty())
        throw ContractViolation("empty codebook");
    if (cfg.params().block_length != cb.params.block_length)
        throw ContractViolation("decoder block length differs from codebook");
    if (cfg.params().amplitude != cb.params.amplitude)
        throw ContractViolation("decoder amplitude differs from codebook");
    for (auto const& w : cb.words)
        if (w.size() != cb.params.block_length)
            throw ContractViolation("codeword length differs from block length");
}

/// Reception Y for codeword u: Poisson(absorb_t * A) in "on" slots, zero
/// elsewhere. Holds one sampler per distinct slot mean.
class ReceptionSampler
{
  public:
    ReceptionSampler(DecoderConfig const& cfg)
    {
        double const amp = cfg.params().amplitude;
        std::size_t const slots = cfg.time_constant() ? 1 : cfg.params().block_length;
        samplers_.reserve(slots);
        for (std::size_t t = 0; t < slots; ++t)
            samplers_.emplace_back(cfg.absorb_at(t) * amp);
    }

    void draw(Codeword const& u, Rng& rng, std::vector<Count>& y) const
    {
        y.assign(u.size(), 0);
        for (std::size_t t = 0; t < u.size(); ++t)
            if (u[t])
                y[t] = samplers_[samplers_.size() == 1 ? 0 : t](rng);
    }

  private:
    std::vector<PoissonSampler> samplers_;
};

/// Exact-integer evaluation of n * d(y, u_j) for a time-constant channel:
/// sum_t (y_t^2 - y_t) - 2 mu sum_t y_t u_jt + mu^2 |u_j|, with the inner
/// products computed from bit planes of y.
class FastStatistic
{
  public:
    static constexpr std::size_t table_min_count = 128;

    FastStatistic(std::span<Codeword const> words, DecoderConfig const& cfg)
        : mu_(cfg.absorb_at(0) * cfg.params().amplitude)
        , limit_(cfg.threshold() * static_cast<double>(cfg.params().block_length))
        , words_per_codeword_((cfg.params().block_length + 63) / 64)
    {
        std::size_t const n = cfg.params().block_length;
        window_lo_.assign(n + 1, 0);
        window_hi_.assign(n + 1, 0);
        weights_.reserve(words.size());
        int_weights_.reserve(words.size());
        packed_.reserve(words.size() * words_per_codeword_);
        for (auto const& w : words)
        {
            weights_.push_back(static_cast<double>(w.weight()));
            int_weights_.push_back(static_cast<std::uint32_t>(w.weight()));
            packed_.insert(packed_.end(), w.words().begin(), w.words().end());
        }
    }

    //! Enough for accepts_own(); skips the bit planes.
    void load_sums(std::span<Count const> y)
    {
        quad_ = 0.0;
        sum_ = 0;
        for (Count v : y)
        {
            quad_ += static_cast<double>(v) * static_cast<double>(v) - static_cast<double>(v);
            sum_ += v;
        }
    }

    void load(std::span<Count const> y)
    {
        load_sums(y);
        y_.assign(y.begin(), y.end());
        Count const peak = y.empty() ? 0 : *std::max_element(y.begin(), y.end());
        planes_ = static_cast<std::size_t>(std::bit_width(peak));
        bits_.assign(planes_ * words_per_codeword_, 0);
        for (std::size_t t = 0; t < y.size(); ++t)
            for (std::size_t k = 0; k < planes_; ++k)
                if ((y[t] >> k) & 1u)
                    bits_[k * words_per_codeword_ + t / 64] |= std::uint64_t{1} << (t % 64);
    }

    std::uint64_t inner(std::size_t j) const noexcept
    {
        std::uint64_t total = 0;
        std::uint64_t const* u = packed_.data() + j * words_per_codeword_;
        for (std::size_t k = 0; k < planes_; ++k)
        {
            std::uint64_t const* plane = bits_.data() + k * words_per_codeword_;
            std::uint64_t hits = 0;
            for (std::size_t w = 0; w < words_per_codeword_; ++w)
                hits += static_cast<std::uint64_t>(std::popcount(plane[w] & u[w]));
            total += hits << k;
        }
        return total;
    }

    bool accepts(std::size_t j, std::uint64_t inner_product) const noexcept
    {
        double const scaled = quad_ - 2.0 * mu_ * static_cast<double>(inner_product)
                              + mu_ * mu_ * weights_[j];
        return std::fabs(scaled) <= limit_;
    }

    bool accepts(std::size_t j) const noexcept { return accepts(j, inner(j)); }

    //! Adds one to hits[j] for every region containing y. The transmitted
    //! codeword's own entry is counted too; callers ignore it.
    void count_accepted(std::vector<std::uint64_t>& hits)
    {
        prepare_windows();
        std::size_t const count = weights_.size();
        if (words_per_codeword_ == 1 && count >= table_min_count)
        {
            // S = sum over bytes b of T_b[byte b of u], with T_b[p] the sum
            // of y over the set bits of p.
            std::size_t const chunks = (window_lo_.size() - 1 + 7) / 8;
            std::array<std::uint32_t, 8 * 256> table;
            for (std::size_t c = 0; c < chunks; ++c)
            {
                std::uint32_t* t = table.data() + 256 * c;
                t[0] = 0;
                for (unsigned p = 1; p < 256; ++p)
                {
                    auto const slot = 8 * c + static_cast<std::size_t>(std::countr_zero(p));
                    t[p] = t[p & (p - 1)] + (slot < y_.size() ? y_[slot] : 0);
                }
            }
            for (std::size_t j = 0; j < count; ++j)
            {
                std::uint64_t u = packed_[j];
                std::uint64_t s = 0;
                for (std::size_t c = 0; c < chunks; ++c, u >>= 8)
                    s += table[256 * c + (u & 0xff)];
                auto const w = int_weights_[j];
                hits[j] += (s >= window_lo_[w]) & (s <= window_hi_[w]);
            }
            return;
        }
        if (words_per_codeword_ == 1)
        {
            std::array<std::uint64_t, 32> plane{};
            std::copy_n(bits_.begin(), planes_, plane.begin());
            for (std::size_t j = 0; j < count; ++j)
            {
                std::uint64_t const u = packed_[j];
                std::uint64_t s = 0;
                for (std::size_t k = 0; k < planes_; ++k)
                    s += static_cast<std::uint64_t>(std::popcount(plane[k] & u)) << k;
                auto const w = int_weights_[j];
                hits[j] += (s >= window_lo_[w]) & (s <= window_hi_[w]);
            }
            return;
        }
        for (std::size_t j = 0; j < count; ++j)
        {
            auto const s = inner(j);
            auto const w = int_weights_[j];
            hits[j] += (s >= window_lo_[w]) & (s <= window_hi_[w]);
        }
    }

    //! Shortcut for the transmitted codeword: y vanishes off its support.
    bool accepts_own(std::size_t i) const noexcept { return accepts(i, sum_); }

  private:
    //! Per weight w, the inner products s in [lo, hi] that accepts() admits.
    //! The statistic falls in s, so the set is an interval; its ends are
    //! located from the closed form and settled with accepts() itself.
    void prepare_windows()
    {
        std::size_t const n = window_lo_.size() - 1;
        auto const top = static_cast<std::int64_t>(sum_);
        for (std::size_t w = 0; w <= n; ++w)
        {
            double const wd = static_cast<double>(w);
            auto ok = [&](std::int64_t s) {
                return s >= 0 && s <= top
                       && std::fabs(quad_ - 2.0 * mu_ * static_cast<double>(s) + mu_ * mu_ * wd) <= limit_;
            };
            window_lo_[w] = 1;
            window_hi_[w] = 0;
            if (mu_ <= 0.0)
            {
                if (ok(0))
                {
                    window_lo_[w] = 0;
                    window_hi_[w] = static_cast<std::uint64_t>(top);
                }
                continue;
            }
            double const centre = (quad_ + mu_ * mu_ * wd) / (2.0 * mu_);
            double const half = limit_ / (2.0 * mu_);
            auto lo = static_cast<std::int64_t>(std::ceil(centre - half));
            auto hi = static_cast<std::int64_t>(std::floor(centre + half));
            lo = std::max<std::int64_t>(lo, 0);
            hi = std::min(hi, top);
            while (lo > 0 && ok(lo - 1))
                --lo;
            while (lo <= hi && !ok(lo))
                ++lo;
            while (hi < top && ok(hi + 1))
                ++hi;
            while (hi >= lo && !ok(hi))
                --hi;
            if (lo <= hi)
            {
                window_lo_[w] = static_cast<std::uint64_t>(lo);
                window_hi_[w] = static_cast<std::uint64_t>(hi);
            }
        }
    }

    double mu_;
    double limit_;
    std::size_t words_per_codeword_;
    std::vector<double> weights_;
    std::vector<std::uint32_t> int_weights_;
    std::vector<std::uint64_t> window_lo_;
    std::vector<std::uint64_t> window_hi_;
    std::vector<std::uint64_t> packed_;
    std::vector<std::uint64_t> bits_;
    std::vector<Count> y_;
    std::size_t planes_{0};
    double quad_{0.0};
    std::uint64_t sum_{0};
};

double safe_bound(auto&& fn)
{
    try
    {
        return fn().value;
    }
    catch (DomainError const&)
    {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

void TrialPlan::validate() const
{
    if (iter1 < 1 || iter2 < 1)
        throw ContractViolation("trial counts must be >= 1");
}

double RateEstimate::rate() const noexcept
{
    return trials == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(trials);
}

double RateEstimate::ci_halfwidth() const noexcept
{
    if (trials == 0)
        return 1.0;
    double const m = static_cast<double>(trials);
    if (errors == 0)
        return 3.0 / m;
    double const p = rate();
    return 1.96 * std::sqrt(p * (1.0 - p) / m);
}

double Type1Result::average() const noexcept
{
    if (per_codeword.empty())
        return 0.0;
    double s = 0.0;
    for (auto const& r : per_codeword)
        s += r.rate();
    return s / static_cast<double>(per_codeword.size());
}

RateEstimate Type1Result::pooled() const noexcept
{
    RateEstimate total;
    for (auto const& r : per_codeword)
    {
        total.errors += r.errors;
        total.trials += r.trials;
    }
    return total;
}

std::size_t Type1Result::argmax() const noexcept
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < per_codeword.size(); ++i)
        if (per_codeword[i].errors > per_codeword[best].errors)
            best = i;
    return best;
}

Type1Result estimate_type1(Codebook const& cb, DecoderConfig const& cfg, TrialPlan const& plan)
{
    plan.validate();
    check_consistent(cb, cfg);
    std::size_t const count = cb.words.size();
    ReceptionSampler const sampler{cfg};

    Type1Result result;
    result.per_codeword.assign(count, RateEstimate{0, plan.iter1});
    parallel_for(count, plan.workers, [&](std::size_t i) {
        std::vector<Count> y;
        auto const& u = cb.words[i];
        std::uint64_t errors = 0;
        if (cfg.time_constant())
        {
            FastStatistic stat{std::span<Codeword const>(&u, 1), cfg};
            for (std::uint64_t k = 0; k < plan.iter1; ++k)
            {
                Rng rng{derive_seed({plan.master_seed, type1_stream, i, k})};
                sampler.draw(u, rng, y);
                stat.load_sums(y);
                errors += stat.accepts_own(0) ? 0 : 1;
            }
        }
        else
        {
            auto const scaled = u.scaled(cfg.params().amplitude);
            for (std::uint64_t k = 0; k < plan.iter1; ++k)
            {
                Rng rng{derive_seed({plan.master_seed, type1_stream, i, k})};
                sampler.draw(u, rng, y);
                errors += is_in_region(y, scaled, cfg) ? 0 : 1;
            }
        }
        result.per_codeword[i].errors = errors;
    });
    return result;
}

Type2Result estimate_type2(Codebook const& cb, DecoderConfig const& cfg, TrialPlan const& plan)
{
    plan.validate();
    check_consistent(cb, cfg);
    std::size_t const count = cb.words.size();
    if (count < 2)
        throw ContractViolation("Type II estimation needs at least two codewords");
    ReceptionSampler const sampler{cfg};

    struct Row
    {
        std::uint64_t max_hits{0};
        std::size_t argmax{0};
        std::uint64_t total{0};
    };
    std::vector<Row> rows(count);

    std::vector<std::vector<double>> scaled;
    if (!cfg.time_constant())
    {
        scaled.reserve(count);
        for (auto const& w : cb.words)
            scaled.push_back(w.scaled(cfg.params().amplitude));
    }

    parallel_for(count, plan.workers, [&](std::size_t i) {
        std::vector<std::uint64_t> hits(count, 0);
        std::vector<Count> y;
        if (cfg.time_constant())
        {
            FastStatistic stat{cb.words, cfg};
            for (std::uint64_t k = 0; k < plan.iter2; ++k)
            {
                Rng rng{derive_seed({plan.master_seed, type2_stream, i, k})};
                sampler.draw(cb.words[i], rng, y);
                stat.load(y);
                stat.count_accepted(hits);
            }
        }
        else
        {
            for (std::uint64_t k = 0; k < plan.iter2; ++k)
            {
                Rng rng{derive_seed({plan.master_seed, type2_stream, i, k})};
                sampler.draw(cb.words[i], rng, y);
                for (std::size_t j = 0; j < count; ++j)
                    if (j != i && is_in_region(y, scaled[j], cfg))
                        ++hits[j];
            }
        }
        Row row;
        row.argmax = i == 0 ? 1 : 0;
        for (std::size_t j = 0; j < count; ++j)
        {
            if (j == i)
                continue;
            row.total += hits[j];
            if (hits[j] > row.max_hits)
            {
                row.max_hits = hits[j];
                row.argmax = j;
            }
        }
        if (row.max_hits == 0)
            row.argmax = i == 0 ? 1 : 0;
        rows[i] = row;
    });

    Type2Result result;
    result.max.trials = plan.iter2;
    result.sent = 0;
    result.tested = rows[0].argmax;
    result.max.errors = rows[0].max_hits;
    for (std::size_t i = 0; i < count; ++i)
    {
        result.pooled.errors += rows[i].total;
        if (rows[i].max_hits > result.max.errors)
        {
            result.max.errors = rows[i].max_hits;
            result.sent = i;
            result.tested = rows[i].argmax;
        }
    }
    result.pooled.trials = plan.iter2 * count * (count - 1);
    return result;
}

ErrorReport evaluate(Codebook const& cb, DecoderConfig const& cfg, TrialPlan const& plan)
{
    auto const start = std::chrono::steady_clock::now();
    ErrorReport report;
    report.block_length = cb.params.block_length;
    report.axis = static_cast<double>(cb.params.block_length);
    report.codebook_size = cb.words.size();
    report.target_size = cb.target_size;
    report.partial_codebook = cb.partial();
    report.absorb = cfg.min_absorb();
    report.threshold = cfg.threshold();
    report.seed = plan.master_seed;
    report.codebook_seed = cb.seed;

    auto const t1 = estimate_type1(cb, cfg, plan);
    report.type1 = t1.per_codeword;
    report.pooled_type1 = t1.pooled();
    report.avg_type1 = t1.average();
    report.max_type1_index = t1.argmax();
    report.max_type1 = t1.per_codeword[report.max_type1_index];

    if (cb.words.size() >= 2)
    {
        auto const t2 = estimate_type2(cb, cfg, plan);
        report.max_type2 = t2.max;
        report.max_type2_sent = t2.sent;
        report.max_type2_tested = t2.tested;
        report.avg_type2 = t2.pooled.rate();
    }

    report.bound1 = safe_bound([&] { return type1_bound(cb.params, AbsorbProb{cfg.min_absorb()}); });
    report.bound2 = safe_bound([&] {
        return type2_bound(cb.params, AbsorbProb{cfg.min_absorb()}, AbsorbProb{cfg.max_absorb()});
    });
    report.wall_seconds
        = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<ErrorReport> sweep_blocklength(std::size_t n_min, std::size_t n_max,
                                           CodeParams const& templ, AbsorbProb absorb,
                                           TrialPlan const& plan, std::size_t max_attempts)
{
    if (n_min < 2 || n_max < n_min)
        throw ContractViolation("block-length range must satisfy 2 <= n_min <= n_max");
    std::vector<ErrorReport> reports;
    for (std::size_t n = n_min; n <= n_max; ++n)
    {
        CodeParams params = templ;
        params.block_length = n;
        auto const cb = generate_codebook(params, derive_seed({plan.master_seed, codebook_stream, n}),
                                          max_attempts);
        reports.push_back(evaluate(cb, DecoderConfig{params, absorb}, plan));
    }
    return reports;
}

std::vector<ErrorReport> sweep_time(CodeParams const& params, std::span<double const> times,
                                    ChannelParams const& channel, TrialPlan const& plan,
                                    std::size_t max_attempts)
{
    auto const cb = generate_codebook(
        params, derive_seed({plan.master_seed, codebook_stream, params.block_length}), max_attempts);
    std::vector<ErrorReport> reports;
    for (double t : times)
    {
        auto const absorb = absorb_prob(t, channel);
        auto report = evaluate(cb, DecoderConfig{params, absorb}, plan);
        report.axis = t;
        reports.push_back(std::move(report));
    }
    return reports;
}

CsvTable report_table(std::span<ErrorReport const> reports, std::string const& axis_name,
                      MetadataLines metadata)
{
    CsvTable table(std::move(metadata),
                   {axis_name, "N", "target_N", "partial", "absorb_prob", "threshold", "avg_type1",
                    "max_type1", "max_type2", "avg_type2", "bound1", "bound2", "ci_avg_type1",
                    "ci_max_type1", "ci_max_type2", "max_type2_pair", "seed", "codebook_seed"});
    for (auto const& r : reports)
    {
        table.add_row(std::vector<std::string>{
            format_number(r.axis), std::to_string(r.codebook_size), std::to_string(r.target_size),
            r.partial_codebook ? "1" : "0", format_number(r.absorb), format_number(r.threshold),
            format_number(r.avg_type1), format_number(r.max_type1.rate()),
            format_number(r.max_type2.rate()), format_number(r.avg_type2), format_number(r.bound1),
            format_number(r.bound2), format_number(r.avg_type1_ci()),
            format_number(r.max_type1.ci_halfwidth()), format_number(r.max_type2.ci_halfwidth()),
            std::to_string(r.max_type2_sent) + ":" + std::to_string(r.max_type2_tested),
            std::to_string(r.seed), std::to_string(r.codebook_seed)});
    }
    return table;
}

double spearman(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw ContractViolation("spearman needs two equal-length series of size >= 2");
    auto ranks = [](std::span<double const> v) {
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < order.size();)
        {
            std::size_t j = i;
            while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]])
                ++j;
            double const avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k)
                r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    auto const rx = ranks(x);
    auto const ry = ranks(y);
    double const mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
    double const my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i)
    {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace dimc
