#include "dimc/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <string>

#include "dimc/error.hpp"

namespace dimc {
namespace {

struct KindName
{
    ExperimentKind kind;
    std::string_view name;
};

constexpr std::array<KindName, 8> kind_names{{
    {ExperimentKind::diffusion_profile, "diffusion-profile"},
    {ExperimentKind::absorption_rate, "absorption-rate"},
    {ExperimentKind::rmse, "rmse"},
    {ExperimentKind::build_codebook, "build-codebook"},
    {ExperimentKind::eval_errors, "eval-errors"},
    {ExperimentKind::sweep_n, "sweep-n"},
    {ExperimentKind::sweep_time, "sweep-time"},
    {ExperimentKind::particle_check, "particle-check"},
}};

std::string_view trim(std::string_view s)
{
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    auto const last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_real(std::string_view key, std::string_view value)
{
    try
    {
        return parse_number(value);
    }
    catch (std::invalid_argument const&)
    {
        throw ConfigError(std::string(key), "expected a number, got '" + std::string(value) + "'");
    }
}

std::uint64_t to_unsigned(std::string_view key, std::string_view value)
{
    std::uint64_t out = 0;
    auto const [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty())
        throw ConfigError(std::string(key), "expected a nonnegative integer, got '" + std::string(value) + "'");
    return out;
}

bool to_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "1" || value == "yes" || value == "on")
        return true;
    if (value == "false" || value == "0" || value == "no" || value == "off")
        return false;
    throw ConfigError(std::string(key), "expected true/false, got '" + std::string(value) + "'");
}

std::vector<double> to_list(std::string_view key, std::string_view value)
{
    std::vector<double> out;
    while (!value.empty())
    {
        auto const comma = value.find(',');
        auto const item = trim(value.substr(0, comma));
        if (item.empty())
            throw ConfigError(std::string(key), "empty list element");
        out.push_back(to_real(key, item));
        if (comma == std::string_view::npos)
            break;
        value.remove_prefix(comma + 1);
    }
    if (out.empty())
        throw ConfigError(std::string(key), "list must not be empty");
    return out;
}

std::string join(std::vector<double> const& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i)
            out += ", ";
        out += format_number(values[i]);
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;
using Getter = std::function<std::string(ExperimentConfig const&)>;

struct KeySpec
{
    std::string_view section;
    std::string_view key;
    Setter set;
    Getter get;
};

template<class T>
KeySpec real_key(std::string_view section, std::string_view key, T ExperimentConfig::*member)
{
    return {section, key,
            [member](ExperimentConfig& c, std::string_view k, std::string_view v) { c.*member = to_real(k, v); },
            [member](ExperimentConfig const& c) { return format_number(c.*member); }};
}

template<class T>
KeySpec count_key(std::string_view section, std::string_view key, T ExperimentConfig::*member)
{
    return {section, key,
            [member](ExperimentConfig& c, std::string_view k, std::string_view v) {
                c.*member = static_cast<T>(to_unsigned(k, v));
            },
            [member](ExperimentConfig const& c) { return std::to_string(c.*member); }};
}

KeySpec list_key(std::string_view section, std::string_view key,
                 std::vector<double> ExperimentConfig::*member)
{
    return {section, key,
            [member](ExperimentConfig& c, std::string_view k, std::string_view v) { c.*member = to_list(k, v); },
            [member](ExperimentConfig const& c) { return join(c.*member); }};
}

std::vector<KeySpec> const& key_table()
{
    static std::vector<KeySpec> const table = [] {
        std::vector<KeySpec> t;
        t.push_back({"experiment", "kind",
                     [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                         auto const kind = parse_kind(v);
                         if (!kind)
                             throw ConfigError(std::string(k), "unknown experiment kind '" + std::string(v) + "'");
                         c.kind = kind;
                     },
                     [](ExperimentConfig const& c) {
                         return c.kind ? std::string(to_string(*c.kind)) : std::string("unset");
                     }});
        t.push_back(count_key("experiment", "seed", &ExperimentConfig::seed));
        t.push_back({"experiment", "out_dir",
                     [](ExperimentConfig& c, std::string_view, std::string_view v) { c.out_dir = std::string(v); },
                     [](ExperimentConfig const& c) { return c.out_dir.generic_string(); }});
        t.push_back(count_key("experiment", "workers", &ExperimentConfig::workers));
        t.push_back({"experiment", "paper_scale",
                     [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                         c.paper_scale = to_bool(k, v);
                         if (c.paper_scale)
                         {
                             c.iter1 = paper_iter1;
                             c.iter2 = paper_iter2;
                         }
                     },
                     [](ExperimentConfig const& c) { return std::string(c.paper_scale ? "true" : "false"); }});

        t.push_back(real_key("channel", "diffusion_coeff", &ExperimentConfig::diffusion_coeff));
        t.push_back(real_key("channel", "receiver_pos", &ExperimentConfig::receiver_pos));

        t.push_back(real_key("pde", "dt", &ExperimentConfig::dt));
        t.push_back(real_key("pde", "dl", &ExperimentConfig::dl));
        t.push_back(real_key("pde", "release_count", &ExperimentConfig::release_count));
        t.push_back(real_key("pde", "pde_horizon", &ExperimentConfig::pde_horizon));
        t.push_back(count_key("pde", "stride", &ExperimentConfig::stride));
        t.push_back(list_key("pde", "snapshot_times", &ExperimentConfig::snapshot_times));
        t.push_back(list_key("pde", "receiver_positions", &ExperimentConfig::receiver_positions));

        t.push_back(count_key("code", "n", &ExperimentConfig::n));
        t.push_back(count_key("code", "n_min", &ExperimentConfig::n_min));
        t.push_back(count_key("code", "n_max", &ExperimentConfig::n_max));
        t.push_back(real_key("code", "rate", &ExperimentConfig::rate));
        t.push_back(real_key("code", "a", &ExperimentConfig::a));
        t.push_back(real_key("code", "b", &ExperimentConfig::b));
        t.push_back(real_key("code", "c", &ExperimentConfig::c));
        t.push_back(real_key("code", "amplitude", &ExperimentConfig::amplitude));
        t.push_back(real_key("code", "absorb_prob", &ExperimentConfig::absorb_prob));
        t.push_back(count_key("code", "max_attempts", &ExperimentConfig::max_attempts));

        t.push_back(count_key("montecarlo", "iter1", &ExperimentConfig::iter1));
        t.push_back(count_key("montecarlo", "iter2", &ExperimentConfig::iter2));
        t.push_back(real_key("montecarlo", "time_min", &ExperimentConfig::time_min));
        t.push_back(real_key("montecarlo", "time_max", &ExperimentConfig::time_max));
        t.push_back(real_key("montecarlo", "time_step", &ExperimentConfig::time_step));

        t.push_back(count_key("particles", "particles", &ExperimentConfig::particles));
        t.push_back(real_key("particles", "particle_horizon", &ExperimentConfig::particle_horizon));
        t.push_back(real_key("particles", "particle_dt", &ExperimentConfig::particle_dt));
        return t;
    }();
    return table;
}

void require(bool ok, char const* key, std::string const& message)
{
    if (!ok)
        throw ConfigError(key, message);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept
{
    for (auto const& kn : kind_names)
        if (kn.kind == kind)
            return kn.name;
    return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view name) noexcept
{
    for (auto const& kn : kind_names)
        if (kn.name == name)
            return kn.kind;
    return std::nullopt;
}

std::vector<ExperimentKind> all_kinds()
{
    std::vector<ExperimentKind> out;
    for (auto const& kn : kind_names)
        out.push_back(kn.kind);
    return out;
}

ChannelParams ExperimentConfig::channel() const
{
    ChannelParams p;
    p.diffusion_coeff = diffusion_coeff;
    p.receiver_pos = receiver_pos;
    p.peak_amplitude = amplitude;
    return p;
}

CodeParams ExperimentConfig::code_params(std::size_t block_length) const
{
    CodeParams p;
    p.block_length = block_length;
    p.rate = rate;
    p.radius_coeff = a;
    p.radius_exp = b;
    p.decode_coeff = c;
    p.amplitude = amplitude;
    return p;
}

TrialPlan ExperimentConfig::plan() const
{
    return TrialPlan{iter1, iter2, seed, workers};
}

std::vector<double> ExperimentConfig::time_grid() const
{
    std::vector<double> out;
    for (std::size_t k = 0;; ++k)
    {
        double const t = time_min + static_cast<double>(k) * time_step;
        if (t > time_max * (1.0 + 1e-12))
            break;
        out.push_back(t);
    }
    return out;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value,
                   std::string_view section)
{
    key = trim(key);
    value = trim(value);
    auto const& table = key_table();
    auto const it = std::find_if(table.begin(), table.end(), [&](KeySpec const& s) { return s.key == key; });
    if (it == table.end())
        throw ConfigError(std::string(key), "unknown configuration key");
    if (!section.empty() && section != it->section)
    {
        throw ConfigError(std::string(key), "belongs to section [" + std::string(it->section)
                                                + "], found under [" + std::string(section) + "]");
    }
    it->set(cfg, key, value);
}

ExperimentConfig parse_config(std::string_view text)
{
    return parse_config(text, ExperimentConfig{});
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig cfg)
{
    std::string section;
    std::size_t line_no = 0;
    while (!text.empty())
    {
        auto const nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        if (auto const hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[')
        {
            if (line.back() != ']')
                throw ConfigError("", "line " + std::to_string(line_no) + ": malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            static constexpr std::array<std::string_view, 6> sections{
                "experiment", "channel", "pde", "code", "montecarlo", "particles"};
            if (std::find(sections.begin(), sections.end(), section) == sections.end())
                throw ConfigError(section, "unknown section");
            continue;
        }
        auto const eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
        apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1), section);
    }
    validate(cfg);
    return cfg;
}

void validate(ExperimentConfig const& cfg)
{
    require(cfg.diffusion_coeff > 0.0, "diffusion_coeff", "must be > 0");
    require(cfg.receiver_pos > 0.0, "receiver_pos", "must be > 0");
    require(cfg.dl > 0.0, "dl", "must be > 0");
    require(cfg.dt > 0.0, "dt", "must be > 0");
    double const factor = cfg.diffusion_coeff * cfg.dt / (cfg.dl * cfg.dl);
    require(factor < 0.5, "dt",
            "stability factor D*dt/dl^2 = " + format_number(factor) + " must be below 0.5");
    require(cfg.release_count > 0.0, "release_count", "must be > 0");
    require(cfg.pde_horizon >= cfg.dt, "pde_horizon", "must be at least one time step");
    require(cfg.stride >= 1, "stride", "must be >= 1");
    for (double t : cfg.snapshot_times)
        require(t > 0.0, "snapshot_times", "times must be > 0");
    for (double l : cfg.receiver_positions)
        require(l >= cfg.dl, "receiver_positions", "positions must be at least one grid step");
    require(cfg.receiver_pos >= cfg.dl, "receiver_pos", "must be at least one grid step");

    require(cfg.n >= 2, "n", "block length must be >= 2");
    require(cfg.n_min >= 2, "n_min", "must be >= 2");
    require(cfg.n_max >= cfg.n_min, "n_max", "must be >= n_min");
    cfg.code_params(cfg.n).validate();
    require(cfg.absorb_prob > 0.0 && cfg.absorb_prob <= 1.0, "absorb_prob", "value outside range (0, 1]");
    require(cfg.max_attempts >= 1, "max_attempts", "must be >= 1");

    require(cfg.iter1 >= 1, "iter1", "must be >= 1");
    require(cfg.iter2 >= 1, "iter2", "must be >= 1");
    require(cfg.time_min > 0.0, "time_min", "must be > 0");
    require(cfg.time_max >= cfg.time_min, "time_max", "must be >= time_min");
    require(cfg.time_step > 0.0, "time_step", "must be > 0");

    require(cfg.particles >= 1, "particles", "must be >= 1");
    require(cfg.particle_horizon >= 0.0, "particle_horizon", "must be >= 0 (0 = peak-rate time)");
    require(cfg.particle_dt > 0.0, "particle_dt", "must be > 0");
}

MetadataLines describe(ExperimentConfig const& cfg)
{
    MetadataLines out;
    for (auto const& spec : key_table())
    {
        // Output location and thread count do not influence any result.
        if (spec.key == "out_dir" || spec.key == "workers")
            continue;
        out.emplace_back(std::string(spec.section) + "." + std::string(spec.key), spec.get(cfg));
    }
    return out;
}

}  // namespace dimc
