#include "dimc/code.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "dimc/csv.hpp"
#include "dimc/error.hpp"

namespace dimc {

void CodeParams::validate() const
{
    if (block_length < 1)
        throw ConfigError("n", "block length must be >= 1");
    if (!(rate > 0.0))
        throw ConfigError("rate", "must be > 0");
    if (!(radius_coeff > 0.0))
        throw ConfigError("a", "value " + format_number(radius_coeff) + " outside range a > 0");
    if (!(radius_exp >= 0.0 && radius_exp <= 1.0))
        throw ConfigError("b", "value " + format_number(radius_exp) + " outside range [0, 1]");
    if (!(decode_coeff > 0.0 && decode_coeff < 2.0))
        throw ConfigError("c", "value " + format_number(decode_coeff) + " outside range (0, 2)");
    if (!(amplitude > 0.0))
        throw ConfigError("amplitude", "must be > 0");
}

Codeword::Codeword(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

Codeword Codeword::random(std::size_t n, Rng& rng)
{
    Codeword w(n);
    for (auto& word : w.words_)
        word = rng();
    if (n % 64 != 0)
        w.words_.back() &= (std::uint64_t{1} << (n % 64)) - 1;
    return w;
}

Codeword Codeword::from_string(std::string_view bits)
{
    Codeword w(bits.size());
    for (std::size_t t = 0; t < bits.size(); ++t)
    {
        if (bits[t] != '0' && bits[t] != '1')
            throw std::invalid_argument("codeword contains '" + std::string(1, bits[t]) + "'");
        w.set(t, bits[t] == '1');
    }
    return w;
}

void Codeword::set(std::size_t t, bool on) noexcept
{
    auto const mask = std::uint64_t{1} << (t % 64);
    if (on)
        words_[t / 64] |= mask;
    else
        words_[t / 64] &= ~mask;
}

std::size_t Codeword::weight() const noexcept
{
    std::size_t w = 0;
    for (auto word : words_)
        w += static_cast<std::size_t>(std::popcount(word));
    return w;
}

std::string Codeword::to_string() const
{
    std::string s(n_, '0');
    for (std::size_t t = 0; t < n_; ++t)
        if ((*this)[t])
            s[t] = '1';
    return s;
}

std::vector<double> Codeword::scaled(double amplitude) const
{
    std::vector<double> out(n_);
    for (std::size_t t = 0; t < n_; ++t)
        out[t] = (*this)[t] ? amplitude : 0.0;
    return out;
}

std::size_t hamming_distance(Codeword const& u, Codeword const& v)
{
    if (u.size() != v.size())
        throw ContractViolation("hamming_distance: length mismatch");
    auto const a = u.words();
    auto const b = v.words();
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += static_cast<std::size_t>(std::popcount(a[i] ^ b[i]));
    return d;
}

double scaled_distance(Codeword const& u, Codeword const& v, double amplitude)
{
    return amplitude * std::sqrt(static_cast<double>(hamming_distance(u, v)));
}

bool Codebook::satisfies_separation() const
{
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = i + 1; j < words.size(); ++j)
            if (scaled_distance(words[i], words[j], params.amplitude) < 2.0 * r0)
                return false;
    return true;
}

double sphere_radius(std::size_t n, double a, double b)
{
    return std::sqrt(a) * std::pow(static_cast<double>(n), (1.0 + b) / 4.0);
}

std::uint64_t num_codewords(std::size_t n, double rate)
{
    if (n < 2)
        throw ContractViolation("num_codewords needs n >= 2");
    double const nd = static_cast<double>(n);
    double const exponent = rate * nd * std::log2(nd);
    if (exponent >= 63.0)
        throw std::overflow_error("2^" + format_number(exponent) + " codewords do not fit in 63 bits");
    // Relative slack absorbs rounding when 2^exponent is an integer in exact
    // arithmetic (n = 10, R = 0.1 gives exactly 10).
    double const value = std::exp2(exponent) * (1.0 + 1e-12);
    return std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::floor(value)));
}

std::size_t min_hamming(double r0, double amplitude)
{
    if (!(r0 > 0.0) || !(amplitude > 0.0))
        throw ContractViolation("min_hamming needs r0 > 0 and A > 0");
    double const ratio = 2.0 * r0 / amplitude;
    return static_cast<std::size_t>(std::ceil(ratio * ratio));
}

Codebook generate_codebook(CodeParams const& params, std::uint64_t seed,
                           std::size_t max_attempts_per_word)
{
    params.validate();
    if (max_attempts_per_word < 1)
        throw ContractViolation("max_attempts_per_word must be >= 1");

    Codebook cb;
    cb.params = params;
    cb.seed = seed;
    std::size_t const n = params.block_length;
    cb.r0 = sphere_radius(n, params.radius_coeff, params.radius_exp);
    cb.target_size = num_codewords(n, params.rate);

    std::size_t const dmin = min_hamming(cb.r0, params.amplitude);
    if (dmin > n)
    {
        throw CodebookError("2 r0 = " + format_number(2.0 * cb.r0)
                            + " exceeds the cube diameter A sqrt(n) = "
                            + format_number(params.amplitude * std::sqrt(static_cast<double>(n)))
                            + "; at most one codeword fits");
    }

    Rng rng{seed};
    auto separated = [&](Codeword const& candidate) {
        return std::all_of(cb.words.begin(), cb.words.end(), [&](Codeword const& w) {
            return hamming_distance(candidate, w) >= dmin;
        });
    };

    while (cb.words.size() < cb.target_size)
    {
        bool accepted = false;
        for (std::size_t attempt = 0; attempt < max_attempts_per_word; ++attempt)
        {
            auto candidate = Codeword::random(n, rng);
            if (separated(candidate))
            {
                cb.words.push_back(std::move(candidate));
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;
    }
    return cb;
}

double packing_count_lower_bound(std::size_t n, double amplitude, double r0)
{
    if (n < 1)
        throw ContractViolation("packing bound needs n >= 1");
    double const nd = static_cast<double>(n);
    return -nd + nd * std::log2(amplitude) + std::lgamma(nd / 2.0 + 1.0) / std::numbers::ln2
           - nd / 2.0 * std::log2(std::numbers::pi) - nd * std::log2(r0);
}

BoundValue type1_bound(CodeParams const& params, AbsorbProb min_absorb)
{
    double const lmin = min_absorb.value();
    if (lmin == 0.0)
        throw DomainError("type1_bound undefined for zero absorbing probability");
    double const a = params.radius_coeff;
    double const c = params.decode_coeff;
    double const nb = std::pow(static_cast<double>(params.block_length), params.radius_exp);
    return {3.0 * params.amplitude / (a * a * c * c * std::pow(lmin, 4) * nb)};
}

BoundValue type2_bound(CodeParams const& params, AbsorbProb min_absorb, AbsorbProb max_absorb)
{
    double const lmin = min_absorb.value();
    double const lmax = max_absorb.value();
    if (lmin == 0.0)
        throw DomainError("type2_bound undefined for zero absorbing probability");
    double const n = static_cast<double>(params.block_length);
    double const a = params.radius_coeff;
    double const b = params.radius_exp;
    double const c = params.decode_coeff;
    double const amp = params.amplitude;
    double const gap = 2.0 - c * std::pow(n, (b - 1.0) / 2.0);
    if (!(gap > 0.0))
        throw DomainError("type2_bound invalid: 2 - c n^((b-1)/2) = " + format_number(gap));
    double const first = 8.0 * amp * amp * amp * lmax * lmax * lmax
                         / (a * c * lmin * lmin * std::pow(n, b + 1.0));
    double const second = 3.0 * amp / (4.0 * a * a * std::pow(lmin, 4) * std::pow(n, b) * gap);
    return {first + second};
}

void write_codebook(std::ostream& os, Codebook const& cb)
{
    auto const& p = cb.params;
    os << "# dimc codebook v1\n";
    os << "n = " << p.block_length << '\n';
    os << "N = " << cb.words.size() << '\n';
    os << "target_N = " << cb.target_size << '\n';
    os << "A = " << format_number(p.amplitude) << '\n';
    os << "a = " << format_number(p.radius_coeff) << '\n';
    os << "b = " << format_number(p.radius_exp) << '\n';
    os << "c = " << format_number(p.decode_coeff) << '\n';
    os << "R = " << format_number(p.rate) << '\n';
    os << "r0 = " << format_number(cb.r0) << '\n';
    os << "seed = " << cb.seed << '\n';
    for (auto const& w : cb.words)
        os << w.to_string() << '\n';
}

Codebook read_codebook(std::istream& is)
{
    std::map<std::string, std::string> header;
    Codebook cb;
    std::string line;
    while (std::getline(is, line))
    {
        if (line.empty() || line.front() == '#')
            continue;
        auto const eq = line.find('=');
        if (eq == std::string::npos)
        {
            cb.words.push_back(Codeword::from_string(line));
            continue;
        }
        auto trim = [](std::string s) {
            auto const first = s.find_first_not_of(" \t");
            auto const last = s.find_last_not_of(" \t\r");
            return first == std::string::npos ? std::string{} : s.substr(first, last - first + 1);
        };
        header[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto get = [&](char const* key) -> std::string const& {
        auto const it = header.find(key);
        if (it == header.end())
            throw std::invalid_argument(std::string("codebook header missing '") + key + "'");
        return it->second;
    };
    cb.params.block_length = std::stoull(get("n"));
    cb.target_size = std::stoull(get("target_N"));
    cb.params.amplitude = parse_number(get("A"));
    cb.params.radius_coeff = parse_number(get("a"));
    cb.params.radius_exp = parse_number(get("b"));
    cb.params.decode_coeff = parse_number(get("c"));
    cb.params.rate = parse_number(get("R"));
    cb.r0 = parse_number(get("r0"));
    cb.seed = std::stoull(get("seed"));

    if (std::stoull(get("N")) != cb.words.size())
        throw std::invalid_argument("codebook header N disagrees with the number of codewords");
    for (auto const& w : cb.words)
        if (w.size() != cb.params.block_length)
            throw std::invalid_argument("codeword length differs from header n");
    return cb;
}

}  // namespace dimc
