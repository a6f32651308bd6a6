#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimc/channel.hpp"
#include "dimc/random.hpp"

namespace dimc {

/// Construction and decoding constants of a DI code.
struct CodeParams
{
    std::size_t block_length{10};  //!< n
    double rate{0.1};              //!< R
    double radius_coeff{500.0};    //!< a > 0
    double radius_exp{0.99};       //!< b in [0, 1]
    double decode_coeff{1.5};      //!< c in (0, 2)
    double amplitude{100.0};       //!< A, molecules per "on" slot

    //! Throws ConfigError naming the field and its admissible range.
    void validate() const;
};

/// Binary OOK codeword; the transmitted value in slot t is bit(t) * A.
class Codeword
{
  public:
    Codeword() = default;
    explicit Codeword(std::size_t n);

    static Codeword random(std::size_t n, Rng& rng);
    //! Parses a string of '0'/'1'; throws std::invalid_argument.
    static Codeword from_string(std::string_view bits);

    std::size_t size() const noexcept { return n_; }
    bool operator[](std::size_t t) const noexcept { return (words_[t / 64] >> (t % 64)) & 1u; }
    void set(std::size_t t, bool on) noexcept;

    std::size_t weight() const noexcept;
    std::span<std::uint64_t const> words() const noexcept { return words_; }
    std::string to_string() const;
    std::vector<double> scaled(double amplitude) const;

    friend bool operator==(Codeword const&, Codeword const&) = default;

  private:
    std::size_t n_{0};
    std::vector<std::uint64_t> words_;
};

std::size_t hamming_distance(Codeword const& u, Codeword const& v);

/// Euclidean distance between the amplitude-scaled codewords.
double scaled_distance(Codeword const& u, Codeword const& v, double amplitude);

struct Codebook
{
    CodeParams params;
    double r0{0.0};
    std::uint64_t target_size{0};
    std::uint64_t seed{0};
    std::vector<Codeword> words;

    std::size_t size() const noexcept { return words.size(); }
    bool partial() const noexcept { return words.size() < target_size; }

    //! Exhaustive pair check of the 2 r0 separation.
    bool satisfies_separation() const;
};

/// r0 = sqrt(a) n^((1+b)/4).
double sphere_radius(std::size_t n, double a, double b);

/// floor(2^(R n log2 n)), at least 2. Throws std::overflow_error when the
/// count does not fit in 63 bits.
std::uint64_t num_codewords(std::size_t n, double rate);

/// ceil((2 r0 / A)^2): Hamming separation equivalent to Euclidean 2 r0.
std::size_t min_hamming(double r0, double amplitude);

inline constexpr std::size_t default_attempts_per_word = 10000;

/// Rejection sampling of uniform binary words against the 2 r0 separation.
/// Stops at the target size or at the first slot whose draw budget runs
/// out; a partial codebook is returned, not thrown. Throws CodebookError
/// when no two codewords can be separated inside the cube.
Codebook generate_codebook(CodeParams const& params, std::uint64_t seed,
                           std::size_t max_attempts_per_word = default_attempts_per_word);

/// log2 of the saturated-packing count bound
/// 2^-n A^n Gamma(n/2 + 1) / (pi^(n/2) r0^n), via lgamma.
double packing_count_lower_bound(std::size_t n, double amplitude, double r0);

struct BoundValue
{
    double value{0.0};

    //! A probability bound above one carries no information.
    bool vacuous() const noexcept { return value > 1.0; }
};

/// Chebyshev bound on the Type I error, 3A / (a^2 c^2 lmin^4 n^b).
BoundValue type1_bound(CodeParams const& params, AbsorbProb min_absorb);

/// Type II bound: 8 A^3 lmax^3 / (a c lmin^2 n^(b+1))
///   + 3A / (4 a^2 lmin^4 n^b (2 - c n^((b-1)/2))).
/// Throws DomainError when the second denominator is not positive.
BoundValue type2_bound(CodeParams const& params, AbsorbProb min_absorb, AbsorbProb max_absorb);

/// Text format: `key = value` header lines, then one codeword per line.
void write_codebook(std::ostream& os, Codebook const& cb);
Codebook read_codebook(std::istream& is);

}  // namespace dimc
