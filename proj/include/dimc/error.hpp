#pragma once

#include <stdexcept>
#include <string>

namespace dimc {

/// A formula was evaluated outside its domain (t <= 0, zero absorbing
/// probability in a bound denominator, ...).
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// A caller broke an operation's contract (length mismatch, x > A, N < 2).
class ContractViolation : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid configuration value. Carries the offending key.
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string key, std::string const& message)
        : std::runtime_error(key.empty() ? message : key + ": " + message)
        , key_(std::move(key))
    {
    }

    std::string const& key() const noexcept { return key_; }

  private:
    std::string key_;
};

/// Codebook construction cannot produce a usable code.
class CodebookError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace dimc
