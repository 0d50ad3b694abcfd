#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lcadc {

/// A caller violated a documented precondition (e.g. asking for a window
/// exit when the signal already sits outside the window).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An analytic model was asked for a point outside its validity region,
/// typically an operating point past the tracking boundary.
class ModelDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A configuration that cannot be simulated: bad converter parameters,
/// an input that starts outside the conversion range, or a malformed
/// run-configuration file. `key` and `line` are filled when known.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, std::string key = {}, std::size_t line = 0)
        : std::runtime_error(what), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string key_;
    std::size_t line_;
};

/// Internal numeric failure (non-finite values, a bracket that lost its
/// sign change).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lcadc
