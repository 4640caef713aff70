#pragma once

#include <stdexcept>
#include <string>

namespace sgsim {

/// Violated precondition on a physical or numerical input.
class RangeError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Failure inside a simulation engine (non-exiting particle, divergent expansion, ...).
class EngineError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool ok, const std::string& what)
{
    if (!ok)
        throw RangeError(what);
}
} // namespace detail

} // namespace sgsim
