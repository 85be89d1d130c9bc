/// @file core.hpp
/// @brief Shared error types, small numeric helpers and the deterministic
///        parallel loop used by every module.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsvb {

inline constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-domain arguments to an operation.
class InputError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration; `key()` names the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error("config key '" + key + "': " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class PositivityError : public Error {
public:
    using Error::Error;
};

/// Droplet density reached the guard band of the truncated velocity box.
class SupportViolation : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, int iterations)
        : Error(what), iterations_(iterations) {}
    int iterations() const noexcept { return iterations_; }

private:
    int iterations_;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

/// Wraps a failure inside one coupled step with the step index and substep name.
class SteppingError : public Error {
public:
    SteppingError(long step, std::string substep, const std::string& cause)
        : Error("step " + std::to_string(step) + " [" + substep + "]: " + cause),
          step_(step), substep_(std::move(substep)) {}
    long step() const noexcept { return step_; }
    const std::string& substep() const noexcept { return substep_; }

private:
    long step_;
    std::string substep_;
};

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

constexpr std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// Number of worker threads used by parallel loops. 1 means serial.
void set_thread_count(int n);
int thread_count();

/// Runs fn(begin, end) over a static partition of [0, n). Partitions depend on
/// the thread count only through scheduling; callers write disjoint outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

/// Sum of per-item partials in a fixed pairwise order, independent of threads.
double pairwise_sum(std::span<const double> v);

}  // namespace nsvb
