#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpblock {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration-class errors: bad inputs detected before any numerical work.
// ---------------------------------------------------------------------------

class ConfigurationError : public Error {
public:
    using Error::Error;
};

class DimensionError : public ConfigurationError {
public:
    using ConfigurationError::ConfigurationError;
};

class IndexError : public ConfigurationError {
public:
    using ConfigurationError::ConfigurationError;
};

class PreconditionError : public ConfigurationError {
public:
    using ConfigurationError::ConfigurationError;
};

// ---------------------------------------------------------------------------
// Numerical failures.
// ---------------------------------------------------------------------------

class NumericalError : public Error {
public:
    using Error::Error;
};

/// A sample chain produced a non-finite state or left its safety box.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, int chain, std::uint64_t step)
        : NumericalError(what), chain_(chain), step_(step) {}

    int chain() const noexcept { return chain_; }
    std::uint64_t step() const noexcept { return step_; }

private:
    int chain_;
    std::uint64_t step_;
};

class NonConvergenceError : public NumericalError {
public:
    NonConvergenceError(const std::string& what, std::vector<double> residual_history)
        : NumericalError(what), history_(std::move(residual_history)) {}

    const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

class RankDeficiencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EmptyHistogramError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Ratio of norms requested for a zero field.
class UndefinedRatioError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// One or more blocks of a block solve failed; partial results are discarded.
class BlockSolveError : public NumericalError {
public:
    BlockSolveError(const std::string& what, std::vector<int> failed_blocks)
        : NumericalError(what), failed_(std::move(failed_blocks)) {}

    const std::vector<int>& failed_blocks() const noexcept { return failed_; }

private:
    std::vector<int> failed_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fpblock
