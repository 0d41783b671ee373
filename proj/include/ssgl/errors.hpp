#pragma once

#include <stdexcept>
#include <string>

namespace ssgl {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A group block whose numerical rank is below its column count.
class RankDeficientGroup : public Error {
public:
    RankDeficientGroup(std::string group_id, int rank, int size)
        : Error("group '" + group_id + "' is rank deficient (rank " +
                std::to_string(rank) + " < " + std::to_string(size) + ")"),
          group(std::move(group_id)) {}
    std::string group;
};

/// Raised when n <= m_g for some group, so no orthonormalization exists.
class SampleTooSmall : public Error {
public:
    SampleTooSmall(std::string group_id, long n, int size)
        : Error("group '" + group_id + "' has size " + std::to_string(size) +
                " but only " + std::to_string(n) + " samples"),
          group(std::move(group_id)) {}
    std::string group;
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class MaxIterExceeded : public Error {
public:
    explicit MaxIterExceeded(const std::string& msg) : Error(msg) {}
};

/// Residual variance collapsed below the representable floor (saturated fit).
class DegenerateVariance : public Error {
public:
    explicit DegenerateVariance(const std::string& msg) : Error(msg) {}
};

class TooFewDistinctValues : public Error {
public:
    explicit TooFewDistinctValues(const std::string& msg) : Error(msg) {}
};

class NonFinite : public Error {
public:
    explicit NonFinite(const std::string& msg) : Error(msg) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

} // namespace ssgl
