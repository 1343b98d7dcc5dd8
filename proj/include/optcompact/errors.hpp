#pragma once

#include <stdexcept>
#include <string>

namespace optcompact {

// Invalid stencil specification, weight function, tableau or case config.
class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double last, double previous)
        : std::runtime_error(what), last_(last), previous_(previous) {}
    double last() const { return last_; }
    double previous() const { return previous_; }

private:
    double last_, previous_;
};

// KKT system too ill-conditioned to trust in double precision.
class RankDeficiencyError : public std::runtime_error {
public:
    RankDeficiencyError(const std::string& what, int halfWidth, double lo, double hi, double condition)
        : std::runtime_error(what), halfWidth_(halfWidth), lo_(lo), hi_(hi), condition_(condition) {}
    int half_width() const { return halfWidth_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }
    double condition() const { return condition_; }

private:
    int halfWidth_;
    double lo_, hi_, condition_;
};

// Standard (order-matching) system inconsistent or underdetermined.
class DerivationError : public std::runtime_error {
public:
    DerivationError(const std::string& what, int suggestedOrder)
        : std::runtime_error(what), suggested_(suggestedOrder) {}
    // largest achievable order for the shape, 0 if none
    int suggested_order() const { return suggested_; }

private:
    int suggested_;
};

class SingularOperatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedCombinationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace optcompact
