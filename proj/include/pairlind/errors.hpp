#ifndef PAIRLIND_ERRORS_HPP
#define PAIRLIND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pairlind {

/// Bad user-supplied value (cutoffs, Bargmann index, drive amplitudes, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters that make a derived quantity undefined (e.g. Gamma_par = 0).
class DegenerateInput : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class DimensionMismatch : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// eta <= 1: the reduced steady state is not normalizable (lasing side).
class LasingInstability : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NotNormalizable : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Fixed-point iteration ran out of iterations; message carries the last
/// iterate and residual.
class NoConvergence : public std::runtime_error {
public:
    NoConvergence(const std::string& what, double last_iterate, double residual)
        : std::runtime_error(what), last_iterate(last_iterate), residual(residual) {}
    double last_iterate;
    double residual;
};

class OutsideCoolingRegime : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive integrator step underflow; message names the fastest rate.
class StiffnessError : public std::runtime_error {
public:
    StiffnessError(const std::string& what, double fastest_rate)
        : std::runtime_error(what), fastest_rate(fastest_rate) {}
    double fastest_rate;
};

/// Liouvillian null space has more than one direction; nullity < 0 means the
/// dimension was too large to estimate.
class NonUniqueSteadyState : public std::runtime_error {
public:
    NonUniqueSteadyState(const std::string& what, int nullity)
        : std::runtime_error(what), nullity(nullity) {}
    int nullity;
};

/// Config file problem; message carries line/field diagnostics.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pairlind

#endif
