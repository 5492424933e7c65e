#ifndef QIS_ERRORS_HPP
#define QIS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qis {

// Bad parameter values, invalid states, zero-mass conditioning.
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Truncated state space larger than the configured maximum.
class capacity_error : public std::runtime_error {
public:
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// Generator without a unique recurrent class reachable from the reference state.
class structural_error : public std::runtime_error {
public:
    explicit structural_error(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solve ran out of budget; carries the residual it got to.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double achieved_residual)
        : std::runtime_error(what), residual(achieved_residual) {}
    double residual;
};

} // namespace qis

#endif
