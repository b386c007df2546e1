#ifndef GMONSIM_ERRORS_HPP
#define GMONSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gmonsim {

/// Bad or inconsistent inputs (configs, mismatched bases, invalid ranges).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure at runtime, e.g. integrator norm drift or a fit that
/// fails to converge.
struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A work or memory budget was exceeded (step-count cap, trajectory cap).
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace gmonsim

#endif
