#ifndef GMONSIM_DISTRIBUTION_HPP
#define GMONSIM_DISTRIBUTION_HPP

#include <cstdint>
#include <numeric>
#include <vector>

#include "gmonsim/errors.hpp"

namespace gmonsim {

/// Probabilities over qubit-subspace bitstrings in canonical (lexicographic
/// occupation) order.  labels[k] packs site i into bit i.  When normalized
/// is false the entries are raw sub-normalized weights and `leak` holds the
/// weight outside the qubit subspace.
struct ProbabilityDistribution {
    int sites = 0;
    int n_exc = 0;
    std::vector<std::uint64_t> labels;
    std::vector<double> p;
    bool normalized = true;
    double leak = 0.0;

    std::size_t n_states() const { return p.size(); }

    double total() const { return std::accumulate(p.begin(), p.end(), 0.0); }

    /// Uniform distribution on the same support.
    ProbabilityDistribution uniform_like() const {
        ProbabilityDistribution u = *this;
        const double q = 1.0 / static_cast<double>(p.size());
        for (double& x : u.p) x = q;
        u.normalized = true;
        u.leak = 0.0;
        return u;
    }

    void check_compatible(const ProbabilityDistribution& o) const {
        if (p.size() != o.p.size()) throw ConfigError("distributions have different supports");
    }
};

} // namespace gmonsim

#endif
