#ifndef GMONSIM_STATE_HPP
#define GMONSIM_STATE_HPP

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "gmonsim/errors.hpp"
#include "gmonsim/fock_basis.hpp"

namespace gmonsim {

using cplx = std::complex<double>;

/// Complex amplitudes over a Basis; the evolution payload.
struct StateVector {
    std::shared_ptr<const Basis> basis;
    std::vector<cplx> amp;

    StateVector() = default;
    explicit StateVector(std::shared_ptr<const Basis> b)
        : basis(std::move(b)), amp(basis->dim(), cplx(0.0, 0.0)) {}

    std::size_t dim() const { return amp.size(); }

    double norm() const {
        double s = 0.0;
        for (const cplx& a : amp) s += std::norm(a);
        return std::sqrt(s);
    }

    void normalize() {
        const double n = norm();
        if (n == 0.0) throw NumericFailure("cannot normalize a zero state");
        for (cplx& a : amp) a /= n;
    }

    /// Product Fock state |n>.
    static StateVector fock(std::shared_ptr<const Basis> b, const OccupationVector& n) {
        StateVector psi(std::move(b));
        const std::int64_t k = psi.basis->index(n);
        if (k < 0) throw ConfigError("fock: state " + n.to_string() + " not in basis");
        psi.amp[static_cast<std::size_t>(k)] = cplx(1.0, 0.0);
        return psi;
    }
};

inline cplx inner_product(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw ConfigError("inner_product: dimension mismatch");
    cplx s(0.0, 0.0);
    for (std::size_t k = 0; k < a.dim(); ++k) s += std::conj(a.amp[k]) * b.amp[k];
    return s;
}

} // namespace gmonsim

#endif
