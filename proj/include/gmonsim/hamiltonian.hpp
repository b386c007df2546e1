#ifndef GMONSIM_HAMILTONIAN_HPP
#define GMONSIM_HAMILTONIAN_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gmonsim/errors.hpp"
#include "gmonsim/fock_basis.hpp"
#include "gmonsim/instance.hpp"
#include "gmonsim/state.hpp"

namespace gmonsim {

/// Sparse structure of the hopping terms over a Basis, independent of the
/// couplings.  Row-major (CSR) so each output entry has a single writer.
/// Hops whose target leaves the admissible set are dropped, which realizes
/// the projector-Hamiltonian-projector band truncation.
struct HopTable {
    struct Entry {
        std::uint32_t col;
        std::uint16_t bond;
        double amp; // sqrt(n_src (n_dst + 1)) for the boson move col -> row
    };
    std::vector<std::uint32_t> row_ptr;
    std::vector<Entry> entries;

    static HopTable build(const Basis& basis) {
        const std::size_t dim = basis.dim();
        std::vector<std::vector<Entry>> rows(dim);
        OccupationVector tmp;
        for (std::uint32_t j = 0; j < dim; ++j) {
            const OccupationVector& n = basis.state(j);
            for (int b = 0; b + 1 < basis.sites; ++b) {
                // move one boson from site src to site dst across bond b
                for (int dir = 0; dir < 2; ++dir) {
                    const int src = dir == 0 ? b + 1 : b;
                    const int dst = dir == 0 ? b : b + 1;
                    if (n[src] == 0) continue;
                    tmp = n;
                    tmp[src] = static_cast<occ_t>(tmp[src] - 1);
                    tmp[dst] = static_cast<occ_t>(tmp[dst] + 1);
                    if (!basis.scheme.admits(tmp)) continue;
                    const std::int64_t i = basis.index(tmp);
                    if (i < 0) continue;
                    const double amp =
                        std::sqrt(static_cast<double>(n[src]) * (static_cast<double>(n[dst]) + 1.0));
                    rows[static_cast<std::size_t>(i)].push_back(
                        {j, static_cast<std::uint16_t>(b), amp});
                }
            }
        }
        HopTable t;
        t.row_ptr.resize(dim + 1, 0);
        std::size_t total = 0;
        for (std::size_t r = 0; r < dim; ++r) {
            t.row_ptr[r] = static_cast<std::uint32_t>(total);
            total += rows[r].size();
        }
        t.row_ptr[dim] = static_cast<std::uint32_t>(total);
        t.entries.reserve(total);
        for (auto& r : rows) t.entries.insert(t.entries.end(), r.begin(), r.end());
        return t;
    }
};

/// Matrix-free H(t) for one instance on one basis.  The diagonal
/// (detunings and Hubbard terms) is time independent; the hopping couplings
/// carry all time dependence.  Pure with respect to instance and basis, so
/// concurrent apply() calls on distinct output buffers are safe.
class Hamiltonian {
  public:
    Hamiltonian(const InstanceParams& params, std::shared_ptr<const Basis> basis)
        : params_(&params), basis_(std::move(basis)), hops_(HopTable::build(*basis_)) {
        if (params.sites != basis_->sites)
            throw ConfigError("Hamiltonian: instance and basis site counts differ");
        params.validate();
        diag_.resize(basis_->dim());
        for (std::size_t k = 0; k < basis_->dim(); ++k) {
            const OccupationVector& n = basis_->state(k);
            double e = 0.0;
            for (int i = 0; i < basis_->sites; ++i) {
                const double ni = static_cast<double>(n[i]);
                e += params.delta[static_cast<std::size_t>(i)] * ni +
                     0.5 * params.eta[static_cast<std::size_t>(i)] * ni * (ni - 1.0);
            }
            diag_[k] = e;
        }
    }

    const Basis& basis() const { return *basis_; }
    std::shared_ptr<const Basis> basis_ptr() const { return basis_; }
    const std::vector<double>& diagonal() const { return diag_; }

    /// out = H(t) in.  Buffers must not alias.
    void apply(double t, const std::vector<cplx>& in, std::vector<cplx>& out) const {
        const int nb = basis_->sites - 1;
        std::array<double, 15> g{};
        for (int b = 0; b < nb; ++b) g[static_cast<std::size_t>(b)] = params_->coupling(b, t);
        apply_with_couplings(std::span<const double>(g.data(), static_cast<std::size_t>(nb)), in, out);
    }

    /// out = [diag + sum_b g_b * hop_b] in, with explicit couplings (rad/s).
    void apply_with_couplings(std::span<const double> g, const std::vector<cplx>& in,
                              std::vector<cplx>& out) const {
        const std::size_t dim = basis_->dim();
        if (in.size() != dim) throw ConfigError("Hamiltonian::apply: state dimension mismatch");
        out.resize(dim);
        for (std::size_t r = 0; r < dim; ++r) {
            cplx acc = diag_[r] * in[r];
            const std::uint32_t lo = hops_.row_ptr[r], hi = hops_.row_ptr[r + 1];
            for (std::uint32_t e = lo; e < hi; ++e) {
                const HopTable::Entry& h = hops_.entries[e];
                acc += (g[h.bond] * h.amp) * in[h.col];
            }
            out[r] = acc;
        }
    }

  private:
    const InstanceParams* params_;
    std::shared_ptr<const Basis> basis_;
    HopTable hops_;
    std::vector<double> diag_;
};

/// H(t)|psi> as a fresh state.  Matrix-free; see Hamiltonian for the hot path.
inline StateVector apply_hamiltonian(const InstanceParams& params, double t, const StateVector& psi) {
    if (!psi.basis) throw ConfigError("apply_hamiltonian: state has no basis");
    Hamiltonian h(params, psi.basis);
    StateVector out(psi.basis);
    h.apply(t, psi.amp, out.amp);
    return out;
}

} // namespace gmonsim

#endif
