#ifndef GMONSIM_FREE_FERMION_HPP
#define GMONSIM_FREE_FERMION_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "gmonsim/errors.hpp"
#include "gmonsim/fock_basis.hpp"
#include "gmonsim/instance.hpp"

namespace gmonsim {

/// Time-ordered exponential of the single-particle Hamiltonian; unitary up
/// to integration error.  In the hard-core (two-level) limit the chain maps
/// onto free fermions and V fully determines the many-body evolution.
struct FermionPropagator {
    Eigen::MatrixXcd V;

    double unitarity_defect() const {
        return (V.adjoint() * V - Eigen::MatrixXcd::Identity(V.rows(), V.cols())).norm();
    }
};

namespace detail {

/// Single-particle matrix: diagonal detunings, nearest-neighbour couplings.
inline Eigen::MatrixXcd single_particle_h(const InstanceParams& params, double t) {
    const int n = params.sites;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = params.delta[static_cast<std::size_t>(i)];
    for (int b = 0; b + 1 < n; ++b) {
        const double g = params.coupling(b, t);
        h(b, b + 1) += g;
        h(b + 1, b) += g;
    }
    return h;
}

} // namespace detail

/// Integrate dV/dt = -i h(t) V with the same per-cycle RK4 step policy as
/// the state-vector integrator.  The anharmonicity never enters: the m = 1
/// sector has no doubly occupied sites.
inline FermionPropagator fermion_propagator(const InstanceParams& params, std::int64_t steps) {
    if (steps < 1) throw ConfigError("fermion_propagator: need at least one step");
    params.validate();
    const int n = params.sites;
    const double T = params.total_time();
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Identity(n, n);
    const std::complex<double> mi(0.0, -1.0);
    auto deriv = [&](double t, const Eigen::MatrixXcd& m) -> Eigen::MatrixXcd {
        return mi * (detail::single_particle_h(params, t) * m);
    };
    double t = 0.0;
    for (int c = 0; c < params.pulses.cycles(); ++c) {
        const double Tc = params.pulses.T_pulse[static_cast<std::size_t>(c)];
        const auto n_c = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::llround(static_cast<double>(steps) * Tc / T)));
        const double dt = Tc / static_cast<double>(n_c);
        for (std::int64_t s = 0; s < n_c; ++s) {
            const Eigen::MatrixXcd k1 = deriv(t, V);
            const Eigen::MatrixXcd k2 = deriv(t + 0.5 * dt, V + 0.5 * dt * k1);
            const Eigen::MatrixXcd k3 = deriv(t + 0.5 * dt, V + 0.5 * dt * k2);
            const Eigen::MatrixXcd k4 = deriv(t + dt, V + dt * k3);
            V += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += dt;
        }
    }
    return FermionPropagator{std::move(V)};
}

/// <n_out| U |n_in> as the determinant of the k x k submatrix of V with
/// rows at the occupied sites of n_out and columns at those of n_in.
inline std::complex<double> free_fermion_amplitude(const FermionPropagator& prop,
                                                   const OccupationVector& n_in,
                                                   const OccupationVector& n_out) {
    std::vector<int> cols, rows;
    for (int i = 0; i < n_in.size(); ++i) {
        if (n_in[i] > 1 || n_out[i] > 1)
            throw ConfigError("free_fermion_amplitude: occupations must be hard-core (0/1)");
        if (n_in[i]) cols.push_back(i);
        if (n_out[i]) rows.push_back(i);
    }
    if (rows.size() != cols.size())
        throw ConfigError("free_fermion_amplitude: excitation-count mismatch");
    const auto k = static_cast<Eigen::Index>(rows.size());
    if (k == 0) return {1.0, 0.0};
    Eigen::MatrixXcd sub(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
        for (Eigen::Index c = 0; c < k; ++c)
            sub(r, c) = prop.V(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
    return sub.determinant();
}

} // namespace gmonsim

#endif
