#ifndef GMONSIM_PATH_SUM_HPP
#define GMONSIM_PATH_SUM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <span>
#include <vector>

#include "gmonsim/errors.hpp"
#include "gmonsim/fock_basis.hpp"
#include "gmonsim/hamiltonian.hpp"
#include "gmonsim/instance.hpp"

namespace gmonsim {

/// Trotterized evolution used by both the exhaustive path enumeration and
/// the linearized slice-product: M full steps of size Delta = T/M, each
/// split into an even-bond and an odd-bond half-slice (2M slices of Delta/2
/// physical time).  Per half-slice every active bond contributes a factor
/// from the first-order table: 1 when the bond is unchanged,
/// -i Delta g sqrt(n_src (n_dst + 1)) for a single swap, 0 otherwise.  The
/// diagonal part contributes phase Delta/2 * H_d per configuration, with
/// symmetric half weights at the first and last grid points.  The two
/// computations share every convention, so their amplitudes agree exactly;
/// the whole scheme converges to the true evolution at first order in Delta.

struct PhaseWeight {
    double phase;  // radians, phase of the trajectory amplitude
    double weight; // non-negative magnitude
};

struct PathSumOptions {
    std::uint64_t budget = 10'000'000; // admissible trajectories before giving up
    bool collect = false;              // record per-trajectory phase/weight
};

struct PathSumResult {
    std::complex<double> amplitude{0.0, 0.0};
    std::uint64_t n_trajectories = 0;
    std::vector<PhaseWeight> records; // filled when options.collect
};

namespace detail {

inline double diagonal_energy(const InstanceParams& params, const OccupationVector& n) {
    double e = 0.0;
    for (int i = 0; i < n.size(); ++i) {
        const double ni = static_cast<double>(n[i]);
        e += params.delta[static_cast<std::size_t>(i)] * ni +
             0.5 * params.eta[static_cast<std::size_t>(i)] * ni * (ni - 1.0);
    }
    return e;
}

/// Minimum number of nearest-neighbour swaps to turn `from` into `to`
/// (chain earth-mover distance); infinite when totals differ.
inline std::int64_t min_swaps(const OccupationVector& from, const OccupationVector& to) {
    std::int64_t moves = 0, prefix = 0;
    for (int i = 0; i < from.size(); ++i) {
        prefix += static_cast<std::int64_t>(from[i]) - static_cast<std::int64_t>(to[i]);
        moves += std::llabs(prefix);
    }
    return prefix == 0 ? moves : -1;
}

struct PathSumContext {
    const InstanceParams* params;
    const TruncationScheme* scheme;
    const OccupationVector* n_out;
    int slices;          // 2M
    double half_step;    // Delta/2, the physical grid spacing
    double delta;        // Delta = T/M
    PathSumOptions opt;
    PathSumResult* result;
    std::vector<int> active_bonds_even, active_bonds_odd;
    std::vector<std::int64_t> swap_capacity_after; // total active bonds in slices >= s
    double re_sum = 0.0, re_c = 0.0, im_sum = 0.0, im_c = 0.0; // compensated sums

    const std::vector<int>& active(int s) const {
        return (s % 2 == 0) ? active_bonds_even : active_bonds_odd;
    }

    void accumulate(double phase, double weight) {
        auto add = [](double& s, double& c, double x) {
            const double y = x - c;
            const double t = s + y;
            c = (t - s) - y;
            s = t;
        };
        add(re_sum, re_c, weight * std::cos(phase));
        add(im_sum, im_c, weight * std::sin(phase));
        ++result->n_trajectories;
        if (result->n_trajectories > opt.budget)
            throw BudgetExceeded("path_sum_amplitude: trajectory budget exceeded");
        if (opt.collect) result->records.push_back({phase, weight});
    }
};

/// Branch over the moves of the active bonds of slice s (index `which` into
/// the active set), then advance to the next slice.
inline void path_slice_rec(PathSumContext& ctx, int s, std::size_t which, OccupationVector& cfg,
                           double phase, double weight);

inline void path_advance(PathSumContext& ctx, int s, OccupationVector& cfg, double phase,
                         double weight) {
    // diagonal phase for the configuration at grid point s+1
    const double w_diag = (s + 1 == ctx.slices) ? 0.5 * ctx.half_step : ctx.half_step;
    phase -= w_diag * diagonal_energy(*ctx.params, cfg);
    if (s + 1 == ctx.slices) {
        if (cfg == *ctx.n_out) ctx.accumulate(phase, weight);
        return;
    }
    const std::int64_t need = min_swaps(cfg, *ctx.n_out);
    if (need < 0 || need > ctx.swap_capacity_after[static_cast<std::size_t>(s + 1)]) return;
    path_slice_rec(ctx, s + 1, 0, cfg, phase, weight);
}

inline void path_slice_rec(PathSumContext& ctx, int s, std::size_t which, OccupationVector& cfg,
                           double phase, double weight) {
    const std::vector<int>& bonds = ctx.active(s);
    if (which == bonds.size()) {
        path_advance(ctx, s, cfg, phase, weight);
        return;
    }
    const int b = bonds[which];
    // option 1: bond unchanged, factor 1
    path_slice_rec(ctx, s, which + 1, cfg, phase, weight);
    // options 2 and 3: single swap across the bond
    const double tau = (static_cast<double>(s) + 0.5) * ctx.half_step;
    const double g = ctx.params->coupling(b, tau);
    if (g == 0.0) return;
    const double phase_swap = g > 0.0 ? -1.5707963267948966 : 1.5707963267948966;
    const int cap = ctx.scheme->ceiling();
    for (int dir = 0; dir < 2; ++dir) {
        const int src = dir == 0 ? b : b + 1;
        const int dst = dir == 0 ? b + 1 : b;
        if (cfg[src] == 0 || cfg[dst] >= cap) continue;
        cfg[src] = static_cast<occ_t>(cfg[src] - 1);
        cfg[dst] = static_cast<occ_t>(cfg[dst] + 1);
        if (ctx.scheme->admits(cfg)) {
            // amplitude uses the occupations before the swap
            const double n_src = static_cast<double>(cfg[src]) + 1.0;
            const double n_dst = static_cast<double>(cfg[dst]) - 1.0;
            const double factor = std::abs(ctx.delta * g) * std::sqrt(n_src * (n_dst + 1.0));
            if (factor != 0.0)
                path_slice_rec(ctx, s, which + 1, cfg, phase + phase_swap, weight * factor);
        }
        cfg[src] = static_cast<occ_t>(cfg[src] + 1);
        cfg[dst] = static_cast<occ_t>(cfg[dst] - 1);
    }
}

} // namespace detail

/// Exhaustive sum over occupation-field trajectories.  Exact equal (to
/// rounding) to trotter_product_amplitude on the same scheme by
/// construction; converges to the true amplitude as M grows, at first order.
inline PathSumResult path_sum_amplitude(const InstanceParams& params, const TruncationScheme& scheme,
                                        const OccupationVector& n_in, const OccupationVector& n_out,
                                        int M, const PathSumOptions& opt = {}) {
    params.validate();
    if (M < 1) throw ConfigError("path_sum_amplitude: need M >= 1");
    if (n_in.size() != params.sites || n_out.size() != params.sites)
        throw ConfigError("path_sum_amplitude: occupation size mismatch");
    if (n_in.total() != n_out.total()) return {}; // particle number conserved exactly

    detail::PathSumContext ctx;
    PathSumResult result;
    ctx.params = &params;
    ctx.scheme = &scheme;
    ctx.n_out = &n_out;
    ctx.slices = 2 * M;
    ctx.delta = params.total_time() / static_cast<double>(M);
    ctx.half_step = 0.5 * ctx.delta;
    ctx.opt = opt;
    ctx.result = &result;
    for (int b = 0; b + 1 < params.sites; ++b)
        (b % 2 == 0 ? ctx.active_bonds_even : ctx.active_bonds_odd).push_back(b);
    ctx.swap_capacity_after.assign(static_cast<std::size_t>(ctx.slices) + 1, 0);
    for (int s = ctx.slices - 1; s >= 0; --s)
        ctx.swap_capacity_after[static_cast<std::size_t>(s)] =
            ctx.swap_capacity_after[static_cast<std::size_t>(s) + 1] +
            static_cast<std::int64_t>(ctx.active(s).size());

    OccupationVector cfg = n_in;
    if (!scheme.admits(cfg) || !scheme.admits(n_out))
        throw ConfigError("path_sum_amplitude: boundary state outside the truncation scheme");
    // diagonal phase for the initial grid point (half weight)
    const double phase0 = -0.5 * ctx.half_step * detail::diagonal_energy(params, cfg);
    const std::int64_t need = detail::min_swaps(cfg, n_out);
    if (need >= 0 && need <= ctx.swap_capacity_after[0])
        detail::path_slice_rec(ctx, 0, 0, cfg, phase0, 1.0);
    result.amplitude = {ctx.re_sum, ctx.im_sum};
    return result;
}

/// The identical linearization applied as a product of sparse slice
/// operators on a state vector over `basis`.  Agrees with
/// path_sum_amplitude to rounding and is cheap at any M.
inline std::complex<double> trotter_product_amplitude(const InstanceParams& params,
                                                      std::shared_ptr<const Basis> basis,
                                                      const OccupationVector& n_in,
                                                      const OccupationVector& n_out, int M) {
    params.validate();
    if (M < 1) throw ConfigError("trotter_product_amplitude: need M >= 1");
    const std::int64_t k_in = basis->index(n_in);
    const std::int64_t k_out = basis->index(n_out);
    if (k_in < 0 || k_out < 0)
        throw ConfigError("trotter_product_amplitude: boundary state not in basis");

    const Hamiltonian h(params, basis);
    const std::vector<double>& diag = h.diagonal();
    // per-bond edge lists (dst, src, amp), both hop directions
    struct Edge {
        std::uint32_t dst, src;
        double amp;
    };
    std::vector<std::vector<Edge>> bond_edges(static_cast<std::size_t>(params.sites - 1));
    {
        OccupationVector tmp;
        for (std::uint32_t j = 0; j < basis->dim(); ++j) {
            const OccupationVector& n = basis->state(j);
            for (int b = 0; b + 1 < params.sites; ++b) {
                for (int dir = 0; dir < 2; ++dir) {
                    const int src = dir == 0 ? b : b + 1;
                    const int dst = dir == 0 ? b + 1 : b;
                    if (n[src] == 0) continue;
                    tmp = n;
                    tmp[src] = static_cast<occ_t>(tmp[src] - 1);
                    tmp[dst] = static_cast<occ_t>(tmp[dst] + 1);
                    if (!basis->scheme.admits(tmp)) continue;
                    const std::int64_t i = basis->index(tmp);
                    if (i < 0) continue;
                    bond_edges[static_cast<std::size_t>(b)].push_back(
                        {static_cast<std::uint32_t>(i), j,
                         std::sqrt(static_cast<double>(n[src]) * (static_cast<double>(n[dst]) + 1.0))});
                }
            }
        }
    }

    const int slices = 2 * M;
    const double delta = params.total_time() / static_cast<double>(M);
    const double half_step = 0.5 * delta;
    std::vector<cplx> v(basis->dim(), cplx(0.0, 0.0)), tmp(basis->dim());
    v[static_cast<std::size_t>(k_in)] = cplx(1.0, 0.0);

    auto apply_diag = [&](double w) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, -w * diag[i]);
    };
    apply_diag(0.5 * half_step);
    for (int s = 0; s < slices; ++s) {
        const double tau = (static_cast<double>(s) + 0.5) * half_step;
        for (int b = s % 2; b + 1 < params.sites; b += 2) {
            const double g = params.coupling(b, tau);
            if (g == 0.0) continue;
            const cplx scale = cplx(0.0, -1.0) * (delta * g);
            std::fill(tmp.begin(), tmp.end(), cplx(0.0, 0.0));
            for (const Edge& e : bond_edges[static_cast<std::size_t>(b)])
                tmp[e.dst] += e.amp * v[e.src];
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += scale * tmp[i];
        }
        apply_diag(s + 1 == slices ? 0.5 * half_step : half_step);
    }
    return v[static_cast<std::size_t>(k_out)];
}

/// Bin trajectory phases (mod 2pi) into R uniform bins; w_r sums the
/// weights in bin r.
inline std::vector<double> phase_binned_weights(std::span<const PhaseWeight> records, int R) {
    if (R < 2) throw ConfigError("phase_binned_weights: need at least 2 bins");
    std::vector<double> w(static_cast<std::size_t>(R), 0.0);
    for (const PhaseWeight& t : records) {
        double frac = std::fmod(t.phase, two_pi) / two_pi;
        if (frac < 0.0) frac += 1.0;
        auto r = static_cast<std::size_t>(frac * R);
        if (r >= static_cast<std::size_t>(R)) r = static_cast<std::size_t>(R) - 1;
        w[r] += t.weight;
    }
    return w;
}

/// Z = sum_r w_r e^{2 pi i r / R}; reproduces the amplitude up to the
/// binning error O(w_total / R).
inline std::complex<double> binned_amplitude(std::span<const double> w) {
    std::complex<double> z(0.0, 0.0);
    const auto R = static_cast<double>(w.size());
    for (std::size_t r = 0; r < w.size(); ++r)
        z += w[r] * std::polar(1.0, two_pi * static_cast<double>(r) / R);
    return z;
}

} // namespace gmonsim

#endif
