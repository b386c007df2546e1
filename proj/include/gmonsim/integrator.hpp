#ifndef GMONSIM_INTEGRATOR_HPP
#define GMONSIM_INTEGRATOR_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <vector>

#include "gmonsim/distribution.hpp"
#include "gmonsim/errors.hpp"
#include "gmonsim/hamiltonian.hpp"
#include "gmonsim/instance.hpp"
#include "gmonsim/rng.hpp"
#include "gmonsim/state.hpp"

namespace gmonsim {

struct Checkpoint {
    double time = 0.0;
    int cycle = 0; // number of completed cycles
    std::optional<StateVector> state;
    std::vector<double> qubit_probs; // renormalized qubit-subspace snapshot
    double leak = 0.0;
};

struct EvolutionResult {
    StateVector final_state;
    std::vector<Checkpoint> checkpoints; // time-ordered, one per cycle boundary
    double norm_drift = 0.0;             // | ||psi_final|| - 1 |
    std::int64_t steps_used = 0;
};

struct EvolveOptions {
    double norm_tolerance = 1e-6;     // exceeding it raises NumericFailure
    bool keep_checkpoints = true;
    bool keep_checkpoint_states = true; // full amplitudes; snapshots only when false
};

ProbabilityDistribution project_qubit_subspace(const StateVector& psi, bool renormalize = true);

namespace detail {

/// One classic RK4 step of dpsi/dt = -i H(t) psi.
inline void rk4_step(const Hamiltonian& h, double t, double dt, std::vector<cplx>& psi,
                     std::vector<cplx>& k, std::vector<cplx>& stage, std::vector<cplx>& acc) {
    const std::size_t dim = psi.size();
    const cplx mi(0.0, -1.0);
    // k1
    h.apply(t, psi, k);
    for (std::size_t j = 0; j < dim; ++j) {
        const cplx k1 = mi * k[j];
        acc[j] = psi[j] + (dt / 6.0) * k1;
        stage[j] = psi[j] + (0.5 * dt) * k1;
    }
    // k2
    h.apply(t + 0.5 * dt, stage, k);
    for (std::size_t j = 0; j < dim; ++j) {
        const cplx k2 = mi * k[j];
        acc[j] += (dt / 3.0) * k2;
        stage[j] = psi[j] + (0.5 * dt) * k2;
    }
    // k3
    h.apply(t + 0.5 * dt, stage, k);
    for (std::size_t j = 0; j < dim; ++j) {
        const cplx k3 = mi * k[j];
        acc[j] += (dt / 3.0) * k3;
        stage[j] = psi[j] + dt * k3;
    }
    // k4
    h.apply(t + dt, stage, k);
    for (std::size_t j = 0; j < dim; ++j) psi[j] = acc[j] + (dt / 6.0) * (mi * k[j]);
}

} // namespace detail

/// Integrate the time-dependent Schrodinger equation with fixed-step
/// fourth-order Runge-Kutta.  The requested step count is distributed over
/// cycles proportionally to their duration (at least one step per cycle) so
/// checkpoints land exactly on cycle boundaries and no step straddles an
/// envelope kink.  The norm is monitored, never silently renormalized.
inline EvolutionResult rk4_evolve(const InstanceParams& params, std::shared_ptr<const Basis> basis,
                                  const StateVector& psi0, std::int64_t steps,
                                  const EvolveOptions& opt = {}) {
    if (steps < 1) throw ConfigError("rk4_evolve: need at least one step");
    if (psi0.basis.get() != basis.get()) throw ConfigError("rk4_evolve: psi0 built on another basis");
    Hamiltonian h(params, basis);
    const double T = params.total_time();
    const int cycles = params.pulses.cycles();

    EvolutionResult res;
    res.final_state = psi0;
    std::vector<cplx>& psi = res.final_state.amp;
    std::vector<cplx> k(psi.size()), stage(psi.size()), acc(psi.size());

    auto push_checkpoint = [&](double t, int cycle) {
        if (!opt.keep_checkpoints) return;
        Checkpoint cp;
        cp.time = t;
        cp.cycle = cycle;
        const ProbabilityDistribution d = project_qubit_subspace(res.final_state, true);
        cp.qubit_probs = d.p;
        cp.leak = d.leak;
        if (opt.keep_checkpoint_states) cp.state = res.final_state;
        res.checkpoints.push_back(std::move(cp));
    };

    push_checkpoint(0.0, 0);
    double t = 0.0;
    for (int c = 0; c < cycles; ++c) {
        const double Tc = params.pulses.T_pulse[static_cast<std::size_t>(c)];
        const auto n_c = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::llround(static_cast<double>(steps) * Tc / T)));
        const double dt = Tc / static_cast<double>(n_c);
        for (std::int64_t s = 0; s < n_c; ++s) {
            detail::rk4_step(h, t, dt, psi, k, stage, acc);
            t += dt;
        }
        t = std::accumulate(params.pulses.T_pulse.begin(),
                            params.pulses.T_pulse.begin() + c + 1, 0.0); // kill drift
        res.steps_used += n_c;
        push_checkpoint(t, c + 1);
    }
    res.norm_drift = std::abs(res.final_state.norm() - 1.0);
    if (res.norm_drift > opt.norm_tolerance)
        throw NumericFailure("rk4_evolve: norm drift " + std::to_string(res.norm_drift) +
                             " exceeds tolerance (insufficient steps?)");
    return res;
}

/// Probabilities over the MaxLevel(1) subspace states.  Both raw
/// (sub-normalized, normalized=false) and renormalized variants are
/// available; leak reports the weight outside the qubit subspace.
inline ProbabilityDistribution project_qubit_subspace(const StateVector& psi, bool renormalize) {
    if (!psi.basis) throw ConfigError("project_qubit_subspace: state has no basis");
    const Basis& b = *psi.basis;
    ProbabilityDistribution d;
    d.sites = b.sites;
    d.n_exc = b.n_exc;
    double inside = 0.0;
    for (std::size_t k = 0; k < b.dim(); ++k) {
        const OccupationVector& n = b.state(k);
        bool qubit = true;
        for (occ_t c : n.counts)
            if (c > 1) {
                qubit = false;
                break;
            }
        if (!qubit) continue;
        std::uint64_t label = 0;
        for (int i = 0; i < b.sites; ++i)
            if (n[i]) label |= (1ull << i);
        d.labels.push_back(label);
        const double w = std::norm(psi.amp[k]);
        d.p.push_back(w);
        inside += w;
    }
    d.leak = 1.0 - inside;
    if (renormalize) {
        if (inside > 0.0)
            for (double& x : d.p) x /= inside;
        d.normalized = true;
    } else {
        d.normalized = false;
    }
    return d;
}

/// Convergence of run(steps) against run(2 steps), scored with the
/// qubit-subspace cross-entropy fidelity.  Returns the converged step count.
/// Distributions with mismatched support fall back to an exact-agreement
/// check (covers the fully diagonal case, where the score is degenerate).
inline std::int64_t estimate_steps(const InstanceParams& params, std::shared_ptr<const Basis> basis,
                                   double tol, std::int64_t floor_steps = 128,
                                   std::int64_t cap = std::int64_t(1) << 20) {
    if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("estimate_steps: tol must be in (0,1)");
    const StateVector psi0 = StateVector::fock(basis, half_filling_pattern(params.sites));
    EvolveOptions opt;
    opt.norm_tolerance = 0.5; // blow-ups just mean "not converged" here
    opt.keep_checkpoints = false;

    auto run = [&](std::int64_t n) {
        return project_qubit_subspace(rk4_evolve(params, basis, psi0, n, opt).final_state, true);
    };

    ProbabilityDistribution prev = run(floor_steps);
    for (std::int64_t n = 2 * floor_steps; n <= cap; n *= 2) {
        ProbabilityDistribution cur = run(n);
        bool positive = true;
        double max_diff = 0.0;
        for (std::size_t i = 0; i < cur.p.size(); ++i) {
            if (cur.p[i] <= 0.0) positive = false;
            max_diff = std::max(max_diff, std::abs(cur.p[i] - prev.p[i]));
        }
        if (positive) {
            const double s_exp = [&] {
                double s = 0.0;
                for (double q : cur.p) s -= q * std::log(q);
                return s;
            }();
            double s_cross = 0.0, s_inc = 0.0;
            const double u = 1.0 / static_cast<double>(cur.p.size());
            for (std::size_t i = 0; i < cur.p.size(); ++i) {
                s_cross -= prev.p[i] * std::log(cur.p[i]);
                s_inc -= u * std::log(cur.p[i]);
            }
            const double denom = s_inc - s_exp;
            if (std::abs(denom) > 1e-12 && (s_inc - s_cross) / denom > 1.0 - tol) return n;
        } else if (max_diff < tol * 1e-3) {
            return n; // degenerate support, distributions already identical
        }
        prev = std::move(cur);
    }
    throw BudgetExceeded("estimate_steps: no convergence within the step-count cap");
}

/// Classical measurement-error model applied as post-processing.
struct MeasurementErrorModel {
    double readout_error_per_qubit = 0.0;   // symmetric bit flip at readout
    double loss_per_qubit_per_cycle = 0.0;  // excited bit cleared per cycle

    void validate() const {
        if (readout_error_per_qubit < 0.0 || readout_error_per_qubit >= 1.0 ||
            loss_per_qubit_per_cycle < 0.0 || loss_per_qubit_per_cycle >= 1.0)
            throw ConfigError("MeasurementErrorModel: probabilities must lie in [0,1)");
    }
};

struct SampleResult {
    std::map<std::uint64_t, std::uint64_t> counts; // surviving bitstring -> count
    std::uint64_t n_samples = 0;
    std::uint64_t n_rejected = 0;
    double rejected_fraction = 0.0;
};

/// Draw bitstrings, apply photon loss then readout flips, and post-select on
/// the conserved excitation number.
inline SampleResult sample_measurements(const ProbabilityDistribution& dist, std::uint64_t n_samples,
                                        const MeasurementErrorModel& err, int cycles,
                                        std::uint64_t seed) {
    if (!dist.normalized) throw ConfigError("sample_measurements: need a normalized distribution");
    if (n_samples < 1) throw ConfigError("sample_measurements: need at least one sample");
    err.validate();
    if (cycles < 0) throw ConfigError("sample_measurements: negative cycle count");
    const double p_loss = std::min(1.0, static_cast<double>(cycles) * err.loss_per_qubit_per_cycle);
    const double p_flip = err.readout_error_per_qubit;

    std::vector<double> cdf(dist.p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.p.size(); ++i) {
        acc += dist.p[i];
        cdf[i] = acc;
    }

    SampleResult res;
    res.n_samples = n_samples;
    SplitRng rng = SplitRng(seed).split(0x5a5a5a5aull);
    for (std::uint64_t s = 0; s < n_samples; ++s) {
        const double u = rng.next_double() * acc;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const std::size_t k = std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
        std::uint64_t z = dist.labels[k];
        for (int q = 0; q < dist.sites; ++q) {
            const std::uint64_t bit = 1ull << q;
            if ((z & bit) && p_loss > 0.0 && rng.next_double() < p_loss) z &= ~bit;
            if (p_flip > 0.0 && rng.next_double() < p_flip) z ^= bit;
        }
        if (std::popcount(z) != dist.n_exc) {
            ++res.n_rejected;
            continue;
        }
        ++res.counts[z];
    }
    res.rejected_fraction = static_cast<double>(res.n_rejected) / static_cast<double>(n_samples);
    return res;
}

} // namespace gmonsim

#endif
