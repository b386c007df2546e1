#ifndef GMONSIM_DIAGNOSTICS_HPP
#define GMONSIM_DIAGNOSTICS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "gmonsim/distribution.hpp"
#include "gmonsim/errors.hpp"
#include "gmonsim/state.hpp"

namespace gmonsim {

/// Kahan-compensated sum; keeps ensemble reductions stable run to run.
inline double compensated_sum(std::span<const double> xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

/// All entropies are in nats.
inline double entropy(std::span<const double> p) {
    double s = 0.0;
    for (double x : p) {
        if (x < 0.0) throw ConfigError("entropy: negative probability");
        if (x > 0.0) s -= x * std::log(x);
    }
    return s;
}

inline double cross_entropy(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw ConfigError("cross_entropy: support mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] <= 0.0) throw ConfigError("cross_entropy: q vanishes where p has support");
        s -= p[i] * std::log(q[i]);
    }
    return s;
}

inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
    return cross_entropy(p, q) - entropy(p);
}

inline double entropy(const ProbabilityDistribution& d) { return entropy(std::span<const double>(d.p)); }

/// Normalized cross-entropy fidelity: 1 when measured equals expected, 0 for
/// the incoherent uniform mixture on the same support.
inline double xeb_fidelity(std::span<const double> measured, std::span<const double> expected) {
    if (measured.size() != expected.size()) throw ConfigError("xeb_fidelity: support mismatch");
    const std::size_t n = expected.size();
    if (n == 0) throw ConfigError("xeb_fidelity: empty support");
    double s_exp = 0.0, s_inc = 0.0, s_meas = 0.0;
    const double u = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (expected[i] <= 0.0) throw ConfigError("xeb_fidelity: expected distribution must be strictly positive");
        const double lq = std::log(expected[i]);
        s_exp -= expected[i] * lq;
        s_inc -= u * lq;
        s_meas -= measured[i] * lq;
    }
    const double denom = s_inc - s_exp;
    if (std::abs(denom) < 1e-12 * std::abs(s_inc))
        throw ConfigError("xeb_fidelity: expected distribution is uniform, score undefined");
    return (s_inc - s_meas) / denom;
}

inline double xeb_fidelity(const ProbabilityDistribution& measured,
                           const ProbabilityDistribution& expected) {
    measured.check_compatible(expected);
    return xeb_fidelity(std::span<const double>(measured.p), std::span<const double>(expected.p));
}

/// Plug-in XEB from sample counts against an expected distribution given in
/// canonical label order.
inline double xeb_fidelity_from_counts(const std::map<std::uint64_t, std::uint64_t>& counts,
                                       const ProbabilityDistribution& expected) {
    std::uint64_t total = 0;
    for (const auto& [z, c] : counts) total += c;
    if (total == 0) throw ConfigError("xeb_fidelity_from_counts: no samples");
    std::map<std::uint64_t, std::size_t> where;
    for (std::size_t i = 0; i < expected.labels.size(); ++i) where[expected.labels[i]] = i;
    std::vector<double> measured(expected.p.size(), 0.0);
    for (const auto& [z, c] : counts) {
        const auto it = where.find(z);
        if (it == where.end()) throw ConfigError("xeb_fidelity_from_counts: sample outside support");
        measured[it->second] = static_cast<double>(c) / static_cast<double>(total);
    }
    return xeb_fidelity(std::span<const double>(measured), std::span<const double>(expected.p));
}

/// Histogram on the x = p * n_states axis.
struct Histogram {
    std::vector<double> edges;   // size bins+1, strictly increasing; final bin is overflow
    std::vector<double> counts;  // size bins+1 (last entry = overflow counts)
    double total = 0.0;

    int bins() const { return static_cast<int>(edges.size()) - 1; }
};

inline Histogram make_pt_histogram(int bins = 32, double x_max = 8.0) {
    if (bins < 1) throw ConfigError("pt_histogram: need at least one bin");
    Histogram h;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i)
        h.edges[static_cast<std::size_t>(i)] = x_max * static_cast<double>(i) / bins;
    h.counts.assign(static_cast<std::size_t>(bins) + 1, 0.0);
    return h;
}

/// Accumulate one distribution: each state contributes one count at
/// x = p * n_states.
inline void pt_accumulate(Histogram& h, const ProbabilityDistribution& dist) {
    const double n = static_cast<double>(dist.n_states());
    const int bins = h.bins();
    const double x_max = h.edges.back();
    for (double p : dist.p) {
        const double x = p * n;
        std::size_t b;
        if (x >= x_max) {
            b = static_cast<std::size_t>(bins); // overflow bin
        } else {
            b = static_cast<std::size_t>(x / x_max * bins);
            if (b >= static_cast<std::size_t>(bins)) b = static_cast<std::size_t>(bins) - 1;
        }
        h.counts[b] += 1.0;
        h.total += 1.0;
    }
}

inline Histogram pt_histogram(const ProbabilityDistribution& dist, int bins = 32, double x_max = 8.0) {
    Histogram h = make_pt_histogram(bins, x_max);
    pt_accumulate(h, dist);
    return h;
}

/// Porter-Thomas reference mass per bin: integral of e^{-x} over the bin,
/// overflow bin integrating to infinity.  Sums to 1 over all bins.
inline std::vector<double> pt_reference_mass(const Histogram& h) {
    std::vector<double> q(h.counts.size());
    for (int b = 0; b < h.bins(); ++b)
        q[static_cast<std::size_t>(b)] = std::exp(-h.edges[static_cast<std::size_t>(b)]) -
                                         std::exp(-h.edges[static_cast<std::size_t>(b) + 1]);
    q.back() = std::exp(-h.edges.back());
    return q;
}

/// KL divergence (nats) of the histogram's empirical bin frequencies from
/// the Porter-Thomas law e^{-x}.
inline double kl_to_porter_thomas(const Histogram& h) {
    if (h.total <= 0.0) throw ConfigError("kl_to_porter_thomas: empty histogram");
    const std::vector<double> q = pt_reference_mass(h);
    double kl = 0.0;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double f = h.counts[b] / h.total;
        if (f > 0.0) kl += f * std::log(f / q[b]);
    }
    return kl;
}

/// Porter-Thomas ensemble entropy: ln(D) - 1 + gamma.
inline double porter_thomas_entropy(std::size_t n_states) {
    constexpr double euler_gamma = 0.57721566490153286060651209;
    return std::log(static_cast<double>(n_states)) - 1.0 + euler_gamma;
}

/// Kullback-Leibler divergence between output statistics at two times,
/// S(t0,t) = -sum_z p_z(t0) ln(p_z(t)/p_z(t0)).  Vanishes at t = t0.
inline double time_cross_entropy(const ProbabilityDistribution& at_t0,
                                 const ProbabilityDistribution& at_t) {
    at_t0.check_compatible(at_t);
    double s = 0.0;
    for (std::size_t i = 0; i < at_t0.p.size(); ++i) {
        const double p0 = at_t0.p[i];
        if (p0 == 0.0) continue;
        if (at_t.p[i] <= 0.0) throw ConfigError("time_cross_entropy: zero probability at t where t0 has support");
        s -= p0 * std::log(at_t.p[i] / p0);
    }
    return s;
}

/// Ensemble-average limit of S(t0,t) for fully uncorrelated statistics:
/// -sum_z ( <p_z(t0)> <ln p_z(t)> - <p_z(t0) ln p_z(t0)> ).
inline double uncorrelated_baseline(const std::vector<ProbabilityDistribution>& ens_t0,
                                    const std::vector<ProbabilityDistribution>& ens_t) {
    if (ens_t0.empty() || ens_t0.size() != ens_t.size())
        throw ConfigError("uncorrelated_baseline: need matched non-empty ensembles");
    const std::size_t n = ens_t0.front().p.size();
    const double m = static_cast<double>(ens_t0.size());
    std::vector<double> mean_p0(n, 0.0), mean_logt(n, 0.0), mean_p0log0(n, 0.0);
    for (std::size_t e = 0; e < ens_t0.size(); ++e) {
        if (ens_t0[e].p.size() != n || ens_t[e].p.size() != n)
            throw ConfigError("uncorrelated_baseline: support mismatch inside ensemble");
        for (std::size_t z = 0; z < n; ++z) {
            const double p0 = ens_t0[e].p[z];
            const double pt = ens_t[e].p[z];
            if (pt <= 0.0 || p0 <= 0.0)
                throw ConfigError("uncorrelated_baseline: probabilities must be strictly positive");
            mean_p0[z] += p0 / m;
            mean_logt[z] += std::log(pt) / m;
            mean_p0log0[z] += p0 * std::log(p0) / m;
        }
    }
    double s = 0.0;
    for (std::size_t z = 0; z < n; ++z) s -= mean_p0[z] * mean_logt[z] - mean_p0log0[z];
    return s;
}

/// Bipartite entanglement entropy across the cut after site `cut-1`
/// (1 <= cut <= N-1): -sum lambda^2 ln lambda^2 over all Schmidt values.
/// The state embeds block-diagonally over the left excitation count, so one
/// SVD per block suffices.
inline double entanglement_entropy(const StateVector& psi, int cut) {
    if (!psi.basis) throw ConfigError("entanglement_entropy: state has no basis");
    const Basis& b = *psi.basis;
    if (cut < 1 || cut > b.sites - 1) throw ConfigError("entanglement_entropy: cut out of range");

    struct Block {
        std::map<std::uint64_t, int> left, right;
        std::vector<std::tuple<int, int, cplx>> entries;
    };
    std::map<int, Block> blocks; // keyed by left excitation count
    for (std::size_t s = 0; s < b.dim(); ++s) {
        if (psi.amp[s] == cplx(0.0, 0.0)) continue;
        const OccupationVector& n = b.state(s);
        int k_left = 0;
        std::uint64_t lkey = 0, rkey = 0;
        for (int i = 0; i < cut; ++i) {
            k_left += n[i];
            lkey = lkey * 16 + n[i];
        }
        for (int i = cut; i < b.sites; ++i) rkey = rkey * 16 + n[i];
        Block& blk = blocks[k_left];
        const auto li = blk.left.emplace(lkey, static_cast<int>(blk.left.size())).first;
        const auto ri = blk.right.emplace(rkey, static_cast<int>(blk.right.size())).first;
        blk.entries.emplace_back(li->second, ri->second, psi.amp[s]);
    }

    double s_ent = 0.0;
    for (auto& [k, blk] : blocks) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(blk.left.size()),
                                                    static_cast<Eigen::Index>(blk.right.size()));
        for (const auto& [r, c, a] : blk.entries) m(r, c) = a;
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
            const double w = svd.singularValues()[i] * svd.singularValues()[i];
            if (w > 1e-300) s_ent -= w * std::log(w);
        }
    }
    return s_ent;
}

/// Connected bit-bit correlators |C_ij| averaged over all pairs at fixed
/// separation and over the supplied distributions (instances x cycles).
struct CorrelationCurve {
    std::vector<double> separation;  // d = 1 .. N-1
    std::vector<double> mean_abs_c;  // average |C_ij| at that separation
};

inline CorrelationCurve two_body_correlations(const std::vector<ProbabilityDistribution>& ensemble) {
    if (ensemble.empty()) throw ConfigError("two_body_correlations: empty ensemble");
    const int sites = ensemble.front().sites;
    CorrelationCurve curve;
    curve.separation.resize(static_cast<std::size_t>(sites) - 1);
    curve.mean_abs_c.assign(static_cast<std::size_t>(sites) - 1, 0.0);
    std::vector<double> weight(static_cast<std::size_t>(sites) - 1, 0.0);

    std::vector<double> zi(static_cast<std::size_t>(sites));
    std::vector<double> zij(static_cast<std::size_t>(sites * sites));
    for (const ProbabilityDistribution& d : ensemble) {
        if (d.sites != sites) throw ConfigError("two_body_correlations: mixed system sizes");
        std::fill(zi.begin(), zi.end(), 0.0);
        std::fill(zij.begin(), zij.end(), 0.0);
        for (std::size_t s = 0; s < d.p.size(); ++s) {
            const std::uint64_t z = d.labels[s];
            const double p = d.p[s];
            for (int i = 0; i < sites; ++i) {
                if (!(z >> i & 1)) continue;
                zi[static_cast<std::size_t>(i)] += p;
                for (int j = i + 1; j < sites; ++j)
                    if (z >> j & 1) zij[static_cast<std::size_t>(i * sites + j)] += p;
            }
        }
        for (int i = 0; i < sites; ++i) {
            for (int j = i + 1; j < sites; ++j) {
                const double c = zij[static_cast<std::size_t>(i * sites + j)] -
                                 zi[static_cast<std::size_t>(i)] * zi[static_cast<std::size_t>(j)];
                const std::size_t dsep = static_cast<std::size_t>(j - i) - 1;
                curve.mean_abs_c[dsep] += std::abs(c);
                weight[dsep] += 1.0;
            }
        }
    }
    for (std::size_t d = 0; d + 1 < static_cast<std::size_t>(sites); ++d) {
        curve.separation[d] = static_cast<double>(d + 1);
        curve.mean_abs_c[d] /= weight[d];
    }
    return curve;
}

/// Correlation length from the least-squares fit ln C(d) = -d/xi + const.
inline double correlation_length(const CorrelationCurve& curve) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < curve.separation.size(); ++i) {
        if (curve.mean_abs_c[i] > 0.0) {
            xs.push_back(curve.separation[i]);
            ys.push_back(std::log(curve.mean_abs_c[i]));
        }
    }
    if (xs.size() < 3) throw ConfigError("correlation_length: need at least 3 separations");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (slope >= 0.0) return std::numeric_limits<double>::infinity(); // no decay
    return -1.0 / slope;
}

} // namespace gmonsim

#endif
