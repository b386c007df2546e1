#ifndef GMONSIM_INSTANCE_HPP
#define GMONSIM_INSTANCE_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "gmonsim/errors.hpp"
#include "gmonsim/rng.hpp"

namespace gmonsim {

constexpr double two_pi = 6.283185307179586476925286766559;

/// MHz (ordinary frequency) to rad/s.
inline double mhz_to_rad(double mhz) { return two_pi * 1e6 * mhz; }
inline double rad_to_mhz(double rad) { return rad / (two_pi * 1e6); }
inline double ns_to_s(double ns) { return ns * 1e-9; }

enum class EnvelopeKind { Square, SinSquared, Trapezoid };

inline std::string envelope_name(EnvelopeKind k) {
    switch (k) {
        case EnvelopeKind::Square: return "square";
        case EnvelopeKind::SinSquared: return "sin2";
        case EnvelopeKind::Trapezoid: return "trapezoid";
    }
    return "?";
}

inline EnvelopeKind parse_envelope(const std::string& s) {
    if (s == "square") return EnvelopeKind::Square;
    if (s == "sin2") return EnvelopeKind::SinSquared;
    if (s == "trapezoid") return EnvelopeKind::Trapezoid;
    throw ConfigError("unknown envelope kind: " + s);
}

/// Coupler pulse shape g(t) on one cycle, 0 <= t <= T_pulse.  The default
/// sin^2 ramps smoothly from zero to g_max and back to zero.
inline double coupling_envelope(double t, double T_pulse, double g_max,
                                EnvelopeKind kind = EnvelopeKind::SinSquared,
                                double ramp_fraction = 0.25) {
    if (T_pulse <= 0.0) throw ConfigError("coupling_envelope: pulse duration must be positive");
    if (t < 0.0 || t > T_pulse) return 0.0;
    switch (kind) {
        case EnvelopeKind::Square: return g_max;
        case EnvelopeKind::SinSquared: {
            const double s = std::sin(0.5 * two_pi * t / T_pulse);
            return g_max * s * s;
        }
        case EnvelopeKind::Trapezoid: {
            const double r = ramp_fraction * T_pulse;
            if (t < r) return g_max * (t / r);
            if (t > T_pulse - r) return g_max * ((T_pulse - t) / r);
            return g_max;
        }
    }
    return 0.0;
}

/// Per-cycle coupler pulses: durations and per-bond peak couplings.
struct PulseSchedule {
    std::vector<double> T_pulse;             // seconds, one entry per cycle
    std::vector<std::vector<double>> g_max;  // [cycle][bond], rad/s
    EnvelopeKind envelope = EnvelopeKind::SinSquared;

    int cycles() const { return static_cast<int>(T_pulse.size()); }

    double total_time() const { return std::accumulate(T_pulse.begin(), T_pulse.end(), 0.0); }

    /// Cycle containing absolute time t and the local time within it.
    /// Times past the schedule end clamp to the last cycle's endpoint.
    std::pair<int, double> locate(double t) const {
        double acc = 0.0;
        for (int c = 0; c < cycles(); ++c) {
            const double next = acc + T_pulse[static_cast<std::size_t>(c)];
            if (t <= next || c == cycles() - 1)
                return {c, std::min(t - acc, T_pulse[static_cast<std::size_t>(c)])};
            acc = next;
        }
        return {0, 0.0};
    }

    void validate(int sites) const {
        if (cycles() == 0) throw ConfigError("PulseSchedule: need at least one cycle");
        for (double T : T_pulse)
            if (!(T > 0.0)) throw ConfigError("PulseSchedule: pulse durations must be positive");
        if (g_max.size() != T_pulse.size())
            throw ConfigError("PulseSchedule: g_max must have one row per cycle");
        for (const auto& row : g_max)
            if (static_cast<int>(row.size()) != sites - 1)
                throw ConfigError("PulseSchedule: need one g_max per bond");
    }
};

/// One random protocol instance: detunings, anharmonicities, pulse schedule.
/// All frequencies are angular (rad/s), all times seconds.
struct InstanceParams {
    int sites = 0;
    std::vector<double> delta; // site detunings, rad/s
    std::vector<double> eta;   // anharmonicities, rad/s (negative for transmons)
    PulseSchedule pulses;
    std::uint64_t seed = 0;

    int bonds() const { return sites - 1; }
    double total_time() const { return pulses.total_time(); }

    /// g_{b,b+1}(t) with the envelope applied.
    double coupling(int bond, double t) const {
        const auto [cycle, local] = pulses.locate(t);
        return coupling_envelope(local, pulses.T_pulse[static_cast<std::size_t>(cycle)],
                                 pulses.g_max[static_cast<std::size_t>(cycle)][static_cast<std::size_t>(bond)],
                                 pulses.envelope);
    }

    void validate() const {
        if (sites < 1) throw ConfigError("InstanceParams: need at least one site");
        if (static_cast<int>(delta.size()) != sites || static_cast<int>(eta.size()) != sites)
            throw ConfigError("InstanceParams: delta and eta must have one entry per site");
        if (sites > 1) pulses.validate(sites);
    }
};

/// Ranges for drawing a random instance.  Frequencies in MHz, durations in
/// ns; conversion to angular units happens at sampling time.
struct InstanceConfig {
    int sites = 0;
    double delta_half_range_mhz = 5.0;   // delta_i uniform in +-range
    double eta_mhz = -200.0;             // constant anharmonicity
    int cycles = 1;
    double t_pulse_lo_ns = 42.0;
    double t_pulse_hi_ns = 72.0;
    double g_max_lo_mhz = 22.4;          // g/2pi
    double g_max_hi_mhz = 38.4;
    bool per_bond_g = false;             // default: all bonds share one g per cycle
    EnvelopeKind envelope = EnvelopeKind::SinSquared;

    void validate() const {
        if (sites < 1) throw ConfigError("InstanceConfig: need at least one site");
        if (cycles < 1) throw ConfigError("InstanceConfig: need at least one cycle");
        if (t_pulse_lo_ns <= 0.0 || t_pulse_hi_ns < t_pulse_lo_ns)
            throw ConfigError("InstanceConfig: pulse duration range must be positive and ordered");
        if (g_max_hi_mhz < g_max_lo_mhz)
            throw ConfigError("InstanceConfig: coupling range must be ordered");
        if (delta_half_range_mhz < 0.0)
            throw ConfigError("InstanceConfig: disorder range must be non-negative");
    }
};

/// Deterministic draw: the same (config, seed) always yields the same
/// instance.  Streams are split per quantity so adding sites or cycles does
/// not shift unrelated draws.
inline InstanceParams sample_instance(const InstanceConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    SplitRng root(seed);
    InstanceParams inst;
    inst.sites = cfg.sites;
    inst.seed = seed;
    inst.delta.resize(static_cast<std::size_t>(cfg.sites));
    inst.eta.assign(static_cast<std::size_t>(cfg.sites), mhz_to_rad(cfg.eta_mhz));
    {
        SplitRng r = root.split(1);
        for (int i = 0; i < cfg.sites; ++i) {
            const double u = r.split(static_cast<std::uint64_t>(i)).next_double();
            inst.delta[static_cast<std::size_t>(i)] =
                mhz_to_rad(cfg.delta_half_range_mhz * (2.0 * u - 1.0));
        }
    }
    inst.pulses.envelope = cfg.envelope;
    inst.pulses.T_pulse.resize(static_cast<std::size_t>(cfg.cycles));
    inst.pulses.g_max.assign(static_cast<std::size_t>(cfg.cycles),
                             std::vector<double>(static_cast<std::size_t>(std::max(0, cfg.sites - 1))));
    {
        SplitRng rt = root.split(2);
        SplitRng rg = root.split(3);
        for (int c = 0; c < cfg.cycles; ++c) {
            inst.pulses.T_pulse[static_cast<std::size_t>(c)] = ns_to_s(
                rt.split(static_cast<std::uint64_t>(c)).uniform(cfg.t_pulse_lo_ns, cfg.t_pulse_hi_ns));
            SplitRng rc = rg.split(static_cast<std::uint64_t>(c));
            const double shared = rc.uniform(cfg.g_max_lo_mhz, cfg.g_max_hi_mhz);
            for (int b = 0; b + 1 < cfg.sites; ++b) {
                const double mhz =
                    cfg.per_bond_g
                        ? rc.split(static_cast<std::uint64_t>(b)).uniform(cfg.g_max_lo_mhz, cfg.g_max_hi_mhz)
                        : shared;
                inst.pulses.g_max[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)] =
                    mhz_to_rad(mhz);
            }
        }
    }
    if (cfg.sites > 1) inst.validate();
    return inst;
}

} // namespace gmonsim

#endif
