#ifndef GMONSIM_RNG_HPP
#define GMONSIM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace gmonsim {

/// One round of the splitmix64 output function.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Counter-based deterministic generator.  Every consumer derives its own
/// stream with split(), so the draw order of one component never perturbs
/// another.  Identical (seed, stream path) gives bit-identical draws on any
/// platform with IEEE doubles; no libstdc++ distributions are involved.
class SplitRng {
  public:
    explicit SplitRng(std::uint64_t seed) : state_(splitmix64_mix(seed ^ 0x6a09e667f3bcc909ull)) {}

    /// Derive an independent child stream; does not advance this generator.
    SplitRng split(std::uint64_t stream) const {
        SplitRng child(0);
        child.state_ = splitmix64_mix(state_ ^ splitmix64_mix(stream ^ 0xbb67ae8584caa73bull));
        return child;
    }

    SplitRng split(std::uint64_t a, std::uint64_t b) const { return split(a).split(b); }

    std::uint64_t next_u64() {
        state_ = splitmix64_mix(state_);
        return state_;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Standard normal via Box-Muller (one value per call, pair cached).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace gmonsim

#endif
