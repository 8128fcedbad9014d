#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>

namespace scengen {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;

/// Input with a malformed or incompatible on-disk format.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Inconsistent or unusable configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A generation request that cannot be satisfied within its retry budget.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic random stream. All randomness in the project flows through
/// this class so that a run is fully reproducible from one master seed; child
/// streams are derived by name rather than by sharing state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(splitmix64(seed)) {}

    /// Independent stream for (phase, index) — never shares state with the parent.
    Rng derive(std::uint64_t phase, std::uint64_t index = 0) const {
        return Rng(splitmix64(seed_ ^ splitmix64(phase ^ splitmix64(index))));
    }

    std::uint64_t next_u64() {
        // xorshift* step over splitmix-initialized state
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dULL;
    }

    /// Uniform in [0, 1).
    Scalar uniform() { return static_cast<Scalar>(next_u64() >> 11) * 0x1.0p-53; }

    Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        if (hi <= lo) return lo;
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    /// Standard normal via Box-Muller (pairs cached).
    Scalar normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        Scalar u1 = 1.0 - uniform();  // (0, 1]
        Scalar u2 = uniform();
        Scalar r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * M_PI * u2);
        has_cached_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    Scalar cached_ = 0.0;
    bool has_cached_ = false;
};

/// FNV-1a over the byte image of a vector; used to derive per-evaluation seeds.
inline std::uint64_t hash_vector(const Vector& v) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        Scalar x = v[i];
        unsigned char bytes[sizeof(Scalar)];
        std::memcpy(bytes, &x, sizeof(Scalar));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

}  // namespace scengen
