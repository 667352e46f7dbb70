#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <vector>

// Frequency-domain Rayleigh channel: y_n = s_n h_n + w_n with h ~ CN(0,1)
// and w ~ CN(0,N0), i.i.d. per subcarrier (ideal interleaving). All
// randomness flows through an explicit seedable generator so that any
// simulation output is a pure function of (config, seed): xoshiro256++
// uniforms, ziggurat normals, splitmix64 for seeding and stream derivation.

namespace mdsmod {

namespace rng {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct SplitMix64 {
    std::uint64_t state = 0;
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        return splitmix64_mix(state);
    }
};

// Deterministic substream seeds from (master seed, indices).
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t p : parts)
        h = splitmix64_mix(h + 0x9e3779b97f4a7c15ULL + p * 0xd1342543de82ef95ULL);
    return h;
}

class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_{};
};

// 128-block ziggurat for the standard normal (Doornik's ZIGNOR layout).
struct ZigguratTables {
    static constexpr int kBlocks = 128;
    static constexpr double kR = 3.442619855899;
    static constexpr double kV = 9.91256303526217e-3;
    std::array<double, kBlocks + 1> x{};
    std::array<double, kBlocks> ratio{};

    ZigguratTables() {
        x[0] = kV / std::exp(-0.5 * kR * kR);
        x[1] = kR;
        x[kBlocks] = 0.0;
        for (int i = 2; i < kBlocks; ++i) {
            const double prev = x[i - 1];
            x[i] = std::sqrt(-2.0 * std::log(kV / prev + std::exp(-0.5 * prev * prev)));
        }
        for (int i = 0; i < kBlocks; ++i) ratio[i] = x[i + 1] / x[i];
    }

    static const ZigguratTables& instance() {
        static const ZigguratTables t;
        return t;
    }
};

class GaussianSource {
  public:
    explicit GaussianSource(std::uint64_t seed)
        : gen_(seed), zt_(&ZigguratTables::instance()) {}

    std::uint64_t bits() { return gen_.next(); }
    double uniform01() { return gen_.uniform01(); }

    double normal() {
        for (;;) {
            const std::uint64_t w = gen_.next();
            const int i = static_cast<int>(w & 127u);
            // signed 53-bit mantissa -> u in (-1, 1); index bits stay disjoint
            const double u = static_cast<double>(static_cast<std::int64_t>(w) >> 11) * 0x1.0p-52;
            if (std::abs(u) < zt_->ratio[i]) return u * zt_->x[i];
            const double r = normal_slow(i, std::abs(u), u < 0.0);
            if (r == r) return r;  // NaN marks a wedge rejection
        }
    }

    // Circularly symmetric complex Gaussian with the given total variance.
    std::complex<double> cnormal(double variance = 1.0) {
        const double sd = std::sqrt(0.5 * variance);
        return {sd * normal(), sd * normal()};
    }

  private:
    // Tail and wedge handling, kept out of the hot path.
    double normal_slow(int i, double u, bool neg) {
        if (i == 0) {
            double x, y;
            do {
                x = -std::log(gen_.uniform01()) / ZigguratTables::kR;
                y = -std::log(gen_.uniform01());
            } while (y + y < x * x);
            const double v = ZigguratTables::kR + x;
            return neg ? -v : v;
        }
        const double x = u * zt_->x[i];
        const double f0 = std::exp(-0.5 * (zt_->x[i] * zt_->x[i] - x * x));
        const double f1 = std::exp(-0.5 * (zt_->x[i + 1] * zt_->x[i + 1] - x * x));
        if (f1 + gen_.uniform01() * (f0 - f1) < 1.0) return neg ? -x : x;
        return std::numeric_limits<double>::quiet_NaN();
    }

    Xoshiro256pp gen_;
    const ZigguratTables* zt_;
};

}  // namespace rng

struct NoiseParams {
    double snr_db = 0.0;
    double n0() const { return std::pow(10.0, -snr_db / 10.0); }
    double gamma() const { return std::pow(10.0, snr_db / 10.0); }
};

inline std::vector<std::complex<double>> sample_realization(rng::GaussianSource& src, int n) {
    if (n < 1) throw std::invalid_argument("sample_realization: n must be >= 1");
    std::vector<std::complex<double>> h(static_cast<std::size_t>(n));
    for (auto& v : h) v = src.cnormal(1.0);
    return h;
}

inline std::vector<std::complex<double>> sample_noise(rng::GaussianSource& src, int n, double n0) {
    if (n < 1) throw std::invalid_argument("sample_noise: n must be >= 1");
    if (!(n0 > 0.0)) throw std::invalid_argument("sample_noise: N0 must be positive");
    std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
    for (auto& v : w) v = src.cnormal(n0);
    return w;
}

inline std::vector<std::complex<double>> apply_channel(
    const std::vector<std::complex<double>>& s, const std::vector<std::complex<double>>& h,
    const std::vector<std::complex<double>>& noise) {
    if (s.size() != h.size() || s.size() != noise.size())
        throw std::invalid_argument("apply_channel: length mismatch");
    std::vector<std::complex<double>> y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) y[i] = s[i] * h[i] + noise[i];
    return y;
}

}  // namespace mdsmod
