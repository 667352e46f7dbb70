#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mdsmod/channel.hpp"
#include "mdsmod/modem.hpp"
#include "mdsmod/parallel.hpp"

// Closed-form performance analysis.
//
// The unconditional pairwise error probability uses the two-exponential
// Q-function approximation averaged over i.i.d. Rayleigh taps, which
// collapses the determinants to products over per-subcarrier squared
// differences. The union bound sums PEP times bit distance over all ordered
// codeword pairs. The achievable-rate estimator Monte-Carlos the standard
// equiprobable-input mutual-information lower bound with log-sum-exp
// stabilization and common random numbers across the SNR sweep.

namespace mdsmod {

struct PairStats {
    std::size_t i = 0;
    std::size_t j = 0;
    std::vector<double> sq_diffs;  // |s_i(n) - s_j(n)|^2 per subcarrier
    int bit_distance = 0;          // Hamming distance of the bit patterns
};

inline PairStats make_pair_stats(const Codebook& cb, std::size_t i, std::size_t j) {
    if (i >= cb.size() || j >= cb.size())
        throw std::invalid_argument("make_pair_stats: index out of range");
    PairStats ps;
    ps.i = i;
    ps.j = j;
    auto si = cb.symbol(i);
    auto sj = cb.symbol(j);
    ps.sq_diffs.resize(si.size());
    for (std::size_t n = 0; n < si.size(); ++n) ps.sq_diffs[n] = std::norm(si[n] - sj[n]);
    ps.bit_distance = std::popcount(static_cast<std::uint64_t>(i) ^ static_cast<std::uint64_t>(j));
    return ps;
}

inline double pep_unconditional(std::span<const double> sq_diffs, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("pep_unconditional: gamma must be >= 0");
    double p4 = 1.0, p3 = 1.0;
    for (double d : sq_diffs) {
        p4 *= 1.0 + gamma * d / 4.0;
        p3 *= 1.0 + gamma * d / 3.0;
    }
    return (1.0 / 12.0) / p4 + 0.25 / p3;
}

inline double pep_unconditional(const PairStats& pair, double gamma) {
    return pep_unconditional(std::span<const double>(pair.sq_diffs), gamma);
}

inline constexpr int kUnionBoundMaxF = 14;

// Union bound on BER at each of the given SNRs (as linear gamma values).
inline std::vector<double> union_bound_ber_gamma(const Codebook& cb,
                                                 std::span<const double> gammas, int threads = 1) {
    const int f = cb.layout.f;
    if (f > kUnionBoundMaxF)
        throw unsupported_config_error("union_bound_ber: f = " + std::to_string(f) +
                                       " exceeds the exhaustive-sum limit " +
                                       std::to_string(kUnionBoundMaxF));
    for (double g : gammas)
        if (g < 0.0) throw std::invalid_argument("union_bound_ber: gamma must be >= 0");
    const std::size_t size = cb.size();
    const std::size_t n = static_cast<std::size_t>(cb.n);
    constexpr std::size_t kRowsPerBlock = 64;
    const std::uint64_t blocks = (size + kRowsPerBlock - 1) / kRowsPerBlock;

    auto block_sum = [&](std::uint64_t b) {
        std::vector<double> acc(gammas.size(), 0.0);
        const std::size_t lo = static_cast<std::size_t>(b) * kRowsPerBlock;
        const std::size_t hi = std::min(size, lo + kRowsPerBlock);
        std::vector<double> diffs(n);
        for (std::size_t i = lo; i < hi; ++i) {
            auto si = cb.symbol(i);
            for (std::size_t j = i + 1; j < size; ++j) {
                auto sj = cb.symbol(j);
                for (std::size_t t = 0; t < n; ++t) diffs[t] = std::norm(si[t] - sj[t]);
                const double dist = std::popcount(i ^ j);
                for (std::size_t gi = 0; gi < gammas.size(); ++gi)
                    acc[gi] += 2.0 * dist * pep_unconditional(std::span<const double>(diffs), gammas[gi]);
            }
        }
        return acc;
    };

    auto partials = parallel_map_blocks<std::vector<double>>(blocks, threads, block_sum);
    std::vector<double> out(gammas.size(), 0.0);
    for (const auto& part : partials)
        for (std::size_t gi = 0; gi < gammas.size(); ++gi) out[gi] += part[gi];
    const double scale = 1.0 / (static_cast<double>(f) * std::ldexp(1.0, f));
    for (auto& v : out) v *= scale;
    return out;
}

inline double union_bound_ber(const Codebook& cb, double gamma, int threads = 1) {
    return union_bound_ber_gamma(cb, std::span<const double>(&gamma, 1), threads)[0];
}

struct RatePoint {
    double snr_db = 0.0;
    double rate_bps = 0.0;
    double stderr_bps = 0.0;
    std::uint64_t samples = 0;
};

inline constexpr int kRateMaxF = 12;

// Monte-Carlo achievable rate (bits per subcarrier) across an SNR sweep.
// Sample s draws one (h, w) pair reused at every SNR (common random numbers).
inline std::vector<RatePoint> achievable_rate_sweep(const Codebook& cb,
                                                    const std::vector<double>& snr_db,
                                                    std::uint64_t samples, std::uint64_t seed,
                                                    int threads = 1) {
    const int f = cb.layout.f;
    if (f > kRateMaxF)
        throw unsupported_config_error("achievable_rate: f = " + std::to_string(f) +
                                       " exceeds the enumeration limit " +
                                       std::to_string(kRateMaxF));
    if (samples < 1) throw std::invalid_argument("achievable_rate: samples must be >= 1");
    const std::size_t size = cb.size();
    const std::size_t n = static_cast<std::size_t>(cb.n);
    std::vector<double> n0(snr_db.size());
    for (std::size_t gi = 0; gi < snr_db.size(); ++gi) n0[gi] = NoiseParams{snr_db[gi]}.n0();

    constexpr std::uint64_t kSamplesPerBlock = 16;
    const std::uint64_t blocks = (samples + kSamplesPerBlock - 1) / kSamplesPerBlock;

    struct Partial {
        std::vector<double> sum, sumsq;
    };
    auto block_fn = [&](std::uint64_t b) {
        Partial part{std::vector<double>(snr_db.size(), 0.0), std::vector<double>(snr_db.size(), 0.0)};
        std::vector<std::complex<double>> h(n), w(n);
        std::vector<std::complex<double>> z(size * n);
        std::vector<double> d2(size), cross(size), lam(size), sum_l(snr_db.size());
        const std::uint64_t lo = b * kSamplesPerBlock;
        const std::uint64_t hi = std::min<std::uint64_t>(samples, lo + kSamplesPerBlock);
        for (std::uint64_t s = lo; s < hi; ++s) {
            rng::GaussianSource src(rng::derive_seed({seed, 0x72617465ULL, s}));
            for (auto& v : h) v = src.cnormal(1.0);
            for (auto& v : w) v = src.cnormal(1.0);
            for (std::size_t j = 0; j < size; ++j) {
                auto sj = cb.symbol(j);
                for (std::size_t t = 0; t < n; ++t) z[j * n + t] = sj[t] * h[t];
            }
            std::fill(sum_l.begin(), sum_l.end(), 0.0);
            for (std::size_t i = 0; i < size; ++i) {
                for (std::size_t j = 0; j < size; ++j) {
                    double dd = 0.0, cc = 0.0;
                    for (std::size_t t = 0; t < n; ++t) {
                        const std::complex<double> diff = z[i * n + t] - z[j * n + t];
                        dd += std::norm(diff);
                        cc += diff.real() * w[t].real() + diff.imag() * w[t].imag();
                    }
                    d2[j] = dd;
                    cross[j] = cc;
                }
                for (std::size_t gi = 0; gi < snr_db.size(); ++gi) {
                    const double inv_n0 = 1.0 / n0[gi];
                    const double inv_sqrt_n0 = 1.0 / std::sqrt(n0[gi]);
                    double mx = 0.0;  // lambda(i,i) == 0 is always present
                    for (std::size_t j = 0; j < size; ++j) {
                        lam[j] = -d2[j] * inv_n0 - 2.0 * cross[j] * inv_sqrt_n0;
                        if (lam[j] > mx) mx = lam[j];
                    }
                    double acc = 0.0;
                    for (std::size_t j = 0; j < size; ++j) acc += std::exp(lam[j] - mx);
                    sum_l[gi] += (mx + std::log(acc)) / std::numbers::ln2;
                }
            }
            for (std::size_t gi = 0; gi < snr_db.size(); ++gi) {
                const double r = (f - sum_l[gi] / static_cast<double>(size)) / static_cast<double>(n);
                part.sum[gi] += r;
                part.sumsq[gi] += r * r;
            }
        }
        return part;
    };

    auto partials = parallel_map_blocks<Partial>(blocks, threads, block_fn);
    std::vector<RatePoint> out(snr_db.size());
    for (std::size_t gi = 0; gi < snr_db.size(); ++gi) {
        double sum = 0.0, sumsq = 0.0;
        for (const auto& p : partials) {
            sum += p.sum[gi];
            sumsq += p.sumsq[gi];
        }
        const double count = static_cast<double>(samples);
        const double mean = sum / count;
        double se = 0.0;
        if (samples > 1) {
            const double var = std::max(0.0, (sumsq - count * mean * mean) / (count - 1.0));
            se = std::sqrt(var / count);
        }
        const double cap = static_cast<double>(f) / static_cast<double>(n);
        out[gi] = {snr_db[gi], std::clamp(mean, 0.0, cap), se, samples};
    }
    return out;
}

inline double achievable_rate(const Codebook& cb, double snr_db, std::uint64_t samples,
                              std::uint64_t seed, int threads = 1) {
    return achievable_rate_sweep(cb, {snr_db}, samples, seed, threads)[0].rate_bps;
}

// Per-bit decoding complexity at matched spectral efficiency
// eta = log2(N!)/N + log2(M).
inline void check_complexity_args(int n, int m) {
    if (n < 2 || m < 1) throw std::invalid_argument("complexity: need N >= 2, M >= 1");
}

inline double matched_se(int n, int m) {
    check_complexity_args(n, m);
    return std::lgamma(n + 1.0) / std::numbers::ln2 / n + std::log2(static_cast<double>(m));
}

inline double zeta_mds_apm(int n, int m) {
    check_complexity_args(n, m);
    const double kp = std::exp(std::lgamma(n + 1.0) / (n - 1.0));  // (N!)^(1/(N-1))
    return (kp * m * (1.0 - 1.0 / n) + static_cast<double>(m) / n) / matched_se(n, m);
}

inline double zeta_mm_ofdm_im(int n, int m) {
    check_complexity_args(n, m);
    return (static_cast<double>(m) * n / 2.0 + m / 2.0) / matched_se(n, m);
}

inline double zeta_ofdm_im(int n, int m) {
    check_complexity_args(n, m);
    const double c = std::exp((n * std::log(static_cast<double>(m)) + std::lgamma(static_cast<double>(n))) /
                              (n - 1.0));  // (M^N (N-1)!)^(1/(N-1))
    return c / matched_se(n, m);
}

inline double zeta_ofdm(int n, int m) {
    const double eta = matched_se(n, m);
    return std::exp2(eta) / eta;  // ML over the matched 2^eta-ary constellation
}

// Large-N forms under the matching KPM = M2 N / e.
inline double zeta_mds_apm_asymptotic(int n, int m2) {
    check_complexity_args(n, m2);
    const double x = static_cast<double>(m2) * n / std::numbers::e;  // = KPM
    return x / std::log2(x);
}

inline double zeta_mm_ofdm_im_asymptotic(int n, int m2) {
    check_complexity_args(n, m2);
    const double x = static_cast<double>(m2) * n / std::numbers::e;
    return static_cast<double>(m2) * n / (2.0 * std::log2(x));
}

}  // namespace mdsmod
