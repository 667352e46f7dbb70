#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

// Constellation geometry for the two MDS-coded schemes.
//
// APM: K concentric rings (radius sqrt(2k/(K+1)), so mean point energy is 1)
// carrying P disjoint phase sets of M phases each. Set p is an M-PSK grid
// rotated by 2*pi*(p-1)/(M*P); ring k is optionally rotated by a further
// (k-1)*pi/(P*M) so consecutive rings interleave.
//
// IQM: in-phase and quadrature components drawn from R (resp. T) disjoint
// M-ary PAM sets obtained by round-robin interleaving of one composite
// RM-ary (TM-ary) PAM alphabet with mean energy E_T/2 per component.

namespace mdsmod {

struct ApmConstellation {
    int K = 1;
    int P = 1;
    int M = 1;
    bool ring_rotation = true;
    std::vector<double> ring_radii;

    double ring_rotation_angle(int k) const {
        return ring_rotation ? (k - 1) * std::numbers::pi / (static_cast<double>(P) * M) : 0.0;
    }

    // k in 1..K, p in 1..P, m in 0..M-1
    std::complex<double> point(int k, int p, int m) const {
        if (k < 1 || k > K || p < 1 || p > P || m < 0 || m >= M)
            throw std::invalid_argument("ApmConstellation::point: index out of range");
        const double angle = 2.0 * std::numbers::pi * m / M +
                             2.0 * std::numbers::pi * (p - 1) / (static_cast<double>(M) * P) +
                             ring_rotation_angle(k);
        return std::polar(ring_radii[static_cast<std::size_t>(k - 1)], angle);
    }

    // Lexicographic (k, p, m) order; this is also the detector tie-break order.
    std::vector<std::complex<double>> all_points() const {
        std::vector<std::complex<double>> pts;
        pts.reserve(static_cast<std::size_t>(K) * P * M);
        for (int k = 1; k <= K; ++k)
            for (int p = 1; p <= P; ++p)
                for (int m = 0; m < M; ++m) pts.push_back(point(k, p, m));
        return pts;
    }
};

inline ApmConstellation build_apm(int K, int P, int M, bool ring_rotation = true) {
    if (K < 1 || P < 1 || M < 1)
        throw std::invalid_argument("build_apm: K, P, M must all be >= 1");
    ApmConstellation c;
    c.K = K;
    c.P = P;
    c.M = M;
    c.ring_rotation = ring_rotation;
    c.ring_radii.resize(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k)
        c.ring_radii[static_cast<std::size_t>(k - 1)] = std::sqrt(2.0 * k / (K + 1.0));
    return c;
}

// Ascending symmetric L-ary PAM with the requested mean energy.
inline std::vector<double> pam_levels(int levels, double mean_energy) {
    if (levels < 1) throw std::invalid_argument("pam_levels: levels must be >= 1");
    std::vector<double> x(static_cast<std::size_t>(levels));
    if (levels == 1) {
        x[0] = std::sqrt(mean_energy);
        return x;
    }
    const double spacing = std::sqrt(12.0 * mean_energy / (static_cast<double>(levels) * levels - 1.0));
    for (int i = 0; i < levels; ++i) x[static_cast<std::size_t>(i)] = (i - (levels - 1) / 2.0) * spacing;
    return x;
}

struct IqmConstellation {
    int R = 1;
    int T = 1;
    int M = 1;
    double e_t = 1.0;
    std::vector<std::vector<double>> in_sets;    // R sets of M ascending levels
    std::vector<std::vector<double>> quad_sets;  // T sets of M ascending levels

    // r in 1..R, t in 1..T, mi/mq in 0..M-1
    std::complex<double> point(int r, int mi, int t, int mq) const {
        if (r < 1 || r > R || t < 1 || t > T || mi < 0 || mi >= M || mq < 0 || mq >= M)
            throw std::invalid_argument("IqmConstellation::point: index out of range");
        return {in_sets[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(mi)],
                quad_sets[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(mq)]};
    }

    std::vector<std::complex<double>> all_points() const {
        std::vector<std::complex<double>> pts;
        pts.reserve(static_cast<std::size_t>(R) * T * M * M);
        for (int r = 1; r <= R; ++r)
            for (int mi = 0; mi < M; ++mi)
                for (int t = 1; t <= T; ++t)
                    for (int mq = 0; mq < M; ++mq) pts.push_back(point(r, mi, t, mq));
        return pts;
    }
};

namespace detail {
inline std::vector<std::vector<double>> interleaved_sets(int sets, int per_set, double mean_energy) {
    const auto composite = pam_levels(sets * per_set, mean_energy);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(sets));
    for (int r = 0; r < sets; ++r) {
        out[static_cast<std::size_t>(r)].reserve(static_cast<std::size_t>(per_set));
        for (int u = r; u < sets * per_set; u += sets)
            out[static_cast<std::size_t>(r)].push_back(composite[static_cast<std::size_t>(u)]);
    }
    return out;
}
}  // namespace detail

inline IqmConstellation build_iqm(int R, int T, int M) {
    if (R < 1 || T < 1 || M < 1)
        throw std::invalid_argument("build_iqm: R, T, M must all be >= 1");
    IqmConstellation c;
    c.R = R;
    c.T = T;
    c.M = M;
    c.e_t = 1.0;
    c.in_sets = detail::interleaved_sets(R, M, c.e_t / 2.0);
    c.quad_sets = detail::interleaved_sets(T, M, c.e_t / 2.0);
    return c;
}

// Directly supplied level sets (each set ascending is not required here);
// component energies must average E_T/2 across sets.
inline IqmConstellation custom_iqm(std::vector<std::vector<double>> in_sets,
                                   std::vector<std::vector<double>> quad_sets, double e_t = 1.0) {
    if (in_sets.empty() || quad_sets.empty())
        throw std::invalid_argument("custom_iqm: need at least one set per component");
    const std::size_t m = in_sets.front().size();
    for (const auto& s : in_sets)
        if (s.size() != m) throw std::invalid_argument("custom_iqm: ragged in-phase sets");
    for (const auto& s : quad_sets)
        if (s.size() != m) throw std::invalid_argument("custom_iqm: ragged quadrature sets");
    IqmConstellation c;
    c.R = static_cast<int>(in_sets.size());
    c.T = static_cast<int>(quad_sets.size());
    c.M = static_cast<int>(m);
    c.e_t = e_t;
    c.in_sets = std::move(in_sets);
    c.quad_sets = std::move(quad_sets);
    return c;
}

// Candidate minimum distances of the rotated APM constellation. d2 needs a
// second ring, d3 a third; d1/d4 need at least two phases per ring (per set).
struct ApmMedReport {
    std::optional<double> d1;
    std::optional<double> d2;
    std::optional<double> d3;
    std::optional<double> d4;
    std::optional<double> d_min;  // min over sqrt(2)*{d1,d2,d3} present
};

inline ApmMedReport analytic_med_apm(const ApmConstellation& c) {
    if (!c.ring_rotation)
        throw std::invalid_argument("analytic_med_apm: formulas assume ring rotation on");
    ApmMedReport rep;
    const double pm = static_cast<double>(c.P) * c.M;
    const double root = std::sqrt(c.K + 1.0);
    if (c.P * c.M >= 2) rep.d1 = 2.0 * std::numbers::sqrt2 / root * std::sin(std::numbers::pi / pm);
    if (c.K >= 2)
        rep.d2 = std::sqrt((6.0 - 4.0 * std::numbers::sqrt2 * std::cos(std::numbers::pi / pm)) /
                           (c.K + 1.0));
    if (c.K >= 3)
        rep.d3 = std::sqrt(2.0 / (c.K + 1.0)) * (std::sqrt(static_cast<double>(c.K)) - std::sqrt(c.K - 2.0));
    if (c.M >= 2) rep.d4 = 2.0 * std::numbers::sqrt2 / root * std::sin(std::numbers::pi / c.M);
    for (const auto& d : {rep.d1, rep.d2, rep.d3}) {
        if (!d) continue;
        const double cand = std::numbers::sqrt2 * *d;
        if (!rep.d_min || cand < *rep.d_min) rep.d_min = cand;
    }
    return rep;
}

struct IqmMedReport {
    std::optional<double> d_min;  // sqrt(2) * MED of the composite xi*M-ary PAM
    std::optional<double> d1;     // within-set MED, absent for M == 1
};

inline IqmMedReport analytic_med_iqm(const IqmConstellation& c) {
    IqmMedReport rep;
    const int xi = std::max(c.R, c.T);
    const double lm = static_cast<double>(xi) * c.M;
    if (xi * c.M >= 2) rep.d_min = 2.0 * std::sqrt(3.0 / (lm * lm - 1.0));
    if (c.M >= 2)
        rep.d1 = std::sqrt(6.0 / (static_cast<double>(c.M) * c.M - 1.0 / (static_cast<double>(xi) * xi)));
    return rep;
}

struct MedPair {
    double value = 0.0;
    std::size_t first = 0;
    std::size_t second = 0;
};

inline MedPair brute_force_med(std::span<const std::complex<double>> points) {
    if (points.size() < 2) throw std::invalid_argument("brute_force_med: need at least 2 points");
    MedPair best{std::numeric_limits<double>::infinity(), 0, 1};
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double d = std::abs(points[i] - points[j]);
            if (d < best.value) best = {d, i, j};
        }
    return best;
}

inline MedPair brute_force_med_codebook(const std::vector<std::vector<std::complex<double>>>& codewords) {
    if (codewords.size() < 2)
        throw std::invalid_argument("brute_force_med_codebook: need at least 2 codewords");
    MedPair best{std::numeric_limits<double>::infinity(), 0, 1};
    for (std::size_t i = 0; i < codewords.size(); ++i)
        for (std::size_t j = i + 1; j < codewords.size(); ++j) {
            double sq = 0.0;
            for (std::size_t n = 0; n < codewords[i].size(); ++n)
                sq += std::norm(codewords[i][n] - codewords[j][n]);
            const double d = std::sqrt(sq);
            if (d < best.value) best = {d, i, j};
        }
    return best;
}

}  // namespace mdsmod
