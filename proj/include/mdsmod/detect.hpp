#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "mdsmod/modem.hpp"

// Group detectors. ml_detect scans the whole 2^f codebook for the exact
// ||y - diag(s) h||^2 minimizer. lcml_detect decides every subcarrier except
// the one with the weakest channel gain independently (nearest constellation
// point under |y_n - x h_n|^2), forces the weakest subcarrier's index symbols
// through the MDS parity closure, and only searches the modulation symbols
// there. Ties always resolve to the lowest index.

namespace mdsmod {

enum class Detector { Ml, LcMl };

inline const char* detector_name(Detector d) { return d == Detector::Ml ? "ml" : "lcml"; }

struct DetectionResult {
    std::uint64_t bits = 0;  // decoded f-bit pattern (MSB-first value)
    std::uint64_t metric_evaluations = 0;
    double best_metric = 0.0;
    Provenance prov;
};

using CSpan = std::span<const std::complex<double>>;

struct MlScratch {
    std::vector<double> point_cost;  // n * alphabet.size(), position-major
};

namespace detail {

// Exact codebook scan via shared per-point costs; `cost` must hold
// n * alphabet.size() doubles.
inline std::uint64_t ml_core(const std::complex<double>* y, const std::complex<double>* h,
                             std::size_t n, const Codebook& cb, double* cost,
                             double& best_metric) {
    const std::size_t a = cb.alphabet.size();
    const std::complex<double>* alpha = cb.alphabet.data();
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> yi = y[i];
        const std::complex<double> hi = h[i];
        double* row = cost + i * a;
        for (std::size_t t = 0; t < a; ++t) row[t] = std::norm(yi - alpha[t] * hi);
    }
    std::uint64_t best = 0;
    double best_m = std::numeric_limits<double>::infinity();
    const std::uint16_t* idx = cb.point_index.data();
    const std::uint64_t count = cb.size();
    for (std::uint64_t d = 0; d < count; ++d, idx += n) {
        double m = cost[idx[0]];
        for (std::size_t i = 1; i < n; ++i) m += cost[i * a + idx[i]];
        if (m < best_m) {
            best_m = m;
            best = d;
        }
    }
    best_metric = best_m;
    return best;
}

}  // namespace detail

inline std::uint64_t ml_detect_bits(CSpan y, CSpan h, const Codebook& cb, MlScratch& scratch,
                                    std::uint64_t& metric_evaluations, double& best_metric) {
    const std::size_t n = y.size();
    if (h.size() != n || static_cast<std::size_t>(cb.n) != n)
        throw std::invalid_argument("ml_detect: length mismatch");
    scratch.point_cost.resize(n * cb.alphabet.size());
    metric_evaluations = cb.size();
    return detail::ml_core(y.data(), h.data(), n, cb, scratch.point_cost.data(), best_metric);
}

inline DetectionResult ml_detect(CSpan y, CSpan h, const Codebook& cb) {
    DetectionResult res;
    MlScratch scratch;
    res.bits = ml_detect_bits(y, h, cb, scratch, res.metric_evaluations, res.best_metric);
    res.prov = cb.provenance[res.bits];
    return res;
}

struct LcmlContext {
    SchemeConfig config;
    BitLayout layout;
    ApmConstellation apm;
    std::vector<std::complex<double>> apm_points;  // (k,p,m) lexicographic
    IqmConstellation iqm;
    std::vector<std::complex<double>> plain;
};

inline LcmlContext make_lcml_context(const SchemeConfig& cfg) {
    validate(cfg);
    LcmlContext ctx;
    ctx.config = cfg;
    ctx.layout = bit_layout(cfg);
    if (const auto* a = std::get_if<ApmParams>(&cfg.scheme)) {
        ctx.apm = build_apm(a->k, a->p, a->m, a->ring_rotation);
        ctx.apm_points = ctx.apm.all_points();
    } else if (const auto* i = std::get_if<IqmParams>(&cfg.scheme)) {
        ctx.iqm = build_iqm(i->r, i->t, i->m);
    } else {
        ctx.plain = plain_points(std::get<PlainParams>(cfg.scheme));
    }
    return ctx;
}

struct LcmlScratch {
    std::vector<int> a, b, c, d;
};

namespace detail {

inline std::size_t weakest_subcarrier(CSpan h) {
    std::size_t tau = 0;
    double w = std::norm(h[0]);
    for (std::size_t i = 1; i < h.size(); ++i) {
        const double g = std::norm(h[i]);
        if (g < w) {
            w = g;
            tau = i;
        }
    }
    return tau;
}

// Big-endian prefix value of tuple[0..n-2], masked to the encodable bit width.
inline std::uint64_t masked_prefix(const std::vector<int>& tuple, int q, int n, int f_bits) {
    std::uint64_t d = 0;
    for (int i = 0; i < n - 1; ++i)
        d = d * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(tuple[static_cast<std::size_t>(i)] - 1);
    if (f_bits < 64) d &= (std::uint64_t{1} << f_bits) - 1;
    return d;
}

}  // namespace detail

inline std::uint64_t lcml_detect_bits(CSpan y, CSpan h, const LcmlContext& ctx,
                                      LcmlScratch& scratch, std::uint64_t& metric_evaluations,
                                      double& best_metric) {
    const int n = ctx.config.subcarriers_per_group();
    if (y.size() != static_cast<std::size_t>(n) || h.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("lcml_detect: length mismatch");
    metric_evaluations = 0;
    best_metric = 0.0;

    if (const auto* ap = std::get_if<ApmParams>(&ctx.config.scheme)) {
        const int K = ap->k, P = ap->p, M = ap->m;
        auto& amp = scratch.a;
        auto& set = scratch.b;
        auto& mod = scratch.c;
        amp.assign(static_cast<std::size_t>(n), 1);
        set.assign(static_cast<std::size_t>(n), 1);
        mod.assign(static_cast<std::size_t>(n), 0);

        const std::size_t tau = detail::weakest_subcarrier(h);
        long long amp_sum = 0, set_sum = 0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
            if (i == tau) continue;
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_t = 0;
            for (std::size_t t = 0; t < ctx.apm_points.size(); ++t) {
                const double m = std::norm(y[i] - ctx.apm_points[t] * h[i]);
                if (m < best) {
                    best = m;
                    best_t = t;
                }
            }
            metric_evaluations += ctx.apm_points.size();
            best_metric += best;
            amp[i] = static_cast<int>(best_t / (static_cast<std::size_t>(P) * M)) + 1;
            set[i] = static_cast<int>((best_t / static_cast<std::size_t>(M)) % static_cast<std::size_t>(P)) + 1;
            mod[i] = static_cast<int>(best_t % static_cast<std::size_t>(M));
            amp_sum += amp[i];
            set_sum += set[i];
        }
        amp[tau] = closure_symbol(amp_sum, K);
        set[tau] = closure_symbol(set_sum, P);
        double best = std::numeric_limits<double>::infinity();
        for (int m = 0; m < M; ++m) {
            const double d = std::norm(y[tau] - ctx.apm.point(amp[tau], set[tau], m) * h[tau]);
            if (d < best) {
                best = d;
                mod[tau] = m;
            }
        }
        metric_evaluations += static_cast<std::uint64_t>(M);
        best_metric += best;

        const int log2m = M > 1 ? exact_log2(M) : 0;
        std::uint64_t bits = detail::masked_prefix(amp, K, n, ctx.layout.f1);
        bits = (bits << ctx.layout.f2) | detail::masked_prefix(set, P, n, ctx.layout.f2);
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
            bits = (bits << log2m) | static_cast<std::uint64_t>(mod[i]);
        return bits;
    }

    if (const auto* iq = std::get_if<IqmParams>(&ctx.config.scheme)) {
        const int R = iq->r, T = iq->t, M = iq->m;
        auto& rset = scratch.a;
        auto& rsym = scratch.b;
        auto& tset = scratch.c;
        auto& tsym = scratch.d;
        rset.assign(static_cast<std::size_t>(n), 1);
        rsym.assign(static_cast<std::size_t>(n), 0);
        tset.assign(static_cast<std::size_t>(n), 1);
        tsym.assign(static_cast<std::size_t>(n), 0);

        const std::size_t tau = detail::weakest_subcarrier(h);
        long long r_sum = 0, t_sum = 0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
            if (i == tau) continue;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 1; r <= R; ++r)
                for (int u = 0; u < M; ++u)
                    for (int t = 1; t <= T; ++t)
                        for (int v = 0; v < M; ++v) {
                            const double m = std::norm(y[i] - ctx.iqm.point(r, u, t, v) * h[i]);
                            if (m < best) {
                                best = m;
                                rset[i] = r;
                                rsym[i] = u;
                                tset[i] = t;
                                tsym[i] = v;
                            }
                        }
            metric_evaluations += static_cast<std::uint64_t>(R) * T * M * M;
            best_metric += best;
            r_sum += rset[i];
            t_sum += tset[i];
        }
        rset[tau] = closure_symbol(r_sum, R);
        tset[tau] = closure_symbol(t_sum, T);
        double best = std::numeric_limits<double>::infinity();
        for (int u = 0; u < M; ++u)
            for (int v = 0; v < M; ++v) {
                const double d = std::norm(y[tau] - ctx.iqm.point(rset[tau], u, tset[tau], v) * h[tau]);
                if (d < best) {
                    best = d;
                    rsym[tau] = u;
                    tsym[tau] = v;
                }
            }
        metric_evaluations += static_cast<std::uint64_t>(M) * M;
        best_metric += best;

        const int log2m = M > 1 ? exact_log2(M) : 0;
        std::uint64_t bits = detail::masked_prefix(rset, R, n, ctx.layout.f11);
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
            bits = (bits << log2m) | static_cast<std::uint64_t>(rsym[i]);
        bits = (bits << ctx.layout.f21) | detail::masked_prefix(tset, T, n, ctx.layout.f21);
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
            bits = (bits << log2m) | static_cast<std::uint64_t>(tsym[i]);
        return bits;
    }

    // plain OFDM: the per-subcarrier search already is the exact ML rule
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t bits = 0;
    for (std::size_t v = 0; v < ctx.plain.size(); ++v) {
        const double m = std::norm(y[0] - ctx.plain[v] * h[0]);
        if (m < best) {
            best = m;
            bits = v;
        }
    }
    metric_evaluations = ctx.plain.size();
    best_metric = best;
    return bits;
}

inline DetectionResult lcml_detect(CSpan y, CSpan h, const LcmlContext& ctx) {
    DetectionResult res;
    LcmlScratch scratch;
    res.bits = lcml_detect_bits(y, h, ctx, scratch, res.metric_evaluations, res.best_metric);
    if (ctx.config.is_apm()) {
        const auto* a = std::get_if<ApmParams>(&ctx.config.scheme);
        ApmProvenance prov{scratch.a, scratch.b, scratch.c};
        validate_tuple(prov.amplitude, {a->k, a->n});
        validate_tuple(prov.phase_set, {a->p, a->n});
        res.prov = std::move(prov);
    } else if (ctx.config.is_iqm()) {
        const auto* i = std::get_if<IqmParams>(&ctx.config.scheme);
        IqmProvenance prov{scratch.a, scratch.b, scratch.c, scratch.d};
        validate_tuple(prov.in_set, {i->r, i->n});
        validate_tuple(prov.quad_set, {i->t, i->n});
        res.prov = std::move(prov);
    } else {
        res.prov = PlainProvenance{{static_cast<int>(res.bits)}};
    }
    return res;
}

inline DetectionResult lcml_detect_apm(CSpan y, CSpan h, const SchemeConfig& cfg) {
    if (!cfg.is_apm()) throw std::invalid_argument("lcml_detect_apm: not an APM config");
    return lcml_detect(y, h, make_lcml_context(cfg));
}

inline DetectionResult lcml_detect_iqm(CSpan y, CSpan h, const SchemeConfig& cfg) {
    if (!cfg.is_iqm()) throw std::invalid_argument("lcml_detect_iqm: not an IQM config");
    return lcml_detect(y, h, make_lcml_context(cfg));
}

struct MetricCount {
    double per_group = 0.0;
    double per_subcarrier = 0.0;
};

inline MetricCount metric_count(const SchemeConfig& cfg, Detector det) {
    const BitLayout l = bit_layout(cfg);
    const int n = cfg.subcarriers_per_group();
    MetricCount out;
    if (det == Detector::Ml) {
        out.per_group = std::ldexp(1.0, l.f);  // codebook size actually searched
    } else if (const auto* a = std::get_if<ApmParams>(&cfg.scheme)) {
        out.per_group = static_cast<double>(a->k) * a->p * a->m * (n - 1) + a->m;
    } else if (const auto* i = std::get_if<IqmParams>(&cfg.scheme)) {
        out.per_group =
            static_cast<double>(i->r) * i->t * i->m * i->m * (n - 1) + static_cast<double>(i->m) * i->m;
    } else {
        out.per_group = static_cast<double>(std::get<PlainParams>(cfg.scheme).m);
    }
    out.per_subcarrier = out.per_group / n;
    return out;
}

}  // namespace mdsmod
