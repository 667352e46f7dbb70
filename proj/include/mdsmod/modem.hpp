#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mdsmod/constellation.hpp"
#include "mdsmod/mds_code.hpp"

// Bit <-> symbol-vector mapping for one subcarrier group.
//
// APM groups split f = f1 + f2 + f3 bits into an amplitude index tuple, a
// phase-set index tuple (both MDS codewords) and N*log2(M) per-subcarrier
// phase bits. IQM groups use f11/f12 for the in-phase component and f21/f22
// for the quadrature component. Plain OFDM is the single-subcarrier PSK/QAM
// baseline. Within-set modulation bits are natural binary, subcarrier-major.

namespace mdsmod {

struct unsupported_config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ModFamily { Psk, Qam };

struct ApmParams {
    int n = 2;
    int k = 1;
    int p = 1;
    int m = 1;
    bool ring_rotation = true;
};

struct IqmParams {
    int n = 2;
    int r = 1;
    int t = 1;
    int m = 1;
};

struct PlainParams {
    int m = 2;
    ModFamily family = ModFamily::Qam;
};

struct SchemeConfig {
    std::variant<ApmParams, IqmParams, PlainParams> scheme;
    int groups = 1;

    int subcarriers_per_group() const {
        if (const auto* a = std::get_if<ApmParams>(&scheme)) return a->n;
        if (const auto* i = std::get_if<IqmParams>(&scheme)) return i->n;
        return 1;
    }
    int total_subcarriers() const { return groups * subcarriers_per_group(); }
    bool is_apm() const { return std::holds_alternative<ApmParams>(scheme); }
    bool is_iqm() const { return std::holds_alternative<IqmParams>(scheme); }
    bool is_plain() const { return std::holds_alternative<PlainParams>(scheme); }

    std::string name() const {
        auto num = [](int v) { return std::to_string(v); };
        if (const auto* a = std::get_if<ApmParams>(&scheme)) {
            std::string s = "apm(" + num(a->n) + "," + num(a->k) + "," + num(a->p);
            if (a->m > 1) s += "," + num(a->m);
            return s + ")";
        }
        if (const auto* i = std::get_if<IqmParams>(&scheme)) {
            std::string s = "iqm(" + num(i->n) + "," + num(i->r) + "," + num(i->t);
            if (i->m > 1) s += "," + num(i->m);
            return s + ")";
        }
        const auto& pl = std::get<PlainParams>(scheme);
        return "ofdm-" + num(pl.m) + (pl.family == ModFamily::Psk ? "psk" : "qam");
    }
};

inline SchemeConfig apm_config(int n, int k, int p, int m = 1, bool ring_rotation = true,
                               int groups = 1) {
    return SchemeConfig{ApmParams{n, k, p, m, ring_rotation}, groups};
}
inline SchemeConfig iqm_config(int n, int r, int t, int m = 1, int groups = 1) {
    return SchemeConfig{IqmParams{n, r, t, m}, groups};
}
inline SchemeConfig plain_config(int m, ModFamily family = ModFamily::Qam, int groups = 1) {
    return SchemeConfig{PlainParams{m, family}, groups};
}

inline bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

inline int exact_log2(int v) {
    if (!is_power_of_two(v)) throw std::invalid_argument("exact_log2: not a power of two");
    int b = 0;
    while ((1 << b) < v) ++b;
    return b;
}

inline void validate(const SchemeConfig& cfg) {
    if (cfg.groups < 1) throw std::invalid_argument("SchemeConfig: groups must be >= 1");
    if (const auto* a = std::get_if<ApmParams>(&cfg.scheme)) {
        if (a->n < 2) throw std::invalid_argument("apm: N must be >= 2");
        if (a->k < 1 || a->p < 1 || a->m < 1)
            throw std::invalid_argument("apm: K, P, M must all be >= 1");
        if (a->m > 1 && !is_power_of_two(a->m))
            throw std::invalid_argument("apm: M must be a power of two when M > 1");
    } else if (const auto* i = std::get_if<IqmParams>(&cfg.scheme)) {
        if (i->n < 2) throw std::invalid_argument("iqm: N must be >= 2");
        if (i->r < 1 || i->t < 1 || i->m < 1)
            throw std::invalid_argument("iqm: R, T, M must all be >= 1");
        if (i->m > 1 && !is_power_of_two(i->m))
            throw std::invalid_argument("iqm: M must be a power of two when M > 1");
    } else {
        const auto& pl = std::get<PlainParams>(cfg.scheme);
        if (pl.m < 2 || !is_power_of_two(pl.m))
            throw std::invalid_argument("ofdm: M must be a power of two >= 2");
    }
}

struct BitLayout {
    int f = 0;
    int f1 = 0, f2 = 0, f3 = 0;             // apm fields
    int f11 = 0, f12 = 0, f21 = 0, f22 = 0;  // iqm fields
};

inline BitLayout bit_layout(const SchemeConfig& cfg) {
    validate(cfg);
    BitLayout l;
    if (const auto* a = std::get_if<ApmParams>(&cfg.scheme)) {
        const int log2m = a->m > 1 ? exact_log2(a->m) : 0;
        l.f1 = floor_log2_pow(static_cast<std::uint64_t>(a->k), a->n - 1);
        l.f2 = floor_log2_pow(static_cast<std::uint64_t>(a->p), a->n - 1);
        l.f3 = a->n * log2m;
        l.f = l.f1 + l.f2 + l.f3;
    } else if (const auto* i = std::get_if<IqmParams>(&cfg.scheme)) {
        const int log2m = i->m > 1 ? exact_log2(i->m) : 0;
        l.f11 = floor_log2_pow(static_cast<std::uint64_t>(i->r), i->n - 1);
        l.f12 = i->n * log2m;
        l.f21 = floor_log2_pow(static_cast<std::uint64_t>(i->t), i->n - 1);
        l.f22 = i->n * log2m;
        l.f = l.f11 + l.f12 + l.f21 + l.f22;
    } else {
        l.f = exact_log2(std::get<PlainParams>(cfg.scheme).m);
    }
    return l;
}

inline double spectral_efficiency(const SchemeConfig& cfg) {
    return static_cast<double>(bit_layout(cfg).f) / cfg.subcarriers_per_group();
}

// Baseline constellation indexed directly by the bit pattern: Gray-labeled
// rectangular QAM (square when log2 M is even) or naturally labeled PSK,
// normalized to unit average energy.
inline std::vector<std::complex<double>> plain_points(const PlainParams& p) {
    if (p.m < 2 || !is_power_of_two(p.m))
        throw std::invalid_argument("plain_points: M must be a power of two >= 2");
    const int b = exact_log2(p.m);
    std::vector<std::complex<double>> pts(static_cast<std::size_t>(p.m));
    if (p.family == ModFamily::Psk) {
        for (int v = 0; v < p.m; ++v)
            pts[static_cast<std::size_t>(v)] = std::polar(1.0, 2.0 * std::numbers::pi * v / p.m);
        return pts;
    }
    const int bi = (b + 1) / 2;
    const int bq = b / 2;
    const int li = 1 << bi;
    const int lq = 1 << bq;
    const double delta =
        std::sqrt(3.0 / (static_cast<double>(li) * li + static_cast<double>(lq) * lq - 2.0));
    auto gray_to_binary = [](unsigned g) {
        g ^= g >> 1;
        g ^= g >> 2;
        g ^= g >> 4;
        g ^= g >> 8;
        return g;
    };
    for (int v = 0; v < p.m; ++v) {
        const unsigned gi = static_cast<unsigned>(v) >> bq;
        const unsigned gq = static_cast<unsigned>(v) & ((1u << bq) - 1u);
        const int ii = static_cast<int>(gray_to_binary(gi));
        const int iq = static_cast<int>(gray_to_binary(gq));
        pts[static_cast<std::size_t>(v)] = {(2 * ii - (li - 1)) * delta, (2 * iq - (lq - 1)) * delta};
    }
    return pts;
}

struct ApmProvenance {
    MdsTuple amplitude;          // values in 1..K
    MdsTuple phase_set;          // values in 1..P
    std::vector<int> phase;      // per subcarrier, 0..M-1
};
struct IqmProvenance {
    MdsTuple in_set;             // 1..R
    std::vector<int> in_sym;     // 0..M-1
    MdsTuple quad_set;           // 1..T
    std::vector<int> quad_sym;   // 0..M-1
};
struct PlainProvenance {
    std::vector<int> sym;  // single entry, 0..M-1
};
using Provenance = std::variant<ApmProvenance, IqmProvenance, PlainProvenance>;

struct SymbolVector {
    std::vector<std::complex<double>> values;
    Provenance prov;
};

namespace detail {

inline std::vector<int> read_symbol_field(const BitVec& bits, std::size_t offset, int n, int log2m) {
    std::vector<int> sym(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        int v = 0;
        for (int b = 0; b < log2m; ++b)
            v = (v << 1) | bits[offset + static_cast<std::size_t>(i * log2m + b)];
        sym[static_cast<std::size_t>(i)] = v;
    }
    return sym;
}

inline void write_symbol_field(BitVec& bits, std::size_t offset, const std::vector<int>& sym,
                               int log2m) {
    for (std::size_t i = 0; i < sym.size(); ++i)
        for (int b = 0; b < log2m; ++b)
            bits[offset + i * static_cast<std::size_t>(log2m) + static_cast<std::size_t>(b)] =
                static_cast<std::uint8_t>((sym[i] >> (log2m - 1 - b)) & 1);
}

inline BitVec slice(const BitVec& bits, std::size_t offset, int count) {
    return BitVec(bits.begin() + static_cast<std::ptrdiff_t>(offset),
                  bits.begin() + static_cast<std::ptrdiff_t>(offset) + count);
}

}  // namespace detail

inline SymbolVector encode_group(const BitVec& bits, const SchemeConfig& cfg) {
    const BitLayout l = bit_layout(cfg);
    if (bits.size() != static_cast<std::size_t>(l.f))
        throw std::invalid_argument("encode_group: expected exactly f bits");
    SymbolVector out;
    if (const auto* a = std::get_if<ApmParams>(&cfg.scheme)) {
        const auto c = build_apm(a->k, a->p, a->m, a->ring_rotation);
        const int log2m = a->m > 1 ? exact_log2(a->m) : 0;
        ApmProvenance prov;
        prov.amplitude = bits_to_tuple(detail::slice(bits, 0, l.f1), {a->k, a->n});
        prov.phase_set = bits_to_tuple(detail::slice(bits, static_cast<std::size_t>(l.f1), l.f2),
                                       {a->p, a->n});
        prov.phase = detail::read_symbol_field(bits, static_cast<std::size_t>(l.f1 + l.f2), a->n, log2m);
        out.values.reserve(static_cast<std::size_t>(a->n));
        for (int n = 0; n < a->n; ++n)
            out.values.push_back(c.point(prov.amplitude[static_cast<std::size_t>(n)],
                                         prov.phase_set[static_cast<std::size_t>(n)],
                                         prov.phase[static_cast<std::size_t>(n)]));
        out.prov = std::move(prov);
    } else if (const auto* i = std::get_if<IqmParams>(&cfg.scheme)) {
        const auto c = build_iqm(i->r, i->t, i->m);
        const int log2m = i->m > 1 ? exact_log2(i->m) : 0;
        IqmProvenance prov;
        std::size_t off = 0;
        prov.in_set = bits_to_tuple(detail::slice(bits, off, l.f11), {i->r, i->n});
        off += static_cast<std::size_t>(l.f11);
        prov.in_sym = detail::read_symbol_field(bits, off, i->n, log2m);
        off += static_cast<std::size_t>(l.f12);
        prov.quad_set = bits_to_tuple(detail::slice(bits, off, l.f21), {i->t, i->n});
        off += static_cast<std::size_t>(l.f21);
        prov.quad_sym = detail::read_symbol_field(bits, off, i->n, log2m);
        out.values.reserve(static_cast<std::size_t>(i->n));
        for (int n = 0; n < i->n; ++n)
            out.values.push_back(c.point(prov.in_set[static_cast<std::size_t>(n)],
                                         prov.in_sym[static_cast<std::size_t>(n)],
                                         prov.quad_set[static_cast<std::size_t>(n)],
                                         prov.quad_sym[static_cast<std::size_t>(n)]));
        out.prov = std::move(prov);
    } else {
        const auto& pl = std::get<PlainParams>(cfg.scheme);
        const auto pts = plain_points(pl);
        const int v = static_cast<int>(value_from_bits(bits));
        out.values.push_back(pts[static_cast<std::size_t>(v)]);
        out.prov = PlainProvenance{{v}};
    }
    return out;
}

inline BitVec demap_group(const Provenance& prov, const SchemeConfig& cfg) {
    const BitLayout l = bit_layout(cfg);
    BitVec bits(static_cast<std::size_t>(l.f), 0);
    if (const auto* a = std::get_if<ApmParams>(&cfg.scheme)) {
        const auto& p = std::get<ApmProvenance>(prov);
        const int log2m = a->m > 1 ? exact_log2(a->m) : 0;
        BitVec b1 = tuple_to_bits(p.amplitude, {a->k, a->n});
        BitVec b2 = tuple_to_bits(p.phase_set, {a->p, a->n});
        std::copy(b1.begin(), b1.end(), bits.begin());
        std::copy(b2.begin(), b2.end(), bits.begin() + l.f1);
        detail::write_symbol_field(bits, static_cast<std::size_t>(l.f1 + l.f2), p.phase, log2m);
    } else if (const auto* i = std::get_if<IqmParams>(&cfg.scheme)) {
        const auto& p = std::get<IqmProvenance>(prov);
        const int log2m = i->m > 1 ? exact_log2(i->m) : 0;
        std::size_t off = 0;
        BitVec b1 = tuple_to_bits(p.in_set, {i->r, i->n});
        std::copy(b1.begin(), b1.end(), bits.begin() + static_cast<std::ptrdiff_t>(off));
        off += static_cast<std::size_t>(l.f11);
        detail::write_symbol_field(bits, off, p.in_sym, log2m);
        off += static_cast<std::size_t>(l.f12);
        BitVec b2 = tuple_to_bits(p.quad_set, {i->t, i->n});
        std::copy(b2.begin(), b2.end(), bits.begin() + static_cast<std::ptrdiff_t>(off));
        off += static_cast<std::size_t>(l.f21);
        detail::write_symbol_field(bits, off, p.quad_sym, log2m);
    } else {
        const auto& p = std::get<PlainProvenance>(prov);
        bits = bits_from_value(static_cast<std::uint64_t>(p.sym.at(0)), l.f);
    }
    return bits;
}

// All 2^f codewords indexed by their bit pattern (MSB-first value). Symbols
// are stored flat (row-major) plus as indices into the per-position point
// alphabet, which lets detectors share per-point metric computations.
struct Codebook {
    SchemeConfig config;
    BitLayout layout;
    int n = 1;  // subcarriers per group
    std::vector<std::complex<double>> flat;         // size() * n
    std::vector<Provenance> provenance;
    std::vector<std::complex<double>> alphabet;     // distinct per-position points
    std::vector<std::uint16_t> point_index;         // size() * n, into alphabet

    std::size_t size() const { return provenance.size(); }
    std::span<const std::complex<double>> symbol(std::size_t d) const {
        return {flat.data() + d * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
    }
    std::vector<std::vector<std::complex<double>>> rows() const {
        std::vector<std::vector<std::complex<double>>> out(size());
        for (std::size_t d = 0; d < size(); ++d) {
            auto s = symbol(d);
            out[d].assign(s.begin(), s.end());
        }
        return out;
    }
};

namespace detail {

inline std::uint16_t alphabet_index(const Provenance& prov, const SchemeConfig& cfg, int pos) {
    const auto u = static_cast<std::size_t>(pos);
    if (const auto* a = std::get_if<ApmParams>(&cfg.scheme)) {
        const auto& p = std::get<ApmProvenance>(prov);
        return static_cast<std::uint16_t>(((p.amplitude[u] - 1) * a->p + (p.phase_set[u] - 1)) * a->m +
                                          p.phase[u]);
    }
    if (const auto* i = std::get_if<IqmParams>(&cfg.scheme)) {
        const auto& p = std::get<IqmProvenance>(prov);
        return static_cast<std::uint16_t>(
            (((p.in_set[u] - 1) * i->m + p.in_sym[u]) * i->t + (p.quad_set[u] - 1)) * i->m +
            p.quad_sym[u]);
    }
    return static_cast<std::uint16_t>(std::get<PlainProvenance>(prov).sym[u]);
}

}  // namespace detail

inline Codebook build_codebook(const SchemeConfig& cfg, int max_f = 26) {
    const BitLayout l = bit_layout(cfg);
    if (l.f > max_f)
        throw unsupported_config_error("build_codebook: f = " + std::to_string(l.f) +
                                       " exceeds supported limit " + std::to_string(max_f));
    Codebook cb;
    cb.config = cfg;
    cb.layout = l;
    cb.n = cfg.subcarriers_per_group();
    if (const auto* a = std::get_if<ApmParams>(&cfg.scheme))
        cb.alphabet = build_apm(a->k, a->p, a->m, a->ring_rotation).all_points();
    else if (const auto* i = std::get_if<IqmParams>(&cfg.scheme))
        cb.alphabet = build_iqm(i->r, i->t, i->m).all_points();
    else
        cb.alphabet = plain_points(std::get<PlainParams>(cfg.scheme));
    if (cb.alphabet.size() > 65535)
        throw unsupported_config_error("build_codebook: constellation too large");
    const std::uint64_t count = std::uint64_t{1} << l.f;
    cb.flat.reserve(count * static_cast<std::size_t>(cb.n));
    cb.provenance.reserve(count);
    cb.point_index.reserve(count * static_cast<std::size_t>(cb.n));
    for (std::uint64_t d = 0; d < count; ++d) {
        SymbolVector sv = encode_group(bits_from_value(d, l.f), cfg);
        cb.flat.insert(cb.flat.end(), sv.values.begin(), sv.values.end());
        for (int pos = 0; pos < cb.n; ++pos)
            cb.point_index.push_back(detail::alphabet_index(sv.prov, cfg, pos));
        cb.provenance.push_back(std::move(sv.prov));
    }
    return cb;
}

}  // namespace mdsmod
