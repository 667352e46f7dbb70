#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

// Single-parity MDS code over the alphabet {1..q}: the codewords are the
// n-tuples whose symbol sum is 0 mod q. There are q^(n-1) of them and the
// minimum Hamming distance is 2. Tuples double as modulation index vectors,
// so symbols stay 1-based throughout; 0-based digits appear only inside the
// base conversions.

namespace mdsmod {

using MdsTuple = std::vector<int>;
using BitVec = std::vector<std::uint8_t>;  // one bit per element, MSB first

struct MdsParams {
    int q = 1;  // alphabet size, >= 1
    int n = 2;  // tuple length, >= 2
};

inline void validate(const MdsParams& p) {
    if (p.q < 1) throw std::invalid_argument("MdsParams: q must be >= 1");
    if (p.n < 2) throw std::invalid_argument("MdsParams: n must be >= 2");
}

// Largest f with 2^f <= base^exp, computed exactly.
inline int floor_log2_pow(std::uint64_t base, int exp) {
    if (base < 1 || exp < 0) throw std::invalid_argument("floor_log2_pow: bad arguments");
    unsigned __int128 v = 1;
    for (int i = 0; i < exp; ++i) {
        if (v > (~static_cast<unsigned __int128>(0)) / base)
            throw std::invalid_argument("floor_log2_pow: base^exp too large");
        v *= base;
    }
    int f = -1;
    while (v) {
        v >>= 1;
        ++f;
    }
    return f;
}

// Symbol in {1..q} that brings sum_of_others + symbol to 0 mod q.
inline int closure_symbol(long long sum_of_others, int q) {
    const int r = static_cast<int>(sum_of_others % q);
    return r == 0 ? q : q - r;
}

inline MdsTuple complete_tuple(const MdsTuple& prefix, const MdsParams& params) {
    validate(params);
    if (prefix.size() != static_cast<std::size_t>(params.n - 1))
        throw std::invalid_argument("complete_tuple: prefix must have n-1 symbols");
    long long sum = 0;
    for (int v : prefix) {
        if (v < 1 || v > params.q)
            throw std::invalid_argument("complete_tuple: prefix symbol out of {1..q}");
        sum += v;
    }
    MdsTuple out = prefix;
    out.push_back(closure_symbol(sum, params.q));
    return out;
}

// All q^(n-1) codewords, ordered lexicographically by their (n-1)-prefix.
inline std::vector<MdsTuple> enumerate_codewords(const MdsParams& params) {
    validate(params);
    std::uint64_t count = 1;
    for (int i = 0; i < params.n - 1; ++i) count *= static_cast<std::uint64_t>(params.q);
    std::vector<MdsTuple> code;
    code.reserve(count);
    MdsTuple prefix(params.n - 1, 1);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        code.push_back(complete_tuple(prefix, params));
        for (int pos = params.n - 2; pos >= 0; --pos) {
            if (prefix[pos] < params.q) {
                ++prefix[pos];
                break;
            }
            prefix[pos] = 1;
        }
    }
    return code;
}

inline BitVec bits_from_value(std::uint64_t value, int width) {
    if (width < 0 || width > 64) throw std::invalid_argument("bits_from_value: bad width");
    BitVec bits(width);
    for (int i = 0; i < width; ++i)
        bits[i] = static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1u);
    return bits;
}

inline std::uint64_t value_from_bits(const BitVec& bits) {
    if (bits.size() > 64) throw std::invalid_argument("value_from_bits: too many bits");
    std::uint64_t v = 0;
    for (std::uint8_t b : bits) v = (v << 1) | (b & 1u);
    return v;
}

// Bits per index tuple: floor(log2 q^(n-1)).
inline int index_bits(const MdsParams& params) {
    validate(params);
    return floor_log2_pow(static_cast<std::uint64_t>(params.q), params.n - 1);
}

// Decimal value of a prefix under the big-endian digit convention
// (first symbol is the most significant base-q digit).
inline std::uint64_t prefix_value(const MdsTuple& tuple, const MdsParams& params) {
    std::uint64_t d = 0;
    for (int i = 0; i < params.n - 1; ++i)
        d = d * static_cast<std::uint64_t>(params.q) + static_cast<std::uint64_t>(tuple[i] - 1);
    return d;
}

inline MdsTuple tuple_from_prefix_value(std::uint64_t d, const MdsParams& params) {
    MdsTuple prefix(params.n - 1);
    for (int i = params.n - 2; i >= 0; --i) {
        prefix[i] = static_cast<int>(d % static_cast<std::uint64_t>(params.q)) + 1;
        d /= static_cast<std::uint64_t>(params.q);
    }
    return complete_tuple(prefix, params);
}

inline MdsTuple bits_to_tuple(const BitVec& bits, const MdsParams& params) {
    validate(params);
    const int f1 = index_bits(params);
    if (bits.size() != static_cast<std::size_t>(f1))
        throw std::invalid_argument("bits_to_tuple: expected exactly floor(log2 q^(n-1)) bits");
    return tuple_from_prefix_value(value_from_bits(bits), params);
}

inline void validate_tuple(const MdsTuple& tuple, const MdsParams& params) {
    if (tuple.size() != static_cast<std::size_t>(params.n))
        throw std::invalid_argument("MdsTuple: wrong length");
    long long sum = 0;
    for (int v : tuple) {
        if (v < 1 || v > params.q) throw std::invalid_argument("MdsTuple: symbol out of {1..q}");
        sum += v;
    }
    if (sum % params.q != 0) throw std::invalid_argument("MdsTuple: symbols do not sum to 0 mod q");
}

// Inverse of bits_to_tuple on its image. Tuples outside the encodable set
// (possible when q^(n-1) is not a power of two) keep their f1 low-order bits.
inline BitVec tuple_to_bits(const MdsTuple& tuple, const MdsParams& params) {
    validate(params);
    validate_tuple(tuple, params);
    const int f1 = index_bits(params);
    std::uint64_t d = prefix_value(tuple, params);
    if (f1 < 64) d &= (std::uint64_t{1} << f1) - 1;
    return bits_from_value(d, f1);
}

}  // namespace mdsmod
