#ifndef QKD_BITCORE_HPP
#define QKD_BITCORE_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qkd {

/// A binary digit. Every value of this type is 0 or 1.
using Bit = std::uint8_t;

namespace detail {

inline void require_same_length(std::string_view op, std::size_t lhs, std::size_t rhs) {
    if (lhs != rhs) {
        throw std::invalid_argument(std::string(op) + ": length mismatch (" +
                                    std::to_string(lhs) + " vs " + std::to_string(rhs) + ")");
    }
}

}  // namespace detail

/**
 * Fixed-length sequence of bits; the carrier for every key, basis string and
 * classical message.
 *
 * Indexing is 0-based. Protocol notation k = 1..N maps to index k-1, so the
 * textual form (see str()) prints position k=1 first. There is no length
 * limit; all operations are linear time.
 */
class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t n, Bit fill = 0) : bits_(n, fill ? 1 : 0) {}

    /// Parses a '0'/'1' string, first character = position k=1.
    static BitString from_string(std::string_view text) {
        BitString out;
        out.bits_.reserve(text.size());
        for (std::size_t pos = 0; pos < text.size(); ++pos) {
            const char c = text[pos];
            if (c != '0' && c != '1') {
                throw std::invalid_argument("BitString: invalid character '" + std::string(1, c) +
                                            "' at position " + std::to_string(pos + 1));
            }
            out.bits_.push_back(static_cast<Bit>(c - '0'));
        }
        return out;
    }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }

    Bit operator[](std::size_t index) const { return bits_[index]; }

    Bit at(std::size_t index) const {
        if (index >= bits_.size()) {
            throw std::out_of_range("BitString: index " + std::to_string(index) +
                                    " out of range (size " + std::to_string(bits_.size()) + ")");
        }
        return bits_[index];
    }

    void set(std::size_t index, Bit value) { bits_.at(index) = value & 1u; }
    void flip(std::size_t index) { bits_.at(index) ^= 1u; }
    void push_back(Bit value) { bits_.push_back(value & 1u); }

    /// Elementwise XOR; lengths must match.
    BitString operator^(const BitString& other) const {
        detail::require_same_length("xor", size(), other.size());
        BitString out(size());
        for (std::size_t k = 0; k < size(); ++k) out.bits_[k] = bits_[k] ^ other.bits_[k];
        return out;
    }

    /// Bitwise complement: result[k] = 1 ^ (*this)[k].
    BitString operator~() const {
        BitString out(size());
        for (std::size_t k = 0; k < size(); ++k) out.bits_[k] = bits_[k] ^ 1u;
        return out;
    }

    bool operator==(const BitString&) const = default;

    std::string str() const {
        std::string out(size(), '0');
        for (std::size_t k = 0; k < size(); ++k) out[k] = static_cast<char>('0' + bits_[k]);
        return out;
    }

    std::size_t count_ones() const {
        std::size_t n = 0;
        for (Bit b : bits_) n += b;
        return n;
    }

    const std::vector<Bit>& bits() const { return bits_; }

private:
    std::vector<Bit> bits_;
};

/// XOR as a named operation (same contract as operator^).
inline BitString xor_strings(const BitString& a, const BitString& b) { return a ^ b; }

/// Bitwise complement as a named operation.
inline BitString complement(const BitString& a) { return ~a; }

/// Two-way selector: returns x when z = 0, y when z = 1.
inline Bit select_bit(Bit z, Bit x, Bit y) { return z ? y : x; }

/// Elementwise selector over equal-length strings.
inline BitString select_strings(const BitString& z, const BitString& x, const BitString& y) {
    detail::require_same_length("select", z.size(), x.size());
    detail::require_same_length("select", z.size(), y.size());
    BitString out(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) out.set(k, select_bit(z[k], x[k], y[k]));
    return out;
}

/// The subsequence of `a` at the given (0-based, strictly valid) positions.
inline BitString subsequence(const BitString& a, const std::vector<std::size_t>& positions) {
    BitString out;
    for (std::size_t k : positions) out.push_back(a.at(k));
    return out;
}

/// Number of positions where a and b differ; lengths must match.
inline std::size_t hamming_distance(const BitString& a, const BitString& b) {
    detail::require_same_length("hamming_distance", a.size(), b.size());
    std::size_t n = 0;
    for (std::size_t k = 0; k < a.size(); ++k) n += (a[k] != b[k]);
    return n;
}

/**
 * Deterministic random-bit source backed by std::mt19937_64, whose output
 * sequence is pinned by the C++ standard, so equal seeds give identical
 * streams on every platform. Not cryptographic; this is a simulation.
 *
 * Draw contract (transcripts must be bit-exact, so the mapping from engine
 * words to values is fixed):
 *   next_bit()      one engine word, returns its least significant bit
 *   uniform01()     one engine word, returns (word >> 11) * 2^-53
 *   bernoulli(p)    one engine word, true iff uniform01() < p
 *   next_index(n)   one engine word per rejection round (masked rejection)
 *
 * Single-owner: one source per party per session, never shared across threads.
 */
class RandomSource {
public:
    static constexpr std::string_view algorithm = "mt19937_64";

    explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

    Bit next_bit() { return static_cast<Bit>(engine_() & 1u); }

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform index in [0, bound); bound must be positive.
    std::size_t next_index(std::size_t bound) {
        if (bound == 0) throw std::invalid_argument("next_index: bound must be positive");
        if (bound == 1) return 0;
        const std::uint64_t mask =
            ~std::uint64_t{0} >> std::countl_zero(static_cast<std::uint64_t>(bound) - 1);
        for (;;) {
            const std::uint64_t v = engine_() & mask;
            if (v < bound) return static_cast<std::size_t>(v);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// n bits drawn from src (one engine word each, in position order).
inline BitString random_bitstring(RandomSource& src, std::size_t n) {
    BitString out(n);
    for (std::size_t k = 0; k < n; ++k) out.set(k, src.next_bit());
    return out;
}

/// SplitMix64 mixing step; used only for seed derivation, never as a stream.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Per-trial, per-party seed: splitmix64(splitmix64(splitmix64(master) ^ trial) ^ tag).
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index,
                                    std::uint64_t party_tag) {
    return splitmix64(splitmix64(splitmix64(master_seed) ^ trial_index) ^ party_tag);
}

}  // namespace qkd

#endif  // QKD_BITCORE_HPP
