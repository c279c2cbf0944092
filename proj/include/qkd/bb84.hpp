#ifndef QKD_BB84_HPP
#define QKD_BB84_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qkd/bitcore.hpp"
#include "qkd/qsim.hpp"

namespace qkd {

/// Sender side of one photon round: bases[k] picks the encoding basis of
/// pulse k, values[k] the encoded bit.
struct AliceRawState {
    BitString bases;
    BitString values;
};

/// Receiver side of one photon round. outcomes[k] is the measured bit in
/// basis bases[k]; where erased[k] is 1 the pulse was lost and outcomes[k]
/// is a 0 placeholder that no later step may read.
struct BobRawState {
    BitString bases;
    BitString outcomes;
    BitString erased;
};

struct RawExchange {
    AliceRawState alice;
    BobRawState bob;
};

/**
 * Runs one photon round with every random string injected by the caller:
 * Alice sends encode(alice_bases[k], alice_values[k]) for each k, the pulse
 * crosses the channel (and adversary), and Bob measures survivors in
 * bob_bases[k]. Only channel, adversary and mismatched-measurement coins are
 * drawn, all from src_b, pulse by pulse in index order.
 */
inline RawExchange raw_exchange_with(BitString alice_bases, BitString alice_values,
                                     BitString bob_bases, const ChannelModel& channel,
                                     const AdversaryModel& adversary, RandomSource& src_b,
                                     EveLog* eve_log = nullptr) {
    detail::require_same_length("raw exchange bases/values", alice_bases.size(),
                                alice_values.size());
    detail::require_same_length("raw exchange alice/bob", alice_bases.size(), bob_bases.size());
    validate(channel);
    validate(adversary);
    const std::size_t n = alice_bases.size();
    BitString outcomes(n);
    BitString erased(n);
    for (std::size_t k = 0; k < n; ++k) {
        Pulse pulse{k, encode(alice_bases.at(k), alice_values.at(k)), Round::raw};
        pulse = transmit(pulse, channel, adversary, src_b, eve_log);
        if (pulse.erased()) {
            erased.set(k, 1);
        } else {
            outcomes.set(k, measure_pulse(pulse, basis_from_bit(bob_bases.at(k)), src_b));
        }
    }
    return {{std::move(alice_bases), std::move(alice_values)},
            {std::move(bob_bases), std::move(outcomes), std::move(erased)}};
}

/**
 * Full random raw exchange of n pulses. Draw order is part of the contract:
 * Alice's source emits her basis string then her value string; Bob's source
 * emits his basis string, then all per-pulse channel and measurement coins.
 */
inline RawExchange bb84_raw_exchange(std::size_t n, RandomSource& src_a, RandomSource& src_b,
                                     const ChannelModel& channel, const AdversaryModel& adversary,
                                     EveLog* eve_log = nullptr) {
    BitString alice_bases = random_bitstring(src_a, n);
    BitString alice_values = random_bitstring(src_a, n);
    BitString bob_bases = random_bitstring(src_b, n);
    return raw_exchange_with(std::move(alice_bases), std::move(alice_values),
                             std::move(bob_bases), channel, adversary, src_b, eve_log);
}

/// Basis reconciliation result: indices both parties keep, and each side's
/// key restricted to them. Keys agree whenever the channel was error-free.
struct SiftResult {
    std::vector<std::size_t> kept_indices;
    BitString alice_key;
    BitString bob_key;
};

/// Keeps exactly the pulses that arrived and were measured in the sender's
/// basis; the sifted keys are the value/outcome strings on those indices.
inline SiftResult bb84_sift(const AliceRawState& alice, const BobRawState& bob) {
    detail::require_same_length("sift", alice.bases.size(), bob.bases.size());
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < alice.bases.size(); ++k) {
        if (bob.erased.at(k) == 0 && alice.bases.at(k) == bob.bases.at(k)) kept.push_back(k);
    }
    return {kept, subsequence(alice.values, kept), subsequence(bob.outcomes, kept)};
}

/// Result of sacrificing part of a key pair to measure its error rate.
struct QberEstimate {
    double qber = 0.0;
    BitString remaining_a;
    BitString remaining_b;
    std::vector<std::size_t> disclosed;  // sorted ascending
};

/**
 * Publicly compares ceil(fraction * length) positions chosen uniformly
 * without replacement (a partial Fisher-Yates shuffle driven by src) and
 * reports the observed disagreement rate. Disclosed positions are removed
 * from both remaining keys. fraction must satisfy 0 < fraction <= 1 and the
 * keys must be equal-length and non-empty.
 */
inline QberEstimate estimate_qber(const BitString& key_a, const BitString& key_b, double fraction,
                                  RandomSource& src) {
    detail::require_same_length("error estimate", key_a.size(), key_b.size());
    if (key_a.empty()) {
        throw std::invalid_argument("error estimate: keys are empty");
    }
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("error estimate: fraction must be in (0,1]");
    }
    const std::size_t n = key_a.size();
    std::size_t count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    if (count > n) count = n;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t t = 0; t < count; ++t) {
        const std::size_t r = t + src.next_index(n - t);
        std::swap(order[t], order[r]);
    }
    QberEstimate est;
    est.disclosed.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(est.disclosed.begin(), est.disclosed.end());

    std::size_t mismatches = 0;
    for (std::size_t pos : est.disclosed) {
        mismatches += key_a.at(pos) != key_b.at(pos);
    }
    est.qber = static_cast<double>(mismatches) / static_cast<double>(count);

    std::vector<std::size_t> keep;
    keep.reserve(n - count);
    std::size_t next_disclosed = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (next_disclosed < est.disclosed.size() && est.disclosed[next_disclosed] == k) {
            ++next_disclosed;
        } else {
            keep.push_back(k);
        }
    }
    est.remaining_a = subsequence(key_a, keep);
    est.remaining_b = subsequence(key_b, keep);
    return est;
}

}  // namespace qkd

#endif  // QKD_BB84_HPP
