#ifndef QKD_SEED_HPP
#define QKD_SEED_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qkd/bb84.hpp"
#include "qkd/bitcore.hpp"
#include "qkd/qsim.hpp"

namespace qkd {

// -------------------------------------------------------------------------
// Seeded second round.
//
// After one raw round (Alice: bases s / values i, Bob: bases m / outcomes a)
// a public seed x is announced and a second round is sent with
//     Alice bases  t = s ^ x        (fresh values j)
//     Bob   bases  n = ~(m ^ x)     (outcomes b).
// Complementing one side makes the rounds complementary per index:
// t_k == n_k exactly where s_k != m_k, so every index is measured in the
// sender's basis in exactly one of the two rounds and nothing is sifted
// away.
// -------------------------------------------------------------------------

inline BitString alice_round2_bases(const BitString& round1_bases, const BitString& seed) {
    return round1_bases ^ seed;
}

inline BitString bob_round2_bases(const BitString& round1_bases, const BitString& seed) {
    return complement(round1_bases ^ seed);
}

/// Strings a fully injected session runs from; everything else is derived.
struct SeedSessionInputs {
    BitString alice_bases;    // round-1 encoding bases
    BitString alice_values;   // round-1 encoded values
    BitString bob_bases;      // round-1 measurement bases
    BitString seed;           // public seed for the second round
    BitString round2_values;  // Alice's fresh round-2 values
};

/// Noise-free measurement outcomes for both rounds. Outcomes of pulses
/// measured in the sender's basis are forced by the protocol; the caller
/// supplies the coin results for the rest, making traces fully reproducible
/// without any random source.
struct IdealOutcomes {
    BitString bob_round1;
    BitString bob_round2;
};

inline IdealOutcomes ideal_outcomes(const SeedSessionInputs& in, const BitString& forced_round1,
                                    const BitString& forced_round2) {
    const std::size_t n = in.alice_bases.size();
    detail::require_same_length("ideal outcomes", n, forced_round1.size());
    detail::require_same_length("ideal outcomes", n, forced_round2.size());
    BitString a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
        const bool round1_matched = in.alice_bases.at(k) == in.bob_bases.at(k);
        a.set(k, round1_matched ? in.alice_values.at(k) : forced_round1.at(k));
        b.set(k, round1_matched ? forced_round2.at(k) : in.round2_values.at(k));
    }
    return {std::move(a), std::move(b)};
}

// -------------------------------------------------------------------------
// Private reconciliation.
//
// The classical phase turns the two rounds into four full-length shared
// keys without revealing them. With f the positionwise selector
// (f(z,x,y) = x where z=0, y where z=1):
//     Alice -> Bob   y = i ^ j
//     Bob   -> Alice u = n ^ f(m, a, b^y),  v = n ^ f(m, b, a^y)
//     Alice          recovered_m = t ^ f(s, ~i ^ u, j ^ v)
//     Alice -> Bob   l = s ^ recovered_m
//     Bob            recovered_s = m ^ l
//                    recovered_i = f(l, a, b^y)
//                    recovered_j = f(l, a^y, b)
// On an error-free run the recovered strings equal (m, s, i, j) exactly.
// -------------------------------------------------------------------------

/// Classical messages of the reconciliation phase, in announcement order.
struct ClassicalExchange {
    BitString value_mask;       // y: XOR of Alice's two value strings
    BitString bob_mask_first;   // u: Bob's first masked announcement
    BitString bob_mask_second;  // v: Bob's second masked announcement
    BitString basis_diff;       // l: Alice's basis string XOR her recovery of Bob's
    bool operator==(const ClassicalExchange&) const = default;
};

/// One party's copy of the four reconciled keys, each named after the
/// private string it reproduces.
struct KeyBundle {
    BitString bob_bases;     // Bob's round-1 basis string
    BitString alice_bases;   // Alice's round-1 basis string
    BitString alice_values;  // Alice's round-1 value string
    BitString alice_round2;  // Alice's round-2 value string
    bool operator==(const KeyBundle&) const = default;
};

inline BitString alice_send_value_mask(const BitString& alice_values,
                                       const BitString& round2_values) {
    return alice_values ^ round2_values;
}

inline std::pair<BitString, BitString> bob_encrypt_masks(const BitString& bob_bases_round1,
                                                         const BitString& bob_bases_round2,
                                                         const BitString& outcomes_round1,
                                                         const BitString& outcomes_round2,
                                                         const BitString& value_mask) {
    const BitString first =
        bob_bases_round2 ^ select_strings(bob_bases_round1, outcomes_round1,
                                          outcomes_round2 ^ value_mask);
    const BitString second =
        bob_bases_round2 ^ select_strings(bob_bases_round1, outcomes_round2,
                                          outcomes_round1 ^ value_mask);
    return {first, second};
}

inline BitString alice_decrypt_bob_bases(const BitString& alice_bases,
                                         const BitString& alice_values,
                                         const BitString& round2_values,
                                         const BitString& alice_bases_round2,
                                         const BitString& mask_first,
                                         const BitString& mask_second) {
    return alice_bases_round2 ^ select_strings(alice_bases, complement(alice_values) ^ mask_first,
                                               round2_values ^ mask_second);
}

/// Everything Bob recovers once the basis difference l is public.
inline KeyBundle bob_recover_keys(const BitString& bob_bases, const BitString& outcomes_round1,
                                  const BitString& outcomes_round2, const BitString& value_mask,
                                  const BitString& basis_diff) {
    KeyBundle keys;
    keys.bob_bases = bob_bases;
    keys.alice_bases = bob_bases ^ basis_diff;
    keys.alice_values = select_strings(basis_diff, outcomes_round1, outcomes_round2 ^ value_mask);
    keys.alice_round2 = select_strings(basis_diff, outcomes_round1 ^ value_mask, outcomes_round2);
    return keys;
}

/// Full-length reconciliation transcript and both parties' key copies.
struct Reconciliation {
    ClassicalExchange messages;
    KeyBundle alice;  // recovered Bob strings plus Alice's own
    KeyBundle bob;    // Bob's own strings plus recovered Alice ones
};

inline Reconciliation private_reconciliation(const RawExchange& round1, const BitString& seed,
                                             const RawExchange& round2) {
    Reconciliation rec;
    rec.messages.value_mask =
        alice_send_value_mask(round1.alice.values, round2.alice.values);
    auto [first, second] =
        bob_encrypt_masks(round1.bob.bases, round2.bob.bases, round1.bob.outcomes,
                          round2.bob.outcomes, rec.messages.value_mask);
    rec.messages.bob_mask_first = std::move(first);
    rec.messages.bob_mask_second = std::move(second);

    rec.alice.bob_bases = alice_decrypt_bob_bases(
        round1.alice.bases, round1.alice.values, round2.alice.values, round2.alice.bases,
        rec.messages.bob_mask_first, rec.messages.bob_mask_second);
    rec.messages.basis_diff = round1.alice.bases ^ rec.alice.bob_bases;
    rec.alice.alice_bases = round1.alice.bases;
    rec.alice.alice_values = round1.alice.values;
    rec.alice.alice_round2 = round2.alice.values;

    rec.bob = bob_recover_keys(round1.bob.bases, round1.bob.outcomes, round2.bob.outcomes,
                               rec.messages.value_mask, rec.messages.basis_diff);
    return rec;
}

/// Runs both rounds noise-free with forced coin outcomes and reconciles.
inline Reconciliation ideal_trace(const SeedSessionInputs& in, const BitString& forced_round1,
                                  const BitString& forced_round2) {
    const std::size_t n = in.alice_bases.size();
    const IdealOutcomes outcomes = ideal_outcomes(in, forced_round1, forced_round2);
    const RawExchange round1{{in.alice_bases, in.alice_values},
                             {in.bob_bases, outcomes.bob_round1, BitString(n)}};
    const RawExchange round2{{alice_round2_bases(in.alice_bases, in.seed), in.round2_values},
                             {bob_round2_bases(in.bob_bases, in.seed), outcomes.bob_round2,
                              BitString(n)}};
    return private_reconciliation(round1, in.seed, round2);
}

// -------------------------------------------------------------------------
// Full session driver.
// -------------------------------------------------------------------------

struct SeedProtocolOptions {
    /// Share of each reconciled key disclosed for error estimation.
    /// 0 disables estimation (and with it the abort check).
    double sacrifice_fraction = 0.5;
    /// Session aborts when any key's measured error rate exceeds this.
    double abort_threshold = 0.11;
    /// Which party's source the public seed is drawn from.
    enum class Publisher { alice, bob } publisher = Publisher::alice;
};

inline void validate(const SeedProtocolOptions& options) {
    if (!(options.sacrifice_fraction >= 0.0 && options.sacrifice_fraction <= 1.0)) {
        throw std::invalid_argument("seed protocol: sacrifice fraction must be in [0,1]");
    }
    if (!(options.abort_threshold >= 0.0 && options.abort_threshold <= 1.0)) {
        throw std::invalid_argument("seed protocol: abort threshold must be in [0,1]");
    }
}

/// Per-key disagreement rates measured during sacrifice, in key order.
struct SeedKeyQber {
    double bob_bases = 0.0;
    double alice_bases = 0.0;
    double alice_values = 0.0;
    double alice_round2 = 0.0;

    double max_rate() const {
        double m = bob_bases;
        if (alice_bases > m) m = alice_bases;
        if (alice_values > m) m = alice_values;
        if (alice_round2 > m) m = alice_round2;
        return m;
    }
};

struct SeedSessionResult {
    RawExchange round1;
    BitString seed;
    RawExchange round2;
    ClassicalExchange messages;
    BitString discard_mask;                 // erased in either round, Bob-announced
    std::vector<std::size_t> kept_indices;  // complement of the discard mask
    /// Final keys after discards, sacrifice and the abort check. Cleared on
    /// abort; equal between parties exactly when the run was error-free.
    KeyBundle alice_keys;
    KeyBundle bob_keys;
    std::optional<SeedKeyQber> qber;  // present when estimation ran
    SeedProtocolOptions::Publisher seed_publisher = SeedProtocolOptions::Publisher::alice;
    bool aborted = false;
    /// Reconciled length over pulses sent, before any sacrifice.
    double yield = 0.0;
    EveLog eve_round1;
    EveLog eve_round2;
};

namespace detail {

inline KeyBundle restrict_bundle(const KeyBundle& keys, const std::vector<std::size_t>& kept) {
    return {subsequence(keys.bob_bases, kept), subsequence(keys.alice_bases, kept),
            subsequence(keys.alice_values, kept), subsequence(keys.alice_round2, kept)};
}

/// Reconciliation, discards, sacrifice and the abort decision; the part of
/// the session after both photon rounds. Estimation coins come from src_b.
inline SeedSessionResult finish_seed_session(RawExchange round1, BitString seed,
                                             RawExchange round2, EveLog eve_round1,
                                             EveLog eve_round2,
                                             const SeedProtocolOptions& options,
                                             RandomSource& src_b) {
    validate(options);
    SeedSessionResult result;
    result.seed_publisher = options.publisher;
    const std::size_t n = round1.alice.bases.size();
    Reconciliation rec = private_reconciliation(round1, seed, round2);
    result.messages = std::move(rec.messages);

    result.discard_mask = BitString(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Bit lost = round1.bob.erased.at(k) | round2.bob.erased.at(k);
        result.discard_mask.set(k, lost);
        if (!lost) result.kept_indices.push_back(k);
    }
    result.yield =
        n == 0 ? 0.0
               : static_cast<double>(result.kept_indices.size()) / static_cast<double>(n);

    result.alice_keys = restrict_bundle(rec.alice, result.kept_indices);
    result.bob_keys = restrict_bundle(rec.bob, result.kept_indices);

    if (options.sacrifice_fraction > 0.0 && !result.kept_indices.empty()) {
        SeedKeyQber qber;
        const double f = options.sacrifice_fraction;
        auto sacrifice = [&](BitString& a, BitString& b, double& rate) {
            const QberEstimate est = estimate_qber(a, b, f, src_b);
            rate = est.qber;
            a = est.remaining_a;
            b = est.remaining_b;
        };
        sacrifice(result.alice_keys.bob_bases, result.bob_keys.bob_bases, qber.bob_bases);
        sacrifice(result.alice_keys.alice_bases, result.bob_keys.alice_bases, qber.alice_bases);
        sacrifice(result.alice_keys.alice_values, result.bob_keys.alice_values,
                  qber.alice_values);
        sacrifice(result.alice_keys.alice_round2, result.bob_keys.alice_round2,
                  qber.alice_round2);
        result.qber = qber;
        result.aborted = qber.max_rate() > options.abort_threshold;
        if (result.aborted) {
            result.alice_keys = KeyBundle{};
            result.bob_keys = KeyBundle{};
        }
    }

    result.round1 = std::move(round1);
    result.seed = std::move(seed);
    result.round2 = std::move(round2);
    result.eve_round1 = std::move(eve_round1);
    result.eve_round2 = std::move(eve_round2);
    return result;
}

}  // namespace detail

/**
 * Runs a session from fully injected strings. Only channel, adversary,
 * mismatched-measurement and estimation coins are drawn, all from src_b
 * (round 1 first, then round 2, then estimation).
 */
inline SeedSessionResult run_seed_protocol_with(const SeedSessionInputs& in,
                                                const ChannelModel& channel,
                                                const AdversaryModel& adversary,
                                                RandomSource& src_b,
                                                const SeedProtocolOptions& options = {}) {
    const std::size_t n = in.alice_bases.size();
    detail::require_same_length("seed session", n, in.alice_values.size());
    detail::require_same_length("seed session", n, in.bob_bases.size());
    detail::require_same_length("seed session", n, in.seed.size());
    detail::require_same_length("seed session", n, in.round2_values.size());
    EveLog eve1, eve2;
    RawExchange round1 = raw_exchange_with(in.alice_bases, in.alice_values, in.bob_bases, channel,
                                           adversary, src_b, &eve1);
    RawExchange round2 = raw_exchange_with(alice_round2_bases(in.alice_bases, in.seed),
                                           in.round2_values, bob_round2_bases(in.bob_bases, in.seed),
                                           channel, adversary, src_b, &eve2);
    return detail::finish_seed_session(std::move(round1), in.seed, std::move(round2),
                                       std::move(eve1), std::move(eve2), options, src_b);
}

/**
 * Runs a fully random session of n pulses. Draw order is part of the
 * contract: src_a emits Alice's round-1 bases, round-1 values, the seed
 * (when Alice publishes it) and her round-2 values, in that order and
 * nothing else. src_b emits Bob's round-1 bases, the round-1 channel and
 * measurement coins, the seed when Bob publishes it, the round-2 coins and
 * finally the estimation coins.
 */
inline SeedSessionResult run_seed_protocol(std::size_t n, RandomSource& src_a,
                                           RandomSource& src_b, const ChannelModel& channel,
                                           const AdversaryModel& adversary,
                                           const SeedProtocolOptions& options = {}) {
    validate(options);
    BitString alice_bases = random_bitstring(src_a, n);
    BitString alice_values = random_bitstring(src_a, n);
    BitString bob_bases = random_bitstring(src_b, n);
    EveLog eve1, eve2;
    RawExchange round1 =
        raw_exchange_with(std::move(alice_bases), std::move(alice_values), std::move(bob_bases),
                          channel, adversary, src_b, &eve1);
    const BitString seed = options.publisher == SeedProtocolOptions::Publisher::alice
                               ? random_bitstring(src_a, n)
                               : random_bitstring(src_b, n);
    BitString round2_values = random_bitstring(src_a, n);
    RawExchange round2 = raw_exchange_with(alice_round2_bases(round1.alice.bases, seed),
                                           std::move(round2_values),
                                           bob_round2_bases(round1.bob.bases, seed), channel,
                                           adversary, src_b, &eve2);
    return detail::finish_seed_session(std::move(round1), seed, std::move(round2),
                                       std::move(eve1), std::move(eve2), options, src_b);
}

}  // namespace qkd

#endif  // QKD_SEED_HPP
