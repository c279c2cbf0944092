#ifndef QKD_SWAP_HPP
#define QKD_SWAP_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "qkd/bitcore.hpp"
#include "qkd/seed.hpp"

namespace qkd {

// -------------------------------------------------------------------------
// Three-party key swapping.
//
// A central node runs one seeded session with each recipient, acting as the
// sender both times. Each session hands the centre the recipient's private
// basis string. The centre then announces the coincidence set: the indices
// (among those kept in both sessions) where the two recovered basis strings
// agree. On that set the recipients' basis strings are equal, so each
// recipient reads the shared key off its own private string and the centre
// knows it too. No recipient learns anything about the other's string
// outside the announced set.
// -------------------------------------------------------------------------

/// Indices, in ascending order, where the two recovered strings agree.
struct CoincidenceAnnouncement {
    std::vector<std::size_t> indices;
    bool operator==(const CoincidenceAnnouncement&) const = default;
};

/// Coincidence set of two equal-length strings restricted to candidate
/// indices (which must be ascending).
inline CoincidenceAnnouncement announce_coincidence(const BitString& first,
                                                    const BitString& second,
                                                    const std::vector<std::size_t>& candidates) {
    detail::require_same_length("coincidence", first.size(), second.size());
    CoincidenceAnnouncement ann;
    for (std::size_t k : candidates) {
        if (first.at(k) == second.at(k)) ann.indices.push_back(k);
    }
    return ann;
}

inline CoincidenceAnnouncement announce_coincidence(const BitString& first,
                                                    const BitString& second) {
    std::vector<std::size_t> all(first.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    return announce_coincidence(first, second, all);
}

struct SwapOptions {
    /// Reuse the centre's bases, values, seed and round-2 values in both
    /// sessions instead of drawing fresh strings for the second one.
    bool reuse_states = false;
};

struct SwapResult {
    SeedSessionResult session_a;  // centre <-> recipient A
    SeedSessionResult session_b;  // centre <-> recipient B
    /// Indices kept (not lost) in both sessions; the coincidence candidates.
    std::vector<std::size_t> kept_both;
    CoincidenceAnnouncement coincidence;
    /// Coincidences per candidate index; 0 when nothing was kept.
    double coincidence_rate = 0.0;
    /// The swapped key: each party's copy, equal on an error-free run.
    BitString central_key;
    BitString recipient_a_key;
    BitString recipient_b_key;
};

namespace detail {

/// The centre's full-length recovery of the recipient's basis string,
/// rebuilt from the public basis difference.
inline BitString recovered_bob_bases(const SeedSessionResult& session) {
    return session.round1.alice.bases ^ session.messages.basis_diff;
}

}  // namespace detail

/**
 * Runs the full three-party exchange of n pulses per session. Both seeded
 * sessions run without sacrifice; error estimation is the caller's business
 * when noise is in play. The centre's source emits the session-A strings
 * (bases, values, seed, round-2 values, in that order), then the session-B
 * strings unless reuse_states is set; each recipient's source plays the
 * receiver role of its session exactly as in run_seed_protocol_with.
 */
inline SwapResult run_swap(std::size_t n, RandomSource& src_central, RandomSource& src_a,
                           RandomSource& src_b, const ChannelModel& channel,
                           const AdversaryModel& adversary, const SwapOptions& options = {}) {
    SeedProtocolOptions session_options;
    session_options.sacrifice_fraction = 0.0;

    SeedSessionInputs inputs_a;
    inputs_a.alice_bases = random_bitstring(src_central, n);
    inputs_a.alice_values = random_bitstring(src_central, n);
    inputs_a.seed = random_bitstring(src_central, n);
    inputs_a.round2_values = random_bitstring(src_central, n);
    inputs_a.bob_bases = random_bitstring(src_a, n);

    SeedSessionInputs inputs_b = inputs_a;
    if (!options.reuse_states) {
        inputs_b.alice_bases = random_bitstring(src_central, n);
        inputs_b.alice_values = random_bitstring(src_central, n);
        inputs_b.seed = random_bitstring(src_central, n);
        inputs_b.round2_values = random_bitstring(src_central, n);
    }
    inputs_b.bob_bases = random_bitstring(src_b, n);

    SwapResult result;
    result.session_a = run_seed_protocol_with(inputs_a, channel, adversary, src_a, session_options);
    result.session_b = run_seed_protocol_with(inputs_b, channel, adversary, src_b, session_options);

    for (std::size_t k = 0; k < n; ++k) {
        if (result.session_a.discard_mask.at(k) == 0 && result.session_b.discard_mask.at(k) == 0) {
            result.kept_both.push_back(k);
        }
    }
    const BitString recovered_a = detail::recovered_bob_bases(result.session_a);
    const BitString recovered_b = detail::recovered_bob_bases(result.session_b);
    result.coincidence = announce_coincidence(recovered_a, recovered_b, result.kept_both);
    result.coincidence_rate =
        result.kept_both.empty()
            ? 0.0
            : static_cast<double>(result.coincidence.indices.size()) /
                  static_cast<double>(result.kept_both.size());

    result.central_key = subsequence(recovered_a, result.coincidence.indices);
    result.recipient_a_key =
        subsequence(result.session_a.round1.bob.bases, result.coincidence.indices);
    result.recipient_b_key =
        subsequence(result.session_b.round1.bob.bases, result.coincidence.indices);
    return result;
}

}  // namespace qkd

#endif  // QKD_SWAP_HPP
