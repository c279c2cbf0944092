#ifndef QKD_HARNESS_HPP
#define QKD_HARNESS_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qkd/bb84.hpp"
#include "qkd/bitcore.hpp"
#include "qkd/seed.hpp"
#include "qkd/swap.hpp"
#include "qkd/transcript.hpp"

namespace qkd {

/// Seed-derivation tags, one per simulated party role.
namespace party_tag {
inline constexpr std::uint64_t alice = 0x0A11CE;
inline constexpr std::uint64_t bob = 0x0B0B;
inline constexpr std::uint64_t central = 0xCC;
inline constexpr std::uint64_t recipient_a = 0x1A;
inline constexpr std::uint64_t recipient_b = 0x1B;
}  // namespace party_tag

/// Three-sigma half-width of a binomial rate estimate at probability p over
/// n samples. Infinite when there are no samples.
inline double three_sigma(double p, std::size_t n) {
    if (n == 0) return std::numeric_limits<double>::infinity();
    return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

inline BitString mask_from_indices(std::size_t length, const std::vector<std::size_t>& indices) {
    BitString mask(length);
    for (std::size_t k : indices) mask.set(k, 1);
    return mask;
}

// -------------------------------------------------------------------------
// Plain sifted-key session, for the baseline protocol.
// -------------------------------------------------------------------------

struct Bb84SessionResult {
    RawExchange exchange;
    SiftResult sift;
    /// Final keys after sacrifice and the abort check; cleared on abort.
    BitString alice_key;
    BitString bob_key;
    std::optional<double> qber;
    bool aborted = false;
    /// Sifted length over pulses sent, before any sacrifice.
    double yield = 0.0;
    EveLog eve;
};

/// Raw exchange, sift, optional sacrifice, abort check. The publisher
/// option plays no part here; sacrifice and threshold act as in the seeded
/// session.
inline Bb84SessionResult run_bb84_session(std::size_t n, RandomSource& src_a, RandomSource& src_b,
                                          const ChannelModel& channel,
                                          const AdversaryModel& adversary,
                                          const SeedProtocolOptions& options = {}) {
    validate(options);
    Bb84SessionResult r;
    r.exchange = bb84_raw_exchange(n, src_a, src_b, channel, adversary, &r.eve);
    r.sift = bb84_sift(r.exchange.alice, r.exchange.bob);
    r.yield = n == 0 ? 0.0
                     : static_cast<double>(r.sift.kept_indices.size()) / static_cast<double>(n);
    r.alice_key = r.sift.alice_key;
    r.bob_key = r.sift.bob_key;
    if (options.sacrifice_fraction > 0.0 && !r.alice_key.empty()) {
        const QberEstimate est =
            estimate_qber(r.alice_key, r.bob_key, options.sacrifice_fraction, src_b);
        r.qber = est.qber;
        r.alice_key = est.remaining_a;
        r.bob_key = est.remaining_b;
        r.aborted = est.qber > options.abort_threshold;
        if (r.aborted) {
            r.alice_key = BitString{};
            r.bob_key = BitString{};
        }
    }
    return r;
}

// -------------------------------------------------------------------------
// Transcript assembly.
// -------------------------------------------------------------------------

inline std::vector<TranscriptEvent> bb84_session_events(const Bb84SessionResult& r,
                                                        const std::string& alice = "alice",
                                                        const std::string& bob = "bob") {
    const std::size_t n = r.exchange.alice.bases.size();
    std::vector<TranscriptEvent> events;
    events.push_back(make_event("raw", alice, "bases", r.exchange.alice.bases));
    events.push_back(make_event("raw", alice, "values", r.exchange.alice.values));
    events.push_back(make_event("raw", bob, "bases", r.exchange.bob.bases));
    events.push_back(make_event("raw", bob, "outcomes", r.exchange.bob.outcomes));
    events.push_back(make_event("raw", bob, "erased", r.exchange.bob.erased));
    events.push_back(make_event("sift", bob + "->" + alice, "kept",
                                mask_from_indices(n, r.sift.kept_indices)));
    return events;
}

inline SessionRecord record_bb84_session(const Bb84SessionResult& r) {
    SessionRecord rec;
    rec.events = bb84_session_events(r);
    rec.summary.set("protocol", std::string("bb84"));
    rec.summary.set("n", static_cast<std::uint64_t>(r.exchange.alice.bases.size()));
    rec.summary.set("sifted", static_cast<std::uint64_t>(r.sift.kept_indices.size()));
    rec.summary.set("yield", r.yield);
    if (r.qber) rec.summary.set("qber", *r.qber);
    rec.summary.set("aborted", r.aborted);
    rec.summary.set("key_bits", static_cast<std::uint64_t>(r.alice_key.size()));
    return rec;
}

inline std::vector<TranscriptEvent> seed_session_events(const SeedSessionResult& r,
                                                        const std::string& alice = "alice",
                                                        const std::string& bob = "bob",
                                                        const std::string& phase_prefix = "") {
    const std::string a2b = alice + "->" + bob;
    const std::string b2a = bob + "->" + alice;
    const bool alice_published = r.seed_publisher == SeedProtocolOptions::Publisher::alice;
    std::vector<TranscriptEvent> events;
    auto add = [&](const std::string& phase, const std::string& sender, const std::string& name,
                   const BitString& bits) {
        events.push_back(make_event(phase_prefix + phase, sender, name, bits));
    };
    add("round1", alice, "bases", r.round1.alice.bases);
    add("round1", alice, "values", r.round1.alice.values);
    add("round1", bob, "bases", r.round1.bob.bases);
    add("round1", bob, "outcomes", r.round1.bob.outcomes);
    add("round1", bob, "erased", r.round1.bob.erased);
    add("seed", alice_published ? a2b : b2a, "seed", r.seed);
    add("round2", alice, "bases", r.round2.alice.bases);
    add("round2", alice, "values", r.round2.alice.values);
    add("round2", bob, "bases", r.round2.bob.bases);
    add("round2", bob, "outcomes", r.round2.bob.outcomes);
    add("round2", bob, "erased", r.round2.bob.erased);
    add("reconcile", a2b, "value_mask", r.messages.value_mask);
    add("reconcile", b2a, "mask_first", r.messages.bob_mask_first);
    add("reconcile", b2a, "mask_second", r.messages.bob_mask_second);
    add("reconcile", a2b, "basis_diff", r.messages.basis_diff);
    add("reconcile", b2a, "discard", r.discard_mask);
    return events;
}

inline SessionRecord record_seed_session(const SeedSessionResult& r) {
    SessionRecord rec;
    rec.events = seed_session_events(r);
    rec.summary.set("protocol", std::string("seed"));
    rec.summary.set("n", static_cast<std::uint64_t>(r.round1.alice.bases.size()));
    rec.summary.set("kept", static_cast<std::uint64_t>(r.kept_indices.size()));
    rec.summary.set("yield", r.yield);
    if (r.qber) {
        rec.summary.set("qber_bob_bases", r.qber->bob_bases);
        rec.summary.set("qber_alice_bases", r.qber->alice_bases);
        rec.summary.set("qber_alice_values", r.qber->alice_values);
        rec.summary.set("qber_alice_round2", r.qber->alice_round2);
    }
    rec.summary.set("aborted", r.aborted);
    rec.summary.set("key_bits", static_cast<std::uint64_t>(r.alice_keys.bob_bases.size()));
    return rec;
}

inline SessionRecord record_swap_session(const SwapResult& r) {
    const std::size_t n = r.session_a.round1.alice.bases.size();
    SessionRecord rec;
    rec.events = seed_session_events(r.session_a, "central", "recipient_a", "a_");
    const std::vector<TranscriptEvent> side_b =
        seed_session_events(r.session_b, "central", "recipient_b", "b_");
    rec.events.insert(rec.events.end(), side_b.begin(), side_b.end());
    rec.events.push_back(
        make_event("swap", "central", "kept_both", mask_from_indices(n, r.kept_both)));
    rec.events.push_back(make_event("swap", "central->recipients", "coincidence",
                                    mask_from_indices(n, r.coincidence.indices)));
    rec.summary.set("protocol", std::string("swap"));
    rec.summary.set("n", static_cast<std::uint64_t>(n));
    rec.summary.set("kept_both", static_cast<std::uint64_t>(r.kept_both.size()));
    rec.summary.set("coincidences", static_cast<std::uint64_t>(r.coincidence.indices.size()));
    rec.summary.set("coincidence_rate", r.coincidence_rate);
    rec.summary.set("key_bits", static_cast<std::uint64_t>(r.central_key.size()));
    const bool match =
        r.central_key == r.recipient_a_key && r.central_key == r.recipient_b_key;
    rec.summary.set("keys_match", match);
    return rec;
}

// -------------------------------------------------------------------------
// Monte Carlo experiment runner.
// -------------------------------------------------------------------------

enum class ProtocolKind { bb84, seed, swap };

inline std::string protocol_name(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::bb84: return "bb84";
        case ProtocolKind::seed: return "seed";
        case ProtocolKind::swap: return "swap";
    }
    throw std::logic_error("protocol_name: bad enum value");
}

inline ProtocolKind protocol_from_name(std::string_view name) {
    if (name == "bb84") return ProtocolKind::bb84;
    if (name == "seed") return ProtocolKind::seed;
    if (name == "swap") return ProtocolKind::swap;
    throw std::invalid_argument("unknown protocol '" + std::string(name) + "'");
}

inline std::string adversary_name(const AdversaryModel& adversary) {
    switch (adversary.strategy) {
        case EveStrategy::none: return "none";
        case EveStrategy::intercept_resend_random: return "ir-random";
        case EveStrategy::intercept_resend_fixed:
            return adversary.fixed_basis == Basis::computational ? "ir-fixed0" : "ir-fixed1";
    }
    throw std::logic_error("adversary_name: bad enum value");
}

inline EveStrategy eve_strategy_from_name(std::string_view name, Basis* fixed_basis) {
    if (name == "none") return EveStrategy::none;
    if (name == "ir-random") return EveStrategy::intercept_resend_random;
    if (name == "ir-fixed0" || name == "ir-fixed1") {
        if (fixed_basis) *fixed_basis = name == "ir-fixed0" ? Basis::computational : Basis::diagonal;
        return EveStrategy::intercept_resend_fixed;
    }
    throw std::invalid_argument("unknown adversary '" + std::string(name) + "'");
}

struct ExperimentConfig {
    ProtocolKind protocol = ProtocolKind::seed;
    std::size_t pulses = 1024;  // per session and trial
    std::size_t trials = 1;
    ChannelModel channel;
    AdversaryModel adversary;
    SeedProtocolOptions session;
    SwapOptions swap;
    std::uint64_t master_seed = 1;
};

inline void validate(const ExperimentConfig& config) {
    if (config.trials == 0) {
        throw std::invalid_argument("experiment: at least one trial is required");
    }
    validate(config.channel);
    validate(config.adversary);
    validate(config.session);
}

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 below two values
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

inline Stats summarize(const std::vector<double>& values) {
    Stats s;
    s.count = values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    s.min = values.front();
    s.max = values.front();
    for (double v : values) {
        sum += v;
        if (v < s.min) s.min = v;
        if (v > s.max) s.max = v;
    }
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    return s;
}

/// One per-trial metric: every observed value plus its summary statistics.
struct MetricSeries {
    std::string name;
    std::vector<double> values;
    Stats stats;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<MetricSeries> metrics;  // insertion order, fixed per protocol

    const MetricSeries* find(std::string_view name) const {
        for (const MetricSeries& m : metrics) {
            if (m.name == name) return &m;
        }
        return nullptr;
    }
};

/**
 * Runs config.trials independent sessions and aggregates per-trial metrics.
 * Trial t of party p draws from RandomSource(derive_seed(master_seed, t,
 * tag_p)), so any trial can be replayed in isolation. Metrics that a trial
 * does not produce (error rates with estimation disabled, say) are simply
 * absent from that trial's series.
 */
inline ExperimentReport run_experiment(const ExperimentConfig& config) {
    validate(config);
    ExperimentReport report;
    report.config = config;
    auto add = [&report](std::string_view name, double value) {
        for (MetricSeries& m : report.metrics) {
            if (m.name == name) {
                m.values.push_back(value);
                return;
            }
        }
        report.metrics.push_back({std::string(name), {value}, {}});
    };

    for (std::size_t trial = 0; trial < config.trials; ++trial) {
        switch (config.protocol) {
            case ProtocolKind::bb84: {
                RandomSource src_a(derive_seed(config.master_seed, trial, party_tag::alice));
                RandomSource src_b(derive_seed(config.master_seed, trial, party_tag::bob));
                const Bb84SessionResult r = run_bb84_session(
                    config.pulses, src_a, src_b, config.channel, config.adversary, config.session);
                add("yield", r.yield);
                if (r.qber) add("qber", *r.qber);
                add("aborted", r.aborted ? 1.0 : 0.0);
                add("final_key_bits", static_cast<double>(r.alice_key.size()));
                break;
            }
            case ProtocolKind::seed: {
                RandomSource src_a(derive_seed(config.master_seed, trial, party_tag::alice));
                RandomSource src_b(derive_seed(config.master_seed, trial, party_tag::bob));
                const SeedSessionResult r =
                    run_seed_protocol(config.pulses, src_a, src_b, config.channel,
                                      config.adversary, config.session);
                add("yield", r.yield);
                if (r.qber) {
                    add("qber_bob_bases", r.qber->bob_bases);
                    add("qber_alice_bases", r.qber->alice_bases);
                    add("qber_alice_values", r.qber->alice_values);
                    add("qber_alice_round2", r.qber->alice_round2);
                }
                add("aborted", r.aborted ? 1.0 : 0.0);
                add("final_key_bits", static_cast<double>(r.alice_keys.bob_bases.size()));
                break;
            }
            case ProtocolKind::swap: {
                RandomSource src_c(derive_seed(config.master_seed, trial, party_tag::central));
                RandomSource src_a(derive_seed(config.master_seed, trial, party_tag::recipient_a));
                RandomSource src_b(derive_seed(config.master_seed, trial, party_tag::recipient_b));
                const SwapResult r = run_swap(config.pulses, src_c, src_a, src_b, config.channel,
                                              config.adversary, config.swap);
                add("kept_rate", config.pulses == 0
                                     ? 0.0
                                     : static_cast<double>(r.kept_both.size()) /
                                           static_cast<double>(config.pulses));
                add("coincidence_rate", r.coincidence_rate);
                add("key_bits", static_cast<double>(r.central_key.size()));
                const bool match = r.central_key == r.recipient_a_key &&
                                   r.central_key == r.recipient_b_key;
                add("keys_match", match ? 1.0 : 0.0);
                break;
            }
        }
    }
    for (MetricSeries& m : report.metrics) m.stats = summarize(m.values);
    return report;
}

// -------------------------------------------------------------------------
// Report serialization.
// -------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const ExperimentReport& report) {
    nlohmann::ordered_json j;
    const ExperimentConfig& c = report.config;
    j["config"] = {
        {"protocol", protocol_name(c.protocol)},
        {"pulses", c.pulses},
        {"trials", c.trials},
        {"flip", c.channel.flip_probability},
        {"loss", c.channel.loss_probability},
        {"eve", adversary_name(c.adversary)},
        {"eve_fraction", c.adversary.attack_fraction},
        {"sacrifice", c.session.sacrifice_fraction},
        {"threshold", c.session.abort_threshold},
        {"publisher",
         c.session.publisher == SeedProtocolOptions::Publisher::alice ? "alice" : "bob"},
        {"reuse_states", c.swap.reuse_states},
        {"master_seed", c.master_seed},
    };
    j["metrics"] = nlohmann::ordered_json::array();
    for (const MetricSeries& m : report.metrics) {
        nlohmann::ordered_json jm;
        jm["name"] = m.name;
        jm["count"] = m.stats.count;
        jm["mean"] = m.stats.mean;
        jm["stddev"] = m.stats.stddev;
        jm["min"] = m.stats.min;
        jm["max"] = m.stats.max;
        jm["values"] = m.values;
        j["metrics"].push_back(std::move(jm));
    }
    return j;
}

inline std::string report_json(const ExperimentReport& report) {
    return to_json(report).dump(2) + "\n";
}

/// Short fixed-format text rendering, one metric per line.
inline std::string report_text(const ExperimentReport& report) {
    std::string out = "protocol=" + protocol_name(report.config.protocol) +
                      " pulses=" + std::to_string(report.config.pulses) +
                      " trials=" + std::to_string(report.config.trials) + "\n";
    for (const MetricSeries& m : report.metrics) {
        out += m.name;
        out += ": mean=" + detail::format_double(m.stats.mean);
        out += " stddev=" + detail::format_double(m.stats.stddev);
        out += " min=" + detail::format_double(m.stats.min);
        out += " max=" + detail::format_double(m.stats.max);
        out += " count=" + std::to_string(m.stats.count);
        out += '\n';
    }
    return out;
}

// -------------------------------------------------------------------------
// Reference vector.
//
// An eight-pulse worked example with every derived quantity precomputed by
// hand. The four measurement outcomes the protocol leaves free per round are
// swept over all 256 assignments; keys, public messages at their fixed
// cells, and the recovered strings must never move.
// -------------------------------------------------------------------------

struct ReferenceVector {
    SeedSessionInputs inputs;
    std::vector<std::string> round1_states;  // encoded state names, round 1
    std::vector<std::string> round2_states;  // encoded state names, round 2
    BitString round2_alice_bases;
    BitString round2_bob_bases;
    BitString value_mask;
    BitString basis_diff;
    BitString key_bob_bases;
    BitString key_alice_bases;
    BitString key_alice_values;
    BitString key_alice_round2;
    std::vector<std::pair<std::size_t, Bit>> round1_outcome_cells;  // forced by matching
    std::vector<std::pair<std::size_t, Bit>> round2_outcome_cells;
    std::vector<std::pair<std::size_t, Bit>> mask_first_cells;   // coin-independent cells
    std::vector<std::pair<std::size_t, Bit>> mask_second_cells;
};

inline ReferenceVector reference_vector() {
    ReferenceVector ref;
    ref.inputs = {BitString::from_string("10100000"), BitString::from_string("01101100"),
                  BitString::from_string("01100110"), BitString::from_string("11000110"),
                  BitString::from_string("10101001")};
    ref.round1_states = {"psi10", "psi01", "psi11", "psi00", "psi01", "psi01", "psi00", "psi00"};
    ref.round2_states = {"psi01", "psi10", "psi11", "psi00", "psi01", "psi10", "psi10", "psi01"};
    ref.round2_alice_bases = BitString::from_string("01100110");
    ref.round2_bob_bases = BitString::from_string("01011111");
    ref.value_mask = BitString::from_string("11000101");
    ref.basis_diff = BitString::from_string("11000110");
    ref.key_bob_bases = BitString::from_string("01100110");
    ref.key_alice_bases = BitString::from_string("10100000");
    ref.key_alice_values = BitString::from_string("01101100");
    ref.key_alice_round2 = BitString::from_string("10101001");
    ref.round1_outcome_cells = {{2, 1}, {3, 0}, {4, 1}, {7, 0}};
    ref.round2_outcome_cells = {{0, 1}, {1, 0}, {5, 0}, {6, 0}};
    ref.mask_first_cells = {{1, 0}, {3, 1}, {4, 0}, {5, 0}, {6, 1}, {7, 1}};
    ref.mask_second_cells = {{0, 1}, {2, 1}};
    return ref;
}

struct ReferenceDiff {
    std::string row;       // quantity that disagreed
    std::string cell;      // index within it, or "all"
    std::string expected;
    std::string actual;
};

struct ReferenceCheck {
    bool passed = false;
    std::size_t sweeps = 0;
    std::vector<ReferenceDiff> diffs;
};

/// Sweeps every free-coin assignment of the expected vector and reports
/// each cell that deviates. check_reference(reference_vector()) passing is
/// the library's strongest single claim of correctness.
inline ReferenceCheck check_reference(const ReferenceVector& expected) {
    ReferenceCheck check;
    const std::size_t n = expected.inputs.alice_bases.size();

    auto diff_string = [&check](const std::string& row, const BitString& want,
                                const BitString& got, int sweep) {
        const std::string tag = sweep < 0 ? std::string() : " sweep " + std::to_string(sweep);
        if (want.size() != got.size()) {
            check.diffs.push_back({row, "length" + tag, std::to_string(want.size()),
                                   std::to_string(got.size())});
            return;
        }
        for (std::size_t k = 0; k < want.size(); ++k) {
            if (want.at(k) != got.at(k)) {
                check.diffs.push_back({row, std::to_string(k) + tag,
                                       std::string(1, '0' + want.at(k)),
                                       std::string(1, '0' + got.at(k))});
            }
        }
    };
    auto diff_cells = [&check](const std::string& row,
                               const std::vector<std::pair<std::size_t, Bit>>& cells,
                               const BitString& got, int sweep) {
        for (const auto& [k, want] : cells) {
            if (got.at(k) != want) {
                check.diffs.push_back({row, std::to_string(k) + " sweep " + std::to_string(sweep),
                                       std::string(1, '0' + want),
                                       std::string(1, '0' + got.at(k))});
            }
        }
    };

    diff_string("round2_alice_bases",
                expected.round2_alice_bases,
                alice_round2_bases(expected.inputs.alice_bases, expected.inputs.seed), -1);
    diff_string("round2_bob_bases", expected.round2_bob_bases,
                bob_round2_bases(expected.inputs.bob_bases, expected.inputs.seed), -1);
    for (std::size_t k = 0; k < n; ++k) {
        const std::string got1 =
            state_name(encode(expected.inputs.alice_bases.at(k), expected.inputs.alice_values.at(k)));
        if (got1 != expected.round1_states[k]) {
            check.diffs.push_back(
                {"round1_states", std::to_string(k), expected.round1_states[k], got1});
        }
        const std::string got2 = state_name(
            encode(expected.round2_alice_bases.at(k), expected.inputs.round2_values.at(k)));
        if (got2 != expected.round2_states[k]) {
            check.diffs.push_back(
                {"round2_states", std::to_string(k), expected.round2_states[k], got2});
        }
    }

    std::vector<std::size_t> round1_free, round2_free;
    for (std::size_t k = 0; k < n; ++k) {
        bool fixed1 = false, fixed2 = false;
        for (const auto& [idx, bit] : expected.round1_outcome_cells) fixed1 |= idx == k;
        for (const auto& [idx, bit] : expected.round2_outcome_cells) fixed2 |= idx == k;
        if (!fixed1) round1_free.push_back(k);
        if (!fixed2) round2_free.push_back(k);
    }
    const std::size_t free_bits = round1_free.size() + round2_free.size();

    for (std::size_t sweep = 0; sweep < (std::size_t{1} << free_bits); ++sweep) {
        BitString forced1(n), forced2(n);
        for (std::size_t c = 0; c < round1_free.size(); ++c) {
            forced1.set(round1_free[c], (sweep >> c) & 1u);
        }
        for (std::size_t c = 0; c < round2_free.size(); ++c) {
            forced2.set(round2_free[c], (sweep >> (round1_free.size() + c)) & 1u);
        }
        const int s = static_cast<int>(sweep);
        const IdealOutcomes outcomes = ideal_outcomes(expected.inputs, forced1, forced2);
        diff_cells("round1_outcomes", expected.round1_outcome_cells, outcomes.bob_round1, s);
        diff_cells("round2_outcomes", expected.round2_outcome_cells, outcomes.bob_round2, s);

        const Reconciliation rec = ideal_trace(expected.inputs, forced1, forced2);
        diff_string("value_mask", expected.value_mask, rec.messages.value_mask, s);
        diff_cells("mask_first", expected.mask_first_cells, rec.messages.bob_mask_first, s);
        diff_cells("mask_second", expected.mask_second_cells, rec.messages.bob_mask_second, s);
        diff_string("mask_xor", outcomes.bob_round1 ^ outcomes.bob_round2,
                    rec.messages.bob_mask_first ^ rec.messages.bob_mask_second, s);
        diff_string("basis_diff", expected.basis_diff, rec.messages.basis_diff, s);
        diff_string("key_bob_bases", expected.key_bob_bases, rec.alice.bob_bases, s);
        diff_string("key_alice_bases", expected.key_alice_bases, rec.bob.alice_bases, s);
        diff_string("key_alice_values", expected.key_alice_values, rec.bob.alice_values, s);
        diff_string("key_alice_round2", expected.key_alice_round2, rec.bob.alice_round2, s);
        ++check.sweeps;
    }
    check.passed = check.diffs.empty();
    return check;
}

inline ReferenceCheck run_reference_check() { return check_reference(reference_vector()); }

// -------------------------------------------------------------------------
// Exhaustive single-index recovery check.
// -------------------------------------------------------------------------

struct RecoveryCheck {
    bool passed = false;
    std::size_t cases = 0;
    std::vector<std::string> failures;
};

/// Enumerates every single-index input combination together with both
/// values of the free measurement coin and confirms that reconciliation
/// returns all four private strings exactly.
inline RecoveryCheck run_recovery_check() {
    RecoveryCheck check;
    auto single = [](unsigned bit) {
        BitString s(1);
        s.set(0, static_cast<Bit>(bit & 1u));
        return s;
    };
    for (unsigned combo = 0; combo < 64; ++combo) {
        const unsigned coin = (combo >> 5) & 1u;
        const SeedSessionInputs in{single(combo), single(combo >> 1), single(combo >> 2),
                                   single(combo >> 3), single(combo >> 4)};
        const Reconciliation rec = ideal_trace(in, single(coin), single(coin));
        auto expect = [&](const char* what, Bit got, Bit want) {
            if (got != want) {
                check.failures.push_back("case " + std::to_string(combo) + ": " + what + " got " +
                                         std::to_string(got) + " want " + std::to_string(want));
            }
        };
        expect("bob_bases", rec.alice.bob_bases.at(0), in.bob_bases.at(0));
        expect("alice_bases", rec.bob.alice_bases.at(0), in.alice_bases.at(0));
        expect("alice_values", rec.bob.alice_values.at(0), in.alice_values.at(0));
        expect("alice_round2", rec.bob.alice_round2.at(0), in.round2_values.at(0));
        const IdealOutcomes outcomes = ideal_outcomes(in, single(coin), single(coin));
        expect("mask_xor",
               rec.messages.bob_mask_first.at(0) ^ rec.messages.bob_mask_second.at(0),
               outcomes.bob_round1.at(0) ^ outcomes.bob_round2.at(0));
        ++check.cases;
    }
    check.passed = check.failures.empty();
    return check;
}

}  // namespace qkd

#endif  // QKD_HARNESS_HPP
