#ifndef QKD_QSIM_HPP
#define QKD_QSIM_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkd/bitcore.hpp"

namespace qkd {

/// One of the two conjugate measurement contexts:
/// B0 = {|0>,|1>} (computational), B1 = {|+>,|->} (diagonal).
enum class Basis : Bit { computational = 0, diagonal = 1 };

inline Basis basis_from_bit(Bit b) { return b ? Basis::diagonal : Basis::computational; }
inline Bit basis_bit(Basis b) { return static_cast<Bit>(b); }
inline std::string basis_name(Basis b) { return b == Basis::diagonal ? "B1" : "B0"; }

/**
 * One of the four encoded states psi00=|0>, psi01=|1>, psi10=|+>, psi11=|->.
 * The (basis_bit, value_bit) index pair fully determines the state; the
 * conjugate-basis statistics this protocol needs (deterministic when matched,
 * fair coin when mismatched) are hard-coded in measure(), so no amplitudes
 * are carried around.
 */
struct QubitState {
    Bit basis_bit;
    Bit value_bit;
    bool operator==(const QubitState&) const = default;
};

inline QubitState encode(Bit basis_bit, Bit value_bit) {
    return {static_cast<Bit>(basis_bit & 1u), static_cast<Bit>(value_bit & 1u)};
}

inline std::string state_name(const QubitState& s) {
    return std::string("psi") + static_cast<char>('0' + s.basis_bit) +
           static_cast<char>('0' + s.value_bit);
}

/// Protocol phase a pulse belongs to.
enum class Round : Bit { raw = 0, missing = 1 };

/// Per-photon transport record. An empty state means the pulse was lost.
struct Pulse {
    std::size_t index = 0;  // 0-based position within its round
    std::optional<QubitState> state;
    Round round = Round::raw;

    bool erased() const { return !state.has_value(); }
};

inline std::string pulse_state_name(const Pulse& p) {
    return p.erased() ? std::string("lost") : state_name(*p.state);
}

/// Matched basis: deterministic value. Conjugate basis: fair coin from src.
inline Bit measure(const QubitState& state, Basis basis, RandomSource& src) {
    if (basis_bit(basis) == state.basis_bit) return state.value_bit;
    return src.next_bit();
}

/// Measuring a lost pulse is a caller error; handle loss before measuring.
inline Bit measure_pulse(const Pulse& pulse, Basis basis, RandomSource& src) {
    if (pulse.erased()) {
        throw std::logic_error("measure: pulse " + std::to_string(pulse.index) +
                               " was lost in the channel");
    }
    return measure(*pulse.state, basis, src);
}

/// Noise and loss applied independently per pulse.
struct ChannelModel {
    double flip_probability = 0.0;  // value bit inverted in the current encoding basis
    double loss_probability = 0.0;
};

inline void validate(const ChannelModel& channel) {
    if (!(channel.flip_probability >= 0.0 && channel.flip_probability <= 1.0)) {
        throw std::invalid_argument("channel: flip probability must be in [0,1]");
    }
    if (!(channel.loss_probability >= 0.0 && channel.loss_probability <= 1.0)) {
        throw std::invalid_argument("channel: loss probability must be in [0,1]");
    }
}

enum class EveStrategy { none, intercept_resend_random, intercept_resend_fixed };

struct AdversaryModel {
    EveStrategy strategy = EveStrategy::none;
    Basis fixed_basis = Basis::computational;  // used by intercept_resend_fixed only
    double attack_fraction = 0.0;              // per-pulse probability that Eve acts

    bool active() const { return strategy != EveStrategy::none && attack_fraction > 0.0; }
};

inline void validate(const AdversaryModel& adversary) {
    if (!(adversary.attack_fraction >= 0.0 && adversary.attack_fraction <= 1.0)) {
        throw std::invalid_argument("adversary: attack fraction must be in [0,1]");
    }
}

/// One intercepted pulse in Eve's measurement log.
struct EveObservation {
    std::size_t index;
    Bit basis_bit;
    Bit outcome;
    bool operator==(const EveObservation&) const = default;
};

using EveLog = std::vector<EveObservation>;

/**
 * Transports one pulse, applying in this order: (1) adversary -- with
 * probability attack_fraction Eve measures in her strategy's basis and
 * re-encodes her outcome in that basis; (2) loss; (3) flip of a surviving
 * pulse's value bit (encoding basis preserved). The order is part of the
 * contract, as is the coin sequence: per pulse, coins are drawn from src
 * only for enabled stages -- Eve's action coin (plus basis bit for the
 * random strategy, plus an outcome coin on basis mismatch) when the
 * adversary is active, a loss coin when loss_probability > 0, a flip coin
 * when flip_probability > 0.
 */
inline Pulse transmit(Pulse pulse, const ChannelModel& channel, const AdversaryModel& adversary,
                      RandomSource& src, EveLog* eve_log = nullptr) {
    if (pulse.erased()) return pulse;
    if (adversary.active() && src.bernoulli(adversary.attack_fraction)) {
        const Basis eve_basis = adversary.strategy == EveStrategy::intercept_resend_random
                                    ? basis_from_bit(src.next_bit())
                                    : adversary.fixed_basis;
        const Bit outcome = measure(*pulse.state, eve_basis, src);
        pulse.state = encode(basis_bit(eve_basis), outcome);
        if (eve_log) eve_log->push_back({pulse.index, basis_bit(eve_basis), outcome});
    }
    if (channel.loss_probability > 0.0 && src.bernoulli(channel.loss_probability)) {
        pulse.state.reset();
        return pulse;
    }
    if (channel.flip_probability > 0.0 && src.bernoulli(channel.flip_probability)) {
        pulse.state->value_bit ^= 1u;
    }
    return pulse;
}

}  // namespace qkd

#endif  // QKD_QSIM_HPP
