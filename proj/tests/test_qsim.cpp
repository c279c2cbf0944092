#include "qkd/qsim.hpp"

#include <gtest/gtest.h>

#include <cstddef>
#include <vector>

namespace qkd {
namespace {

// Exact error rate of an intercept-resend adversary who measures every pulse
// in a uniformly random basis, for a receiver measuring in the sender's basis.
// Enumerates Eve's basis and both fair-coin outcomes instead of sampling.
double intercept_resend_error_rate_oracle() {
    double error = 0.0;
    for (int sender_basis = 0; sender_basis < 2; ++sender_basis) {
        for (int value = 0; value < 2; ++value) {
            for (int eve_basis = 0; eve_basis < 2; ++eve_basis) {
                const double p_branch = 1.0 / (4.0 * 2.0);  // sent state x Eve basis
                if (eve_basis == sender_basis) continue;  // Eve relays the exact state
                for (int eve_outcome = 0; eve_outcome < 2; ++eve_outcome) {
                    for (int bob_outcome = 0; bob_outcome < 2; ++bob_outcome) {
                        if (bob_outcome != value) error += p_branch * 0.25;
                    }
                }
            }
        }
    }
    return error;
}

TEST(QubitState, EncodeNamesFourStates) {
    EXPECT_EQ(state_name(encode(0, 0)), "psi00");
    EXPECT_EQ(state_name(encode(0, 1)), "psi01");
    EXPECT_EQ(state_name(encode(1, 0)), "psi10");
    EXPECT_EQ(state_name(encode(1, 1)), "psi11");
    EXPECT_EQ(encode(1, 0).basis_bit, 1);
    EXPECT_EQ(encode(1, 0).value_bit, 0);
}

TEST(QubitState, BasisHelpersRoundTrip) {
    EXPECT_EQ(basis_from_bit(0), Basis::computational);
    EXPECT_EQ(basis_from_bit(1), Basis::diagonal);
    EXPECT_EQ(basis_bit(Basis::computational), 0);
    EXPECT_EQ(basis_bit(Basis::diagonal), 1);
    EXPECT_EQ(basis_name(Basis::computational), "B0");
    EXPECT_EQ(basis_name(Basis::diagonal), "B1");
}

TEST(QubitState, PulseStateNameReportsLoss) {
    Pulse p{3, encode(1, 1), Round::raw};
    EXPECT_EQ(pulse_state_name(p), "psi11");
    p.state.reset();
    EXPECT_TRUE(p.erased());
    EXPECT_EQ(pulse_state_name(p), "lost");
}

TEST(Measure, MatchedBasisIsDeterministic) {
    RandomSource src(7);
    for (Bit basis = 0; basis < 2; ++basis) {
        for (Bit value = 0; value < 2; ++value) {
            for (int rep = 0; rep < 100; ++rep) {
                EXPECT_EQ(measure(encode(basis, value), basis_from_bit(basis), src), value);
            }
        }
    }
}

TEST(Measure, MatchedBasisConsumesNoRandomness) {
    RandomSource src(42);
    RandomSource untouched(42);
    measure(encode(0, 1), Basis::computational, src);
    measure(encode(1, 0), Basis::diagonal, src);
    for (int i = 0; i < 16; ++i) EXPECT_EQ(src.next_bit(), untouched.next_bit());
}

TEST(Measure, MismatchedBasisIsFairCoin) {
    constexpr int kTrials = 100000;
    RandomSource src(11);
    for (Bit basis = 0; basis < 2; ++basis) {
        for (Bit value = 0; value < 2; ++value) {
            const QubitState state = encode(basis, value);
            const Basis wrong = basis_from_bit(basis ^ 1u);
            long ones = 0;
            for (int t = 0; t < kTrials; ++t) ones += measure(state, wrong, src);
            EXPECT_NEAR(static_cast<double>(ones) / kTrials, 0.5, 0.01)
                << "state " << state_name(state);
        }
    }
}

TEST(Measure, ErasedPulseThrowsWithIndex) {
    RandomSource src(1);
    const Pulse lost{17, std::nullopt, Round::missing};
    try {
        measure_pulse(lost, Basis::computational, src);
        FAIL() << "expected logic_error";
    } catch (const std::logic_error& e) {
        EXPECT_NE(std::string(e.what()).find("17"), std::string::npos);
    }
}

TEST(Transmit, IdentityChannelPreservesPulsesExactly) {
    const ChannelModel ideal{};
    const AdversaryModel nobody{};
    RandomSource src(5);
    for (Bit basis = 0; basis < 2; ++basis) {
        for (Bit value = 0; value < 2; ++value) {
            const Pulse in{static_cast<std::size_t>(2 * basis + value), encode(basis, value),
                           Round::raw};
            const Pulse out = transmit(in, ideal, nobody, src);
            ASSERT_FALSE(out.erased());
            EXPECT_EQ(*out.state, *in.state);
            EXPECT_EQ(out.index, in.index);
            EXPECT_EQ(out.round, in.round);
        }
    }
    RandomSource untouched(5);
    for (int i = 0; i < 16; ++i) EXPECT_EQ(src.next_bit(), untouched.next_bit());
}

TEST(Transmit, CertainLossErasesEveryPulse) {
    const ChannelModel lossy{0.0, 1.0};
    const AdversaryModel nobody{};
    RandomSource src(9);
    for (std::size_t k = 0; k < 64; ++k) {
        const Pulse out = transmit({k, encode(k & 1u, (k >> 1) & 1u), Round::raw}, lossy, nobody, src);
        EXPECT_TRUE(out.erased());
    }
}

TEST(Transmit, CertainFlipInvertsValueKeepsBasis) {
    const ChannelModel noisy{1.0, 0.0};
    const AdversaryModel nobody{};
    RandomSource src(13);
    for (Bit basis = 0; basis < 2; ++basis) {
        for (Bit value = 0; value < 2; ++value) {
            const Pulse out = transmit({0, encode(basis, value), Round::raw}, noisy, nobody, src);
            ASSERT_FALSE(out.erased());
            EXPECT_EQ(out.state->basis_bit, basis);
            EXPECT_EQ(out.state->value_bit, value ^ 1u);
        }
    }
}

TEST(Transmit, ErasedInputPassesThroughUnchanged) {
    const ChannelModel noisy{0.5, 0.5};
    AdversaryModel eve;
    eve.strategy = EveStrategy::intercept_resend_random;
    eve.attack_fraction = 1.0;
    RandomSource src(21);
    const Pulse out = transmit({4, std::nullopt, Round::missing}, noisy, eve, src);
    EXPECT_TRUE(out.erased());
    EXPECT_EQ(out.index, 4u);
    RandomSource untouched(21);
    for (int i = 0; i < 16; ++i) EXPECT_EQ(src.next_bit(), untouched.next_bit());
}

TEST(Transmit, InterceptResendErrorRateMatchesEnumeration) {
    const double expected = intercept_resend_error_rate_oracle();
    ASSERT_DOUBLE_EQ(expected, 0.25);

    constexpr int kPulses = 100000;
    const ChannelModel ideal{};
    AdversaryModel eve;
    eve.strategy = EveStrategy::intercept_resend_random;
    eve.attack_fraction = 1.0;
    RandomSource alice(101);
    RandomSource bob(202);
    long errors = 0;
    for (int k = 0; k < kPulses; ++k) {
        const Bit basis = alice.next_bit();
        const Bit value = alice.next_bit();
        const Pulse received =
            transmit({static_cast<std::size_t>(k), encode(basis, value), Round::raw}, ideal, eve,
                     bob);
        errors += measure_pulse(received, basis_from_bit(basis), bob) != value;
    }
    EXPECT_NEAR(static_cast<double>(errors) / kPulses, expected, 0.01);
}

TEST(Transmit, FixedBasisEveIsInvisibleWhenBasesMatch) {
    const ChannelModel ideal{};
    AdversaryModel eve;
    eve.strategy = EveStrategy::intercept_resend_fixed;
    eve.fixed_basis = Basis::computational;
    eve.attack_fraction = 1.0;
    RandomSource src(31);
    EveLog log;
    for (Bit value = 0; value < 2; ++value) {
        const Pulse out = transmit({value, encode(0, value), Round::raw}, ideal, eve, src, &log);
        ASSERT_FALSE(out.erased());
        EXPECT_EQ(*out.state, encode(0, value));
    }
    ASSERT_EQ(log.size(), 2u);
    EXPECT_EQ(log[0], (EveObservation{0, 0, 0}));
    EXPECT_EQ(log[1], (EveObservation{1, 0, 1}));
}

TEST(Transmit, InactiveAdversaryLeavesLogEmptyAndDrawsNothing) {
    const ChannelModel ideal{};
    AdversaryModel idle;
    idle.strategy = EveStrategy::intercept_resend_random;
    idle.attack_fraction = 0.0;
    RandomSource src(77);
    EveLog log;
    for (std::size_t k = 0; k < 32; ++k) {
        transmit({k, encode(k & 1u, 0), Round::raw}, ideal, idle, src, &log);
    }
    EXPECT_TRUE(log.empty());
    RandomSource untouched(77);
    for (int i = 0; i < 16; ++i) EXPECT_EQ(src.next_bit(), untouched.next_bit());
}

TEST(Transmit, PartialAttackFractionHitsExpectedShareOfPulses) {
    constexpr int kPulses = 100000;
    const ChannelModel ideal{};
    AdversaryModel eve;
    eve.strategy = EveStrategy::intercept_resend_fixed;
    eve.fixed_basis = Basis::diagonal;
    eve.attack_fraction = 0.5;
    RandomSource src(55);
    EveLog log;
    for (int k = 0; k < kPulses; ++k) {
        transmit({static_cast<std::size_t>(k), encode(0, 0), Round::raw}, ideal, eve, src, &log);
    }
    EXPECT_NEAR(static_cast<double>(log.size()) / kPulses, 0.5, 0.01);
}

TEST(Validate, RejectsOutOfRangeProbabilities) {
    EXPECT_THROW(validate(ChannelModel{-0.1, 0.0}), std::invalid_argument);
    EXPECT_THROW(validate(ChannelModel{0.0, 1.5}), std::invalid_argument);
    EXPECT_NO_THROW(validate(ChannelModel{0.0, 1.0}));
    AdversaryModel eve;
    eve.attack_fraction = 2.0;
    EXPECT_THROW(validate(eve), std::invalid_argument);
    eve.attack_fraction = 1.0;
    EXPECT_NO_THROW(validate(eve));
}

}  // namespace
}  // namespace qkd
