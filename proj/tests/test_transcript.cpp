#include "qkd/transcript.hpp"

#include <gtest/gtest.h>

#include <charconv>
#include <string>

namespace qkd {
namespace {

SessionRecord sample_record() {
    SessionRecord r;
    r.events.push_back(make_event("raw", "alice", "bases", BitString::from_string("10100000")));
    r.events.push_back(
        make_event("raw", "alice->bob", "pulses", BitString::from_string("01101100")));
    r.events.push_back(make_event("sift", "bob->alice", "kept", BitString::from_string("00111001")));
    r.events.push_back(make_event("sift", "bob", "empty_key", BitString{}));
    r.summary.set("n", std::uint64_t{8});
    r.summary.set("qber", 0.25);
    r.summary.set("aborted", false);
    return r;
}

TEST(Transcript, CanonicalTextForm) {
    const std::string text = write_transcript(sample_record());
    EXPECT_EQ(text,
              "qkdsim-transcript v1\n"
              "event raw alice bases 10100000\n"
              "event raw alice->bob pulses 01101100\n"
              "event sift bob->alice kept 00111001\n"
              "event sift bob empty_key -\n"
              "summary n=8 qber=0.25 aborted=false\n");
}

TEST(Transcript, RoundTripIsIdentity) {
    const SessionRecord original = sample_record();
    const SessionRecord reread = read_transcript(write_transcript(original));
    EXPECT_EQ(reread, original);

    SessionRecord bare;
    bare.summary.set("n", std::uint64_t{0});
    EXPECT_EQ(read_transcript(write_transcript(bare)), bare);

    RandomSource src(7);
    SessionRecord randomized;
    for (int k = 0; k < 50; ++k) {
        randomized.events.push_back(make_event("phase" + std::to_string(k % 3), "alice->bob",
                                               "msg" + std::to_string(k),
                                               random_bitstring(src, k % 17)));
    }
    randomized.summary.set("trials", std::uint64_t{50});
    randomized.summary.set("mean", 1.0 / 3.0);
    EXPECT_EQ(read_transcript(write_transcript(randomized)), randomized);
}

TEST(Transcript, EqualRecordsSerializeToIdenticalBytes) {
    EXPECT_EQ(write_transcript(sample_record()), write_transcript(sample_record()));
}

TEST(Transcript, SummarySetOverwritesInPlace) {
    SessionSummary s;
    s.set("a", std::uint64_t{1});
    s.set("b", std::uint64_t{2});
    s.set("a", std::uint64_t{3});
    ASSERT_EQ(s.fields.size(), 2u);
    EXPECT_EQ(*s.find("a"), "3");
    EXPECT_EQ(*s.find("b"), "2");
    EXPECT_EQ(s.find("missing"), nullptr);
}

TEST(Transcript, DoublesSurviveTheTextForm) {
    SessionSummary s;
    const double value = 1.0 / 3.0;
    s.set("mean", value);
    double parsed = 0.0;
    const std::string& text = *s.find("mean");
    const auto res = std::from_chars(text.data(), text.data() + text.size(), parsed);
    ASSERT_EQ(res.ec, std::errc{});
    EXPECT_EQ(parsed, value);
}

TEST(Transcript, ParseErrorsNameTheLine) {
    EXPECT_THROW(read_transcript(""), std::runtime_error);

    try {
        read_transcript("not-a-header\n");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    }

    const std::string good = write_transcript(sample_record());
    try {
        read_transcript("qkdsim-transcript v1\nevent raw alice bases\nsummary\n");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("5 fields"), std::string::npos);
    }

    try {
        read_transcript("qkdsim-transcript v1\nevent raw alice bases 01x\nsummary\n");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }

    try {
        read_transcript("qkdsim-transcript v1\nsummary\nevent raw alice bases 0\n");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("after summary"), std::string::npos);
    }

    try {
        read_transcript("qkdsim-transcript v1\nsummary n=\n");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Transcript, TruncatedTranscriptIsRejected) {
    std::string text = write_transcript(sample_record());
    text.erase(text.rfind("summary"));
    try {
        read_transcript(text);
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("missing summary"), std::string::npos);
    }
}

TEST(Transcript, RejectsMalformedRecordsAtWriteTime) {
    SessionRecord bad;
    bad.events.push_back({"raw", "alice", "two words", "01"});
    EXPECT_THROW(write_transcript(bad), std::invalid_argument);

    SessionRecord bad_bits;
    bad_bits.events.push_back({"raw", "alice", "key", "01x"});
    EXPECT_THROW(write_transcript(bad_bits), std::invalid_argument);

    SessionSummary s;
    EXPECT_THROW(s.set("spaced key", std::uint64_t{1}), std::invalid_argument);
    EXPECT_THROW(s.set("k", std::string("a=b")), std::invalid_argument);
}

TEST(Transcript, FileRoundTrip) {
    const std::string path = testing::TempDir() + "/qkd_transcript_test.txt";
    const SessionRecord original = sample_record();
    write_transcript_file(path, original);
    EXPECT_EQ(read_transcript_file(path), original);
    EXPECT_THROW(read_transcript_file(path + ".does-not-exist"), std::runtime_error);
}

}  // namespace
}  // namespace qkd
