#ifndef QKD_TRANSCRIPT_HPP
#define QKD_TRANSCRIPT_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "qkd/bitcore.hpp"

namespace qkd {

inline constexpr std::string_view kTranscriptHeader = "qkdsim-transcript v1";

/**
 * One line of a session transcript. sender is either a single party label
 * ("alice"), meaning a private state record, or "from->to", meaning a
 * message sent over the public channel. bits holds the payload bit string
 * and may be empty for zero-length payloads. phase, sender and name are
 * single whitespace-free tokens.
 */
struct TranscriptEvent {
    std::string phase;
    std::string sender;
    std::string name;
    std::string bits;
    bool operator==(const TranscriptEvent&) const = default;
};

inline TranscriptEvent make_event(std::string phase, std::string sender, std::string name,
                                  const BitString& payload) {
    return {std::move(phase), std::move(sender), std::move(name), payload.str()};
}

inline BitString event_bits(const TranscriptEvent& event) {
    return BitString::from_string(event.bits);
}

namespace detail {

inline bool is_token(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '=') return false;
    }
    return true;
}

inline bool is_bits(std::string_view s) {
    for (char c : s) {
        if (c != '0' && c != '1') return false;
    }
    return true;
}

inline std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

[[noreturn]] inline void transcript_error(std::size_t line_number, const std::string& what) {
    throw std::runtime_error("transcript line " + std::to_string(line_number) + ": " + what);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (start <= line.size()) {
        const std::size_t end = line.find(' ', start);
        if (end == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, end - start));
        start = end + 1;
    }
    return fields;
}

}  // namespace detail

/**
 * Ordered key=value pairs closing a transcript. Values are stored as the
 * exact strings that appear on the summary line, so a parsed record compares
 * equal to the one that was written. Keys and values are whitespace-free and
 * '='-free tokens; insertion order is preserved in the output.
 */
struct SessionSummary {
    std::vector<std::pair<std::string, std::string>> fields;

    void set(std::string key, std::string value) {
        if (!detail::is_token(key) || !detail::is_token(value)) {
            throw std::invalid_argument("summary: keys and values must be plain tokens, got '" +
                                        key + "'='" + value + "'");
        }
        for (auto& [k, v] : fields) {
            if (k == key) {
                v = std::move(value);
                return;
            }
        }
        fields.emplace_back(std::move(key), std::move(value));
    }
    void set(std::string key, double value) { set(std::move(key), detail::format_double(value)); }
    void set(std::string key, std::uint64_t value) { set(std::move(key), std::to_string(value)); }
    void set(std::string key, bool value) {
        set(std::move(key), std::string(value ? "true" : "false"));
    }

    const std::string* find(std::string_view key) const {
        for (const auto& [k, v] : fields) {
            if (k == key) return &v;
        }
        return nullptr;
    }

    bool operator==(const SessionSummary&) const = default;
};

/// A full session: its event log plus the closing summary.
struct SessionRecord {
    std::vector<TranscriptEvent> events;
    SessionSummary summary;
    bool operator==(const SessionRecord&) const = default;
};

/**
 * Renders a record to its canonical text form: the header line, one
 * "event <phase> <sender> <name> <bits>" line per event (with "-" standing
 * for an empty payload), and a final "summary k=v ..." line. Equal records
 * always produce byte-identical text.
 */
inline std::string write_transcript(const SessionRecord& record) {
    std::string out;
    out += kTranscriptHeader;
    out += '\n';
    for (const TranscriptEvent& e : record.events) {
        if (!detail::is_token(e.phase) || !detail::is_token(e.sender) || !detail::is_token(e.name)) {
            throw std::invalid_argument("transcript: event fields must be plain tokens (event '" +
                                        e.name + "')");
        }
        if (!detail::is_bits(e.bits)) {
            throw std::invalid_argument("transcript: event '" + e.name +
                                        "' payload is not a bit string");
        }
        out += "event ";
        out += e.phase;
        out += ' ';
        out += e.sender;
        out += ' ';
        out += e.name;
        out += ' ';
        out += e.bits.empty() ? "-" : e.bits;
        out += '\n';
    }
    out += "summary";
    for (const auto& [k, v] : record.summary.fields) {
        out += ' ';
        out += k;
        out += '=';
        out += v;
    }
    out += '\n';
    return out;
}

/// Parses text produced by write_transcript. Errors name the offending line.
inline SessionRecord read_transcript(std::string_view text) {
    SessionRecord record;
    std::size_t line_number = 0;
    bool saw_header = false;
    bool saw_summary = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        ++line_number;
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) {
            detail::transcript_error(line_number, "blank line");
        }
        if (saw_summary) {
            detail::transcript_error(line_number, "content after summary line");
        }
        if (!saw_header) {
            if (line != kTranscriptHeader) {
                detail::transcript_error(line_number, "expected header '" +
                                                          std::string(kTranscriptHeader) + "'");
            }
            saw_header = true;
            continue;
        }
        const std::vector<std::string_view> fields = detail::split_fields(line);
        if (fields[0] == "event") {
            if (fields.size() != 5) {
                detail::transcript_error(line_number, "event line needs 5 fields, got " +
                                                          std::to_string(fields.size()));
            }
            TranscriptEvent e{std::string(fields[1]), std::string(fields[2]),
                              std::string(fields[3]), std::string(fields[4])};
            if (!detail::is_token(e.phase) || !detail::is_token(e.sender) ||
                !detail::is_token(e.name)) {
                detail::transcript_error(line_number, "malformed event field");
            }
            if (e.bits == "-") {
                e.bits.clear();
            } else if (e.bits.empty() || !detail::is_bits(e.bits)) {
                detail::transcript_error(line_number, "event payload is not a bit string");
            }
            record.events.push_back(std::move(e));
        } else if (fields[0] == "summary") {
            for (std::size_t t = 1; t < fields.size(); ++t) {
                const std::string_view kv = fields[t];
                const std::size_t eq = kv.find('=');
                if (eq == std::string_view::npos || eq == 0 || eq + 1 == kv.size()) {
                    detail::transcript_error(line_number,
                                             "summary field '" + std::string(kv) + "' is not k=v");
                }
                record.summary.set(std::string(kv.substr(0, eq)),
                                   std::string(kv.substr(eq + 1)));
            }
            saw_summary = true;
        } else {
            detail::transcript_error(line_number,
                                     "unknown line kind '" + std::string(fields[0]) + "'");
        }
    }
    if (!saw_header) {
        detail::transcript_error(1, "empty transcript");
    }
    if (!saw_summary) {
        detail::transcript_error(line_number + 1, "missing summary line");
    }
    return record;
}

inline void write_transcript_file(const std::string& path, const SessionRecord& record) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("transcript: cannot open '" + path + "' for writing");
    }
    out << write_transcript(record);
    if (!out) {
        throw std::runtime_error("transcript: write to '" + path + "' failed");
    }
}

inline SessionRecord read_transcript_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("transcript: cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return read_transcript(buffer.str());
}

}  // namespace qkd

#endif  // QKD_TRANSCRIPT_HPP
