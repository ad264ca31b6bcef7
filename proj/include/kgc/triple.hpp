#pragma once
// (head, relation, tail) facts and their TSV wire format.
//
// Files are 3-field tab-separated lines, one triple per line, UTF-8 —
// the layout FB15k/WN18 distributions ship in. Blank lines are skipped,
// a trailing '\r' is stripped so CRLF files parse too.

#include "kgc/errors.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace kgc {

struct Triple {
    std::string head;
    std::string relation;
    std::string tail;

    friend bool operator==(const Triple&, const Triple&) = default;

    // Lexicographic (head, relation, tail); graph serialization order.
    friend bool operator<(const Triple& a, const Triple& b) {
        if (a.head != b.head) return a.head < b.head;
        if (a.relation != b.relation) return a.relation < b.relation;
        return a.tail < b.tail;
    }
};

/// Tokens are opaque but must be non-empty and free of tab/newline,
/// otherwise the TSV format cannot represent them.
inline bool is_valid_token(std::string_view token) {
    if (token.empty()) return false;
    for (char c : token) {
        if (c == '\t' || c == '\n' || c == '\r') return false;
    }
    return true;
}

inline bool is_valid_triple(const Triple& t) {
    return is_valid_token(t.head) && is_valid_token(t.relation) && is_valid_token(t.tail);
}

inline void validate_triple(const Triple& t) {
    if (!is_valid_triple(t)) {
        throw ArgumentError("malformed triple: tokens must be non-empty and contain no tab or newline");
    }
}

/// Parse a TSV triple stream. Non-blank lines must have exactly three
/// tab-separated non-empty fields; violations raise ParseError with the
/// 1-based line number.
inline std::vector<Triple> parse_triples(std::istream& in) {
    std::vector<Triple> out;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t pos = line.find('\t', start);
            if (pos == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (fields.size() != 3) {
            throw ParseError("expected 3 tab-separated fields, got " + std::to_string(fields.size()),
                             line_number);
        }
        for (const auto& f : fields) {
            if (f.empty()) throw ParseError("empty field", line_number);
        }
        out.push_back(Triple{fields[0], fields[1], fields[2]});
    }
    return out;
}

inline std::vector<Triple> parse_triples(const std::string& text) {
    std::istringstream in(text);
    return parse_triples(in);
}

/// Write triples in list order, one TSV line each.
inline void write_triples(std::ostream& out, const std::vector<Triple>& triples) {
    for (const auto& t : triples) {
        out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
    }
}

inline std::string serialize_triples(const std::vector<Triple>& triples) {
    std::ostringstream out;
    write_triples(out, triples);
    return out.str();
}

} // namespace kgc
