#pragma once

// Minimal validator for the DOT subset the exporter writes: one digraph,
// graph attributes, node statements and edge statements. Graphviz is not a
// build dependency, so tests use this to catch malformed output.

#include <cctype>
#include <set>
#include <string>
#include <string_view>

namespace laf::testing {

class DotChecker {
public:
    explicit DotChecker(std::string_view text) : s_(text) {}

    /// Empty on success, otherwise a message with the byte offset.
    std::string check() {
        try {
            word("digraph");
            id();
            expect('{');
            while (peek() != '}') statement();
            expect('}');
            skip();
            if (i_ != s_.size()) fail("trailing input");
            for (const auto& e : edge_ends_)
                if (!nodes_.count(e)) fail("edge to undeclared node " + e);
        } catch (const std::string& msg) {
            return msg;
        }
        return {};
    }

    std::size_t node_count() const { return nodes_.size(); }

private:
    void fail(const std::string& msg) const { throw msg + " at offset " + std::to_string(i_); }

    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }

    char peek() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        return s_[i_];
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++i_;
    }

    void word(std::string_view w) {
        skip();
        if (s_.substr(i_, w.size()) != w) fail("expected " + std::string(w));
        i_ += w.size();
    }

    std::string id() {
        char c = peek();
        std::string out;
        if (c == '"') {
            ++i_;
            while (true) {
                if (i_ >= s_.size()) fail("unterminated string");
                char ch = s_[i_++];
                if (ch == '"') break;
                if (ch == '\\') {
                    if (i_ >= s_.size()) fail("dangling escape");
                    out += ch;
                    ch = s_[i_++];
                } else if (ch == '\n') {
                    fail("raw newline in string");
                }
                out += ch;
            }
            return out;
        }
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '.'))
            out += s_[i_++];
        if (out.empty()) fail("expected identifier");
        return out;
    }

    void attrs() {
        expect('[');
        while (peek() != ']') {
            id();
            expect('=');
            id();
            if (peek() == ',') ++i_;
        }
        expect(']');
    }

    void statement() {
        std::string a = id();
        if (peek() == '=') {
            ++i_;
            id();
        } else if (s_.compare(i_, 2, "->") == 0) {
            i_ += 2;
            edge_ends_.insert(a);
            edge_ends_.insert(id());
            if (peek() == '[') attrs();
        } else {
            if (!nodes_.insert(a).second) fail("node declared twice: " + a);
            if (peek() == '[') attrs();
        }
        expect(';');
    }

    std::string_view s_;
    std::size_t i_ = 0;
    std::set<std::string> nodes_;
    std::set<std::string> edge_ends_;
};

inline std::string check_dot(std::string_view text) { return DotChecker(text).check(); }

}  // namespace laf::testing
