#pragma once

#include "bvpair/error.hpp"
#include "bvpair/rational.hpp"

#include <cctype>
#include <string>

namespace bvpair::detail {

// Whitespace-insensitive cursor used by the canonical text parsers.
class Scanner {
public:
    Scanner(const std::string& text, std::size_t pos = 0) : text_(text), pos_(pos) {}

    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    bool accept_word(const std::string& w) {
        skip_ws();
        if (text_.compare(pos_, w.size(), w) == 0) {
            pos_ += w.size();
            return true;
        }
        return false;
    }

    void expect_word(const std::string& w) {
        if (!accept_word(w)) fail("expected '" + w + "'");
    }

    Rational rational() {
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/'))
            ++pos_;
        if (pos_ == start) fail("expected a rational");
        try {
            return parse_rational(std::string_view(text_).substr(start, pos_ - start));
        } catch (const Error&) {
            pos_ = start;
            fail("malformed rational");
        }
    }

    long integer() {
        const Rational r = rational();
        if (r.get_den() != 1 || !r.get_num().fits_slong_p()) fail("expected an integer");
        return r.get_num().get_si();
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::Parse, what + " at offset " + std::to_string(pos_));
    }

private:
    const std::string& text_;
    std::size_t pos_;
};

} // namespace bvpair::detail
