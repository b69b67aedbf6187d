#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace relnorm {

enum class TokKind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, LBracket, RBracket, Comma, Equals, Newline };

struct Token {
    TokKind kind;
    std::string text;
    double num = 0.0;
    int line = 0, col = 0; // 1-based
};

namespace detail {

inline void tokenize_line(std::string_view src, int line_no, std::vector<Token>& out) {
    std::size_t i = 0;
    auto col = [&](std::size_t at) { return static_cast<int>(at) + 1; };
    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r') { ++i; continue; }
        if (c == '#') break; // comment to end of line
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t start = i;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            if (i < src.size() && src[i] == '.') {
                ++i;
                while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t mark = i;
                ++i;
                if (i < src.size() && (src[i] == '+' || src[i] == '-')) ++i;
                if (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                    while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
                } else {
                    i = mark; // the 'e' belongs to the next token
                }
            }
            std::string text(src.substr(start, i - start));
            out.push_back({TokKind::Number, text, std::stod(text), line_no, col(start)});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                ++i;
            out.push_back({TokKind::Ident, std::string(src.substr(start, i - start)), 0.0, line_no, col(start)});
            continue;
        }
        TokKind kind;
        switch (c) {
        case '+': kind = TokKind::Plus; break;
        case '-': kind = TokKind::Minus; break;
        case '*': kind = TokKind::Star; break;
        case '/': kind = TokKind::Slash; break;
        case '^': kind = TokKind::Caret; break;
        case '(': kind = TokKind::LParen; break;
        case ')': kind = TokKind::RParen; break;
        case '[': kind = TokKind::LBracket; break;
        case ']': kind = TokKind::RBracket; break;
        case ',': kind = TokKind::Comma; break;
        case '=': kind = TokKind::Equals; break;
        default: throw IllegalCharacter(line_no, col(i), c);
        }
        out.push_back({kind, std::string(1, c), 0.0, line_no, col(i)});
        ++i;
    }
}

} // namespace detail

// Splits the input into number literals, identifiers, single-character
// operators and punctuation, and newline separators.  '#' comments run to
// the end of the line.  Throws IllegalCharacter with a 1-based location.
inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    int line_no = 1;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find('\n', begin);
        std::string_view line =
            (end == std::string_view::npos) ? text.substr(begin) : text.substr(begin, end - begin);
        detail::tokenize_line(line, line_no, out);
        if (end == std::string_view::npos) break;
        out.push_back({TokKind::Newline, "\n", 0.0, line_no, static_cast<int>(line.size()) + 1});
        begin = end + 1;
        ++line_no;
    }
    return out;
}

} // namespace relnorm
