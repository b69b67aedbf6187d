#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "lexer.hpp"
#include "surface.hpp"

namespace relnorm {

namespace detail {

// Recursive-descent expression parser over one statement's tokens.
// Precedence: '^' (right-assoc) over unary minus over '* /' over '+ -'.
class ExprParser {
public:
    ExprParser(const std::vector<Token>& toks, int line) : toks_(toks), line_(line) {}

    Expr parse_expression() {
        Expr e = parse_sum();
        return e;
    }

    bool at_end() const { return pos_ >= toks_.size(); }

    const Token& peek() const {
        if (at_end()) throw SyntaxError(line_, end_col(), "an expression token");
        return toks_[pos_];
    }

    Token take() {
        Token t = peek();
        ++pos_;
        return t;
    }

    bool accept(TokKind k) {
        if (!at_end() && toks_[pos_].kind == k) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(TokKind k, const char* what) {
        if (at_end() || toks_[pos_].kind != k) throw SyntaxError(line_, next_col(), what);
        ++pos_;
    }

    int next_col() const { return at_end() ? end_col() : toks_[pos_].col; }

private:
    int end_col() const { return toks_.empty() ? 1 : toks_.back().col + static_cast<int>(toks_.back().text.size()); }

    Expr parse_sum() {
        Expr e = parse_product();
        for (;;) {
            if (accept(TokKind::Plus)) e = Expr::binary(BinaryOp::Add, e, parse_product());
            else if (accept(TokKind::Minus)) e = Expr::binary(BinaryOp::Sub, e, parse_product());
            else return e;
        }
    }

    Expr parse_product() {
        Expr e = parse_unary();
        for (;;) {
            if (accept(TokKind::Star)) e = Expr::binary(BinaryOp::Mul, e, parse_unary());
            else if (accept(TokKind::Slash)) e = Expr::binary(BinaryOp::Div, e, parse_unary());
            else return e;
        }
    }

    Expr parse_unary() {
        if (accept(TokKind::Minus)) {
            Expr inner = parse_unary();
            if (inner.kind() == Expr::Kind::Constant) return Expr::constant(-inner.constant_value());
            return Expr::unary(UnaryFn::Negate, inner);
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (accept(TokKind::Caret)) {
            int col = next_col();
            Expr expo = parse_unary(); // right-associative, binds tighter than unary minus on the left
            std::optional<double> v = constant_fold(expo);
            if (!v) throw SyntaxError(line_, col, "a constant exponent");
            return Expr::power(base, *v);
        }
        return base;
    }

    Expr parse_atom() {
        const Token& t = peek();
        switch (t.kind) {
        case TokKind::Number:
            ++pos_;
            return Expr::constant(t.num);
        case TokKind::LParen: {
            ++pos_;
            Expr e = parse_sum();
            expect(TokKind::RParen, "')'");
            return e;
        }
        case TokKind::Ident: {
            ++pos_;
            const std::string& name = t.text;
            if (name == "K") return Expr::curvature();
            if (name.size() >= 2 && name[0] == 'u') {
                bool digits = true;
                for (std::size_t i = 1; i < name.size(); ++i)
                    if (!std::isdigit(static_cast<unsigned char>(name[i]))) { digits = false; break; }
                if (digits && name[1] != '0') return Expr::param(std::stoi(name.substr(1)));
            }
            UnaryFn fn;
            if (name == "sin") fn = UnaryFn::Sin;
            else if (name == "cos") fn = UnaryFn::Cos;
            else if (name == "exp") fn = UnaryFn::Exp;
            else if (name == "ln") fn = UnaryFn::Ln;
            else if (name == "sqrt") fn = UnaryFn::Sqrt;
            else if (name == "abs") fn = UnaryFn::Abs;
            else throw SyntaxError(t.line, t.col, "a parameter u<i>, K, or a function name, got '" + name + "'");
            expect(TokKind::LParen, "'(' after function name");
            Expr arg = parse_sum();
            expect(TokKind::RParen, "')'");
            return Expr::unary(fn, arg);
        }
        default:
            throw SyntaxError(t.line, t.col, "a number, parameter, function call, or '('");
        }
    }

    const std::vector<Token>& toks_;
    int line_;
    std::size_t pos_ = 0;
};

inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(begin));
            break;
        }
        lines.push_back(text.substr(begin, end - begin));
        begin = end + 1;
    }
    return lines;
}

inline std::string_view trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace detail

// Parses a standalone expression (used by tests and the catalog).
inline Expr parse_expression(std::string_view text) {
    std::vector<Token> toks;
    detail::tokenize_line(text, 1, toks);
    detail::ExprParser p(toks, 1);
    Expr e = p.parse_expression();
    if (!p.at_end()) throw SyntaxError(1, p.next_col(), "end of expression");
    return e;
}

// Parses a surface description:
//   n = <int>
//   domain = [a,b] x [a,b] x ...
//   x = [expr, expr, ...]
//   q <label> = <expr>          (support function; K allowed)
//   alpha <label> = <real>      (shorthand for q <label> = abs(K)^<real>)
//   name = <free text>          (optional)
// '#' starts a comment.  Statement order is free; keys must be unique.
inline SurfaceSpec parse_spec(std::string_view text) {
    SurfaceSpec spec;
    bool have_n = false, have_domain = false, have_x = false, have_name = false;
    std::set<std::string> labels;

    const std::vector<std::string_view> lines = detail::split_lines(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const int line_no = static_cast<int>(li) + 1;
        std::string_view line = lines[li];

        // 'name' takes the rest of the line verbatim, so handle it textually
        // before tokenizing (free text may contain characters outside the
        // expression alphabet).
        std::string_view trimmed = detail::trim(line);
        if (trimmed.size() >= 4 && trimmed.substr(0, 4) == "name") {
            std::string_view rest = detail::trim(trimmed.substr(4));
            if (!rest.empty() && rest[0] == '=') {
                if (have_name) throw DuplicateKey(line_no, 1, "name");
                have_name = true;
                spec.name = std::string(detail::trim(rest.substr(1)));
                continue;
            }
        }

        std::vector<Token> toks;
        detail::tokenize_line(line, line_no, toks);
        if (toks.empty()) continue;

        if (toks[0].kind != TokKind::Ident)
            throw SyntaxError(line_no, toks[0].col, "a statement keyword (n, domain, x, q, alpha, name)");
        const std::string key = toks[0].text;
        detail::ExprParser p(toks, line_no);
        p.take(); // keyword

        auto fold_constant = [&](const char* what) {
            int col = p.next_col();
            Expr e = p.parse_expression();
            std::optional<double> v = constant_fold(e);
            if (!v) throw SyntaxError(line_no, col, what);
            return *v;
        };

        if (key == "n") {
            if (have_n) throw DuplicateKey(line_no, toks[0].col, "n");
            p.expect(TokKind::Equals, "'='");
            double v = fold_constant("an integer dimension");
            if (!is_integer(v)) throw SyntaxError(line_no, toks[0].col, "an integer dimension");
            spec.dim = static_cast<int>(v);
            have_n = true;
        } else if (key == "domain") {
            if (have_domain) throw DuplicateKey(line_no, toks[0].col, "domain");
            p.expect(TokKind::Equals, "'='");
            for (;;) {
                p.expect(TokKind::LBracket, "'['");
                Interval iv;
                iv.lo = fold_constant("a constant lower bound");
                p.expect(TokKind::Comma, "','");
                iv.hi = fold_constant("a constant upper bound");
                p.expect(TokKind::RBracket, "']'");
                spec.domain.push_back(iv);
                if (p.at_end()) break;
                const Token& sep = p.peek();
                if (sep.kind != TokKind::Ident || sep.text != "x")
                    throw SyntaxError(line_no, sep.col, "'x' between intervals");
                p.take();
            }
            have_domain = true;
        } else if (key == "x") {
            if (have_x) throw DuplicateKey(line_no, toks[0].col, "x");
            p.expect(TokKind::Equals, "'='");
            p.expect(TokKind::LBracket, "'['");
            spec.immersion.push_back(p.parse_expression());
            while (p.accept(TokKind::Comma)) spec.immersion.push_back(p.parse_expression());
            p.expect(TokKind::RBracket, "']'");
            have_x = true;
        } else if (key == "q" || key == "alpha") {
            const Token& lbl = p.peek();
            if (lbl.kind != TokKind::Ident) throw SyntaxError(line_no, p.next_col(), "a support-function label");
            p.take();
            if (!labels.insert(lbl.text).second) throw DuplicateKey(line_no, lbl.col, lbl.text);
            p.expect(TokKind::Equals, "'='");
            SupportFunction sf;
            sf.label = lbl.text;
            if (key == "q") {
                sf.expr = p.parse_expression();
            } else {
                double a = fold_constant("a constant exponent");
                sf.expr = Expr::power(Expr::unary(UnaryFn::Abs, Expr::curvature()), a);
                sf.family_exponent = a;
            }
            spec.supports.push_back(std::move(sf));
        } else {
            throw SyntaxError(line_no, toks[0].col, "a statement keyword (n, domain, x, q, alpha, name)");
        }

        if (!p.at_end()) throw SyntaxError(line_no, p.next_col(), "end of line");
    }

    if (!have_n) throw MissingKey("n");
    if (!have_domain) throw MissingKey("domain");
    if (!have_x) throw MissingKey("x");
    return spec;
}

namespace detail {

inline bool is_abs_curvature(const Expr& e) {
    return e.kind() == Expr::Kind::Unary && e.unary_fn() == UnaryFn::Abs &&
           e.child(0).kind() == Expr::Kind::Curvature;
}

// Recognizes c, |K|^a, c*|K|^a, and |K|^a*c so the harness knows the
// one-parameter family membership of a support function.
inline void detect_family(SupportFunction& sf) {
    if (sf.family_exponent) return;
    const Expr& e = sf.expr;
    if (e.kind() == Expr::Kind::Constant && e.constant_value() != 0.0) {
        sf.family_exponent = 0.0;
        sf.family_scale = e.constant_value();
        return;
    }
    if (e.kind() == Expr::Kind::Power && is_abs_curvature(e.child(0))) {
        sf.family_exponent = e.exponent();
        sf.family_scale = 1.0;
        return;
    }
    if (e.kind() == Expr::Kind::Binary && e.binary_op() == BinaryOp::Mul) {
        for (int side = 0; side < 2; ++side) {
            const Expr& c = e.child(static_cast<std::size_t>(side));
            const Expr& p = e.child(static_cast<std::size_t>(1 - side));
            if (c.kind() == Expr::Kind::Constant && c.constant_value() != 0.0 &&
                p.kind() == Expr::Kind::Power && is_abs_curvature(p.child(0))) {
                sf.family_exponent = p.exponent();
                sf.family_scale = c.constant_value();
                return;
            }
        }
    }
}

inline void check_support_rules(const Expr& e) {
    if (e.kind() == Expr::Kind::Power && !is_integer(e.exponent()) &&
        !(e.child(0).kind() == Expr::Kind::Unary && e.child(0).unary_fn() == UnaryFn::Abs))
        throw ValidationError("a non-integer power requires an abs(...) base");
    if (e.kind() == Expr::Kind::Unary) {
        std::optional<double> v = constant_fold(e.child(0));
        if (e.unary_fn() == UnaryFn::Ln && v && *v <= 0.0)
            throw ValidationError("ln of a constant that is not positive");
        if (e.unary_fn() == UnaryFn::Sqrt && v && *v < 0.0)
            throw ValidationError("sqrt of a negative constant");
    }
    for (std::size_t i = 0; i < e.child_count(); ++i) check_support_rules(e.child(i));
}

} // namespace detail

// Semantic validation; returns the (possibly augmented) description.
// Auto-inserts the support function 'euclidean' = 1 when that label is absent.
inline SurfaceSpec validate_spec(SurfaceSpec spec) {
    if (spec.dim < 2) throw ValidationError("dimension must be >= 2");
    if (static_cast<int>(spec.domain.size()) != spec.dim)
        throw ValidationError("domain must list exactly n intervals");
    for (const Interval& iv : spec.domain) {
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
            throw ValidationError("domain bounds must be finite");
        if (!(iv.lo < iv.hi)) throw ValidationError("domain intervals must have positive width");
    }
    if (static_cast<int>(spec.immersion.size()) != spec.dim + 1)
        throw ValidationError("immersion must list exactly n+1 components");
    for (const Expr& comp : spec.immersion) {
        if (comp.references_curvature()) throw ValidationError("K is not allowed in immersion components");
        if (comp.max_param_index() > spec.dim)
            throw ValidationError("parameter index exceeds the declared dimension");
        detail::check_support_rules(comp);
    }
    for (SupportFunction& sf : spec.supports) {
        if (sf.expr.max_param_index() > spec.dim)
            throw ValidationError("parameter index exceeds the declared dimension");
        detail::check_support_rules(sf.expr);
        detail::detect_family(sf);
    }
    if (!spec.find_support("euclidean")) {
        SupportFunction sf;
        sf.label = "euclidean";
        sf.expr = Expr::constant(1.0);
        sf.family_exponent = 0.0;
        sf.family_scale = 1.0;
        spec.supports.push_back(std::move(sf));
    }
    return spec;
}

// Convenience: parse then validate.
inline SurfaceSpec load_spec(std::string_view text) { return validate_spec(parse_spec(text)); }

} // namespace relnorm
