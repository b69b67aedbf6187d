#pragma once

#include <charconv>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"

namespace relnorm {

enum class UnaryFn { Negate, Sin, Cos, Exp, Ln, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div };

// Immutable expression tree over parameters u1..un, real constants, the
// curvature builtin K, arithmetic, elementary functions, and powers with a
// fixed real exponent.
class Expr {
public:
    enum class Kind { Constant, Param, Curvature, Unary, Binary, Power };

    Expr() = default;

    static Expr constant(double v) {
        auto node = std::make_shared<Node>();
        node->kind = Kind::Constant;
        node->num = v;
        return Expr(std::move(node));
    }

    static Expr param(int index) { // 1-based parameter index
        if (index < 1) throw Error("parameter index must be positive");
        auto node = std::make_shared<Node>();
        node->kind = Kind::Param;
        node->var = index;
        return Expr(std::move(node));
    }

    static Expr curvature() {
        auto node = std::make_shared<Node>();
        node->kind = Kind::Curvature;
        return Expr(std::move(node));
    }

    static Expr unary(UnaryFn fn, Expr arg) {
        auto node = std::make_shared<Node>();
        node->kind = Kind::Unary;
        node->fn = fn;
        node->kids.push_back(std::move(arg));
        return Expr(std::move(node));
    }

    static Expr binary(BinaryOp op, Expr lhs, Expr rhs) {
        auto node = std::make_shared<Node>();
        node->kind = Kind::Binary;
        node->op = op;
        node->kids.push_back(std::move(lhs));
        node->kids.push_back(std::move(rhs));
        return Expr(std::move(node));
    }

    static Expr power(Expr base, double exponent) {
        auto node = std::make_shared<Node>();
        node->kind = Kind::Power;
        node->num = exponent;
        node->kids.push_back(std::move(base));
        return Expr(std::move(node));
    }

    bool valid() const { return n_ != nullptr; }
    Kind kind() const { return n_->kind; }
    double constant_value() const { return n_->num; }
    int param_index() const { return n_->var; }
    UnaryFn unary_fn() const { return n_->fn; }
    BinaryOp binary_op() const { return n_->op; }
    double exponent() const { return n_->num; }
    std::size_t child_count() const { return n_->kids.size(); }
    const Expr& child(std::size_t i) const { return n_->kids[i]; }

    bool references_curvature() const {
        if (kind() == Kind::Curvature) return true;
        for (const Expr& k : n_->kids)
            if (k.references_curvature()) return true;
        return false;
    }

    int max_param_index() const {
        int m = (kind() == Kind::Param) ? n_->var : 0;
        for (const Expr& k : n_->kids) m = std::max(m, k.max_param_index());
        return m;
    }

private:
    struct Node {
        Kind kind = Kind::Constant;
        double num = 0.0; // constant value, or power exponent
        int var = 0;      // 1-based parameter index
        UnaryFn fn = UnaryFn::Negate;
        BinaryOp op = BinaryOp::Add;
        std::vector<Expr> kids;
    };

    explicit Expr(std::shared_ptr<Node> node) : n_(std::move(node)) {}

    std::shared_ptr<const Node> n_;
};

inline bool is_integer(double v) { return v == std::rint(v); }

inline bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case Expr::Kind::Constant: return a.constant_value() == b.constant_value();
    case Expr::Kind::Param: return a.param_index() == b.param_index();
    case Expr::Kind::Curvature: return true;
    case Expr::Kind::Unary:
        return a.unary_fn() == b.unary_fn() && structurally_equal(a.child(0), b.child(0));
    case Expr::Kind::Binary:
        return a.binary_op() == b.binary_op() && structurally_equal(a.child(0), b.child(0)) &&
               structurally_equal(a.child(1), b.child(1));
    case Expr::Kind::Power:
        return a.exponent() == b.exponent() && structurally_equal(a.child(0), b.child(0));
    }
    return false;
}

inline const char* unary_name(UnaryFn fn) {
    switch (fn) {
    case UnaryFn::Negate: return "-";
    case UnaryFn::Sin: return "sin";
    case UnaryFn::Cos: return "cos";
    case UnaryFn::Exp: return "exp";
    case UnaryFn::Ln: return "ln";
    case UnaryFn::Sqrt: return "sqrt";
    case UnaryFn::Abs: return "abs";
    }
    return "?";
}

namespace detail {

inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v); // shortest round-trip form
    return std::string(buf, res.ptr);
}

// Precedence levels: additive 10 < multiplicative 20 < unary minus 30 <
// power 40 < atoms 50.  '^' is right-associative; '+ - * /' associate left.
inline int precedence(const Expr& e) {
    switch (e.kind()) {
    case Expr::Kind::Binary:
        return (e.binary_op() == BinaryOp::Add || e.binary_op() == BinaryOp::Sub) ? 10 : 20;
    case Expr::Kind::Unary: return e.unary_fn() == UnaryFn::Negate ? 30 : 50;
    case Expr::Kind::Power: return 40;
    default: return 50;
    }
}

inline void print(const Expr& e, std::string& out) {
    switch (e.kind()) {
    case Expr::Kind::Constant:
        out += format_number(e.constant_value());
        return;
    case Expr::Kind::Param:
        out += "u" + std::to_string(e.param_index());
        return;
    case Expr::Kind::Curvature:
        out += "K";
        return;
    case Expr::Kind::Unary: {
        if (e.unary_fn() == UnaryFn::Negate) {
            out += '-';
            bool parens = precedence(e.child(0)) < 40; // everything below power binds looser
            if (parens) out += '(';
            print(e.child(0), out);
            if (parens) out += ')';
            return;
        }
        out += unary_name(e.unary_fn());
        out += '(';
        print(e.child(0), out);
        out += ')';
        return;
    }
    case Expr::Kind::Binary: {
        const int prec = precedence(e);
        const char* sym = nullptr;
        switch (e.binary_op()) {
        case BinaryOp::Add: sym = " + "; break;
        case BinaryOp::Sub: sym = " - "; break;
        case BinaryOp::Mul: sym = "*"; break;
        case BinaryOp::Div: sym = "/"; break;
        }
        bool lp = precedence(e.child(0)) < prec;
        bool rp = precedence(e.child(1)) <= prec; // strict: keeps left association explicit
        if (lp) out += '(';
        print(e.child(0), out);
        if (lp) out += ')';
        out += sym;
        if (rp) out += '(';
        print(e.child(1), out);
        if (rp) out += ')';
        return;
    }
    case Expr::Kind::Power: {
        bool bp = precedence(e.child(0)) <= 40;
        if (bp) out += '(';
        print(e.child(0), out);
        if (bp) out += ')';
        out += '^';
        out += format_number(e.exponent());
        return;
    }
    }
}

} // namespace detail

// Minimal-parenthesis rendering that re-parses to a structurally identical tree.
inline std::string to_string(const Expr& e) {
    std::string out;
    detail::print(e, out);
    return out;
}

inline double eval_value(const Expr& e, std::span<const double> point, const double* curvature = nullptr) {
    switch (e.kind()) {
    case Expr::Kind::Constant:
        return e.constant_value();
    case Expr::Kind::Param: {
        std::size_t i = static_cast<std::size_t>(e.param_index()) - 1;
        if (i >= point.size()) throw Error("parameter index exceeds the point dimension");
        return point[i];
    }
    case Expr::Kind::Curvature:
        if (!curvature) throw MissingBuiltin();
        return *curvature;
    case Expr::Kind::Unary: {
        double v = eval_value(e.child(0), point, curvature);
        switch (e.unary_fn()) {
        case UnaryFn::Negate: return -v;
        case UnaryFn::Sin: return std::sin(v);
        case UnaryFn::Cos: return std::cos(v);
        case UnaryFn::Exp: return std::exp(v);
        case UnaryFn::Ln:
            if (!(v > 0.0)) throw DomainErrorJet("ln");
            return std::log(v);
        case UnaryFn::Sqrt:
            if (v < 0.0) throw DomainErrorJet("sqrt");
            return std::sqrt(v);
        case UnaryFn::Abs: return std::abs(v);
        }
        return 0.0;
    }
    case Expr::Kind::Binary: {
        double l = eval_value(e.child(0), point, curvature);
        double r = eval_value(e.child(1), point, curvature);
        switch (e.binary_op()) {
        case BinaryOp::Add: return l + r;
        case BinaryOp::Sub: return l - r;
        case BinaryOp::Mul: return l * r;
        case BinaryOp::Div:
            if (r == 0.0) throw DivisionByZeroJet();
            return l / r;
        }
        return 0.0;
    }
    case Expr::Kind::Power: {
        double b = eval_value(e.child(0), point, curvature);
        double p = e.exponent();
        if (!is_integer(p) && !(b > 0.0)) throw DomainErrorJet("pow");
        if (is_integer(p) && p < 0.0 && b == 0.0) throw DivisionByZeroJet();
        return std::pow(b, p);
    }
    }
    return 0.0;
}

// Value of an expression with no parameters and no K; nullopt when either
// appears or the arithmetic is invalid.  Used for exponents and bounds.
inline std::optional<double> constant_fold(const Expr& e) {
    if (e.max_param_index() > 0 || e.references_curvature()) return std::nullopt;
    try {
        return eval_value(e, std::span<const double>{});
    } catch (const SkipPoint&) {
        return std::nullopt;
    }
}

namespace detail {

inline Jet eval_jet_impl(const Expr& e, const std::vector<Jet>& seeds, const Jet* curvature) {
    switch (e.kind()) {
    case Expr::Kind::Constant:
        return Jet(seeds[0].layout(), e.constant_value());
    case Expr::Kind::Param: {
        std::size_t i = static_cast<std::size_t>(e.param_index()) - 1;
        if (i >= seeds.size()) throw Error("parameter index exceeds the seed dimension");
        return seeds[i];
    }
    case Expr::Kind::Curvature:
        if (!curvature) throw MissingBuiltin();
        return *curvature;
    case Expr::Kind::Unary: {
        Jet v = eval_jet_impl(e.child(0), seeds, curvature);
        switch (e.unary_fn()) {
        case UnaryFn::Negate: return -v;
        case UnaryFn::Sin: return sin(v);
        case UnaryFn::Cos: return cos(v);
        case UnaryFn::Exp: return exp(v);
        case UnaryFn::Ln: return ln(v);
        case UnaryFn::Sqrt: return sqrt(v);
        case UnaryFn::Abs: return abs(v);
        }
        return v;
    }
    case Expr::Kind::Binary: {
        Jet l = eval_jet_impl(e.child(0), seeds, curvature);
        Jet r = eval_jet_impl(e.child(1), seeds, curvature);
        switch (e.binary_op()) {
        case BinaryOp::Add: return l + r;
        case BinaryOp::Sub: return l - r;
        case BinaryOp::Mul: return l * r;
        case BinaryOp::Div: return l / r;
        }
        return l;
    }
    case Expr::Kind::Power:
        return pow(eval_jet_impl(e.child(0), seeds, curvature), e.exponent());
    }
    throw Error("invalid expression");
}

} // namespace detail

// Evaluates an expression in jet arithmetic.  When the expression references
// K, the result is truncated to min(seed order, curvature order).
inline Jet eval_jet(const Expr& e, const std::vector<Jet>& seeds, const Jet* curvature = nullptr) {
    if (seeds.empty()) throw Error("jet evaluation requires at least one seed");
    if (e.references_curvature()) {
        if (!curvature) throw MissingBuiltin();
        int common = std::min(seeds[0].order(), curvature->order());
        std::vector<Jet> s;
        s.reserve(seeds.size());
        for (const Jet& j : seeds) s.push_back(j.truncated(common));
        Jet k = curvature->truncated(common);
        return detail::eval_jet_impl(e, s, &k);
    }
    return detail::eval_jet_impl(e, seeds, nullptr);
}

} // namespace relnorm
