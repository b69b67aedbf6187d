#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace relnorm {

using MultiIndex = std::vector<int>;

inline int degree(const MultiIndex& b) { return std::accumulate(b.begin(), b.end(), 0); }

inline double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Coefficient layout shared by all jets with the same (variable count,
// truncation order): the multi-indices |beta| <= order in graded
// lexicographic order, plus precomputed Leibniz pairings and the index
// shifts used to read off partial derivatives.  Layouts are interned, so
// two jets are compatible exactly when their layout addresses match, and
// the indices of order <= r-1 form a prefix (truncation is a prefix copy).
class JetLayout {
public:
    struct MulTerm {
        std::uint32_t a, b; // positions of beta and gamma-beta
        double binom;       // product of componentwise binomial coefficients
    };

    static const JetLayout& get(int vars, int order) {
        static std::mutex mutex;
        static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
        if (vars < 1) throw Error("jet layout requires at least one variable");
        if (order < 0) throw Error("jet layout requires a nonnegative order");
        std::lock_guard<std::mutex> lock(mutex);
        auto& slot = cache[{vars, order}];
        if (!slot) slot.reset(new JetLayout(vars, order));
        return *slot;
    }

    int vars() const { return vars_; }
    int order() const { return order_; }
    std::size_t size() const { return indices_.size(); }
    // Number of coefficients of total degree <= r (a prefix of the layout).
    std::size_t size_at_order(int r) const { return degree_begin_[static_cast<std::size_t>(r) + 1]; }

    const MultiIndex& index_at(std::size_t pos) const { return indices_[pos]; }

    std::size_t position(const MultiIndex& beta) const {
        auto it = pos_.find(beta);
        if (it == pos_.end()) throw Error("multi-index outside the jet's truncation order");
        return it->second;
    }

    const std::vector<MulTerm>& mul_terms(std::size_t pos) const { return mul_[pos]; }

    // Position of index_at(p) + e_i, defined for p < size_at_order(order-1).
    std::uint32_t shifted(int i, std::size_t p) const { return shift_[static_cast<std::size_t>(i)][p]; }

private:
    JetLayout(int vars, int order) : vars_(vars), order_(order) {
        degree_begin_.assign(static_cast<std::size_t>(order) + 2, 0);
        MultiIndex cur(static_cast<std::size_t>(vars), 0);
        std::function<void(int, int)> gen = [&](int slot, int rem) {
            if (slot == vars - 1) {
                cur[static_cast<std::size_t>(slot)] = rem;
                indices_.push_back(cur);
                return;
            }
            for (int v = 0; v <= rem; ++v) {
                cur[static_cast<std::size_t>(slot)] = v;
                gen(slot + 1, rem - v);
            }
        };
        for (int d = 0; d <= order; ++d) {
            degree_begin_[static_cast<std::size_t>(d)] = indices_.size();
            gen(0, d);
        }
        degree_begin_[static_cast<std::size_t>(order) + 1] = indices_.size();

        for (std::size_t p = 0; p < indices_.size(); ++p) pos_[indices_[p]] = static_cast<std::uint32_t>(p);

        // Leibniz pairings: for each gamma, all beta <= gamma (componentwise)
        // enumerated by an odometer, with binomial(gamma, beta) weights.
        mul_.resize(indices_.size());
        for (std::size_t c = 0; c < indices_.size(); ++c) {
            const MultiIndex& gamma = indices_[c];
            MultiIndex beta(static_cast<std::size_t>(vars), 0);
            MultiIndex rest = gamma;
            for (;;) {
                double w = 1.0;
                for (int i = 0; i < vars; ++i)
                    w *= binomial(gamma[static_cast<std::size_t>(i)], beta[static_cast<std::size_t>(i)]);
                mul_[c].push_back({pos_.at(beta), pos_.at(rest), w});
                int i = vars - 1;
                while (i >= 0 && beta[static_cast<std::size_t>(i)] == gamma[static_cast<std::size_t>(i)]) {
                    beta[static_cast<std::size_t>(i)] = 0;
                    rest[static_cast<std::size_t>(i)] = gamma[static_cast<std::size_t>(i)];
                    --i;
                }
                if (i < 0) break;
                ++beta[static_cast<std::size_t>(i)];
                --rest[static_cast<std::size_t>(i)];
            }
        }

        // Shift tables for derivative extraction: indices of degree <= r-1
        // are a prefix of this layout, so no second layout is needed here.
        shift_.resize(static_cast<std::size_t>(vars));
        const std::size_t smaller = (order == 0) ? 0 : degree_begin_[static_cast<std::size_t>(order)];
        for (int i = 0; i < vars; ++i) {
            shift_[static_cast<std::size_t>(i)].resize(smaller);
            for (std::size_t p = 0; p < smaller; ++p) {
                MultiIndex b = indices_[p];
                ++b[static_cast<std::size_t>(i)];
                shift_[static_cast<std::size_t>(i)][p] = pos_.at(b);
            }
        }
    }

    int vars_, order_;
    std::vector<MultiIndex> indices_;
    std::map<MultiIndex, std::uint32_t> pos_;
    std::vector<std::vector<MulTerm>> mul_;
    std::vector<std::vector<std::uint32_t>> shift_;
    std::vector<std::size_t> degree_begin_;
};

// Truncated multivariate Taylor expansion storing raw partial derivatives:
// coefficient at multi-index beta is the partial derivative d^beta f, not
// the Taylor coefficient d^beta f / beta!.
class Jet {
public:
    Jet() = default;

    Jet(const JetLayout& layout, double value) : layout_(&layout), c_(layout.size(), 0.0) { c_[0] = value; }

    // Coordinate jet: value plus unit first derivative in variable `var` (0-based).
    static Jet seeded(const JetLayout& layout, double value, int var) {
        Jet j(layout, value);
        if (layout.order() >= 1) {
            MultiIndex e(static_cast<std::size_t>(layout.vars()), 0);
            e[static_cast<std::size_t>(var)] = 1;
            j.c_[layout.position(e)] = 1.0;
        }
        return j;
    }

    const JetLayout& layout() const { return *layout_; }
    int vars() const { return layout_->vars(); }
    int order() const { return layout_->order(); }

    double value() const { return c_[0]; }

    double first(int i) const {
        MultiIndex e(static_cast<std::size_t>(vars()), 0);
        e[static_cast<std::size_t>(i)] = 1;
        return extract(e);
    }

    double second(int i, int j) const {
        MultiIndex e(static_cast<std::size_t>(vars()), 0);
        ++e[static_cast<std::size_t>(i)];
        ++e[static_cast<std::size_t>(j)];
        return extract(e);
    }

    double extract(const MultiIndex& beta) const { return c_[layout_->position(beta)]; }

    const std::vector<double>& coefficients() const { return c_; }

    Jet truncated(int new_order) const {
        if (new_order > order()) throw Error("cannot extend a jet's truncation order");
        if (new_order == order()) return *this;
        const JetLayout& lo = JetLayout::get(vars(), new_order);
        Jet out(lo, 0.0);
        std::copy(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(lo.size()), out.c_.begin());
        return out;
    }

    // Jet of the raw partial derivative d_i f, one order lower.
    Jet derivative(int i) const {
        if (order() < 1) throw Error("cannot differentiate an order-0 jet");
        const JetLayout& lo = JetLayout::get(vars(), order() - 1);
        Jet out(lo, 0.0);
        for (std::size_t p = 0; p < lo.size(); ++p) out.c_[p] = c_[layout_->shifted(i, p)];
        return out;
    }

    Jet& operator+=(const Jet& o) {
        require_same(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        require_same(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Jet& operator+=(double s) { c_[0] += s; return *this; }
    Jet& operator-=(double s) { c_[0] -= s; return *this; }
    Jet& operator*=(double s) {
        for (double& x : c_) x *= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator+(Jet a, double s) { a += s; return a; }
    friend Jet operator+(double s, Jet a) { a += s; return a; }
    friend Jet operator-(Jet a, double s) { a -= s; return a; }
    friend Jet operator-(double s, const Jet& a) { Jet r = -a; r += s; return r; }
    friend Jet operator*(Jet a, double s) { a *= s; return a; }
    friend Jet operator*(double s, Jet a) { a *= s; return a; }
    friend Jet operator/(Jet a, double s) {
        if (s == 0.0) throw DivisionByZeroJet();
        a *= 1.0 / s;
        return a;
    }
    friend Jet operator-(const Jet& a) {
        Jet r = a;
        r *= -1.0;
        return r;
    }

    // Leibniz product: d^gamma (fg) = sum_{beta<=gamma} C(gamma,beta) d^beta f d^(gamma-beta) g.
    friend Jet operator*(const Jet& a, const Jet& b) {
        a.require_same(b);
        const JetLayout& lo = *a.layout_;
        Jet out(lo, 0.0);
        for (std::size_t c = 0; c < lo.size(); ++c) {
            double acc = 0.0;
            for (const JetLayout::MulTerm& t : lo.mul_terms(c)) acc += t.binom * a.c_[t.a] * b.c_[t.b];
            out.c_[c] = acc;
        }
        return out;
    }

    // result = sum_k taylor[k] * (a - a.value)^k with taylor.size() == order+1.
    // Powers are accumulated bottom-up so that coefficients of degree d only
    // ever depend on coefficients of degree <= d: computing at a higher
    // truncation order and discarding the top coefficients reproduces the
    // lower-order computation bit for bit.
    friend Jet compose(const Jet& a, std::span<const double> taylor) {
        Jet t = a;
        t.c_[0] = 0.0;
        Jet out(*a.layout_, taylor[0]);
        if (a.order() == 0) return out;
        Jet p = t;
        for (int k = 1; k <= a.order(); ++k) {
            if (k > 1) p = p * t;
            Jet term = p;
            term *= taylor[static_cast<std::size_t>(k)];
            out += term;
        }
        return out;
    }

private:
    void require_same(const Jet& o) const {
        if (layout_ != o.layout_) throw Error("jet operands have mismatched variable count or order");
    }

    const JetLayout* layout_ = nullptr;
    std::vector<double> c_;
};

inline double pivot_mag(const Jet& j) { return std::abs(j.value()); }

inline Jet recip(const Jet& a) {
    if (a.value() == 0.0) throw DivisionByZeroJet();
    const int r = a.order();
    std::vector<double> t(static_cast<std::size_t>(r) + 1);
    double inv = 1.0 / a.value();
    double cur = inv;
    for (int k = 0; k <= r; ++k) {
        t[static_cast<std::size_t>(k)] = cur;
        cur *= -inv;
    }
    return compose(a, t);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }
inline Jet operator/(double s, const Jet& b) { Jet r = recip(b); r *= s; return r; }

inline Jet exp(const Jet& a) {
    const int r = a.order();
    std::vector<double> t(static_cast<std::size_t>(r) + 1);
    double e = std::exp(a.value());
    double invfact = 1.0;
    for (int k = 0; k <= r; ++k) {
        if (k > 0) invfact /= k;
        t[static_cast<std::size_t>(k)] = e * invfact;
    }
    return compose(a, t);
}

inline Jet ln(const Jet& a) {
    if (!(a.value() > 0.0)) throw DomainErrorJet("ln");
    const int r = a.order();
    std::vector<double> t(static_cast<std::size_t>(r) + 1);
    t[0] = std::log(a.value());
    double inv = 1.0 / a.value();
    double p = inv; // (1/a0)^k
    for (int k = 1; k <= r; ++k) {
        t[static_cast<std::size_t>(k)] = ((k % 2 == 1) ? 1.0 : -1.0) * p / k;
        p *= inv;
    }
    return compose(a, t);
}

inline Jet sin(const Jet& a) {
    const int r = a.order();
    std::vector<double> t(static_cast<std::size_t>(r) + 1);
    const double cyc[4] = {std::sin(a.value()), std::cos(a.value()), -std::sin(a.value()), -std::cos(a.value())};
    double invfact = 1.0;
    for (int k = 0; k <= r; ++k) {
        if (k > 0) invfact /= k;
        t[static_cast<std::size_t>(k)] = cyc[k % 4] * invfact;
    }
    return compose(a, t);
}

inline Jet cos(const Jet& a) {
    const int r = a.order();
    std::vector<double> t(static_cast<std::size_t>(r) + 1);
    const double cyc[4] = {std::cos(a.value()), -std::sin(a.value()), -std::cos(a.value()), std::sin(a.value())};
    double invfact = 1.0;
    for (int k = 0; k <= r; ++k) {
        if (k > 0) invfact /= k;
        t[static_cast<std::size_t>(k)] = cyc[k % 4] * invfact;
    }
    return compose(a, t);
}

// |f| as a jet: smooth wherever f does not vanish, where it equals sign(f)*f.
inline Jet abs(const Jet& a) {
    if (a.value() == 0.0) throw DomainErrorJet("abs");
    return a.value() > 0.0 ? a : -a;
}

// f^p for real p.  Integer exponents reduce to repeated multiplication and
// work for any nonzero base; fractional exponents require a positive base.
inline Jet pow(const Jet& a, double p) {
    if (p == std::rint(p) && std::abs(p) <= 64.0) {
        long e = static_cast<long>(std::rint(p));
        if (e == 0) return Jet(a.layout(), 1.0);
        if (e < 0 && a.value() == 0.0) throw DivisionByZeroJet();
        Jet acc(a.layout(), 1.0);
        Jet base = a;
        unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
        while (k > 0) {
            if (k & 1u) acc = acc * base;
            k >>= 1u;
            if (k > 0) base = base * base;
        }
        return e < 0 ? recip(acc) : acc;
    }
    if (!(a.value() > 0.0)) throw DomainErrorJet("pow");
    const int r = a.order();
    std::vector<double> t(static_cast<std::size_t>(r) + 1);
    double coeff = 1.0; // binomial(p, k)
    for (int k = 0; k <= r; ++k) {
        if (k > 0) coeff *= (p - (k - 1)) / k;
        t[static_cast<std::size_t>(k)] = coeff * std::pow(a.value(), p - k);
    }
    return compose(a, t);
}

inline Jet sqrt(const Jet& a) {
    if (!(a.value() > 0.0)) throw DomainErrorJet("sqrt");
    return pow(a, 0.5);
}

// A map into R^m as m jets sharing one layout (e.g. the immersion x, or the
// unit normal); free helpers below extract value- and derivative-vectors.
using MapJet = std::vector<Jet>;

inline Vec values(const MapJet& m) {
    Vec v(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) v[i] = m[i].value();
    return v;
}

inline Vec first_partials(const MapJet& m, int i) {
    Vec v(m.size());
    for (std::size_t a = 0; a < m.size(); ++a) v[a] = m[a].first(i);
    return v;
}

inline Vec extract(const MapJet& m, const MultiIndex& beta) {
    Vec v(m.size());
    for (std::size_t a = 0; a < m.size(); ++a) v[a] = m[a].extract(beta);
    return v;
}

inline MapJet derivative(const MapJet& m, int i) {
    MapJet out;
    out.reserve(m.size());
    for (const Jet& j : m) out.push_back(j.derivative(i));
    return out;
}

inline MapJet truncated(const MapJet& m, int order) {
    MapJet out;
    out.reserve(m.size());
    for (const Jet& j : m) out.push_back(j.truncated(order));
    return out;
}

inline Jet dot_jets(const MapJet& a, const MapJet& b) {
    Jet acc = a[0] * b[0];
    for (std::size_t i = 1; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// Coordinate jets for a parameter point, ready to be fed to expressions.
inline std::vector<Jet> seed_point(std::span<const double> point, int order) {
    const int n = static_cast<int>(point.size());
    const JetLayout& lo = JetLayout::get(n, order);
    std::vector<Jet> seeds;
    seeds.reserve(point.size());
    for (int i = 0; i < n; ++i) seeds.push_back(Jet::seeded(lo, point[static_cast<std::size_t>(i)], i));
    return seeds;
}

} // namespace relnorm
