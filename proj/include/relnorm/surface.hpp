#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expr.hpp"

namespace relnorm {

struct Interval {
    double lo = 0.0, hi = 0.0;
    double width() const { return hi - lo; }
};

// A named support function.  When the expression is recognized as
// scale*|K|^alpha (including plain constants, alpha = 0), the exponent and
// scale are recorded so the harness can run the one-parameter-family checks.
struct SupportFunction {
    std::string label;
    Expr expr;
    std::optional<double> family_exponent;
    double family_scale = 1.0;
};

// A parametric hypersurface x: D c R^n -> R^(n+1) with its support functions.
struct SurfaceSpec {
    int dim = 0;                         // parameter dimension n (ambient n+1)
    std::vector<Interval> domain;        // n closed intervals
    std::vector<Expr> immersion;         // n+1 component expressions
    std::vector<SupportFunction> supports;
    std::string name;

    const SupportFunction* find_support(const std::string& label) const {
        for (const SupportFunction& s : supports)
            if (s.label == label) return &s;
        return nullptr;
    }
};

// Immersion jets at a parameter point.
inline MapJet immersion_jets(const SurfaceSpec& spec, std::span<const double> point, int order) {
    std::vector<Jet> seeds = seed_point(point, order);
    MapJet x;
    x.reserve(spec.immersion.size());
    for (const Expr& comp : spec.immersion) x.push_back(eval_jet(comp, seeds));
    return x;
}

// Immersion values at a parameter point, evaluated without any jets.
inline Vec immersion_values(const SurfaceSpec& spec, std::span<const double> point) {
    Vec x(spec.immersion.size());
    for (std::size_t a = 0; a < spec.immersion.size(); ++a) x[a] = eval_value(spec.immersion[a], point);
    return x;
}

} // namespace relnorm
