#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "parser.hpp"
#include "surface.hpp"

namespace relnorm {

// Built-in surface descriptions in the same text format parse_spec accepts.
// Every entry carries the support-function labels euclidean, affine, m03
// (exponent 0.3), m03s (the same scaled by 2.5), and a generic smooth
// positive support; domains stay clear of parametrization degeneracies.
struct CatalogEntry {
    std::string name;
    std::string text;
};

inline const std::vector<CatalogEntry>& catalog_texts() {
    static const std::vector<CatalogEntry> entries = {
        {"sphere",
         "name = sphere\n"
         "n = 2\n"
         "domain = [-0.7, 0.7] x [-0.6, 0.6]\n"
         "x = [cos(u1)*cos(u2), sin(u1)*cos(u2), sin(u2)]\n"
         "q euclidean = 1\n"
         "alpha affine = 1/4\n"
         "alpha m03 = 0.3\n"
         "q m03s = 2.5*abs(K)^0.3\n"
         "q generic = 1 + exp(0.2*u1 - 0.1*u2)\n"},
        {"ellipsoid",
         "name = ellipsoid\n"
         "n = 2\n"
         "domain = [-0.7, 0.7] x [-0.6, 0.6]\n"
         "x = [cos(u1)*cos(u2), 1.3*sin(u1)*cos(u2), 0.7*sin(u2)]\n"
         "q euclidean = 1\n"
         "alpha affine = 1/4\n"
         "alpha m03 = 0.3\n"
         "q m03s = 2.5*abs(K)^0.3\n"
         "q generic = 1 + exp(0.2*u1 - 0.1*u2)\n"
         "q combo = 0.8*(1 + exp(0.2*u1 - 0.1*u2)) + 0.7*abs(K)^(1/4)\n"},
        {"elliptic-paraboloid",
         "name = elliptic-paraboloid\n"
         "n = 2\n"
         "domain = [-1, 1] x [-1, 1]\n"
         "x = [u1, u2, (u1^2 + u2^2)/2]\n"
         "q euclidean = 1\n"
         "alpha affine = 1/4\n"
         "alpha m03 = 0.3\n"
         "q m03s = 2.5*abs(K)^0.3\n"
         "q generic = 1 + exp(0.2*u1 - 0.1*u2)\n"},
        {"hyperbolic-paraboloid",
         "name = hyperbolic-paraboloid\n"
         "n = 2\n"
         "domain = [-1, 1] x [-1, 1]\n"
         "x = [u1, u2, (u1^2 - u2^2)/2]\n"
         "q euclidean = 1\n"
         "alpha affine = 1/4\n"
         "alpha m03 = 0.3\n"
         "q m03s = 2.5*abs(K)^0.3\n"
         "q generic = 1 + exp(0.2*u1 - 0.1*u2)\n"},
        {"ellipsoid-r4",
         "name = ellipsoid-r4\n"
         "n = 3\n"
         "domain = [-0.7, 0.7] x [-0.6, 0.6] x [-0.55, 0.55]\n"
         "x = [cos(u1)*cos(u2)*cos(u3), 1.2*sin(u1)*cos(u2)*cos(u3), 0.8*sin(u2)*cos(u3), 1.5*sin(u3)]\n"
         "q euclidean = 1\n"
         "alpha affine = 1/5\n"
         "alpha m03 = 0.3\n"
         "q m03s = 2.5*abs(K)^0.3\n"
         "q generic = 1 + exp(0.2*u1 - 0.1*u2)\n"
         "alpha invk = -1\n"
         "alpha k1 = 1\n"},
    };
    return entries;
}

inline const std::vector<SurfaceSpec>& catalog() {
    static const std::vector<SurfaceSpec> specs = [] {
        std::vector<SurfaceSpec> out;
        for (const CatalogEntry& e : catalog_texts()) out.push_back(load_spec(e.text));
        return out;
    }();
    return specs;
}

inline const SurfaceSpec& catalog_find(std::string_view name) {
    for (const SurfaceSpec& s : catalog())
        if (s.name == name) return s;
    throw ValidationError("unknown catalog surface '" + std::string(name) + "'");
}

} // namespace relnorm
