// Relative apparatus for a single normalization: reference values on the
// unit sphere, defining properties of the conormal and the normalization
// vector, agreement of the three Tchebychev routes, the one-parameter family
// displays, and the closed-form mean-curvature comparison.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "relnorm/relnorm.hpp"

using namespace relnorm;

namespace {

Jet constant_support(int n, double value) { return Jet(JetLayout::get(n, 2), value); }

RelativeFrame build(const EuclideanFrame& f, const char* label) {
    const SurfaceSpec& spec = catalog_find(f.dim == 2 ? "ellipsoid" : "ellipsoid-r4");
    const SupportFunction* sf = spec.find_support(label);
    REQUIRE(sf != nullptr);
    const std::vector<Jet> seeds = seed_point(f.point, 2);
    return relative_at(f, eval_jet(sf->expr, seeds, &f.curvature_jet));
}

}  // namespace

TEST_CASE("unit sphere with unit support") {
    const SurfaceSpec& sphere = catalog_find("sphere");
    for (const std::vector<double>& pt : draw_points(sphere, 10, 2)) {
        const EuclideanFrame f = frame_at(sphere, pt);
        const RelativeFrame rel = relative_at(f, constant_support(2, 1.0));

        const Vec xi = f.normal_value();
        REQUIRE(normalized_residual(rel.y, xi) < 1e-13);
        REQUIRE(normalized_residual(rel.conormal_value, xi) < 1e-13);
        REQUIRE(norm(rel.Q_vec) < 1e-13);
        REQUIRE(norm(rel.T_euk) < 1e-13);
        REQUIRE(norm(rel.T_darboux) < 1e-14);
        REQUIRE(norm(rel.T_closed) < 1e-14);
        REQUIRE(norm(rel.T_decomp) < 1e-14);
        REQUIRE(normalized_residual(rel.lap_G_x, 2.0 * xi) < 1e-13);

        // shape operator is minus the identity; relative mean curvature -1
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                REQUIRE(std::abs(rel.B(i, j) - (i == j ? -1.0 : 0.0)) < 1e-12);
        REQUIRE(std::abs(rel.H_trace + 1.0) < 1e-12);
        REQUIRE(std::abs(rel.H_divergence_form + 1.0) < 1e-12);
    }
}

TEST_CASE("unit support reduces the relative apparatus to the Euclidean one") {
    const SurfaceSpec& spec = catalog_find("ellipsoid");
    for (const std::vector<double>& pt : draw_points(spec, 10, 4)) {
        const EuclideanFrame f = frame_at(spec, pt);
        const RelativeFrame rel = relative_at(f, constant_support(2, 1.0));
        REQUIRE(normalized_residual(rel.conormal_value, f.normal_value()) < 1e-12);
        REQUIRE(normalized_residual(rel.G, f.h) < 1e-12);
        REQUIRE(normalized_residual(rel.T_closed, rel.T_euk) < 1e-9);
        REQUIRE(normalized_residual(rel.y, f.normal_value()) < 1e-12);
    }
}

TEST_CASE("defining properties of the conormal and normalization vector") {
    for (const char* surface : {"ellipsoid", "ellipsoid-r4"}) {
        const SurfaceSpec& spec = catalog_find(surface);
        for (const std::vector<double>& pt : draw_points(spec, 15, 6)) {
            const EuclideanFrame f = frame_at(spec, pt);
            const RelativeFrame rel = build(f, "generic");
            const int n = f.dim;

            // <X, x_{/i}> = 0 and <X, y> = 1
            for (int i = 0; i < n; ++i)
                REQUIRE(std::abs(dot(rel.conormal_value, f.tangent_value(i))) < 1e-10);
            REQUIRE(std::abs(dot(rel.conormal_value, rel.y) - 1.0) < 1e-10);

            // y_{/i} stays tangential (defining property of a normalization)
            REQUIRE(rel.max_nontangential < 1e-10);

            // relative metric both as q^{-1} II and as <X, x_{/ij}>
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    REQUIRE(std::abs(rel.G(i, j) - f.h(i, j) / rel.q) <
                            1e-11 * (1.0 + std::abs(rel.G(i, j))));
                    REQUIRE(std::abs(dot(rel.conormal_value, f.second_partial_value(i, j)) -
                                     rel.G(i, j)) < 1e-10 * (1.0 + std::abs(rel.G(i, j))));
                }

            // Darboux tensor is fully symmetric; Tchebychev routes agree
            REQUIRE(rel.A_symmetry_defect < 1e-8);
            REQUIRE(normalized_residual(rel.T_darboux, rel.T_closed) < 1e-8);
            REQUIRE(normalized_residual(rel.T_decomp, rel.T_closed) < 1e-8);

            // tangential part of y is the projection field 2 n q Q
            REQUIRE(normalized_residual(rel.y_tangential, (2.0 * n * rel.q) * rel.Q_vec) < 1e-9);

            // the normalization-independent combination
            REQUIRE(normalization_invariance(f, rel) < 1e-8);
        }
    }
}

TEST_CASE("one-parameter family displays") {
    for (const char* surface : {"ellipsoid", "ellipsoid-r4"}) {
        const SurfaceSpec& spec = catalog_find(surface);
        const std::vector<double> pt = draw_points(spec, 1, 9)[0];
        const EuclideanFrame f = frame_at(spec, pt);
        const double n = f.dim;

        DYNAMIC_SECTION("exponent zero on " << surface) {
            const ManhartReport rep = manhart_family(f, 0.0);
            REQUIRE(rep.residuals.projection < 1e-9);
            REQUIRE(rep.residuals.tchebychev < 1e-9);
            REQUIRE(rep.residuals.laplacian < 1e-9);
            REQUIRE(rep.residuals.normalization < 1e-9);
            REQUIRE(norm(rep.rel.Q_vec) < 1e-12);
            REQUIRE(normalized_residual(rep.rel.y, f.normal_value()) < 1e-12);
            REQUIRE(normalized_residual(rep.rel.T_closed, rep.rel.T_euk) < 1e-9);
        }
        DYNAMIC_SECTION("equiaffine exponent on " << surface) {
            const ManhartReport rep = manhart_family(f, 1.0 / (n + 2.0));
            REQUIRE(rep.residuals.projection < 1e-9);
            REQUIRE(rep.residuals.tchebychev < 1e-9);
            REQUIRE(rep.residuals.laplacian < 1e-9);
            REQUIRE(rep.residuals.normalization < 1e-9);
            // Tchebychev field vanishes; projection field is T_EUK / (n+2)
            REQUIRE(norm(rep.rel.T_closed) < 1e-9 * (1.0 + norm(rep.rel.T_euk)));
            REQUIRE(normalized_residual(rep.rel.Q_vec, (1.0 / (n + 2.0)) * rep.rel.T_euk) < 1e-9);
        }
        DYNAMIC_SECTION("scale invariance on " << surface) {
            const ManhartReport a = manhart_family(f, 0.3, 1.0);
            const ManhartReport b = manhart_family(f, 0.3, 2.5);
            for (const ManhartResiduals& r : {a.residuals, b.residuals}) {
                REQUIRE(r.projection < 1e-9);
                REQUIRE(r.tchebychev < 1e-9);
                REQUIRE(r.laplacian < 1e-9);
                REQUIRE(r.normalization < 1e-9);
            }
            // the scale multiplies q but leaves the family residuals intact
            REQUIRE(std::abs(b.q_value - 2.5 * a.q_value) < 1e-12 * (1.0 + std::abs(b.q_value)));
        }
    }
}

TEST_CASE("equiaffine support value") {
    for (const char* surface : {"ellipsoid", "hyperbolic-paraboloid", "ellipsoid-r4"}) {
        const SurfaceSpec& spec = catalog_find(surface);
        const std::vector<double> pt = draw_points(spec, 1, 12)[0];
        const EuclideanFrame f = frame_at(spec, pt);
        const Jet q_aff = equiaffine_support(f);
        REQUIRE(std::abs(q_aff.value() - std::pow(std::abs(f.curvature), 1.0 / (f.dim + 2.0))) <
                1e-14);
    }
}

TEST_CASE("closed-form mean curvature: trace vs printed vs divergence form") {
    // The printed closed form misstates H for non-constant q; the divergence
    // form matches the trace of the shape operator to machine precision.
    const SurfaceSpec& e2 = catalog_find("ellipsoid");
    for (const std::vector<double>& pt :
         {std::vector<double>{0.2, -0.15}, {0.35, 0.3}, {-0.5, 0.42}}) {
        const EuclideanFrame f = frame_at(e2, pt);
        const RelativeFrame rel = build(f, "generic");
        REQUIRE(std::abs(rel.H_trace - rel.H_formula) > 1e-4);
        REQUIRE(std::abs(rel.H_trace - rel.H_divergence_form) < 1e-9);
    }
    const SurfaceSpec& e3 = catalog_find("ellipsoid-r4");
    const EuclideanFrame f3 = frame_at(e3, std::vector<double>{0.25, -0.2, 0.3});
    const RelativeFrame rel3 = build(f3, "generic");
    REQUIRE(std::abs(rel3.H_trace - rel3.H_formula) > 1e-4);
    REQUIRE(std::abs(rel3.H_trace - rel3.H_formula_alt) > 1e-4);
    REQUIRE(std::abs(rel3.H_trace - rel3.H_divergence_form) < 1e-9);

    // for constant q every candidate collapses to q H_I
    const RelativeFrame unit = relative_at(f3, constant_support(3, 1.0));
    REQUIRE(std::abs(unit.H_trace - unit.H_formula) < 1e-10);
    REQUIRE(std::abs(unit.H_trace - unit.H_divergence_form) < 1e-10);
}

TEST_CASE("support-function guards") {
    const SurfaceSpec& sphere = catalog_find("sphere");
    const std::vector<double> pt{0.0, 0.1};
    const EuclideanFrame f = frame_at(sphere, pt);

    // q vanishing at the point
    const std::vector<Jet> seeds = seed_point(pt, 2);
    REQUIRE_THROWS_AS(relative_at(f, seeds[0]), ZeroSupport);
    try {
        relative_at(f, seeds[0]);
    } catch (const SkipPoint& s) {
        REQUIRE(s.reason == "zero_support");
    }

    // wrong arity / insufficient order
    REQUIRE_THROWS_AS(relative_at(f, constant_support(3, 1.0)), Error);
    REQUIRE_THROWS_AS(relative_at(f, Jet(JetLayout::get(2, 1), 1.0)), Error);
}
