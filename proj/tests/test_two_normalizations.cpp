// Comparisons between two normalizations of the same surface: inner-product
// identity, orthogonality functional, power and combination families,
// difference displays, and the dimension-two invariance.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "relnorm/relnorm.hpp"

using namespace relnorm;

namespace {

struct Built {
    EuclideanFrame frame;
    Jet q_generic;
};

Built build_at(const char* surface, const std::vector<double>& pt) {
    const SurfaceSpec& spec = catalog_find(surface);
    EuclideanFrame f = frame_at(spec, pt);
    const std::vector<Jet> seeds = seed_point(pt, 2);
    Jet q = eval_jet(spec.find_support("generic")->expr, seeds, &f.curvature_jet);
    return Built{std::move(f), std::move(q)};
}

}  // namespace

TEST_CASE("two unit supports") {
    const SurfaceSpec& sphere = catalog_find("sphere");
    const EuclideanFrame f = frame_at(sphere, std::vector<double>{0.2, -0.1});
    const Jet one(JetLayout::get(2, 2), 1.0);
    const PairReport pr = two_normalizations(f, one, one);

    REQUIRE(pr.inner_product_residual < 1e-12);
    REQUIRE(std::abs(dot(pr.rel1.y, pr.rel2.y) - 1.0) < 1e-12);
    // constant supports have vanishing gradients: the functional sits at +1
    REQUIRE(std::abs(pr.orthogonality_functional - 1.0) < 1e-14);
    REQUIRE_FALSE(pr.power_y_residual.has_value());
    REQUIRE_FALSE(pr.combo_t_residual.has_value());
    REQUIRE(pr.diff_lap_x_residual < 1e-12);
    REQUIRE(pr.diff_t_residual < 1e-12);
}

TEST_CASE("inner-product identity and difference displays at generic pairs") {
    for (const char* surface : {"ellipsoid", "ellipsoid-r4"}) {
        const SurfaceSpec& spec = catalog_find(surface);
        for (const std::vector<double>& pt : draw_points(spec, 10, 8)) {
            const EuclideanFrame f = frame_at(spec, pt);
            const std::vector<Jet> seeds = seed_point(pt, 2);
            const Jet q1 = eval_jet(spec.find_support("generic")->expr, seeds, &f.curvature_jet);
            const Jet q2 = eval_jet(spec.find_support("m03s")->expr, seeds, &f.curvature_jet);
            const PairReport pr = two_normalizations(f, q1, q2);

            REQUIRE(pr.inner_product_residual < 1e-9);
            REQUIRE(pr.diff_lap_x_residual < 1e-9);
            REQUIRE(pr.diff_t_residual < 1e-9);
            REQUIRE(pr.diff_t_q_residual < 1e-9);
            REQUIRE(pr.diff_lap_xi_residual < 1e-9);
            REQUIRE(pr.independence_1 < 1e-8);
            REQUIRE(pr.independence_2 < 1e-8);
            if (f.dim == 2) {
                REQUIRE(pr.invariance_lap_x_residual.has_value());
                REQUIRE(*pr.invariance_lap_x_residual < 1e-9);
                REQUIRE(*pr.invariance_lap_xi_residual < 1e-9);
            } else {
                REQUIRE_FALSE(pr.invariance_lap_x_residual.has_value());
                REQUIRE_FALSE(pr.invariance_lap_xi_residual.has_value());
            }
        }
    }
}

TEST_CASE("the misprinted Tchebychev difference coefficient is quantified") {
    const Built b = build_at("ellipsoid", {0.2, -0.15});
    PairOptions opt;
    opt.combo_alpha = 0.8;
    opt.combo_mu = 0.7;
    const Jet q2 = b.q_generic * 0.8 + equiaffine_support(b.frame) * 0.7;
    const PairReport pr = two_normalizations(b.frame, b.q_generic, q2, opt);

    // the self-consistent 1/(2n) coefficient closes; 1/2 visibly does not
    REQUIRE(pr.diff_t_residual < 1e-12);
    REQUIRE(pr.diff_t_printed_residual > 1e-3);
}

TEST_CASE("power-family displays") {
    const Built b = build_at("ellipsoid", {0.35, 0.3});

    PairOptions opt;
    opt.power_alpha = 2.0;
    const Jet q2 = b.q_generic * b.q_generic;
    const PairReport pr = two_normalizations(b.frame, b.q_generic, q2, opt);
    REQUIRE(pr.power_y_residual.has_value());
    REQUIRE(*pr.power_y_residual < 1e-9);
    REQUIRE(*pr.power_t_residual < 1e-9);

    // scaled fractional power
    PairOptions opt2;
    opt2.power_alpha = 0.5;
    opt2.power_scale = 1.7;
    const Jet q3 = sqrt(b.q_generic) * 1.7;
    const PairReport pr2 = two_normalizations(b.frame, b.q_generic, q3, opt2);
    REQUIRE(*pr2.power_y_residual < 1e-9);
    REQUIRE(*pr2.power_t_residual < 1e-9);

    // a negative base cannot carry a declared power relation
    PairOptions opt3;
    opt3.power_alpha = 2.0;
    const Jet neg = -b.q_generic;
    REQUIRE_THROWS_AS(two_normalizations(b.frame, neg, neg * neg, opt3), DomainErrorJet);
}

TEST_CASE("combination-family displays") {
    const Built b = build_at("ellipsoid", {-0.5, 0.42});
    const Jet q_aff = equiaffine_support(b.frame);

    SECTION("pure equiaffine target: alpha = 0, mu = 1") {
        PairOptions opt;
        opt.combo_alpha = 0.0;
        opt.combo_mu = 1.0;
        const PairReport pr = two_normalizations(b.frame, b.q_generic, q_aff, opt);
        REQUIRE(*pr.combo_t_residual < 1e-9);   // T2 = 0 * T1 (equiaffine field vanishes)
        REQUIRE(*pr.combo_lap_residual < 1e-9); // lap x = n y_AFF
        REQUIRE(*pr.combo_h_residual < 1e-9);
        REQUIRE(*pr.combo_eps == 1.0);
    }
    SECTION("shift by the equiaffine support: alpha = 1, mu = 0.7") {
        PairOptions opt;
        opt.combo_alpha = 1.0;
        opt.combo_mu = 0.7;
        const Jet q2 = b.q_generic + q_aff * 0.7;
        const PairReport pr = two_normalizations(b.frame, b.q_generic, q2, opt);
        REQUIRE(*pr.combo_t_residual < 1e-9);   // Tchebychev field is shift-invariant
        REQUIRE(*pr.combo_lap_residual < 1e-9);
        REQUIRE(*pr.combo_h_residual < 1e-9);
    }
    SECTION("generic combination: alpha = 0.8, mu = 0.7") {
        PairOptions opt;
        opt.combo_alpha = 0.8;
        opt.combo_mu = 0.7;
        const Jet q2 = b.q_generic * 0.8 + q_aff * 0.7;
        const PairReport pr = two_normalizations(b.frame, b.q_generic, q2, opt);
        REQUIRE(*pr.combo_t_residual < 1e-9);
        REQUIRE(*pr.combo_lap_residual < 1e-9);
        REQUIRE(*pr.combo_h_residual < 1e-9);
        REQUIRE(*pr.combo_eps == 1.0);
        // negative mu flips the sign indicator once it dominates
        PairOptions optn;
        optn.combo_alpha = 0.8;
        optn.combo_mu = -0.1;
        const Jet q2n = b.q_generic * 0.8 - q_aff * 0.1;
        const PairReport prn = two_normalizations(b.frame, b.q_generic, q2n, optn);
        REQUIRE(*prn.combo_eps == -1.0);
    }
    SECTION("a combination that cancels at the point is not a normalization") {
        PairOptions opt;
        opt.combo_alpha = 1.0;
        opt.combo_mu = -b.q_generic.value() / q_aff.value();
        const Jet q2(JetLayout::get(2, 2), 1.0);  // any valid support; guard fires first
        REQUIRE_THROWS_AS(two_normalizations(b.frame, b.q_generic, q2, opt),
                          NotANormalization);
    }
}

TEST_CASE("dimension-two invariance of the scaled Laplacians") {
    const SurfaceSpec& spec = catalog_find("hyperbolic-paraboloid");
    for (const std::vector<double>& pt : draw_points(spec, 5, 13)) {
        const EuclideanFrame f = frame_at(spec, pt);
        const std::vector<Jet> seeds = seed_point(pt, 2);
        const Jet q1 = eval_jet(spec.find_support("generic")->expr, seeds, &f.curvature_jet);
        const Jet q2 = eval_jet(spec.find_support("m03")->expr, seeds, &f.curvature_jet);
        const PairReport pr = two_normalizations(f, q1, q2);
        REQUIRE(*pr.invariance_lap_x_residual < 1e-9);
        REQUIRE(*pr.invariance_lap_xi_residual < 1e-9);
    }
}
