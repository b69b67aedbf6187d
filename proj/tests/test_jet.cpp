// Jet arithmetic: storage conventions, algebra laws, elementary-function
// round trips, truncation consistency, and finite-difference agreement for
// every catalog expression.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "relnorm/relnorm.hpp"

using namespace relnorm;

namespace {

// A transcendental jet with generically nonzero coefficients.
Jet sample_a(const MapJet& s) { return sin(s[0]) + cos(s[1]) * s[0] + 2.0; }
Jet sample_b(const MapJet& s) { return exp(0.3 * s[0] - 0.2 * s[1]) + s[1] * s[1]; }
Jet sample_c(const MapJet& s) { return 1.5 + s[0] * s[1] - 0.1 * s[0]; }

double max_coeff_delta(const Jet& x, const Jet& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.coefficients().size(); ++i)
        worst = std::max(worst, std::abs(x.coefficients()[i] - y.coefficients()[i]));
    return worst;
}

}  // namespace

TEST_CASE("coefficients are raw partial derivatives in graded-lex order") {
    const std::vector<double> pt{1.5, -0.5};
    const MapJet s = seed_point(pt, 3);
    const Jet f = s[0] * s[0] * s[1] + 3.0 * s[1] + 5.0;  // u^2 v + 3v + 5

    const double u = pt[0], v = pt[1];
    REQUIRE(std::abs(f.value() - (u * u * v + 3.0 * v + 5.0)) < 1e-14);
    REQUIRE(std::abs(f.first(0) - 2.0 * u * v) < 1e-14);
    REQUIRE(std::abs(f.first(1) - (u * u + 3.0)) < 1e-14);
    REQUIRE(std::abs(f.second(0, 0) - 2.0 * v) < 1e-14);   // raw d^2/du^2, no 1/2!
    REQUIRE(std::abs(f.second(0, 1) - 2.0 * u) < 1e-14);
    REQUIRE(std::abs(f.second(1, 1)) < 1e-14);
    REQUIRE(std::abs(f.extract(MultiIndex{2, 1}) - 2.0) < 1e-14);  // d^3/du^2dv
    REQUIRE(std::abs(f.extract(MultiIndex{3, 0})) < 1e-14);
}

TEST_CASE("seeding matches the identity map") {
    const std::vector<double> pt{0.7, -0.3, 0.2};
    const MapJet s = seed_point(pt, 2);
    REQUIRE(s.size() == 3);
    for (int i = 0; i < 3; ++i) {
        REQUIRE(s[static_cast<std::size_t>(i)].value() == pt[static_cast<std::size_t>(i)]);
        for (int j = 0; j < 3; ++j)
            REQUIRE(s[static_cast<std::size_t>(i)].first(j) == (i == j ? 1.0 : 0.0));
        REQUIRE(s[static_cast<std::size_t>(i)].second(0, 0) == 0.0);
    }
}

TEST_CASE("product algebra laws") {
    const MapJet s = seed_point(std::vector<double>{0.4, -0.8}, 4);
    const Jet a = sample_a(s), b = sample_b(s), c = sample_c(s);

    REQUIRE(max_coeff_delta(a * b, b * a) < 1e-13);
    REQUIRE(max_coeff_delta((a * b) * c, a * (b * c)) < 1e-12);
    REQUIRE(max_coeff_delta(a * (b + c), a * b + a * c) < 1e-12);
}

TEST_CASE("elementary function round trips") {
    const MapJet s = seed_point(std::vector<double>{0.4, -0.8}, 4);
    const Jet a = sample_a(s);  // value > 0

    SECTION("exp after ln and ln after exp") {
        const Jet r1 = exp(ln(a)), r2 = ln(exp(a));
        for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
            const double scale = 1.0 + std::abs(a.coefficients()[i]);
            REQUIRE(std::abs(r1.coefficients()[i] - a.coefficients()[i]) < 1e-11 * scale);
            REQUIRE(std::abs(r2.coefficients()[i] - a.coefficients()[i]) < 1e-11 * scale);
        }
    }
    SECTION("sin^2 + cos^2 = 1") {
        const Jet one = sin(a) * sin(a) + cos(a) * cos(a);
        REQUIRE(std::abs(one.value() - 1.0) < 1e-13);
        for (std::size_t i = 1; i < one.coefficients().size(); ++i)
            REQUIRE(std::abs(one.coefficients()[i]) < 1e-12);
    }
    SECTION("sqrt squares back") {
        REQUIRE(max_coeff_delta(sqrt(a) * sqrt(a), a) < 1e-12);
        REQUIRE_THROWS_AS(sqrt(a - 10.0), DomainErrorJet);
    }
    SECTION("reciprocal and division") {
        const Jet b = sample_b(s);
        REQUIRE(max_coeff_delta((a / b) * b, a) < 1e-12);
        const Jet z = a - a.value();  // zero-valued, nonzero derivatives
        REQUIRE_THROWS_AS(a / z, DivisionByZeroJet);
        REQUIRE_THROWS_AS(recip(z), DivisionByZeroJet);
    }
}

TEST_CASE("absolute value dispatches on the sign at the point") {
    const MapJet s = seed_point(std::vector<double>{0.4, -0.8}, 3);
    const Jet a = sample_a(s);
    REQUIRE(max_coeff_delta(abs(a), a) == 0.0);
    REQUIRE(max_coeff_delta(abs(-a), a) == 0.0);
    REQUIRE_THROWS_AS(abs(a - a.value()), DomainErrorJet);
}

TEST_CASE("powers: integer by squaring, real via series, guard on negatives") {
    const MapJet s = seed_point(std::vector<double>{0.4, -0.8}, 4);
    const Jet a = sample_a(s);

    REQUIRE(max_coeff_delta(pow(a, 3.0), a * a * a) < 1e-12);
    REQUIRE(max_coeff_delta(pow(a, -2.0), recip(a * a)) < 1e-12);
    REQUIRE(max_coeff_delta(pow(a, 0.0), Jet(a.layout(), 1.0)) == 0.0);
    // negative base: integer exponents fine, fractional ones rejected
    REQUIRE(max_coeff_delta(pow(-a, 2.0), a * a) < 1e-13);
    REQUIRE_THROWS_AS(pow(-a, 0.5), DomainErrorJet);
    // |K|^alpha pattern used by support functions
    REQUIRE(max_coeff_delta(pow(abs(-a), 0.3), pow(a, 0.3)) == 0.0);
}

TEST_CASE("derivative shifts coefficients down one order") {
    const std::vector<double> pt{1.5, -0.5};
    const MapJet s = seed_point(pt, 3);
    const Jet f = s[0] * s[0] * s[1] + 3.0 * s[1] + 5.0;
    const Jet fu = f.derivative(0);  // 2uv
    REQUIRE(fu.order() == 2);
    REQUIRE(std::abs(fu.value() - 2.0 * pt[0] * pt[1]) < 1e-14);
    REQUIRE(std::abs(fu.first(0) - 2.0 * pt[1]) < 1e-14);
    REQUIRE(std::abs(fu.first(1) - 2.0 * pt[0]) < 1e-14);
    REQUIRE(std::abs(fu.second(0, 1) - 2.0) < 1e-14);
}

TEST_CASE("truncation commutes with arithmetic bit for bit") {
    const MapJet s4 = seed_point(std::vector<double>{0.4, -0.8}, 4);
    const MapJet s2 = seed_point(std::vector<double>{0.4, -0.8}, 2);
    const Jet a4 = sample_a(s4), b4 = sample_b(s4);
    const Jet a2 = sample_a(s2), b2 = sample_b(s2);

    REQUIRE((a4 * b4).truncated(2).coefficients() == (a2 * b2).coefficients());
    REQUIRE(exp(a4).truncated(2).coefficients() == exp(a2).coefficients());
    REQUIRE(ln(a4).truncated(2).coefficients() == ln(a2).coefficients());
    REQUIRE(recip(a4).truncated(2).coefficients() == recip(a2).coefficients());
    REQUIRE(pow(a4, 0.3).truncated(2).coefficients() == pow(a2, 0.3).coefficients());
}

TEST_CASE("truncated() never extends the order") {
    const MapJet s = seed_point(std::vector<double>{0.1, 0.2}, 2);
    REQUIRE_THROWS_AS(s[0].truncated(3), Error);
}

TEST_CASE("mismatched layouts are rejected") {
    const MapJet s2 = seed_point(std::vector<double>{0.1, 0.2}, 2);
    const MapJet s3 = seed_point(std::vector<double>{0.1, 0.2}, 3);
    REQUIRE_THROWS_AS(s2[0] * s3[0], Error);
}

namespace {

// Clamp a drawn point so the 5-point finite-difference stencils stay inside
// the domain box.
std::vector<double> clamp_interior(const SurfaceSpec& spec, std::vector<double> p, double margin) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Interval& iv = spec.domain[i];
        p[i] = std::min(std::max(p[i], iv.lo + margin), iv.hi - margin);
    }
    return p;
}

}  // namespace

TEST_CASE("immersion jets agree with central finite differences") {
    const double h = 1e-5;
    for (const SurfaceSpec& spec : catalog()) {
        const int n = spec.dim;
        for (std::vector<double> pt : draw_points(spec, 20, 7)) {
            pt = clamp_interior(spec, pt, 1e-3);
            const MapJet jets = immersion_jets(spec, pt, 2);
            for (int i = 0; i < n; ++i) {
                std::vector<double> pp = pt, pm = pt;
                pp[static_cast<std::size_t>(i)] += h;
                pm[static_cast<std::size_t>(i)] -= h;
                const Vec xp = immersion_values(spec, pp), xm = immersion_values(spec, pm);
                const Vec x0 = immersion_values(spec, pt);
                for (int a = 0; a <= n; ++a) {
                    const std::size_t ai = static_cast<std::size_t>(a);
                    const double fd1 = (xp[ai] - xm[ai]) / (2.0 * h);
                    const double jv1 = jets[ai].first(i);
                    REQUIRE(std::abs(fd1 - jv1) < 1e-5 * (1.0 + std::abs(jv1)));
                    const double fd2 = (xp[ai] - 2.0 * x0[ai] + xm[ai]) / (h * h);
                    const double jv2 = jets[ai].second(i, i);
                    REQUIRE(std::abs(fd2 - jv2) < 1e-5 * (1.0 + std::abs(jv2)));
                }
                for (int j = i + 1; j < n; ++j) {
                    std::vector<double> ppp = pt, ppm = pt, pmp = pt, pmm = pt;
                    ppp[static_cast<std::size_t>(i)] += h;
                    ppp[static_cast<std::size_t>(j)] += h;
                    ppm[static_cast<std::size_t>(i)] += h;
                    ppm[static_cast<std::size_t>(j)] -= h;
                    pmp[static_cast<std::size_t>(i)] -= h;
                    pmp[static_cast<std::size_t>(j)] += h;
                    pmm[static_cast<std::size_t>(i)] -= h;
                    pmm[static_cast<std::size_t>(j)] -= h;
                    const Vec a1 = immersion_values(spec, ppp), a2 = immersion_values(spec, ppm);
                    const Vec a3 = immersion_values(spec, pmp), a4 = immersion_values(spec, pmm);
                    for (int a = 0; a <= n; ++a) {
                        const std::size_t ai = static_cast<std::size_t>(a);
                        const double fd = (a1[ai] - a2[ai] - a3[ai] + a4[ai]) / (4.0 * h * h);
                        const double jv = jets[ai].second(i, j);
                        REQUIRE(std::abs(fd - jv) < 1e-5 * (1.0 + std::abs(jv)));
                    }
                }
            }
        }
    }
}

TEST_CASE("support expressions with the curvature builtin agree with finite differences") {
    // Substitute an analytic stand-in for K so its value at shifted points is
    // exactly computable, then finite-difference the full support expression.
    const Expr k_poly = parse_expression("1.3 + 0.4*u1 - 0.2*u2");
    const double h = 1e-5;

    for (const SurfaceSpec& spec : catalog())
    for (const SupportFunction& sf : spec.supports) {
        for (std::vector<double> pt : draw_points(spec, 10, 11)) {
            pt = clamp_interior(spec, pt, 1e-3);
            const MapJet seeds = seed_point(pt, 2);
            const Jet k_jet = eval_jet(k_poly, seeds);
            const Jet q = eval_jet(sf.expr, seeds, &k_jet);

            auto value_at = [&](const std::vector<double>& p) {
                const double kv = eval_value(k_poly, p);
                return eval_value(sf.expr, p, &kv);
            };
            for (int i = 0; i < spec.dim; ++i) {
                std::vector<double> pp = pt, pm = pt;
                pp[static_cast<std::size_t>(i)] += h;
                pm[static_cast<std::size_t>(i)] -= h;
                const double fd1 = (value_at(pp) - value_at(pm)) / (2.0 * h);
                REQUIRE(std::abs(fd1 - q.first(i)) < 1e-5 * (1.0 + std::abs(q.first(i))));
                const double fd2 = (value_at(pp) - 2.0 * value_at(pt) + value_at(pm)) / (h * h);
                REQUIRE(std::abs(fd2 - q.second(i, i)) < 2e-5 * (1.0 + std::abs(q.second(i, i))));
            }
        }
    }
}
