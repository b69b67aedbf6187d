#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relnorm/errors.hpp"
#include "relnorm/euclid.hpp"
#include "relnorm/expr.hpp"
#include "relnorm/relative.hpp"
#include "relnorm/surface.hpp"

namespace relnorm {

// Sampling harness: draws points from the parameter domain, evaluates the
// full frame apparatus at each, measures normalized residuals for a registry
// of identity checks, and aggregates everything into a report whose bytes do
// not depend on the number of worker threads.

struct SampleConfig {
    int samples = 200;
    std::uint64_t seed = 1;
    double tol = 1e-7;
    double fd_step = 1e-5;  // echoed in reports; consumed by the oracle path
    Thresholds thresholds{};

    // nullopt selects every applicable check; an empty list selects none
    // (the report then carries diagnostics only).
    std::optional<std::vector<std::string>> checks;

    int workers = 1;

    // Exponent/scale for the synthetic "manhart" support label.
    std::optional<double> manhart_alpha;
    double manhart_scale = 1.0;

    // Second normalization: enables the two-normalization check group.
    std::optional<std::string> q2_label;
    PairOptions pair{};
};

// Everything needed to evaluate one sample point.
struct RunSetup {
    SupportFunction support;
    std::optional<SupportFunction> support2;
    PairOptions pair{};
    Thresholds thresholds{};
};

struct PointEvaluation {
    std::vector<double> point;
    EuclideanFrame frame;
    RelativeFrame rel;
    PairingReport pairing;
    std::optional<ManhartResiduals> manhart;  // present when q = scale*|K|^alpha
    std::optional<PairReport> pair;           // present when a second q is declared
};

// Static facts about a run that decide which checks apply.
struct RunContext {
    int n = 2;
    std::optional<double> family_exponent;
    bool has_pair = false;
    bool pair_power = false;
    bool pair_combo = false;
};

struct CheckDef {
    const char* name;
    const char* eq;
    bool (*applicable)(const RunContext&);
    double (*eval)(const PointEvaluation&);
};

struct DiagDef {
    const char* name;
    bool (*applicable)(const RunContext&);
    double (*eval)(const PointEvaluation&);
};

// Looks a support label up in the spec; the reserved label "manhart"
// synthesizes scale*abs(K)^alpha from the configured exponent instead.
inline SupportFunction resolve_support(const SurfaceSpec& spec, const std::string& label,
                                       const SampleConfig& config) {
    if (const SupportFunction* sf = spec.find_support(label)) return *sf;
    if (label == "manhart") {
        if (!config.manhart_alpha)
            throw ValidationError("support label 'manhart' requires an explicit exponent");
        const double alpha = *config.manhart_alpha;
        const double scale = config.manhart_scale;
        Expr e = Expr::power(Expr::unary(UnaryFn::Abs, Expr::curvature()), alpha);
        if (scale != 1.0) e = Expr::binary(BinaryOp::Mul, Expr::constant(scale), std::move(e));
        SupportFunction sf;
        sf.label = "manhart";
        sf.expr = std::move(e);
        sf.family_exponent = alpha;
        sf.family_scale = scale;
        return sf;
    }
    throw ValidationError("unknown support-function label '" + label + "'");
}

// Uniform draws over the domain box.  The generator output is mapped to
// [0, 1) through an explicit bit pattern so the sequence is identical on
// every platform, and points are drawn up front in sample order so the
// worker count cannot influence them.
inline std::vector<std::vector<double>> draw_points(const SurfaceSpec& spec, int count,
                                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int k = 0; k < count; ++k) {
        std::vector<double> p(static_cast<std::size_t>(spec.dim));
        for (int i = 0; i < spec.dim; ++i) {
            const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            p[static_cast<std::size_t>(i)] = spec.domain[static_cast<std::size_t>(i)].lo +
                                             spec.domain[static_cast<std::size_t>(i)].width() * unit;
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

inline PointEvaluation evaluate_point(const SurfaceSpec& spec, const RunSetup& setup,
                                      std::span<const double> point) {
    EuclideanFrame frame = frame_at(spec, point, setup.thresholds);
    const MapJet seeds = seed_point(point, 2);
    const Jet q_jet = eval_jet(setup.support.expr, seeds, &frame.curvature_jet);
    RelativeFrame rel = relative_at(frame, q_jet);
    PairingReport pairing = oneform_pairings(frame, rel);

    std::optional<ManhartResiduals> manhart;
    if (setup.support.family_exponent)
        manhart = manhart_residuals(frame, rel, *setup.support.family_exponent);

    std::optional<PairReport> pair;
    if (setup.support2) {
        const Jet q2_jet = eval_jet(setup.support2->expr, seeds, &frame.curvature_jet);
        pair = two_normalizations(frame, q_jet, q2_jet, setup.pair);
    }

    return PointEvaluation{std::vector<double>(point.begin(), point.end()),
                           std::move(frame),
                           std::move(rel),
                           std::move(pairing),
                           std::move(manhart),
                           std::move(pair)};
}

namespace applic {

inline bool always(const RunContext&) { return true; }
inline bool family(const RunContext& c) { return c.family_exponent.has_value(); }
inline bool equiaffine_exponent(const RunContext& c) {
    return c.family_exponent && std::abs(*c.family_exponent - 1.0 / (c.n + 2)) < 1e-12;
}
inline bool inverse_curvature_exponent(const RunContext& c) {
    return c.n >= 3 && c.family_exponent && std::abs(*c.family_exponent - 1.0 / (2 - c.n)) < 1e-12;
}
inline bool direct_curvature_exponent(const RunContext& c) {
    return c.n >= 3 && c.family_exponent && std::abs(*c.family_exponent - 1.0 / (c.n - 2)) < 1e-12;
}
inline bool pair(const RunContext& c) { return c.has_pair; }
inline bool pair_power(const RunContext& c) { return c.pair_power; }
inline bool pair_combo(const RunContext& c) { return c.pair_combo; }
inline bool pair_surface(const RunContext& c) { return c.has_pair && c.n == 2; }

}  // namespace applic

namespace checks {

inline double unit_normal_frame(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const Vec xi = f.normal_value();
    double worst = std::abs(norm(xi) - 1.0);
    for (int i = 0; i < f.dim; ++i) worst = std::max(worst, std::abs(dot(xi, f.tangent_value(i))));
    return worst;
}

inline double second_form_pairing(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const Vec xi = f.normal_value();
    Mat m(f.dim, 0.0);
    for (int i = 0; i < f.dim; ++i)
        for (int j = 0; j < f.dim; ++j) m(i, j) = dot(xi, f.second_partial_value(i, j));
    return normalized_residual(m, f.h);
}

inline double weingarten_equations(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    double worst = 0.0;
    for (int i = 0; i < f.dim; ++i) {
        Vec rhs(f.x.size());
        for (int k = 0; k < f.dim; ++k) {
            double coef = 0.0;
            for (int j = 0; j < f.dim; ++j) coef += f.h(i, j) * f.g_inv(j, k);
            rhs -= coef * f.tangent_value(k);
        }
        worst = std::max(worst, normalized_residual(f.normal_partial_value(i), rhs));
    }
    return worst;
}

inline double third_form_composition(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    return normalized_residual(f.e, mat_mul(mat_mul(f.h, f.g_inv), f.h));
}

inline double mainardi_codazzi(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const int n = f.dim;
    Tensor3 cov(n);
    double scale = 0.0;
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double c = f.h_jets(i, j).first(m);
                for (int k = 0; k < n; ++k)
                    c -= f.chr_first.second(m, i, k) * f.h(k, j) +
                         f.chr_first.second(m, j, k) * f.h(i, k);
                cov(m, i, j) = c;
                scale = std::max(scale, std::abs(c));
            }
    double worst = 0.0;
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = std::max(worst, std::abs(cov(m, i, j) - cov(j, i, m)));
    return worst / (1.0 + scale);
}

inline double difference_tensor_trace(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const int n = f.dim;
    Vec lhs(static_cast<std::size_t>(n)), rhs(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        double t = 0.0;
        for (int i = 0; i < n; ++i) t += f.connection_diff(i, m, i);
        lhs[static_cast<std::size_t>(m)] = t;
        rhs[static_cast<std::size_t>(m)] = -f.curvature_jet.first(m) / (2.0 * f.curvature);
    }
    return normalized_residual(lhs, rhs);
}

inline double difference_tensor_contraction(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const int n = f.dim;
    Vec lhs(static_cast<std::size_t>(n)), rhs(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        double l = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) l += f.h_inv(i, j) * f.connection_diff(i, j, k);
        lhs[static_cast<std::size_t>(k)] = -2.0 * l;
        double r = 0.0;
        for (int m = 0; m < n; ++m) r += f.h_inv(k, m) * f.curvature_jet.first(m);
        rhs[static_cast<std::size_t>(k)] = r / f.curvature;
    }
    return normalized_residual(lhs, rhs);
}

inline double relative_christoffel_relation(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const RelativeFrame& r = ev.rel;
    const int n = f.dim;
    std::vector<double> dq(static_cast<std::size_t>(n)), hq(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dq[static_cast<std::size_t>(i)] = r.q_jet.first(i);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += f.h_inv(k, m) * dq[static_cast<std::size_t>(m)];
        hq[static_cast<std::size_t>(k)] = s;
    }
    Vec lhs(static_cast<std::size_t>(n * n * n)), rhs(static_cast<std::size_t>(n * n * n));
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                lhs[idx] = r.chr_G.second(i, j, k);
                const double corr = (k == i ? dq[static_cast<std::size_t>(j)] : 0.0) +
                                    (k == j ? dq[static_cast<std::size_t>(i)] : 0.0) -
                                    f.h(i, j) * hq[static_cast<std::size_t>(k)];
                rhs[idx] = f.chr_second.second(i, j, k) - corr / (2.0 * r.q);
                ++idx;
            }
    return normalized_residual(lhs, rhs);
}

inline double darboux_symmetry(const PointEvaluation& ev) { return ev.rel.A_symmetry_defect; }

inline double conormal_relations(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const RelativeFrame& r = ev.rel;
    double worst = std::abs(dot(r.conormal_value, r.y) - 1.0);
    for (int i = 0; i < f.dim; ++i)
        worst = std::max(worst, std::abs(dot(r.conormal_value, f.tangent_value(i))));
    return worst;
}

inline double relative_metric_pairing(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const RelativeFrame& r = ev.rel;
    Mat m(f.dim, 0.0);
    for (int i = 0; i < f.dim; ++i)
        for (int j = 0; j < f.dim; ++j)
            m(i, j) = dot(r.conormal_value, f.second_partial_value(i, j));
    return normalized_residual(m, r.G);
}

inline double normalization_tangential_derivatives(const PointEvaluation& ev) {
    return ev.rel.max_nontangential;
}

inline double tangent_field_tangency(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const RelativeFrame& r = ev.rel;
    const Vec xi = f.normal_value();
    double worst = 0.0;
    for (const Vec* v :
         {&r.T_darboux, &r.T_closed, &r.T_decomp, &r.T_euk, &r.Q_vec, &r.y_tangential})
        worst = std::max(worst, std::abs(dot(*v, xi)) / (1.0 + norm(*v)));
    return worst;
}

inline double tchebychev_route_agreement(const PointEvaluation& ev) {
    const RelativeFrame& r = ev.rel;
    return std::max({normalized_residual(r.T_darboux, r.T_closed),
                     normalized_residual(r.T_darboux, r.T_decomp),
                     normalized_residual(r.T_closed, r.T_decomp)});
}

inline double normalization_independence(const PointEvaluation& ev) {
    return normalization_invariance(ev.frame, ev.rel);
}

inline double laplacian_position_mean(const PointEvaluation& ev) {
    const RelativeFrame& r = ev.rel;
    return normalized_residual((1.0 / ev.frame.dim) * r.lap_G_x, r.T_darboux + r.y);
}

inline double form_II_laplacian_position(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const Vec lhs = laplacian_field(f.h_inv, f.chr_second.second, f.x);
    Vec rhs = (-0.5 / f.curvature) * gradient_field(f.h_inv, f.curvature_jet, f.x);
    rhs += static_cast<double>(f.dim) * f.normal_value();
    return normalized_residual(lhs, rhs);
}

inline double form_II_laplacian_normal(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const Vec lhs = laplacian_field(f.h_inv, f.chr_second.second, f.normal);
    Vec rhs = (0.5 / f.curvature) * gradient_field(f.h_inv, f.curvature_jet, f.normal);
    rhs -= (f.dim * f.mean_curvature) * f.normal_value();
    return normalized_residual(lhs, rhs);
}

// Scalar functions the conformal-change and gradient-exchange identities are
// tested against: every ambient component of the position and of the unit
// normal, plus the support function itself.
inline std::vector<const Jet*> scalar_family(const PointEvaluation& ev) {
    std::vector<const Jet*> fam;
    for (const Jet& j : ev.frame.x) fam.push_back(&j);
    for (const Jet& j : ev.frame.normal) fam.push_back(&j);
    fam.push_back(&ev.rel.q_jet);
    return fam;
}

inline double laplacian_conformal_change(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const RelativeFrame& r = ev.rel;
    const int n = f.dim;
    double worst = 0.0;
    for (const Jet* fj : scalar_family(ev)) {
        const double lhs = laplacian(r.G_inv, r.chr_G.second, *fj);
        const double rhs = r.q * laplacian(f.h_inv, f.chr_second.second, *fj) -
                           0.5 * (n - 2) * beltrami1(f.h_inv, r.q_jet, *fj);
        worst = std::max(worst, normalized_residual(lhs, rhs));
    }
    return worst;
}

inline double gradient_exchange_position(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const RelativeFrame& r = ev.rel;
    double worst = 0.0;
    for (const Jet* fj : scalar_family(ev)) {
        const Vec a = gradient_field(f.h_inv, *fj, f.x);
        const Vec b = gradient_field(f.e_inv, *fj, f.normal);
        const Vec c = gradient_field(r.G_inv, *fj, f.x);
        worst = std::max({worst, normalized_residual(a, -b),
                          normalized_residual(a, (1.0 / r.q) * c)});
    }
    return worst;
}

inline double gradient_exchange_normal(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const RelativeFrame& r = ev.rel;
    double worst = 0.0;
    for (const Jet* fj : scalar_family(ev)) {
        const Vec a = gradient_field(f.h_inv, *fj, f.normal);
        const Vec b = gradient_field(f.g_inv, *fj, f.x);
        const Vec c = gradient_field(r.G_inv, *fj, f.normal);
        worst = std::max({worst, normalized_residual(a, -b),
                          normalized_residual(a, (1.0 / r.q) * c)});
    }
    return worst;
}

inline double laplacian_position_closed_form(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const RelativeFrame& r = ev.rel;
    const int n = f.dim;
    const Vec g3K = gradient_field(f.e_inv, f.curvature_jet, f.normal);
    const Vec g3q = gradient_field(f.e_inv, r.q_jet, f.normal);
    const Vec rhs =
        (0.5 * r.q / f.curvature) * g3K - (0.5 * (n + 2)) * g3q + static_cast<double>(n) * r.y;
    return normalized_residual(r.lap_G_x, rhs);
}

inline double laplacian_normal_closed_form(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const RelativeFrame& r = ev.rel;
    const int n = f.dim;
    const Vec g1K = gradient_field(f.g_inv, f.curvature_jet, f.x);
    const Vec g1q = gradient_field(f.g_inv, r.q_jet, f.x);
    Vec rhs = (-0.5 * r.q / f.curvature) * g1K + (0.5 * (n - 2)) * g1q;
    rhs -= (n * r.q * f.mean_curvature) * f.normal_value();
    return normalized_residual(r.lap_G_xi, rhs);
}

inline double tchebychev_closed_form(const PointEvaluation& ev) {
    return normalized_residual(ev.rel.T_darboux, ev.rel.T_closed);
}

inline double tchebychev_decomposition(const PointEvaluation& ev) {
    return normalized_residual(ev.rel.T_darboux, ev.rel.T_decomp);
}

inline double normalization_projection_form(const PointEvaluation& ev) {
    const RelativeFrame& r = ev.rel;
    const Vec rhs = r.q * (2.0 * ev.frame.dim * r.Q_vec + ev.frame.normal_value());
    return normalized_residual(r.y, rhs);
}

inline double laplacian_position_family_form(const PointEvaluation& ev) {
    const EuclideanFrame& f = ev.frame;
    const RelativeFrame& r = ev.rel;
    const int n = f.dim;
    const Vec rhs = (n * r.q) * (r.T_euk + (n - 2.0) * r.Q_vec + f.normal_value());
    return normalized_residual(r.lap_G_x, rhs);
}

inline double tchebychev_gradient_form(const PointEvaluation& ev) {
    const RelativeFrame& r = ev.rel;
    return normalized_residual(r.T_darboux, gradient_field(r.G_inv, r.ln_phi_jet, ev.frame.x));
}

inline double pairing_position_laplacian(const PointEvaluation& ev) {
    return ev.pairing.lap_x_residual;
}
inline double pairing_normal_laplacian(const PointEvaluation& ev) {
    return ev.pairing.lap_xi_residual;
}
inline double pairing_tchebychev(const PointEvaluation& ev) {
    return ev.pairing.tchebychev_residual;
}
inline double pairing_sum(const PointEvaluation& ev) { return ev.pairing.sum_residual; }
inline double pairing_difference(const PointEvaluation& ev) { return ev.pairing.diff_residual; }

inline double manhart_projection_scaling(const PointEvaluation& ev) {
    return ev.manhart->projection;
}
inline double manhart_tchebychev_scaling(const PointEvaluation& ev) {
    return ev.manhart->tchebychev;
}
inline double manhart_laplacian_scaling(const PointEvaluation& ev) { return ev.manhart->laplacian; }
inline double manhart_normalization_form(const PointEvaluation& ev) {
    return ev.manhart->normalization;
}

inline double equiaffine_tchebychev_zero(const PointEvaluation& ev) {
    const RelativeFrame& r = ev.rel;
    return std::max({norm(r.T_darboux), norm(r.T_closed), norm(r.T_decomp)});
}

inline double curvature_pairing_zero(const PointEvaluation& ev) {
    double worst = 0.0;
    for (std::size_t i = 0; i < ev.pairing.p1.size(); ++i)
        worst = std::max(worst, std::abs(ev.pairing.p1[i]));
    return worst;
}

inline double support_pairing_zero(const PointEvaluation& ev) {
    double worst = 0.0;
    for (std::size_t i = 0; i < ev.pairing.p2.size(); ++i)
        worst = std::max(worst, std::abs(ev.pairing.p2[i]));
    return worst;
}

inline double pair_inner_product(const PointEvaluation& ev) {
    return ev.pair->inner_product_residual;
}
inline double pair_power_normalization(const PointEvaluation& ev) {
    return *ev.pair->power_y_residual;
}
inline double pair_power_tchebychev(const PointEvaluation& ev) {
    return *ev.pair->power_t_residual;
}
inline double pair_combo_tchebychev(const PointEvaluation& ev) {
    return *ev.pair->combo_t_residual;
}
inline double pair_combo_laplacian(const PointEvaluation& ev) {
    return *ev.pair->combo_lap_residual;
}
inline double pair_combo_mean_curvature(const PointEvaluation& ev) {
    return *ev.pair->combo_h_residual;
}
inline double pair_difference_laplacian_x(const PointEvaluation& ev) {
    return ev.pair->diff_lap_x_residual;
}
inline double pair_difference_tchebychev(const PointEvaluation& ev) {
    return ev.pair->diff_t_residual;
}
inline double pair_difference_projection(const PointEvaluation& ev) {
    return ev.pair->diff_t_q_residual;
}
inline double pair_difference_laplacian_xi(const PointEvaluation& ev) {
    return ev.pair->diff_lap_xi_residual;
}
inline double pair_invariance_laplacian_x(const PointEvaluation& ev) {
    return *ev.pair->invariance_lap_x_residual;
}
inline double pair_invariance_laplacian_xi(const PointEvaluation& ev) {
    return *ev.pair->invariance_lap_xi_residual;
}

}  // namespace checks

namespace diags {

inline double mean_curvature_delta(const PointEvaluation& ev) {
    return std::abs(ev.rel.H_trace - ev.rel.H_formula);
}
inline double mean_curvature_delta_alt(const PointEvaluation& ev) {
    return std::abs(ev.rel.H_trace - ev.rel.H_formula_alt);
}
inline double mean_curvature_divergence_delta(const PointEvaluation& ev) {
    return std::abs(ev.rel.H_trace - ev.rel.H_divergence_form);
}
inline double pair_orthogonality_functional(const PointEvaluation& ev) {
    return ev.pair->orthogonality_functional;
}
inline double pair_tchebychev_difference_printed_delta(const PointEvaluation& ev) {
    return ev.pair->diff_t_printed_residual;
}
inline double pair_combo_sign(const PointEvaluation& ev) { return *ev.pair->combo_eps; }

}  // namespace diags

inline const std::vector<CheckDef>& check_registry() {
    static const std::vector<CheckDef> defs = {
        {"unit_normal_frame", "§1", &applic::always, &checks::unit_normal_frame},
        {"second_form_pairing", "§1", &applic::always, &checks::second_form_pairing},
        {"weingarten_equations", "§1", &applic::always, &checks::weingarten_equations},
        {"third_form_composition", "§1", &applic::always, &checks::third_form_composition},
        {"mainardi_codazzi", "§1", &applic::always, &checks::mainardi_codazzi},
        {"difference_tensor_trace", "§2", &applic::always, &checks::difference_tensor_trace},
        {"difference_tensor_contraction", "§2", &applic::always,
         &checks::difference_tensor_contraction},
        {"relative_christoffel_relation", "§2", &applic::always,
         &checks::relative_christoffel_relation},
        {"darboux_symmetry", "§1", &applic::always, &checks::darboux_symmetry},
        {"conormal_relations", "(2)", &applic::always, &checks::conormal_relations},
        {"relative_metric_pairing", "(4)", &applic::always, &checks::relative_metric_pairing},
        {"normalization_tangential_derivatives", "(1)", &applic::always,
         &checks::normalization_tangential_derivatives},
        {"tangent_field_tangency", "§2", &applic::always, &checks::tangent_field_tangency},
        {"tchebychev_route_agreement", "§2", &applic::always,
         &checks::tchebychev_route_agreement},
        {"normalization_independence", "§2", &applic::always,
         &checks::normalization_independence},
        {"laplacian_position_mean", "(11)", &applic::always, &checks::laplacian_position_mean},
        {"form_II_laplacian_position", "(13)", &applic::always,
         &checks::form_II_laplacian_position},
        {"form_II_laplacian_normal", "(14)", &applic::always, &checks::form_II_laplacian_normal},
        {"laplacian_conformal_change", "(15)", &applic::always,
         &checks::laplacian_conformal_change},
        {"gradient_exchange_position", "(16)", &applic::always,
         &checks::gradient_exchange_position},
        {"gradient_exchange_normal", "(16)", &applic::always, &checks::gradient_exchange_normal},
        {"laplacian_position_closed_form", "(18)", &applic::always,
         &checks::laplacian_position_closed_form},
        {"laplacian_normal_closed_form", "(19)", &applic::always,
         &checks::laplacian_normal_closed_form},
        {"tchebychev_closed_form", "(19)", &applic::always, &checks::tchebychev_closed_form},
        {"tchebychev_decomposition", "(22)", &applic::always, &checks::tchebychev_decomposition},
        {"normalization_projection_form", "(23)", &applic::always,
         &checks::normalization_projection_form},
        {"laplacian_position_family_form", "(24)", &applic::always,
         &checks::laplacian_position_family_form},
        {"tchebychev_gradient_form", "(25)", &applic::always, &checks::tchebychev_gradient_form},
        {"pairing_position_laplacian", "(35)", &applic::always,
         &checks::pairing_position_laplacian},
        {"pairing_normal_laplacian", "(36)", &applic::always, &checks::pairing_normal_laplacian},
        {"pairing_tchebychev", "§4.1", &applic::always, &checks::pairing_tchebychev},
        {"pairing_sum", "§4.1", &applic::always, &checks::pairing_sum},
        {"pairing_difference", "§4.1", &applic::always, &checks::pairing_difference},
        {"manhart_projection_scaling", "(42)", &applic::family,
         &checks::manhart_projection_scaling},
        {"manhart_tchebychev_scaling", "(30)", &applic::family,
         &checks::manhart_tchebychev_scaling},
        {"manhart_laplacian_scaling", "(31)", &applic::family, &checks::manhart_laplacian_scaling},
        {"manhart_normalization_form", "§3", &applic::family,
         &checks::manhart_normalization_form},
        {"equiaffine_tchebychev_zero", "§3", &applic::equiaffine_exponent,
         &checks::equiaffine_tchebychev_zero},
        {"curvature_pairing_zero", "Prop. 2(b)", &applic::inverse_curvature_exponent,
         &checks::curvature_pairing_zero},
        {"support_pairing_zero", "Prop. 4(b)", &applic::direct_curvature_exponent,
         &checks::support_pairing_zero},
        {"pair_inner_product", "§4.2A", &applic::pair, &checks::pair_inner_product},
        {"pair_power_normalization", "§4.2B", &applic::pair_power,
         &checks::pair_power_normalization},
        {"pair_power_tchebychev", "§4.2B", &applic::pair_power,
         &checks::pair_power_tchebychev},
        {"pair_combo_tchebychev", "Prop. 7", &applic::pair_combo, &checks::pair_combo_tchebychev},
        {"pair_combo_laplacian", "Prop. 8(a)", &applic::pair_combo,
         &checks::pair_combo_laplacian},
        {"pair_combo_mean_curvature", "Prop. 8(b)", &applic::pair_combo,
         &checks::pair_combo_mean_curvature},
        {"pair_difference_laplacian_x", "§4.2D", &applic::pair,
         &checks::pair_difference_laplacian_x},
        {"pair_difference_tchebychev", "§4.2D", &applic::pair,
         &checks::pair_difference_tchebychev},
        {"pair_difference_projection", "§4.2D", &applic::pair,
         &checks::pair_difference_projection},
        {"pair_difference_laplacian_xi", "§4.2D", &applic::pair,
         &checks::pair_difference_laplacian_xi},
        {"pair_invariance_laplacian_x", "Prop. 9(a)", &applic::pair_surface,
         &checks::pair_invariance_laplacian_x},
        {"pair_invariance_laplacian_xi", "Prop. 9(a)", &applic::pair_surface,
         &checks::pair_invariance_laplacian_xi},
    };
    return defs;
}

inline const std::vector<DiagDef>& diag_registry() {
    static const std::vector<DiagDef> defs = {
        {"relative_mean_curvature_delta", &applic::always, &diags::mean_curvature_delta},
        {"relative_mean_curvature_delta_alt", &applic::always, &diags::mean_curvature_delta_alt},
        {"relative_mean_curvature_divergence_delta", &applic::always,
         &diags::mean_curvature_divergence_delta},
        {"pair_orthogonality_functional", &applic::pair, &diags::pair_orthogonality_functional},
        {"pair_tchebychev_difference_printed_delta", &applic::pair,
         &diags::pair_tchebychev_difference_printed_delta},
        {"pair_combo_sign", &applic::pair_combo, &diags::pair_combo_sign},
    };
    return defs;
}

struct IdentityResult {
    std::string name;
    std::string eq;
    int attempted = 0;
    int accepted = 0;
    std::map<std::string, int> skipped;  // reason -> count, sorted for determinism
    double max_residual = 0.0;
    double mean_residual = 0.0;
    std::vector<double> worst_point;
};

struct Diagnostic {
    std::string name;
    std::string value_summary;
};

struct SuiteReport {
    std::string spec_name;
    std::string q_label;
    int n = 2;
    SampleConfig config;
    std::vector<IdentityResult> identities;
    std::vector<Diagnostic> diagnostics;
};

namespace detail {

struct PointOutcome {
    bool skipped = true;
    std::string reason = "not_evaluated";
    std::vector<double> residuals;
    std::vector<double> diag_values;
};

inline std::string format_sci(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

}  // namespace detail

inline SuiteReport run_suite(const SurfaceSpec& spec, const std::string& q_label,
                             const SampleConfig& config) {
    if (config.samples < 1) throw ValidationError("sample count must be positive");

    RunSetup setup;
    setup.support = resolve_support(spec, q_label, config);
    setup.thresholds = config.thresholds;
    setup.pair = config.pair;
    if (config.q2_label) setup.support2 = resolve_support(spec, *config.q2_label, config);

    RunContext ctx;
    ctx.n = spec.dim;
    ctx.family_exponent = setup.support.family_exponent;
    ctx.has_pair = setup.support2.has_value();
    ctx.pair_power = ctx.has_pair && config.pair.power_alpha.has_value();
    ctx.pair_combo = ctx.has_pair && config.pair.combo_alpha.has_value();

    const std::vector<CheckDef>& all = check_registry();
    std::vector<const CheckDef*> active;
    if (config.checks) {
        for (const std::string& want : *config.checks) {
            const CheckDef* found = nullptr;
            for (const CheckDef& c : all)
                if (want == c.name) {
                    found = &c;
                    break;
                }
            if (!found) throw ValidationError("unknown check name '" + want + "'");
            if (!found->applicable(ctx)) continue;
            if (std::find(active.begin(), active.end(), found) == active.end())
                active.push_back(found);
        }
    } else {
        for (const CheckDef& c : all)
            if (c.applicable(ctx)) active.push_back(&c);
    }

    std::vector<const DiagDef*> diag_defs;
    for (const DiagDef& d : diag_registry())
        if (d.applicable(ctx)) diag_defs.push_back(&d);

    const std::vector<std::vector<double>> points = draw_points(spec, config.samples, config.seed);
    std::vector<detail::PointOutcome> outcomes(points.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex fatal_mutex;
    std::exception_ptr fatal;

    auto work = [&]() {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::size_t k = next.fetch_add(1);
            if (k >= points.size()) return;
            try {
                const PointEvaluation ev = evaluate_point(spec, setup, points[k]);
                detail::PointOutcome& out = outcomes[k];
                out.residuals.reserve(active.size());
                for (const CheckDef* c : active) out.residuals.push_back(c->eval(ev));
                out.diag_values.reserve(diag_defs.size());
                for (const DiagDef* d : diag_defs) out.diag_values.push_back(d->eval(ev));
                out.skipped = false;
                out.reason.clear();
            } catch (const SkipPoint& s) {
                outcomes[k].skipped = true;
                outcomes[k].reason = s.reason;
            } catch (...) {
                std::lock_guard<std::mutex> lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    const int workers = std::max(1, config.workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);

    // Sequential reduction in sample order: sums, maxima, and worst points
    // come out identical for every worker count.
    std::vector<IdentityResult> ids(active.size());
    for (std::size_t c = 0; c < active.size(); ++c) {
        ids[c].name = active[c]->name;
        ids[c].eq = active[c]->eq;
    }
    std::vector<double> check_sum(active.size(), 0.0);
    std::vector<double> diag_max(diag_defs.size(), 0.0), diag_sum(diag_defs.size(), 0.0);
    int accepted_total = 0;

    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        const detail::PointOutcome& o = outcomes[k];
        if (o.skipped) {
            for (IdentityResult& id : ids) {
                ++id.attempted;
                ++id.skipped[o.reason];
            }
            continue;
        }
        ++accepted_total;
        for (std::size_t c = 0; c < ids.size(); ++c) {
            IdentityResult& id = ids[c];
            ++id.attempted;
            ++id.accepted;
            const double res = o.residuals[c];
            check_sum[c] += res;
            if (id.accepted == 1 || res > id.max_residual) {
                id.max_residual = res;
                id.worst_point = points[k];
            }
        }
        for (std::size_t d = 0; d < diag_defs.size(); ++d) {
            const double v = o.diag_values[d];
            diag_sum[d] += v;
            if (accepted_total == 1 || v > diag_max[d]) diag_max[d] = v;
        }
    }

    if (accepted_total == 0) throw AllSamplesSkipped();

    for (std::size_t c = 0; c < ids.size(); ++c)
        if (ids[c].accepted > 0) ids[c].mean_residual = check_sum[c] / ids[c].accepted;

    std::vector<Diagnostic> diagnostics;
    diagnostics.reserve(diag_defs.size());
    for (std::size_t d = 0; d < diag_defs.size(); ++d) {
        Diagnostic diag;
        diag.name = diag_defs[d]->name;
        diag.value_summary = "max=" + detail::format_sci(diag_max[d]) +
                             " mean=" + detail::format_sci(diag_sum[d] / accepted_total);
        diagnostics.push_back(std::move(diag));
    }

    SuiteReport rep;
    rep.spec_name = spec.name;
    rep.q_label = q_label;
    rep.n = spec.dim;
    rep.config = config;
    rep.identities = std::move(ids);
    rep.diagnostics = std::move(diagnostics);
    return rep;
}

inline nlohmann::ordered_json report_to_json(const SuiteReport& rep) {
    nlohmann::ordered_json j;
    j["spec"] = rep.spec_name;
    j["q_label"] = rep.q_label;
    j["n"] = rep.n;
    nlohmann::ordered_json cfg;
    cfg["samples"] = rep.config.samples;
    cfg["seed"] = rep.config.seed;
    cfg["tol"] = rep.config.tol;
    cfg["fd_step"] = rep.config.fd_step;
    j["config"] = std::move(cfg);

    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
    for (const IdentityResult& id : rep.identities) {
        nlohmann::ordered_json e;
        e["name"] = id.name;
        e["eq"] = id.eq;
        e["attempted"] = id.attempted;
        e["accepted"] = id.accepted;
        nlohmann::ordered_json sk = nlohmann::ordered_json::array();
        for (const auto& [reason, count] : id.skipped) {
            nlohmann::ordered_json s;
            s["reason"] = reason;
            s["count"] = count;
            sk.push_back(std::move(s));
        }
        e["skipped"] = std::move(sk);
        e["max_residual"] = id.max_residual;
        e["mean_residual"] = id.mean_residual;
        e["worst_point"] = id.worst_point;
        ids.push_back(std::move(e));
    }
    j["identities"] = std::move(ids);

    nlohmann::ordered_json dg = nlohmann::ordered_json::array();
    for (const Diagnostic& d : rep.diagnostics) {
        nlohmann::ordered_json e;
        e["name"] = d.name;
        e["value_summary"] = d.value_summary;
        dg.push_back(std::move(e));
    }
    j["diagnostics"] = std::move(dg);
    return j;
}

inline std::string report_to_text(const SuiteReport& rep) {
    std::ostringstream out;
    out << "spec: " << rep.spec_name << "\n";
    out << "q: " << rep.q_label << "\n";
    out << "n: " << rep.n << "\n";
    out << "samples: " << rep.config.samples << "  seed: " << rep.config.seed
        << "  tol: " << detail::format_sci(rep.config.tol)
        << "  fd_step: " << detail::format_sci(rep.config.fd_step) << "\n\n";

    std::vector<const IdentityResult*> order;
    order.reserve(rep.identities.size());
    for (const IdentityResult& id : rep.identities) order.push_back(&id);
    std::sort(order.begin(), order.end(), [](const IdentityResult* a, const IdentityResult* b) {
        if (a->max_residual != b->max_residual) return a->max_residual > b->max_residual;
        return a->name < b->name;
    });

    std::size_t name_w = 8, eq_w = 2;
    for (const IdentityResult* id : order) {
        name_w = std::max(name_w, id->name.size());
        eq_w = std::max(eq_w, id->eq.size());
    }

    char line[256];
    std::snprintf(line, sizeof line, "%-*s  %-*s  %9s  %9s  %9s  %16s  %16s\n",
                  static_cast<int>(name_w), "identity", static_cast<int>(eq_w), "eq", "attempted",
                  "accepted", "skipped", "max_residual", "mean_residual");
    out << line;
    for (const IdentityResult* id : order) {
        int skip_total = 0;
        for (const auto& [reason, count] : id->skipped) skip_total += count;
        std::snprintf(line, sizeof line, "%-*s  %-*s  %9d  %9d  %9d  %16.6e  %16.6e\n",
                      static_cast<int>(name_w), id->name.c_str(), static_cast<int>(eq_w),
                      id->eq.c_str(), id->attempted, id->accepted, skip_total, id->max_residual,
                      id->mean_residual);
        out << line;
    }

    out << "\ndiagnostics:\n";
    for (const Diagnostic& d : rep.diagnostics)
        out << "  " << d.name << ": " << d.value_summary << "\n";
    return out.str();
}

inline bool all_within_tol(const SuiteReport& rep) {
    for (const IdentityResult& id : rep.identities)
        if (!(id.max_residual <= rep.config.tol)) return false;
    return true;
}

// Writes the report to a file, or to stdout when the path is empty or "-".
inline void emit_report(const SuiteReport& rep, const std::string& format,
                        const std::string& path) {
    std::string body;
    if (format == "json")
        body = report_to_json(rep).dump(2) + "\n";
    else if (format == "text")
        body = report_to_text(rep);
    else
        throw ValidationError("unknown report format '" + format + "'");

    if (path.empty() || path == "-") {
        std::fwrite(body.data(), 1, body.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path);
    out << body;
    out.flush();
    if (!out) throw IoError(path);
}

}  // namespace relnorm
