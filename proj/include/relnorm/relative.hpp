#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "euclid.hpp"
#include "jet.hpp"
#include "linalg.hpp"

namespace relnorm {

// ln |a| via sign dispatch at the point; valid wherever a never vanishes
// (the K != 0 and q != 0 hypotheses guarantee that at accepted points).
inline Jet ln_abs(const Jet& a) { return ln(abs(a)); }

// Pointwise relative apparatus of a normalization with support function q:
// conormal, relative metric, normalization vector, Darboux tensor, the
// Tchebychev field by three routes, the projection field, the gradient
// potential, the relative shape operator, and the G-Laplacians of x and xi.
struct RelativeFrame {
    Jet q_jet;  // order 2
    double q;

    MapJet conormal;  // X = q^{-1} xi, order 2
    Vec conormal_value;

    MatT<Jet> G_jets;  // G_ij = q^{-1} h_ij, order 2
    Mat G, G_inv;
    Christoffels chr_G;

    MapJet y_jets;     // normalization vector y = -h^{ij} q_{/i} x_{/j} + q xi, order 1
    Vec y;             // its value
    Vec y_tangential;  // orthogonal-projection component 2 n q Q

    Tensor3 A;                 // Darboux tensor A_ijk
    double A_symmetry_defect;  // worst pairwise permutation difference, scale-normalized

    Vec T_darboux;  // (1/n) A_ijk G^{jk} G^{im} x_{/m}
    Vec T_closed;   // (q/2nK) grad^III K - ((n+2)/2n) grad^III q
    Vec T_decomp;   // q T_EUK - q (n+2) Q
    Vec T_euk;      // (1/2nK) grad^III K
    Vec Q_vec;      // (1/2nq) grad^III q

    double phi;      // |K|^{-1/2n} |q|^{(n+2)/2n}
    Jet ln_phi_jet;  // order 2

    Vec lap_G_x;   // Laplacian of the position with respect to G
    Vec lap_G_xi;  // Laplacian of the unit normal with respect to G

    Mat B;                     // relative shape operator, B(i, j) = B_i^j
    double H_trace;            // (1/n) B_i^i (ground truth for H)
    double H_formula;          // printed closed form with the (2-n)/4 coefficient (diagnostic)
    double H_formula_alt;      // same with coefficient (2-n)/2 (diagnostic)
    double H_divergence_form;  // q H_I + (1/n)[lap^II q - (1/2) grad^II(ln|K|, q)]
    double max_nontangential;  // worst non-tangential residual among the y_{/i}
};

// Relative shape operator: solves y_{/i} = -B_i^j x_{/j} in the tangent
// basis and evaluates the closed-form mean-curvature candidates.  Throws
// TangentSolveFailed when a y-derivative leaves the tangent plane by more
// than the frame's guard (that would violate the defining property of a
// relative normalization and indicates an upstream defect).
struct ShapeResult {
    Mat B;
    double H_trace;
    double H_formula;
    double H_formula_alt;
    double H_divergence_form;
    double max_nontangential;
};

inline ShapeResult shape_operator(const EuclideanFrame& f, const MapJet& y_jets, const Jet& q_jet) {
    const int n = f.dim;
    Mat B(n, 0.0);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        Vec dy = first_partials(y_jets, i);
        TangentDecomposition td = decompose_tangent(f, dy);
        double res = std::abs(td.normal_part) / (1.0 + norm(dy));
        worst = std::max(worst, res);
        if (res > f.thresholds.tangent_residual) throw TangentSolveFailed(res);
        for (int j = 0; j < n; ++j) B(i, j) = -td.coeffs[static_cast<std::size_t>(j)];
    }
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += B(i, i);
    const double H_trace = trace / n;

    const double q = q_jet.value();
    Jet lnq = ln_abs(q_jet);
    Jet lnK = ln_abs(f.curvature_jet);
    const double lap2_lnq = laplacian(f.h_inv, f.chr_second.second, lnq);
    const double grad2_lnq = beltrami1(f.h_inv, lnq, lnq);
    const double base = q * f.mean_curvature;
    const double H_formula = base + (lap2_lnq + (2.0 - n) / 4.0 * grad2_lnq) / n;
    const double H_formula_alt = base + (lap2_lnq + (2.0 - n) / 2.0 * grad2_lnq) / n;
    const double H_div =
        base + (laplacian(f.h_inv, f.chr_second.second, q_jet) - 0.5 * beltrami1(f.h_inv, lnK, q_jet)) / n;

    return ShapeResult{B, H_trace, H_formula, H_formula_alt, H_div, worst};
}

// Builds the relative apparatus for a support-function jet (order >= 2).
// Throws ZeroSupport when |q| falls below the frame's guard.
inline RelativeFrame relative_at(const EuclideanFrame& f, const Jet& q_in) {
    const int n = f.dim;
    if (q_in.vars() != n) throw Error("support jet has the wrong number of variables");
    if (q_in.order() < 2) throw Error("support jet must have order >= 2");
    const Jet q_jet = q_in.order() > 2 ? q_in.truncated(2) : q_in;
    const double q = q_jet.value();
    if (!(std::abs(q) > f.thresholds.support)) throw ZeroSupport(q);

    const Jet q_recip = recip(q_jet);
    const MapJet normal2 = truncated(f.normal, 2);
    MapJet conormal;
    conormal.reserve(normal2.size());
    for (const Jet& c : normal2) conormal.push_back(c * q_recip);
    Vec conormal_value = values(conormal);

    MatT<Jet> G_jets(n, q_jet * 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G_jets(i, j) = f.h_jets(i, j) * q_recip;
    Mat G(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = G_jets(i, j).value();
    Mat G_inv = guarded_inverse(G, f.thresholds.inverse_residual);
    Christoffels chr_G = christoffels(G_jets, G_inv);

    // y = -h^{ij} q_{/i} x_{/j} + q xi, assembled in order-1 jet arithmetic so
    // that its parameter derivatives come out of the same computation.
    const Jet q1 = q_jet.truncated(1);
    MatT<Jet> h1(n, q1 * 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h1(i, j) = f.h_jets(i, j).truncated(1);
    MatT<Jet> h1_inv = inverse(h1);
    std::vector<Jet> dq;
    dq.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dq.push_back(q_jet.derivative(i));
    const MapJet normal1 = truncated(f.normal, 1);
    std::vector<MapJet> tangent1;
    tangent1.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) tangent1.push_back(truncated(f.tangent[static_cast<std::size_t>(j)], 1));
    MapJet y_jets;
    y_jets.reserve(f.x.size());
    for (std::size_t a = 0; a < f.x.size(); ++a) {
        Jet acc = q1 * normal1[a];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                acc -= h1_inv(i, j) * dq[static_cast<std::size_t>(i)] * tangent1[static_cast<std::size_t>(j)][a];
        y_jets.push_back(std::move(acc));
    }
    Vec y = values(y_jets);

    const double K = f.curvature;
    Vec grad3_K = gradient_field(f.e_inv, f.curvature_jet, f.normal);
    Vec grad3_q = gradient_field(f.e_inv, q_jet, f.normal);
    Vec T_euk = (1.0 / (2.0 * n * K)) * grad3_K;
    Vec Q_vec = (1.0 / (2.0 * n * q)) * grad3_q;
    Vec y_tangential = (2.0 * n * q) * Q_vec;
    Vec T_closed = (q / (2.0 * n * K)) * grad3_K - ((n + 2.0) / (2.0 * n)) * grad3_q;
    Vec T_decomp = q * T_euk - (q * (n + 2.0)) * Q_vec;

    // Darboux tensor from the conormal pairing with third immersion partials,
    // corrected by the relative Christoffel contractions.
    Tensor3 A(n);
    double max_abs_A = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                MultiIndex idx(static_cast<std::size_t>(n), 0);
                ++idx[static_cast<std::size_t>(i)];
                ++idx[static_cast<std::size_t>(j)];
                ++idx[static_cast<std::size_t>(k)];
                double third = 0.0;
                for (std::size_t a = 0; a < f.x.size(); ++a)
                    third += conormal_value[a] * f.x[a].extract(idx);
                double corr = 0.0;
                for (int m = 0; m < n; ++m)
                    corr += chr_G.second(i, j, m) * G(m, k) + chr_G.second(k, i, m) * G(j, m) +
                            chr_G.second(k, j, m) * G(m, i);
                A(i, j, k) = third - corr;
                max_abs_A = std::max(max_abs_A, std::abs(A(i, j, k)));
            }
    double defect = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = A(i, j, k);
                double d = std::max({std::abs(v - A(i, k, j)), std::abs(v - A(j, i, k)),
                                     std::abs(v - A(j, k, i)), std::abs(v - A(k, i, j)),
                                     std::abs(v - A(k, j, i))});
                defect = std::max(defect, d);
            }
    defect /= 1.0 + max_abs_A;

    Vec t_coeff(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) s += A(i, j, k) * G_inv(j, k) * G_inv(i, m);
        t_coeff[static_cast<std::size_t>(m)] = s / n;
    }
    Vec T_darboux(f.x.size());
    for (int m = 0; m < n; ++m) T_darboux += t_coeff[static_cast<std::size_t>(m)] * f.tangent_value(m);

    Jet ln_phi_jet = (-1.0 / (2.0 * n)) * ln_abs(f.curvature_jet) + ((n + 2.0) / (2.0 * n)) * ln_abs(q_jet);
    const double phi = std::exp(ln_phi_jet.value());

    Vec lap_G_x = laplacian_field(G_inv, chr_G.second, f.x);
    Vec lap_G_xi = laplacian_field(G_inv, chr_G.second, f.normal);

    ShapeResult sh = shape_operator(f, y_jets, q_jet);

    return RelativeFrame{
        .q_jet = q_jet,
        .q = q,
        .conormal = std::move(conormal),
        .conormal_value = std::move(conormal_value),
        .G_jets = std::move(G_jets),
        .G = std::move(G),
        .G_inv = std::move(G_inv),
        .chr_G = std::move(chr_G),
        .y_jets = std::move(y_jets),
        .y = std::move(y),
        .y_tangential = std::move(y_tangential),
        .A = std::move(A),
        .A_symmetry_defect = defect,
        .T_darboux = std::move(T_darboux),
        .T_closed = std::move(T_closed),
        .T_decomp = std::move(T_decomp),
        .T_euk = std::move(T_euk),
        .Q_vec = std::move(Q_vec),
        .phi = phi,
        .ln_phi_jet = std::move(ln_phi_jet),
        .lap_G_x = std::move(lap_G_x),
        .lap_G_xi = std::move(lap_G_xi),
        .B = std::move(sh.B),
        .H_trace = sh.H_trace,
        .H_formula = sh.H_formula,
        .H_formula_alt = sh.H_formula_alt,
        .H_divergence_form = sh.H_divergence_form,
        .max_nontangential = sh.max_nontangential,
    };
}

// Support function of the equiaffine normalization, |K|^{1/(n+2)}, order 2.
inline Jet equiaffine_support(const EuclideanFrame& f) {
    return pow(abs(f.curvature_jet), 1.0 / (f.dim + 2.0));
}

// The quantity q^{-1}[2n T + (n+2) y] is the same vector for every
// normalization; returns its normalized residual against 2n T_EUK + (n+2) xi.
inline double normalization_invariance(const EuclideanFrame& f, const RelativeFrame& rel) {
    const double n = f.dim;
    Vec lhs = (1.0 / rel.q) * (2.0 * n * rel.T_closed + (n + 2.0) * rel.y);
    Vec rhs = 2.0 * n * rel.T_euk + (n + 2.0) * f.normal_value();
    return normalized_residual(lhs, rhs);
}

// Residuals of the one-parameter-family displays for q = scale |K|^alpha.
// They depend only on the built frame and the exponent (the scale cancels).
struct ManhartResiduals {
    double projection;     // Q - alpha T_EUK
    double tchebychev;     // T - q [1 - alpha (n+2)] T_EUK
    double laplacian;      // lap^G x - n q {[1 + alpha (n-2)] T_EUK + xi}
    double normalization;  // y - q [2 alpha n T_EUK + xi]
};

inline ManhartResiduals manhart_residuals(const EuclideanFrame& f, const RelativeFrame& rel, double alpha) {
    const double n = f.dim;
    const Vec xi = f.normal_value();
    ManhartResiduals r{};
    r.projection = normalized_residual(rel.Q_vec, alpha * rel.T_euk);
    r.tchebychev = normalized_residual(rel.T_decomp, (rel.q * (1.0 - alpha * (n + 2.0))) * rel.T_euk);
    r.laplacian =
        normalized_residual(rel.lap_G_x, (n * rel.q) * ((1.0 + alpha * (n - 2.0)) * rel.T_euk + xi));
    r.normalization = normalized_residual(rel.y, rel.q * (2.0 * alpha * n * rel.T_euk + xi));
    return r;
}

struct ManhartReport {
    double alpha;
    double scale;
    double q_value;
    ManhartResiduals residuals;
    RelativeFrame rel;
};

inline ManhartReport manhart_family(const EuclideanFrame& f, double alpha, double scale = 1.0) {
    Jet q_jet = pow(abs(f.curvature_jet), alpha) * scale;
    RelativeFrame rel = relative_at(f, q_jet);
    ManhartResiduals res = manhart_residuals(f, rel, alpha);
    return ManhartReport{alpha, scale, rel.q, res, std::move(rel)};
}

// Componentwise pairings of the main tangent fields with the one-forms d(xi)
// and d(x): P1_i = <lap^G x, xi_{/i}>, P2_i = <lap^G xi, x_{/i}>,
// P3_i = <T, xi_{/i}>, plus the residuals of their closed-form displays.
struct PairingReport {
    Vec p1, p2, p3;
    double lap_x_residual;       // 2 P1_i vs q d_i ln(|K| |q|^{n-2})
    double lap_xi_residual;      // 2 P2_i vs q d_i ln(|K|^{-1} |q|^{n-2})
    double tchebychev_residual;  // P3_i vs -q d_i ln(phi)
    double sum_residual;         // (P1 + P2)_i vs (n-2) q_{/i}
    double diff_residual;        // (P1 - P2)_i vs (q/K) K_{/i}
};

inline PairingReport oneform_pairings(const EuclideanFrame& f, const RelativeFrame& rel) {
    const int n = f.dim;
    const double q = rel.q;
    const double K = f.curvature;
    Vec p1(static_cast<std::size_t>(n)), p2(static_cast<std::size_t>(n)), p3(static_cast<std::size_t>(n));
    Vec l35(p1.size()), r35(p1.size()), l36(p1.size()), r36(p1.size()), lB(p1.size()), rB(p1.size());
    Vec lsum(p1.size()), rsum(p1.size()), ldiff(p1.size()), rdiff(p1.size());
    for (int i = 0; i < n; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        Vec xi_i = f.normal_partial_value(i);
        Vec x_i = f.tangent_value(i);
        p1[ii] = dot(rel.lap_G_x, xi_i);
        p2[ii] = dot(rel.lap_G_xi, x_i);
        p3[ii] = dot(rel.T_closed, xi_i);
        const double dK = f.curvature_jet.first(i);
        const double dq = rel.q_jet.first(i);
        l35[ii] = 2.0 * p1[ii];
        r35[ii] = q * (dK / K + (n - 2.0) * dq / q);
        l36[ii] = 2.0 * p2[ii];
        r36[ii] = q * (-dK / K + (n - 2.0) * dq / q);
        lB[ii] = p3[ii];
        rB[ii] = -q * rel.ln_phi_jet.first(i);
        lsum[ii] = p1[ii] + p2[ii];
        rsum[ii] = (n - 2.0) * dq;
        ldiff[ii] = p1[ii] - p2[ii];
        rdiff[ii] = (q / K) * dK;
    }
    return PairingReport{
        std::move(p1),
        std::move(p2),
        std::move(p3),
        normalized_residual(l35, r35),
        normalized_residual(l36, r36),
        normalized_residual(lB, rB),
        normalized_residual(lsum, rsum),
        normalized_residual(ldiff, rdiff),
    };
}

// Declared relations between the two support functions of a pair run.
struct PairOptions {
    std::optional<double> power_alpha;  // declares q2 = power_scale * q1^power_alpha
    double power_scale = 1.0;
    std::optional<double> combo_alpha;  // declares q2 = combo_alpha q1 + combo_mu q_AFF
    double combo_mu = 0.0;
};

struct PairReport {
    // inner-product identity and orthogonality functional
    double inner_product_residual;    // <y1, y2> vs grad^III(q1, q2) + q1 q2
    double orthogonality_functional;  // grad^III(ln|q1|, ln|q2|) + 1; zero iff orthogonal

    // power-family displays (present when power_alpha is declared)
    std::optional<double> power_y_residual;
    std::optional<double> power_t_residual;

    // combination displays (present when combo_alpha is declared)
    std::optional<double> combo_t_residual;    // T2 - alpha T1
    std::optional<double> combo_lap_residual;  // lap^{G2} x - alpha lap^{G1} x - n mu y_AFF
    std::optional<double> combo_h_residual;    // H2 - alpha H1 - mu H_AFF
    std::optional<double> combo_eps;           // sign(q2 - alpha q1) at the point

    // difference displays (always)
    double diff_lap_x_residual;  // lap^{G1}x/q1 - lap^{G2}x/q2 vs ((n-2)/2) grad^III(ln|q1/q2|, xi)
    // The gradient form of the Tchebychev difference carries 1/(2n), the only
    // coefficient consistent with the projection form below (divide the
    // decomposition T = q T_EUK - q(n+2) Q by q and expand Q); the variant
    // with 1/2 in place of 1/(2n) is kept as a reported-only delta.
    double diff_t_residual;          // T1/q1 - T2/q2 vs -((n+2)/2n) grad^III(ln|q1/q2|, xi)
    double diff_t_printed_residual;  // same with the inconsistent -((n+2)/2) coefficient
    double diff_t_q_residual;        // T1/q1 - T2/q2 vs -(n+2)(Q1 - Q2)
    double diff_lap_xi_residual;  // lap^{G1}xi/q1 - lap^{G2}xi/q2 vs ((n-2)/2) grad^I(ln|q1/q2|, x)

    // n = 2 only: q^{-1} lap^G x and q^{-1} lap^G xi agree across normalizations
    std::optional<double> invariance_lap_x_residual;
    std::optional<double> invariance_lap_xi_residual;

    // normalization-independent combination, evaluated for each q separately
    double independence_1;
    double independence_2;

    RelativeFrame rel1;
    RelativeFrame rel2;
};

inline PairReport two_normalizations(const EuclideanFrame& f, const Jet& q1_in, const Jet& q2_in,
                                     const PairOptions& opt = {}) {
    const int n = f.dim;
    RelativeFrame rel1 = relative_at(f, q1_in);
    RelativeFrame rel2 = relative_at(f, q2_in);
    const double q1 = rel1.q, q2 = rel2.q;

    const double ip_lhs = dot(rel1.y, rel2.y);
    const double ip_rhs = beltrami1(f.e_inv, rel1.q_jet, rel2.q_jet) + q1 * q2;
    const double inner_product_residual = normalized_residual(ip_lhs, ip_rhs);
    const double orthogonality =
        beltrami1(f.e_inv, ln_abs(rel1.q_jet), ln_abs(rel2.q_jet)) + 1.0;

    std::optional<double> power_y, power_t;
    if (opt.power_alpha) {
        const double alpha = *opt.power_alpha;
        if (!(q1 > 0.0)) throw DomainErrorJet("pow");
        const double pref = opt.power_scale * std::pow(q1, alpha - 1.0);
        Vec grad3_q1 = gradient_field(f.e_inv, rel1.q_jet, f.normal);
        power_y = normalized_residual(rel2.y, pref * (rel1.y + (alpha - 1.0) * grad3_q1));
        power_t = normalized_residual(
            rel2.T_closed, pref * (rel1.T_closed - ((alpha - 1.0) * (n + 2.0) / (2.0 * n)) * grad3_q1));
    }

    std::optional<double> combo_t, combo_lap, combo_h, combo_eps;
    if (opt.combo_alpha) {
        const double alpha = *opt.combo_alpha;
        const double mu = opt.combo_mu;
        Jet q_aff = equiaffine_support(f);
        const double combined = alpha * q1 + mu * q_aff.value();
        if (!(std::abs(combined) > f.thresholds.support)) throw NotANormalization();
        RelativeFrame rel_aff = relative_at(f, q_aff);
        combo_t = normalized_residual(rel2.T_closed, alpha * rel1.T_closed);
        combo_lap = normalized_residual(rel2.lap_G_x, alpha * rel1.lap_G_x + (n * mu) * rel_aff.y);
        combo_h = normalized_residual(rel2.H_trace, alpha * rel1.H_trace + mu * rel_aff.H_trace);
        combo_eps = (q2 - alpha * q1) >= 0.0 ? 1.0 : -1.0;
    }

    Jet ln_ratio = ln_abs(rel1.q_jet) - ln_abs(rel2.q_jet);
    Vec grad3_lnr = gradient_field(f.e_inv, ln_ratio, f.normal);
    Vec grad1_lnr = gradient_field(f.g_inv, ln_ratio, f.x);
    Vec lap_x_diff = (1.0 / q1) * rel1.lap_G_x - (1.0 / q2) * rel2.lap_G_x;
    Vec t_diff = (1.0 / q1) * rel1.T_closed - (1.0 / q2) * rel2.T_closed;
    Vec lap_xi_diff = (1.0 / q1) * rel1.lap_G_xi - (1.0 / q2) * rel2.lap_G_xi;
    const double d_lap_x = normalized_residual(lap_x_diff, ((n - 2.0) / 2.0) * grad3_lnr);
    const double d_t = normalized_residual(t_diff, (-(n + 2.0) / (2.0 * n)) * grad3_lnr);
    const double d_t_printed = normalized_residual(t_diff, (-(n + 2.0) / 2.0) * grad3_lnr);
    const double d_t_q = normalized_residual(t_diff, (-(n + 2.0)) * (rel1.Q_vec - rel2.Q_vec));
    const double d_lap_xi = normalized_residual(lap_xi_diff, ((n - 2.0) / 2.0) * grad1_lnr);

    std::optional<double> inv_x, inv_xi;
    if (n == 2) {
        inv_x = normalized_residual((1.0 / q1) * rel1.lap_G_x, (1.0 / q2) * rel2.lap_G_x);
        inv_xi = normalized_residual((1.0 / q1) * rel1.lap_G_xi, (1.0 / q2) * rel2.lap_G_xi);
    }

    const double indep1 = normalization_invariance(f, rel1);
    const double indep2 = normalization_invariance(f, rel2);

    return PairReport{
        .inner_product_residual = inner_product_residual,
        .orthogonality_functional = orthogonality,
        .power_y_residual = power_y,
        .power_t_residual = power_t,
        .combo_t_residual = combo_t,
        .combo_lap_residual = combo_lap,
        .combo_h_residual = combo_h,
        .combo_eps = combo_eps,
        .diff_lap_x_residual = d_lap_x,
        .diff_t_residual = d_t,
        .diff_t_printed_residual = d_t_printed,
        .diff_t_q_residual = d_t_q,
        .diff_lap_xi_residual = d_lap_xi,
        .invariance_lap_x_residual = inv_x,
        .invariance_lap_xi_residual = inv_xi,
        .independence_1 = indep1,
        .independence_2 = indep2,
        .rel1 = std::move(rel1),
        .rel2 = std::move(rel2),
    };
}

} // namespace relnorm
