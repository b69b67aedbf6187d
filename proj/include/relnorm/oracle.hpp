#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "euclid.hpp"
#include "linalg.hpp"
#include "relative.hpp"
#include "surface.hpp"

namespace relnorm {

namespace detail {

// Value-level generalized cross product (same orientation as the jet one).
inline Vec cross_values(const std::vector<Vec>& tangents) {
    const int n = static_cast<int>(tangents.size());
    Vec out(static_cast<std::size_t>(n) + 1);
    Mat minor(n, 0.0);
    for (int a = 0; a <= n; ++a) {
        for (int i = 0; i < n; ++i) {
            int cc = 0;
            for (int c = 0; c <= n; ++c) {
                if (c == a) continue;
                minor(i, cc++) = tangents[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            }
        }
        double d = det(minor);
        out[static_cast<std::size_t>(a)] = (a % 2 == 0) ? d : -d;
    }
    return out;
}

inline Vec pipeline_y(const SurfaceSpec& spec, const SupportFunction& sf, std::span<const double> pt,
                      const Thresholds& th) {
    EuclideanFrame f = frame_at(spec, pt, th);
    std::vector<Jet> seeds = seed_point(pt, 2);
    Jet q_jet = eval_jet(sf.expr, seeds, &f.curvature_jet);
    return relative_at(f, q_jet).y;
}

} // namespace detail

// Finite-difference cross-check of the jet pipeline at one point: estimates
// g, h, xi, K from pure immersion evaluations (no jets anywhere in the
// stencil) and the normalization's parameter derivatives from central
// differences of pipeline evaluations at neighboring points; reports the
// estimates and their normalized deltas against the jet-built frame.
struct OracleReport {
    Mat g_fd, h_fd;
    Vec xi_fd;
    double curvature_fd;
    std::vector<Vec> y_derivative_fd;

    double g_residual;
    double h_residual;
    double xi_residual;
    double curvature_residual;
    double y_derivative_residual;
    double max_residual;
};

inline OracleReport fd_oracle(const SurfaceSpec& spec, std::span<const double> point, double fd_step,
                              const std::string& q_label = "euclidean", const Thresholds& th = {}) {
    const int n = spec.dim;
    if (static_cast<int>(point.size()) != n) throw Error("point arity does not match the description");
    const double h = fd_step;
    for (int i = 0; i < n; ++i) {
        const Interval& iv = spec.domain[static_cast<std::size_t>(i)];
        if (point[static_cast<std::size_t>(i)] < iv.lo + 2.0 * h ||
            point[static_cast<std::size_t>(i)] > iv.hi - 2.0 * h)
            throw MarginError();
    }
    const SupportFunction* sf = spec.find_support(q_label);
    if (!sf) throw ValidationError("unknown support-function label '" + q_label + "'");

    std::vector<double> p(point.begin(), point.end());
    auto eval_at = [&](const std::vector<double>& pt) { return immersion_values(spec, pt); };

    const Vec x0 = eval_at(p);
    std::vector<Vec> xp(static_cast<std::size_t>(n), Vec{}), xm(static_cast<std::size_t>(n), Vec{});
    for (int i = 0; i < n; ++i) {
        std::vector<double> pp = p, pm = p;
        pp[static_cast<std::size_t>(i)] += h;
        pm[static_cast<std::size_t>(i)] -= h;
        xp[static_cast<std::size_t>(i)] = eval_at(pp);
        xm[static_cast<std::size_t>(i)] = eval_at(pm);
    }

    std::vector<Vec> tangents;
    tangents.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        tangents.push_back((xp[static_cast<std::size_t>(i)] - xm[static_cast<std::size_t>(i)]) / (2.0 * h));

    // Second partials: 3-point pure, 4-point mixed central stencils.
    std::vector<std::vector<Vec>> second(static_cast<std::size_t>(n),
                                         std::vector<Vec>(static_cast<std::size_t>(n), Vec{}));
    for (int i = 0; i < n; ++i) {
        second[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] =
            (xp[static_cast<std::size_t>(i)] - 2.0 * x0 + xm[static_cast<std::size_t>(i)]) / (h * h);
        for (int j = i + 1; j < n; ++j) {
            std::vector<double> pp = p, pm = p, mp = p, mm = p;
            pp[static_cast<std::size_t>(i)] += h;
            pp[static_cast<std::size_t>(j)] += h;
            pm[static_cast<std::size_t>(i)] += h;
            pm[static_cast<std::size_t>(j)] -= h;
            mp[static_cast<std::size_t>(i)] -= h;
            mp[static_cast<std::size_t>(j)] += h;
            mm[static_cast<std::size_t>(i)] -= h;
            mm[static_cast<std::size_t>(j)] -= h;
            Vec mixed = (eval_at(pp) - eval_at(pm) - eval_at(mp) + eval_at(mm)) / (4.0 * h * h);
            second[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = mixed;
            second[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = mixed;
        }
    }

    Mat g_fd(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g_fd(i, j) = dot(tangents[static_cast<std::size_t>(i)], tangents[static_cast<std::size_t>(j)]);

    Vec cross = detail::cross_values(tangents);
    Vec xi_fd = cross / norm(cross);

    Mat h_fd(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            h_fd(i, j) = dot(xi_fd, second[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);

    const double curvature_fd = det(h_fd) / det(g_fd);

    std::vector<Vec> dy_fd;
    dy_fd.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<double> pp = p, pm = p;
        pp[static_cast<std::size_t>(i)] += h;
        pm[static_cast<std::size_t>(i)] -= h;
        Vec yp = detail::pipeline_y(spec, *sf, pp, th);
        Vec ym = detail::pipeline_y(spec, *sf, pm, th);
        dy_fd.push_back((yp - ym) / (2.0 * h));
    }

    EuclideanFrame f = frame_at(spec, point, th);
    std::vector<Jet> seeds = seed_point(point, 2);
    Jet q_jet = eval_jet(sf->expr, seeds, &f.curvature_jet);
    RelativeFrame rel = relative_at(f, q_jet);

    const double g_res = normalized_residual(g_fd, f.g);
    const double h_res = normalized_residual(h_fd, f.h);
    const double xi_res = normalized_residual(xi_fd, f.normal_value());
    const double k_res = normalized_residual(curvature_fd, f.curvature);
    double dy_res = 0.0;
    for (int i = 0; i < n; ++i)
        dy_res = std::max(dy_res, normalized_residual(dy_fd[static_cast<std::size_t>(i)],
                                                      first_partials(rel.y_jets, i)));
    const double worst = std::max({g_res, h_res, xi_res, k_res, dy_res});

    return OracleReport{
        std::move(g_fd), std::move(h_fd), std::move(xi_fd),    curvature_fd, std::move(dy_fd),
        g_res,           h_res,           xi_res,              k_res,        dy_res,
        worst,
    };
}

} // namespace relnorm
