#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"
#include "linalg.hpp"
#include "surface.hpp"

namespace relnorm {

// Degeneracy guards applied while assembling frames at a sample point.
// Points failing a guard are skipped (SkipPoint subclasses), never fatal.
struct Thresholds {
    double degeneracy = 1e-10;       // lower bound on det I
    double flat = 1e-10;             // lower bound on |det II| / det I
    double inverse_residual = 1e-8;  // max-norm residual allowed for value-matrix inverses
    double support = 1e-10;          // lower bound on |q|
    double tangent_residual = 1e-8;  // non-tangential part allowed in the normalization's derivatives
};

// Cubical array of reals, indexed (i, j, k) with 0 <= index < dim.
class Tensor3 {
public:
    explicit Tensor3(int n) : n_(n), v_(static_cast<std::size_t>(n) * n * n, 0.0) {}

    int dim() const { return n_; }
    double& operator()(int i, int j, int k) { return v_[idx(i, j, k)]; }
    double operator()(int i, int j, int k) const { return v_[idx(i, j, k)]; }

private:
    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)) * n_ + static_cast<std::size_t>(k);
    }
    int n_;
    std::vector<double> v_;
};

// Christoffel symbols of a symmetric metric tensor given by jets (order >= 1)
// and the value inverse of the metric.
//   first(i, j, k)  = [ij, k] = (m_ik/j + m_jk/i - m_ij/k) / 2
//   second(i, j, k) = {k; ij} = m^kl [ij, l]
struct Christoffels {
    Tensor3 first;
    Tensor3 second;
};

inline Christoffels christoffels(const MatT<Jet>& m, const Mat& m_inv) {
    const int n = m.dim();
    Christoffels ch{Tensor3(n), Tensor3(n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                ch.first(i, j, k) = 0.5 * (m(i, k).first(j) + m(j, k).first(i) - m(i, j).first(k));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += m_inv(k, l) * ch.first(i, j, l);
                ch.second(i, j, k) = s;
            }
    return ch;
}

// First Beltrami operator of two scalars: m^{ij} f_{/i} h_{/j}.
inline double beltrami1(const Mat& m_inv, const Jet& f, const Jet& h) {
    const int n = m_inv.dim();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += m_inv(i, j) * f.first(i) * h.first(j);
    return s;
}

// Gradient of a scalar pushed through an ambient map: m^{ij} f_{/i} w_{/j}.
inline Vec gradient_field(const Mat& m_inv, const Jet& f, const MapJet& w) {
    const int n = m_inv.dim();
    Vec out(w.size());
    for (int i = 0; i < n; ++i) {
        double ci = 0.0;
        for (int j = 0; j < n; ++j) ci += m_inv(j, i) * f.first(j);
        for (std::size_t a = 0; a < w.size(); ++a) out[a] += ci * w[a].first(i);
    }
    return out;
}

// Second Beltrami operator (Laplacian) of a scalar with respect to the metric
// whose value inverse and Christoffel symbols are supplied:
//   m^{ij} (f_{/ij} - {k; ij} f_{/k}).
inline double laplacian(const Mat& m_inv, const Tensor3& gamma2, const Jet& f) {
    const int n = m_inv.dim();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double cov = f.second(i, j);
            for (int k = 0; k < n; ++k) cov -= gamma2(i, j, k) * f.first(k);
            s += m_inv(i, j) * cov;
        }
    return s;
}

// Componentwise Laplacian of an ambient map (each component order >= 2).
inline Vec laplacian_field(const Mat& m_inv, const Tensor3& gamma2, const MapJet& w) {
    Vec out(w.size());
    for (std::size_t a = 0; a < w.size(); ++a) out[a] = laplacian(m_inv, gamma2, w[a]);
    return out;
}

// Pointwise Euclidean data of an immersed hypersurface in R^{n+1}: position,
// tangents, unit normal, the three fundamental forms (as jets and as value
// matrices with guarded inverses), Gauss-Kronecker and mean curvature, and
// the Christoffel symbols of the first two forms.
struct EuclideanFrame {
    int dim;                    // parameter dimension n (ambient dimension n + 1)
    Thresholds thresholds;      // guards this frame was built with
    std::vector<double> point;  // parameter coordinates (set by the description-level overload)

    MapJet x;                        // immersion jets, order 4
    std::vector<MapJet> tangent;     // x_{/i}, order 3
    MapJet normal;                   // unit normal, order 3

    MatT<Jet> g_jets;  // first fundamental form, order 2
    MatT<Jet> h_jets;  // second fundamental form, order 2
    MatT<Jet> e_jets;  // third fundamental form, order 2

    Mat g, h, e;
    Mat g_inv, h_inv, e_inv;

    double det_first;
    double det_second;

    Jet curvature_jet;      // K = det II / det I, order 2
    double curvature;       // K
    double mean_curvature;  // H_I = tr(I^{-1} II) / n

    Christoffels chr_first;
    Christoffels chr_second;
    Tensor3 connection_diff;  // T^k_ij = {k; ij}_I - {k; ij}_II

    Vec position() const { return values(x); }
    Vec tangent_value(int i) const { return values(tangent[static_cast<std::size_t>(i)]); }
    Vec normal_value() const { return values(normal); }
    Vec normal_partial_value(int i) const { return first_partials(normal, i); }
    Vec second_partial_value(int i, int j) const {
        Vec out(x.size());
        for (std::size_t a = 0; a < x.size(); ++a) out[a] = x[a].second(i, j);
        return out;
    }
};

// Ambient vector split into tangential coordinates (against x_{/i}) and a
// component along the unit normal.
struct TangentDecomposition {
    Vec coeffs;          // c^i with v = c^i x_{/i} + normal_part * xi
    double normal_part;  // <v, xi>
};

inline TangentDecomposition decompose_tangent(const EuclideanFrame& f, const Vec& v) {
    const int n = f.dim;
    Vec rhs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rhs[static_cast<std::size_t>(i)] = dot(v, f.tangent_value(i));
    return TangentDecomposition{mat_vec(f.g_inv, rhs), dot(v, f.normal_value())};
}

namespace detail {

// Generalized cross product of the n tangent maps: component a is (-1)^a
// times the minor determinant that drops ambient coordinate a.  The result is
// Euclidean-orthogonal to every tangent and has squared length det I.
inline MapJet cross_product(const std::vector<MapJet>& tangents) {
    const int n = static_cast<int>(tangents.size());
    MapJet out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    MatT<Jet> minor(n, tangents[0][0] * 0.0);
    for (int a = 0; a <= n; ++a) {
        for (int i = 0; i < n; ++i) {
            int cc = 0;
            for (int c = 0; c <= n; ++c) {
                if (c == a) continue;
                minor(i, cc++) = tangents[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            }
        }
        Jet d = det(minor);
        if (a % 2 != 0) d = -d;
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace detail

// Builds the Euclidean frame from immersion jets of order 4.  Throws
// DegeneratePoint / FlatPoint / SingularMetric / IllConditioned (all
// SkipPoint) when the point violates the standing hypotheses det I > 0,
// K != 0, or when a value matrix is numerically unusable.
inline EuclideanFrame frame_at(const MapJet& x_jets, const Thresholds& th = {}) {
    if (x_jets.empty()) throw Error("empty immersion jet map");
    const int n = x_jets[0].vars();
    if (static_cast<int>(x_jets.size()) != n + 1)
        throw Error("immersion jet map must have n+1 components");
    if (x_jets[0].order() < 4) throw Error("frame assembly needs immersion jets of order 4");

    std::vector<MapJet> tangents;
    tangents.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) tangents.push_back(derivative(x_jets, i));

    const Jet zero2 = tangents[0][0].truncated(2) * 0.0;
    MatT<Jet> g_jets(n, zero2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Jet v = dot_jets(truncated(tangents[static_cast<std::size_t>(i)], 2),
                             truncated(tangents[static_cast<std::size_t>(j)], 2));
            g_jets(i, j) = v;
            if (i != j) g_jets(j, i) = v;
        }

    Mat g(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = g_jets(i, j).value();
    const double det_first = det(g);
    if (!(det_first > th.degeneracy)) throw DegeneratePoint(det_first);

    MapJet cross = detail::cross_product(tangents);
    Jet norm2 = dot_jets(cross, cross);  // value equals det I, positive here
    Jet inv_len = pow(norm2, -0.5);
    MapJet normal;
    normal.reserve(cross.size());
    for (const Jet& c : cross) normal.push_back(c * inv_len);

    const MapJet normal2 = truncated(normal, 2);
    MatT<Jet> h_jets(n, zero2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Jet v = dot_jets(normal2, truncated(derivative(tangents[static_cast<std::size_t>(i)], j), 2));
            h_jets(i, j) = v;
            if (i != j) h_jets(j, i) = v;
        }

    Mat h(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) = h_jets(i, j).value();
    const double det_second = det(h);
    const double flat_ratio = std::abs(det_second) / det_first;
    if (!(flat_ratio > th.flat)) throw FlatPoint(flat_ratio);

    Jet curvature_jet = det(h_jets) / det(g_jets);
    const double curvature_value = curvature_jet.value();

    MatT<Jet> e_jets(n, zero2);
    {
        std::vector<MapJet> dnormal;
        dnormal.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) dnormal.push_back(derivative(normal, i));
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet v = dot_jets(dnormal[static_cast<std::size_t>(i)], dnormal[static_cast<std::size_t>(j)]);
                e_jets(i, j) = v;
                if (i != j) e_jets(j, i) = v;
            }
    }
    Mat e(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) e(i, j) = e_jets(i, j).value();

    Mat g_inv = guarded_inverse(g, th.inverse_residual);
    Mat h_inv = guarded_inverse(h, th.inverse_residual);
    Mat e_inv = guarded_inverse(e, th.inverse_residual);

    double mean = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) mean += g_inv(i, j) * h(j, i);
    mean /= n;

    Christoffels chr_first = christoffels(g_jets, g_inv);
    Christoffels chr_second = christoffels(h_jets, h_inv);
    Tensor3 diff(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) diff(i, j, k) = chr_first.second(i, j, k) - chr_second.second(i, j, k);

    return EuclideanFrame{
        .dim = n,
        .thresholds = th,
        .point = {},
        .x = x_jets,
        .tangent = std::move(tangents),
        .normal = std::move(normal),
        .g_jets = std::move(g_jets),
        .h_jets = std::move(h_jets),
        .e_jets = std::move(e_jets),
        .g = std::move(g),
        .h = std::move(h),
        .e = std::move(e),
        .g_inv = std::move(g_inv),
        .h_inv = std::move(h_inv),
        .e_inv = std::move(e_inv),
        .det_first = det_first,
        .det_second = det_second,
        .curvature_jet = std::move(curvature_jet),
        .curvature = curvature_value,
        .mean_curvature = mean,
        .chr_first = std::move(chr_first),
        .chr_second = std::move(chr_second),
        .connection_diff = std::move(diff),
    };
}

inline EuclideanFrame frame_at(const SurfaceSpec& spec, std::span<const double> point, const Thresholds& th = {}) {
    EuclideanFrame f = frame_at(immersion_jets(spec, point, 4), th);
    f.point.assign(point.begin(), point.end());
    return f;
}

} // namespace relnorm
