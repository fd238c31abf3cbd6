#pragma once

// Test-side oracles and helpers. Nothing here calls the code under test
// except to read inputs.

#include "error.hpp"
#include "fields.hpp"
#include "tensor.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using peridyn::Mat3;
using peridyn::Tensor3;
using peridyn::Tensor4;
using peridyn::Vec3;

inline constexpr double pi = std::numbers::pi;

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(987654321ULL);
    return g;
}

inline double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Vec3 random_vec(double scale = 1.0) { return {scale * uniform(), scale * uniform(), scale * uniform()}; }

inline Vec3 random_unit() {
    for (;;) {
        const Vec3 v = random_vec();
        const double r = peridyn::norm(v);
        if (r > 0.1 && r <= 1.0) return (1.0 / r) * v;
    }
}

inline Mat3 random_mat() {
    Mat3 a;
    for (double& e : a.e) e = uniform();
    return a;
}

inline Tensor3 random_t3() {
    Tensor3 t;
    for (double& e : t.e) e = uniform();
    return t;
}

inline Tensor4 random_t4() {
    Tensor4 t;
    for (double& e : t.e) e = uniform();
    return t;
}

/// Rotation about a random axis by a random angle (Rodrigues).
inline Mat3 random_rotation() {
    const Vec3 k = random_unit();
    const double a = uniform(0.0, 2.0 * pi);
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) r(i, j) = (i == j ? c : 0.0) + (1.0 - c) * k[i] * k[j];
    r(0, 1) -= s * k[2];
    r(0, 2) += s * k[1];
    r(1, 0) += s * k[2];
    r(1, 2) -= s * k[0];
    r(2, 0) -= s * k[1];
    r(2, 1) += s * k[0];
    return r;
}

/// (30/|B|) int z_i z_j z_k z_l / |z|^4: 6 when all indices agree, 2 for two distinct pairs, 0 otherwise.
inline Tensor4 fourth_moment_table() {
    Tensor4 t;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k)
                for (std::size_t l = 0; l < 3; ++l) {
                    double v = 0.0;
                    if (i == j && j == k && k == l) v = 6.0;
                    else if ((i == j && k == l) || (i == k && j == l) || (i == l && j == k)) v = 2.0;
                    t(i, j, k, l) = v;
                }
    return t;
}

/// Navier operator as the divergence of the stress, by central differences of
/// sigma = lambda tr(G) I + mu (G + G^T) built from field.grad and material values.
inline Vec3 navier_fd(const peridyn::Material& m, const peridyn::PiecewiseField& f, const Vec3& x,
                      peridyn::SideTag side, double h = 1e-4) {
    auto sigma = [&](const Vec3& p) {
        const Mat3 g = f.grad(p, side);
        const auto lm = m.jet(p, side);
        Mat3 s;
        const double tr = g(0, 0) + g(1, 1) + g(2, 2);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                s(i, j) = (i == j ? lm.lambda * tr : 0.0) + lm.mu * (g(i, j) + g(j, i));
        return s;
    };
    Vec3 out;
    for (std::size_t k = 0; k < 3; ++k) {
        const Vec3 e = h * Vec3::unit(k);
        const Mat3 sp = sigma(x + e), sm = sigma(x - e);
        for (std::size_t i = 0; i < 3; ++i) out[i] += (sp(i, k) - sm(i, k)) / (2.0 * h);
    }
    return out;
}

/// delta * n.(L_2 u)(x) at a point x of a planar interface for u . n = s+ t (t >= 0), s- t (t < 0),
/// t the signed distance, and shear moduli mu+-. Uses the reduction of the ball integrals for
/// fields that depend on t only:
///   int_{B(y)} (z-y)_n/|z-y|^2 f(z) dz = pi int_{-d}^{d} f(t+s) s ln(d^2/s^2) ds.
inline double planar_l2_limit(double mu_plus, double mu_minus, double s_plus, double s_minus, double delta) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double t) { return t >= 0.0 ? s_plus * t : s_minus * t; };
    auto kernel = [&](double s) { return s == 0.0 ? 0.0 : 2.0 * s * std::log(delta / std::fabs(s)); };
    auto q = [&](double t) {
        auto g = [&](double s) { return f(t + s) * kernel(s); };
        double acc = 0.0;
        std::vector<double> pts{-delta, 0.0, delta};
        if (-t > -delta && -t < delta && t != 0.0) pts.push_back(-t);
        std::sort(pts.begin(), pts.end());
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) acc += ts.integrate(g, pts[i], pts[i + 1]);
        return pi * acc;
    };
    auto outer = [&](double t) { return (t >= 0.0 ? mu_plus : mu_minus) * pi * kernel(t) * q(t); };
    const double integral = ts.integrate(outer, -delta, 0.0) + ts.integrate(outer, 0.0, delta);
    const double b = 4.0 * pi * delta * delta * delta / 3.0;
    return delta * 1.25 * 9.0 / (b * b) * integral;
}

}  // namespace oracle
