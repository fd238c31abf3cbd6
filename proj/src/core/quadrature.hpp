#pragma once

// Product Gauss rules over balls and half-balls.
//
// Nodes live in spherical coordinates about a polar axis: Gauss-Legendre in the
// radius r on (0, delta], Gauss-Legendre in t = cos(theta), uniform trapezoid in
// the azimuth. The r^2 Jacobian is folded into the weights, so kernels up to
// |z|^-2 leave a polynomial radial integrand.

#include "error.hpp"
#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <type_traits>
#include <vector>

namespace peridyn {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

GaussRule gauss_legendre(int order);

struct QuadNode {
    Vec3 z;
    double w = 0.0;
};

/// Orthonormal frame whose third vector is the polar axis.
struct Frame {
    Vec3 e1{1.0, 0.0, 0.0};
    Vec3 e2{0.0, 1.0, 0.0};
    Vec3 n{0.0, 0.0, 1.0};
};

/// Rows of the rotation R with R n = e3; phi = 0 when sin(theta) = 0.
Mat3 pole_rotation(const Vec3& n);
/// Frame built from the rows of pole_rotation(n).
Frame frame_for(const Vec3& n);

struct BallQuadrature {
    int radial_order = 0;
    int angular_order = 0;
    /// Unit-ball nodes; weights sum to 4 pi / 3.
    std::vector<QuadNode> nodes;

    GaussRule radial;
    GaussRule polar;
    std::vector<double> cos_phi;
    std::vector<double> sin_phi;
    double phi_weight = 0.0;
};

inline constexpr int kDefaultRadialOrder = 8;
inline constexpr int kDefaultAngularOrder = 12;

/// Throws InvalidArgument unless both orders are in [1, 64].
BallQuadrature build_ball_rule(int radial_order = kDefaultRadialOrder, int angular_order = kDefaultAngularOrder);

struct HalfBallQuadrature {
    Vec3 normal;
    Mat3 rotation;
    /// Unit half-ball nodes on the side z . normal > 0; weights sum to 2 pi / 3.
    std::vector<QuadNode> nodes;
};

/// Reference half-ball about e3 rotated by R^T. Throws InvalidArgument for non-unit n.
HalfBallQuadrature build_half_ball_rule(const BallQuadrature& rule, const Vec3& n);

void require_unit(const Vec3& n, const char* what);

double ball_volume(double delta);

inline bool finite_value(double v) { return std::isfinite(v); }
inline bool finite_value(const Vec3& v) { return all_finite(v); }
template <class T>
bool finite_value(const T& v) {
    for (double e : v.e) {
        if (!std::isfinite(e)) return false;
    }
    return true;
}

template <class T>
void require_finite(const T& v) {
    if (!finite_value(v)) fail(ErrorCode::NonFinite, "integrand produced a non-finite value");
}

/// sum_q w_q delta^3 f(center + delta z_q)
template <class F>
auto integrate_ball(const BallQuadrature& rule, double delta, const Vec3& center, F&& f) {
    using T = std::decay_t<decltype(f(center))>;
    if (!(delta > 0.0)) fail(ErrorCode::InvalidArgument, "horizon must be positive");
    T acc{};
    for (const auto& q : rule.nodes) acc += q.w * f(center + delta * q.z);
    acc *= delta * delta * delta;
    require_finite(acc);
    return acc;
}

/// Integral over {y in B_delta(center) : (y - center) . n > 0}.
template <class F>
auto integrate_half_ball(const BallQuadrature& rule, double delta, const Vec3& center, const Vec3& n, F&& f) {
    using T = std::decay_t<decltype(f(center))>;
    if (!(delta > 0.0)) fail(ErrorCode::InvalidArgument, "horizon must be positive");
    const HalfBallQuadrature half = build_half_ball_rule(rule, n);
    T acc{};
    for (const auto& q : half.nodes) acc += q.w * f(center + delta * q.z);
    acc *= delta * delta * delta;
    require_finite(acc);
    return acc;
}

/// Visits (offset, weight) pairs of a rule for B_delta(0) that treats every
/// plane {z . frame.n = s} for s in `cuts` as a breakpoint of the integrand.
/// Offsets are physical (already scaled by delta). Polar panels whose
/// breakpoint is close to the equator are graded geometrically.
template <class Visit>
void for_each_sliced_node(const BallQuadrature& rule, double delta, const Frame& frame, std::span<const double> cuts,
                          Visit&& visit);

/// Offsets of planes that intersect the open ball, relative to the center, in units of delta.
/// Values within 1e-12 of zero are snapped to zero; duplicates are removed.
std::vector<double> relative_cuts(std::span<const double> cuts, double delta);

/// Panels in t = cos(theta) for the given relative cuts.
struct Panel {
    double a = 0.0;
    double b = 0.0;
};
std::vector<Panel> polar_panels(std::span<const double> rel_cuts);

/// (30 / |B_delta|) int z_i z_j z_k z_l / |z|^4 dz
Tensor4 fourth_moment_numeric(const BallQuadrature& rule, double delta);
/// int z (x) z / |z|^2 dz
Mat3 second_moment_numeric(const BallQuadrature& rule, double delta);
/// (1 / |B_delta|) int_{z . n > 0} z (x) z (x) z / |z|^4 dz
Tensor3 k_delta_numeric(const BallQuadrature& rule, double delta, const Vec3& n);
/// (3 delta / |B_delta|) int_{z . n > 0} z / |z|^2 dz
Vec3 half_ball_first_moment(const BallQuadrature& rule, double delta, const Vec3& n);

// ---------------------------------------------------------------------------

template <class Visit>
void for_each_sliced_node(const BallQuadrature& rule, double delta, const Frame& frame, std::span<const double> cuts,
                          Visit&& visit) {
    const std::vector<double> rel = relative_cuts(cuts, delta);
    const std::vector<Panel> panels = polar_panels(rel);
    const std::size_t nphi = rule.cos_phi.size();
    double rbreaks[8];
    for (const Panel& p : panels) {
        const double tc = 0.5 * (p.a + p.b);
        const double th = 0.5 * (p.b - p.a);
        for (std::size_t it = 0; it < rule.polar.x.size(); ++it) {
            const double t = tc + th * rule.polar.x[it];
            const double wt = th * rule.polar.w[it];
            const double st = std::sqrt(std::fmax(0.0, 1.0 - t * t));
            // radial breakpoints s / t inside (0, 1)
            std::size_t nb = 0;
            rbreaks[nb++] = 0.0;
            for (double s : rel) {
                if (s == 0.0 || s * t <= 0.0) continue;
                const double r = s / t;
                if (r < 1.0 && nb < 7) rbreaks[nb++] = r;
            }
            rbreaks[nb++] = 1.0;
            std::sort(rbreaks, rbreaks + nb);
            for (std::size_t ib = 0; ib + 1 < nb; ++ib) {
                const double rc = 0.5 * (rbreaks[ib] + rbreaks[ib + 1]) * delta;
                const double rh = 0.5 * (rbreaks[ib + 1] - rbreaks[ib]) * delta;
                if (!(rh > 0.0)) continue;
                for (std::size_t ir = 0; ir < rule.radial.x.size(); ++ir) {
                    const double r = rc + rh * rule.radial.x[ir];
                    const double w = wt * rh * rule.radial.w[ir] * r * r * rule.phi_weight;
                    const Vec3 axial = (r * t) * frame.n;
                    const double rs = r * st;
                    for (std::size_t ip = 0; ip < nphi; ++ip) {
                        const Vec3 z = axial + (rs * rule.cos_phi[ip]) * frame.e1 + (rs * rule.sin_phi[ip]) * frame.e2;
                        visit(z, w);
                    }
                }
            }
        }
    }
}

}  // namespace peridyn
