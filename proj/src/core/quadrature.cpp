#include "quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <numbers>

namespace peridyn {

GaussRule gauss_legendre(int order) {
    if (order < 1 || order > 64) fail(ErrorCode::InvalidArgument, "Gauss order must be in [1, 64]");
    // legendre_p_zeros returns the nonnegative roots in increasing order
    const std::vector<double> pos = boost::math::legendre_p_zeros<double>(order);
    GaussRule g;
    g.x.reserve(static_cast<std::size_t>(order));
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
        if (*it != 0.0) g.x.push_back(-*it);
    }
    for (double x : pos) g.x.push_back(x);
    for (double x : g.x) {
        const double dp = boost::math::legendre_p_prime<double>(order, x);
        g.w.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    }
    return g;
}

void require_unit(const Vec3& n, const char* what) {
    if (!all_finite(n) || std::fabs(norm(n) - 1.0) > 1e-12)
        fail(ErrorCode::InvalidArgument, std::string(what) + " must be a unit vector");
}

double ball_volume(double delta) { return 4.0 * std::numbers::pi * delta * delta * delta / 3.0; }

Mat3 pole_rotation(const Vec3& n) {
    require_unit(n, "normal");
    const double ct = std::clamp(n[2], -1.0, 1.0);
    const double st = std::hypot(n[0], n[1]);
    const double phi = st > 0.0 ? std::atan2(n[1], n[0]) : 0.0;
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    Mat3 r;
    r(0, 0) = cp * ct;
    r(0, 1) = sp * ct;
    r(0, 2) = -st;
    r(1, 0) = -sp;
    r(1, 1) = cp;
    r(1, 2) = 0.0;
    r(2, 0) = cp * st;
    r(2, 1) = sp * st;
    r(2, 2) = ct;
    return r;
}

Frame frame_for(const Vec3& n) {
    const Mat3 r = pole_rotation(n);
    return {{r(0, 0), r(0, 1), r(0, 2)}, {r(1, 0), r(1, 1), r(1, 2)}, {r(2, 0), r(2, 1), r(2, 2)}};
}

std::vector<double> relative_cuts(std::span<const double> cuts, double delta) {
    std::vector<double> rel;
    rel.reserve(cuts.size());
    for (double s : cuts) {
        double t = s / delta;
        if (std::fabs(t) < 1e-12) t = 0.0;
        if (std::fabs(t) < 1.0) rel.push_back(t);
    }
    std::sort(rel.begin(), rel.end());
    rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
    return rel;
}

std::vector<Panel> polar_panels(std::span<const double> rel_cuts) {
    std::vector<double> bp{-1.0};
    bp.insert(bp.end(), rel_cuts.begin(), rel_cuts.end());
    bp.push_back(1.0);
    constexpr double kRatio = 3.0;
    std::vector<Panel> out;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        const double a = bp[i];
        const double b = bp[i + 1];
        // Above a positive cut (or below a negative one) the radial breakpoint
        // s / t sweeps quickly; grade towards the cut.
        if (a > 0.0 && i > 0 && b > kRatio * a) {
            double lo = a;
            while (kRatio * lo < b) {
                out.push_back({lo, kRatio * lo});
                lo *= kRatio;
            }
            out.push_back({lo, b});
        } else if (b < 0.0 && i + 2 < bp.size() && a < kRatio * b) {
            std::vector<Panel> rev;
            double hi = b;
            while (kRatio * hi > a) {
                rev.push_back({kRatio * hi, hi});
                hi *= kRatio;
            }
            rev.push_back({a, hi});
            out.insert(out.end(), rev.rbegin(), rev.rend());
        } else {
            out.push_back({a, b});
        }
    }
    return out;
}

BallQuadrature build_ball_rule(int radial_order, int angular_order) {
    if (radial_order < 1 || radial_order > 64 || angular_order < 1 || angular_order > 64)
        fail(ErrorCode::InvalidArgument, "quadrature orders must be in [1, 64]");
    BallQuadrature q;
    q.radial_order = radial_order;
    q.angular_order = angular_order;
    q.radial = gauss_legendre(radial_order);
    q.polar = gauss_legendre(angular_order);
    const int nphi = 2 * angular_order;
    q.phi_weight = 2.0 * std::numbers::pi / nphi;
    for (int k = 0; k < nphi; ++k) {
        const double phi = q.phi_weight * (k + 0.5);
        q.cos_phi.push_back(std::cos(phi));
        q.sin_phi.push_back(std::sin(phi));
    }
    q.nodes.reserve(static_cast<std::size_t>(radial_order * angular_order * nphi));
    for_each_sliced_node(q, 1.0, Frame{}, {}, [&](const Vec3& z, double w) { q.nodes.push_back({z, w}); });
    return q;
}

HalfBallQuadrature build_half_ball_rule(const BallQuadrature& rule, const Vec3& n) {
    HalfBallQuadrature h;
    h.normal = n;
    h.rotation = pole_rotation(n);
    const Mat3 rt = transpose(h.rotation);
    const double cut = 0.0;
    for_each_sliced_node(rule, 1.0, Frame{}, std::span<const double>(&cut, 1), [&](const Vec3& z, double w) {
        if (z[2] > 0.0) h.nodes.push_back({rt * z, w});
    });
    return h;
}

Tensor4 fourth_moment_numeric(const BallQuadrature& rule, double delta) {
    const Tensor4 m = integrate_ball(rule, delta, Vec3{}, [](const Vec3& z) {
        const double r2 = norm2(z);
        return (1.0 / (r2 * r2)) * outer4(z, z, z, z);
    });
    return (30.0 / ball_volume(delta)) * m;
}

Mat3 second_moment_numeric(const BallQuadrature& rule, double delta) {
    return integrate_ball(rule, delta, Vec3{}, [](const Vec3& z) { return (1.0 / norm2(z)) * outer(z, z); });
}

Tensor3 k_delta_numeric(const BallQuadrature& rule, double delta, const Vec3& n) {
    const Tensor3 k = integrate_half_ball(rule, delta, Vec3{}, n, [](const Vec3& z) {
        const double r2 = norm2(z);
        return (1.0 / (r2 * r2)) * outer3(z, z, z);
    });
    return (1.0 / ball_volume(delta)) * k;
}

Vec3 half_ball_first_moment(const BallQuadrature& rule, double delta, const Vec3& n) {
    const Vec3 m = integrate_half_ball(rule, delta, Vec3{}, n, [](const Vec3& z) { return z / norm2(z); });
    return (3.0 * delta / ball_volume(delta)) * m;
}

}  // namespace peridyn
