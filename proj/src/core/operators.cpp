#include "operators.hpp"

#include <array>
#include <numbers>

namespace peridyn {

OperatorConfig make_config(double delta, int radial_order, int angular_order, LdForm form) {
    if (!(delta > 0.0) || !std::isfinite(delta)) fail(ErrorCode::InvalidArgument, "horizon must be positive");
    return {delta, build_ball_rule(radial_order, angular_order), form};
}

double weight_m(double delta, double r) {
    if (!(delta > 0.0)) fail(ErrorCode::InvalidArgument, "horizon must be positive");
    if (!(r < 5.0)) fail(ErrorCode::Domain, "weight exponent must be below 5");
    return 4.0 * std::numbers::pi * std::pow(delta, 5.0 - r) / (5.0 - r);
}

namespace {

struct Ctx {
    const OperatorConfig& cfg;
    const Material& material;
    const PiecewiseField& field;
    std::optional<PlanarInterface> plane;
    Frame frame;
    double vol;

    Ctx(const OperatorConfig& c, const Material& m, const PiecewiseField& f)
        : cfg(c), material(m), field(f), plane(discontinuity_plane(m, f)), vol(ball_volume(c.delta)) {
        if (!(c.delta > 0.0)) fail(ErrorCode::InvalidArgument, "horizon must be positive");
        if (plane) frame = frame_for(plane->normal);
    }

    SideTag side(const Vec3& y) const { return plane ? side_of(*plane, y) : SideTag::Plus; }
    double dist(const Vec3& y) const { return plane ? signed_distance(*plane, y) : 0.0; }

    LameValues lame(const Vec3& y, SideTag s) const {
        if (const auto* tp = material.two_phase()) return tp->on_side(s);
        const auto* sm = material.smooth();
        return {sm->lambda.value(y), sm->mu.value(y)};
    }

    Vec3 u(const Vec3& y, SideTag s) const { return field.value(y, s); }

    // Visits (offset, weight) over B_delta(center) with the given plane offsets as breakpoints.
    template <class Visit>
    void ball(const Vec3& center, std::span<const double> cuts, Visit&& visit) const {
        (void)center;
        if (plane) {
            for_each_sliced_node(cfg.rule, cfg.delta, frame, cuts, visit);
            return;
        }
        const double d = cfg.delta;
        const double s = d * d * d;
        for (const auto& q : cfg.rule.nodes) visit(d * q.z, s * q.w);
    }
};

struct SinglePass {
    Vec3 s0;  // sum w k
    Vec3 s1;  // sum w mu(y) k
    double mu_x = 0.0;
};

// k = z (z . (u(x + z) - u(x))) / |z|^4
SinglePass single_pass(const Ctx& c, const Vec3& x) {
    const SideTag sx = c.side(x);
    const Vec3 ux = c.u(x, sx);
    const double cut = -c.dist(x);
    SinglePass p;
    p.mu_x = c.lame(x, sx).mu;
    c.ball(x, std::span<const double>(&cut, 1), [&](const Vec3& z, double w) {
        const Vec3 y = x + z;
        const SideTag sy = c.side(y);
        const double r2 = norm2(z);
        const Vec3 k = (dot(z, c.u(y, sy) - ux) / (r2 * r2)) * z;
        p.s0 += w * k;
        p.s1 += (w * c.lame(y, sy).mu) * k;
    });
    require_finite(p.s0);
    require_finite(p.s1);
    return p;
}

struct NestedPass {
    Vec3 ld;          // (9/|B|^2) int c(y) a(y) g(y) dy (plus the first term for the full form)
    double l2 = 0.0;  // (9/|B|^2) int mu(y) a(y) . q(y) dy
};

NestedPass nested_pass(const Ctx& c, const Vec3& x, bool want_ld, const Vec3* n) {
    const double d = c.cfg.delta;
    const double dx = c.dist(x);
    const std::array<double, 3> outer_cuts{-dx, d - dx, -d - dx};
    const bool full = c.cfg.ld_form == LdForm::Full;

    Vec3 sum_ld;
    double sum_l2 = 0.0;
    Vec3 a_total;      // full form: int_{B(x)} a dy
    double g_x = 0.0;  // full form: int_{B(x)} b_x . (u(z) - u(x)) dz
    const SideTag sx = c.side(x);
    const Vec3 ux = c.u(x, sx);

    c.ball(x, outer_cuts, [&](const Vec3& h, double wy) {
        const Vec3 y = x + h;
        const SideTag sy = c.side(y);
        const LameValues ly = c.lame(y, sy);
        const Vec3 a = h / norm2(h);
        const double cy = ly.lambda - ly.mu;
        if (full && want_ld) {
            a_total += wy * a;
            g_x += wy * dot(a, c.u(y, sy) - ux);
        }
        const bool need_g = want_ld && cy != 0.0;
        if (!need_g && n == nullptr) return;

        const double cut = -c.dist(y);
        double g = 0.0;
        Vec3 gb;
        Vec3 q;
        c.ball(y, std::span<const double>(&cut, 1), [&](const Vec3& wv, double wz) {
            const Vec3 z = y + wv;
            const Vec3 uz = c.u(z, c.side(z));
            const Vec3 b = wv / norm2(wv);
            if (need_g) {
                g += wz * dot(b, uz);
                if (full) gb += wz * b;
            }
            if (n != nullptr) q += (wz * dot(uz, *n)) * b;
        });
        if (need_g) {
            if (full) g -= dot(gb, c.u(y, sy));
            sum_ld += (wy * cy * g) * a;
        }
        if (n != nullptr) sum_l2 += wy * ly.mu * dot(a, q);
    });

    const double scale = 9.0 / (c.vol * c.vol);
    NestedPass out;
    if (want_ld) {
        Vec3 ld = sum_ld;
        if (full) ld += (c.lame(x, sx).lambda - c.lame(x, sx).mu) * g_x * a_total;
        out.ld = scale * ld;
        require_finite(out.ld);
    }
    out.l2 = scale * sum_l2;
    if (!std::isfinite(out.l2)) fail(ErrorCode::NonFinite, "integrand produced a non-finite value");
    return out;
}

Vec3 ls_from(const Ctx& c, const SinglePass& p) { return (15.0 / c.vol) * (p.mu_x * p.s0 + p.s1); }
Vec3 l1_from(const Ctx& c, const SinglePass& p) { return (-15.0 / c.vol) * (p.mu_x * p.s0); }
Vec3 l2_from(double l2, const Vec3& n) { return (1.25 * l2) * n; }

const PlanarInterface& require_plane(const Ctx& c) {
    if (!c.plane) fail(ErrorCode::Domain, "operator requires an interface");
    return *c.plane;
}

}  // namespace

Vec3 eval_L0_vec(const OperatorConfig& cfg, const PiecewiseField& field, const Vec3& x) {
    const Material unit = Material::homogeneous(1.0, 1.0);
    const Ctx c(cfg, unit, field);
    const SinglePass p = single_pass(c, x);
    return (30.0 / c.vol) * p.s0;
}

Mat3 eval_L0_scalar(const OperatorConfig& cfg, const ScalarFn& f, const Vec3& x) {
    const double fx = f(x);
    const Mat3 m = integrate_ball(cfg.rule, cfg.delta, Vec3{}, [&](const Vec3& z) {
        const double r2 = norm2(z);
        return ((f(x + z) - fx) / (r2 * r2)) * outer(z, z);
    });
    return (30.0 / ball_volume(cfg.delta)) * m;
}

Vec3 eval_Ls(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x) {
    const Ctx c(cfg, material, field);
    return ls_from(c, single_pass(c, x));
}

Vec3 eval_Ld(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x) {
    const Ctx c(cfg, material, field);
    return nested_pass(c, x, true, nullptr).ld;
}

Vec3 eval_L(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x) {
    const Ctx c(cfg, material, field);
    return ls_from(c, single_pass(c, x)) + nested_pass(c, x, true, nullptr).ld;
}

Vec3 eval_L1(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x) {
    const Ctx c(cfg, material, field);
    return l1_from(c, single_pass(c, x));
}

Vec3 eval_L2(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x,
             const Vec3& n) {
    require_unit(n, "normal");
    const Ctx c(cfg, material, field);
    return l2_from(nested_pass(c, x, false, &n).l2, n);
}

OperatorParts eval_parts(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field,
                         const Vec3& x) {
    const Ctx c(cfg, material, field);
    OperatorParts parts;
    parts.in_extended_interface = c.plane && std::fabs(c.dist(x)) < cfg.delta;
    const SinglePass p = single_pass(c, x);
    parts.ls = ls_from(c, p);
    if (parts.in_extended_interface) {
        const Vec3 n = c.plane->normal;
        const NestedPass np = nested_pass(c, x, true, &n);
        parts.ld = np.ld;
        parts.l1 = l1_from(c, p);
        parts.l2 = l2_from(np.l2, n);
    } else {
        parts.ld = nested_pass(c, x, true, nullptr).ld;
    }
    return parts;
}

Vec3 eval_L_gamma(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x) {
    const Ctx c(cfg, material, field);
    const PlanarInterface& plane = require_plane(c);
    if (!(std::fabs(signed_distance(plane, x)) < cfg.delta))
        fail(ErrorCode::Domain, "point lies outside the extended interface");
    return eval_parts(cfg, material, field, x).l_gamma();
}

Vec3 eval_L_star(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x) {
    return eval_parts(cfg, material, field, x).l_star();
}

Vec3 natural_limit_formula(const Material& material, const PiecewiseField& field, const Vec3& x) {
    const auto plane = discontinuity_plane(material, field);
    if (!plane) fail(ErrorCode::Domain, "natural limit requires an interface");
    if (std::fabs(signed_distance(*plane, x)) > 1e-12) fail(ErrorCode::Domain, "point is not on the interface");
    const Vec3& n = plane->normal;
    const LameJet jp = material.jet(x, SideTag::Plus);
    const LameJet jm = material.jet(x, SideTag::Minus);
    const Mat3 gp = field.grad(x, SideTag::Plus);
    const Mat3 gm = field.grad(x, SideTag::Minus);
    const double wp = jp.mu + jp.mu;
    const double wm = jp.mu + jm.mu;
    const double dp = trace(gp);
    const double dm = trace(gm);
    const Vec3 t1 = wp * ((gp + transpose(gp)) * n) - wm * ((gm + transpose(gm)) * n);
    const Vec3 t2 = (wp * dp - wm * dm) * n;
    const Vec3 t3 = (wp * dot(gp * n, n) - wm * dot(gm * n, n)) * n;
    const Vec3 t4 = ((jp.lambda - jp.mu) * dp - (jm.lambda - jm.mu) * dm) * n;
    return (45.0 / 32.0) * (t1 + t2 - t3 + 0.8 * t4);
}

Tensor3 k_closed_form(const Vec3& n) {
    require_unit(n, "normal");
    const double ct = std::clamp(n[2], -1.0, 1.0);
    const double st = std::hypot(n[0], n[1]);
    const double phi = st > 0.0 ? std::atan2(n[1], n[0]) : 0.0;
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    const double c = 3.0 / 32.0;
    Tensor3 k;
    auto set_sym = [&k](std::size_t i, std::size_t j, std::size_t l, double v) {
        k(i, j, l) = k(i, l, j) = k(j, i, l) = k(j, l, i) = k(l, i, j) = k(l, j, i) = v;
    };
    set_sym(0, 0, 0, c * cp * st * (3.0 - cp * cp * st * st));
    set_sym(0, 0, 1, c * sp * st * (1.0 - cp * cp * st * st));
    set_sym(0, 0, 2, c * ct * (1.0 - cp * cp * st * st));
    set_sym(0, 1, 1, c * cp * st * (1.0 - sp * sp * st * st));
    set_sym(0, 1, 2, -c * sp * cp * st * st * ct);
    set_sym(0, 2, 2, c * cp * st * st * st);
    set_sym(1, 1, 2, c * ct * (1.0 - sp * sp * st * st));
    set_sym(1, 2, 2, c * sp * st * st * st);
    set_sym(1, 1, 1, c * sp * st * (3.0 - sp * sp * st * st));
    set_sym(2, 2, 2, c * ct * (3.0 - ct * ct));
    return k;
}

Vec3 k_apply(const Mat3& a, const Vec3& n) {
    require_unit(n, "normal");
    return (3.0 / 32.0) * ((a + transpose(a)) * n + (trace(a) - dot(a * n, n)) * n);
}

}  // namespace peridyn
