#include "fields.hpp"

#include "error.hpp"

#include <cmath>
#include <sstream>

namespace peridyn {

PlanarInterface PlanarInterface::make(const Vec3& point, const Vec3& normal) {
    const double len = norm(normal);
    if (!(len > 0.0) || !std::isfinite(len) || !all_finite(point))
        fail(ErrorCode::InvalidArgument, "interface normal must be finite and nonzero");
    return {point, normal / len};
}

double signed_distance(const PlanarInterface& gamma, const Vec3& x) { return dot(x - gamma.point, gamma.normal); }

SideTag side_of(const PlanarInterface& gamma, const Vec3& x) {
    return signed_distance(gamma, x) >= 0.0 ? SideTag::Plus : SideTag::Minus;
}

TwoPhaseMaterial TwoPhaseMaterial::make(double lambda_plus, double mu_plus, double lambda_minus, double mu_minus,
                                        const PlanarInterface& gamma) {
    if (!(mu_plus > 0.0) || !(mu_minus > 0.0))
        fail(ErrorCode::InvalidArgument, "shear moduli must be positive");
    if (!std::isfinite(lambda_plus) || !std::isfinite(lambda_minus) || !std::isfinite(mu_plus) ||
        !std::isfinite(mu_minus))
        fail(ErrorCode::InvalidArgument, "Lame parameters must be finite");
    return {lambda_plus, lambda_minus, mu_plus, mu_minus, gamma};
}

double SinusoidalScalar::value(const Vec3& x) const {
    if (amplitude == 0.0) return base;
    return base + amplitude * std::sin(dot(wavevector, x) + phase);
}

Vec3 SinusoidalScalar::grad(const Vec3& x) const {
    if (amplitude == 0.0) return {};
    return (amplitude * std::cos(dot(wavevector, x) + phase)) * wavevector;
}

Mat3 SinusoidalScalar::hessian(const Vec3& x) const {
    if (amplitude == 0.0) return {};
    return (-amplitude * std::sin(dot(wavevector, x) + phase)) * outer(wavevector, wavevector);
}

LameValues Material::at(const Vec3& x) const {
    if (const auto* tp = two_phase()) return tp->on_side(side_of(tp->interface, x));
    const auto& sm = std::get<SmoothMaterial>(m_);
    return {sm.lambda.value(x), sm.mu.value(x)};
}

LameJet Material::jet(const Vec3& x, SideTag side) const {
    if (const auto* tp = two_phase()) {
        const LameValues v = tp->on_side(side);
        return {v.lambda, v.mu, {}, {}};
    }
    const auto& sm = std::get<SmoothMaterial>(m_);
    return {sm.lambda.value(x), sm.mu.value(x), sm.lambda.grad(x), sm.mu.grad(x)};
}

std::optional<PlanarInterface> Material::interface() const {
    if (const auto* tp = two_phase()) return tp->interface;
    return std::nullopt;
}

Vec3 ClosedFormField::value(const Vec3& x) const {
    Vec3 u = offset + linear * x;
    const Mat3 xx = outer(x, x);
    for (std::size_t i = 0; i < 3; ++i) {
        double q = 0.0;
        for (std::size_t jk = 0; jk < 9; ++jk) q += quadratic.e[9 * i + jk] * xx.e[jk];
        u[i] += 0.5 * q;
    }
    for (const auto& m : modes) u += std::sin(dot(m.wavevector, x) + m.phase) * m.amplitude;
    return u;
}

Mat3 ClosedFormField::grad(const Vec3& x) const {
    Mat3 g = linear;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) g(i, j) += quadratic(i, j, k) * x[k];
    for (const auto& m : modes) g += std::cos(dot(m.wavevector, x) + m.phase) * outer(m.amplitude, m.wavevector);
    return g;
}

Tensor3 ClosedFormField::hessian(const Vec3& x) const {
    Tensor3 h = quadratic;
    for (const auto& m : modes)
        h += (-std::sin(dot(m.wavevector, x) + m.phase)) * outer3(m.amplitude, m.wavevector, m.wavevector);
    return h;
}

std::optional<PlanarInterface> discontinuity_plane(const Material& material, const PiecewiseField& field) {
    const auto a = material.interface();
    const auto& b = field.interface;
    if (a && b) {
        const bool same_normal = max_abs(a->normal - b->normal) < 1e-14;
        if (!same_normal || std::fabs(signed_distance(*a, b->point)) > 1e-14)
            fail(ErrorCode::InvalidArgument, "material and field interfaces differ");
    }
    return a ? a : b;
}

namespace {

double divergence(const Mat3& g) { return trace(g); }

Vec3 grad_div(const Tensor3& h) {
    // d/dx_i (sum_j du_j/dx_j) = sum_j H_jji
    Vec3 r;
    for (std::size_t i = 0; i < 3; ++i) r[i] = h(0, 0, i) + h(1, 1, i) + h(2, 2, i);
    return r;
}

Vec3 laplacian(const Tensor3& h) {
    Vec3 r;
    for (std::size_t i = 0; i < 3; ++i) r[i] = h(i, 0, 0) + h(i, 1, 1) + h(i, 2, 2);
    return r;
}

struct LocalData {
    LameJet lame;
    Mat3 g;
    Tensor3 h;
};

LocalData local_data(const Material& material, const PiecewiseField& field, const Vec3& x, SideTag side) {
    return {material.jet(x, side), field.grad(x, side), field.hessian(x, side)};
}

}  // namespace

Mat3 stress(const Material& material, const PiecewiseField& field, const Vec3& x, SideTag side) {
    const LameJet l = material.jet(x, side);
    const Mat3 g = field.grad(x, side);
    return l.lambda * divergence(g) * Mat3::identity() + l.mu * (g + transpose(g));
}

Vec3 traction_jump(const Material& material, const PiecewiseField& field, const Vec3& x) {
    const auto gamma = discontinuity_plane(material, field);
    if (!gamma) fail(ErrorCode::Domain, "traction jump requires an interface");
    const double d = signed_distance(*gamma, x);
    if (std::fabs(d) > 1e-12) {
        std::ostringstream os;
        os << "point is not on the interface (signed distance " << d << ")";
        fail(ErrorCode::Domain, os.str());
    }
    const Vec3& n = gamma->normal;
    return stress(material, field, x, SideTag::Plus) * n - stress(material, field, x, SideTag::Minus) * n;
}

Vec3 navier(const Material& material, const PiecewiseField& field, const Vec3& x, SideTag side) {
    const auto [l, g, h] = local_data(material, field, x, side);
    const double div = divergence(g);
    const Vec3 gd = grad_div(h);
    const Vec3 lap = laplacian(h);
    const Vec3 mu_term = (g + transpose(g)) * l.grad_mu;
    return div * l.grad_lambda + (l.lambda + l.mu) * gd + l.mu * lap + mu_term;
}

Vec3 navier_s(const Material& material, const PiecewiseField& field, const Vec3& x, SideTag side) {
    const auto [l, g, h] = local_data(material, field, x, side);
    const double div = divergence(g);
    return div * l.grad_mu + (2.0 * l.mu) * grad_div(h) + l.mu * laplacian(h) + (g + transpose(g)) * l.grad_mu;
}

Vec3 navier_d(const Material& material, const PiecewiseField& field, const Vec3& x, SideTag side) {
    const auto [l, g, h] = local_data(material, field, x, side);
    const double div = divergence(g);
    return div * (l.grad_lambda - l.grad_mu) + (l.lambda - l.mu) * grad_div(h);
}

const std::vector<std::string>& manufactured_names() {
    static const std::vector<std::string> names{"constant",
                                                "linear",
                                                "quadratic",
                                                "trig_smooth",
                                                "patch_jump_zero_traction",
                                                "gradient_jump",
                                                "smooth_material_trig"};
    return names;
}

namespace {

ClosedFormField trig_field() {
    ClosedFormField f;
    f.modes = {SineMode{Vec3::unit(0), Vec3::unit(1), 0.0}, SineMode{Vec3::unit(1), Vec3::unit(2), 0.0},
               SineMode{Vec3::unit(2), Vec3::unit(0), 0.0}};
    return f;
}

// u = slope * d(x) * n with d the signed distance to gamma.
ClosedFormField normal_ramp(const PlanarInterface& gamma, double slope) {
    ClosedFormField f;
    const Vec3& n = gamma.normal;
    f.linear = slope * outer(n, n);
    f.offset = (-slope * dot(n, gamma.point)) * n;
    return f;
}

}  // namespace

ManufacturedCase make_manufactured(std::string_view name, const PlanarInterface& gamma) {
    const Material unit = Material::homogeneous(1.0, 1.0);
    if (name == "constant") {
        ClosedFormField f;
        f.offset = {1.0, -2.0, 0.5};
        return {std::string(name), PiecewiseField::smooth(f), unit};
    }
    if (name == "linear") {
        ClosedFormField f;
        f.offset = {0.25, 0.0, -0.5};
        f.linear.e = {0.3, -0.2, 0.5, 0.1, 0.4, -0.3, 0.7, 0.2, -0.6};
        return {std::string(name), PiecewiseField::smooth(f), unit};
    }
    if (name == "quadratic") {
        // u = (x1^2 + x2 x3, x2^2 - x1 x3 + x1/2, x3^2/2 + 2 x1 x2)
        ClosedFormField f;
        f.linear(1, 0) = 0.5;
        f.quadratic(0, 0, 0) = 2.0;
        f.quadratic(0, 1, 2) = f.quadratic(0, 2, 1) = 1.0;
        f.quadratic(1, 1, 1) = 2.0;
        f.quadratic(1, 0, 2) = f.quadratic(1, 2, 0) = -1.0;
        f.quadratic(2, 2, 2) = 1.0;
        f.quadratic(2, 0, 1) = f.quadratic(2, 1, 0) = 2.0;
        return {std::string(name), PiecewiseField::smooth(f), unit};
    }
    if (name == "trig_smooth") return {std::string(name), PiecewiseField::smooth(trig_field()), unit};
    if (name == "patch_jump_zero_traction") {
        // grad u jumps from n(x)n to 2 n(x)n; with (1,1 | 2,2) the normal traction is 6 n on both sides.
        PiecewiseField f{normal_ramp(gamma, 2.0), normal_ramp(gamma, 1.0), gamma};
        return {std::string(name), f, Material(TwoPhaseMaterial::make(1.0, 1.0, 2.0, 2.0, gamma))};
    }
    if (name == "gradient_jump") {
        const ClosedFormField ramp = normal_ramp(gamma, 1.0);
        PiecewiseField f{ramp, ramp, gamma};
        return {std::string(name), f, Material(TwoPhaseMaterial::make(1.0, 1.0, 2.0, 2.0, gamma))};
    }
    if (name == "smooth_material_trig") {
        SmoothMaterial m{SinusoidalScalar{3.0, 0.5, Vec3::unit(0), 0.0}, SinusoidalScalar{2.0, 0.5, Vec3::unit(0), 0.0}};
        return {std::string(name), PiecewiseField::smooth(trig_field()), Material(m)};
    }
    fail(ErrorCode::InvalidArgument, "unknown manufactured solution '" + std::string(name) + "'");
}

}  // namespace peridyn
