#pragma once

// Point evaluation of the nonlocal operators against analytic fields.
//
// Balls that meet the discontinuity plane are integrated with sliced rules
// (see for_each_sliced_node) so that one-sided data is never smeared across
// the plane. Nested operators evaluate the inner integrals
//   g(y) = int_{B(y)} (z - y)/|z - y|^2 . u(z) dz
//   q(y) = int_{B(y)} (z - y)/|z - y|^2 (u(z) . n) dz
// in a single pass per outer node.

#include "fields.hpp"
#include "quadrature.hpp"

#include <functional>

namespace peridyn {

enum class LdForm { Reduced, Full };

struct OperatorConfig {
    double delta = 0.1;
    BallQuadrature rule;
    LdForm ld_form = LdForm::Reduced;
};

/// Throws InvalidArgument for delta <= 0 or orders outside [1, 64].
OperatorConfig make_config(double delta, int radial_order = kDefaultRadialOrder,
                           int angular_order = kDefaultAngularOrder, LdForm form = LdForm::Reduced);

/// 4 pi delta^(5 - r) / (5 - r); throws Domain for r >= 5.
double weight_m(double delta, double r);

using ScalarFn = std::function<double(const Vec3&)>;

Vec3 eval_L0_vec(const OperatorConfig& cfg, const PiecewiseField& field, const Vec3& x);
Mat3 eval_L0_scalar(const OperatorConfig& cfg, const ScalarFn& f, const Vec3& x);

Vec3 eval_Ls(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x);
Vec3 eval_Ld(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x);
Vec3 eval_L(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x);
Vec3 eval_L1(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x);
/// Throws InvalidArgument for non-unit n.
Vec3 eval_L2(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x,
             const Vec3& n);
/// L1 + L_d / 4 + L2 with n the interface normal. Throws Domain unless |d(x)| < delta.
Vec3 eval_L_gamma(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x);
/// L + L_gamma inside the extended interface, L elsewhere.
Vec3 eval_L_star(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field, const Vec3& x);

/// Every piece of L_star at x from one pass of each quadrature.
struct OperatorParts {
    Vec3 ls;
    Vec3 ld;
    Vec3 l1;
    Vec3 l2;
    bool in_extended_interface = false;

    Vec3 l() const { return ls + ld; }
    Vec3 l_gamma() const { return l1 + 0.25 * ld + l2; }
    Vec3 l_star() const { return in_extended_interface ? l() + l_gamma() : l(); }
};
/// L1 and L2 are only evaluated inside the extended interface (zero otherwise).
OperatorParts eval_parts(const OperatorConfig& cfg, const Material& material, const PiecewiseField& field,
                         const Vec3& x);

/// Local limit of delta L at x on the interface. Throws Domain off the interface.
Vec3 natural_limit_formula(const Material& material, const PiecewiseField& field, const Vec3& x);

/// Entry table of the half-ball third-moment limit. Throws InvalidArgument for non-unit n.
Tensor3 k_closed_form(const Vec3& n);
/// (3/32)((A + A^T) n + (tr A - A n . n) n)
Vec3 k_apply(const Mat3& a, const Vec3& n);

}  // namespace peridyn
