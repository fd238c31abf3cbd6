#pragma once

// Analytic materials and manufactured displacement fields.
//
// Everything here is closed form: fields carry hand-differentiated gradients
// and Hessians so that the local elasticity operators are evaluated exactly.

#include "tensor.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace peridyn {

/// Plane through `point` with unit `normal` pointing from the minus side into the plus side.
struct PlanarInterface {
    Vec3 point{};
    Vec3 normal{0.0, 0.0, 1.0};

    /// Normalizes `normal`; throws InvalidArgument for a zero or non-finite normal.
    static PlanarInterface make(const Vec3& point, const Vec3& normal);

    friend bool operator==(const PlanarInterface&, const PlanarInterface&) = default;
};

/// (x - point) . normal; positive in the plus phase.
double signed_distance(const PlanarInterface& gamma, const Vec3& x);

enum class SideTag { Plus, Minus };

/// Points on the interface belong to the plus side.
SideTag side_of(const PlanarInterface& gamma, const Vec3& x);

struct LameValues {
    double lambda = 0.0;
    double mu = 0.0;
};

struct TwoPhaseMaterial {
    double lambda_plus = 1.0;
    double lambda_minus = 1.0;
    double mu_plus = 1.0;
    double mu_minus = 1.0;
    PlanarInterface interface{};

    /// Validates positive shear moduli.
    static TwoPhaseMaterial make(double lambda_plus, double mu_plus, double lambda_minus, double mu_minus,
                                 const PlanarInterface& gamma);

    LameValues on_side(SideTag side) const {
        return side == SideTag::Plus ? LameValues{lambda_plus, mu_plus} : LameValues{lambda_minus, mu_minus};
    }
};

/// base + amplitude * sin(wavevector . x + phase)
struct SinusoidalScalar {
    double base = 0.0;
    double amplitude = 0.0;
    Vec3 wavevector{};
    double phase = 0.0;

    static SinusoidalScalar constant(double v) { return {v, 0.0, {}, 0.0}; }

    double value(const Vec3& x) const;
    Vec3 grad(const Vec3& x) const;
    Mat3 hessian(const Vec3& x) const;
};

struct SmoothMaterial {
    SinusoidalScalar lambda;
    SinusoidalScalar mu;
};

/// Lame parameters and their gradients at a point (gradients vanish inside a phase).
struct LameJet {
    double lambda = 0.0;
    double mu = 0.0;
    Vec3 grad_lambda{};
    Vec3 grad_mu{};
};

class Material {
public:
    Material(TwoPhaseMaterial m) : m_(m) {}
    Material(SmoothMaterial m) : m_(m) {}

    static Material homogeneous(double lambda, double mu) {
        return Material(SmoothMaterial{SinusoidalScalar::constant(lambda), SinusoidalScalar::constant(mu)});
    }

    /// lambda(x), mu(x) with the interface assigned to the plus phase.
    LameValues at(const Vec3& x) const;
    /// One-sided values; the side tag is ignored for smooth materials.
    LameJet jet(const Vec3& x, SideTag side) const;

    /// Interface of a two-phase material, empty for smooth ones.
    std::optional<PlanarInterface> interface() const;

    bool is_two_phase() const { return std::holds_alternative<TwoPhaseMaterial>(m_); }
    const TwoPhaseMaterial* two_phase() const { return std::get_if<TwoPhaseMaterial>(&m_); }
    const SmoothMaterial* smooth() const { return std::get_if<SmoothMaterial>(&m_); }

private:
    std::variant<TwoPhaseMaterial, SmoothMaterial> m_;
};

/// u(x) = amplitude * sin(wavevector . x + phase)
struct SineMode {
    Vec3 amplitude{};
    Vec3 wavevector{};
    double phase = 0.0;
};

/// Closed-form smooth vector field: offset + linear x + (1/2) quadratic(x, x) + sum of sine modes.
/// `quadratic(i,j,k)` must be symmetric in (j,k); it is then exactly the Hessian of the polynomial part.
struct ClosedFormField {
    Vec3 offset{};
    Mat3 linear{};
    Tensor3 quadratic{};
    std::vector<SineMode> modes;

    Vec3 value(const Vec3& x) const;
    Mat3 grad(const Vec3& x) const;
    Tensor3 hessian(const Vec3& x) const;
};

/// Continuous, piecewise-smooth field. Without an interface only `plus` is used.
struct PiecewiseField {
    ClosedFormField plus;
    ClosedFormField minus;
    std::optional<PlanarInterface> interface;

    static PiecewiseField smooth(ClosedFormField f) { return {f, f, std::nullopt}; }

    SideTag side(const Vec3& x) const { return interface ? side_of(*interface, x) : SideTag::Plus; }
    const ClosedFormField& on(SideTag s) const { return s == SideTag::Plus ? plus : minus; }

    Vec3 value(const Vec3& x) const { return on(side(x)).value(x); }
    Vec3 value(const Vec3& x, SideTag s) const { return on(s).value(x); }
    Mat3 grad(const Vec3& x, SideTag s) const { return on(s).grad(x); }
    Tensor3 hessian(const Vec3& x, SideTag s) const { return on(s).hessian(x); }
};

/// The single plane across which material or field may be discontinuous.
/// Throws InvalidArgument when material and field carry different planes.
std::optional<PlanarInterface> discontinuity_plane(const Material& material, const PiecewiseField& field);

/// lambda (div u) I + mu (grad u + grad u^T) with the requested side's data.
Mat3 stress(const Material& material, const PiecewiseField& field, const Vec3& x, SideTag side);

/// sigma(x+) n - sigma(x-) n; throws Domain unless x lies on the interface (within 1e-12).
Vec3 traction_jump(const Material& material, const PiecewiseField& field, const Vec3& x);

/// grad(lambda div u) + div(mu (grad u + grad u^T)), evaluated directly.
Vec3 navier(const Material& material, const PiecewiseField& field, const Vec3& x, SideTag side);
/// grad(mu div u) + div(mu (grad u + grad u^T))
Vec3 navier_s(const Material& material, const PiecewiseField& field, const Vec3& x, SideTag side);
/// grad((lambda - mu) div u)
Vec3 navier_d(const Material& material, const PiecewiseField& field, const Vec3& x, SideTag side);

struct ManufacturedCase {
    std::string name;
    PiecewiseField field;
    Material material;
};

/// Registered names, in registry order.
const std::vector<std::string>& manufactured_names();

/// Builds a named field/material pair. Interface-bearing cases place their
/// interface at `gamma` (default: the plane x3 = 0 with normal e3).
/// Throws InvalidArgument for an unknown name.
ManufacturedCase make_manufactured(std::string_view name, const PlanarInterface& gamma = {});

}  // namespace peridyn
