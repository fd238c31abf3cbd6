#include "operators.hpp"
#include "oracles.hpp"
#include "solver.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace peridyn;

namespace {

const PlanarInterface kMid = PlanarInterface::make(Vec3{0.5, 0.5, 0.5}, Vec3{0.0, 0.0, 1.0});

ManufacturedCase on_mid(const char* name) { return make_manufactured(name, kMid); }

std::vector<Vec3> sample(const BoxGrid& g, const ManufacturedCase& mc) {
    std::vector<Vec3> u(g.nodes.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = mc.field.value(g.nodes[i]);
    return u;
}

double max_error(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::fmax(e, max_abs(a[i] - b[i]));
    return e;
}

// Max absolute row sum of the free rows.
double matrix_norm(const DiscreteOperator& op) {
    double a = 0.0;
    for (std::size_t r = 0; r + 1 < op.row_ptr.size(); ++r)
        for (std::size_t i = 0; i < 3; ++i) {
            double s = 0.0;
            for (std::size_t k = op.row_ptr[r]; k < op.row_ptr[r + 1]; ++k)
                for (std::size_t j = 0; j < 3; ++j) s += std::fabs(op.blocks[k](i, j));
            a = std::fmax(a, s);
        }
    return a;
}

struct Assembled {
    ManufacturedCase mc;
    DiscreteOperator op;
};

Assembled unit_cube(const char* name, bool with_interface) {
    ManufacturedCase mc = with_interface ? on_mid(name) : make_manufactured(name);
    const auto plane = discontinuity_plane(mc.material, mc.field);
    const BoxGrid g = build_grid(Box{}, 1.0 / 16.0, 3.0, with_interface ? std::optional{kMid} : plane);
    return {mc, assemble(g, mc.material, 0)};
}

}  // namespace

TEST_CASE("grid construction") {
    const BoxGrid g = build_grid(Box{}, 1.0 / 16.0, 3.0, kMid);
    CHECK(g.dims == std::array<int, 3>{17, 17, 17});
    CHECK(g.delta == doctest::Approx(3.0 / 16.0).epsilon(1e-15));
    CHECK(g.nodes.size() == 17u * 17u * 17u);
    std::size_t free = 0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (g.tags[i] == NodeTag::Constraint) continue;
        ++free;
        const bool near = std::fabs(g.nodes[i][2] - 0.5) < g.delta;
        CHECK((g.tags[i] == NodeTag::ExtendedInterface) == near);
    }
    CHECK(free == 125);
    CHECK(g.count(NodeTag::ExtendedInterface) > 0);
    CHECK(max_abs(g.nodes[g.index(1, 2, 3)] - Vec3{1.0 / 16.0, 2.0 / 16.0, 3.0 / 16.0}) < 1e-15);

    const BoxGrid outside = build_grid(Box{}, 1.0 / 16.0, 3.0, PlanarInterface::make({0.0, 0.0, 3.0}, {0.0, 0.0, 1.0}));
    CHECK(outside.count(NodeTag::ExtendedInterface) == 0);

    CHECK_THROWS_AS(build_grid(Box{}, 1.0 / 16.0, 1.0, kMid), Error);
    CHECK_THROWS_AS(build_grid(Box{}, 1.0 / 16.0, 0.5, kMid), Error);
    CHECK_THROWS_AS(build_grid(Box{}, 0.3, 2.0, kMid), Error);
    CHECK_THROWS_AS(build_grid(Box{}, 1.0 / 8.0, 3.0, kMid), Error);
    CHECK_THROWS_AS(build_grid(Box{}, 1.0 / 64.0, 3.0, kMid), Error);
}

TEST_CASE("stencil partial volumes") {
    const double h = 0.1;
    const auto st = build_stencil(h, 3.0);
    double m = 0.0;
    for (const auto& s : st) {
        CHECK(s.volume > 0.0);
        CHECK(s.volume <= h * h * h * (1.0 + 1e-14));
        CHECK(!(s.offset == std::array<int, 3>{0, 0, 0}));
        m += s.volume;
    }
    const double ball = 4.0 / 3.0 * oracle::pi * std::pow(0.3, 3);
    CHECK(std::fabs(m - ball) / ball < 0.03);
}

TEST_CASE("assembled rows annihilate constants") {
    const auto a = unit_cube("patch_jump_zero_traction", true);
    const double scale = matrix_norm(a.op);
    for (std::size_t r = 0; r + 1 < a.op.row_ptr.size(); ++r) {
        Mat3 sum;
        for (std::size_t k = a.op.row_ptr[r]; k < a.op.row_ptr[r + 1]; ++k) sum += a.op.blocks[k];
        CHECK(max_abs(sum) <= 1e-10 * scale);
    }
    const std::vector<Vec3> c(a.op.grid.nodes.size(), Vec3{1.0, -2.0, 0.5});
    for (std::size_t node : a.op.free_nodes) CHECK(max_abs(apply_at(a.op, node, c)) <= 1e-10 * scale);
}

TEST_CASE("linear fields give zero interior action for a homogeneous material") {
    const auto a = unit_cube("linear", false);
    const auto u = sample(a.op.grid, a.mc);
    for (std::size_t node : a.op.free_nodes) CHECK(max_abs(apply_at(a.op, node, u)) < 1e-8);
}

TEST_CASE("solver patch tests") {
    {
        const auto a = unit_cube("constant", false);
        const auto g = sample(a.op.grid, a.mc);
        const SolveResult s = solve_equilibrium(a.op, std::vector<Vec3>(g.size()), g);
        CHECK(max_error(s.u, g) < 1e-10);
        CHECK(s.residual < 1e-10);
        CHECK(s.rcond > 1e-14);
    }
    {
        const auto a = unit_cube("linear", false);
        const auto g = sample(a.op.grid, a.mc);
        const SolveResult s = solve_equilibrium(a.op, std::vector<Vec3>(g.size()), g);
        CHECK(max_error(s.u, g) < 1e-8);
    }
    {
        const auto a = unit_cube("patch_jump_zero_traction", true);
        const auto g = sample(a.op.grid, a.mc);
        const std::vector<Vec3> b(g.size());
        const SolveResult s = solve_equilibrium(a.op, b, g);
        CHECK(max_error(s.u, g) < 5.0 / 16.0);
        const TagResiduals res = residual_check(a.op, s.u, b, g);
        double u_max = 0.0;
        for (const Vec3& v : s.u) u_max = std::fmax(u_max, max_abs(v));
        const double tol = 1e-10 * std::fmax(1.0, matrix_norm(a.op) * u_max);
        CHECK(res.interior <= tol);
        CHECK(res.extended_interface <= tol);
        CHECK(res.constraint == 0.0);
    }
}

TEST_CASE("solution does not depend on the unknown ordering") {
    const auto a = unit_cube("patch_jump_zero_traction", true);
    const auto g = sample(a.op.grid, a.mc);
    const std::vector<Vec3> b(g.size());
    std::vector<std::size_t> order(a.op.free_nodes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), oracle::rng());
    const SolveResult s0 = solve_equilibrium(a.op, b, g);
    const SolveResult s1 = solve_equilibrium(a.op, b, g, &order);
    CHECK(max_error(s0.u, s1.u) < 1e-12);

    std::vector<std::size_t> bad(order.size(), 0);
    CHECK_THROWS_AS(solve_equilibrium(a.op, b, g, &bad), Error);
}

TEST_CASE("residual grows linearly with a perturbation") {
    const auto a = unit_cube("constant", false);
    const auto g = sample(a.op.grid, a.mc);
    const std::vector<Vec3> b(g.size());
    const SolveResult s = solve_equilibrium(a.op, b, g);
    const std::size_t node = a.op.free_nodes[a.op.free_nodes.size() / 2];
    auto residual_at = [&](double eps) {
        auto u = s.u;
        u[node] += Vec3{eps, 0.0, 0.0};
        const TagResiduals r = residual_check(a.op, u, b, g);
        return std::fmax(r.interior, r.extended_interface);
    };
    const double r1 = residual_at(1e-3), r2 = residual_at(2e-3), r4 = residual_at(4e-3);
    CHECK(r1 > 1e-6);
    CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(r4 / r1 == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("assembled action matches direct quadrature away from the collar") {
    // Free region reaches 2 delta beyond the collar on every side.
    const double h = 1.0 / 16.0;
    const auto mc = make_manufactured("trig_smooth");
    const Box box{{0.0, 0.0, 0.0}, {1.5, 1.5, 1.5}};
    const BoxGrid grid = build_grid(box, h, 3.0, std::nullopt);
    const DiscreteOperator op = assemble(grid, mc.material, 0);
    const std::size_t node = grid.index(12, 12, 12);
    REQUIRE(grid.tags[node] == NodeTag::Interior);
    const Vec3 x = grid.nodes[node];
    CHECK(max_abs(x - Vec3{0.75, 0.75, 0.75}) < 1e-15);
    const Vec3 discrete = apply_at(op, node, sample(grid, mc));
    const Vec3 direct = eval_L(make_config(grid.delta), mc.material, mc.field, x);
    CHECK(max_abs(discrete - direct) < 10.0 * h * h);
}

TEST_CASE("assembly and solve argument checks") {
    const auto a = unit_cube("constant", false);
    const std::vector<Vec3> g(a.op.grid.nodes.size());
    CHECK_THROWS_AS(solve_equilibrium(a.op, std::vector<Vec3>(3), g), Error);
    CHECK_THROWS_AS(apply_at(a.op, 0, g), Error);

    const auto patch = make_manufactured("patch_jump_zero_traction", PlanarInterface::make({0.5, 0.5, 0.4}, {0, 0, 1}));
    CHECK_THROWS_AS(assemble(build_grid(Box{}, 1.0 / 16.0, 3.0, kMid), patch.material), Error);
}
