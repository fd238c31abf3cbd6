// Refinement at fixed horizon ratio for the zero-traction patch. Both cases
// fail: the band rows carry a spurious traction of about 0.62 e3 / delta.

#include "solver.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>

using namespace peridyn;

namespace {

const Box kBox{{0.0, 0.0, 0.0}, {1.25, 1.25, 1.5}};
const PlanarInterface kPlane = PlanarInterface::make(Vec3{0.625, 0.625, 0.75}, Vec3{0.0, 0.0, 1.0});
constexpr double kRatio = 2.0;

struct Run {
    double error = 0.0;
    double band_residual = 0.0;
};

Run patch_run(double h) {
    const auto mc = make_manufactured("patch_jump_zero_traction", kPlane);
    const BoxGrid grid = build_grid(kBox, h, kRatio, kPlane);
    const DiscreteOperator op = assemble(grid, mc.material, 0);
    std::vector<Vec3> exact(grid.nodes.size());
    for (std::size_t i = 0; i < exact.size(); ++i) exact[i] = mc.field.value(grid.nodes[i]);
    const std::vector<Vec3> b(exact.size());
    Run r;
    r.band_residual = residual_check(op, exact, b, exact).extended_interface;
    const SolveResult s = solve_equilibrium(op, b, exact);
    for (std::size_t i = 0; i < exact.size(); ++i) r.error = std::fmax(r.error, max_abs(s.u[i] - exact[i]));
    std::printf("h = %g: free nodes %zu, error %.4e, band residual of the exact field %.4e\n", h,
                op.free_nodes.size(), r.error, r.band_residual);
    return r;
}

}  // namespace

TEST_CASE("patch error and band residual under refinement at fixed ratio") {
    const Run coarse = patch_run(1.0 / 8.0);
    const Run fine = patch_run(1.0 / 16.0);
    CHECK(coarse.error / fine.error >= 1.5);
    CHECK(fine.band_residual < coarse.band_residual);
}
