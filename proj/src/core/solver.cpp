#include "solver.hpp"

#include "error.hpp"
#include "parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace peridyn {

const char* tag_name(NodeTag t) {
    switch (t) {
        case NodeTag::Interior: return "interior";
        case NodeTag::ExtendedInterface: return "extended_interface";
        case NodeTag::Constraint: return "constraint";
    }
    return "?";
}

std::size_t BoxGrid::count(NodeTag t) const {
    return static_cast<std::size_t>(std::count(tags.begin(), tags.end(), t));
}

std::vector<StencilEntry> build_stencil(double h, double ratio) {
    constexpr int kSub = 4;
    const int r = static_cast<int>(std::ceil(ratio + 0.5));
    std::vector<StencilEntry> out;
    for (int i = -r; i <= r; ++i)
        for (int j = -r; j <= r; ++j)
            for (int k = -r; k <= r; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                int inside = 0;
                for (int a = 0; a < kSub; ++a)
                    for (int b = 0; b < kSub; ++b)
                        for (int c = 0; c < kSub; ++c) {
                            const double x = i + (a + 0.5) / kSub - 0.5;
                            const double y = j + (b + 0.5) / kSub - 0.5;
                            const double z = k + (c + 0.5) / kSub - 0.5;
                            if (x * x + y * y + z * z <= ratio * ratio) ++inside;
                        }
                if (inside == 0) continue;
                const double frac = static_cast<double>(inside) / (kSub * kSub * kSub);
                out.push_back({{i, j, k}, Vec3{i * h, j * h, k * h}, frac * h * h * h});
            }
    return out;
}

BoxGrid build_grid(const Box& box, double h, double ratio, const std::optional<PlanarInterface>& interface) {
    if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorCode::InvalidArgument, "grid spacing must be positive");
    if (!(ratio > 1.0) || !std::isfinite(ratio)) fail(ErrorCode::InvalidArgument, "horizon ratio must exceed 1");
    BoxGrid g;
    g.box = box;
    g.h = h;
    g.ratio = ratio;
    g.delta = ratio * h;
    g.interface = interface;
    std::size_t total = 1;
    for (std::size_t a = 0; a < 3; ++a) {
        const double cells = (box.hi[a] - box.lo[a]) / h;
        const double rounded = std::round(cells);
        if (!(rounded >= 1.0) || std::fabs(cells - rounded) > 1e-9 * std::fmax(1.0, rounded))
            fail(ErrorCode::InvalidArgument, "box edges must be whole multiples of the spacing");
        g.dims[a] = static_cast<int>(rounded) + 1;
        total *= static_cast<std::size_t>(g.dims[a]);
    }
    if (total > 40000) fail(ErrorCode::InvalidArgument, "grid exceeds 40000 nodes");

    for (const auto& s : build_stencil(h, ratio))
        for (int o : s.offset) g.reach = std::max(g.reach, std::abs(o));
    const double collar = std::max(2.0 * g.delta, 2.0 * g.reach * h);
    const double eps = 1e-9 * h;

    g.nodes.reserve(total);
    g.tags.reserve(total);
    for (int i = 0; i < g.dims[0]; ++i)
        for (int j = 0; j < g.dims[1]; ++j)
            for (int k = 0; k < g.dims[2]; ++k) {
                const std::array<int, 3> ijk{i, j, k};
                Vec3 x;
                bool constrained = false;
                for (std::size_t a = 0; a < 3; ++a) {
                    x[a] = box.lo[a] + ijk[a] * h;
                    const int from_face = std::min(ijk[a], g.dims[a] - 1 - ijk[a]);
                    if (from_face * h < collar - eps) constrained = true;
                }
                NodeTag t = NodeTag::Interior;
                if (constrained)
                    t = NodeTag::Constraint;
                else if (interface && std::fabs(signed_distance(*interface, x)) < g.delta)
                    t = NodeTag::ExtendedInterface;
                g.nodes.push_back(x);
                g.tags.push_back(t);
            }
    if (g.count(NodeTag::Constraint) == total)
        fail(ErrorCode::InvalidArgument, "constraint collar leaves no free node");
    return g;
}

namespace {

struct NodeMaterial {
    double lambda = 0.0;
    double mu = 0.0;
};

}  // namespace

DiscreteOperator assemble(const BoxGrid& grid, const Material& material, int threads) {
    const auto mplane = material.interface();
    if (mplane && grid.interface && !(*mplane == *grid.interface))
        fail(ErrorCode::InvalidArgument, "material and grid interfaces differ");

    DiscreteOperator op;
    op.grid = grid;
    op.stencil = build_stencil(grid.h, grid.ratio);
    for (const auto& s : op.stencil) op.m += s.volume;
    const std::optional<PlanarInterface> plane = grid.interface ? grid.interface : mplane;

    const std::size_t n = grid.nodes.size();
    std::vector<NodeMaterial> mat(n);
    for (std::size_t i = 0; i < n; ++i) {
        const LameValues l = material.at(grid.nodes[i]);
        mat[i] = {l.lambda, l.mu};
    }

    op.row_of.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (grid.tags[i] != NodeTag::Constraint) {
            op.row_of[i] = static_cast<long>(op.free_nodes.size());
            op.free_nodes.push_back(i);
        }
    }

    const int reach2 = 2 * grid.reach;
    const int side = 2 * reach2 + 1;
    auto local_index = [&](int i, int j, int k) {
        return static_cast<std::size_t>(((i + reach2) * side + (j + reach2)) * side + (k + reach2));
    };
    const double cs = 15.0 / op.m;
    const double cd = 9.0 / (op.m * op.m);
    const Vec3 n_hat = plane ? plane->normal : Vec3{};
    const Mat3 nn = outer(n_hat, n_hat);

    // kernel data per stencil entry
    const std::size_t ns = op.stencil.size();
    std::vector<Mat3> kss(ns);
    std::vector<Vec3> kab(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        const Vec3& xi = op.stencil[s].xi;
        const double r2 = norm2(xi);
        kss[s] = (op.stencil[s].volume / (r2 * r2)) * outer(xi, xi);
        kab[s] = (op.stencil[s].volume / r2) * xi;
    }

    struct RowData {
        std::vector<std::size_t> cols;
        std::vector<Mat3> blocks;
    };
    std::vector<RowData> rows(op.free_nodes.size());

    parallel_for(op.free_nodes.size(), threads, [&](std::size_t r) {
        const std::size_t xid = op.free_nodes[r];
        const int xi = static_cast<int>(xid / (static_cast<std::size_t>(grid.dims[1]) * grid.dims[2]));
        const int xj = static_cast<int>((xid / grid.dims[2]) % grid.dims[1]);
        const int xk = static_cast<int>(xid % grid.dims[2]);
        const bool band = grid.tags[xid] == NodeTag::ExtendedInterface;
        std::vector<Mat3> acc(static_cast<std::size_t>(side) * side * side);
        std::vector<char> used(acc.size(), 0);
        auto add = [&](int i, int j, int k, const Mat3& m) {
            const std::size_t li = local_index(i, j, k);
            acc[li] += m;
            used[li] = 1;
        };
        const double mu_x = mat[xid].mu;

        for (std::size_t s = 0; s < ns; ++s) {
            const auto& o = op.stencil[s].offset;
            const std::size_t yid = grid.index(xi + o[0], xj + o[1], xk + o[2]);
            double c = cs * (mu_x + mat[yid].mu);
            if (band) c -= cs * mu_x;
            const Mat3 m = c * kss[s];
            add(o[0], o[1], o[2], m);
            add(0, 0, 0, -1.0 * m);
        }
        for (std::size_t s = 0; s < ns; ++s) {
            const auto& o = op.stencil[s].offset;
            const std::size_t yid = grid.index(xi + o[0], xj + o[1], xk + o[2]);
            const double cy = (mat[yid].lambda - mat[yid].mu) * (band ? 1.25 : 1.0);
            const double l2 = band ? 1.25 * mat[yid].mu : 0.0;
            if (cy == 0.0 && l2 == 0.0) continue;
            const Vec3 alpha = cd * kab[s];
            for (std::size_t t = 0; t < ns; ++t) {
                const auto& p = op.stencil[t].offset;
                Mat3 m = (cy == 0.0) ? Mat3{} : cy * outer(alpha, kab[t]);
                if (l2 != 0.0) m += (l2 * dot(alpha, kab[t])) * nn;
                add(o[0] + p[0], o[1] + p[1], o[2] + p[2], m);
            }
        }
        RowData& rd = rows[r];
        for (int i = -reach2; i <= reach2; ++i)
            for (int j = -reach2; j <= reach2; ++j)
                for (int k = -reach2; k <= reach2; ++k) {
                    const std::size_t li = local_index(i, j, k);
                    if (!used[li]) continue;
                    rd.cols.push_back(grid.index(xi + i, xj + j, xk + k));
                    rd.blocks.push_back(acc[li]);
                }
    });

    op.row_ptr.push_back(0);
    for (auto& rd : rows) {
        op.cols.insert(op.cols.end(), rd.cols.begin(), rd.cols.end());
        op.blocks.insert(op.blocks.end(), rd.blocks.begin(), rd.blocks.end());
        op.row_ptr.push_back(op.cols.size());
    }
    return op;
}

Vec3 apply_at(const DiscreteOperator& op, std::size_t node, const std::vector<Vec3>& u) {
    if (node >= op.row_of.size() || op.row_of[node] < 0)
        fail(ErrorCode::InvalidArgument, "operator rows exist only for free nodes");
    if (u.size() != op.grid.nodes.size()) fail(ErrorCode::InvalidArgument, "nodal field has the wrong size");
    const auto r = static_cast<std::size_t>(op.row_of[node]);
    Vec3 out;
    for (std::size_t k = op.row_ptr[r]; k < op.row_ptr[r + 1]; ++k) out += op.blocks[k] * u[op.cols[k]];
    return out;
}

namespace {

Vec3 row_rhs(const DiscreteOperator& op, std::size_t node, const std::vector<Vec3>& b) {
    return op.grid.tags[node] == NodeTag::Interior ? b[node] : Vec3{};
}

}  // namespace

SolveResult solve_equilibrium(const DiscreteOperator& op, const std::vector<Vec3>& b, const std::vector<Vec3>& g,
                              const std::vector<std::size_t>* order) {
    const std::size_t n = op.grid.nodes.size();
    if (b.size() != n || g.size() != n) fail(ErrorCode::InvalidArgument, "nodal arrays must match the grid size");
    const std::size_t f = op.free_nodes.size();
    if (f > kMaxFreeNodes) fail(ErrorCode::InvalidArgument, "dense solve limited to 4000 free nodes");

    // position of free row r inside the dense system
    std::vector<std::size_t> pos(f);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    if (order) {
        if (order->size() != f) fail(ErrorCode::InvalidArgument, "free-node ordering has the wrong size");
        std::vector<char> seen(f, 0);
        for (std::size_t k = 0; k < f; ++k) {
            const std::size_t r = (*order)[k];
            if (r >= f || seen[r]) fail(ErrorCode::InvalidArgument, "free-node ordering is not a permutation");
            seen[r] = 1;
            pos[r] = k;
        }
    }

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(3 * f), static_cast<Eigen::Index>(3 * f));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(3 * f));
    for (std::size_t r = 0; r < f; ++r) {
        const std::size_t node = op.free_nodes[r];
        Vec3 rr = row_rhs(op, node, b);
        const auto pr = static_cast<Eigen::Index>(3 * pos[r]);
        for (std::size_t k = op.row_ptr[r]; k < op.row_ptr[r + 1]; ++k) {
            const std::size_t col = op.cols[k];
            const Mat3& blk = op.blocks[k];
            const long cr = op.row_of[col];
            if (cr < 0) {
                rr -= blk * g[col];
                continue;
            }
            const auto pc = static_cast<Eigen::Index>(3 * pos[static_cast<std::size_t>(cr)]);
            for (Eigen::Index i = 0; i < 3; ++i)
                for (Eigen::Index j = 0; j < 3; ++j)
                    a(pr + i, pc + j) += blk(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
        for (Eigen::Index i = 0; i < 3; ++i) rhs(pr + i) = rr[static_cast<std::size_t>(i)];
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    SolveResult out;
    out.rcond = lu.rcond();
    if (!(out.rcond >= 1e-14)) {
        fail(ErrorCode::Singular, "free block is singular or ill-conditioned (rcond " + std::to_string(out.rcond) + ")");
    }
    const Eigen::VectorXd x = lu.solve(rhs);
    out.residual = (a * x - rhs).lpNorm<Eigen::Infinity>();

    out.u.assign(n, Vec3{});
    for (std::size_t i = 0; i < n; ++i) {
        if (op.row_of[i] < 0) out.u[i] = g[i];
    }
    for (std::size_t r = 0; r < f; ++r) {
        const auto pr = static_cast<Eigen::Index>(3 * pos[r]);
        out.u[op.free_nodes[r]] = {x(pr), x(pr + 1), x(pr + 2)};
    }
    return out;
}

TagResiduals residual_check(const DiscreteOperator& op, const std::vector<Vec3>& u, const std::vector<Vec3>& b,
                            const std::vector<Vec3>& g) {
    const std::size_t n = op.grid.nodes.size();
    if (u.size() != n || b.size() != n || g.size() != n)
        fail(ErrorCode::InvalidArgument, "nodal arrays must match the grid size");
    TagResiduals res;
    for (std::size_t i = 0; i < n; ++i) {
        switch (op.grid.tags[i]) {
            case NodeTag::Constraint: res.constraint = std::fmax(res.constraint, max_abs(u[i] - g[i])); break;
            case NodeTag::Interior:
                res.interior = std::fmax(res.interior, max_abs(apply_at(op, i, u) - b[i]));
                break;
            case NodeTag::ExtendedInterface:
                res.extended_interface = std::fmax(res.extended_interface, max_abs(apply_at(op, i, u)));
                break;
        }
    }
    return res;
}

}  // namespace peridyn
