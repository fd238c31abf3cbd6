#pragma once

// Meshfree collocation of L_star on a box lattice with a volume-constraint collar.
//
// Only rows of free (Interior and ExtendedInterface) nodes are stored; rows of
// Constraint nodes are the identity and are eliminated when solving.

#include "fields.hpp"

#include <array>
#include <optional>
#include <vector>

namespace peridyn {

enum class NodeTag { Interior, ExtendedInterface, Constraint };

const char* tag_name(NodeTag t);

struct Box {
    Vec3 lo{0.0, 0.0, 0.0};
    Vec3 hi{1.0, 1.0, 1.0};
};

struct BoxGrid {
    Box box;
    double h = 0.0;
    double ratio = 0.0;
    double delta = 0.0;
    /// Stencil reach in lattice units along one axis.
    int reach = 0;
    std::array<int, 3> dims{};
    std::vector<Vec3> nodes;
    std::vector<NodeTag> tags;
    std::optional<PlanarInterface> interface;

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k;
    }
    std::size_t count(NodeTag t) const;
};

/// Lattice with spacing h over the box. Nodes within max(2 delta, 2 reach h) of a face
/// are Constraint nodes; free nodes with |d| < delta are ExtendedInterface nodes.
/// Throws InvalidArgument for ratio <= 1, a box that is not a whole number of cells,
/// more than 40000 nodes, or a collar that leaves no free node.
BoxGrid build_grid(const Box& box, double h, double ratio, const std::optional<PlanarInterface>& interface);

/// Neighbor cell with its partial volume (fraction of the cell inside B_delta times h^3).
struct StencilEntry {
    std::array<int, 3> offset{};
    Vec3 xi;
    double volume = 0.0;
};

/// Neighbors of the origin cell, self excluded; partial volumes from 4^3 subsampling.
std::vector<StencilEntry> build_stencil(double h, double ratio);

struct DiscreteOperator {
    BoxGrid grid;
    std::vector<StencilEntry> stencil;
    /// Sum of stencil volumes, used in place of |B_delta|.
    double m = 0.0;
    /// Free node ids in row order, and the inverse map (-1 for Constraint nodes).
    std::vector<std::size_t> free_nodes;
    std::vector<long> row_of;
    /// Block CSR: row r couples free node free_nodes[r] to node cols[k] through blocks[k].
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> cols;
    std::vector<Mat3> blocks;
};

/// Throws InvalidArgument if material and grid carry different interfaces.
DiscreteOperator assemble(const BoxGrid& grid, const Material& material, int threads = 1);

/// Discrete L_star at a free node.
Vec3 apply_at(const DiscreteOperator& op, std::size_t node, const std::vector<Vec3>& u);

struct SolveResult {
    std::vector<Vec3> u;
    double residual = 0.0;  // max-norm residual of the free rows
    double rcond = 0.0;     // reciprocal condition estimate of the free block
};

inline constexpr std::size_t kMaxFreeNodes = 4000;

/// Solves op u = b on Interior rows, op u = 0 on ExtendedInterface rows, u = g on
/// Constraint nodes. b and g are nodal arrays of the grid size. `order`, if given,
/// permutes the free unknowns inside the dense system. Throws InvalidArgument above
/// kMaxFreeNodes free nodes and Singular when the reciprocal condition estimate falls below 1e-14.
SolveResult solve_equilibrium(const DiscreteOperator& op, const std::vector<Vec3>& b, const std::vector<Vec3>& g,
                              const std::vector<std::size_t>* order = nullptr);

struct TagResiduals {
    double interior = 0.0;
    double extended_interface = 0.0;
    double constraint = 0.0;
};

/// Max-norm of op u - rhs split by tag (rhs as in solve_equilibrium).
TagResiduals residual_check(const DiscreteOperator& op, const std::vector<Vec3>& u, const std::vector<Vec3>& b,
                            const std::vector<Vec3>& g);

}  // namespace peridyn
