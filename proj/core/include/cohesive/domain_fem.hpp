#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace cohesive {

/// Rectangle [0, lx] x [0, ly] cut by the crack line y = ly / 2.
/// Dirichlet data on the bottom and top edges, traction-free left and right.
struct DomainSpec {
    double lx = 1.0;
    double ly = 1.0;
    int nx = 1; ///< element columns
    int ny = 2; ///< element rows, even so the crack lies on a mesh line
};

enum class NodeTag { interior, dirichlet_bottom, dirichlet_top, neumann };

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct InterfacePair {
    std::size_t plus;  ///< copy seen from the upper half
    std::size_t minus; ///< copy seen from the lower half
};

using Triangle = std::array<std::size_t, 3>;

/// Structured P1 triangulation with the crack-line nodes duplicated.
///
/// Nodes are numbered row by row from the bottom; the crack row is stored
/// twice, minus copies first. Triangles below the crack reference minus
/// copies, those above reference plus copies, so the two halves share no
/// node. A jump is the plus-copy value minus the minus-copy value.
class Mesh {
public:
    const DomainSpec& spec() const noexcept { return spec_; }
    const std::vector<Point>& nodes() const noexcept { return nodes_; }
    const std::vector<NodeTag>& tags() const noexcept { return tags_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const std::vector<InterfacePair>& interface() const noexcept { return interface_; }
    /// Trapezoid weights of the crack-line nodes; they sum to lx.
    const std::vector<double>& interface_weights() const noexcept { return weights_; }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t interface_size() const noexcept { return interface_.size(); }

    bool is_dirichlet(std::size_t node) const
    {
        return tags_[node] == NodeTag::dirichlet_bottom || tags_[node] == NodeTag::dirichlet_top;
    }

private:
    friend Mesh build_mesh(const DomainSpec& spec);

    DomainSpec spec_;
    std::vector<Point> nodes_;
    std::vector<NodeTag> tags_;
    std::vector<Triangle> triangles_;
    std::vector<InterfacePair> interface_;
    std::vector<double> weights_;
};

/// Throws ConfigError for nonpositive lengths, nx < 1, or odd / too small ny.
Mesh build_mesh(const DomainSpec& spec);

struct StiffnessSystem {
    Eigen::SparseMatrix<double> matrix; ///< unconstrained Laplace stiffness on all nodes
    std::vector<std::size_t> constrained; ///< Dirichlet nodes
    std::vector<std::size_t> free;        ///< everything else
};

/// Gradient inner-product matrix of a P1 triangle. Throws AssemblyError for a
/// degenerate triangle.
Eigen::Matrix3d element_stiffness(const Point& a, const Point& b, const Point& c);

StiffnessSystem assemble_stiffness(const Mesh& mesh);

/// Nodal values of amp * y / ly (continuous across the crack).
Eigen::VectorXd dirichlet_lift(const Mesh& mesh, double amp);

/// L2 norm of the gradient of the unit lift y / ly over the domain.
double lift_gradient_norm(const DomainSpec& spec);

/// Debug dump: "id,x,y,tag" and "n0,n1,n2".
void write_mesh_csv(const Mesh& mesh, std::ostream& nodes, std::ostream& triangles);

const char* to_string(NodeTag tag);

} // namespace cohesive
