#include "cohesive/domain_fem.hpp"

#include "cohesive/errors.hpp"
#include "cohesive/format.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace cohesive {

const char* to_string(NodeTag tag)
{
    switch (tag) {
    case NodeTag::interior:
        return "interior";
    case NodeTag::dirichlet_bottom:
        return "dirichlet_bottom";
    case NodeTag::dirichlet_top:
        return "dirichlet_top";
    case NodeTag::neumann:
        return "neumann";
    }
    return "unknown";
}

Mesh build_mesh(const DomainSpec& spec)
{
    if (!(spec.lx > 0.0) || !std::isfinite(spec.lx))
        throw ConfigError("mesh.lx", "must be a positive length");
    if (!(spec.ly > 0.0) || !std::isfinite(spec.ly))
        throw ConfigError("mesh.ly", "must be a positive length");
    if (spec.nx < 1)
        throw ConfigError("mesh.nx", "must be at least 1");
    if (spec.ny < 2 || spec.ny % 2 != 0)
        throw ConfigError("mesh.ny", "must be even and at least 2 so the crack lies on a mesh line");

    const auto nx = static_cast<std::size_t>(spec.nx);
    const auto ny = static_cast<std::size_t>(spec.ny);
    const std::size_t row = nx + 1;
    const std::size_t crack_row = ny / 2;

    Mesh mesh;
    mesh.spec_ = spec;
    mesh.nodes_.reserve((ny + 2) * row);
    mesh.tags_.reserve((ny + 2) * row);

    // Row j has nodes at y = j * ly / ny. The crack row appears twice.
    std::vector<std::size_t> row_start_below(ny + 1), row_start_above(ny + 1);
    auto add_row = [&](std::size_t j) {
        const std::size_t start = mesh.nodes_.size();
        const double y = spec.ly * static_cast<double>(j) / static_cast<double>(ny);
        for (std::size_t i = 0; i <= nx; ++i) {
            const double x = spec.lx * static_cast<double>(i) / static_cast<double>(nx);
            mesh.nodes_.push_back({x, y});
            NodeTag tag = NodeTag::interior;
            if (j == 0)
                tag = NodeTag::dirichlet_bottom;
            else if (j == ny)
                tag = NodeTag::dirichlet_top;
            else if (i == 0 || i == nx)
                tag = NodeTag::neumann;
            mesh.tags_.push_back(tag);
        }
        return start;
    };

    for (std::size_t j = 0; j <= ny; ++j) {
        if (j == crack_row) {
            row_start_below[j] = add_row(j); // minus copies
            row_start_above[j] = add_row(j); // plus copies
        }
        else {
            row_start_below[j] = row_start_above[j] = add_row(j);
        }
    }

    for (std::size_t i = 0; i <= nx; ++i)
        mesh.interface_.push_back({row_start_above[crack_row] + i, row_start_below[crack_row] + i});

    const double h = spec.lx / static_cast<double>(nx);
    mesh.weights_.assign(row, h);
    mesh.weights_.front() = 0.5 * h;
    mesh.weights_.back() = 0.5 * h;

    // Cell (i, j) spans rows j and j+1; the crack row uses the copy on the
    // side of the cell. Every cell is split along its (i,j)-(i+1,j+1) diagonal.
    for (std::size_t j = 0; j < ny; ++j) {
        const bool above = j >= crack_row;
        const std::size_t lower = above ? row_start_above[j] : row_start_below[j];
        const std::size_t upper = above ? row_start_above[j + 1] : row_start_below[j + 1];
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t n00 = lower + i;
            const std::size_t n10 = lower + i + 1;
            const std::size_t n01 = upper + i;
            const std::size_t n11 = upper + i + 1;
            mesh.triangles_.push_back({n00, n10, n11});
            mesh.triangles_.push_back({n00, n11, n01});
        }
    }
    return mesh;
}

Eigen::Matrix3d element_stiffness(const Point& a, const Point& b, const Point& c)
{
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double area = 0.5 * std::abs(det);
    if (!(area > 0.0))
        throw AssemblyError("degenerate triangle in stiffness assembly");

    // Gradients of the barycentric basis functions times 2 * area.
    Eigen::Matrix<double, 3, 2> grad;
    grad << b.y - c.y, c.x - b.x,
            c.y - a.y, a.x - c.x,
            a.y - b.y, b.x - a.x;
    return grad * grad.transpose() / (4.0 * area);
}

StiffnessSystem assemble_stiffness(const Mesh& mesh)
{
    const auto& nodes = mesh.nodes();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(9 * mesh.triangles().size());
    for (const auto& tri : mesh.triangles()) {
        const Eigen::Matrix3d ke = element_stiffness(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                entries.emplace_back(static_cast<int>(tri[r]), static_cast<int>(tri[c]), ke(r, c));
    }

    StiffnessSystem system;
    const auto n = static_cast<Eigen::Index>(mesh.node_count());
    system.matrix.resize(n, n);
    system.matrix.setFromTriplets(entries.begin(), entries.end());
    for (std::size_t node = 0; node < mesh.node_count(); ++node)
        (mesh.is_dirichlet(node) ? system.constrained : system.free).push_back(node);
    return system;
}

Eigen::VectorXd dirichlet_lift(const Mesh& mesh, double amp)
{
    const auto& nodes = mesh.nodes();
    Eigen::VectorXd lift(static_cast<Eigen::Index>(nodes.size()));
    const double ly = mesh.spec().ly;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        lift[static_cast<Eigen::Index>(i)] = amp * nodes[i].y / ly;
    return lift;
}

double lift_gradient_norm(const DomainSpec& spec)
{
    return std::sqrt(spec.lx * spec.ly) / spec.ly;
}

void write_mesh_csv(const Mesh& mesh, std::ostream& nodes, std::ostream& triangles)
{
    nodes << "id,x,y,tag\n";
    for (std::size_t i = 0; i < mesh.node_count(); ++i)
        nodes << i << ',' << format_double(mesh.nodes()[i].x) << ',' << format_double(mesh.nodes()[i].y) << ','
              << to_string(mesh.tags()[i]) << '\n';
    triangles << "n0,n1,n2\n";
    for (const auto& tri : mesh.triangles())
        triangles << tri[0] << ',' << tri[1] << ',' << tri[2] << '\n';
}

} // namespace cohesive
