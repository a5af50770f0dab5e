#pragma once

#include "cohesive/cohesive_law.hpp"
#include "cohesive/domain_fem.hpp"
#include "cohesive/reduced_system.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace cohesive::fixture {

/// Fixed-seed generator for hand-rolled property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    Eigen::VectorXd vector(Eigen::Index n, double lo, double hi)
    {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = uniform(lo, hi);
        return v;
    }

    CohesiveLaw law()
    {
        const double kappa = uniform(0.2, 2.0);
        const double scale = uniform(0.2, 3.0);
        return coin() ? CohesiveLaw::capped_linear(kappa, scale) : CohesiveLaw::exponential(kappa, scale);
    }

private:
    std::mt19937_64 rng_;
};

inline ReducedModel condensed(const DomainSpec& spec)
{
    const Mesh mesh = build_mesh(spec);
    return condense(mesh, assemble_stiffness(mesh));
}

/// Unit square, one element column, crack halfway up: two interface nodes.
inline ReducedModel two_bar() { return condensed({1.0, 1.0, 1, 2}); }

inline Eigen::VectorXd uniform_vector(Eigen::Index n, double value) { return Eigen::VectorXd::Constant(n, value); }

/// Dense reference for the constrained Dirichlet problem on a mesh: element
/// matrices from the barycentric gradient formula, constraints (bottom = 0,
/// top = amp, plus - minus = z) imposed with Lagrange multipliers. Returns the
/// minimal energy and the field.
struct DenseReference {
    Eigen::MatrixXd k;
    const Mesh* mesh = nullptr;

    explicit DenseReference(const Mesh& m) : mesh(&m)
    {
        const auto n = static_cast<Eigen::Index>(m.node_count());
        k = Eigen::MatrixXd::Zero(n, n);
        for (const auto& tri : m.triangles()) {
            Eigen::Matrix3d coords;
            for (int a = 0; a < 3; ++a)
                coords.row(a) << 1.0, m.nodes()[tri[a]].x, m.nodes()[tri[a]].y;
            const double area = 0.5 * std::abs(coords.determinant());
            const Eigen::Matrix3d inv = coords.inverse(); // columns: coefficients of each hat function
            const Eigen::Matrix<double, 2, 3> grads = inv.bottomRows<2>();
            const Eigen::Matrix3d local = area * grads.transpose() * grads;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    k(static_cast<Eigen::Index>(tri[a]), static_cast<Eigen::Index>(tri[b])) += local(a, b);
        }
    }

    std::pair<double, Eigen::VectorXd> solve(const Eigen::VectorXd& z, double amp) const
    {
        const auto n = k.rows();
        std::vector<std::pair<Eigen::VectorXd, double>> rows;
        for (std::size_t i = 0; i < mesh->node_count(); ++i) {
            const auto tag = mesh->tags()[i];
            if (tag != NodeTag::dirichlet_bottom && tag != NodeTag::dirichlet_top)
                continue;
            Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
            r[static_cast<Eigen::Index>(i)] = 1.0;
            rows.emplace_back(r, tag == NodeTag::dirichlet_top ? amp : 0.0);
        }
        for (std::size_t e = 0; e < mesh->interface_size(); ++e) {
            const auto pair = mesh->interface()[e];
            Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
            r[static_cast<Eigen::Index>(pair.plus)] = 1.0;
            r[static_cast<Eigen::Index>(pair.minus)] = -1.0;
            rows.emplace_back(r, z[static_cast<Eigen::Index>(e)]);
        }
        const auto c = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + c, n + c);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + c);
        kkt.topLeftCorner(n, n) = k;
        for (Eigen::Index j = 0; j < c; ++j) {
            kkt.block(n + j, 0, 1, n) = rows[static_cast<std::size_t>(j)].first.transpose();
            kkt.block(0, n + j, n, 1) = rows[static_cast<std::size_t>(j)].first;
            rhs[n + j] = rows[static_cast<std::size_t>(j)].second;
        }
        const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
        const Eigen::VectorXd u = sol.head(n);
        return {0.5 * u.dot(k * u), u};
    }
};

} // namespace cohesive::fixture
