#include "cohesive/reduced_system.hpp"

#include "cohesive/errors.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <stdexcept>
#include <string>

namespace cohesive {

namespace detail {

/// Bulk problem with the jump imposed by substitution: each plus copy is
/// expressed as its minus copy plus the prescribed jump, Dirichlet nodes are
/// eliminated. The remaining system is symmetric positive definite.
struct BulkSolver {
    Mesh mesh;
    Eigen::SparseMatrix<double> stiffness;
    std::vector<Eigen::Index> dof; ///< node -> unknown, -1 when prescribed
    Eigen::Index unknowns = 0;
    Eigen::SparseMatrix<double> reduced;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> factor;

    BulkSolver(const Mesh& m, const StiffnessSystem& system) : mesh(m), stiffness(system.matrix)
    {
        const std::size_t n = mesh.node_count();
        dof.assign(n, -1);
        std::vector<bool> is_plus(n, false);
        for (const auto& pair : mesh.interface())
            is_plus[pair.plus] = true;
        for (std::size_t node = 0; node < n; ++node)
            if (!mesh.is_dirichlet(node) && !is_plus[node])
                dof[node] = unknowns++;
        for (const auto& pair : mesh.interface())
            dof[pair.plus] = dof[pair.minus];

        std::vector<Eigen::Triplet<double>> entries;
        for (int col = 0; col < stiffness.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(stiffness, col); it; ++it) {
                const auto r = dof[static_cast<std::size_t>(it.row())];
                const auto c = dof[static_cast<std::size_t>(it.col())];
                if (r >= 0 && c >= 0)
                    entries.emplace_back(static_cast<int>(r), static_cast<int>(c), it.value());
            }
        reduced.resize(unknowns, unknowns);
        reduced.setFromTriplets(entries.begin(), entries.end());
        factor.compute(reduced);
        if (factor.info() != Eigen::Success)
            throw SolverError("constrained bulk system is not positive definite");
    }

    /// Prescribed part of the field: boundary lift on Dirichlet nodes, the jump
    /// on plus copies, zero elsewhere.
    Eigen::VectorXd prescribed(const Eigen::VectorXd& z, double amp) const
    {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.node_count()));
        const double ly = mesh.spec().ly;
        for (std::size_t node = 0; node < mesh.node_count(); ++node)
            if (mesh.is_dirichlet(node))
                g[static_cast<Eigen::Index>(node)] = amp * mesh.nodes()[node].y / ly;
        const auto& pairs = mesh.interface();
        for (std::size_t e = 0; e < pairs.size(); ++e)
            g[static_cast<Eigen::Index>(pairs[e].plus)] = z[static_cast<Eigen::Index>(e)];
        return g;
    }

    Eigen::VectorXd gather(const Eigen::VectorXd& full) const
    {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(unknowns);
        for (std::size_t node = 0; node < dof.size(); ++node)
            if (dof[node] >= 0)
                out[dof[node]] += full[static_cast<Eigen::Index>(node)];
        return out;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& z, double amp) const
    {
        const Eigen::VectorXd g = prescribed(z, amp);
        const Eigen::VectorXd rhs = -gather(stiffness * g);
        Eigen::VectorXd x = factor.solve(rhs);
        const double target = 1e-12 * rhs.norm();
        for (int refine = 0; refine < 3; ++refine) {
            const Eigen::VectorXd residual = rhs - reduced * x;
            if (residual.norm() <= target)
                break;
            x += factor.solve(residual);
        }
        if ((rhs - reduced * x).norm() > std::max(target, 1e-300))
            throw SolverError("bulk solve did not reach the residual tolerance");

        Eigen::VectorXd u = g;
        for (std::size_t node = 0; node < dof.size(); ++node)
            if (dof[node] >= 0)
                u[static_cast<Eigen::Index>(node)] += x[dof[node]];
        return u;
    }
};

} // namespace detail

ReducedModel ReducedModel::from_matrices(Eigen::MatrixXd stiffness, Eigen::VectorXd load_unit,
                                         double e0_unit, std::vector<double> weights)
{
    const auto m = static_cast<Eigen::Index>(weights.size());
    if (stiffness.rows() != m || stiffness.cols() != m || load_unit.size() != m)
        throw DimensionMismatch("reduced model matrices do not match the interface size");
    for (double w : weights)
        if (!(w > 0.0))
            throw InvalidParameter("interface weights must be positive");
    ReducedModel model;
    model.s_ = std::move(stiffness);
    model.c_ = std::move(load_unit);
    model.e0_ = e0_unit;
    model.weights_ = std::move(weights);
    model.factorize();
    return model;
}

void ReducedModel::factorize()
{
    llt_.compute(s_);
    if (llt_.info() != Eigen::Success)
        throw SolverError("reduced stiffness is not positive definite");
}

const detail::BulkSolver& ReducedModel::bulk() const
{
    if (!bulk_)
        throw std::logic_error("reduced model has no mesh attached");
    return *bulk_;
}

const Mesh& ReducedModel::mesh() const
{
    return bulk().mesh;
}

void ReducedModel::expect_size(const Eigen::VectorXd& z) const
{
    if (static_cast<std::size_t>(z.size()) != size())
        throw DimensionMismatch("jump vector has " + std::to_string(z.size()) +
                                " entries, model has " + std::to_string(size()));
}

double ReducedModel::energy(const Eigen::VectorXd& z, double amp) const
{
    expect_size(z);
    return 0.5 * z.dot(s_ * z) - amp * c_.dot(z) + 0.5 * amp * amp * e0_;
}

Eigen::VectorXd ReducedModel::gradient(const Eigen::VectorXd& z, double amp) const
{
    expect_size(z);
    return s_ * z - amp * c_;
}

Eigen::VectorXd ReducedModel::traction(const Eigen::VectorXd& z, double amp) const
{
    Eigen::VectorXd t = -gradient(z, amp);
    for (Eigen::Index e = 0; e < t.size(); ++e)
        t[e] /= weights_[static_cast<std::size_t>(e)];
    return t;
}

double ReducedModel::lift_work_rate(const Eigen::VectorXd& z, double amp) const
{
    expect_size(z);
    return amp * e0_ - c_.dot(z);
}

Eigen::VectorXd ReducedModel::elastic_minimizer(double amp) const
{
    return llt_.solve(amp * c_);
}

Eigen::VectorXd ReducedModel::elastic_minimizer(double amp, const std::vector<bool>& pinned,
                                                const Eigen::VectorXd& values) const
{
    expect_size(values);
    if (pinned.size() != size())
        throw DimensionMismatch("pinned mask does not match the interface size");
    std::vector<Eigen::Index> free;
    for (std::size_t e = 0; e < size(); ++e)
        if (!pinned[e])
            free.push_back(static_cast<Eigen::Index>(e));
    Eigen::VectorXd z = values;
    if (free.empty())
        return z;
    if (free.size() == size())
        return elastic_minimizer(amp);

    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd block(nf, nf);
    Eigen::VectorXd rhs(nf);
    for (Eigen::Index i = 0; i < nf; ++i) {
        rhs[i] = amp * c_[free[i]];
        for (std::size_t e = 0; e < size(); ++e)
            if (pinned[e])
                rhs[i] -= s_(free[i], static_cast<Eigen::Index>(e)) * values[static_cast<Eigen::Index>(e)];
        for (Eigen::Index j = 0; j < nf; ++j)
            block(i, j) = s_(free[i], free[j]);
    }
    const Eigen::VectorXd zf = block.llt().solve(rhs);
    for (Eigen::Index i = 0; i < nf; ++i)
        z[free[i]] = zf[i];
    return z;
}

Eigen::VectorXd ReducedModel::reconstruct(const Eigen::VectorXd& z, double amp) const
{
    expect_size(z);
    return bulk().solve(z, amp);
}

double ReducedModel::field_energy(const Eigen::VectorXd& u) const
{
    return 0.5 * field_inner(u, u);
}

double ReducedModel::field_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const
{
    return u.dot(bulk().stiffness * v);
}

double ReducedModel::bulk_residual(const Eigen::VectorXd& u) const
{
    const auto& solver = bulk();
    const Eigen::VectorXd reduced = solver.gather(solver.stiffness * u);
    return reduced.size() == 0 ? 0.0 : reduced.cwiseAbs().maxCoeff();
}

ReducedModel condense(const Mesh& mesh, const StiffnessSystem& stiffness)
{
    ReducedModel model;
    auto bulk = std::make_shared<detail::BulkSolver>(mesh, stiffness);
    const auto m = static_cast<Eigen::Index>(mesh.interface_size());

    Eigen::MatrixXd basis(static_cast<Eigen::Index>(mesh.node_count()), m);
    for (Eigen::Index e = 0; e < m; ++e)
        basis.col(e) = bulk->solve(Eigen::VectorXd::Unit(m, e), 0.0);
    const Eigen::VectorXd particular = bulk->solve(Eigen::VectorXd::Zero(m), 1.0);

    const Eigen::MatrixXd k_basis = bulk->stiffness * basis;
    Eigen::MatrixXd s = basis.transpose() * k_basis;
    model.s_ = 0.5 * (s + s.transpose());
    model.c_ = -(k_basis.transpose() * particular);
    model.e0_ = particular.dot(bulk->stiffness * particular);
    model.weights_ = mesh.interface_weights();
    model.bulk_ = std::move(bulk);
    model.factorize();
    return model;
}

std::optional<double> uniform_jump_stiffness(const ReducedModel& model, double tol)
{
    const std::size_t m = model.size();
    const Eigen::VectorXd row_sums = model.stiffness() * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
    const auto w = model.weights();
    const double s = row_sums[0] / w[0];
    if (!(s > 0.0))
        return std::nullopt;
    for (std::size_t e = 0; e < m; ++e) {
        const auto i = static_cast<Eigen::Index>(e);
        if (std::abs(row_sums[i] / w[e] - s) > tol * s || std::abs(model.load_unit()[i] / w[e] - s) > tol * s)
            return std::nullopt;
    }
    return s;
}

} // namespace cohesive
