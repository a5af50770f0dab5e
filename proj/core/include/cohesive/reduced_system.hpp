#pragma once

#include "cohesive/domain_fem.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace cohesive {

namespace detail {
struct BulkSolver;
}

/// Elastic energy condensed onto the interface jump vector z:
///
///     E(z; amp) = 1/2 z^T S z - amp c^T z + 1/2 amp^2 e0
///
/// where amp scales the Dirichlet lift on the top edge. E(z; amp) is the
/// minimum of the full discrete Dirichlet energy over all bulk unknowns with
/// the jump fixed to z.
class ReducedModel {
public:
    /// Model without a mesh behind it (problem dumps, synthetic tests).
    /// S must be symmetric positive definite.
    static ReducedModel from_matrices(Eigen::MatrixXd stiffness, Eigen::VectorXd load_unit,
                                      double e0_unit, std::vector<double> weights);

    std::size_t size() const noexcept { return weights_.size(); }
    const Eigen::MatrixXd& stiffness() const noexcept { return s_; }
    const Eigen::VectorXd& load_unit() const noexcept { return c_; }
    double e0_unit() const noexcept { return e0_; }
    std::span<const double> weights() const noexcept { return weights_; }

    bool has_bulk() const noexcept { return bulk_ != nullptr; }
    /// Throws std::logic_error for models built from matrices.
    const Mesh& mesh() const;

    double energy(const Eigen::VectorXd& z, double amp) const;
    /// dE/dz = S z - amp c.
    Eigen::VectorXd gradient(const Eigen::VectorXd& z, double amp) const;
    /// Nodal traction t_e = (amp c - S z)_e / w_e; positive values resist opening.
    Eigen::VectorXd traction(const Eigen::VectorXd& z, double amp) const;
    /// <grad u, grad w_hat> for the field with jump z at amplitude amp. This is
    /// dE/damp, the rate at which the boundary datum does work.
    double lift_work_rate(const Eigen::VectorXd& z, double amp) const;

    /// amp S^{-1} c, the minimizer of the elastic energy alone (fully broken crack).
    Eigen::VectorXd elastic_minimizer(double amp) const;
    /// Elastic minimizer with the entries where `pinned` is true held at `values`.
    Eigen::VectorXd elastic_minimizer(double amp, const std::vector<bool>& pinned,
                                      const Eigen::VectorXd& values) const;

    /// Full nodal field with jump z and boundary amplitude amp.
    Eigen::VectorXd reconstruct(const Eigen::VectorXd& z, double amp) const;
    /// 1/2 u^T K u on the underlying mesh.
    double field_energy(const Eigen::VectorXd& u) const;
    /// <grad u, grad v> on the underlying mesh.
    double field_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
    /// Largest nodal residual of the discrete Laplace equation at unconstrained
    /// nodes, with each crack pair counted once (plus + minus residual).
    double bulk_residual(const Eigen::VectorXd& u) const;

private:
    friend ReducedModel condense(const Mesh& mesh, const StiffnessSystem& stiffness);

    ReducedModel() = default;
    void factorize();
    void expect_size(const Eigen::VectorXd& z) const;
    const detail::BulkSolver& bulk() const;

    Eigen::MatrixXd s_;
    Eigen::VectorXd c_;
    double e0_ = 0.0;
    std::vector<double> weights_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    std::shared_ptr<const detail::BulkSolver> bulk_;
};

/// Exact static condensation of the bulk onto the crack jumps: m solves with a
/// unit jump at one pair plus one solve with the unit lift. Throws SolverError
/// if the constrained bulk system or S is not positive definite.
ReducedModel condense(const Mesh& mesh, const StiffnessSystem& stiffness);

/// Stiffness s such that a uniform jump z carries the uniform traction
/// s (amp - z) at every node, or nullopt when the interface response to a
/// uniform jump is not uniform (relative tolerance `tol`).
std::optional<double> uniform_jump_stiffness(const ReducedModel& model, double tol = 1e-9);

/// Free-function spellings of the model queries.
inline double reduced_energy(const ReducedModel& model, const Eigen::VectorXd& z, double amp)
{
    return model.energy(z, amp);
}
inline Eigen::VectorXd traction(const ReducedModel& model, const Eigen::VectorXd& z, double amp)
{
    return model.traction(z, amp);
}
inline Eigen::VectorXd reconstruct_bulk(const ReducedModel& model, const Eigen::VectorXd& z,
                                        double amp)
{
    return model.reconstruct(z, amp);
}

} // namespace cohesive
