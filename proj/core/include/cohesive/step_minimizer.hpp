#pragma once

#include "cohesive/cohesive_law.hpp"
#include "cohesive/reduced_system.hpp"

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <string>

namespace cohesive {

/// One incremental problem: minimize over the jump vector z
///
///     F(z) = E(z; amp) + sum_e w_e g_e(V_e + |z_e - p_e|)
///
/// where p is the previous jump and V the previous cumulated variation.
struct StepProblem {
    const ReducedModel& model;
    const LawField& laws;
    Eigen::VectorXd v_prev; ///< entries >= 0, may be +infinity
    Eigen::VectorXd p;
    double amp = 0.0;
};

struct SolverOptions {
    double tol = 1e-10;     ///< coordinate move below which a sweep has converged
    int max_sweeps = 10000; ///< per start
};

enum class StartKind { stay = 0, elastic = 1, partial_rupture = 2 };

struct StepSolution {
    Eigen::VectorXd z;
    double total = 0.0;
    double elastic = 0.0;
    double dissipation_increment = 0.0;
    int sweeps = 0;
    StartKind start = StartKind::stay;
    double residual = 0.0;
};

/// Thrown when coordinate descent hits max_sweeps; carries the best iterate.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, StepSolution best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const StepSolution& best() const noexcept { return best_; }

private:
    StepSolution best_;
};

/// Checks dimensions and V >= 0. Throws DimensionMismatch / DomainError.
void check_problem(const StepProblem& problem);

/// sum_e w_e g_e(v_e)
double surface_energy(const LawField& laws, std::span<const double> weights,
                      const Eigen::VectorXd& v);

/// F(z) of the step problem.
double step_objective(const StepProblem& problem, const Eigen::VectorXd& z);

/// Global minimizer of h(zeta) = 1/2 a zeta^2 + b zeta + w g(v + |zeta - p|).
///
/// Each branch (zeta > p, zeta < p) is reduced to s = |zeta - p| >= 0, where
/// stationary points lie in (0, -beta/a] with beta = +-(a p + b). The branch is
/// split at the law kinks, each piece scanned for sign changes of h' and
/// bisected. Candidates are the kink at p, those roots and every piece
/// endpoint (which covers the saturated point -b/a). Energies within
/// 1e-13 relative are tied and resolve toward the smallest |zeta - p|.
double solve_coordinate_1d(double a, double b, const CohesiveLaw& law, double v, double p,
                           double w);

/// Cyclic coordinate descent with exact 1D global solves, run from the
/// previous jump, from the elastic minimizer, and from the elastic minimizer
/// with unbroken nodes held at p. Returns the lowest-energy result.
StepSolution solve_step(const StepProblem& problem, const SolverOptions& options = {});

/// max_e dist(0, subdifferential of the step objective in z_e), expressed as
/// a traction. Nodes whose post-step variation sits in a kink guard band are
/// skipped.
double stationarity_residual(const StepProblem& problem, const Eigen::VectorXd& z);

} // namespace cohesive
