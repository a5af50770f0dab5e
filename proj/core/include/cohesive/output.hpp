#pragma once

#include "cohesive/cohesive_law.hpp"
#include "cohesive/evolution.hpp"
#include "cohesive/step_minimizer.hpp"
#include "cohesive/verifier.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <memory>
#include <string>

namespace cohesive {

/// trajectory.csv: step, t, amp, z_<e>..., V_<e>..., traction_<e>...,
/// elastic, dissipated, work, drift, gprime_<e>..., g_<e>...
/// The trailing g'(V_e) and g(V_e) columns let plotting tools stay law-agnostic.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const LawField& laws);

/// Final energies, per-node rupture times (null when never broken), eta_k,
/// drift extremes and solver statistics.
nlohmann::json summary_json(const Trajectory& trajectory, const std::string& name);

nlohmann::json audit_json(const AuditReport& report);

/// refinement.csv: k, v_theta_error, jump_error, max_drift, eta
void write_refinement_csv(std::ostream& out, const RefinementTable& table);

/// Self-contained step problem (S, c, e0, weights, laws, V, p, amp) for
/// oracle-compare.
nlohmann::json problem_dump(const StepProblem& problem);

/// Owns everything a StepProblem references.
struct LoadedProblem {
    std::unique_ptr<ReducedModel> model;
    std::unique_ptr<LawField> laws;
    Eigen::VectorXd v_prev;
    Eigen::VectorXd p;
    double amp = 0.0;

    StepProblem problem() const { return StepProblem{*model, *laws, v_prev, p, amp}; }
};

/// Throws ConfigError for malformed dumps.
LoadedProblem load_problem_dump(const nlohmann::json& dump);

} // namespace cohesive
