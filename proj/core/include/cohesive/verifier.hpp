#pragma once

#include "cohesive/cohesive_law.hpp"
#include "cohesive/evolution.hpp"
#include "cohesive/reduced_system.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cohesive {

struct CheckResult {
    std::string name;
    bool passed = true;
    double worst = 0.0;     ///< largest violation (<= 0 or small when passing)
    double tolerance = 0.0;
    std::optional<std::size_t> step;
    std::optional<std::size_t> node;
    std::size_t evaluated = 0;
    std::size_t skipped = 0; ///< kink guard band
    std::vector<std::pair<std::string, double>> metrics;

    /// Records a violation candidate; keeps the worst one and its location.
    void observe(double violation, std::size_t at_step, std::size_t at_node);
};

struct AuditReport {
    std::vector<CheckResult> checks;
    bool passed() const;
};

struct AuditTolerances {
    double energy = 1e-8;          ///< drift_i <= eta_k + energy
    double irreversibility = 1e-12; ///< relative to the law scale
    double kkt = 1e-6;
    double flow = 1e-6;
    double slip = 1e-8;            ///< |dz| above which a step counts as slipping
    double stability = 1e-8;
    double bulk_residual = 1e-10;
};

/// drift_i <= eta_k + tol at every step. Reports max |drift| as a metric.
CheckResult check_energy_balance(const Trajectory& trajectory, const AuditTolerances& tol = {});

/// V, V + z and V - z componentwise nondecreasing, V_0 >= |z_0|, and
/// V_j >= V_i + |z_j - z_i| on a subsample of step pairs.
CheckResult check_irreversibility(const Trajectory& trajectory, const LawField& laws,
                                  const AuditTolerances& tol = {});

/// |t_e| <= g'_e(V_e) at every step and node outside the kink guard band.
CheckResult check_kkt(const Trajectory& trajectory, const LawField& laws,
                      const AuditTolerances& tol = {});

/// At slipping steps, t_e = sign(dz_e) g'_e(V_e) with V after the update.
CheckResult check_flow_rule(const Trajectory& trajectory, const LawField& laws,
                            const AuditTolerances& tol = {});

struct StabilityOptions {
    std::size_t oracle_limit = 3; ///< brute force up to this many nodes
    double grid_step = 1e-3;
    double grid_budget = 4e6;
    SolverOptions solver;
};

/// Re-minimizes the step objective at each sampled record, taking the record
/// as the previous state, and fails if any competitor lowers the energy by
/// more than the tolerance. Uses the brute-force oracle for small interfaces
/// and the multi-start solver otherwise.
CheckResult check_global_stability(const Trajectory& trajectory, const ReducedModel& model,
                                   const LawField& laws, const std::vector<std::size_t>& sample_steps,
                                   const StabilityOptions& options = {},
                                   const AuditTolerances& tol = {});

/// Reconstructs the bulk field at sampled steps and checks discrete
/// equilibrium plus agreement of its energy with the reduced energy.
CheckResult check_bulk_equilibrium(const Trajectory& trajectory, const ReducedModel& model,
                                   const std::vector<std::size_t>& sample_steps,
                                   const AuditTolerances& tol = {});

/// `count` indices spread evenly over [0, size), always including the last.
std::vector<std::size_t> sample_indices(std::size_t size, std::size_t count);

/// Runs every check above.
AuditReport audit(const Trajectory& trajectory, const ReducedModel& model, const LawField& laws,
                  const StabilityOptions& stability = {}, const AuditTolerances& tol = {});

struct RefinementRow {
    int k = 0;
    double v_error = 0.0; ///< max over sample times and nodes of |V^theta - V^theta_ref|
    double z_error = 0.0; ///< same for the jump
    double max_drift = 0.0;
    double eta = 0.0;
    std::vector<std::optional<double>> rupture_times;
};

struct RefinementTable {
    std::vector<RefinementRow> rows; ///< ascending k, last row is the reference
    std::vector<double> sample_times;

    /// Errors nonincreasing in k over the non-reference rows, with `slack`
    /// relative tolerance on the last pair only.
    bool v_nonincreasing(double slack = 0.10) const;
    bool z_nonincreasing(double slack = 0.10) const;
};

/// Evaluates `run_with_k` for every k (ascending, each >= 10) and compares
/// each run with the finest one at the midpoints of a 40-interval time grid,
/// using the piecewise-constant interpolation in time.
RefinementTable refinement_study(const std::function<Trajectory(int)>& run_with_k,
                                 const LawField& laws, std::vector<int> ks);

struct FatigueComparison {
    std::vector<double> v_evolution; ///< V at the trough of each cycle
    std::vector<double> v_recursion; ///< V after each cycle of the scalar map
    std::optional<int> first_evolution; ///< first cycle with g(V) > fraction * kappa
    std::optional<int> first_recursion;
    bool strictly_increasing = false; ///< evolution V grows in every cycle
    double max_difference = 0.0;
    double final_g = 0.0; ///< g(V) at the end of the evolution
};

/// Samples one interface node of a triangle-wave evolution at every trough and
/// compares it with scalar_fatigue_recursion for the same law and stiffness.
FatigueComparison compare_fatigue(const Trajectory& trajectory, const LawField& laws,
                                  const TriangleWave& wave, double stiffness, std::size_t node = 0,
                                  double fraction = 0.9);

} // namespace cohesive
