#pragma once

#include "cohesive/cohesive_law.hpp"
#include "cohesive/step_minimizer.hpp"

#include <Eigen/Core>

#include <vector>

namespace cohesive {

/// Tensor grid over the jump vector for exhaustive search.
struct GridSpec {
    std::vector<double> lo;
    std::vector<double> hi;
    double step = 1e-3;
    double budget = 1e8; ///< cap on the number of grid points
};

struct OracleResult {
    Eigen::VectorXd z;
    double value = 0.0;
    double grid_points = 0.0;
};

inline constexpr std::size_t oracle_max_dim = 3;

/// Box containing p and the elastic minimizer with a margin of twice the
/// largest law scale, with the finest step >= `step` that fits the budget.
GridSpec default_grid(const StepProblem& problem, double step, double budget = 1e8);

/// Number of grid points of `grid`.
double grid_size(const GridSpec& grid);

/// Exhaustive minimization of the step objective: full tensor-grid scan,
/// zoomed rescans around the best point, then golden-section polish along
/// each coordinate until nothing improves. Deterministic scan order; ties go
/// to the lexicographically smallest |z - p|. Throws InvalidParameter when
/// m > 3 or the grid exceeds its budget.
OracleResult brute_force_step(const StepProblem& problem, const GridSpec& grid);

struct FatigueCycle {
    int cycle = 0;
    double v = 0.0;      ///< variation after the unloading leg
    double z_up = 0.0;   ///< jump at the peak
    double z_down = 0.0; ///< jump at the trough
};

struct FatigueRecursion {
    bool slips = false; ///< false when the first loading leg never reaches g'(v0)
    std::vector<FatigueCycle> cycles;
};

/// Quasistatic cycle map of a single interface point with elastic stiffness s
/// under a triangle wave peak -> trough. On each leg the jump slides while the
/// elastic traction s (amp - z) exceeds the threshold g'(V) in magnitude and
/// stops where they match, with dV = |dz| (solved by bisection to 1e-12).
FatigueRecursion scalar_fatigue_recursion(const CohesiveLaw& law, double stiffness, double peak,
                                          double trough, int n_cycles, double v0 = 0.0);

} // namespace cohesive
