#pragma once

#include "cohesive/cohesive_law.hpp"
#include "cohesive/reduced_system.hpp"
#include "cohesive/step_minimizer.hpp"

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cohesive {

class LoadProgram;

/// Repeated 0 -> peak -> trough -> 0 cycles, each of length `period`, split
/// into legs proportional to the amplitude travelled.
struct TriangleWave {
    double peak = 0.0;
    double trough = 0.0;
    int cycles = 1;
    double period = 1.0;

    /// Time at which cycle `cycle` (1-based) reaches the trough.
    double trough_time(int cycle) const;
};

/// Piecewise-linear amplitude of the boundary datum w(t) = amp(t) * y / ly.
class LoadProgram {
public:
    struct Breakpoint {
        double time;
        double amp;
    };

    /// Requires t_0 = 0 and strictly increasing times; throws ConfigError.
    explicit LoadProgram(std::vector<Breakpoint> breakpoints);

    /// Throws ConfigError for a nonpositive period, fewer than one cycle or a
    /// flat wave.
    static LoadProgram triangle_wave(const TriangleWave& wave);

    double amplitude(double t) const;
    double final_time() const noexcept { return points_.back().time; }
    const std::vector<Breakpoint>& breakpoints() const noexcept { return points_; }
    /// Integral of |amp'| over [t0, t1].
    double variation(double t0, double t1) const;

private:
    std::vector<Breakpoint> points_;
};

struct InitialState {
    Eigen::VectorXd z0; ///< initial jump
    Eigen::VectorXd v0; ///< initial cumulated variation, v0 >= |z0|
};

InitialState zero_initial_state(std::size_t nodes);

struct StepRecord {
    int step = 0;
    double time = 0.0;
    double amp = 0.0;
    Eigen::VectorXd z;
    Eigen::VectorXd v;
    Eigen::VectorXd traction;
    std::vector<bool> broken; ///< v_e >= theta_e
    double elastic = 0.0;
    double dissipated = 0.0; ///< sum_e w_e g_e(v_e)
    double work = 0.0;       ///< cumulative work of the boundary datum
    double drift = 0.0;      ///< (elastic + dissipated) - (initial total) - work
    int sweeps = 0;
    StartKind start = StartKind::stay;
    double residual = 0.0;
};

struct Trajectory {
    std::vector<StepRecord> steps; ///< steps[0] is the initial state
    int k = 0;
    double final_time = 0.0;
    double eta = 0.0; ///< energy-inequality slack for this partition
    bool complete = true;
    std::string failure;
};

/// The recorded initial state can be lowered by more than the solver
/// tolerance; carries the improving competitor.
class InitialNotStable : public std::runtime_error {
public:
    InitialNotStable(const std::string& what, Eigen::VectorXd competitor, double improvement)
        : std::runtime_error(what), competitor_(std::move(competitor)), improvement_(improvement)
    {}
    const Eigen::VectorXd& competitor() const noexcept { return competitor_; }
    double improvement() const noexcept { return improvement_; }

private:
    Eigen::VectorXd competitor_;
    double improvement_;
};

struct EvolutionOptions {
    SolverOptions solver;
    /// Multiplier of ||grad w_hat|| in the energy bookkeeping. Set from the mesh
    /// when the model has one; must be given for matrix-only models.
    std::optional<double> lift_gradient_norm;
};

/// Incremental minimization on the uniform partition t_i = i T / k.
///
/// Each step solves the step problem with p = z_{i-1}, V = V_{i-1} and
/// amp = amp(t_i), then sets V_i = V_{i-1} + |z_i - z_{i-1}|. Work increments
/// use the field at the left end of the step. A step solver failure stops the
/// run and returns the partial trajectory with `complete == false`.
///
/// Throws InitialNotStable if one step at t = 0 from the initial state lowers
/// the energy by more than the solver tolerance, DomainError if v0 < |z0|.
Trajectory run(const ReducedModel& model, const LawField& laws, const LoadProgram& load, int k,
               const InitialState& initial, const EvolutionOptions& options = {});

/// eta_k = 1/2 (max over steps of int |grad w'|) (int_0^T |grad w'|).
double eta_bound(const LoadProgram& load, double lift_gradient_norm, int k);

/// sum_{h=i+1..j} |z_h - z_{h-1}| at `node`.
double discrete_variation(const Trajectory& trajectory, std::size_t node, std::size_t i,
                          std::size_t j);

/// Time of the first record with v_e >= theta_e, if any.
std::optional<double> rupture_time(const Trajectory& trajectory, std::size_t node);

/// Index of the record active at time t under piecewise-constant interpolation.
std::size_t record_at(const Trajectory& trajectory, double t);

} // namespace cohesive
