#include "cohesive/evolution.hpp"

#include "cohesive/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cohesive {

LoadProgram::LoadProgram(std::vector<Breakpoint> breakpoints) : points_(std::move(breakpoints))
{
    if (points_.size() < 2)
        throw ConfigError("load.breakpoints", "needs at least two breakpoints");
    if (points_.front().time != 0.0)
        throw ConfigError("load.breakpoints", "must start at t = 0");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].time) || !std::isfinite(points_[i].amp))
            throw ConfigError("load.breakpoints", "entries must be finite");
        if (i > 0 && !(points_[i].time > points_[i - 1].time))
            throw ConfigError("load.breakpoints", "times must be strictly increasing");
    }
}

double TriangleWave::trough_time(int cycle) const
{
    const double legs = std::abs(peak) + std::abs(peak - trough) + std::abs(trough);
    return period * (cycle - 1) + period * (std::abs(peak) + std::abs(peak - trough)) / legs;
}

LoadProgram LoadProgram::triangle_wave(const TriangleWave& wave)
{
    const auto [peak, trough, cycles, period] = wave;
    if (cycles < 1)
        throw ConfigError("load.triangle_wave.cycles", "must be at least 1");
    if (!(period > 0.0) || !std::isfinite(period))
        throw ConfigError("load.triangle_wave.period", "must be positive");
    if (!std::isfinite(peak) || !std::isfinite(trough))
        throw ConfigError("load.triangle_wave", "peak and trough must be finite");
    const double legs = std::abs(peak) + std::abs(peak - trough) + std::abs(trough);
    if (!(legs > 0.0))
        throw ConfigError("load.triangle_wave", "peak and trough cannot both be zero");
    const double t_peak = period * std::abs(peak) / legs;
    const double t_trough = t_peak + period * std::abs(peak - trough) / legs;

    std::vector<Breakpoint> points{{0.0, 0.0}};
    for (int c = 0; c < cycles; ++c) {
        const double start = period * c;
        if (t_peak > 0.0)
            points.push_back({start + t_peak, peak});
        if (t_trough > t_peak)
            points.push_back({start + t_trough, trough});
        if (period > t_trough)
            points.push_back({period * (c + 1), 0.0});
    }
    return LoadProgram(std::move(points));
}

double LoadProgram::amplitude(double t) const
{
    if (t <= 0.0)
        return points_.front().amp;
    if (t >= points_.back().time)
        return points_.back().amp;
    const auto next = std::upper_bound(points_.begin(), points_.end(), t,
                                       [](double value, const Breakpoint& b) { return value < b.time; });
    const auto& b = *next;
    const auto& a = *(next - 1);
    if (t == a.time)
        return a.amp;
    return a.amp + (b.amp - a.amp) * ((t - a.time) / (b.time - a.time));
}

double LoadProgram::variation(double t0, double t1) const
{
    double total = 0.0;
    for (std::size_t i = 1; i < points_.size(); ++i) {
        const auto& a = points_[i - 1];
        const auto& b = points_[i];
        const double lo = std::max(t0, a.time);
        const double hi = std::min(t1, b.time);
        if (hi > lo)
            total += std::abs(b.amp - a.amp) * (hi - lo) / (b.time - a.time);
    }
    return total;
}

InitialState zero_initial_state(std::size_t nodes)
{
    const auto n = static_cast<Eigen::Index>(nodes);
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

double eta_bound(const LoadProgram& load, double lift_gradient_norm, int k)
{
    if (k < 1)
        throw InvalidParameter("eta bound needs k >= 1");
    const double final_time = load.final_time();
    double largest = 0.0;
    for (int i = 1; i <= k; ++i) {
        const double t0 = final_time * (i - 1) / k;
        const double t1 = final_time * i / k;
        largest = std::max(largest, load.variation(t0, t1));
    }
    const double norm2 = lift_gradient_norm * lift_gradient_norm;
    return 0.5 * norm2 * largest * load.variation(0.0, final_time);
}

namespace {

void fill_energies(StepRecord& record, const ReducedModel& model, const LawField& laws)
{
    record.elastic = model.energy(record.z, record.amp);
    record.dissipated = surface_energy(laws, model.weights(), record.v);
    record.traction = model.traction(record.z, record.amp);
    record.broken.resize(model.size());
    for (std::size_t e = 0; e < model.size(); ++e)
        record.broken[e] = record.v[static_cast<Eigen::Index>(e)] >= laws[e].threshold();
}

double lift_norm(const ReducedModel& model, const EvolutionOptions& options)
{
    if (options.lift_gradient_norm)
        return *options.lift_gradient_norm;
    if (model.has_bulk())
        return lift_gradient_norm(model.mesh().spec());
    return std::sqrt(model.e0_unit());
}

} // namespace

Trajectory run(const ReducedModel& model, const LawField& laws, const LoadProgram& load, int k,
               const InitialState& initial, const EvolutionOptions& options)
{
    if (k < 1)
        throw InvalidParameter("evolution needs at least one time step");
    const std::size_t m = model.size();
    laws.expect_size(m);
    if (static_cast<std::size_t>(initial.z0.size()) != m ||
        static_cast<std::size_t>(initial.v0.size()) != m)
        throw DimensionMismatch("initial state does not match the interface size");
    for (std::size_t e = 0; e < m; ++e) {
        const auto i = static_cast<Eigen::Index>(e);
        if (!(initial.v0[i] >= std::abs(initial.z0[i])))
            throw DomainError("initial variation must satisfy V0 >= |z0| at node " +
                              std::to_string(e));
    }

    Trajectory trajectory;
    trajectory.k = k;
    trajectory.final_time = load.final_time();
    trajectory.eta = eta_bound(load, lift_norm(model, options), k);

    StepRecord first;
    first.time = 0.0;
    first.amp = load.amplitude(0.0);
    first.z = initial.z0;
    first.v = initial.v0;
    fill_energies(first, model, laws);

    // The initial state must itself be a solution of the step problem at t = 0.
    {
        const StepProblem problem{model, laws, initial.v0, initial.z0, first.amp};
        const double recorded = first.elastic + first.dissipated;
        StepSolution probe;
        try {
            probe = solve_step(problem, options.solver);
        }
        catch (const NonConvergence& e) {
            probe = e.best();
        }
        const double improvement = recorded - probe.total;
        if (improvement > options.solver.tol * std::max(1.0, std::abs(recorded)))
            throw InitialNotStable("initial state is not globally stable", probe.z, improvement);
        first.residual = stationarity_residual(problem, initial.z0);
    }

    const double initial_total = first.elastic + first.dissipated;
    trajectory.steps.push_back(std::move(first));

    for (int i = 1; i <= k; ++i) {
        const StepRecord& prev = trajectory.steps.back();
        StepRecord record;
        record.step = i;
        record.time = trajectory.final_time * i / k;
        record.amp = load.amplitude(record.time);

        const StepProblem problem{model, laws, prev.v, prev.z, record.amp};
        StepSolution sol;
        try {
            sol = solve_step(problem, options.solver);
        }
        catch (const NonConvergence& e) {
            trajectory.complete = false;
            trajectory.failure = "step " + std::to_string(i) + ": " + e.what();
            return trajectory;
        }

        record.z = sol.z;
        record.v = prev.v + (sol.z - prev.z).cwiseAbs();
        record.work = prev.work + (record.amp - prev.amp) * model.lift_work_rate(prev.z, prev.amp);
        record.sweeps = sol.sweeps;
        record.start = sol.start;
        record.residual = sol.residual;
        fill_energies(record, model, laws);
        record.drift = record.elastic + record.dissipated - initial_total - record.work;
        trajectory.steps.push_back(std::move(record));
    }
    return trajectory;
}

double discrete_variation(const Trajectory& trajectory, std::size_t node, std::size_t i,
                          std::size_t j)
{
    if (i > j || j >= trajectory.steps.size())
        throw std::out_of_range("discrete_variation: step index out of range");
    if (trajectory.steps.empty() || node >= static_cast<std::size_t>(trajectory.steps[0].z.size()))
        throw std::out_of_range("discrete_variation: node out of range");
    const auto e = static_cast<Eigen::Index>(node);
    double total = 0.0;
    for (std::size_t h = i + 1; h <= j; ++h)
        total += std::abs(trajectory.steps[h].z[e] - trajectory.steps[h - 1].z[e]);
    return total;
}

std::optional<double> rupture_time(const Trajectory& trajectory, std::size_t node)
{
    for (const auto& record : trajectory.steps)
        if (record.broken.at(node))
            return record.time;
    return std::nullopt;
}

std::size_t record_at(const Trajectory& trajectory, double t)
{
    const auto it = std::upper_bound(trajectory.steps.begin(), trajectory.steps.end(), t,
                                     [](double value, const StepRecord& r) { return value < r.time; });
    return it == trajectory.steps.begin() ? 0 : static_cast<std::size_t>(it - trajectory.steps.begin()) - 1;
}

} // namespace cohesive
