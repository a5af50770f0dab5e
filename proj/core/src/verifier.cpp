#include "cohesive/verifier.hpp"

#include "cohesive/errors.hpp"
#include "cohesive/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace cohesive {

void CheckResult::observe(double violation, std::size_t at_step, std::size_t at_node)
{
    ++evaluated;
    if (evaluated == 1 || violation > worst) {
        worst = violation;
        step = at_step;
        node = at_node;
    }
    if (violation > tolerance)
        passed = false;
}

bool AuditReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

CheckResult check_energy_balance(const Trajectory& trajectory, const AuditTolerances& tol)
{
    CheckResult check;
    check.name = "energy_balance";
    check.tolerance = tol.energy;
    double max_abs = 0.0;
    for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
        const double drift = trajectory.steps[i].drift;
        max_abs = std::max(max_abs, std::abs(drift));
        check.observe(drift - trajectory.eta, i, 0);
    }
    check.metrics = {{"eta", trajectory.eta}, {"max_abs_drift", max_abs}};
    return check;
}

CheckResult check_irreversibility(const Trajectory& trajectory, const LawField& laws,
                                  const AuditTolerances& tol)
{
    CheckResult check;
    check.name = "irreversibility";
    check.tolerance = 0.0;
    const auto& steps = trajectory.steps;
    if (steps.empty())
        return check;
    const auto m = static_cast<std::size_t>(steps.front().z.size());

    // Violations are normalized by each node's tolerance so a single
    // threshold of zero applies.
    auto allowance = [&](std::size_t e, double magnitude) {
        return tol.irreversibility * std::max(laws[e].scale(), magnitude);
    };

    for (std::size_t e = 0; e < m; ++e) {
        const auto n = static_cast<Eigen::Index>(e);
        check.observe(std::abs(steps[0].z[n]) - steps[0].v[n] - allowance(e, 0.0), 0, e);
    }
    for (std::size_t i = 1; i < steps.size(); ++i)
        for (std::size_t e = 0; e < m; ++e) {
            const auto n = static_cast<Eigen::Index>(e);
            const double v0 = steps[i - 1].v[n], v1 = steps[i].v[n];
            const double z0 = steps[i - 1].z[n], z1 = steps[i].z[n];
            const double allow = tol.irreversibility * laws[e].scale();
            const double violation =
                std::max({v0 - v1, (v0 + z0) - (v1 + z1), (v0 - z0) - (v1 - z1)});
            check.observe(violation - allow, i, e);
        }

    const auto sample = sample_indices(steps.size(), 64);
    for (std::size_t a = 0; a < sample.size(); ++a)
        for (std::size_t b = a + 1; b < sample.size(); ++b) {
            const auto& early = steps[sample[a]];
            const auto& late = steps[sample[b]];
            for (std::size_t e = 0; e < m; ++e) {
                const auto n = static_cast<Eigen::Index>(e);
                const double need = early.v[n] + std::abs(late.z[n] - early.z[n]);
                check.observe(need - late.v[n] - allowance(e, late.v[n]), sample[b], e);
            }
        }
    return check;
}

CheckResult check_kkt(const Trajectory& trajectory, const LawField& laws, const AuditTolerances& tol)
{
    CheckResult check;
    check.name = "kkt_traction_bound";
    check.tolerance = tol.kkt;
    for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
        const auto& r = trajectory.steps[i];
        for (Eigen::Index e = 0; e < r.z.size(); ++e) {
            const auto& law = laws[static_cast<std::size_t>(e)];
            if (in_kink_guard_band(law, r.v[e])) {
                ++check.skipped;
                continue;
            }
            check.observe(std::abs(r.traction[e]) - law.derivative(r.v[e]), i,
                          static_cast<std::size_t>(e));
        }
    }
    return check;
}

CheckResult check_flow_rule(const Trajectory& trajectory, const LawField& laws,
                            const AuditTolerances& tol)
{
    CheckResult check;
    check.name = "flow_rule";
    check.tolerance = tol.flow;
    std::size_t slipping = 0;
    for (std::size_t i = 1; i < trajectory.steps.size(); ++i) {
        const auto& prev = trajectory.steps[i - 1];
        const auto& r = trajectory.steps[i];
        for (Eigen::Index e = 0; e < r.z.size(); ++e) {
            const double dz = r.z[e] - prev.z[e];
            if (!(std::abs(dz) > tol.slip))
                continue;
            const auto& law = laws[static_cast<std::size_t>(e)];
            if (in_kink_guard_band(law, r.v[e])) {
                ++check.skipped;
                continue;
            }
            ++slipping;
            const double expected = std::copysign(1.0, dz) * law.derivative(r.v[e]);
            check.observe(std::abs(r.traction[e] - expected), i, static_cast<std::size_t>(e));
        }
    }
    check.metrics = {{"slipping_evaluations", static_cast<double>(slipping)}};
    return check;
}

CheckResult check_global_stability(const Trajectory& trajectory, const ReducedModel& model,
                                   const LawField& laws, const std::vector<std::size_t>& sample_steps,
                                   const StabilityOptions& options, const AuditTolerances& tol)
{
    CheckResult check;
    check.name = "global_stability";
    check.tolerance = tol.stability;
    const bool use_oracle = model.size() <= std::min(options.oracle_limit, oracle_max_dim);
    for (std::size_t i : sample_steps) {
        const auto& r = trajectory.steps.at(i);
        const StepProblem problem{model, laws, r.v, r.z, r.amp};
        const double recorded = step_objective(problem, r.z);
        double competitor = recorded;
        if (use_oracle) {
            const GridSpec grid = default_grid(problem, options.grid_step, options.grid_budget);
            competitor = brute_force_step(problem, grid).value;
        }
        else {
            try {
                competitor = solve_step(problem, options.solver).total;
            }
            catch (const NonConvergence& e) {
                competitor = e.best().total;
            }
        }
        check.observe(recorded - competitor, i, 0);
    }
    check.metrics = {{"oracle_mode", use_oracle ? 1.0 : 0.0}};
    return check;
}

CheckResult check_bulk_equilibrium(const Trajectory& trajectory, const ReducedModel& model,
                                   const std::vector<std::size_t>& sample_steps,
                                   const AuditTolerances& tol)
{
    CheckResult check;
    check.name = "bulk_equilibrium";
    check.tolerance = tol.bulk_residual;
    if (!model.has_bulk())
        return check;
    for (std::size_t i : sample_steps) {
        const auto& r = trajectory.steps.at(i);
        const Eigen::VectorXd u = model.reconstruct(r.z, r.amp);
        const double reduced = model.energy(r.z, r.amp);
        const double energy_gap =
            std::abs(model.field_energy(u) - reduced) / std::max(1.0, std::abs(reduced));
        check.observe(std::max(model.bulk_residual(u), energy_gap), i, 0);
    }
    return check;
}

std::vector<std::size_t> sample_indices(std::size_t size, std::size_t count)
{
    std::set<std::size_t> picked;
    if (size == 0 || count == 0)
        return {};
    if (count >= size) {
        std::vector<std::size_t> all(size);
        for (std::size_t i = 0; i < size; ++i)
            all[i] = i;
        return all;
    }
    for (std::size_t j = 0; j < count; ++j)
        picked.insert(j * (size - 1) / (count - 1 == 0 ? 1 : count - 1));
    picked.insert(size - 1);
    return {picked.begin(), picked.end()};
}

AuditReport audit(const Trajectory& trajectory, const ReducedModel& model, const LawField& laws,
                  const StabilityOptions& stability, const AuditTolerances& tol)
{
    AuditReport report;
    report.checks.push_back(check_energy_balance(trajectory, tol));
    report.checks.push_back(check_irreversibility(trajectory, laws, tol));
    report.checks.push_back(check_kkt(trajectory, laws, tol));
    report.checks.push_back(check_flow_rule(trajectory, laws, tol));
    const auto samples = sample_indices(trajectory.steps.size(), 8);
    report.checks.push_back(
        check_global_stability(trajectory, model, laws, samples, stability, tol));
    if (model.has_bulk())
        report.checks.push_back(check_bulk_equilibrium(trajectory, model, samples, tol));
    if (!trajectory.complete) {
        CheckResult incomplete;
        incomplete.name = "run_complete";
        incomplete.passed = false;
        incomplete.worst = 1.0;
        report.checks.push_back(incomplete);
    }
    return report;
}

namespace {

bool column_nonincreasing(const std::vector<RefinementRow>& rows, double RefinementRow::*column,
                          double slack)
{
    if (rows.size() < 3)
        return true;
    const std::size_t last = rows.size() - 2; // final non-reference row
    for (std::size_t i = 1; i <= last; ++i) {
        const double allowed = rows[i - 1].*column * (i == last ? 1.0 + slack : 1.0);
        if (rows[i].*column > allowed)
            return false;
    }
    return true;
}

} // namespace

bool RefinementTable::v_nonincreasing(double slack) const
{
    return column_nonincreasing(rows, &RefinementRow::v_error, slack);
}

bool RefinementTable::z_nonincreasing(double slack) const
{
    return column_nonincreasing(rows, &RefinementRow::z_error, slack);
}

RefinementTable refinement_study(const std::function<Trajectory(int)>& run_with_k,
                                 const LawField& laws, std::vector<int> ks)
{
    if (ks.empty())
        throw InvalidParameter("refinement study needs at least one k");
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 10)
            throw InvalidParameter("refinement study needs every k >= 10");
        if (i > 0 && ks[i] <= ks[i - 1])
            throw InvalidParameter("refinement study needs ascending k");
    }

    std::vector<Trajectory> runs;
    runs.reserve(ks.size());
    for (int k : ks)
        runs.push_back(run_with_k(k));
    const Trajectory& reference = runs.back();

    RefinementTable table;
    constexpr int intervals = 40;
    for (int j = 0; j < intervals; ++j)
        table.sample_times.push_back(reference.final_time * (j + 0.5) / intervals);

    for (std::size_t r = 0; r < runs.size(); ++r) {
        const Trajectory& run = runs[r];
        RefinementRow row;
        row.k = ks[r];
        row.eta = run.eta;
        for (const auto& record : run.steps)
            row.max_drift = std::max(row.max_drift, std::abs(record.drift));
        for (double t : table.sample_times) {
            const auto& a = run.steps[record_at(run, t)];
            const auto& b = reference.steps[record_at(reference, t)];
            for (Eigen::Index e = 0; e < a.z.size(); ++e) {
                const double theta = laws[static_cast<std::size_t>(e)].threshold();
                const double va = std::min(a.v[e], theta);
                const double vb = std::min(b.v[e], theta);
                row.v_error = std::max(row.v_error, std::abs(va - vb));
                row.z_error = std::max(row.z_error, std::abs(a.z[e] - b.z[e]));
            }
        }
        const std::size_t m = run.steps.empty() ? 0 : static_cast<std::size_t>(run.steps[0].z.size());
        for (std::size_t e = 0; e < m; ++e)
            row.rupture_times.push_back(rupture_time(run, e));
        table.rows.push_back(std::move(row));
    }
    return table;
}

FatigueComparison compare_fatigue(const Trajectory& trajectory, const LawField& laws,
                                  const TriangleWave& wave, double stiffness, std::size_t node,
                                  double fraction)
{
    if (trajectory.steps.empty())
        throw InvalidParameter("compare_fatigue: empty trajectory");
    if (node >= laws.size())
        throw std::out_of_range("compare_fatigue: node outside the interface");
    const CohesiveLaw& law = laws[node];
    const auto at = static_cast<Eigen::Index>(node);
    const double v0 = trajectory.steps.front().v[at];
    const double cap = fraction * law.kappa();

    FatigueComparison out;
    const FatigueRecursion reference =
        scalar_fatigue_recursion(law, stiffness, wave.peak, wave.trough, wave.cycles, v0);
    for (const auto& cycle : reference.cycles)
        out.v_recursion.push_back(cycle.v);

    out.strictly_increasing = true;
    double previous = v0;
    for (int c = 1; c <= wave.cycles; ++c) {
        const double t = wave.trough_time(c);
        if (t > trajectory.final_time)
            break;
        const double v = trajectory.steps[record_at(trajectory, t)].v[at];
        out.v_evolution.push_back(v);
        out.strictly_increasing = out.strictly_increasing && v > previous;
        previous = v;
        if (!out.first_evolution && law.evaluate(v) > cap)
            out.first_evolution = c;
    }
    for (std::size_t c = 0; c < out.v_recursion.size(); ++c) {
        if (!out.first_recursion && law.evaluate(out.v_recursion[c]) > cap)
            out.first_recursion = static_cast<int>(c) + 1;
        if (c < out.v_evolution.size())
            out.max_difference = std::max(out.max_difference, std::abs(out.v_recursion[c] - out.v_evolution[c]));
    }
    out.final_g = law.evaluate(trajectory.steps.back().v[at]);
    return out;
}

} // namespace cohesive
