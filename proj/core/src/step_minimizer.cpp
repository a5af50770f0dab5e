#include "cohesive/step_minimizer.hpp"

#include "cohesive/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace cohesive {

namespace {

constexpr int scan_intervals = 32;
constexpr double tie_relative = 1e-13;

bool tied(double lhs, double rhs)
{
    return std::abs(lhs - rhs) <= tie_relative * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

struct Candidate {
    double zeta;
    double value;
};

/// Keeps the lowest value; ties go to the candidate closer to p.
class BestCandidate {
public:
    explicit BestCandidate(double p) : p_(p) {}

    void offer(double zeta, double value)
    {
        if (!has_) {
            best_ = {zeta, value};
            has_ = true;
            return;
        }
        if (tied(value, best_.value)) {
            if (std::abs(zeta - p_) < std::abs(best_.zeta - p_))
                best_ = {zeta, value};
        }
        else if (value < best_.value) {
            best_ = {zeta, value};
        }
    }

    double zeta() const { return best_.zeta; }

private:
    double p_;
    Candidate best_{0.0, 0.0};
    bool has_ = false;
};

/// Local minima of phi(s) = 1/2 a s^2 + beta s + w g(v + s) on [0, s_max],
/// plus the piece endpoints.
void branch_candidates(double a, double beta, const CohesiveLaw& law, double v, double w,
                       std::vector<double>& out)
{
    const double s_max = -beta / a;
    if (!(s_max > 0.0))
        return;

    std::vector<double> cuts{0.0};
    if (std::isfinite(v))
        for (double kink : law.kinks()) {
            const double s = kink - v;
            if (s > 0.0 && s < s_max)
                cuts.push_back(s);
        }
    cuts.push_back(s_max);

    auto slope = [&](double s) {
        return a * s + beta + w * (std::isfinite(v) ? law.derivative(v + s) : 0.0);
    };
    auto slope_left = [&](double s) {
        return a * s + beta + w * (std::isfinite(v) ? law.derivative_left(v + s) : 0.0);
    };

    for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
        const double lo_end = cuts[piece];
        const double hi_end = cuts[piece + 1];
        out.push_back(hi_end);
        if (piece > 0)
            out.push_back(lo_end);

        double s_prev = lo_end;
        double f_prev = slope(lo_end);
        for (int j = 1; j <= scan_intervals; ++j) {
            const double s = j == scan_intervals
                                 ? hi_end
                                 : lo_end + (hi_end - lo_end) * static_cast<double>(j) / scan_intervals;
            const double f = j == scan_intervals ? slope_left(s) : slope(s);
            if (f_prev < 0.0 && f >= 0.0) {
                double lo = s_prev;
                double hi = s;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi)
                        break;
                    (slope(mid) < 0.0 ? lo : hi) = mid;
                }
                out.push_back(0.5 * (lo + hi));
            }
            s_prev = s;
            f_prev = f;
        }
    }
}

} // namespace

void check_problem(const StepProblem& problem)
{
    const std::size_t m = problem.model.size();
    problem.laws.expect_size(m);
    if (static_cast<std::size_t>(problem.v_prev.size()) != m ||
        static_cast<std::size_t>(problem.p.size()) != m)
        throw DimensionMismatch("step problem vectors do not match the interface size");
    for (Eigen::Index e = 0; e < problem.v_prev.size(); ++e)
        if (!(problem.v_prev[e] >= 0.0))
            throw DomainError("previous variation must be nonnegative");
}

double surface_energy(const LawField& laws, std::span<const double> weights,
                      const Eigen::VectorXd& v)
{
    double total = 0.0;
    for (std::size_t e = 0; e < weights.size(); ++e)
        total += weights[e] * laws[e].evaluate(v[static_cast<Eigen::Index>(e)]);
    return total;
}

double step_objective(const StepProblem& problem, const Eigen::VectorXd& z)
{
    const Eigen::VectorXd v = problem.v_prev + (z - problem.p).cwiseAbs();
    return problem.model.energy(z, problem.amp) +
           surface_energy(problem.laws, problem.model.weights(), v);
}

double solve_coordinate_1d(double a, double b, const CohesiveLaw& law, double v, double p,
                           double w)
{
    if (!(a > 0.0))
        throw InvalidParameter("coordinate curvature must be positive");
    if (!(v >= 0.0))
        throw DomainError("previous variation must be nonnegative");

    auto h = [&](double zeta) {
        return 0.5 * a * zeta * zeta + b * zeta + w * law.evaluate(v + std::abs(zeta - p));
    };

    const double beta_right = a * p + b;
    std::vector<double> right, left;
    branch_candidates(a, beta_right, law, v, w, right);
    branch_candidates(a, -beta_right, law, v, w, left);

    BestCandidate best(p);
    best.offer(p, h(p));
    for (double s : right)
        best.offer(p + s, h(p + s));
    for (double s : left)
        best.offer(p - s, h(p - s));
    return best.zeta();
}

namespace {

struct DescentResult {
    Eigen::VectorXd z;
    int sweeps = 0;
    bool converged = false;
};

DescentResult coordinate_descent(const StepProblem& problem, Eigen::VectorXd z,
                                 const SolverOptions& options)
{
    const auto& s = problem.model.stiffness();
    const auto& c = problem.model.load_unit();
    const auto weights = problem.model.weights();
    const Eigen::Index m = z.size();

    DescentResult result;
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        double max_move = 0.0;
        for (Eigen::Index e = 0; e < m; ++e) {
            const double a = s(e, e);
            const double b = s.row(e).dot(z) - a * z[e] - problem.amp * c[e];
            const double zeta = solve_coordinate_1d(a, b, problem.laws[static_cast<std::size_t>(e)],
                                                    problem.v_prev[e], problem.p[e],
                                                    weights[static_cast<std::size_t>(e)]);
            max_move = std::max(max_move, std::abs(zeta - z[e]));
            z[e] = zeta;
        }
        result.sweeps = sweep;
        if (max_move < options.tol) {
            result.converged = true;
            break;
        }
    }
    result.z = std::move(z);
    return result;
}

StepSolution finish(const StepProblem& problem, const DescentResult& run, StartKind start)
{
    StepSolution sol;
    sol.z = run.z;
    sol.sweeps = run.sweeps;
    sol.start = start;
    sol.elastic = problem.model.energy(run.z, problem.amp);
    const Eigen::VectorXd v_new = problem.v_prev + (run.z - problem.p).cwiseAbs();
    const auto weights = problem.model.weights();
    double surface = 0.0;
    double increment = 0.0;
    for (std::size_t e = 0; e < weights.size(); ++e) {
        const auto i = static_cast<Eigen::Index>(e);
        const double after = problem.laws[e].evaluate(v_new[i]);
        surface += weights[e] * after;
        increment += weights[e] * (after - problem.laws[e].evaluate(problem.v_prev[i]));
    }
    sol.total = sol.elastic + surface;
    sol.dissipation_increment = increment;
    sol.residual = stationarity_residual(problem, run.z);
    return sol;
}

} // namespace

StepSolution solve_step(const StepProblem& problem, const SolverOptions& options)
{
    check_problem(problem);
    if (!(options.tol > 0.0) || options.max_sweeps < 1)
        throw InvalidParameter("solver options need tol > 0 and max_sweeps >= 1");

    const std::size_t m = problem.model.size();
    std::vector<bool> pinned(m);
    for (std::size_t e = 0; e < m; ++e)
        pinned[e] = problem.v_prev[static_cast<Eigen::Index>(e)] < problem.laws[e].threshold();

    const std::vector<std::pair<StartKind, Eigen::VectorXd>> starts{
        {StartKind::stay, problem.p},
        {StartKind::elastic, problem.model.elastic_minimizer(problem.amp)},
        {StartKind::partial_rupture, problem.model.elastic_minimizer(problem.amp, pinned, problem.p)},
    };

    std::vector<StepSolution> solutions;
    bool all_converged = true;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        bool duplicate = false;
        for (std::size_t j = 0; j < i; ++j)
            duplicate = duplicate || starts[j].second == starts[i].second;
        if (duplicate)
            continue;
        const DescentResult run = coordinate_descent(problem, starts[i].second, options);
        all_converged = all_converged && run.converged;
        solutions.push_back(finish(problem, run, starts[i].first));
    }

    const StepSolution* best = &solutions.front();
    for (const auto& candidate : solutions) {
        if (tied(candidate.total, best->total)) {
            if ((candidate.z - problem.p).lpNorm<1>() < (best->z - problem.p).lpNorm<1>())
                best = &candidate;
        }
        else if (candidate.total < best->total) {
            best = &candidate;
        }
    }

    if (!all_converged)
        throw NonConvergence("coordinate descent exceeded " + std::to_string(options.max_sweeps) +
                                 " sweeps",
                             *best);
    return *best;
}

double stationarity_residual(const StepProblem& problem, const Eigen::VectorXd& z)
{
    check_problem(problem);
    const Eigen::VectorXd t = problem.model.traction(z, problem.amp);
    double worst = 0.0;
    for (Eigen::Index e = 0; e < z.size(); ++e) {
        const auto& law = problem.laws[static_cast<std::size_t>(e)];
        const double jump = z[e] - problem.p[e];
        const double v_new = problem.v_prev[e] + std::abs(jump);
        if (in_kink_guard_band(law, v_new))
            continue;
        double r = 0.0;
        if (jump == 0.0)
            r = std::max(0.0, std::abs(t[e]) - law.derivative(problem.v_prev[e]));
        else
            r = std::abs(t[e] - std::copysign(1.0, jump) * law.derivative(v_new));
        worst = std::max(worst, r);
    }
    return worst;
}

} // namespace cohesive
