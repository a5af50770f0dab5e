#include "cohesive/oracle.hpp"

#include "cohesive/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cohesive {

namespace {

/// Step objective evaluated straight from S, c and the laws.
class Objective {
public:
    explicit Objective(const StepProblem& problem)
        : problem_(problem), m_(static_cast<std::size_t>(problem.model.size()))
    {}

    double operator()(const std::array<double, oracle_max_dim>& z) const
    {
        const auto& s = problem_.model.stiffness();
        const auto& c = problem_.model.load_unit();
        const auto weights = problem_.model.weights();
        const double amp = problem_.amp;
        double value = 0.5 * amp * amp * problem_.model.e0_unit();
        for (std::size_t i = 0; i < m_; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            double row = 0.0;
            for (std::size_t j = 0; j < m_; ++j)
                row += s(ii, static_cast<Eigen::Index>(j)) * z[j];
            value += 0.5 * z[i] * row - amp * c[ii] * z[i];
            value += weights[i] * problem_.laws[i].evaluate(problem_.v_prev[ii] +
                                                            std::abs(z[i] - problem_.p[ii]));
        }
        return value;
    }

    std::size_t dim() const { return m_; }
    double p(std::size_t e) const { return problem_.p[static_cast<Eigen::Index>(e)]; }

private:
    const StepProblem& problem_;
    std::size_t m_;
};

using GridPoint = std::array<double, oracle_max_dim>;

bool lexicographically_closer(const Objective& f, const GridPoint& a, const GridPoint& b)
{
    for (std::size_t e = 0; e < f.dim(); ++e) {
        const double da = std::abs(a[e] - f.p(e));
        const double db = std::abs(b[e] - f.p(e));
        if (da != db)
            return da < db;
    }
    return false;
}

struct Best {
    GridPoint z{};
    double value = infinity;

    void offer(const Objective& f, const GridPoint& z_new, double v)
    {
        if (v < value || (v == value && lexicographically_closer(f, z_new, z))) {
            z = z_new;
            value = v;
        }
    }
};

/// Scans the tensor grid lo + i * step, i = 0..count-1 in every coordinate.
void scan(const Objective& f, const GridPoint& lo, const std::array<long, oracle_max_dim>& count,
          double step, Best& best)
{
    const std::size_t m = f.dim();
    std::array<long, oracle_max_dim> idx{};
    GridPoint z{};
    while (true) {
        for (std::size_t e = 0; e < m; ++e)
            z[e] = lo[e] + static_cast<double>(idx[e]) * step;
        best.offer(f, z, f(z));
        std::size_t e = 0;
        while (e < m && ++idx[e] == count[e]) {
            idx[e] = 0;
            ++e;
        }
        if (e == m)
            break;
    }
}

void golden_polish(const Objective& f, Best& best, double half_width)
{
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int pass = 0; pass < 200; ++pass) {
        const double before = best.value;
        for (std::size_t e = 0; e < f.dim(); ++e) {
            GridPoint z = best.z;
            auto along = [&](double x) {
                z[e] = x;
                return f(z);
            };
            double a = best.z[e] - half_width;
            double b = best.z[e] + half_width;
            double x1 = b - ratio * (b - a);
            double x2 = a + ratio * (b - a);
            double f1 = along(x1);
            double f2 = along(x2);
            for (int it = 0; it < 100 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
                if (f1 <= f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - ratio * (b - a);
                    f1 = along(x1);
                }
                else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + ratio * (b - a);
                    f2 = along(x2);
                }
            }
            for (double x : {x1, x2, f.p(e)}) {
                GridPoint trial = best.z;
                trial[e] = x;
                best.offer(f, trial, f(trial));
            }
        }
        if (!(best.value < before))
            break;
    }
}

} // namespace

double grid_size(const GridSpec& grid)
{
    double total = 1.0;
    for (std::size_t e = 0; e < grid.lo.size(); ++e)
        total *= std::floor((grid.hi[e] - grid.lo[e]) / grid.step) + 1.0;
    return total;
}

GridSpec default_grid(const StepProblem& problem, double step, double budget)
{
    check_problem(problem);
    const Eigen::VectorXd elastic = problem.model.elastic_minimizer(problem.amp);
    double margin = 0.0;
    for (const auto& law : problem.laws.laws())
        margin = std::max(margin, 2.0 * law.scale());

    GridSpec grid;
    grid.budget = budget;
    for (Eigen::Index e = 0; e < elastic.size(); ++e) {
        grid.lo.push_back(std::min(problem.p[e], elastic[e]) - margin);
        grid.hi.push_back(std::max(problem.p[e], elastic[e]) + margin);
    }
    grid.step = step;
    const double m = static_cast<double>(grid.lo.size());
    while (grid_size(grid) > budget) {
        double widest = 0.0;
        for (std::size_t e = 0; e < grid.lo.size(); ++e)
            widest = std::max(widest, grid.hi[e] - grid.lo[e]);
        grid.step = std::max(grid.step * 1.01, widest / (std::pow(budget, 1.0 / m) - 1.0));
    }
    return grid;
}

OracleResult brute_force_step(const StepProblem& problem, const GridSpec& grid)
{
    check_problem(problem);
    const std::size_t m = problem.model.size();
    if (m > oracle_max_dim)
        throw InvalidParameter("brute-force oracle supports at most 3 interface nodes");
    if (grid.lo.size() != m || grid.hi.size() != m)
        throw DimensionMismatch("grid box does not match the interface size");
    if (!(grid.step > 0.0))
        throw InvalidParameter("grid step must be positive");
    const double points = grid_size(grid);
    if (points > grid.budget)
        throw InvalidParameter("grid exceeds its point budget");

    const Objective f(problem);
    Best best;
    GridPoint lo{};
    std::array<long, oracle_max_dim> count{};
    for (std::size_t e = 0; e < m; ++e) {
        lo[e] = grid.lo[e];
        count[e] = static_cast<long>(std::floor((grid.hi[e] - grid.lo[e]) / grid.step)) + 1;
    }
    scan(f, lo, count, grid.step, best);

    // Zoom: rescan a 41^m box of width 4 coarse steps around the best point.
    double step = grid.step;
    for (int level = 0; level < 4; ++level) {
        const double fine = step / 10.0;
        for (std::size_t e = 0; e < m; ++e) {
            lo[e] = best.z[e] - 2.0 * step;
            count[e] = 41;
        }
        scan(f, lo, count, fine, best);
        step = fine;
    }
    golden_polish(f, best, 2.0 * step);

    OracleResult result;
    result.z = Eigen::VectorXd(static_cast<Eigen::Index>(m));
    for (std::size_t e = 0; e < m; ++e)
        result.z[static_cast<Eigen::Index>(e)] = best.z[e];
    result.value = best.value;
    result.grid_points = points;
    return result;
}

namespace {

/// Slides z toward `target` until s |target - z| = g'(v + |z - z0|).
/// Returns {z, v}; no motion when the traction is within the threshold.
std::pair<double, double> slide(const CohesiveLaw& law, double stiffness, double target, double z0,
                                double v0)
{
    const double direction = target >= z0 ? 1.0 : -1.0;
    auto excess = [&](double travel) {
        return stiffness * (std::abs(target - z0) - travel) - law.derivative(v0 + travel);
    };
    if (!(excess(0.0) > 0.0))
        return {z0, v0};
    double lo = 0.0;
    double hi = std::abs(target - z0);
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    const double travel = 0.5 * (lo + hi);
    return {z0 + direction * travel, v0 + travel};
}

} // namespace

FatigueRecursion scalar_fatigue_recursion(const CohesiveLaw& law, double stiffness, double peak,
                                          double trough, int n_cycles, double v0)
{
    if (!(stiffness > 0.0))
        throw InvalidParameter("fatigue recursion needs a positive stiffness");
    if (n_cycles < 0)
        throw InvalidParameter("fatigue recursion needs a nonnegative cycle count");

    FatigueRecursion out;
    out.slips = law.derivative(v0) < stiffness * std::abs(peak);
    double z = 0.0;
    double v = v0;
    for (int cycle = 1; cycle <= n_cycles; ++cycle) {
        FatigueCycle record;
        record.cycle = cycle;
        std::tie(z, v) = slide(law, stiffness, peak, z, v);
        record.z_up = z;
        std::tie(z, v) = slide(law, stiffness, trough, z, v);
        record.z_down = z;
        record.v = v;
        out.cycles.push_back(record);
    }
    return out;
}

} // namespace cohesive
