// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "cohesive/evolution.hpp"
#include "cohesive/oracle.hpp"
#include "cohesive/output.hpp"
#include "cohesive/scenario.hpp"
#include "cohesive/verifier.hpp"

#include "support.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using namespace cohesive;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            passed = false;
            detail << " FAILED[" << what << "]";
        }
    }
};

double max_abs_drift(const Trajectory& t)
{
    double worst = 0.0;
    for (const auto& r : t.steps)
        worst = std::max(worst, std::abs(r.drift));
    return worst;
}

std::vector<fs::path> shipped_scenarios()
{
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(COHESIVE_SCENARIO_DIR))
        if (entry.path().extension() == ".json")
            paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    return paths;
}

/// Steps per unit of the scenario's natural clock: per cycle for a wave load.
int scaled_k(const Scenario& s, int k) { return s.wave ? k * s.wave->cycles : k; }

/// Rigorous search box: F(z) >= E_min + lambda_min/2 |z - z_el|^2 + sum w g(V),
/// and the minimizer satisfies F(z*) <= F(p).
GridSpec certified_box(const StepProblem& problem, double step, double budget)
{
    const auto& s = problem.model.stiffness();
    const double lambda = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s).eigenvalues().minCoeff();
    const Eigen::VectorXd elastic = problem.model.elastic_minimizer(problem.amp);
    const double floor = problem.model.energy(elastic, problem.amp) +
                         surface_energy(problem.laws, problem.model.weights(), problem.v_prev);
    const double gap = std::max(0.0, step_objective(problem, problem.p) - floor);
    const double radius = std::sqrt(2.0 * gap / lambda) + 2.0 * step;
    GridSpec grid;
    grid.step = step;
    grid.budget = budget;
    for (Eigen::Index e = 0; e < elastic.size(); ++e) {
        grid.lo.push_back(elastic[e] - radius);
        grid.hi.push_back(elastic[e] + radius);
    }
    return grid;
}

Outcome two_bar_closed_form()
{
    Outcome out;
    const ReducedModel model = fixture::two_bar();
    const LawField laws(2, CohesiveLaw::capped_linear(0.5, 1.0));
    const int k = 2000;
    const double dt = 2.0 / k;
    const Trajectory t = run(model, laws, LoadProgram({{0.0, 0.0}, {2.0, 2.0}}), k, zero_initial_state(2));
    out.require(t.complete, "complete");

    const auto rupture = rupture_time(t, 0);
    out.require(rupture && rupture_time(t, 1) == rupture, "rupture recorded");
    const double t_b = rupture.value_or(-1.0);

    double stick = 0.0, plateau = 0.0, post = 0.0;
    for (std::size_t i = 1; i < t.steps.size(); ++i) {
        const auto& r = t.steps[i];
        for (Eigen::Index e = 0; e < 2; ++e) {
            const double dz = r.z[e] - t.steps[i - 1].z[e];
            if (r.time <= 0.5)
                stick = std::max(stick, std::abs(r.z[e]));
            else if (r.time < t_b && std::abs(dz) > 1e-8)
                plateau = std::max(plateau, std::abs(r.traction[e] - 0.5));
            if (r.time >= t_b)
                post = std::max(post, std::abs(r.traction[e]));
        }
    }
    const double dissipated = t.steps.back().dissipated;
    out.require(stick == 0.0, "no slip for t <= 0.5");
    out.require(plateau <= 1e-6, "plateau traction");
    out.require(std::abs(t_b - 1.25) <= 2.0 * dt, "rupture time");
    out.require(post <= 1e-8, "post-rupture traction");
    out.require(std::abs(dissipated - 0.5) <= 1e-6, "dissipated energy");

    // Grid oracle at 1e-4 on the certified box for the step problems at a
    // stuck, a sliding and a broken record.
    double oracle_gap = 0.0;
    for (double time : {0.4, 1.0, 1.6}) {
        const std::size_t i = record_at(t, time);
        const auto& prev = t.steps[i - 1];
        const StepProblem problem{model, laws, prev.v, prev.z, t.steps[i].amp};
        const OracleResult oracle = brute_force_step(problem, certified_box(problem, 1e-4, 6e8));
        const double solver = step_objective(problem, t.steps[i].z);
        oracle_gap = std::max(oracle_gap, solver - oracle.value);
        oracle_gap = std::max(oracle_gap, (t.steps[i].z - oracle.z).cwiseAbs().maxCoeff() > 1e-3 ? 1.0 : 0.0);
    }
    out.require(oracle_gap <= 1e-6, "oracle cross-check");

    out.detail << "t_b=" << t_b << " plateau_err=" << plateau << " post_traction=" << post
               << " dissipated=" << dissipated << " oracle_gap=" << oracle_gap;
    return out;
}

struct BatteryProblem {
    std::unique_ptr<ReducedModel> model;
    std::unique_ptr<LawField> laws;
    Eigen::VectorXd v;
    Eigen::VectorXd p;
    double amp = 0.0;
    StepProblem problem() const { return {*model, *laws, v, p, amp}; }
};

std::unique_ptr<ReducedModel> battery_model(int m)
{
    if (m == 1)
        return std::make_unique<ReducedModel>(ReducedModel::from_matrices(
            Eigen::MatrixXd::Constant(1, 1, 0.8), Eigen::VectorXd::Constant(1, 0.8), 0.8, {1.0}));
    if (m == 2)
        return std::make_unique<ReducedModel>(fixture::condensed({1.5, 1.0, 1, 2}));
    return std::make_unique<ReducedModel>(fixture::condensed({1.0, 1.2, 2, 2}));
}

Outcome oracle_equivalence()
{
    Outcome out;
    fixture::Gen gen(20240611);
    std::map<std::string, int> regimes;
    double worst_f = 0.0, worst_z = 0.0;
    int count = 0;
    for (int m = 1; m <= 3; ++m)
        for (bool capped : {true, false})
            for (int regime = 0; regime < 4; ++regime) {
                BatteryProblem bp;
                bp.model = battery_model(m);
                std::vector<CohesiveLaw> list;
                for (int e = 0; e < m; ++e) {
                    const double kappa = gen.uniform(0.3, 0.8);
                    const double scale = gen.uniform(0.6, 1.4);
                    list.push_back(capped ? CohesiveLaw::capped_linear(kappa, scale)
                                          : CohesiveLaw::exponential(kappa, scale));
                }
                bp.laws = std::make_unique<LawField>(list);
                bp.p = Eigen::VectorXd::Zero(m);
                bp.v = Eigen::VectorXd::Zero(m);
                switch (regime) {
                case 0: // stick
                    bp.amp = gen.uniform(0.02, 0.08);
                    break;
                case 1: // slip
                    bp.p = gen.vector(m, 0.0, 0.2);
                    bp.v = bp.p.cwiseAbs() + gen.vector(m, 0.0, 0.2);
                    bp.amp = gen.uniform(0.8, 1.4);
                    break;
                case 2: // rupture
                    bp.p = gen.vector(m, 0.2, 0.4);
                    bp.v = bp.p + gen.vector(m, 0.2, 0.4);
                    bp.amp = gen.uniform(2.0, 3.0);
                    break;
                default: // reversed load on a partly broken interface
                    bp.p = gen.vector(m, -0.3, 0.3);
                    bp.v = bp.p.cwiseAbs() + gen.vector(m, 0.0, 1.5);
                    bp.amp = gen.uniform(-1.5, -0.5);
                    break;
                }
                const StepProblem problem = bp.problem();
                const StepSolution solved = solve_step(problem);
                const OracleResult oracle = brute_force_step(problem, default_grid(problem, 1e-3, 4e6));
                worst_f = std::max(worst_f, std::abs(solved.total - oracle.value) / std::max(1.0, std::abs(oracle.value)));
                worst_z = std::max(worst_z, (solved.z - oracle.z).cwiseAbs().maxCoeff());

                const double move = (solved.z - bp.p).cwiseAbs().maxCoeff();
                bool ruptured = false;
                for (Eigen::Index e = 0; e < m; ++e) {
                    const auto& law = (*bp.laws)[static_cast<std::size_t>(e)];
                    const double after = bp.v[e] + std::abs(solved.z[e] - bp.p[e]);
                    const double theta = law.kind() == LawKind::capped_linear ? law.scale() : 3.0 * law.scale();
                    ruptured = ruptured || (bp.v[e] < theta && after >= theta);
                }
                ++regimes[move <= 1e-9 ? "stick" : ruptured ? "rupture" : "slip"];
                ++count;
            }
    out.require(count >= 20, "battery size");
    out.require(worst_f <= 1e-6, "energy agreement");
    out.require(worst_z <= 1e-3, "jump agreement");
    out.require(regimes["stick"] > 0 && regimes["slip"] > 0 && regimes["rupture"] > 0, "regime coverage");
    out.detail << "problems=" << count << " stick=" << regimes["stick"] << " slip=" << regimes["slip"]
               << " rupture=" << regimes["rupture"] << " max_rel_dF=" << worst_f << " max_dz=" << worst_z;
    return out;
}

struct ShippedRun {
    std::string name;
    PreparedScenario prepared;
    Trajectory trajectory;
};

Outcome energy_inequality(const std::vector<fs::path>& scenarios)
{
    Outcome out;
    for (const auto& path : scenarios) {
        const PreparedScenario prepared = prepare(load_scenario(path));
        std::map<int, double> drift;
        for (int k : {100, 200, 400}) {
            const Trajectory t = run_scenario(prepared, scaled_k(prepared.scenario, k));
            out.require(t.complete, prepared.scenario.name + " complete k=" + std::to_string(k));
            double excess = -std::numeric_limits<double>::infinity();
            for (const auto& r : t.steps)
                excess = std::max(excess, r.drift - t.eta);
            out.require(excess <= 1e-8, prepared.scenario.name + " drift<=eta k=" + std::to_string(k));
            drift[k] = max_abs_drift(t);
        }
        out.require(drift[400] <= drift[100] / 1.5, prepared.scenario.name + " drift decay");
        out.detail << prepared.scenario.name << ":" << drift[100] << "->" << drift[400] << " ";
    }
    return out;
}

Outcome irreversibility(const std::vector<ShippedRun>& runs)
{
    Outcome out;
    for (const auto& r : runs) {
        const CheckResult c = check_irreversibility(r.trajectory, r.prepared.laws);
        out.require(c.passed, r.name);
        out.detail << r.name << ":" << c.worst << " ";
    }
    const ShippedRun& probe = runs.front();
    Trajectory corrupted = probe.trajectory;
    const std::size_t at = corrupted.steps.size() / 2;
    corrupted.steps[at].v[0] = corrupted.steps[at - 1].v[0] - 1e-3;
    const CheckResult c = check_irreversibility(corrupted, probe.prepared.laws);
    out.require(!c.passed && c.step == at && c.node == 0u, "corruption detected");
    out.detail << "corruption at step " << at << " flagged=" << (!c.passed);
    return out;
}

Outcome kkt_and_flow(const std::vector<ShippedRun>& runs)
{
    Outcome out;
    for (const auto& r : runs) {
        const CheckResult kkt = check_kkt(r.trajectory, r.prepared.laws);
        const CheckResult flow = check_flow_rule(r.trajectory, r.prepared.laws);
        out.require(kkt.passed, r.name + " kkt");
        out.require(flow.passed, r.name + " flow");
        out.detail << r.name << ":" << kkt.worst << "/" << flow.worst << " ";
    }
    return out;
}

Outcome fatigue(const std::vector<ShippedRun>& runs)
{
    Outcome out;
    const auto it = std::find_if(runs.begin(), runs.end(), [](const ShippedRun& r) { return r.name == "two_bar_cyclic_fatigue"; });
    if (it == runs.end()) {
        out.require(false, "scenario missing");
        return out;
    }
    const auto& s = it->prepared.scenario;
    out.require(s.wave && it->trajectory.k == 200 * s.wave->cycles, "200 steps per cycle");
    const auto stiffness = uniform_jump_stiffness(it->prepared.model);
    out.require(stiffness.has_value(), "uniform stiffness");
    if (!s.wave || !stiffness)
        return out;
    const FatigueComparison cmp = compare_fatigue(it->trajectory, it->prepared.laws, *s.wave, *stiffness);
    out.require(cmp.strictly_increasing, "V strictly increasing");
    out.require(cmp.final_g >= 0.9 * it->prepared.laws[0].kappa(), "g(V_final) >= 0.9 kappa");
    out.require(cmp.first_evolution && cmp.first_recursion &&
                    std::abs(*cmp.first_evolution - *cmp.first_recursion) <= 2,
                "first cycle matches");
    out.detail << "first_cycle evolution=" << cmp.first_evolution.value_or(-1)
               << " recursion=" << cmp.first_recursion.value_or(-1) << " final_g=" << cmp.final_g
               << " max_dV=" << cmp.max_difference;
    return out;
}

Outcome refinement()
{
    Outcome out;
    const PreparedScenario prepared = prepare(load_scenario(fs::path(COHESIVE_SCENARIO_DIR) / "two_bar_monotone.json"));
    const RefinementTable table =
        refinement_study([&](int k) { return run_scenario(prepared, k); }, prepared.laws, {50, 100, 200, 400, 3200});
    out.require(table.v_nonincreasing(), "V^theta error nonincreasing");
    out.require(table.z_nonincreasing(), "jump error nonincreasing");

    const auto& first = table.rows.front();
    const auto& last = table.rows[table.rows.size() - 2];
    const double e_first = std::abs(first.rupture_times[0].value_or(0.0) - 1.25);
    const double e_last = std::abs(last.rupture_times[0].value_or(0.0) - 1.25);
    const double order = e_last > 0.0 ? std::log(e_first / e_last) / std::log(static_cast<double>(last.k) / first.k)
                                      : std::numeric_limits<double>::infinity();
    out.require(first.rupture_times[0] && last.rupture_times[0], "rupture recorded");
    out.require(order >= 0.8, "rupture-time order");
    for (const auto& row : table.rows)
        out.detail << "k=" << row.k << "(" << row.v_error << "," << row.z_error << ") ";
    out.detail << "order=" << order;
    return out;
}

std::string write_csv(const ShippedRun& r, const fs::path& file)
{
    {
        std::ofstream f(file, std::ios::binary);
        write_trajectory_csv(f, r.trajectory, r.prepared.laws);
    }
    std::ifstream f(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome determinism(const std::vector<ShippedRun>& runs)
{
    Outcome out;
    const fs::path dir = fs::temp_directory_path() / "cohesive_acceptance";
    fs::create_directories(dir);
    for (const auto& r : runs) {
        const ShippedRun again{r.name, r.prepared, run_scenario(r.prepared)};
        const std::string a = write_csv(r, dir / (r.name + "_a.csv"));
        const std::string b = write_csv(again, dir / (r.name + "_b.csv"));
        out.require(!a.empty() && a == b, r.name);
        out.detail << r.name << ":" << a.size() << "B ";
    }
    fs::remove_all(dir);
    return out;
}

} // namespace

int main()
{
    const auto scenarios = shipped_scenarios();
    std::vector<ShippedRun> runs;
    for (const auto& path : scenarios) {
        PreparedScenario prepared = prepare(load_scenario(path));
        Trajectory t = run_scenario(prepared);
        runs.push_back({prepared.scenario.name, std::move(prepared), std::move(t)});
    }

    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "two-bar closed form", two_bar_closed_form},
        {2, "oracle equivalence", oracle_equivalence},
        {3, "energy-dissipation inequality", [&] { return energy_inequality(scenarios); }},
        {4, "irreversibility", [&] { return irreversibility(runs); }},
        {5, "KKT and flow rule", [&] { return kkt_and_flow(runs); }},
        {6, "fatigue by small cycles", [&] { return fatigue(runs); }},
        {7, "refinement convergence", refinement},
        {8, "determinism", [&] { return determinism(runs); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail << " exception: " << e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += o.passed ? 0 : 1;
        std::printf("%s %d %s (%.1fs): %s\n", o.passed ? "PASS" : "FAIL", c.id, c.title, seconds, o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
