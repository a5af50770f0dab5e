#include "cohesive/errors.hpp"
#include "cohesive/format.hpp"
#include "cohesive/oracle.hpp"
#include "cohesive/output.hpp"
#include "cohesive/scenario.hpp"
#include "cohesive/verifier.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cohesive;

namespace {

enum Exit : int {
    ok = 0,
    usage = 1,
    config_error = 2,
    solver_failure = 3,
    initial_not_stable = 4,
    audit_failure = 5,
};

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const nlohmann::json& value)
{
    auto out = open_output(path);
    out << value.dump(2) << '\n';
}

fs::path prepare_directory(const Scenario& scenario)
{
    const fs::path dir = output_directory(scenario);
    fs::create_directories(dir);
    return dir;
}

void write_run(const fs::path& dir, const PreparedScenario& prepared, const Trajectory& trajectory)
{
    auto csv = open_output(dir / "trajectory.csv");
    write_trajectory_csv(csv, trajectory, prepared.laws);
    write_json(dir / "summary.json", summary_json(trajectory, prepared.scenario.name));
}

void print_run(const PreparedScenario& prepared, const Trajectory& trajectory)
{
    const auto& last = trajectory.steps.back();
    std::cout << prepared.scenario.name << ": k=" << trajectory.k << " steps=" << trajectory.steps.size() - 1
              << " elastic=" << format_double(last.elastic) << " dissipated=" << format_double(last.dissipated)
              << " eta=" << format_double(trajectory.eta) << '\n';
    for (std::size_t e = 0; e < prepared.laws.size(); ++e) {
        if (const auto t = rupture_time(trajectory, e))
            std::cout << "  node " << e << " broken at t=" << format_double(*t) << '\n';
    }
    if (!trajectory.complete)
        std::cerr << "run stopped early: " << trajectory.failure << '\n';
}

void print_checks(const std::vector<CheckResult>& checks)
{
    for (const auto& check : checks) {
        std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << " worst=" << format_double(check.worst)
                  << " tol=" << format_double(check.tolerance);
        if (check.step)
            std::cout << " step=" << *check.step;
        if (check.node)
            std::cout << " node=" << *check.node;
        std::cout << '\n';
    }
}

void dump_problem(const fs::path& dir, const PreparedScenario& prepared, const Trajectory& trajectory, int step)
{
    if (step < 1 || step > trajectory.k)
        throw ConfigError("--dump-problem", "step must lie in [1, k]");
    if (static_cast<std::size_t>(step) > trajectory.steps.size())
        throw SolverError("run stopped before step " + std::to_string(step));
    const auto& before = trajectory.steps[static_cast<std::size_t>(step) - 1];
    const double t = trajectory.final_time * step / trajectory.k;
    const StepProblem problem{prepared.model, prepared.laws, before.v, before.z,
                              prepared.scenario.load.amplitude(t)};
    write_json(dir / ("problem_" + std::to_string(step) + ".json"), problem_dump(problem));
}

void dump_mesh(const fs::path& dir, const PreparedScenario& prepared)
{
    auto nodes = open_output(dir / "mesh_nodes.csv");
    auto triangles = open_output(dir / "mesh_triangles.csv");
    write_mesh_csv(prepared.mesh, nodes, triangles);

    auto reduced = open_output(dir / "reduced.csv");
    const auto& s = prepared.model.stiffness();
    reduced << "row,weight,load";
    for (Eigen::Index j = 0; j < s.cols(); ++j)
        reduced << ",S_" << j;
    reduced << '\n';
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        reduced << i << ',' << format_double(prepared.model.weights()[static_cast<std::size_t>(i)]) << ','
                << format_double(prepared.model.load_unit()[i]);
        for (Eigen::Index j = 0; j < s.cols(); ++j)
            reduced << ',' << format_double(s(i, j));
        reduced << '\n';
    }
}

int cmd_run(const std::string& config, std::optional<int> steps, std::optional<int> problem_step, bool mesh)
{
    const PreparedScenario prepared = prepare(load_scenario(config));
    const Trajectory trajectory = run_scenario(prepared, steps);
    const fs::path dir = prepare_directory(prepared.scenario);
    write_run(dir, prepared, trajectory);
    if (mesh)
        dump_mesh(dir, prepared);
    if (problem_step)
        dump_problem(dir, prepared, trajectory, *problem_step);
    print_run(prepared, trajectory);
    return trajectory.complete ? ok : solver_failure;
}

void corrupt(Trajectory& trajectory, int step)
{
    if (step < 1 || static_cast<std::size_t>(step) >= trajectory.steps.size())
        throw ConfigError("--corrupt-step", "no such step");
    auto& record = trajectory.steps[static_cast<std::size_t>(step)];
    record.v[0] = trajectory.steps[static_cast<std::size_t>(step) - 1].v[0] - 1e-3;
}

int cmd_verify(const std::string& config, std::optional<int> steps, std::optional<int> corrupt_step)
{
    const PreparedScenario prepared = prepare(load_scenario(config));
    Trajectory trajectory = run_scenario(prepared, steps);
    if (corrupt_step)
        corrupt(trajectory, *corrupt_step);
    const AuditReport report = audit(trajectory, prepared.model, prepared.laws);
    const fs::path dir = prepare_directory(prepared.scenario);
    write_run(dir, prepared, trajectory);
    write_json(dir / "audit.json", audit_json(report));
    print_run(prepared, trajectory);
    print_checks(report.checks);
    if (!trajectory.complete)
        return solver_failure;
    return report.passed() ? ok : audit_failure;
}

int cmd_sweep(const std::string& config, const std::vector<int>& ks)
{
    for (int k : ks) {
        if (k < 10)
            throw ConfigError("--ks", "every k must be at least 10");
    }
    const PreparedScenario prepared = prepare(load_scenario(config));
    bool complete = true;
    const RefinementTable table = refinement_study(
        [&](int k) {
            Trajectory trajectory = run_scenario(prepared, k);
            complete = complete && trajectory.complete;
            return trajectory;
        },
        prepared.laws, ks);
    const fs::path dir = prepare_directory(prepared.scenario);
    auto csv = open_output(dir / "refinement.csv");
    write_refinement_csv(csv, table);

    std::cout << "k v_theta_error jump_error max_drift eta\n";
    for (const auto& row : table.rows)
        std::cout << row.k << ' ' << format_double(row.v_error) << ' ' << format_double(row.z_error) << ' '
                  << format_double(row.max_drift) << ' ' << format_double(row.eta) << '\n';
    std::cout << "v_theta errors nonincreasing: " << (table.v_nonincreasing() ? "yes" : "no") << '\n'
              << "jump errors nonincreasing: " << (table.z_nonincreasing() ? "yes" : "no") << '\n';
    return complete ? ok : solver_failure;
}

int cmd_oracle_compare(const std::string& dump_path, double grid_step, double budget)
{
    std::ifstream in(dump_path);
    if (!in)
        throw ConfigError(dump_path, "cannot open problem dump");
    nlohmann::json dump;
    try {
        in >> dump;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(dump_path, e.what());
    }
    const LoadedProblem loaded = load_problem_dump(dump);
    const StepProblem problem = loaded.problem();
    if (problem.model.size() > oracle_max_dim)
        throw ConfigError("z", "oracle supports at most " + std::to_string(oracle_max_dim) + " interface nodes");

    const StepSolution solved = solve_step(problem);
    const GridSpec grid = default_grid(problem, grid_step, budget);
    const OracleResult oracle = brute_force_step(problem, grid);

    fs::path dir = fs::path(dump_path).parent_path();
    if (const char* env = std::getenv("COHESIVE_OUT"); env && *env)
        dir = env;
    if (!dir.empty())
        fs::create_directories(dir);
    const fs::path target = dir / (fs::path(dump_path).stem().string() + "_compare.csv");
    auto csv = open_output(target);
    csv << "quantity,solver,oracle,delta\n";
    double z_gap = 0.0;
    for (Eigen::Index e = 0; e < solved.z.size(); ++e) {
        const double delta = solved.z[e] - oracle.z[e];
        z_gap = std::max(z_gap, std::abs(delta));
        csv << "z_" << e << ',' << format_double(solved.z[e]) << ',' << format_double(oracle.z[e]) << ','
            << format_double(delta) << '\n';
    }
    const double f_gap = solved.total - oracle.value;
    csv << "F," << format_double(solved.total) << ',' << format_double(oracle.value) << ','
        << format_double(f_gap) << '\n';

    const double f_tol = 1e-6 * std::max(1.0, std::abs(oracle.value));
    const double z_tol = 10.0 * grid.step;
    std::cout << "F solver=" << format_double(solved.total) << " oracle=" << format_double(oracle.value)
              << " |dF|=" << format_double(std::abs(f_gap)) << " (tol " << format_double(f_tol) << ")\n"
              << "max |dz|=" << format_double(z_gap) << " (tol " << format_double(z_tol) << ", grid step "
              << format_double(grid.step) << ")\n";
    return std::abs(f_gap) <= f_tol && z_gap <= z_tol ? ok : audit_failure;
}

int cmd_demo_fatigue(const std::string& config, std::optional<int> steps, std::size_t node)
{
    const PreparedScenario prepared = prepare(load_scenario(config));
    const auto& wave = prepared.scenario.wave;
    if (!wave)
        throw ConfigError("load.triangle_wave", "demo-fatigue needs a triangle-wave load");
    if (node >= prepared.laws.size())
        throw ConfigError("--node", "outside the interface");
    const auto stiffness = uniform_jump_stiffness(prepared.model);
    if (!stiffness)
        throw ConfigError("mesh", "a uniform jump does not give a uniform traction on this interface");

    const Trajectory trajectory = run_scenario(prepared, steps);
    const fs::path dir = prepare_directory(prepared.scenario);
    write_run(dir, prepared, trajectory);
    print_run(prepared, trajectory);
    if (!trajectory.complete)
        return solver_failure;

    const FatigueComparison cmp = compare_fatigue(trajectory, prepared.laws, *wave, *stiffness, node);
    auto csv = open_output(dir / "fatigue.csv");
    csv << "cycle,v_evolution,v_recursion,difference,g_evolution,g_recursion\n";
    const CohesiveLaw& law = prepared.laws[node];
    for (std::size_t c = 0; c < cmp.v_evolution.size() && c < cmp.v_recursion.size(); ++c) {
        csv << c + 1 << ',' << format_double(cmp.v_evolution[c]) << ',' << format_double(cmp.v_recursion[c]) << ','
            << format_double(cmp.v_evolution[c] - cmp.v_recursion[c]) << ','
            << format_double(law.evaluate(cmp.v_evolution[c])) << ','
            << format_double(law.evaluate(cmp.v_recursion[c])) << '\n';
    }

    const auto show = [](const std::optional<int>& c) { return c ? std::to_string(*c) : std::string("never"); };
    std::cout << "stiffness s=" << format_double(*stiffness) << '\n'
              << "V strictly increasing every cycle: " << (cmp.strictly_increasing ? "yes" : "no") << '\n'
              << "g(V_final)/kappa=" << format_double(cmp.final_g / law.kappa()) << '\n'
              << "first cycle with g(V) > 0.9 kappa: evolution " << show(cmp.first_evolution) << ", recursion "
              << show(cmp.first_recursion) << '\n'
              << "max |V_evolution - V_recursion|=" << format_double(cmp.max_difference) << '\n';
    return ok;
}

template <class F>
int guarded(F&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const InitialNotStable& e) {
        std::cerr << "initial state not stable: " << e.what() << '\n';
        return initial_not_stable;
    } catch (const InvalidParameter& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return config_error;
    } catch (const DimensionMismatch& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return config_error;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return config_error;
    } catch (const NonConvergence& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return solver_failure;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return solver_failure;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quasistatic cohesive fracture with fatigue on a prescribed crack line"};
    app.require_subcommand(1);

    std::string config;
    std::optional<int> steps;

    auto* run = app.add_subcommand("run", "Run a scenario and write trajectory.csv and summary.json");
    std::optional<int> problem_step;
    bool mesh = false;
    run->add_option("config", config, "Scenario JSON")->required();
    run->add_option("-k,--steps", steps, "Override time.steps");
    run->add_option("--dump-problem", problem_step, "Write the step problem solved at this step");
    run->add_flag("--dump-mesh", mesh, "Write the mesh and the reduced system as CSV");

    auto* verify = app.add_subcommand("verify", "Run a scenario and audit it; writes audit.json");
    std::optional<int> corrupt_step;
    verify->add_option("config", config, "Scenario JSON")->required();
    verify->add_option("-k,--steps", steps, "Override time.steps");
    verify->add_option("--corrupt-step", corrupt_step, "Lower V at this step before auditing")->group("");

    auto* sweep = app.add_subcommand("sweep", "Refinement study over several step counts");
    std::vector<int> ks;
    sweep->add_option("config", config, "Scenario JSON")->required();
    sweep->add_option("--ks", ks, "Step counts, finest last is the reference")->delimiter(',')->required();

    auto* compare = app.add_subcommand("oracle-compare", "Solve a dumped step problem with both solvers");
    std::string dump;
    double grid_step = 1e-3;
    double budget = 1e8;
    compare->add_option("problem", dump, "Problem dump written by run --dump-problem")->required();
    compare->add_option("--grid-step", grid_step, "Finest oracle grid step");
    compare->add_option("--budget", budget, "Cap on oracle grid points");

    auto* fatigue = app.add_subcommand("demo-fatigue", "Triangle-wave run against the scalar cycle map");
    std::size_t node = 0;
    fatigue->add_option("config", config, "Scenario JSON")->required();
    fatigue->add_option("-k,--steps", steps, "Override time.steps");
    fatigue->add_option("--node", node, "Interface node to compare");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : usage;
    }

    if (*run)
        return guarded([&] { return cmd_run(config, steps, problem_step, mesh); });
    if (*verify)
        return guarded([&] { return cmd_verify(config, steps, corrupt_step); });
    if (*sweep)
        return guarded([&] { return cmd_sweep(config, ks); });
    if (*compare)
        return guarded([&] { return cmd_oracle_compare(dump, grid_step, budget); });
    return guarded([&] { return cmd_demo_fatigue(config, steps, node); });
}
