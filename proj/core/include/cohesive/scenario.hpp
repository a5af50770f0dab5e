#pragma once

#include "cohesive/cohesive_law.hpp"
#include "cohesive/domain_fem.hpp"
#include "cohesive/evolution.hpp"
#include "cohesive/reduced_system.hpp"
#include "cohesive/step_minimizer.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cohesive {

struct LawSpec {
    LawKind kind = LawKind::capped_linear;
    double kappa = 0.0;
    double scale = 0.0;
};

struct LawOverride {
    std::size_t node = 0;
    LawSpec law;
};

/// A scalar broadcast to every node, or one value per node.
struct NodalValues {
    double uniform = 0.0;
    std::vector<double> per_node; ///< empty means uniform

    Eigen::VectorXd expand(std::size_t nodes, const std::string& key) const;
};

/// Everything a run needs, validated against the configuration schema.
struct Scenario {
    std::string name;
    DomainSpec mesh;
    LawSpec law;
    std::vector<LawOverride> overrides;
    LoadProgram load;
    std::optional<TriangleWave> wave; ///< set when the load was given as a triangle wave
    double final_time = 0.0;
    int steps = 0;
    NodalValues v0;
    NodalValues z0;
    SolverOptions solver;
    std::optional<std::string> output_dir;
};

/// Throws ConfigError naming the offending key; unknown keys are errors.
Scenario parse_scenario(const nlohmann::json& config);
Scenario load_scenario(const std::filesystem::path& path);

/// Mesh, condensed model, laws and initial state built from a scenario.
struct PreparedScenario {
    Scenario scenario;
    Mesh mesh;
    ReducedModel model;
    LawField laws;
    InitialState initial;
};

PreparedScenario prepare(const Scenario& scenario);

/// Runs the evolution with the scenario's step count, or `k` when given.
Trajectory run_scenario(const PreparedScenario& prepared, std::optional<int> k = std::nullopt);

/// Output directory: $COHESIVE_OUT, else output.dir, else out/<name>.
std::filesystem::path output_directory(const Scenario& scenario);

} // namespace cohesive
