#include "cohesive/scenario.hpp"

#include "cohesive/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

namespace cohesive {

namespace {

using nlohmann::json;

std::string join(const std::string& prefix, const std::string& key)
{
    return prefix.empty() ? key : prefix + "." + key;
}

void only_keys(const json& object, const std::string& where, std::set<std::string> allowed)
{
    if (!object.is_object())
        throw ConfigError(where, "must be an object");
    for (const auto& item : object.items())
        if (!allowed.contains(item.key()))
            throw ConfigError(join(where, item.key()), "unknown key");
}

const json& require(const json& object, const std::string& where, const std::string& key)
{
    if (!object.contains(key))
        throw ConfigError(join(where, key), "missing required key");
    return object.at(key);
}

double number(const json& value, const std::string& key)
{
    if (!value.is_number())
        throw ConfigError(key, "must be a number");
    const double x = value.get<double>();
    if (!std::isfinite(x))
        throw ConfigError(key, "must be finite");
    return x;
}

double positive(const json& value, const std::string& key)
{
    const double x = number(value, key);
    if (!(x > 0.0))
        throw ConfigError(key, "must be positive");
    return x;
}

int integer(const json& value, const std::string& key)
{
    if (!value.is_number_integer())
        throw ConfigError(key, "must be an integer");
    return value.get<int>();
}

LawSpec parse_law_fields(const json& object, const std::string& where, const LawSpec* defaults)
{
    LawSpec spec = defaults ? *defaults : LawSpec{};
    if (object.contains("kind") || !defaults) {
        const auto& kind = require(object, where, "kind");
        if (!kind.is_string())
            throw ConfigError(join(where, "kind"), "must be a string");
        try {
            spec.kind = parse_law_kind(kind.get<std::string>());
        }
        catch (const InvalidParameter&) {
            throw ConfigError(join(where, "kind"), "must be \"capped_linear\" or \"exponential\"");
        }
    }
    if (object.contains("kappa") || !defaults)
        spec.kappa = positive(require(object, where, "kappa"), join(where, "kappa"));
    if (object.contains("scale") || !defaults)
        spec.scale = positive(require(object, where, "scale"), join(where, "scale"));
    return spec;
}

NodalValues parse_nodal(const json& value, const std::string& key)
{
    NodalValues out;
    if (value.is_number()) {
        out.uniform = number(value, key);
        return out;
    }
    if (!value.is_array() || value.empty())
        throw ConfigError(key, "must be a number or a nonempty array of numbers");
    for (std::size_t i = 0; i < value.size(); ++i)
        out.per_node.push_back(number(value[i], key + "[" + std::to_string(i) + "]"));
    return out;
}

LoadProgram parse_load(const json& load, std::optional<TriangleWave>& wave_out)
{
    only_keys(load, "load", {"breakpoints", "triangle_wave"});
    const bool explicit_points = load.contains("breakpoints");
    const bool wave = load.contains("triangle_wave");
    if (explicit_points == wave)
        throw ConfigError("load", "exactly one of breakpoints / triangle_wave is required");

    if (wave) {
        const auto& w = load.at("triangle_wave");
        only_keys(w, "load.triangle_wave", {"peak", "trough", "cycles", "period"});
        const double peak = number(require(w, "load.triangle_wave", "peak"), "load.triangle_wave.peak");
        const double trough =
            number(require(w, "load.triangle_wave", "trough"), "load.triangle_wave.trough");
        const int cycles = integer(require(w, "load.triangle_wave", "cycles"), "load.triangle_wave.cycles");
        const double period =
            positive(require(w, "load.triangle_wave", "period"), "load.triangle_wave.period");
        wave_out = TriangleWave{peak, trough, cycles, period};
        return LoadProgram::triangle_wave(*wave_out);
    }

    const auto& points = load.at("breakpoints");
    if (!points.is_array())
        throw ConfigError("load.breakpoints", "must be an array of [t, amp] pairs");
    std::vector<LoadProgram::Breakpoint> breakpoints;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string key = "load.breakpoints[" + std::to_string(i) + "]";
        if (!points[i].is_array() || points[i].size() != 2)
            throw ConfigError(key, "must be a [t, amp] pair");
        breakpoints.push_back({number(points[i][0], key), number(points[i][1], key)});
    }
    return LoadProgram(std::move(breakpoints));
}

} // namespace

Eigen::VectorXd NodalValues::expand(std::size_t nodes, const std::string& key) const
{
    if (per_node.empty())
        return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(nodes), uniform);
    if (per_node.size() != nodes)
        throw ConfigError(key, "has " + std::to_string(per_node.size()) + " entries, interface has " +
                                   std::to_string(nodes) + " nodes");
    return Eigen::Map<const Eigen::VectorXd>(per_node.data(), static_cast<Eigen::Index>(nodes));
}

Scenario parse_scenario(const json& config)
{
    only_keys(config, "", {"name", "mesh", "law", "load", "time", "initial", "solver", "output"});

    std::string name = "scenario";
    if (config.contains("name")) {
        if (!config.at("name").is_string())
            throw ConfigError("name", "must be a string");
        name = config.at("name").get<std::string>();
    }

    const auto& mesh = require(config, "", "mesh");
    only_keys(mesh, "mesh", {"lx", "ly", "nx", "ny"});
    DomainSpec domain;
    domain.lx = positive(require(mesh, "mesh", "lx"), "mesh.lx");
    domain.ly = positive(require(mesh, "mesh", "ly"), "mesh.ly");
    domain.nx = integer(require(mesh, "mesh", "nx"), "mesh.nx");
    domain.ny = integer(require(mesh, "mesh", "ny"), "mesh.ny");
    if (domain.nx < 1)
        throw ConfigError("mesh.nx", "must be at least 1");
    if (domain.ny < 2 || domain.ny % 2 != 0)
        throw ConfigError("mesh.ny", "must be even and at least 2");

    const auto& law = require(config, "", "law");
    only_keys(law, "law", {"kind", "kappa", "scale", "overrides"});
    const LawSpec base = parse_law_fields(law, "law", nullptr);
    std::vector<LawOverride> overrides;
    if (law.contains("overrides")) {
        const auto& list = law.at("overrides");
        if (!list.is_array())
            throw ConfigError("law.overrides", "must be an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = "law.overrides[" + std::to_string(i) + "]";
            only_keys(list[i], where, {"node", "kind", "kappa", "scale"});
            const int node = integer(require(list[i], where, "node"), join(where, "node"));
            if (node < 0 || node > domain.nx)
                throw ConfigError(join(where, "node"), "outside the interface");
            overrides.push_back({static_cast<std::size_t>(node), parse_law_fields(list[i], where, &base)});
        }
    }

    std::optional<TriangleWave> wave;
    LoadProgram load = parse_load(require(config, "", "load"), wave);

    const auto& time = require(config, "", "time");
    only_keys(time, "time", {"T", "steps"});
    const double final_time = positive(require(time, "time", "T"), "time.T");
    const int steps = integer(require(time, "time", "steps"), "time.steps");
    if (steps < 1)
        throw ConfigError("time.steps", "must be at least 1");
    if (std::abs(final_time - load.final_time()) > 1e-12 * std::max(1.0, final_time))
        throw ConfigError("time.T", "must equal the time of the last load breakpoint");

    NodalValues v0, z0;
    if (config.contains("initial")) {
        const auto& initial = config.at("initial");
        only_keys(initial, "initial", {"V0", "z0"});
        if (initial.contains("V0"))
            v0 = parse_nodal(initial.at("V0"), "initial.V0");
        if (initial.contains("z0"))
            z0 = parse_nodal(initial.at("z0"), "initial.z0");
    }

    SolverOptions solver;
    if (config.contains("solver")) {
        const auto& s = config.at("solver");
        only_keys(s, "solver", {"tol", "max_sweeps"});
        if (s.contains("tol"))
            solver.tol = positive(s.at("tol"), "solver.tol");
        if (s.contains("max_sweeps")) {
            solver.max_sweeps = integer(s.at("max_sweeps"), "solver.max_sweeps");
            if (solver.max_sweeps < 1)
                throw ConfigError("solver.max_sweeps", "must be at least 1");
        }
    }

    std::optional<std::string> output_dir;
    if (config.contains("output")) {
        const auto& out = config.at("output");
        only_keys(out, "output", {"dir"});
        if (out.contains("dir")) {
            if (!out.at("dir").is_string())
                throw ConfigError("output.dir", "must be a string");
            output_dir = out.at("dir").get<std::string>();
        }
    }

    return Scenario{std::move(name), domain, base, std::move(overrides), std::move(load),
                    wave, final_time, steps, std::move(v0), std::move(z0), solver,
                    std::move(output_dir)};
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("", "cannot read scenario file " + path.string());
    json config;
    try {
        config = json::parse(in);
    }
    catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_scenario(config);
}

PreparedScenario prepare(const Scenario& scenario)
{
    Mesh mesh = build_mesh(scenario.mesh);
    const StiffnessSystem stiffness = assemble_stiffness(mesh);
    ReducedModel model = condense(mesh, stiffness);
    const std::size_t m = model.size();

    std::vector<CohesiveLaw> laws(
        m, CohesiveLaw(scenario.law.kind, scenario.law.kappa, scenario.law.scale));
    for (const auto& o : scenario.overrides)
        laws.at(o.node) = CohesiveLaw(o.law.kind, o.law.kappa, o.law.scale);

    InitialState initial{scenario.z0.expand(m, "initial.z0"), scenario.v0.expand(m, "initial.V0")};
    for (std::size_t e = 0; e < m; ++e) {
        const auto i = static_cast<Eigen::Index>(e);
        if (!(initial.v0[i] >= std::abs(initial.z0[i])))
            throw ConfigError("initial.V0", "must satisfy V0 >= |z0| at every node");
    }

    return PreparedScenario{scenario, std::move(mesh), std::move(model), LawField(std::move(laws)),
                            std::move(initial)};
}

Trajectory run_scenario(const PreparedScenario& prepared, std::optional<int> k)
{
    EvolutionOptions options;
    options.solver = prepared.scenario.solver;
    return run(prepared.model, prepared.laws, prepared.scenario.load, k.value_or(prepared.scenario.steps),
               prepared.initial, options);
}

std::filesystem::path output_directory(const Scenario& scenario)
{
    if (const char* env = std::getenv("COHESIVE_OUT"); env && *env)
        return env;
    if (scenario.output_dir)
        return *scenario.output_dir;
    return std::filesystem::path("out") / scenario.name;
}

} // namespace cohesive
