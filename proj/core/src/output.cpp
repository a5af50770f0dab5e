#include "cohesive/output.hpp"

#include "cohesive/errors.hpp"
#include "cohesive/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cohesive {

namespace {

using nlohmann::json;

/// JSON has no infinity; encode it as the string "inf".
json number_or_inf(double x)
{
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return x;
}

double read_number(const json& value, const std::string& key)
{
    if (value.is_string() && value.get<std::string>() == "inf")
        return infinity;
    if (!value.is_number())
        throw ConfigError(key, "must be a number");
    return value.get<double>();
}

Eigen::VectorXd read_vector(const json& dump, const std::string& key, std::size_t expected)
{
    if (!dump.contains(key) || !dump.at(key).is_array() || dump.at(key).size() != expected)
        throw ConfigError(key, "must be an array of " + std::to_string(expected) + " numbers");
    Eigen::VectorXd out(static_cast<Eigen::Index>(expected));
    for (std::size_t i = 0; i < expected; ++i)
        out[static_cast<Eigen::Index>(i)] = read_number(dump.at(key)[i], key);
    return out;
}

} // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const LawField& laws)
{
    const std::size_t m = laws.size();
    out << "step,t,amp";
    for (const char* prefix : {"z_", "V_", "traction_"})
        for (std::size_t e = 0; e < m; ++e)
            out << ',' << prefix << e;
    out << ",elastic,dissipated,work,drift";
    for (const char* prefix : {"gprime_", "g_"})
        for (std::size_t e = 0; e < m; ++e)
            out << ',' << prefix << e;
    out << '\n';

    for (const auto& r : trajectory.steps) {
        out << r.step << ',' << format_double(r.time) << ',' << format_double(r.amp);
        for (const Eigen::VectorXd* column : {&r.z, &r.v, &r.traction})
            for (Eigen::Index e = 0; e < column->size(); ++e)
                out << ',' << format_double((*column)[e]);
        out << ',' << format_double(r.elastic) << ',' << format_double(r.dissipated) << ','
            << format_double(r.work) << ',' << format_double(r.drift);
        for (std::size_t e = 0; e < m; ++e)
            out << ',' << format_double(laws[e].derivative(r.v[static_cast<Eigen::Index>(e)]));
        for (std::size_t e = 0; e < m; ++e)
            out << ',' << format_double(laws[e].evaluate(r.v[static_cast<Eigen::Index>(e)]));
        out << '\n';
    }
}

json summary_json(const Trajectory& trajectory, const std::string& name)
{
    json summary;
    summary["name"] = name;
    summary["k"] = trajectory.k;
    summary["final_time"] = trajectory.final_time;
    summary["complete"] = trajectory.complete;
    if (!trajectory.complete)
        summary["failure"] = trajectory.failure;
    summary["eta"] = trajectory.eta;
    if (trajectory.steps.empty())
        return summary;

    const auto& last = trajectory.steps.back();
    summary["final"] = {{"time", last.time},           {"amp", last.amp},
                        {"elastic", last.elastic},     {"dissipated", last.dissipated},
                        {"work", last.work},           {"drift", last.drift}};

    json rupture = json::array();
    json rupture_step = json::array();
    for (std::size_t e = 0; e < last.broken.size(); ++e) {
        const auto t = rupture_time(trajectory, e);
        rupture.push_back(t ? json(*t) : json(nullptr));
        std::optional<int> step;
        for (const auto& r : trajectory.steps)
            if (r.broken[e]) {
                step = r.step;
                break;
            }
        rupture_step.push_back(step ? json(*step) : json(nullptr));
    }
    summary["rupture_times"] = rupture;
    summary["rupture_steps"] = rupture_step;

    double max_drift = -infinity;
    double max_abs_drift = 0.0;
    double max_residual = 0.0;
    long total_sweeps = 0;
    int max_sweeps = 0;
    std::array<int, 3> wins{};
    for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
        const auto& r = trajectory.steps[i];
        max_drift = std::max(max_drift, r.drift);
        max_abs_drift = std::max(max_abs_drift, std::abs(r.drift));
        max_residual = std::max(max_residual, r.residual);
        if (i == 0)
            continue;
        total_sweeps += r.sweeps;
        max_sweeps = std::max(max_sweeps, r.sweeps);
        ++wins[static_cast<std::size_t>(r.start)];
    }
    summary["max_drift"] = max_drift;
    summary["max_abs_drift"] = max_abs_drift;
    summary["solver"] = {{"total_sweeps", total_sweeps},
                         {"max_sweeps_per_step", max_sweeps},
                         {"max_stationarity_residual", max_residual},
                         {"winning_start",
                          {{"stay", wins[0]}, {"elastic", wins[1]}, {"partial_rupture", wins[2]}}}};
    return summary;
}

json audit_json(const AuditReport& report)
{
    json checks = json::array();
    for (const auto& c : report.checks) {
        json entry{{"name", c.name},
                   {"passed", c.passed},
                   {"worst", c.worst},
                   {"tolerance", c.tolerance},
                   {"evaluated", c.evaluated},
                   {"skipped_guard_band", c.skipped}};
        entry["step"] = c.step ? json(*c.step) : json(nullptr);
        entry["node"] = c.node ? json(*c.node) : json(nullptr);
        for (const auto& [key, value] : c.metrics)
            entry["metrics"][key] = value;
        checks.push_back(std::move(entry));
    }
    return json{{"passed", report.passed()}, {"checks", checks}};
}

void write_refinement_csv(std::ostream& out, const RefinementTable& table)
{
    out << "k,v_theta_error,jump_error,max_drift,eta\n";
    for (const auto& row : table.rows)
        out << row.k << ',' << format_double(row.v_error) << ',' << format_double(row.z_error) << ','
            << format_double(row.max_drift) << ',' << format_double(row.eta) << '\n';
}

json problem_dump(const StepProblem& problem)
{
    const auto& model = problem.model;
    const auto m = static_cast<Eigen::Index>(model.size());
    json s = json::array();
    for (Eigen::Index i = 0; i < m; ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m; ++j)
            row.push_back(model.stiffness()(i, j));
        s.push_back(row);
    }
    json laws = json::array();
    for (const auto& law : problem.laws.laws())
        laws.push_back({{"kind", std::string(to_string(law.kind()))},
                        {"kappa", law.kappa()},
                        {"scale", law.scale()}});
    json c = json::array(), w = json::array(), v = json::array(), p = json::array();
    for (Eigen::Index e = 0; e < m; ++e) {
        c.push_back(model.load_unit()[e]);
        w.push_back(model.weights()[static_cast<std::size_t>(e)]);
        v.push_back(number_or_inf(problem.v_prev[e]));
        p.push_back(problem.p[e]);
    }
    return json{{"S", s},     {"c_unit", c}, {"e0_unit", model.e0_unit()}, {"weights", w},
                {"laws", laws}, {"V", v},    {"p", p},                      {"amp", problem.amp}};
}

LoadedProblem load_problem_dump(const json& dump)
{
    if (!dump.is_object() || !dump.contains("weights") || !dump.at("weights").is_array())
        throw ConfigError("weights", "problem dump needs a weights array");
    const std::size_t m = dump.at("weights").size();
    const Eigen::VectorXd w = read_vector(dump, "weights", m);

    if (!dump.contains("S") || !dump.at("S").is_array() || dump.at("S").size() != m)
        throw ConfigError("S", "must be an m x m array");
    Eigen::MatrixXd s(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const auto& row = dump.at("S")[i];
        if (!row.is_array() || row.size() != m)
            throw ConfigError("S", "must be an m x m array");
        for (std::size_t j = 0; j < m; ++j)
            s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = read_number(row[j], "S");
    }

    if (!dump.contains("laws") || !dump.at("laws").is_array() || dump.at("laws").size() != m)
        throw ConfigError("laws", "must list one law per node");
    std::vector<CohesiveLaw> laws;
    for (const auto& l : dump.at("laws")) {
        try {
            laws.emplace_back(parse_law_kind(l.at("kind").get<std::string>()),
                              read_number(l.at("kappa"), "laws.kappa"),
                              read_number(l.at("scale"), "laws.scale"));
        }
        catch (const InvalidParameter& e) {
            throw ConfigError("laws", e.what());
        }
        catch (const json::exception& e) {
            throw ConfigError("laws", e.what());
        }
    }

    if (!dump.contains("e0_unit") || !dump.contains("amp"))
        throw ConfigError("amp", "problem dump needs e0_unit and amp");

    LoadedProblem out;
    out.model = std::make_unique<ReducedModel>(ReducedModel::from_matrices(
        s, read_vector(dump, "c_unit", m), read_number(dump.at("e0_unit"), "e0_unit"),
        std::vector<double>(w.data(), w.data() + w.size())));
    out.laws = std::make_unique<LawField>(std::move(laws));
    out.v_prev = read_vector(dump, "V", m);
    out.p = read_vector(dump, "p", m);
    out.amp = read_number(dump.at("amp"), "amp");
    return out;
}

} // namespace cohesive
