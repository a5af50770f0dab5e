#include "cohesive/errors.hpp"
#include "cohesive/verifier.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace cohesive;

namespace {

LoadProgram ramp(double t_end, double amp_end) { return LoadProgram({{0.0, 0.0}, {t_end, amp_end}}); }

const CheckResult& find(const AuditReport& report, const std::string& name)
{
    for (const auto& c : report.checks)
        if (c.name == name)
            return c;
    throw std::out_of_range(name);
}

struct TwoBar {
    ReducedModel model = fixture::two_bar();
    LawField laws{2, CohesiveLaw::capped_linear(0.5, 1.0)};

    Trajectory with(const LoadProgram& load, int k) const { return run(model, laws, load, k, zero_initial_state(2)); }
};

} // namespace

TEST(Audit, ZeroLoadPasses)
{
    const TwoBar bar;
    const Trajectory t = bar.with(LoadProgram({{0.0, 0.0}, {1.0, 0.0}}), 20);
    const AuditReport report = audit(t, bar.model, bar.laws);
    EXPECT_TRUE(report.passed());
    EXPECT_EQ(report.checks.size(), 6u);
    EXPECT_EQ(find(report, "energy_balance").worst, 0.0);
}

TEST(Audit, MonotoneAndCyclicRunsPass)
{
    const TwoBar bar;
    for (const LoadProgram& load : {ramp(2.0, 2.0), LoadProgram({{0.0, 0.0}, {1.0, 0.9}, {2.0, -0.9}, {3.0, 1.6}})}) {
        const AuditReport report = audit(bar.with(load, 600), bar.model, bar.laws);
        for (const auto& c : report.checks)
            EXPECT_TRUE(c.passed) << c.name << " worst=" << c.worst;
    }
}

TEST(Audit, CorruptedVariationIsLocated)
{
    const TwoBar bar;
    Trajectory t = bar.with(ramp(2.0, 2.0), 200);
    t.steps[120].v[1] = t.steps[119].v[1] - 1e-3;
    const CheckResult c = check_irreversibility(t, bar.laws);
    EXPECT_FALSE(c.passed);
    EXPECT_NEAR(c.worst, 1e-3 + std::abs(t.steps[120].z[1] - t.steps[119].z[1]), 1e-10);
    EXPECT_EQ(c.step, 120u);
    EXPECT_EQ(c.node, 1u);
}

TEST(Audit, InitialVariationBelowJumpFails)
{
    const TwoBar bar;
    Trajectory t = bar.with(ramp(1.0, 0.2), 10);
    t.steps[0].z[0] = 0.01;
    const CheckResult c = check_irreversibility(t, bar.laws);
    EXPECT_FALSE(c.passed);
}

TEST(Audit, NonStationaryStateFailsStabilityAndKkt)
{
    const TwoBar bar;
    Trajectory t = bar.with(ramp(1.0, 0.4), 10);
    // Lift the jump at the last record without touching V: stuck well inside
    // the elastic range, the bar would snap back, and the traction exceeds g'.
    auto& r = t.steps.back();
    r.z = Eigen::Vector2d(-0.6, -0.6);
    r.v = r.z.cwiseAbs();
    r.traction = (r.amp * bar.model.load_unit() - bar.model.stiffness() * r.z).cwiseQuotient(
        Eigen::Map<const Eigen::VectorXd>(bar.model.weights().data(), 2));
    const auto last = std::vector<std::size_t>{t.steps.size() - 1};
    EXPECT_FALSE(check_global_stability(t, bar.model, bar.laws, last).passed);
    EXPECT_FALSE(check_kkt(t, bar.laws).passed);
}

TEST(Audit, PlateauBindsAndStickIsStrict)
{
    const TwoBar bar;
    const Trajectory t = bar.with(ramp(2.0, 2.0), 400);
    for (const auto& r : t.steps) {
        if (r.time > 0.55 && r.time < 1.2) {
            EXPECT_NEAR(std::abs(r.traction[0]), bar.laws[0].derivative(r.v[0]), 1e-9);
        }
        if (r.time < 0.45) {
            EXPECT_LT(std::abs(r.traction[0]), bar.laws[0].derivative(r.v[0]) - 0.05);
        }
    }
}

TEST(Audit, BackwardSlipHasNegativeTraction)
{
    const ReducedModel model = fixture::two_bar();
    const LawField laws(2, CohesiveLaw::exponential(1.0, 5.0));
    const Trajectory t = run(model, laws, LoadProgram::triangle_wave({0.3, -0.3, 2, 1.0}), 800, zero_initial_state(2));
    std::size_t backward = 0;
    for (std::size_t i = 1; i < t.steps.size(); ++i) {
        const double dz = t.steps[i].z[0] - t.steps[i - 1].z[0];
        if (dz < -1e-8) {
            ++backward;
            EXPECT_NEAR(t.steps[i].traction[0], -laws[0].derivative(t.steps[i].v[0]), 1e-8);
        }
        if (std::abs(dz) > 0.0) {
            EXPECT_GT(t.steps[i].v[0], t.steps[i - 1].v[0]);
        }
    }
    EXPECT_GT(backward, 0u);
    EXPECT_TRUE(check_flow_rule(t, laws).passed);
}

TEST(Audit, BrokenStateIsStable)
{
    const TwoBar bar;
    const Trajectory t = bar.with(LoadProgram({{0.0, 0.0}, {1.0, 2.0}, {2.0, -1.0}}), 200);
    ASSERT_TRUE(t.steps.back().broken[0]);
    const CheckResult c = check_global_stability(t, bar.model, bar.laws, {t.steps.size() - 1});
    EXPECT_TRUE(c.passed);
    EXPECT_LE(c.worst, 1e-12);
}

TEST(Audit, IncompleteRunFails)
{
    const ReducedModel model = fixture::condensed({2.0, 1.0, 8, 2});
    const LawField laws(9, CohesiveLaw::capped_linear(0.5, 1.0));
    EvolutionOptions options;
    options.solver.max_sweeps = 1;
    const Trajectory t = run(model, laws, ramp(2.0, 2.0), 100, zero_initial_state(9), options);
    ASSERT_FALSE(t.complete);
    const AuditReport report = audit(t, model, laws);
    EXPECT_FALSE(report.passed());
    EXPECT_FALSE(find(report, "run_complete").passed);
}

TEST(SampleIndices, Examples)
{
    EXPECT_EQ(sample_indices(5, 10), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
    EXPECT_EQ(sample_indices(101, 3), (std::vector<std::size_t>{0, 50, 100}));
    EXPECT_EQ(sample_indices(10, 1), (std::vector<std::size_t>{0, 9}));
    EXPECT_TRUE(sample_indices(0, 3).empty());
}

TEST(Refinement, ZeroLoadHasNoError)
{
    const TwoBar bar;
    const LoadProgram still({{0.0, 0.0}, {1.0, 0.0}});
    const RefinementTable table = refinement_study([&](int k) { return bar.with(still, k); }, bar.laws, {10, 20, 40});
    ASSERT_EQ(table.rows.size(), 3u);
    EXPECT_EQ(table.sample_times.size(), 40u);
    for (const auto& row : table.rows) {
        EXPECT_EQ(row.v_error, 0.0);
        EXPECT_EQ(row.z_error, 0.0);
    }
}

TEST(Refinement, TwoBarErrorsShrink)
{
    const TwoBar bar;
    const RefinementTable table =
        refinement_study([&](int k) { return bar.with(ramp(2.0, 2.0), k); }, bar.laws, {50, 100, 200, 1600});
    ASSERT_EQ(table.rows.size(), 4u);
    EXPECT_EQ(table.rows.back().k, 1600);
    EXPECT_EQ(table.rows.back().v_error, 0.0);
    EXPECT_TRUE(table.v_nonincreasing());
    EXPECT_TRUE(table.z_nonincreasing());
    for (const auto& row : table.rows) {
        ASSERT_EQ(row.rupture_times.size(), 2u);
        EXPECT_TRUE(row.rupture_times[0]);
    }
}

TEST(Refinement, Guards)
{
    const TwoBar bar;
    auto runner = [&](int k) { return bar.with(ramp(2.0, 2.0), k); };
    EXPECT_THROW(refinement_study(runner, bar.laws, {}), InvalidParameter);
    EXPECT_THROW(refinement_study(runner, bar.laws, {5, 20}), InvalidParameter);
    EXPECT_THROW(refinement_study(runner, bar.laws, {40, 20}), InvalidParameter);
    const RefinementTable single = refinement_study(runner, bar.laws, {20});
    ASSERT_EQ(single.rows.size(), 1u);
    EXPECT_EQ(single.rows[0].z_error, 0.0);
}

TEST(CompareFatigue, ShortRunTracksRecursion)
{
    const ReducedModel model = fixture::two_bar();
    const LawField laws(2, CohesiveLaw::exponential(1.0, 5.0));
    const TriangleWave wave{0.3, -0.3, 10, 1.0};
    const Trajectory t = run(model, laws, LoadProgram::triangle_wave(wave), 2000, zero_initial_state(2));
    const auto stiffness = uniform_jump_stiffness(model);
    ASSERT_TRUE(stiffness);
    const FatigueComparison cmp = compare_fatigue(t, laws, wave, *stiffness);
    ASSERT_EQ(cmp.v_evolution.size(), 10u);
    ASSERT_EQ(cmp.v_recursion.size(), 10u);
    EXPECT_TRUE(cmp.strictly_increasing);
    EXPECT_LE(cmp.max_difference, 5e-3);
    EXPECT_FALSE(cmp.first_evolution);
    EXPECT_FALSE(cmp.first_recursion);
    EXPECT_THROW(compare_fatigue(t, laws, wave, *stiffness, 2), std::out_of_range);
}

TEST(CompareFatigue, RefinementReducesError)
{
    const ReducedModel model = fixture::two_bar();
    const LawField laws(2, CohesiveLaw::exponential(1.0, 5.0));
    const TriangleWave wave{0.3, -0.3, 10, 1.0};
    double previous = std::numeric_limits<double>::infinity();
    for (int per_cycle : {20, 40, 80}) {
        const Trajectory t = run(model, laws, LoadProgram::triangle_wave(wave), 10 * per_cycle, zero_initial_state(2));
        const double err = compare_fatigue(t, laws, wave, 1.0).max_difference;
        EXPECT_LE(err, previous) << per_cycle;
        previous = err;
    }
}
