#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "ldedq/errors.hpp"
#include "ldedq/experiments.hpp"

using namespace ldedq;

namespace {

std::vector<EpisodeTrace> rewards(std::initializer_list<double> totals) {
    std::vector<EpisodeTrace> out;
    for (const double t : totals) {
        EpisodeTrace e;
        e.total_reward = t;
        out.push_back(e);
    }
    return out;
}

ExperimentBase quick_base() {
    ExperimentBase b;
    b.hp.episodes = 15;
    return b;
}

}  // namespace

TEST(Aggregate, SingleReplicateHasZeroSpread) {
    const std::vector<std::vector<EpisodeTrace>> reps = {rewards({1.0, -2.0, 7.5})};
    const ConvergenceCurve c = aggregate_convergence(reps);
    EXPECT_EQ(c.replicates, 1u);
    EXPECT_EQ(c.mean, (std::vector<double>{1.0, -2.0, 7.5}));
    EXPECT_EQ(c.stddev, (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(Aggregate, TwoReplicateArithmetic) {
    const std::vector<std::vector<EpisodeTrace>> reps = {rewards({1.0, 0.0}), rewards({3.0, 0.0})};
    const ConvergenceCurve c = aggregate_convergence(reps);
    EXPECT_DOUBLE_EQ(c.mean[0], 2.0);
    EXPECT_DOUBLE_EQ(c.stddev[0], 1.0);
    EXPECT_DOUBLE_EQ(c.stddev[1], 0.0);
}

TEST(Aggregate, ReplicateOrderDoesNotMatter) {
    std::vector<std::vector<EpisodeTrace>> reps = {rewards({1, 2, 3}), rewards({4, 0, 1}), rewards({2, 2, 8})};
    const ConvergenceCurve a = aggregate_convergence(reps);
    std::reverse(reps.begin(), reps.end());
    const ConvergenceCurve b = aggregate_convergence(reps);
    std::swap(reps[0], reps[1]);
    const ConvergenceCurve c = aggregate_convergence(reps);
    for (std::size_t e = 0; e < 3; ++e) {
        EXPECT_DOUBLE_EQ(a.mean[e], b.mean[e]);
        EXPECT_DOUBLE_EQ(a.mean[e], c.mean[e]);
        EXPECT_DOUBLE_EQ(a.stddev[e], b.stddev[e]);
        EXPECT_DOUBLE_EQ(a.stddev[e], c.stddev[e]);
    }
}

TEST(Aggregate, RaggedInputRejected) {
    const std::vector<std::vector<EpisodeTrace>> reps = {rewards({1, 2, 3}), rewards({1, 2})};
    EXPECT_THROW(aggregate_convergence(reps), ValidationError);
}

TEST(Sweep, ParameterNames) {
    EXPECT_EQ(parse_sweep_param("gamma"), SweepParam::gamma);
    EXPECT_EQ(default_sweep_values(SweepParam::epsilon).size(), 4u);
    EXPECT_EQ(default_sweep_values(SweepParam::n), (std::vector<double>{5, 10, 15, 20}));
    EXPECT_EQ(default_sweep_values(SweepParam::episodes).size(), 6u);
    try {
        parse_sweep_param("beta");
        FAIL();
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        for (const char* name : {"n", "epsilon", "gamma", "alpha", "episodes"}) {
            EXPECT_NE(msg.find(name), std::string::npos);
        }
    }
}

TEST(Sweep, SpecValidation) {
    SweepSpec spec;
    spec.param = SweepParam::n;
    spec.values = {5, 10.5};
    EXPECT_THROW(spec.validate(), ValidationError);
    spec.values = {};
    EXPECT_THROW(spec.validate(), ValidationError);
    spec = SweepSpec{};
    spec.replicates = 0;
    EXPECT_THROW(spec.validate(), ValidationError);
    spec = SweepSpec{};
    spec.param = SweepParam::alpha;
    spec.values = {0.0};
    EXPECT_THROW(spec.validate(), ValidationError);
}

TEST(Sweep, ReplicateSeedsDistinctAndStable) {
    std::set<std::uint64_t> seeds;
    for (int r = 0; r < 100; ++r) seeds.insert(replicate_seed(2024, r));
    EXPECT_EQ(seeds.size(), 100u);
    EXPECT_EQ(replicate_seed(2024, 7), replicate_seed(2024, 7));
    EXPECT_NE(replicate_seed(2024, 0), replicate_seed(2025, 0));
}

TEST(Sweep, ApplyValue) {
    const ExperimentBase b;
    EXPECT_EQ(apply_sweep_value(b, SweepParam::n, 15).grid.n, 15);
    EXPECT_EQ(apply_sweep_value(b, SweepParam::episodes, 75).hp.episodes, 75);
    EXPECT_EQ(apply_sweep_value(b, SweepParam::epsilon, 1.0).hp.epsilon, 1.0);
    EXPECT_EQ(apply_sweep_value(b, SweepParam::gamma, 0.5).hp.gamma, 0.5);
    EXPECT_EQ(apply_sweep_value(b, SweepParam::alpha, 0.75).hp.alpha, 0.75);
    EXPECT_EQ(apply_sweep_value(b, SweepParam::alpha, 0.75).hp.epsilon, b.hp.epsilon);
}

TEST(Sweep, ReproducibleAndIndependentOfJobs) {
    SweepSpec spec;
    spec.param = SweepParam::alpha;
    spec.values = {0.25, 1.0};
    spec.replicates = 3;
    const SweepResult a = run_sweep(quick_base(), spec, 1);
    const SweepResult b = run_sweep(quick_base(), spec, 3);
    ASSERT_EQ(a.points.size(), 2u);
    for (std::size_t p = 0; p < a.points.size(); ++p) {
        ASSERT_EQ(a.points[p].runs.size(), 3u);
        for (std::size_t r = 0; r < 3; ++r) {
            EXPECT_EQ(a.points[p].runs[r].q, b.points[p].runs[r].q);
            EXPECT_EQ(a.points[p].runs[r].seed, replicate_seed(spec.base_seed, static_cast<int>(r)));
            EXPECT_EQ(a.points[p].summary[r].oracle_rank, b.points[p].summary[r].oracle_rank);
        }
        EXPECT_EQ(a.points[p].curve.mean, b.points[p].curve.mean);
        EXPECT_EQ(a.points[p].curve.stddev, b.points[p].curve.stddev);
        EXPECT_EQ(a.points[p].curve.mean.size(), 15u);
    }
    // Different swept values share replicate seeds but not outcomes.
    EXPECT_NE(a.points[0].runs[0].q, a.points[1].runs[0].q);
}

TEST(Sweep, GridSizeSweepUsesMatchingGrids) {
    SweepSpec spec;
    spec.param = SweepParam::n;
    spec.values = {5, 8};
    spec.replicates = 2;
    ExperimentBase base = quick_base();
    base.hp.episodes = 4;
    const SweepResult r = run_sweep(base, spec, 2);
    ASSERT_EQ(r.points.size(), 2u);
    EXPECT_EQ(r.points[0].grid.n, 5);
    EXPECT_EQ(r.points[1].grid.n, 8);
    EXPECT_EQ(r.points[0].runs[0].q.rows(), 25u);
    EXPECT_EQ(r.points[1].runs[1].q.rows(), 64u);
    EXPECT_EQ(r.points[1].oracle.rows.size(), 64u);
    for (const ReplicateSummary& s : r.points[1].summary) {
        EXPECT_GE(s.oracle_rank, 1);
        EXPECT_LE(s.oracle_rank, 64);
    }
}

TEST(Sweep, InvalidValueReportsContext) {
    SweepSpec spec;
    spec.param = SweepParam::episodes;
    spec.values = {0};
    EXPECT_THROW(run_sweep(quick_base(), spec), ValidationError);
}

TEST(Slope, ExactLine) {
    std::vector<double> ys;
    for (int i = 0; i < 10; ++i) ys.push_back(2.0 + 3.0 * i);
    const SlopeTest s = regression_slope(ys);
    EXPECT_DOUBLE_EQ(s.slope, 3.0);
    EXPECT_LT(s.p_positive, 1e-12);
}

TEST(Slope, FlatSeriesIsNotPositive) {
    const std::vector<double> ys(20, 4.0);
    const SlopeTest s = regression_slope(ys);
    EXPECT_EQ(s.slope, 0.0);
    EXPECT_EQ(s.p_positive, 1.0);
}

TEST(Slope, MatchesReferenceStatistics) {
    // Reference values from an independent least-squares routine.
    const std::vector<double> up = {1.0, 2.5, 1.8, 3.1, 2.2, 4.0, 3.3};
    const SlopeTest a = regression_slope(up);
    EXPECT_NEAR(a.slope, 0.3678571428571429, 1e-12);
    EXPECT_NEAR(a.std_error, 0.12728523328432445, 1e-12);
    EXPECT_NEAR(a.t_stat, 2.890022144481119, 1e-10);
    EXPECT_NEAR(a.p_positive, 0.017092962596598555, 1e-9);

    const std::vector<double> down = {3.0, 2.0, 3.5, 1.0, 2.5};
    const SlopeTest b = regression_slope(down);
    EXPECT_NEAR(b.slope, -0.2, 1e-12);
    EXPECT_NEAR(b.std_error, 0.33166247903554, 1e-12);
    EXPECT_NEAR(b.p_positive, 0.7054841194871672, 1e-9);
}
