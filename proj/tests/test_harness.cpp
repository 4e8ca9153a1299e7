#include <gtest/gtest.h>

#include <set>
#include <sstream>
#include <string>

#include "hcl/hcl.hpp"

using namespace hcl;

namespace {

ExperimentSpec parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

ExperimentSpec small_recover_spec() {
    ExperimentSpec s;
    s.mode = Mode::recover;
    s.n_grid = {40, 60};
    s.k_grid = {10, 20};
    s.p_grid = {0.3, 0.6};
    s.reps = 3;
    s.master_seed = 99;
    return s;
}

}  // namespace

TEST(Config, ParsesAllKeys) {
    const auto s = parse(
        "# sweep\n"
        "mode = phase\n"
        "n = 100, 200\n"
        "d = 4\n"
        "k_scale = 0.5,1,2\n"
        "p = 0.25\n"
        "reps = 7   # trailing comment\n"
        "seed = 2024\n"
        "c = 1.5\n"
        "alpha = 0.1\n"
        "calibration_reps = 80\n"
        "tol = 1e-9\n"
        "max_iter = 500\n"
        "centering = estimated\n"
        "out = results\n"
        "workers = 2\n"
        "record_wall_time = true\n");
    EXPECT_EQ(s.mode, Mode::phase);
    EXPECT_EQ(s.n_grid, (std::vector<std::uint32_t>{100, 200}));
    EXPECT_EQ(s.d, 4);
    EXPECT_TRUE(s.k_relative);
    EXPECT_EQ(s.k_grid, (std::vector<double>{0.5, 1, 2}));
    EXPECT_EQ(s.p_grid, (std::vector<double>{0.25}));
    EXPECT_EQ(s.reps, 7);
    EXPECT_EQ(s.master_seed, 2024u);
    EXPECT_EQ(s.c, 1.5);
    EXPECT_EQ(s.alpha, 0.1);
    EXPECT_EQ(s.calibration_reps, 80);
    EXPECT_EQ(s.solver.tol, 1e-9);
    EXPECT_EQ(s.solver.max_iter, 500);
    EXPECT_EQ(s.centering, Centering::estimated_p);
    EXPECT_EQ(s.out_dir, "results");
    EXPECT_EQ(s.workers, 2);
    EXPECT_TRUE(s.record_wall_time);
    EXPECT_NO_THROW(s.validate());
}

TEST(Config, Errors) {
    EXPECT_THROW(parse("bogus = 1\n"), ConfigError);
    EXPECT_THROW(parse("n 100\n"), ConfigError);
    EXPECT_THROW(parse("n =\n"), ConfigError);
    EXPECT_THROW(parse("n = abc\n"), ConfigError);
    EXPECT_THROW(parse("p = 0.5x\n"), ConfigError);
    EXPECT_THROW(parse("mode = nothing\n"), ConfigError);
    EXPECT_THROW(parse("centering = sometimes\n"), ConfigError);
    EXPECT_THROW(parse("record_wall_time = maybe\n"), ConfigError);
    EXPECT_THROW(parse("d = 2\n").validate(), ConfigError);
    EXPECT_THROW(parse("p = 1.5\n").validate(), ConfigError);
    EXPECT_THROW(parse("n = 10\nk = 11\n").validate(), ConfigError);
    EXPECT_THROW(parse("k = 2.5\n").validate(), ConfigError);
    EXPECT_THROW(parse("calibration_reps = 49\n").validate(), ConfigError);
    EXPECT_THROW(parse("n = 1001\n").validate(), ConfigError);
    EXPECT_THROW(parse_config_file("/nonexistent/hcl.cfg"), ConfigError);
}

TEST(Config, SampleFileLoads) {
    const auto s = parse_config_file(std::string(HCL_SAMPLES_DIR) + "/phase.cfg");
    EXPECT_EQ(s.mode, Mode::phase);
    EXPECT_NO_THROW(s.validate());
}

TEST(Seeds, InjectiveOverGrid) {
    std::set<std::uint64_t> seen;
    for (std::size_t g = 0; g < 50; ++g)
        for (std::size_t r = 0; r < 200; ++r) seen.insert(replicate_seed(7, g, r));
    EXPECT_EQ(seen.size(), 50u * 200u);
    EXPECT_NE(replicate_seed(7, 0, 0), replicate_seed(8, 0, 0));
}

TEST(Grid, OrderAndRelativeK) {
    auto s = small_recover_spec();
    const auto g = expand_grid(s, 1);
    ASSERT_EQ(g.size(), 8u);
    EXPECT_EQ(g[0].p, 0.3);
    EXPECT_EQ(g[0].n, 40u);
    EXPECT_EQ(g[1].k, 20u);
    EXPECT_EQ(g[2].n, 60u);
    EXPECT_EQ(g[4].p, 0.6);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g[i].index, i);

    s.k_relative = true;
    s.k_grid = {1.0, 2.0};
    const auto r = expand_grid(s, 1);
    EXPECT_EQ(r[0].k, static_cast<std::uint32_t>(std::round(recovery_scale(40, 3, 0.3))));
    EXPECT_EQ(r[1].k, static_cast<std::uint32_t>(std::round(2.0 * recovery_scale(40, 3, 0.3))));
    s.k_grid = {100.0};
    EXPECT_THROW(expand_grid(s, 1), ConfigError);
}

TEST(Experiment, TrivialDetect) {
    ExperimentSpec s;
    s.mode = Mode::detect;
    s.n_grid = {20};
    s.k_grid = {0};
    s.p_grid = {0.0};
    s.c = 1.0;
    s.reps = 1;
    const auto res = run_experiment(s);
    ASSERT_EQ(res.records.size(), 1u);
    EXPECT_EQ(res.records[0].stat, 0.0);
    EXPECT_EQ(res.records[0].reject, false);
    const auto csv = emit_csv(res.records);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(Experiment, DetectWithoutCRequiresPositiveP) {
    ExperimentSpec s;
    s.mode = Mode::detect;
    s.n_grid = {20};
    s.p_grid = {0.0};
    s.calibration_reps = 50;
    EXPECT_THROW(run_experiment(s), ConfigError);
}

TEST(Experiment, ByteIdenticalAcrossWorkers) {
    auto s = small_recover_spec();
    std::string ref;
    for (int w : {1, 4, 16}) {
        s.workers = w;
        const auto res = run_experiment(s);
        const auto csv = emit_csv(res.records) + emit_summary_csv(res) + emit_svg_heatmap(heatmap_from(res, 0.3));
        if (ref.empty()) ref = csv;
        EXPECT_EQ(csv, ref) << "workers=" << w;
    }
}

TEST(Experiment, DetectAndCalibrateDeterministic) {
    ExperimentSpec s;
    s.mode = Mode::detect;
    s.n_grid = {30};
    s.k_grid = {0, 15};
    s.p_grid = {0.5};
    s.reps = 4;
    s.calibration_reps = 50;
    s.workers = 1;
    const auto a = emit_csv(run_experiment(s).records);
    s.workers = 4;
    EXPECT_EQ(emit_csv(run_experiment(s).records), a);

    s.mode = Mode::calibrate;
    s.reps = 60;
    const auto res = run_experiment(s);
    ASSERT_EQ(res.summary.size(), 1u);
    ASSERT_TRUE(res.summary[0].point.c.has_value());
    std::vector<double> stats;
    for (const auto& r : res.records) stats.push_back(*r.stat);
    EXPECT_EQ(*res.summary[0].point.c, upper_quantile(stats, 0.05));
}

TEST(Csv, RoundTrip) {
    auto s = small_recover_spec();
    s.record_wall_time = true;
    const auto res = run_experiment(s);
    const auto parsed = parse_csv(emit_csv(res.records));
    ASSERT_EQ(parsed.size(), res.records.size());
    // values survive at 12 significant digits, so compare the re-emitted text
    EXPECT_EQ(emit_csv(parsed), emit_csv(res.records));
    for (const auto& r : parsed) {
        EXPECT_TRUE(r.exact.has_value());
        EXPECT_TRUE(r.wall_ms.has_value());
    }
}

TEST(Csv, WallTimeOmittedByDefault) {
    const auto res = run_experiment(small_recover_spec());
    for (const auto& r : res.records) EXPECT_FALSE(r.wall_ms.has_value());
}

TEST(Csv, CapacitySkippedRows) {
    ExperimentSpec s;
    s.mode = Mode::recover;
    s.n_grid = {1000};
    s.d = 8;
    s.k_grid = {10};
    s.p_grid = {0.5};
    s.reps = 2;
    const auto res = run_experiment(s);
    ASSERT_EQ(res.records.size(), 2u);
    for (const auto& r : res.records) EXPECT_TRUE(r.skipped);
    const auto csv = emit_csv(res.records);
    EXPECT_NE(csv.find(",skipped,"), std::string::npos);
    const auto back = parse_csv(csv);
    EXPECT_TRUE(back[0].skipped);
    EXPECT_EQ(res.summary[0].completed, 0);
}

TEST(Csv, MalformedInput) {
    EXPECT_THROW(parse_csv("wrong,header\n"), ConfigError);
    EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\n1,2,3\n"), ConfigError);
}

TEST(Svg, ParseBackAndShading) {
    HeatmapGrid h;
    h.col_labels = {"0.5", "1", "2"};
    h.row_labels = {"100", "200"};
    h.rates = {{0.0, 0.25, 1.0}, {0.1, 0.5, 0.95}};
    const auto svg = emit_svg_heatmap(h);
    EXPECT_EQ(parse_svg_rates(svg), (std::vector<double>{0.0, 0.25, 1.0, 0.1, 0.5, 0.95}));
    EXPECT_EQ(svg, emit_svg_heatmap(h));
    EXPECT_NE(svg.find("rgb(30,30,30)"), std::string::npos);
    EXPECT_NE(svg.find("rgb(245,245,245)"), std::string::npos);
}

TEST(Svg, SingleCellAndGuards) {
    HeatmapGrid h;
    h.col_labels = {"1"};
    h.row_labels = {"50"};
    h.rates = {{1.0}};
    EXPECT_EQ(parse_svg_rates(emit_svg_heatmap(h)), std::vector<double>{1.0});
    h.rates = {{1.5}};
    EXPECT_THROW(emit_svg_heatmap(h), ConfigError);
    h.rates = {};
    EXPECT_THROW(emit_svg_heatmap(h), ConfigError);
}

TEST(Phase, ExactRateGrowsWithK) {
    ExperimentSpec s;
    s.mode = Mode::phase;
    s.n_grid = {100};
    s.p_grid = {0.5};
    s.k_relative = true;
    s.k_grid = {0.5, 1, 2, 3, 4};
    s.reps = 10;
    s.master_seed = 5;
    const auto res = run_experiment(s);
    int inversions = 0;
    for (std::size_t i = 1; i < res.summary.size(); ++i)
        if (*res.summary[i].exact_rate < *res.summary[i - 1].exact_rate) ++inversions;
    EXPECT_LE(inversions, 1);
    EXPECT_EQ(*res.summary.back().exact_rate, 1.0);
    const auto h = heatmap_from(res, 0.5);
    ASSERT_EQ(h.rates.size(), 1u);
    EXPECT_EQ(h.rates[0].size(), 5u);
}
