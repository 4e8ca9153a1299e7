#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hcl/detect.hpp"

using namespace hcl;

TEST(Threshold, Values) {
    EXPECT_NEAR(threshold(100, 3, 0.1, 1.0), std::sqrt(980.0), 1e-12);
    EXPECT_NEAR(threshold(100, 3, 0.1, 1.0), 31.3050, 1e-4);
    EXPECT_EQ(threshold(100, 3, 0.0, 1.0), 0.0);
    EXPECT_NEAR(threshold(80, 4, 0.4, 2.5), 2.0 * threshold(80, 4, 0.1, 2.5), 1e-9);
    EXPECT_THROW(threshold(100, 3, 0.1, 0.0), ConfigError);
}

TEST(K0, ClosedFormValues) {
    // p / (1-p)^2 = 1 at p = (3 - sqrt 5)/2, so k0 = (2C)^{1/(d-1)} sqrt n
    const double p = (3.0 - std::sqrt(5.0)) / 2.0;
    EXPECT_NEAR(k0_formula(400, 3, p, 0.5), 20.0, 1e-9);
    EXPECT_NEAR(k0_formula(400, 5, p, 4.0), std::pow(8.0, 0.25) * 20.0, 1e-9);
    EXPECT_NEAR(k0_formula(100, 3, 0.5, 1.0), std::pow(2.0, 0.75) * 10.0, 1e-9);
    EXPECT_THROW(k0_formula(100, 3, 0.0, 1.0), ConfigError);
    EXPECT_THROW(k0_formula(100, 3, 1.0, 1.0), ConfigError);
}

TEST(K0, IntegerFormRelation) {
    for (std::uint32_t n : {50u, 200u, 1000u})
        for (double p : {0.1, 0.5, 0.8}) {
            EXPECT_EQ(k0_integer_form(n, 3, p, 1.3), static_cast<std::uint64_t>(std::floor(k0_formula(n, 3, p, 1.3))) + 1);
            // d = 4: the integer form carries an extra sqrt(2!) inside the root
            const double scaled = k0_formula(n, 4, p, 1.3) * std::pow(2.0, 1.0 / 6.0);
            EXPECT_NEAR(static_cast<double>(k0_integer_form(n, 4, p, 1.3)), std::floor(scaled) + 1, 1.0);
        }
}

TEST(K0, MonotoneInP) {
    double prev = 0.0;
    for (double p = 0.05; p < 0.96; p += 0.05) {
        const double k = k0_formula(300, 3, p, 1.0);
        EXPECT_GT(k, prev);
        prev = k;
    }
}

TEST(RunTest, EmptyHypergraph) {
    const ModelParams params{30, 3, 0, 0.0};
    const auto a = project(sample_hpc(params, 1));
    const auto o = run_test(a, DetectionConfig{params, 1.0, {}, 0.05}, 2);
    EXPECT_EQ(o.statistic, 0.0);
    EXPECT_EQ(o.threshold, 0.0);
    EXPECT_FALSE(o.reject);
}

TEST(RunTest, CompleteHypergraph) {
    // A = C(4,1)(J - I), eigenvalues 20 and -4
    const ModelParams params{6, 3, 6, 0.0};
    const auto a = project(sample_hpc(params, 1));
    DetectionConfig cfg{params, 1.0, {}, 0.05};
    cfg.params.k = 0;
    const auto o = run_test(a, cfg, 3);
    EXPECT_NEAR(o.statistic, 20.0, 1e-9);
    EXPECT_TRUE(o.reject);
}

TEST(RunTest, DimensionMismatch) {
    const auto a = project(sample_hpc(ModelParams{10, 3, 0, 0.2}, 1));
    EXPECT_THROW(run_test(a, DetectionConfig{ModelParams{11, 3, 0, 0.2}, 1.0, {}, 0.05}, 1), ConfigError);
}

TEST(QuadraticForm, MatrixEqualsHyperedgeForm) {
    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        const int d = 3 + static_cast<int>(rng.below(2));
        const auto n = static_cast<std::uint32_t>(d + 2 + rng.below(39 - d));
        const ModelParams params{n, d, static_cast<std::uint32_t>(rng.below(n + 1)), rng.uniform(0.0, 1.0)};
        const auto sample = sample_hpc(params, rng.next());
        const auto a = project(sample);
        const auto tset = rng.subset(n, static_cast<std::uint32_t>(1 + rng.below(n)));
        const CenteredOperator op(a, null_mean_offdiag(params));
        const double mat = quadratic_form_stat(op, tset);
        const double dense = quadratic_form_stat(op.materialize(), tset);
        const double hyper = quadratic_form_hyperedge(sample, tset);
        EXPECT_LE(std::abs(mat - hyper), 1e-9 * std::max(1.0, std::abs(hyper)));
        EXPECT_LE(std::abs(dense - hyper), 1e-9 * std::max(1.0, std::abs(hyper)));
    }
}

TEST(SignalTerm, Values) {
    EXPECT_DOUBLE_EQ(signal_term(5, 3, 3, 0.5).value, 1.0);
    EXPECT_DOUBLE_EQ(signal_term(50, 5, 3, 0.5).value, 6.0);
    EXPECT_TRUE(signal_term(50, 2, 3, 0.5).degenerate);
}

TEST(SignalTerm, EqualsQuadraticFormWithoutNoise) {
    for (int d : {3, 4, 5})
        for (std::uint32_t k : {5u, 9u, 14u}) {
            const ModelParams params{30, d, k, 0.0};
            const auto sample = sample_hpc(params, 5);
            const CenteredOperator op(project(sample), 0.0);
            EXPECT_NEAR(quadratic_form_stat(op, sample.planted()), signal_term(30, k, d, 0.0).value, 1e-9);
        }
}

TEST(SignalTerm, MatchesBruteForceMean) {
    // E[q(H; u_S)] over the noise is the planted contribution: brute force over all d-subsets of S
    for (int d : {3, 4})
        for (std::uint32_t k = static_cast<std::uint32_t>(d); k <= 9; ++k) {
            std::vector<Vertex> s(k);
            for (std::uint32_t i = 0; i < k; ++i) s[i] = i;
            double total = 0.0;
            for_each_subset(s, d, [&](std::span<const Vertex>) { total += d * (d - 1) * 0.7; });
            EXPECT_NEAR(signal_term(20, k, d, 0.3).value, total / k, 1e-9);
        }
}

TEST(NoiseRadius, LowerTailFrequency) {
    const ModelParams params{40, 3, 10, 0.3};
    const double delta = 0.2;
    const double s = signal_term(40, 10, 3, 0.3).value;
    const double r = detection_noise_radius(40, 10, 3, 0.3, delta);
    int below = 0;
    for (int rep = 0; rep < 500; ++rep) {
        const auto sample = sample_hpc(params, mix64({17, static_cast<std::uint64_t>(rep)}));
        const CenteredOperator op(project(sample), null_mean_offdiag(params));
        if (quadratic_form_stat(op, sample.planted()) < s - r) ++below;
    }
    EXPECT_LE(below / 500.0, 0.15);
    EXPECT_THROW(detection_noise_radius(40, 10, 3, 0.3, 0.0), ConfigError);
}

TEST(Calibration, UpperQuantileConvention) {
    std::vector<double> v;
    for (int i = 100; i >= 1; --i) v.push_back(i);
    EXPECT_EQ(upper_quantile(v, 0.05), 95.0);
    EXPECT_EQ(upper_quantile(v, 0.051), 95.0);
    EXPECT_EQ(upper_quantile(v, 0.5), 50.0);
    EXPECT_EQ(upper_quantile(v, 0.999), 1.0);
    EXPECT_THROW(upper_quantile({}, 0.05), ConfigError);
}

TEST(Calibration, GuardsAndDeterminism) {
    const ModelParams params{40, 3, 0, 0.5};
    EXPECT_THROW(calibrate_C(params, 0.05, 49, 1), ConfigError);
    EXPECT_THROW(calibrate_C(ModelParams{40, 3, 0, 0.0}, 0.05, 50, 1), ConfigError);
    EXPECT_THROW(calibrate_C(params, 0.0, 50, 1), ConfigError);
    EXPECT_EQ(calibrate_C(params, 0.05, 60, 9, {}, 1), calibrate_C(params, 0.05, 60, 9, {}, 4));
}

TEST(Calibration, QuantileMonotoneInAlpha) {
    const auto ratios = null_ratios(ModelParams{50, 3, 0, 0.4}, 100, 3, {}, 1);
    double prev = 0.0;
    for (double a : {0.5, 0.2, 0.1, 0.05, 0.01}) {
        const double q = upper_quantile(ratios, a);
        EXPECT_GE(q, prev);
        prev = q;
    }
}

TEST(Calibration, HoldoutTypeOneError) {
    const ModelParams params{60, 3, 0, 0.5};
    const double c = calibrate_C(params, 0.05, 200, 21);
    const auto risk = estimate_risk(params, 30, c, 200, 22);
    EXPECT_LE(risk.type1, 0.12);
}

TEST(Risk, Extremes) {
    const ModelParams params{40, 3, 0, 0.5};
    EXPECT_EQ(estimate_risk(params, 10, 1e6, 30, 1).type1, 0.0);
    const auto r = estimate_risk(ModelParams{30, 3, 0, 0.0}, 30, 1.0, 10, 2);
    EXPECT_EQ(r.type1, 0.0);
    EXPECT_EQ(r.type2, 0.0);
    EXPECT_EQ(r.total(), 0.0);
}

TEST(Coupling, DominanceOfQuadraticForm) {
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        const std::uint32_t n = 25;
        const int d = 3 + static_cast<int>(rng.below(2));
        const double p = rng.uniform(0.0, 1.0);
        const auto s = rng.subset(n, static_cast<std::uint32_t>(d + rng.below(8)));
        std::vector<Vertex> tset(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(1 + rng.below(s.size())));
        const auto c = sample_coupled(n, d, p, s, tset, rng.next());
        const double mu = p * static_cast<double>(binom(n - 2, static_cast<std::uint64_t>(d - 2)));
        const double qs = quadratic_form_stat(CenteredOperator(project(c.with_s), mu), tset);
        const double qt = quadratic_form_stat(CenteredOperator(project(c.with_t), mu), tset);
        ASSERT_GE(qs, qt - 1e-9);
    }
}
