#include <catch2/catch.hpp>

#include "bocoa/metrics.hpp"

using namespace bocoa;

TEST_CASE("ERTD counts first hits", "[metrics]") {
    const ErtdCurve c = ertd({5, 0}, 90);
    CHECK(c.at(4) == 0.0);
    CHECK(c.at(5) == 0.5);
    CHECK(c.at(90) == 0.5);
    CHECK(c.final_value() == 0.5);
    CHECK(c.at(0) == 0.0);

    const ErtdCurve flat = ertd({0, 0, 0}, 60);
    for (long n = 1; n <= 60; ++n) CHECK(flat.at(n) == 0.0);

    CHECK_THROWS_AS(ertd({}, 30), std::invalid_argument);
}

TEST_CASE("ERTD curves are monotone step functions", "[metrics]") {
    Rng rng(1);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<std::size_t> hits;
        const long budget = 30 + static_cast<long>(rng.index(120));
        const int n_problems = 1 + static_cast<int>(rng.index(40));
        for (int i = 0; i < n_problems; ++i)
            hits.push_back(rng.index(static_cast<std::size_t>(budget) + 20));  // 0 = never
        const ErtdCurve c = ertd(hits, budget);
        double prev = 0.0;
        for (long n = 1; n <= budget; ++n) {
            CHECK(c.at(n) >= prev);
            CHECK(c.at(n) <= 1.0);
            prev = c.at(n);
        }
    }
}

TEST_CASE("random-search ERTD matches the geometric hit probability", "[metrics]") {
    // f1 in d = 2 with target f_opt + 1: the unit disc around the optimum
    // always fits inside the box, so p = pi / 100 per draw
    const double p = M_PI / 100.0;
    std::vector<std::size_t> hits;
    for (int seed = 0; seed < 400; ++seed) {
        const auto inst = make_instance(TestFunctionId::F1_Sphere, 2, 9000 + seed);
        const RunResult r = random_search_baseline(inst, 60, seed);
        hits.push_back(r.first_hit(inst.f_opt() + 1.0));
    }
    const ErtdCurve c = ertd(hits, 60);
    for (long n : {10L, 30L, 60L}) {
        const double analytic = 1.0 - std::pow(1.0 - p, static_cast<double>(n));
        CHECK(std::abs(c.at(n) - analytic) <= 0.05);
    }
}

TEST_CASE("relative performance identities", "[metrics]") {
    CHECK(popt(0.2, 0.8, 0.2) == 0.0);
    CHECK(popt(0.8, 0.8, 0.2) == 1.0);
    CHECK(popt(0.6, 0.8, 0.2) == Approx(2.0 / 3.0));
    CHECK_THROWS_AS(popt(0.5, 0.2, 0.2), std::domain_error);
    CHECK_THROWS_AS(popt(0.5, 0.1, 0.2), std::domain_error);
}

TEST_CASE("Q2 identities", "[metrics]") {
    const Vector y{{1.0, 2.0, 3.0, 4.0}};
    CHECK(q2(y, y) == 1.0);
    CHECK(q2(y, Vector::Constant(4, y.mean())) == 0.0);
    // mirrored prediction: residuals are twice the centered values, so the
    // raw score is -3 and the reported range clamps it to -1
    const Vector mirrored = 2.0 * y.mean() - y.array();
    CHECK(q2(y, mirrored) == -1.0);
    const Q2Result r = q2_full(y, mirrored);
    CHECK(r.clamped);
    CHECK(r.raw == Approx(-3.0));

    const Vector halfway = 0.5 * (y + Vector::Constant(4, y.mean()));
    CHECK(q2(y, halfway) == Approx(0.75));
    CHECK_FALSE(q2_full(y, halfway).clamped);

    CHECK_THROWS_AS(q2(Vector::Constant(3, 1.0), Vector::Constant(3, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("Q2 is invariant to common positive affine transforms", "[metrics]") {
    Rng rng(12);
    Vector y(20), pred(20);
    for (int i = 0; i < 20; ++i) {
        y[i] = rng.uniform(-3.0, 3.0);
        pred[i] = y[i] + rng.uniform(-0.5, 0.5);
    }
    const double base = q2(y, pred);
    for (double a : {0.01, 2.5, 1000.0}) {
        const double shifted = q2(Vector(a * y.array() - 7.0), Vector(a * pred.array() - 7.0));
        CHECK(shifted == Approx(base).margin(1e-12));
    }
}

namespace {

/// Standard normal quantile by bisection on the CDF (test-only oracle).
double normal_quantile(double p) {
    double lo = -10.0, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("KS p-values at the two calibration points", "[metrics]") {
    // stratified normal quantiles: D = 0.5/n exactly
    std::vector<double> strat(100);
    for (int i = 0; i < 100; ++i) strat[static_cast<std::size_t>(i)] =
        normal_quantile((i + 0.5) / 100.0);
    CHECK(ks_normal_pvalue(strat) >= 0.999);

    const std::vector<double> zeros(50, 0.0);
    CHECK(ks_normal_pvalue(zeros) < 1e-10);

    CHECK_THROWS_AS(ks_normal_pvalue({0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("KS is sensitive to location shifts and monotone in D", "[metrics]") {
    std::vector<double> base(60);
    for (int i = 0; i < 60; ++i) base[static_cast<std::size_t>(i)] =
        normal_quantile((i + 0.5) / 60.0);
    double prev_p = 1.1;
    for (double shift : {0.0, 0.2, 0.5, 1.0, 2.0}) {
        std::vector<double> shifted = base;
        for (double& v : shifted) v += shift;
        const double p = ks_normal_pvalue(shifted);
        CHECK(p < prev_p + 1e-12);
        prev_p = p;
    }
}

TEST_CASE("rank helper yields a permutation with stable ties", "[metrics]") {
    const std::vector<int> r = rank_descending({0.3, 0.9, 0.3, 0.1});
    CHECK(r == std::vector<int>{2, 1, 3, 4});
}

TEST_CASE("regression experiment learns the sphere nearly perfectly", "[metrics]") {
    const RegressionEntry e =
        regression_experiment(GpVariant::Default, TestFunctionId::F1_Sphere, 2, 3, 5);
    CHECK(e.instances_used == 3);
    CHECK(e.instances_skipped == 0);
    CHECK(e.q2_mean >= 0.99);
    CHECK(e.ks_mean >= 0.0);
    CHECK(e.ks_mean <= 1.0);

    const RegressionEntry again =
        regression_experiment(GpVariant::Default, TestFunctionId::F1_Sphere, 2, 3, 5);
    CHECK(e.q2_mean == again.q2_mean);  // deterministic in the seed
    CHECK(e.ks_mean == again.ks_mean);
}
