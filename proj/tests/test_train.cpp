#include <catch2/catch.hpp>

#include "bocoa/train.hpp"

using namespace bocoa;

TEST_CASE("lengthscale bounds follow the clipping rule", "[train]") {
    const auto b4 = lengthscale_bounds(SearchSpace::cube(4, -5.0, 5.0));
    for (int k = 0; k < 4; ++k) {
        CHECK(b4.lower[k] == Approx(0.2));   // 10 * sqrt(4) / 100
        CHECK(b4.upper[k] == Approx(20.0));  // 10 * sqrt(4)
    }
    const auto b1 = lengthscale_bounds(SearchSpace::cube(1, 0.0, 1.0));
    CHECK(b1.lower[0] == Approx(0.01));
    CHECK(b1.upper[0] == Approx(1.0));
    for (int d : {1, 2, 3, 5, 10}) {
        const auto b = lengthscale_bounds(SearchSpace::cube(d, -5.0, 5.0));
        for (int k = 0; k < d; ++k) CHECK(b.lower[k] < b.upper[k]);
    }
}

TEST_CASE("rescaler uses initial mean and population SD", "[train]") {
    const OutputRescaler r = rescale_fit(Vector{{0.0, 2.0}});
    CHECK(r.center == Approx(1.0));
    CHECK(r.scale == Approx(1.0));

    const OutputRescaler flat = rescale_fit(Vector{{5.0, 5.0, 5.0}});
    CHECK(flat.center == Approx(5.0));
    CHECK(flat.scale == 1.0);

    const Vector y{{-3.0, 0.5, 12.0, 4.0}};
    const OutputRescaler rr = rescale_fit(y);
    for (int i = 0; i < 4; ++i)
        CHECK(rr.invert(rr.apply(y[i])) == Approx(y[i]).margin(1e-12));
    CHECK_THROWS_AS(rescale_fit(Vector{{1.0}}), std::invalid_argument);
}

namespace {

struct Synth {
    Matrix x;
    Vector y;
};

/// Draw a trajectory of a known Matern52 GP over a seeded design.
Synth sample_gp(int t, double theta_true, std::uint64_t seed) {
    Rng rng(seed);
    Synth s;
    s.x = Matrix(t, 1);
    for (int i = 0; i < t; ++i) s.x(i, 0) = rng.uniform();
    Matrix k(t, t);
    const Vector th = Vector::Constant(1, theta_true);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j)
            k(i, j) = correlation(KernelFamily::Matern52, th, s.x.row(i).transpose(),
                                  s.x.row(j).transpose());
    k.diagonal().array() += 1e-10;
    const Eigen::LLT<Matrix> llt(k);
    Vector z(t);
    for (int i = 0; i < t; ++i) z[i] = rng.normal();
    s.y = llt.matrixL() * z;
    return s;
}

}  // namespace

TEST_CASE("training is deterministic", "[train]") {
    const Synth s = sample_gp(30, 0.2, 5);
    const SearchSpace box = SearchSpace::cube(1, 0.0, 1.0);
    const TrainResult a = train(s.x, s.y, TrainConfig{}, box, TrainerState{}, 99);
    const TrainResult b = train(s.x, s.y, TrainConfig{}, box, TrainerState{}, 99);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.model->kernel().lengthscales == b.model->kernel().lengthscales);
    CHECK(a.model->kernel().variance == b.model->kernel().variance);
}

TEST_CASE("training recovers a known lengthscale most of the time", "[train]") {
    const SearchSpace box = SearchSpace::cube(1, 0.0, 1.0);
    int good = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Synth s = sample_gp(60, 0.3, 1000 + seed);
        const TrainResult tr = train(s.x, s.y, TrainConfig{}, box, TrainerState{}, seed);
        REQUIRE(tr.ok());
        const double theta = tr.model->kernel().lengthscales[0];
        if (theta >= 0.15 && theta <= 0.6) ++good;
    }
    CHECK(good >= 16);  // within a factor 2 in at least 80% of seeds
}

TEST_CASE("three failures trigger the range decrease without likelihood calls", "[train]") {
    const Synth s = sample_gp(25, 0.2, 7);
    const SearchSpace box = SearchSpace::cube(1, 0.0, 1.0);
    TrainerState state;
    state.consecutive_failures = 3;
    state.previous_lengthscales = Vector::Constant(1, 0.9);
    const TrainResult tr = train(s.x, s.y, TrainConfig{}, box, state, 3);
    REQUIRE(tr.ok());
    CHECK(tr.used_range_decrease);
    CHECK(tr.likelihood_evals == 0);
    CHECK(tr.model->kernel().lengthscales[0] == Approx(0.6));
    CHECK(tr.state.previous_lengthscales.value()[0] == Approx(0.6));

    // decreases compound and clip at the lower bound
    TrainerState again = tr.state;
    again.consecutive_failures = 4;
    const TrainResult tr2 = train(s.x, s.y, TrainConfig{}, box, again, 3);
    REQUIRE(tr2.ok());
    CHECK(tr2.model->kernel().lengthscales[0] == Approx(0.4));
    TrainerState floor_state;
    floor_state.consecutive_failures = 3;
    floor_state.previous_lengthscales = Vector::Constant(1, 0.012);
    const TrainResult tr3 = train(s.x, s.y, TrainConfig{}, box, floor_state, 3);
    REQUIRE(tr3.ok());
    CHECK(tr3.model->kernel().lengthscales[0] == Approx(0.01));  // clipped
    CHECK(tr3.model->kernel().lengthscales[0] <= 0.012);
}

TEST_CASE("returned lengthscales stay in bounds and beat all starts", "[train]") {
    const SearchSpace box = SearchSpace::cube(1, 0.0, 1.0);
    const LengthscaleBounds bounds = lengthscale_bounds(box);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Synth s = sample_gp(40, 0.25, 500 + seed);
        const TrainResult tr = train(s.x, s.y, TrainConfig{}, box, TrainerState{}, seed);
        REQUIRE(tr.ok());
        const Vector theta = tr.model->kernel().lengthscales;
        CHECK(theta[0] >= bounds.lower[0]);
        CHECK(theta[0] <= bounds.upper[0]);

        LikelihoodEvaluator ev(KernelFamily::Matern52, TrendDegree::Constant, s.x, s.y, 0.0);
        const double best_nll = ev.eval(theta, false).value;
        for (const Vector& start : training_start_points(bounds, seed)) {
            const NllEval e = ev.eval(start.array().exp(), false);
            if (e.ok) CHECK(best_nll <= e.value + 1e-9);
        }
    }
}

TEST_CASE("nugget activates on failure and persists", "[train]") {
    // duplicated rows make the nugget-free correlation matrix singular
    Matrix x(6, 1);
    x << 0.1, 0.1, 0.4, 0.6, 0.8, 0.95;
    Vector y(6);
    y << 1.0, 1.0, 0.2, -0.3, 0.7, 1.4;
    const SearchSpace box = SearchSpace::cube(1, 0.0, 1.0);
    const TrainResult tr = train(x, y, TrainConfig{}, box, TrainerState{}, 17);
    REQUIRE(tr.ok());
    CHECK(tr.state.nugget_active);
    CHECK(tr.state.nugget_value > 0.0);
    CHECK(tr.model->nugget() > 0.0);

    // and the nugget stays on for later fits of clean data
    const Synth s = sample_gp(20, 0.3, 23);
    const TrainResult tr2 = train(s.x, s.y, TrainConfig{}, box, tr.state, 18);
    REQUIRE(tr2.ok());
    CHECK(tr2.state.nugget_active);
    CHECK(tr2.state.nugget_value == tr.state.nugget_value);
    CHECK(tr2.model->relative_nugget() == tr.state.nugget_value);
}

TEST_CASE("too few observations for the trend is an error", "[train]") {
    const Synth s = sample_gp(3, 0.3, 1);
    const SearchSpace box = SearchSpace::cube(1, 0.0, 1.0);
    TrainConfig cfg;
    cfg.trend = TrendDegree::QuadraticNoInteraction;  // basis size 3 = t
    const TrainResult tr = train(s.x, s.y, cfg, box, TrainerState{}, 2);
    CHECK_FALSE(tr.ok());
}
