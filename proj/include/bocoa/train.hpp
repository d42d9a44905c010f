/*
 * Copyright 2026 the bocoa authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BOCOA_TRAIN_HPP
#define BOCOA_TRAIN_HPP

#include <cstdint>
#include <optional>

#include "bocoa/doe.hpp"
#include "bocoa/gp.hpp"
#include "bocoa/lbfgs.hpp"
#include "bocoa/rng.hpp"

namespace bocoa {

/// Fixed affine standardization of the observations, frozen from the
/// initial design for the whole run.
struct OutputRescaler {
    double center = 0.0;
    double scale = 1.0;

    double apply(double f) const { return (f - center) / scale; }
    double invert(double y) const { return center + scale * y; }

    Vector apply(const Vector& f) const { return (f.array() - center) / scale; }
    Vector invert(const Vector& y) const { return center + scale * y.array(); }
};

/// Center = mean, scale = population standard deviation (divisor n).
/// A zero-spread sample degenerates to scale 1.
inline OutputRescaler rescale_fit(const Vector& initial_outputs) {
    if (initial_outputs.size() < 2)
        throw std::invalid_argument("rescale_fit: need at least 2 outputs");
    OutputRescaler r;
    r.center = initial_outputs.mean();
    const double var =
        (initial_outputs.array() - r.center).square().sum() / initial_outputs.size();
    const double sd = std::sqrt(var);
    r.scale = sd > 0.0 ? sd : 1.0;
    return r;
}

/// Mutable per-run trainer bookkeeping.
struct TrainerState {
    int consecutive_failures = 0;  // consecutive EI acquisition failures
    bool nugget_active = false;
    double nugget_value = 0.0;  // relative nugget once activated
    std::optional<Vector> previous_lengthscales;
};

struct LengthscaleBounds {
    Vector lower;
    Vector upper;
};

/// Per-dimension lengthscale box: (U - L) sqrt(d) / 100 to (U - L) sqrt(d),
/// computed on the model's working coordinates.
inline LengthscaleBounds lengthscale_bounds(const SearchSpace& working_space) {
    const double root_d = std::sqrt(static_cast<double>(working_space.dim()));
    LengthscaleBounds b;
    b.lower = (working_space.upper - working_space.lower) * (root_d / 100.0);
    b.upper = (working_space.upper - working_space.lower) * root_d;
    return b;
}

struct TrainConfig {
    KernelFamily kernel = KernelFamily::Matern52;
    TrendDegree trend = TrendDegree::Constant;
    int max_opt_iters = 100;  // quasi-Newton budget per start
    std::optional<Vector> start_hint;  // extra descent start (e.g. from a scaling fit)
};

struct TrainResult {
    std::optional<GPModel> model;  // empty on unrecoverable failure
    TrainerState state;
    long likelihood_evals = 0;  // objective calls during the search
    bool used_range_decrease = false;
    bool ok() const { return model.has_value(); }
};

/// The multi-start descent starting points: a Latin hypercube of size 2d
/// over the log-lengthscale box. Exposed so tests can reproduce the starts.
inline std::vector<Vector> training_start_points(const LengthscaleBounds& bounds,
                                                 std::uint64_t seed) {
    const int d = static_cast<int>(bounds.lower.size());
    const Vector log_lo = bounds.lower.array().log();
    const Vector log_hi = bounds.upper.array().log();
    const Design lhs = maximin_lhs(2 * d, d, seed, 0);
    std::vector<Vector> starts;
    starts.reserve(2 * d);
    for (int i = 0; i < lhs.n(); ++i) {
        Vector s(d);
        for (int k = 0; k < d; ++k)
            s[k] = log_lo[k] + (log_hi[k] - log_lo[k]) * lhs.points(i, k);
        starts.push_back(std::move(s));
    }
    return starts;
}

/// Fit the GP hyperparameters on working-space data.
///
/// Normal path: multi-start bound-constrained quasi-Newton descents on the
/// concentrated negative log-likelihood, in log lengthscales within the
/// clipped box; the best likelihood wins. The previous lengthscales, when
/// available, join the start list.
///
/// After 3 consecutive acquisition failures the likelihood search is skipped
/// and the lengthscales are set to 2/3 of the previous values (clipped),
/// which inflates predictive uncertainty and restores exploration.
///
/// A Cholesky failure activates a relative nugget of 1e-8 * var(outputs) and
/// the fit is retried once; the nugget then persists for the rest of the run.
inline TrainResult train(const Matrix& inputs, const Vector& outputs, const TrainConfig& cfg,
                         const SearchSpace& working_space, TrainerState state,
                         std::uint64_t seed) {
    TrainResult result;
    result.state = state;

    const int d = static_cast<int>(inputs.cols());
    const LengthscaleBounds bounds = lengthscale_bounds(working_space);
    const auto clip = [&](Vector th) {
        for (int k = 0; k < d; ++k)
            th[k] = std::min(std::max(th[k], bounds.lower[k]), bounds.upper[k]);
        return th;
    };

    if (static_cast<int>(inputs.rows()) < trend_basis_size(cfg.trend, d) + 1)
        return result;  // GLS not identifiable

    // exploration by range decrease: no likelihood search at all
    if (result.state.consecutive_failures >= 3 && result.state.previous_lengthscales) {
        result.used_range_decrease = true;
        const Vector theta = clip(2.0 / 3.0 * (*result.state.previous_lengthscales));
        for (int attempt = 0; attempt < 2; ++attempt) {
            const double g = result.state.nugget_active ? result.state.nugget_value : 0.0;
            LikelihoodEvaluator ev(cfg.kernel, cfg.trend, inputs, outputs, g);
            if (auto model = ev.build(theta)) {
                result.model = std::move(model);
                result.state.previous_lengthscales = theta;
                return result;
            }
            if (result.state.nugget_active) break;
            result.state.nugget_active = true;
            result.state.nugget_value =
                1e-8 * (outputs.array() - outputs.mean()).square().sum() / outputs.size();
        }
        return result;
    }

    const Vector log_lo = bounds.lower.array().log();
    const Vector log_hi = bounds.upper.array().log();

    std::vector<Vector> starts = training_start_points(bounds, seed);
    if (result.state.previous_lengthscales)
        starts.push_back(Vector(clip(*result.state.previous_lengthscales).array().log()));
    if (cfg.start_hint) starts.push_back(Vector(clip(*cfg.start_hint).array().log()));

    const auto search = [&](double rel_nugget) -> std::optional<GPModel> {
        LikelihoodEvaluator ev(cfg.kernel, cfg.trend, inputs, outputs, rel_nugget);
        const auto objective = [&](const Vector& log_theta, Vector* grad) -> double {
            ++result.likelihood_evals;
            const NllEval e = ev.eval(log_theta.array().exp(), grad != nullptr);
            if (!e.ok) return std::numeric_limits<double>::quiet_NaN();
            if (grad) *grad = e.grad_log_theta;
            return e.value;
        };
        double best_value = std::numeric_limits<double>::infinity();
        Vector best_log_theta;
        BoxLbfgsOptions opt;
        opt.max_iters = cfg.max_opt_iters;
        for (const Vector& s : starts) {
            const BoxLbfgsResult r = minimize_box_lbfgs(objective, s, log_lo, log_hi, opt);
            if (std::isfinite(r.value) && r.value < best_value) {
                best_value = r.value;
                best_log_theta = r.x;
            }
        }
        if (!std::isfinite(best_value)) return std::nullopt;
        return ev.build(best_log_theta.array().exp());
    };

    std::optional<GPModel> model =
        search(result.state.nugget_active ? result.state.nugget_value : 0.0);
    if (!model && !result.state.nugget_active) {
        result.state.nugget_active = true;
        result.state.nugget_value =
            1e-8 * (outputs.array() - outputs.mean()).square().sum() / outputs.size();
        model = search(result.state.nugget_value);
    }
    if (model) {
        result.state.previous_lengthscales = model->kernel().lengthscales;
        result.model = std::move(model);
    }
    return result;
}

}  // namespace bocoa

#endif  // BOCOA_TRAIN_HPP
