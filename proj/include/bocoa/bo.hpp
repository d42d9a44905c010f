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

#ifndef BOCOA_BO_HPP
#define BOCOA_BO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bocoa/acquisition.hpp"
#include "bocoa/testbed.hpp"

namespace bocoa {

/// One named optimizer configuration. Unless a name says otherwise the
/// defaults apply: medium DoE, Matern 5/2, constant trend, multi-start
/// BFGS for the EI search.
struct BOConfig {
    std::string name = "M";
    DoeClass doe_class = DoeClass::M;
    KernelFamily kernel = KernelFamily::Matern52;
    TrendDegree trend = TrendDegree::Constant;
    bool output_warp = false;
    bool input_scaling = false;
    bool gp_mean_acq = false;
    AcquisitionKind ei_strategy = AcquisitionKind::MultistartBFGS;
    int budget_multiplier = 30;
    std::optional<OutputWarp> warp_override;  // skip warp_fit, use these parameters
};

inline const std::vector<std::string>& config_registry() {
    static const std::vector<std::string> names = {
        "M",     "S",     "L",     "LinM",    "QuadM",  "ScalM",    "ScalS",
        "ScalL", "WarpM", "WarpS", "WarpL",   "ExpM",   "ExpS",     "ExpScalM",
        "MeanM", "EirandM", "EilocM", "MeanS", "ExpMeanS", "QuadMean", "ExpWarpM",
    };
    return names;
}

inline BOConfig config_from_name(const std::string& name, int d) {
    BOConfig c;
    c.name = name;
    if (name == "M") {
    } else if (name == "S") {
        c.doe_class = DoeClass::S;
    } else if (name == "L") {
        c.doe_class = DoeClass::L;
    } else if (name == "LinM") {
        c.trend = TrendDegree::Linear;
    } else if (name == "QuadM") {
        c.trend = TrendDegree::QuadraticNoInteraction;
    } else if (name == "ScalM") {
        c.input_scaling = true;
    } else if (name == "ScalS") {
        c.input_scaling = true;
        c.doe_class = DoeClass::S;
    } else if (name == "ScalL") {
        c.input_scaling = true;
        c.doe_class = DoeClass::L;
    } else if (name == "WarpM") {
        c.output_warp = true;
    } else if (name == "WarpS") {
        c.output_warp = true;
        c.doe_class = DoeClass::S;
    } else if (name == "WarpL") {
        c.output_warp = true;
        c.doe_class = DoeClass::L;
    } else if (name == "ExpM") {
        c.kernel = KernelFamily::Exponential;
    } else if (name == "ExpS") {
        c.kernel = KernelFamily::Exponential;
        c.doe_class = DoeClass::S;
    } else if (name == "ExpScalM") {
        c.kernel = KernelFamily::Exponential;
        c.input_scaling = true;
    } else if (name == "MeanM") {
        c.gp_mean_acq = true;
    } else if (name == "EirandM") {
        c.ei_strategy = AcquisitionKind::RandomOnly;
    } else if (name == "EilocM") {
        c.ei_strategy = AcquisitionKind::SingleLocal;
    } else if (name == "MeanS") {
        c.gp_mean_acq = true;
        c.doe_class = DoeClass::S;
    } else if (name == "ExpMeanS") {
        c.kernel = KernelFamily::Exponential;
        c.gp_mean_acq = true;
        c.doe_class = DoeClass::S;
    } else if (name == "QuadMean") {
        c.gp_mean_acq = true;
        c.trend = TrendDegree::QuadraticNoInteraction;
        c.doe_class = DoeClass::QuadMean;
    } else if (name == "ExpWarpM") {
        c.kernel = KernelFamily::Exponential;
        c.output_warp = true;
    } else {
        throw std::invalid_argument("config_from_name: unknown configuration " + name);
    }
    if (doe_size(c.doe_class, d) >= c.budget_multiplier * d)
        throw std::invalid_argument("config_from_name: initial DoE exceeds the budget");
    return c;
}

enum class TerminationReason { BudgetExhausted, RepeatedFailures };

struct IterationRecord {
    int eval_index = 0;  // 1-based ledger index of this iteration's evaluation
    bool trained_ok = false;
    bool nugget_active = false;
    bool range_decrease = false;
    bool model_failure = false;  // training failed, random point drawn
    AcquisitionStatus acq_status = AcquisitionStatus::EIsuccess;
};

/// Full record of one optimization run.
struct RunResult {
    std::string config_name;
    nlohmann::json instance_descriptor;
    std::uint64_t seed = 0;
    std::vector<Vector> points;
    std::vector<double> values;      // raw objective values, evaluation order
    std::vector<double> best_trace;  // non-increasing
    std::vector<IterationRecord> iterations;
    TerminationReason terminated = TerminationReason::BudgetExhausted;
    OutputWarp warp = OutputWarp::identity();
    InputScaling final_scaling = InputScaling::identity(1);

    double best_value() const {
        return best_trace.empty() ? std::numeric_limits<double>::infinity()
                                  : best_trace.back();
    }

    /// 1-based index of the first evaluation at or below target, 0 if none.
    std::size_t first_hit(double target) const {
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] <= target) return i + 1;
        return 0;
    }
};

namespace detail {

inline void record_evaluation(RunResult& out, const Vector& x, double f) {
    out.points.push_back(x);
    out.values.push_back(f);
    const double prev =
        out.best_trace.empty() ? std::numeric_limits<double>::infinity() : out.best_trace.back();
    out.best_trace.push_back(std::min(prev, f));
}

}  // namespace detail

/// Run one Bayesian-optimization campaign leg on a function instance:
/// maximin LHS initial design, then the fit / acquire / evaluate loop until
/// the budget of budget_multiplier * d evaluations is spent, or until 10
/// consecutive iterations fail beyond recovery.
///
/// Seed streams (all derived from the run seed): 1 initial design, 2 warp
/// fit, 3 scaling fit, 4 training, 5 model-failure fallback draws,
/// 6 acquisition. Per-iteration streams are indexed by the iteration.
inline RunResult run(const BOConfig& config, const FunctionInstance& instance,
                     std::uint64_t seed) {
    const int d = instance.dim();
    const SearchSpace& space = instance.space();
    const long budget = static_cast<long>(config.budget_multiplier) * d;
    const int n0 = doe_size(config.doe_class, d);
    if (n0 >= budget) throw std::invalid_argument("run: initial DoE exceeds the budget");

    RunResult out;
    out.config_name = config.name;
    out.instance_descriptor = instance_to_json(instance);
    out.seed = seed;
    out.final_scaling = InputScaling::identity(d);

    EvaluationLedger ledger;
    const Design doe = maximin_lhs(n0, d, derive_seed(seed, 1));
    const Matrix doe_points = scale_to_box(doe, space);
    for (int i = 0; i < n0; ++i) {
        const Vector x = doe_points.row(i).transpose();
        detail::record_evaluation(out, x, instance.evaluate(ledger, x));
    }

    if (config.output_warp)
        out.warp = config.warp_override
                       ? *config.warp_override
                       : warp_fit(doe_points, Eigen::Map<const Vector>(out.values.data(), n0),
                                  config.kernel, config.trend, space, derive_seed(seed, 2));
    const OutputRescaler rescaler = rescale_fit(out.warp.apply(
        Eigen::Map<const Vector>(out.values.data(), n0)));

    TrainerState state;
    int failure_streak = 0;
    out.terminated = TerminationReason::BudgetExhausted;

    while (static_cast<long>(ledger.count()) < budget) {
        const int t = static_cast<int>(ledger.count());
        const int iteration = t - n0 + 1;
        IterationRecord rec;
        rec.eval_index = t + 1;

        Matrix x_raw(t, d);
        for (int i = 0; i < t; ++i) x_raw.row(i) = out.points[i].transpose();
        const Vector y_work =
            rescaler.apply(out.warp.apply(Eigen::Map<const Vector>(out.values.data(), t)));

        TrainConfig tc{config.kernel, config.trend};
        InputMap map;
        Matrix x_work = x_raw;
        SearchSpace working_space = space;
        if (config.input_scaling) {
            Matrix u(t, d);
            for (int i = 0; i < t; ++i) u.row(i) = space.to_unit(out.points[i]).transpose();
            const ScalingFit fit = scaling_fit(u, y_work, config.kernel, config.trend,
                                               derive_seed(seed, 3, iteration));
            map.scaling = fit.scaling;
            map.space = space;
            x_work = fit.scaling.apply_rows(u);
            working_space = SearchSpace::cube(d, 0.0, 1.0);
            tc.start_hint = fit.theta_hint;
            out.final_scaling = fit.scaling;
        }

        TrainResult tr = train(x_work, y_work, tc, working_space, state,
                               derive_seed(seed, 4, iteration));
        state = tr.state;
        rec.nugget_active = state.nugget_active;
        rec.range_decrease = tr.used_range_decrease;

        Vector next;
        if (!tr.ok()) {
            rec.model_failure = true;
            ++failure_streak;
            if (failure_streak >= 10) {
                // every record in `iterations` spent an evaluation; the
                // terminal failure is carried by the termination flag alone
                out.terminated = TerminationReason::RepeatedFailures;
                break;
            }
            Rng rng(derive_seed(seed, 5, iteration));
            next = detail::random_point(space, rng);
        } else {
            failure_streak = 0;
            rec.trained_ok = true;
            AcquireOptions opts;
            opts.strategy = AcquisitionStrategy::for_dim(config.ei_strategy, d);
            opts.gp_mean_active = config.gp_mean_acq;
            const double f_min = y_work.minCoeff();
            const AcquisitionOutcome acq =
                acquire(*tr.model, f_min, opts, space, state, iteration,
                        derive_seed(seed, 6, iteration), map);
            rec.acq_status = acq.status;
            next = acq.point;
        }

        detail::record_evaluation(out, next, instance.evaluate(ledger, next));
        out.iterations.push_back(rec);
    }
    return out;
}

/// Uniform i.i.d. sampling over the search space, as a performance floor.
inline RunResult random_search_baseline(const FunctionInstance& instance, long budget,
                                        std::uint64_t seed) {
    RunResult out;
    out.config_name = "random";
    out.instance_descriptor = instance_to_json(instance);
    out.seed = seed;
    out.final_scaling = InputScaling::identity(instance.dim());
    EvaluationLedger ledger;
    Rng rng(derive_seed(seed, 7));
    for (long i = 0; i < budget; ++i) {
        const Vector x = detail::random_point(instance.space(), rng);
        detail::record_evaluation(out, x, instance.evaluate(ledger, x));
    }
    return out;
}

}  // namespace bocoa

#endif  // BOCOA_BO_HPP
