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

#ifndef BOCOA_ACQUISITION_HPP
#define BOCOA_ACQUISITION_HPP

#include <cmath>
#include <cstdint>
#include <optional>

#include "bocoa/doe.hpp"
#include "bocoa/gp.hpp"
#include "bocoa/lbfgs.hpp"
#include "bocoa/rng.hpp"
#include "bocoa/train.hpp"
#include "bocoa/transforms.hpp"

namespace bocoa {

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Expected improvement of a Gaussian with the given moments below f_min:
/// (f_min - m) Phi(u) + s phi(u), u = (f_min - m) / s. The s -> 0 limit is
/// the deterministic improvement max(f_min - m, 0).
inline double ei_value(double mean, double sd, double f_min) {
    if (sd <= 0.0) return std::max(f_min - mean, 0.0);
    const double u = (f_min - mean) / sd;
    return (f_min - mean) * normal_cdf(u) + sd * normal_pdf(u);
}

/// Expected improvement below f_min under the model posterior at a
/// working-space point. At numerically zero predictive variance it
/// degenerates to the deterministic improvement.
inline double expected_improvement(const GPModel& model, double f_min, const Vector& x) {
    double m, var;
    model.posterior_moments(x, &m, &var);
    const double s = std::sqrt(var);
    if (s <= 1e-12 * std::sqrt(model.prior_variance()))
        return std::max(f_min - m, 0.0);
    return ei_value(m, s, f_min);
}

/// Minus the posterior mean; maximizing it drives pure exploitation.
inline double neg_posterior_mean(const GPModel& model, const Vector& x) {
    return -model.posterior_mean(x);
}

/// Proximity criterion of a candidate against all training points:
/// min_i [k(x_i,x_i) + k(x*,x*) - 2 k(x_i,x*)] / k(x*,x*) >= 1e-6.
/// The numerator is the variance of Y(x_i) - Y(x*) under the covariance
/// used for conditioning; a tiny value means the new row would make the
/// correlation matrix nearly singular. The guard must depend on prior
/// kernel distances only: on a confidently modelled smooth function the
/// posterior variant vetoes every point of the incumbent's basin and the
/// loop degenerates to random search.
inline bool proximity_check(const GPModel& model, const Vector& x_star) {
    const KernelSpec& kernel = model.kernel();
    double ratio_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < model.count(); ++i) {
        const Vector xi = model.inputs().row(i).transpose();
        // 2 (1 - corr): k(xi,xi) + k(x*,x*) - 2 k(xi,x*), over k(x*,x*)
        const double ratio =
            2.0 * (1.0 - correlation(kernel.family, kernel.lengthscales, xi, x_star));
        ratio_min = std::min(ratio_min, ratio);
    }
    return ratio_min >= 1e-6;
}

enum class AcquisitionKind { MultistartBFGS, RandomOnly, SingleLocal };

inline std::string to_string(AcquisitionKind k) {
    switch (k) {
        case AcquisitionKind::MultistartBFGS: return "multistart_bfgs";
        case AcquisitionKind::RandomOnly: return "random_only";
        case AcquisitionKind::SingleLocal: return "single_local";
    }
    throw std::logic_error("to_string: unknown acquisition kind");
}

struct AcquisitionStrategy {
    AcquisitionKind kind = AcquisitionKind::MultistartBFGS;
    int warmup_size = 0;  // min(2000, 500 d)
    int restarts = 0;     // min(10, d)

    static AcquisitionStrategy for_dim(AcquisitionKind k, int d) {
        AcquisitionStrategy s;
        s.kind = k;
        s.warmup_size = std::min(2000, 500 * d);
        s.restarts = std::min(10, d);
        return s;
    }
};

enum class AcquisitionStatus { EIsuccess, FellBackToMean, FellBackToRandom, ReplacedByProximity };

inline std::string to_string(AcquisitionStatus s) {
    switch (s) {
        case AcquisitionStatus::EIsuccess: return "ei_success";
        case AcquisitionStatus::FellBackToMean: return "fell_back_to_mean";
        case AcquisitionStatus::FellBackToRandom: return "fell_back_to_random";
        case AcquisitionStatus::ReplacedByProximity: return "replaced_by_proximity";
    }
    throw std::logic_error("to_string: unknown acquisition status");
}

struct AcquisitionOutcome {
    Vector point;  // in the raw search space
    double value = 0.0;
    AcquisitionStatus status = AcquisitionStatus::EIsuccess;
};

/// Raw-space to working-space coordinate map of a model: identity when no
/// input scaling is active, otherwise the per-axis deformation of the unit
/// cube composed with the affine box map.
struct InputMap {
    std::optional<InputScaling> scaling;
    std::optional<SearchSpace> space;  // raw box, present iff scaling is

    Vector apply(const Vector& x) const {
        if (!scaling) return x;
        return scaling->apply(space->to_unit(x));
    }
    bool is_identity() const { return !scaling.has_value(); }
};

namespace detail {

inline Vector random_point(const SearchSpace& space, Rng& rng) {
    Vector x(space.dim());
    for (int i = 0; i < space.dim(); ++i) x[i] = rng.uniform(space.lower[i], space.upper[i]);
    return x;
}

/// Acquisition objective over raw coordinates, with gradients. The analytic
/// path needs a differentiable kernel and an identity input map; otherwise
/// central differences with step 1e-6 of the box diagonal are used.
class AcquisitionObjective {
public:
    AcquisitionObjective(const GPModel& model, const InputMap& map,
                         const SearchSpace& space, std::optional<double> f_min)
        : model_(model),
          map_(map),
          f_min_(f_min),
          fd_step_(1e-6 * space.diagonal()),
          analytic_(model.kernel().family == KernelFamily::Matern52 && map.is_identity()) {}

    double value(const Vector& x) const {
        const Vector xw = map_.apply(x);
        return f_min_ ? expected_improvement(model_, *f_min_, xw)
                      : neg_posterior_mean(model_, xw);
    }

    /// Value and gradient, as a minimization objective (negated acquisition).
    double neg_value_grad(const Vector& x, Vector* grad) const {
        if (!grad) return -value(x);
        if (!analytic_) {
            grad->resize(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                Vector xp = x, xm = x;
                xp[i] += fd_step_;
                xm[i] -= fd_step_;
                (*grad)[i] = -(value(xp) - value(xm)) / (2.0 * fd_step_);
            }
            return -value(x);
        }
        double m, var;
        Vector dm, dvar;
        model_.posterior_moments_grad(x, &m, &var, &dm, &dvar);
        if (!f_min_) {
            *grad = dm;
            return m;  // minimizing the mean
        }
        const double s = std::sqrt(var);
        if (s <= 1e-12 * std::sqrt(model_.prior_variance())) {
            const double ei = std::max(*f_min_ - m, 0.0);
            *grad = ei > 0.0 ? Vector(dm) : Vector(Vector::Zero(x.size()));
            return -ei;
        }
        const double u = (*f_min_ - m) / s;
        const Vector ds = dvar / (2.0 * s);
        // dEI = -Phi(u) dm + phi(u) ds
        *grad = normal_cdf(u) * dm - normal_pdf(u) * ds;
        return -((*f_min_ - m) * normal_cdf(u) + s * normal_pdf(u));
    }

private:
    const GPModel& model_;
    const InputMap& map_;
    std::optional<double> f_min_;  // empty: GP-mean acquisition
    double fd_step_;
    bool analytic_;
};

struct Candidate {
    Vector point;
    double value = -std::numeric_limits<double>::infinity();
};

inline void consider(Candidate& best, const Vector& x, double v) {
    if (v > best.value) {
        best.point = x;
        best.value = v;
    }
}

inline Candidate run_strategy(const AcquisitionObjective& obj, const AcquisitionStrategy& strat,
                              const SearchSpace& space, std::uint64_t seed) {
    const int d = space.dim();
    Candidate best;
    BoxLbfgsOptions opt;
    opt.max_iters = 100;

    const auto ascend_from = [&](const Vector& start) {
        const BoxLbfgsResult r = minimize_box_lbfgs(
            [&](const Vector& x, Vector* g) { return obj.neg_value_grad(x, g); }, start,
            space.lower, space.upper, opt);
        if (std::isfinite(r.value)) consider(best, r.x, -r.value);
    };

    switch (strat.kind) {
        case AcquisitionKind::MultistartBFGS: {
            for (int r = 0; r < strat.restarts; ++r) {
                const Design lhs =
                    maximin_lhs(strat.warmup_size, d, derive_seed(seed, 21, r), 0);
                Candidate warm;
                for (int i = 0; i < lhs.n(); ++i) {
                    const Vector x = space.from_unit(lhs.points.row(i).transpose());
                    consider(warm, x, obj.value(x));
                }
                consider(best, warm.point, warm.value);
                ascend_from(warm.point);
            }
            break;
        }
        case AcquisitionKind::RandomOnly: {
            Rng rng(derive_seed(seed, 22));
            const long total = static_cast<long>(strat.warmup_size) * strat.restarts;
            for (long i = 0; i < total; ++i) {
                const Vector x = random_point(space, rng);
                consider(best, x, obj.value(x));
            }
            break;
        }
        case AcquisitionKind::SingleLocal: {
            Rng rng(derive_seed(seed, 23));
            const Vector start = random_point(space, rng);
            consider(best, start, obj.value(start));
            ascend_from(start);
            break;
        }
    }
    return best;
}

}  // namespace detail

/// Maximize EI with the configured strategy. Returns nullopt when every
/// candidate's EI is at most epsilon (a zero plateau up to numerical noise),
/// in which case the caller falls back per the failure chain.
inline std::optional<AcquisitionOutcome> optimize_acquisition(
    const GPModel& model, double f_min, const AcquisitionStrategy& strategy,
    const SearchSpace& space, std::uint64_t seed, const InputMap& map = {},
    double epsilon = 1e-12) {
    const detail::AcquisitionObjective obj(model, map, space, f_min);
    const detail::Candidate best = detail::run_strategy(obj, strategy, space, seed);
    if (!(best.value > epsilon)) return std::nullopt;
    return AcquisitionOutcome{best.point, best.value, AcquisitionStatus::EIsuccess};
}

/// Maximize the GP-mean proxy (cannot fail by the zero-plateau rule).
inline AcquisitionOutcome optimize_gp_mean(const GPModel& model,
                                           const AcquisitionStrategy& strategy,
                                           const SearchSpace& space, std::uint64_t seed,
                                           const InputMap& map = {}) {
    const detail::AcquisitionObjective obj(model, map, space, std::nullopt);
    const detail::Candidate best = detail::run_strategy(obj, strategy, space, seed);
    return AcquisitionOutcome{best.point, best.value, AcquisitionStatus::FellBackToMean};
}

struct AcquireOptions {
    AcquisitionStrategy strategy;
    bool gp_mean_active = false;
    double epsilon = 1e-12;  // zero-EI threshold, in rescaled output units
    int gp_mean_period = 5;
};

/// One acquisition decision of the loop:
///  (a) on scheduled iterations (multiples of the period, when the GP-mean
///      option is active) the mean proxy replaces EI;
///  (b) otherwise EI is maximized;
///  (c) a zero-EI failure falls back to the mean proxy when active, else to
///      a uniform random point;
///  (d) the resulting point must pass the proximity criterion or it is
///      replaced by a uniform random point.
/// EI failures increment the trainer failure counter; an EI success resets
/// it. Scheduled mean acquisitions leave the counter untouched.
inline AcquisitionOutcome acquire(const GPModel& model, double f_min,
                                  const AcquireOptions& options, const SearchSpace& space,
                                  TrainerState& state, int iteration_index,
                                  std::uint64_t seed, const InputMap& map = {}) {
    AcquisitionOutcome outcome;
    const bool scheduled_mean =
        options.gp_mean_active && iteration_index % options.gp_mean_period == 0;

    if (scheduled_mean) {
        outcome = optimize_gp_mean(model, options.strategy, space, seed, map);
    } else {
        auto ei = optimize_acquisition(model, f_min, options.strategy, space, seed, map,
                                       options.epsilon);
        if (ei) {
            state.consecutive_failures = 0;
            outcome = *ei;
        } else {
            state.consecutive_failures += 1;
            if (options.gp_mean_active) {
                outcome = optimize_gp_mean(model, options.strategy, space, seed, map);
            } else {
                Rng rng(derive_seed(seed, 24));
                outcome.point = detail::random_point(space, rng);
                outcome.value = 0.0;
                outcome.status = AcquisitionStatus::FellBackToRandom;
            }
        }
    }

    if (!proximity_check(model, map.apply(outcome.point))) {
        Rng rng(derive_seed(seed, 25));
        outcome.point = detail::random_point(space, rng);
        outcome.value = 0.0;
        outcome.status = AcquisitionStatus::ReplacedByProximity;
    }
    return outcome;
}

}  // namespace bocoa

#endif  // BOCOA_ACQUISITION_HPP
