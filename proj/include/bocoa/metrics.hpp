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

#ifndef BOCOA_METRICS_HPP
#define BOCOA_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bocoa/bo.hpp"

namespace bocoa {

/// Proportion of problems solved as a function of the evaluation budget.
struct ErtdCurve {
    long budget = 0;
    std::size_t problem_count = 0;
    std::vector<double> proportion;  // indexed by evaluations-1, non-decreasing

    double at(long evals) const {
        if (evals < 1 || proportion.empty()) return 0.0;
        const std::size_t i =
            std::min<std::size_t>(static_cast<std::size_t>(evals), proportion.size());
        return proportion[i - 1];
    }
    double final_value() const { return at(budget); }
};

/// Build the curve from per-problem first-hit indices (1-based, 0 = never).
inline ErtdCurve ertd(const std::vector<std::size_t>& first_hits, long budget) {
    if (first_hits.empty()) throw std::invalid_argument("ertd: empty problem set");
    ErtdCurve c;
    c.budget = budget;
    c.problem_count = first_hits.size();
    c.proportion.assign(static_cast<std::size_t>(budget), 0.0);
    std::vector<long> hits_at(static_cast<std::size_t>(budget) + 1, 0);
    for (std::size_t h : first_hits)
        if (h >= 1 && h <= static_cast<std::size_t>(budget)) ++hits_at[h];
    long solved = 0;
    for (long n = 1; n <= budget; ++n) {
        solved += hits_at[static_cast<std::size_t>(n)];
        c.proportion[static_cast<std::size_t>(n - 1)] =
            static_cast<double>(solved) / static_cast<double>(first_hits.size());
    }
    return c;
}

/// Relative optimization performance: 0 at the random-search level, 1 at the
/// reference level. The denominator measures how much better than random the
/// reference is; a degenerate one is an error.
inline double popt(double ertd_algo, double ertd_ref, double ertd_random) {
    if (!(ertd_ref > ertd_random))
        throw std::domain_error("popt: reference must beat random search");
    return (ertd_algo - ertd_random) / (ertd_ref - ertd_random);
}

struct Q2Result {
    double value = 0.0;  // clamped at -1 from below
    double raw = 0.0;
    bool clamped = false;
};

/// Predictivity coefficient: 1 - sum (y - yhat)^2 / sum (y - mean y)^2.
/// 1 is a perfect prediction, 0 the best constant one; values below -1 are
/// reported as -1 with the raw value kept alongside.
inline Q2Result q2_full(const Vector& y_true, const Vector& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.size() < 2)
        throw std::invalid_argument("q2: need two equal-length samples of size >= 2");
    const double mean = y_true.mean();
    const double ss_tot = (y_true.array() - mean).square().sum();
    if (!(ss_tot > 0.0)) throw std::invalid_argument("q2: constant y_true");
    Q2Result r;
    r.raw = 1.0 - (y_true - y_pred).squaredNorm() / ss_tot;
    r.clamped = r.raw < -1.0;
    r.value = r.clamped ? -1.0 : r.raw;
    return r;
}

inline double q2(const Vector& y_true, const Vector& y_pred) {
    return q2_full(y_true, y_pred).value;
}

namespace detail {

/// Survival function of the Kolmogorov distribution, series truncated when
/// terms drop below 1e-10. The theta-function form is used for small
/// arguments where the alternating series converges slowly.
inline double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 1.0) {
        double cdf = 0.0;
        for (int k = 1; k < 100; k += 2) {
            const double term = std::exp(-k * k * M_PI * M_PI / (8.0 * x * x));
            cdf += term;
            if (term < 1e-10) break;
        }
        cdf *= std::sqrt(2.0 * M_PI) / x;
        return std::min(std::max(1.0 - cdf, 0.0), 1.0);
    }
    double sf = 0.0;
    double sign = 1.0;
    for (int k = 1; k < 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sf += sign * term;
        sign = -sign;
        if (term < 1e-10) break;
    }
    return std::min(std::max(2.0 * sf, 0.0), 1.0);
}

}  // namespace detail

/// One-sample Kolmogorov-Smirnov p-value against the standard normal.
/// The reference distribution is fixed N(0,1), not a fitted normal, so
/// location/scale shifts of the sample change the p-value.
inline double ks_normal_pvalue(std::vector<double> sample) {
    const std::size_t n = sample.size();
    if (n < 5) throw std::invalid_argument("ks_normal_pvalue: need at least 5 values");
    std::sort(sample.begin(), sample.end());
    double d_stat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = 0.5 * std::erfc(-sample[i] / std::sqrt(2.0));
        d_stat = std::max(d_stat, (i + 1.0) / n - cdf);
        d_stat = std::max(d_stat, cdf - static_cast<double>(i) / n);
    }
    return detail::kolmogorov_sf(std::sqrt(static_cast<double>(n)) * d_stat);
}

/// Ranks of values, 1 for the largest; ties broken by position.
inline std::vector<int> rank_descending(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] > values[b];
    });
    std::vector<int> ranks(values.size());
    for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<int>(r) + 1;
    return ranks;
}

/// The regression-study model variants.
enum class GpVariant { Default, Quadratic, Scaling, Warping, Exponential };

inline const std::vector<GpVariant>& all_gp_variants() {
    static const std::vector<GpVariant> v = {GpVariant::Default, GpVariant::Quadratic,
                                             GpVariant::Scaling, GpVariant::Warping,
                                             GpVariant::Exponential};
    return v;
}

inline std::string to_string(GpVariant v) {
    switch (v) {
        case GpVariant::Default: return "default";
        case GpVariant::Quadratic: return "quadratic";
        case GpVariant::Scaling: return "scaling";
        case GpVariant::Warping: return "warping";
        case GpVariant::Exponential: return "exponential";
    }
    throw std::logic_error("to_string: unknown variant");
}

inline GpVariant parse_gp_variant(const std::string& s) {
    for (GpVariant v : all_gp_variants())
        if (to_string(v) == s) return v;
    throw std::invalid_argument("unknown GP variant: " + s);
}

struct RegressionEntry {
    GpVariant variant = GpVariant::Default;
    TestFunctionId fid = TestFunctionId::F1_Sphere;
    int dim = 0;
    double q2_mean = 0.0;
    double q2_sd = 0.0;
    double ks_mean = 0.0;
    double ks_sd = 0.0;
    int instances_used = 0;
    int instances_skipped = 0;
};

/// Train one GP variant on a maximin LHS of size 30 d, test it on another
/// design of the same size, and report Q2 of the raw-space predictions and
/// KS normality p-values of the working-space standardized residuals,
/// aggregated over instances. Instances whose fit fails are skipped and
/// counted.
inline RegressionEntry regression_experiment(GpVariant variant, TestFunctionId fid, int d,
                                             int n_instances, std::uint64_t seed) {
    RegressionEntry entry;
    entry.variant = variant;
    entry.fid = fid;
    entry.dim = d;

    KernelFamily kernel = KernelFamily::Matern52;
    TrendDegree trend = TrendDegree::Constant;
    if (variant == GpVariant::Quadratic) trend = TrendDegree::QuadraticNoInteraction;
    if (variant == GpVariant::Exponential) kernel = KernelFamily::Exponential;

    std::vector<double> q2s, kss;
    for (int idx = 0; idx < n_instances; ++idx) {
        const FunctionInstance inst = make_instance(fid, d, derive_seed(seed, 61, idx));
        const SearchSpace& space = inst.space();
        const int n = 30 * d;
        const Matrix xa =
            scale_to_box(maximin_lhs(n, d, derive_seed(seed, 62, idx)), space);
        const Matrix xb =
            scale_to_box(maximin_lhs(n, d, derive_seed(seed, 63, idx)), space);
        Vector ya(n), yb(n);
        for (int i = 0; i < n; ++i) {
            ya[i] = inst.objective(xa.row(i).transpose());
            yb[i] = inst.objective(xb.row(i).transpose());
        }

        OutputWarp warp = OutputWarp::identity();
        if (variant == GpVariant::Warping)
            warp = warp_fit(xa, ya, kernel, trend, space, derive_seed(seed, 64, idx));
        const OutputRescaler rescaler = rescale_fit(warp.apply(ya));
        const Vector ya_work = rescaler.apply(warp.apply(ya));

        Matrix xa_work = xa, xb_work = xb;
        SearchSpace working_space = space;
        TrainConfig tc{kernel, trend};
        InputScaling scaling = InputScaling::identity(d);
        if (variant == GpVariant::Scaling) {
            Matrix ua(n, d), ub(n, d);
            for (int i = 0; i < n; ++i) {
                ua.row(i) = space.to_unit(xa.row(i).transpose()).transpose();
                ub.row(i) = space.to_unit(xb.row(i).transpose()).transpose();
            }
            const ScalingFit fit =
                scaling_fit(ua, ya_work, kernel, trend, derive_seed(seed, 65, idx));
            scaling = fit.scaling;
            xa_work = scaling.apply_rows(ua);
            xb_work = scaling.apply_rows(ub);
            working_space = SearchSpace::cube(d, 0.0, 1.0);
            tc.start_hint = fit.theta_hint;
        }

        TrainerState state;
        const TrainResult tr = train(xa_work, ya_work, tc, working_space, state,
                                     derive_seed(seed, 66, idx));
        if (!tr.ok()) {
            ++entry.instances_skipped;
            continue;
        }

        Vector y_pred(n);
        std::vector<double> residuals(static_cast<std::size_t>(n));
        const Vector yb_work = rescaler.apply(warp.apply(yb));
        const double sd_floor = 1e-9 * std::sqrt(tr.model->prior_variance());
        for (int i = 0; i < n; ++i) {
            double m, var;
            tr.model->posterior_moments(xb_work.row(i).transpose(), &m, &var);
            double pred_raw = rescaler.invert(m);
            if (!warp.is_identity()) pred_raw = warp.invert(pred_raw);
            y_pred[i] = pred_raw;
            residuals[static_cast<std::size_t>(i)] =
                (yb_work[i] - m) / std::max(std::sqrt(var), sd_floor);
        }
        q2s.push_back(q2(yb, y_pred));
        kss.push_back(ks_normal_pvalue(residuals));
        ++entry.instances_used;
    }

    const auto mean_sd = [](const std::vector<double>& v, double* mean, double* sd) {
        if (v.empty()) {
            *mean = *sd = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        *mean = m;
        *sd = std::sqrt(s / static_cast<double>(v.size()));
    };
    mean_sd(q2s, &entry.q2_mean, &entry.q2_sd);
    mean_sd(kss, &entry.ks_mean, &entry.ks_sd);
    return entry;
}

}  // namespace bocoa

#endif  // BOCOA_METRICS_HPP
