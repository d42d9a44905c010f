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

#ifndef BOCOA_TRANSFORMS_HPP
#define BOCOA_TRANSFORMS_HPP

#include <cmath>
#include <cstdint>

#include "bocoa/gp.hpp"
#include "bocoa/lbfgs.hpp"
#include "bocoa/train.hpp"

namespace bocoa {

/// Monotone sum-of-tanh output transformation,
/// warp(f) = f + sum_j a_j tanh(b_j (c_j + f)), with a_j, b_j >= 0 so the
/// derivative 1 + sum_j a_j b_j sech^2(.) never drops below 1.
struct OutputWarp {
    Vector a;  // J = 2, non-negative
    Vector b;  // J = 2, non-negative
    Vector c;  // J = 2
    bool fit_failed = false;

    static OutputWarp identity() {
        OutputWarp w;
        w.a = Vector::Zero(2);
        w.b = Vector::Zero(2);
        w.c = Vector::Zero(2);
        return w;
    }

    bool is_identity() const { return a.isZero(0.0); }

    double apply(double f) const {
        double out = f;
        for (Eigen::Index j = 0; j < a.size(); ++j)
            out += a[j] * std::tanh(b[j] * (c[j] + f));
        return out;
    }

    Vector apply(const Vector& f) const {
        Vector out(f.size());
        for (Eigen::Index i = 0; i < f.size(); ++i) out[i] = apply(f[i]);
        return out;
    }

    double derivative(double f) const {
        double out = 1.0;
        for (Eigen::Index j = 0; j < a.size(); ++j) {
            const double t = std::tanh(b[j] * (c[j] + f));
            out += a[j] * b[j] * (1.0 - t * t);
        }
        return out;
    }

    /// Inverse by safeguarded Newton; the warp moves a value by at most
    /// sum_j a_j, which brackets the root.
    double invert(double w) const {
        const double slack = a.sum();
        double lo = w - slack, hi = w + slack, f = w;
        for (int it = 0; it < 100; ++it) {
            const double val = apply(f) - w;
            if (std::abs(val) <= 1e-13 * (1.0 + std::abs(w))) return f;
            if (val > 0.0) hi = f; else lo = f;
            double next = f - val / derivative(f);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            f = next;
        }
        return f;
    }
};

/// Monotone per-axis deformation of the unit cube,
/// s(u) = 1 - (1 - u^alpha)^beta per coordinate, a bijection of [0,1].
struct InputScaling {
    Vector alpha;  // per-dimension, in [0.25, 4]
    Vector beta;
    bool fit_failed = false;

    static InputScaling identity(int d) {
        InputScaling s;
        s.alpha = Vector::Ones(d);
        s.beta = Vector::Ones(d);
        return s;
    }

    bool is_identity() const {
        return (alpha.array() == 1.0).all() && (beta.array() == 1.0).all();
    }

    double apply1(int k, double u) const {
        return 1.0 - std::pow(1.0 - std::pow(u, alpha[k]), beta[k]);
    }

    Vector apply(const Vector& u) const {
        Vector v(u.size());
        for (Eigen::Index k = 0; k < u.size(); ++k) v[k] = apply1(static_cast<int>(k), u[k]);
        return v;
    }

    Matrix apply_rows(const Matrix& u) const {
        Matrix v(u.rows(), u.cols());
        for (Eigen::Index i = 0; i < u.rows(); ++i)
            v.row(i) = apply(u.row(i).transpose()).transpose();
        return v;
    }
};

namespace detail {

inline double population_sd(const Vector& y) {
    return std::sqrt((y.array() - y.mean()).square().sum() / y.size());
}

/// Central-difference gradient helper for the transform fits.
template <typename F>
double with_fd_gradient(F&& value_of, const Vector& x, Vector* grad) {
    const double f = value_of(x);
    if (grad) {
        grad->resize(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
            Vector xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fp = value_of(xp);
            const double fm = value_of(xm);
            (*grad)[i] = (fp - fm) / (2.0 * h);
        }
        if (!grad->allFinite()) return std::numeric_limits<double>::quiet_NaN();
    }
    return f;
}

}  // namespace detail

/// Fit the output warp on the initial design by maximizing the warped-data
/// GP likelihood, including the log-Jacobian of the transformation, jointly
/// over the warp parameters and the kernel lengthscales. Applied once,
/// before the loop; the result is frozen afterwards. On failure the
/// identity warp is returned with fit_failed set.
inline OutputWarp warp_fit(const Matrix& inputs, const Vector& raw_outputs,
                           KernelFamily kernel, TrendDegree trend,
                           const SearchSpace& working_space, std::uint64_t seed) {
    const int t = static_cast<int>(raw_outputs.size());
    const int d = static_cast<int>(inputs.cols());
    OutputWarp fallback = OutputWarp::identity();
    fallback.fit_failed = true;
    if (t < trend_basis_size(trend, d) + 2) return fallback;

    const double m0 = raw_outputs.mean();
    const double s0 = std::max(detail::population_sd(raw_outputs), 1e-12);

    LikelihoodEvaluator ev(kernel, trend, inputs, raw_outputs, 0.0);
    const LengthscaleBounds lb = lengthscale_bounds(working_space);

    // parameters: u_j = log a_j, v_j = log b_j, c_j (J = 2), then log theta
    const int np = 6 + d;
    Vector lo(np), hi(np);
    for (int j = 0; j < 2; ++j) {
        lo[j] = std::log(1e-6 * s0);
        hi[j] = std::log(5.0 * s0);
        lo[2 + j] = std::log(0.01 / s0);
        hi[2 + j] = std::log(10.0 / s0);
        lo[4 + j] = -m0 - 4.0 * s0;
        hi[4 + j] = -m0 + 4.0 * s0;
    }
    lo.tail(d) = lb.lower.array().log();
    hi.tail(d) = lb.upper.array().log();

    const auto unpack = [&](const Vector& q) {
        OutputWarp w;
        w.a = q.segment(0, 2).array().exp();
        w.b = q.segment(2, 2).array().exp();
        w.c = q.segment(4, 2);
        return w;
    };
    const auto value_of = [&](const Vector& q) -> double {
        const OutputWarp w = unpack(q);
        const Vector warped = w.apply(raw_outputs);
        const double sw = detail::population_sd(warped);
        if (!(sw > 1e-12)) return std::numeric_limits<double>::quiet_NaN();
        const Vector z = (warped.array() - warped.mean()) / sw;
        const NllEval e = ev.eval_with_outputs(q.tail(d).array().exp(), z, false);
        if (!e.ok) return std::numeric_limits<double>::quiet_NaN();
        double log_jac = -t * std::log(sw);
        for (int i = 0; i < t; ++i) log_jac += std::log(w.derivative(raw_outputs[i]));
        return e.value - log_jac;
    };
    const auto objective = [&](const Vector& q, Vector* grad) {
        return detail::with_fd_gradient(value_of, q, grad);
    };

    // identity-leaning start plus a few seeded Latin hypercube starts
    std::vector<Vector> starts;
    {
        Vector q0(np);
        q0.segment(0, 2).setConstant(std::log(1e-5 * s0));
        q0.segment(2, 2).setConstant(std::log(1.0 / s0));
        q0[4] = -m0 - s0;
        q0[5] = -m0 + s0;
        q0.tail(d) = 0.5 * (lo.tail(d) + hi.tail(d));
        starts.push_back(std::move(q0));
    }
    const Design lhs = maximin_lhs(3, np, derive_seed(seed, 11), 0);
    for (int i = 0; i < lhs.n(); ++i) {
        Vector q(np);
        for (int k = 0; k < np; ++k) q[k] = lo[k] + (hi[k] - lo[k]) * lhs.points(i, k);
        starts.push_back(std::move(q));
    }

    double best = std::numeric_limits<double>::infinity();
    Vector best_q;
    BoxLbfgsOptions opt;
    opt.max_iters = 80;
    for (const Vector& s : starts) {
        const BoxLbfgsResult r = minimize_box_lbfgs(objective, s, lo, hi, opt);
        if (std::isfinite(r.value) && r.value < best) {
            best = r.value;
            best_q = r.x;
        }
    }
    if (!std::isfinite(best)) return fallback;

    // Identity-warp baseline over the lengthscales alone. A near-affine warp
    // sits on a likelihood ridge (its Jacobian gain cancels against the
    // rescaled variance), so the warp is kept only when it clears the
    // baseline by an information-criterion margin for its 6 parameters.
    const Vector z0 = (raw_outputs.array() - m0) / s0;
    const auto baseline_objective = [&](const Vector& lt, Vector* grad) -> double {
        const NllEval e = ev.eval_with_outputs(lt.array().exp(), z0, grad != nullptr);
        if (!e.ok) return std::numeric_limits<double>::quiet_NaN();
        if (grad) *grad = e.grad_log_theta;
        return e.value;
    };
    double baseline = std::numeric_limits<double>::infinity();
    const Vector blo = lb.lower.array().log();
    const Vector bhi = lb.upper.array().log();
    for (const Vector& s : starts) {
        const BoxLbfgsResult r =
            minimize_box_lbfgs(baseline_objective, s.tail(d), blo, bhi, opt);
        if (std::isfinite(r.value)) baseline = std::min(baseline, r.value);
    }
    baseline += t * std::log(s0);  // same constants as the warped objective
    if (!(best < baseline - 6.0)) return OutputWarp::identity();
    return unpack(best_q);
}

struct ScalingFit {
    InputScaling scaling;
    Vector theta_hint;  // lengthscales of the joint optimum, for warm starts
};

/// Fit the per-axis input scaling jointly with the kernel lengthscales by
/// maximum likelihood. Refit at every iteration, alongside the kernel.
/// On failure the identity scaling is returned with fit_failed set.
inline ScalingFit scaling_fit(const Matrix& unit_inputs, const Vector& outputs,
                              KernelFamily kernel, TrendDegree trend, std::uint64_t seed) {
    const int d = static_cast<int>(unit_inputs.cols());
    const SearchSpace unit_box = SearchSpace::cube(d, 0.0, 1.0);
    const LengthscaleBounds lb = lengthscale_bounds(unit_box);

    ScalingFit fallback;
    fallback.scaling = InputScaling::identity(d);
    fallback.scaling.fit_failed = true;
    fallback.theta_hint = (lb.lower.array() * lb.upper.array()).sqrt();
    if (static_cast<int>(unit_inputs.rows()) < trend_basis_size(trend, d) + 2)
        return fallback;

    // parameters: log alpha (d), log beta (d), log theta (d)
    const int np = 3 * d;
    Vector lo(np), hi(np);
    lo.segment(0, 2 * d).setConstant(std::log(0.25));
    hi.segment(0, 2 * d).setConstant(std::log(4.0));
    lo.tail(d) = lb.lower.array().log();
    hi.tail(d) = lb.upper.array().log();

    const auto unpack = [&](const Vector& q) {
        InputScaling s;
        s.alpha = q.segment(0, d).array().exp();
        s.beta = q.segment(d, d).array().exp();
        return s;
    };
    const auto value_of = [&](const Vector& q) -> double {
        const InputScaling s = unpack(q);
        const Matrix scaled = s.apply_rows(unit_inputs);
        try {
            LikelihoodEvaluator ev(kernel, trend, scaled, outputs, 0.0);
            const NllEval e = ev.eval(q.tail(d).array().exp(), false);
            return e.ok ? e.value : std::numeric_limits<double>::quiet_NaN();
        } catch (const std::invalid_argument&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    const auto objective = [&](const Vector& q, Vector* grad) {
        return detail::with_fd_gradient(value_of, q, grad);
    };

    std::vector<Vector> starts;
    {
        Vector q0 = Vector::Zero(np);  // identity scaling
        q0.tail(d) = 0.5 * (lo.tail(d) + hi.tail(d));
        starts.push_back(std::move(q0));
    }
    const Design lhs = maximin_lhs(2, np, derive_seed(seed, 12), 0);
    for (int i = 0; i < lhs.n(); ++i) {
        Vector q(np);
        for (int k = 0; k < np; ++k) q[k] = lo[k] + (hi[k] - lo[k]) * lhs.points(i, k);
        starts.push_back(std::move(q));
    }

    double best = std::numeric_limits<double>::infinity();
    Vector best_q;
    BoxLbfgsOptions opt;
    opt.max_iters = 60;
    for (const Vector& s : starts) {
        const BoxLbfgsResult r = minimize_box_lbfgs(objective, s, lo, hi, opt);
        if (std::isfinite(r.value) && r.value < best) {
            best = r.value;
            best_q = r.x;
        }
    }
    if (!std::isfinite(best)) return fallback;
    ScalingFit out;
    out.scaling = unpack(best_q);
    out.theta_hint = best_q.tail(d).array().exp();
    return out;
}

}  // namespace bocoa

#endif  // BOCOA_TRANSFORMS_HPP
