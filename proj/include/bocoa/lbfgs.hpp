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

#ifndef BOCOA_LBFGS_HPP
#define BOCOA_LBFGS_HPP

#include <cmath>
#include <deque>
#include <limits>

#include "bocoa/search_space.hpp"

namespace bocoa {

struct BoxLbfgsOptions {
    int max_iters = 100;
    int history = 8;
    double grad_tol = 1e-7;     // on the infinity norm of the projected gradient
    int max_backtracks = 25;
};

struct BoxLbfgsResult {
    Vector x;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

/// Box-constrained L-BFGS: quasi-Newton directions with the iterate clamped
/// to the box after each step and an Armijo backtracking line search along
/// the projected path. Objectives signal failure by returning a non-finite
/// value, which the line search treats as +infinity.
///
/// The objective is called as obj(x, grad_or_null) and must fill the
/// gradient when the pointer is non-null.
template <typename F>
BoxLbfgsResult minimize_box_lbfgs(F&& obj, Vector x0, const Vector& lo, const Vector& hi,
                                  const BoxLbfgsOptions& opt = {}) {
    const auto clamp = [&](Vector v) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v[i] = std::min(std::max(v[i], lo[i]), hi[i]);
        return v;
    };
    const auto projected_grad_norm = [&](const Vector& x, const Vector& g) {
        double n = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double step = x[i] - std::min(std::max(x[i] - g[i], lo[i]), hi[i]);
            n = std::max(n, std::abs(step));
        }
        return n;
    };

    BoxLbfgsResult res;
    Vector x = clamp(std::move(x0));
    Vector g(x.size());
    double f = obj(x, &g);
    if (!std::isfinite(f) || !g.allFinite()) {
        res.x = std::move(x);
        return res;
    }

    std::deque<std::pair<Vector, Vector>> pairs;  // (s, y)
    for (int it = 0; it < opt.max_iters; ++it) {
        res.iterations = it;
        if (projected_grad_norm(x, g) <= opt.grad_tol * (1.0 + std::abs(f))) {
            res.converged = true;
            break;
        }

        // two-loop recursion
        Vector dir = -g;
        if (!pairs.empty()) {
            std::vector<double> rho_list(pairs.size()), alpha_list(pairs.size());
            for (std::size_t i = pairs.size(); i-- > 0;) {
                const auto& [s, y] = pairs[i];
                rho_list[i] = 1.0 / s.dot(y);
                alpha_list[i] = rho_list[i] * s.dot(dir);
                dir -= alpha_list[i] * y;
            }
            const auto& [s_last, y_last] = pairs.back();
            dir *= s_last.dot(y_last) / y_last.squaredNorm();
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const auto& [s, y] = pairs[i];
                const double beta = rho_list[i] * y.dot(dir);
                dir += (alpha_list[i] - beta) * s;
            }
        }
        if (dir.dot(g) >= 0.0) {  // not a descent direction: restart
            pairs.clear();
            dir = -g;
        }

        double step = 1.0;
        if (pairs.empty()) {
            const double gnorm = dir.norm();
            if (gnorm > 0.0) step = std::min(1.0, 1.0 / gnorm);
        }

        // backtracking on values only; the gradient is evaluated once at
        // the accepted point
        bool accepted = false;
        Vector x_new;
        double f_new = 0.0;
        for (int bt = 0; bt < opt.max_backtracks; ++bt) {
            x_new = clamp(x + step * dir);
            const Vector delta = x_new - x;
            if (delta.lpNorm<Eigen::Infinity>() <
                1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>()))
                break;  // projection annihilated the step
            f_new = obj(x_new, nullptr);
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * g.dot(delta)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        Vector g_new(x.size());
        f_new = obj(x_new, &g_new);
        if (!std::isfinite(f_new) || !g_new.allFinite()) break;

        const Vector s = x_new - x;
        const Vector y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            pairs.emplace_back(s, y);
            if (static_cast<int>(pairs.size()) > opt.history) pairs.pop_front();
        }
        x = std::move(x_new);
        f = f_new;
        g = g_new;
    }

    res.x = std::move(x);
    res.value = f;
    return res;
}

}  // namespace bocoa

#endif  // BOCOA_LBFGS_HPP
