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

#ifndef BOCOA_KERNELS_HPP
#define BOCOA_KERNELS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "bocoa/search_space.hpp"

namespace bocoa {

enum class KernelFamily { Matern52, Exponential };

inline std::string to_string(KernelFamily f) {
    return f == KernelFamily::Matern52 ? "matern52" : "exponential";
}

/// Anisotropic stationary kernel: a family, per-dimension lengthscales and
/// a process variance.
struct KernelSpec {
    KernelFamily family = KernelFamily::Matern52;
    Vector lengthscales;  // theta, one per input dimension
    double variance = 1.0;  // sigma^2
};

namespace detail {

constexpr double kSqrt5 = 2.2360679774997896;

/// Matern 5/2 correlation as a function of the scaled distance r.
inline double matern52_corr(double r) {
    return (1.0 + kSqrt5 * r + 5.0 / 3.0 * r * r) * std::exp(-kSqrt5 * r);
}

/// Shared gradient factor s(r): d corr / d(r^2) = -s(r) / 2 ... expressed so
/// that d corr / d theta_k = s(r) * delta_k^2 / theta_k^3 and
/// d corr / d x_k = -s(r) * delta_k / theta_k^2.
inline double matern52_grad_factor(double r) {
    return 5.0 / 3.0 * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
}

}  // namespace detail

/// Correlation (unit-variance kernel) between two points.
inline double correlation(KernelFamily family, const Vector& theta, const Vector& x,
                          const Vector& y) {
    if (family == KernelFamily::Matern52) {
        double r2 = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double u = (x[i] - y[i]) / theta[i];
            r2 += u * u;
        }
        return detail::matern52_corr(std::sqrt(r2));
    }
    // tensor-product of 1-d exponentials
    double m = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) m += std::abs(x[i] - y[i]) / theta[i];
    return std::exp(-m);
}

inline double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y) {
    if (x.size() != spec.lengthscales.size() || y.size() != spec.lengthscales.size())
        throw std::invalid_argument("kernel_eval: dimension mismatch");
    return spec.variance * correlation(spec.family, spec.lengthscales, x, y);
}

/// d corr(x, y) / d x, analytic. Valid for Matern52 everywhere; for the
/// exponential family the derivative does not exist where a coordinate of
/// x - y vanishes, so callers use finite differences instead.
inline Vector correlation_grad_x(KernelFamily family, const Vector& theta, const Vector& x,
                                 const Vector& y) {
    Vector g(x.size());
    if (family == KernelFamily::Matern52) {
        double r2 = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double u = (x[i] - y[i]) / theta[i];
            r2 += u * u;
        }
        const double s = detail::matern52_grad_factor(std::sqrt(r2));
        for (Eigen::Index i = 0; i < x.size(); ++i)
            g[i] = -s * (x[i] - y[i]) / (theta[i] * theta[i]);
        return g;
    }
    double m = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) m += std::abs(x[i] - y[i]) / theta[i];
    const double k = std::exp(-m);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        g[i] = -k * sgn / theta[i];
    }
    return g;
}

}  // namespace bocoa

#endif  // BOCOA_KERNELS_HPP
