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

#ifndef BOCOA_SEARCH_SPACE_HPP
#define BOCOA_SEARCH_SPACE_HPP

#include <Eigen/Dense>
#include <stdexcept>

namespace bocoa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Hyper-rectangular search space [lower, upper]^d.
struct SearchSpace {
    Vector lower;
    Vector upper;

    SearchSpace(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
        if (lower.size() != upper.size() || lower.size() < 1)
            throw std::invalid_argument("SearchSpace: bound vectors must match and be non-empty");
        for (Eigen::Index i = 0; i < lower.size(); ++i)
            if (!(lower[i] < upper[i]))
                throw std::invalid_argument("SearchSpace: lower[i] < upper[i] required");
    }

    /// Cubic box [lo, hi]^d.
    static SearchSpace cube(int d, double lo, double hi) {
        return SearchSpace(Vector::Constant(d, lo), Vector::Constant(d, hi));
    }

    int dim() const { return static_cast<int>(lower.size()); }

    bool contains(const Vector& x, double tol = 0.0) const {
        if (x.size() != lower.size()) return false;
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
        return true;
    }

    Vector clamp(Vector x) const {
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x[i] = std::min(std::max(x[i], lower[i]), upper[i]);
        return x;
    }

    /// Affine map from the unit cube into the box.
    Vector from_unit(const Vector& u) const {
        return lower.array() + (upper - lower).array() * u.array();
    }

    /// Inverse affine map onto the unit cube.
    Vector to_unit(const Vector& x) const {
        return (x - lower).array() / (upper - lower).array();
    }

    double diagonal() const { return (upper - lower).norm(); }
};

}  // namespace bocoa

#endif  // BOCOA_SEARCH_SPACE_HPP
