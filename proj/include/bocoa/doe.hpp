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

#ifndef BOCOA_DOE_HPP
#define BOCOA_DOE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "bocoa/rng.hpp"
#include "bocoa/search_space.hpp"

namespace bocoa {

/// Initial design-of-experiments size classes.
enum class DoeClass { S, M, L, QuadMean };

/// S: d+4, M: round(7.5 d), L: 20 d, QuadMean: 2d+1.
inline int doe_size(DoeClass c, int d) {
    switch (c) {
        case DoeClass::S: return d + 4;
        case DoeClass::M: return static_cast<int>(std::lround(7.5 * d));
        case DoeClass::L: return 20 * d;
        case DoeClass::QuadMean: return 2 * d + 1;
    }
    throw std::logic_error("doe_size: unknown class");
}

/// A Latin hypercube design in the unit cube: each column, multiplied by n
/// and floored, is a permutation of 0..n-1.
struct Design {
    Matrix points;  // n x d
    int n() const { return static_cast<int>(points.rows()); }
    int d() const { return static_cast<int>(points.cols()); }
};

inline double min_pairwise_distance(const Matrix& pts) {
    const Eigen::Index n = pts.rows();
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            best = std::min(best, (pts.row(i) - pts.row(j)).squaredNorm());
    return std::sqrt(best);
}

namespace detail {

inline Matrix raw_lhs(int n, int d, Rng& rng) {
    Matrix pts(n, d);
    std::vector<int> perm(n);
    for (int c = 0; c < d; ++c) {
        for (int i = 0; i < n; ++i) perm[i] = i;
        // Fisher-Yates
        for (int i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.index(static_cast<std::size_t>(i) + 1)]);
        for (int i = 0; i < n; ++i)
            pts(i, c) = (perm[i] + rng.uniform()) / n;
    }
    return pts;
}

}  // namespace detail

/// Maximin-optimized Latin hypercube. Optimization is a seeded hill-climb
/// over row swaps within a single column, which preserves the Latin
/// property; a swap is kept only if it strictly increases the minimal
/// pairwise distance. Deterministic in (n, d, seed, n_improve_iters).
inline Design maximin_lhs(int n, int d, std::uint64_t seed, long n_improve_iters = -1) {
    if (n < 2) throw std::invalid_argument("maximin_lhs: n >= 2 required");
    if (d < 1) throw std::invalid_argument("maximin_lhs: d >= 1 required");
    if (n_improve_iters < 0) n_improve_iters = 10L * n * d;

    Rng rng(seed);
    Matrix pts = detail::raw_lhs(n, d, rng);
    if (n_improve_iters == 0) return Design{std::move(pts)};

    // squared-distance matrix, updated incrementally after each swap
    Matrix d2(n, n);
    for (int i = 0; i < n; ++i) {
        d2(i, i) = std::numeric_limits<double>::infinity();
        for (int j = i + 1; j < n; ++j)
            d2(i, j) = d2(j, i) = (pts.row(i) - pts.row(j)).squaredNorm();
    }
    double cur_min = d2.minCoeff();

    for (long it = 0; it < n_improve_iters; ++it) {
        const int c = static_cast<int>(rng.index(d));
        const int a = static_cast<int>(rng.index(n));
        int b = static_cast<int>(rng.index(n - 1));
        if (b >= a) ++b;

        const double va = pts(a, c), vb = pts(b, c);
        pts(a, c) = vb;
        pts(b, c) = va;

        bool worse = false;
        double new_min_affected = std::numeric_limits<double>::infinity();
        for (int r = 0; r < n; ++r) {
            if (r == a || r == b) continue;
            const double da = (pts.row(a) - pts.row(r)).squaredNorm();
            const double db = (pts.row(b) - pts.row(r)).squaredNorm();
            if (da <= cur_min || db <= cur_min) { worse = true; break; }
            new_min_affected = std::min({new_min_affected, da, db});
        }
        if (worse) {
            pts(a, c) = va;
            pts(b, c) = vb;
            continue;
        }
        // all affected pairs now exceed cur_min; commit and rescan the
        // matrix only if the previous minimum involved a or b
        for (int r = 0; r < n; ++r) {
            if (r == a || r == b) continue;
            d2(a, r) = d2(r, a) = (pts.row(a) - pts.row(r)).squaredNorm();
            d2(b, r) = d2(r, b) = (pts.row(b) - pts.row(r)).squaredNorm();
        }
        const double rescan = d2.minCoeff();
        if (rescan <= cur_min) {
            // minimum unchanged elsewhere: no strict improvement, revert
            pts(a, c) = va;
            pts(b, c) = vb;
            for (int r = 0; r < n; ++r) {
                if (r == a || r == b) continue;
                d2(a, r) = d2(r, a) = (pts.row(a) - pts.row(r)).squaredNorm();
                d2(b, r) = d2(r, b) = (pts.row(b) - pts.row(r)).squaredNorm();
            }
        } else {
            cur_min = rescan;
        }
    }
    return Design{std::move(pts)};
}

/// Map unit-cube design points into the search space, one row per point.
inline Matrix scale_to_box(const Design& design, const SearchSpace& space) {
    if (design.d() != space.dim())
        throw std::invalid_argument("scale_to_box: dimension mismatch");
    Matrix out(design.n(), design.d());
    for (int i = 0; i < design.n(); ++i)
        out.row(i) = space.from_unit(design.points.row(i).transpose()).transpose();
    return out;
}

}  // namespace bocoa

#endif  // BOCOA_DOE_HPP
