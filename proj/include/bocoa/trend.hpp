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

#ifndef BOCOA_TREND_HPP
#define BOCOA_TREND_HPP

#include <stdexcept>
#include <string>

#include "bocoa/search_space.hpp"

namespace bocoa {

/// Universal-kriging trend: polynomial basis without interaction terms.
enum class TrendDegree { Constant, Linear, QuadraticNoInteraction };

inline std::string to_string(TrendDegree t) {
    switch (t) {
        case TrendDegree::Constant: return "constant";
        case TrendDegree::Linear: return "linear";
        case TrendDegree::QuadraticNoInteraction: return "quadratic";
    }
    throw std::logic_error("to_string: unknown trend");
}

inline int trend_basis_size(TrendDegree t, int d) {
    switch (t) {
        case TrendDegree::Constant: return 1;
        case TrendDegree::Linear: return d + 1;
        case TrendDegree::QuadraticNoInteraction: return 2 * d + 1;
    }
    throw std::logic_error("trend_basis_size: unknown trend");
}

/// h(x): (1), (1, x_1..x_d) or (1, x_1..x_d, x_1^2..x_d^2).
inline Vector trend_basis(TrendDegree t, const Vector& x) {
    const int d = static_cast<int>(x.size());
    Vector h(trend_basis_size(t, d));
    h[0] = 1.0;
    if (t == TrendDegree::Constant) return h;
    h.segment(1, d) = x;
    if (t == TrendDegree::Linear) return h;
    h.segment(1 + d, d) = x.array().square();
    return h;
}

/// dh/dx as a (basis_size x d) matrix.
inline Matrix trend_basis_jacobian(TrendDegree t, const Vector& x) {
    const int d = static_cast<int>(x.size());
    Matrix jac = Matrix::Zero(trend_basis_size(t, d), d);
    if (t == TrendDegree::Constant) return jac;
    for (int i = 0; i < d; ++i) jac(1 + i, i) = 1.0;
    if (t == TrendDegree::Linear) return jac;
    for (int i = 0; i < d; ++i) jac(1 + d + i, i) = 2.0 * x[i];
    return jac;
}

/// Trend coefficients paired with their degree.
struct TrendSpec {
    TrendDegree degree = TrendDegree::Constant;
    Vector coefficients;  // beta, length trend_basis_size(degree, d)
};

}  // namespace bocoa

#endif  // BOCOA_TREND_HPP
