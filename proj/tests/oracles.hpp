// Test-only reference implementations, independent of the library's
// computational paths: straight-line formulas, Monte Carlo, dense grids and
// long-double linear algebra.

#ifndef BOCOA_TESTS_ORACLES_HPP
#define BOCOA_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

/// Monte-Carlo estimate of E[max(f_min - Y, 0)], Y ~ N(mean, sd^2),
/// with its standard error.
struct McEstimate {
    double value;
    double std_error;
};

inline McEstimate mc_expected_improvement(double mean, double sd, double f_min,
                                          long n_samples, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const auto normal = [&]() {
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        const double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };
    double acc = 0.0, acc2 = 0.0;
    for (long i = 0; i < n_samples; ++i) {
        const double y = mean + sd * normal();
        const double imp = f_min - y > 0.0 ? f_min - y : 0.0;
        acc += imp;
        acc2 += imp * imp;
    }
    const double m = acc / n_samples;
    const double var = std::max(acc2 / n_samples - m * m, 0.0);
    return {m, std::sqrt(var / n_samples)};
}

/// Dense-grid argmax of a 1-d function on [lo, hi].
inline double grid_argmax(const std::function<double(double)>& f, double lo, double hi,
                          int n_points) {
    double best_x = lo, best_v = f(lo);
    for (int i = 1; i < n_points; ++i) {
        const double x = lo + (hi - lo) * i / (n_points - 1.0);
        const double v = f(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    return best_x;
}

/// Long-double dense matrix inverse by Gauss-Jordan elimination with
/// partial pivoting. Sized for the small toy systems of the tests.
inline std::vector<std::vector<long double>> invert(
    std::vector<std::vector<long double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<long double>> inv(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(static_cast<double>(a[r][col])) >
                std::fabs(static_cast<double>(a[pivot][col])))
                pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const long double p = a[col][col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col][c] /= p;
            inv[col][c] /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const long double factor = a[r][col];
            for (std::size_t c = 0; c < n; ++c) {
                a[r][c] -= factor * a[col][c];
                inv[r][c] -= factor * inv[col][c];
            }
        }
    }
    return inv;
}

/// Universal-kriging posterior by brute-force multivariate-normal
/// conditioning: the trend coefficients get a Gaussian prior of variance
/// tau2 (diffuse for large tau2), the joint covariance over training and
/// query points is K + tau2 H H', and the conditional moments follow from
/// the Schur complement. The unbounded tau2 H H' blocks are expanded with
/// the Woodbury identity so that tau2 cancels exactly and only the finite
/// prior precision I/tau2 remains, inside the small p x p matrix
/// M = (I/tau2 + H' K^-1 H)^-1. Everything in long double; no Cholesky and
/// no generalized least squares anywhere.
struct ConditioningOracle {
    // kernel(i, j) over the concatenated point list, basis(i) -> h(x_i)
    std::function<long double(int, int)> kernel;
    std::function<std::vector<long double>(int)> basis;
    int n_train;
    int n_query;
    long double tau2 = 1e12L;

    void compute(std::vector<long double> y, std::vector<long double>* post_mean,
                 std::vector<std::vector<long double>>* post_cov) const {
        const int t = n_train, q = n_query, n = t + q;
        const std::size_t p = basis(0).size();

        std::vector<std::vector<long double>> k_tt(t, std::vector<long double>(t));
        for (int i = 0; i < t; ++i)
            for (int j = 0; j < t; ++j) k_tt[i][j] = kernel(i, j);
        const auto w = invert(k_tt);  // K_tt^-1

        std::vector<std::vector<long double>> h(n, std::vector<long double>(p));
        for (int i = 0; i < n; ++i) h[i] = basis(i);

        // wh = W H (t x p), b = H' W H (p x p), m = (I/tau2 + b)^-1
        std::vector<std::vector<long double>> wh(t, std::vector<long double>(p, 0.0L));
        for (int i = 0; i < t; ++i)
            for (std::size_t a = 0; a < p; ++a)
                for (int j = 0; j < t; ++j) wh[i][a] += w[i][j] * h[j][a];
        std::vector<std::vector<long double>> m_small(p, std::vector<long double>(p, 0.0L));
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) {
                for (int i = 0; i < t; ++i) m_small[a][b] += h[i][a] * wh[i][b];
                if (a == b) m_small[a][b] += 1.0L / tau2;
            }
        const auto m = invert(m_small);

        // With A = Sigma_qt Sigma_tt^-1, the tau2 blocks cancel to
        //   A = kq W - kq W H M H'W + Hq M H'W
        // and the conditional covariance reduces to
        //   kqq - kq W kq' + kq W H M H'W kq' - Hq M H'W kq'
        //       - kq W H M Hq' + Hq M Hq'.
        const auto kq = [&](int qi, int j) { return kernel(t + qi, j); };

        // u[qi] = H'W kq(qi) (p-vector), g[qi] = M (u - ... ) pieces
        std::vector<std::vector<long double>> u(q, std::vector<long double>(p, 0.0L));
        for (int qi = 0; qi < q; ++qi)
            for (std::size_t a = 0; a < p; ++a)
                for (int i = 0; i < t; ++i) u[qi][a] += wh[i][a] * kq(qi, i);
        // row vectors r[qi] = A(qi, .) of length t
        std::vector<std::vector<long double>> a_rows(q, std::vector<long double>(t, 0.0L));
        for (int qi = 0; qi < q; ++qi) {
            // coeff = M (Hq - u) : p-vector
            std::vector<long double> coeff(p, 0.0L);
            for (std::size_t a = 0; a < p; ++a)
                for (std::size_t b = 0; b < p; ++b)
                    coeff[a] += m[a][b] * (h[t + qi][b] - u[qi][b]);
            for (int i = 0; i < t; ++i) {
                long double acc = 0.0L;
                for (int j = 0; j < t; ++j) acc += kq(qi, j) * w[j][i];
                for (std::size_t a = 0; a < p; ++a) acc += coeff[a] * wh[i][a];
                a_rows[qi][i] = acc;
            }
        }

        post_mean->assign(q, 0.0L);
        for (int qi = 0; qi < q; ++qi)
            for (int i = 0; i < t; ++i) (*post_mean)[qi] += a_rows[qi][i] * y[i];

        post_cov->assign(q, std::vector<long double>(q, 0.0L));
        for (int qi = 0; qi < q; ++qi)
            for (int qj = 0; qj < q; ++qj) {
                long double acc = kernel(t + qi, t + qj);
                // - kq W kq'
                for (int i = 0; i < t; ++i) {
                    long double tmp = 0.0L;
                    for (int j = 0; j < t; ++j) tmp += w[i][j] * kq(qj, j);
                    acc -= kq(qi, i) * tmp;
                }
                // + (u_qi - Hq_qi) M (u_qj - Hq_qj) expanded sign-by-sign
                for (std::size_t a = 0; a < p; ++a)
                    for (std::size_t b = 0; b < p; ++b)
                        acc += (h[t + qi][a] - u[qi][a]) * m[a][b] *
                               (h[t + qj][b] - u[qj][b]);
                (*post_cov)[qi][qj] = acc;
            }
    }
};

}  // namespace oracles

#endif  // BOCOA_TESTS_ORACLES_HPP
