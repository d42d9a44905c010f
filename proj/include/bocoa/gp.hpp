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

#ifndef BOCOA_GP_HPP
#define BOCOA_GP_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bocoa/kernels.hpp"
#include "bocoa/trend.hpp"

namespace bocoa {

/// Conditional Gaussian process under a universal-kriging trend.
///
/// The posterior mean and covariance follow the usual generalized
/// least-squares form: with R the (unit-variance) correlation matrix of the
/// training inputs plus a relative nugget on the diagonal, H the trend basis
/// rows and rho(x) the correlation vector of a query point,
///
///   m(x)     = h(x)' beta + rho(x)' R^-1 (y - H beta)
///   c(x, x') = s2 * [ corr(x, x') - v(x)'v(x') + w(x)'w(x') ]
///
/// where v = L^-1 rho, u = h - A'v, w = G^-1 u, A = L^-1 H, G = chol(A'A),
/// beta the GLS estimate and s2 the concentrated variance estimate. The
/// w'w term is the trend-estimation inflation.
class GPModel {
public:
    GPModel(Matrix inputs, Vector outputs, KernelSpec kernel, TrendSpec trend,
            double rel_nugget, Matrix chol_lower, Vector alpha, Matrix a_mat,
            Matrix g_lower)
        : inputs_(std::move(inputs)),
          outputs_(std::move(outputs)),
          kernel_(std::move(kernel)),
          trend_(std::move(trend)),
          rel_nugget_(rel_nugget),
          chol_(std::move(chol_lower)),
          alpha_(std::move(alpha)),
          a_mat_(std::move(a_mat)),
          g_lower_(std::move(g_lower)) {}

    int count() const { return static_cast<int>(inputs_.rows()); }
    int dim() const { return static_cast<int>(inputs_.cols()); }
    const Matrix& inputs() const { return inputs_; }
    const Vector& outputs() const { return outputs_; }
    const KernelSpec& kernel() const { return kernel_; }
    const TrendSpec& trend() const { return trend_; }
    double relative_nugget() const { return rel_nugget_; }
    double nugget() const { return kernel_.variance * rel_nugget_; }
    double prior_variance() const { return kernel_.variance; }

    /// Posterior mean and variance (variance clamped at 0 from below).
    void posterior_moments(const Vector& x, double* mean, double* variance) const {
        Vector rho, v, w;
        query_terms(x, rho, v, w);
        if (mean) {
            const Vector h = trend_basis(trend_.degree, x);
            *mean = h.dot(trend_.coefficients) + rho.dot(alpha_);
        }
        if (variance) {
            double var = kernel_.variance * (1.0 - v.squaredNorm() + w.squaredNorm());
            *variance = var > 0.0 ? var : 0.0;
        }
    }

    double posterior_mean(const Vector& x) const {
        double m;
        posterior_moments(x, &m, nullptr);
        return m;
    }

    double posterior_variance(const Vector& x) const {
        double v;
        posterior_moments(x, nullptr, &v);
        return v;
    }

    /// Posterior covariance between two query points.
    double posterior_cross_cov(const Vector& x, const Vector& y) const {
        Vector rho_x, v_x, w_x, rho_y, v_y, w_y;
        query_terms(x, rho_x, v_x, w_x);
        query_terms(y, rho_y, v_y, w_y);
        const double corr = correlation(kernel_.family, kernel_.lengthscales, x, y);
        return kernel_.variance * (corr - v_x.dot(v_y) + w_x.dot(w_y));
    }

    /// Mean, variance and their gradients in one pass (analytic, Matern52).
    /// For the exponential kernel the caller should use finite differences.
    void posterior_moments_grad(const Vector& x, double* mean, double* variance,
                                Vector* dmean, Vector* dvariance) const {
        const int t = count();
        const int d = dim();
        Vector rho(t);
        Matrix drho(t, d);
        for (int i = 0; i < t; ++i) {
            const Vector xi = inputs_.row(i).transpose();
            rho[i] = correlation(kernel_.family, kernel_.lengthscales, x, xi);
            drho.row(i) =
                correlation_grad_x(kernel_.family, kernel_.lengthscales, x, xi).transpose();
        }
        const Vector h = trend_basis(trend_.degree, x);
        const Matrix jh = trend_basis_jacobian(trend_.degree, x);

        const auto lower = chol_.triangularView<Eigen::Lower>();
        const Vector v = lower.solve(rho);
        const Matrix dv = lower.solve(drho);
        const Vector u = h - a_mat_.transpose() * v;
        const Matrix du = jh - a_mat_.transpose() * dv;
        const auto glower = g_lower_.triangularView<Eigen::Lower>();
        const Vector w = glower.solve(u);
        const Matrix dw = glower.solve(du);

        if (mean) *mean = h.dot(trend_.coefficients) + rho.dot(alpha_);
        if (dmean) *dmean = jh.transpose() * trend_.coefficients + drho.transpose() * alpha_;
        const double var = kernel_.variance * (1.0 - v.squaredNorm() + w.squaredNorm());
        if (variance) *variance = var > 0.0 ? var : 0.0;
        if (dvariance)
            *dvariance = kernel_.variance *
                         (-2.0 * (dv.transpose() * v) + 2.0 * (dw.transpose() * w));
    }

private:
    void query_terms(const Vector& x, Vector& rho, Vector& v, Vector& w) const {
        const int t = count();
        rho.resize(t);
        for (int i = 0; i < t; ++i)
            rho[i] = correlation(kernel_.family, kernel_.lengthscales, x,
                                 inputs_.row(i).transpose());
        v = chol_.triangularView<Eigen::Lower>().solve(rho);
        const Vector u = trend_basis(trend_.degree, x) - a_mat_.transpose() * v;
        w = g_lower_.triangularView<Eigen::Lower>().solve(u);
    }

    Matrix inputs_;
    Vector outputs_;
    KernelSpec kernel_;
    TrendSpec trend_;
    double rel_nugget_;
    Matrix chol_;     // lower Cholesky factor of R + g I
    Vector alpha_;    // (R + g I)^-1 (y - H beta)
    Matrix a_mat_;    // L^-1 H
    Matrix g_lower_;  // lower Cholesky factor of A'A
};

/// Outcome of one concentrated-likelihood evaluation.
struct NllEval {
    bool ok = false;
    double value = 0.0;        // negative log-likelihood up to constants
    Vector grad_log_theta;     // d(value)/d(log theta)
};

/// Concentrated negative log-likelihood of a dataset: the trend coefficients
/// and the process variance are profiled out analytically (GLS beta, and
/// s2 = residual quadratic form / t), leaving the lengthscales free.
///
/// Caches the per-dimension difference matrices of the inputs, which do not
/// depend on the lengthscales, so repeated evaluations during a multi-start
/// search only pay for the factorization.
class LikelihoodEvaluator {
public:
    LikelihoodEvaluator(KernelFamily family, TrendDegree trend, Matrix inputs,
                        Vector outputs, double rel_nugget)
        : family_(family),
          trend_(trend),
          inputs_(std::move(inputs)),
          outputs_(std::move(outputs)),
          rel_nugget_(rel_nugget) {
        const int t = count();
        const int d = dim();
        if (t <= trend_basis_size(trend_, d))
            throw std::invalid_argument(
                "LikelihoodEvaluator: need more observations than trend basis functions");
        diffs_.reserve(d);
        for (int k = 0; k < d; ++k) {
            Matrix m(t, t);
            for (int i = 0; i < t; ++i) {
                m(i, i) = 0.0;
                for (int j = i + 1; j < t; ++j) {
                    const double delta = inputs_(i, k) - inputs_(j, k);
                    m(i, j) = m(j, i) =
                        family_ == KernelFamily::Matern52 ? delta * delta : std::abs(delta);
                }
            }
            diffs_.push_back(std::move(m));
        }
        basis_ = Matrix(t, trend_basis_size(trend_, d));
        for (int i = 0; i < t; ++i)
            basis_.row(i) = trend_basis(trend_, inputs_.row(i).transpose()).transpose();
    }

    int count() const { return static_cast<int>(inputs_.rows()); }
    int dim() const { return static_cast<int>(inputs_.cols()); }
    double relative_nugget() const { return rel_nugget_; }
    const Matrix& inputs() const { return inputs_; }
    const Vector& outputs() const { return outputs_; }

    /// Value and (optionally) gradient with respect to log lengthscales.
    NllEval eval(const Vector& theta, bool with_grad) const {
        return eval_with_outputs(theta, outputs_, with_grad);
    }

    /// Same, but with a different output vector over the cached inputs
    /// (used when fitting output transformations).
    NllEval eval_with_outputs(const Vector& theta, const Vector& outputs,
                              bool with_grad) const {
        NllEval out;
        const int t = count();
        const int d = dim();
        const int p = static_cast<int>(basis_.cols());

        Matrix corr;  // correlation matrix; reused as gradient scratch below
        Matrix grad_shared;
        build_correlation(theta, corr, with_grad ? &grad_shared : nullptr);
        corr.diagonal().array() += rel_nugget_;

        Eigen::LLT<Matrix> llt(corr);
        if (llt.info() != Eigen::Success) return out;
        const Matrix& lmat = llt.matrixLLT();
        double logdet = 0.0;
        for (int i = 0; i < t; ++i) {
            if (!(lmat(i, i) > 0.0) || !std::isfinite(lmat(i, i))) return out;
            logdet += std::log(lmat(i, i));
        }

        const auto lower = llt.matrixL();
        const Matrix a = lower.solve(basis_);
        const Vector b = lower.solve(outputs);
        Eigen::LLT<Matrix> llt_p(Matrix(a.transpose() * a));
        if (llt_p.info() != Eigen::Success) return out;
        const Vector beta = llt_p.solve(a.transpose() * b);
        const Vector resid_w = b - a * beta;
        const double s2 = std::max(resid_w.squaredNorm() / t, 1e-24);

        out.value = 0.5 * t * std::log(s2) + logdet;
        if (!std::isfinite(out.value)) return out;

        if (with_grad) {
            const Matrix w_inv = llt.solve(Matrix::Identity(t, t));
            const Vector alpha = lower.transpose().solve(resid_w);
            // P = R^-1 - alpha alpha' / s2; dNLL/dtheta_k = 1/2 sum(P o dR_k)
            Matrix p_mat = w_inv - (alpha * alpha.transpose()) / s2;
            p_mat = p_mat.cwiseProduct(grad_shared);
            out.grad_log_theta.resize(d);
            for (int k = 0; k < d; ++k) {
                const double raw = 0.5 * p_mat.cwiseProduct(diffs_[k]).sum();
                // chain rule through the family-specific dR/dtheta and log theta
                out.grad_log_theta[k] = family_ == KernelFamily::Matern52
                                            ? raw / (theta[k] * theta[k])
                                            : raw / theta[k];
            }
            if (!out.grad_log_theta.allFinite()) return out;
        }
        out.ok = true;
        return out;
    }

    /// Build the conditional GP at the given lengthscales.
    std::optional<GPModel> build(const Vector& theta) const {
        const int t = count();
        Matrix corr;
        build_correlation(theta, corr, nullptr);
        corr.diagonal().array() += rel_nugget_;
        Eigen::LLT<Matrix> llt(corr);
        if (llt.info() != Eigen::Success) return std::nullopt;
        for (int i = 0; i < t; ++i) {
            const double lii = llt.matrixLLT()(i, i);
            if (!(lii > 0.0) || !std::isfinite(lii)) return std::nullopt;
        }

        const auto lower = llt.matrixL();
        const Matrix a = lower.solve(basis_);
        const Vector b = lower.solve(outputs_);
        Eigen::LLT<Matrix> llt_p(Matrix(a.transpose() * a));
        if (llt_p.info() != Eigen::Success) return std::nullopt;
        const Vector beta = llt_p.solve(a.transpose() * b);
        const Vector resid_w = b - a * beta;
        const double s2 = std::max(resid_w.squaredNorm() / t, 1e-24);
        const Vector alpha = lower.transpose().solve(resid_w);

        KernelSpec kernel{family_, theta, s2};
        TrendSpec trend{trend_, beta};
        return GPModel(inputs_, outputs_, std::move(kernel), std::move(trend), rel_nugget_,
                       Matrix(llt.matrixLLT().triangularView<Eigen::Lower>()), alpha, a,
                       Matrix(llt_p.matrixLLT().triangularView<Eigen::Lower>()));
    }

private:
    /// corr: unit-variance correlation matrix. grad_shared (optional): the
    /// factor common to all per-dimension derivatives, i.e. dR/dtheta_k =
    /// grad_shared o diffs_k / theta_k^{3 or 2} (Matern52 / exponential).
    void build_correlation(const Vector& theta, Matrix& corr, Matrix* grad_shared) const {
        const int t = count();
        const int d = dim();
        corr = Matrix::Zero(t, t);
        if (family_ == KernelFamily::Matern52) {
            for (int k = 0; k < d; ++k)
                corr += diffs_[k] / (theta[k] * theta[k]);
            if (grad_shared) grad_shared->resize(t, t);
            for (int i = 0; i < t; ++i)
                for (int j = 0; j < t; ++j) {
                    const double r = std::sqrt(corr(i, j));
                    if (grad_shared)
                        (*grad_shared)(i, j) = detail::matern52_grad_factor(r);
                    corr(i, j) = detail::matern52_corr(r);
                }
        } else {
            for (int k = 0; k < d; ++k) corr += diffs_[k] / theta[k];
            corr = (-corr).array().exp();
            if (grad_shared) *grad_shared = corr;
        }
    }

    KernelFamily family_;
    TrendDegree trend_;
    Matrix inputs_;
    Vector outputs_;
    double rel_nugget_;
    std::vector<Matrix> diffs_;
    Matrix basis_;
};

}  // namespace bocoa

#endif  // BOCOA_GP_HPP
