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

#ifndef BOCOA_TESTBED_HPP
#define BOCOA_TESTBED_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bocoa/rng.hpp"
#include "bocoa/search_space.hpp"

namespace bocoa {

/// Canonical single-objective test functions. Numbering follows the usual
/// noiseless benchmark convention so results can be discussed per function.
enum class TestFunctionId {
    F1_Sphere,
    F2_Ellipsoidal,
    F3_Rastrigin,
    F6_AttractiveSector,
    F8_Rosenbrock,
    F10_RotatedEllipsoidal,
    F12_BentCigar,
    F13_SharpRidge,
    F15_RotatedRastrigin,
    F17_SchaffersF7,
    F20_Schwefel,
    F21_Gallagher101,
};

enum class FunctionGroup {
    Separable,
    LowConditioning,
    HighConditioning,
    MultimodalAdequate,
    MultimodalWeak,
};

inline const std::vector<TestFunctionId>& all_test_functions() {
    static const std::vector<TestFunctionId> ids = {
        TestFunctionId::F1_Sphere,          TestFunctionId::F2_Ellipsoidal,
        TestFunctionId::F3_Rastrigin,       TestFunctionId::F6_AttractiveSector,
        TestFunctionId::F8_Rosenbrock,      TestFunctionId::F10_RotatedEllipsoidal,
        TestFunctionId::F12_BentCigar,      TestFunctionId::F13_SharpRidge,
        TestFunctionId::F15_RotatedRastrigin, TestFunctionId::F17_SchaffersF7,
        TestFunctionId::F20_Schwefel,       TestFunctionId::F21_Gallagher101,
    };
    return ids;
}

inline FunctionGroup function_group(TestFunctionId id) {
    switch (id) {
        case TestFunctionId::F1_Sphere:
        case TestFunctionId::F2_Ellipsoidal:
        case TestFunctionId::F3_Rastrigin: return FunctionGroup::Separable;
        case TestFunctionId::F6_AttractiveSector:
        case TestFunctionId::F8_Rosenbrock: return FunctionGroup::LowConditioning;
        case TestFunctionId::F10_RotatedEllipsoidal:
        case TestFunctionId::F12_BentCigar:
        case TestFunctionId::F13_SharpRidge: return FunctionGroup::HighConditioning;
        case TestFunctionId::F15_RotatedRastrigin:
        case TestFunctionId::F17_SchaffersF7: return FunctionGroup::MultimodalAdequate;
        case TestFunctionId::F20_Schwefel:
        case TestFunctionId::F21_Gallagher101: return FunctionGroup::MultimodalWeak;
    }
    throw std::logic_error("function_group: unknown id");
}

inline std::string to_string(TestFunctionId id) {
    switch (id) {
        case TestFunctionId::F1_Sphere: return "f1";
        case TestFunctionId::F2_Ellipsoidal: return "f2";
        case TestFunctionId::F3_Rastrigin: return "f3";
        case TestFunctionId::F6_AttractiveSector: return "f6";
        case TestFunctionId::F8_Rosenbrock: return "f8";
        case TestFunctionId::F10_RotatedEllipsoidal: return "f10";
        case TestFunctionId::F12_BentCigar: return "f12";
        case TestFunctionId::F13_SharpRidge: return "f13";
        case TestFunctionId::F15_RotatedRastrigin: return "f15";
        case TestFunctionId::F17_SchaffersF7: return "f17";
        case TestFunctionId::F20_Schwefel: return "f20";
        case TestFunctionId::F21_Gallagher101: return "f21";
    }
    throw std::logic_error("to_string: unknown id");
}

inline std::string to_string(FunctionGroup g) {
    switch (g) {
        case FunctionGroup::Separable: return "separable";
        case FunctionGroup::LowConditioning: return "low_conditioning";
        case FunctionGroup::HighConditioning: return "high_conditioning";
        case FunctionGroup::MultimodalAdequate: return "multimodal_adequate";
        case FunctionGroup::MultimodalWeak: return "multimodal_weak";
    }
    throw std::logic_error("to_string: unknown group");
}

inline TestFunctionId parse_function_id(const std::string& s) {
    for (TestFunctionId id : all_test_functions())
        if (to_string(id) == s) return id;
    throw std::invalid_argument("unknown test function id: " + s);
}

namespace canonical {

// All canonical forms attain their minimum at z = 0.

inline double sphere(const Vector& z) { return z.squaredNorm(); }

inline double ellipsoidal(const Vector& z) {
    const int d = static_cast<int>(z.size());
    if (d == 1) return z[0] * z[0];
    double s = 0.0;
    for (int i = 0; i < d; ++i)
        s += std::pow(10.0, 6.0 * i / (d - 1)) * z[i] * z[i];
    return s;
}

inline double rastrigin(const Vector& z) {
    const int d = static_cast<int>(z.size());
    double s = 10.0 * d;
    for (int i = 0; i < d; ++i)
        s += z[i] * z[i] - 10.0 * std::cos(2.0 * M_PI * z[i]);
    return s;
}

inline double attractive_sector(const Vector& z) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double w = (z[i] > 0.0 ? 100.0 : 1.0) * z[i];
        s += w * w;
    }
    return s;
}

inline double rosenbrock(const Vector& z) {
    const int d = static_cast<int>(z.size());
    double s = 0.0;
    for (int i = 0; i + 1 < d; ++i) {
        const double a = z[i] + 1.0;
        const double b = z[i + 1] + 1.0;
        s += 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
    }
    return s;
}

inline double bent_cigar(const Vector& z) {
    double s = z[0] * z[0];
    for (Eigen::Index i = 1; i < z.size(); ++i) s += 1e6 * z[i] * z[i];
    return s;
}

inline double sharp_ridge(const Vector& z) {
    double tail = 0.0;
    for (Eigen::Index i = 1; i < z.size(); ++i) tail += z[i] * z[i];
    return z[0] * z[0] + 100.0 * std::sqrt(tail);
}

inline double schaffers_f7(const Vector& z) {
    const int d = static_cast<int>(z.size());
    if (d < 2) throw std::invalid_argument("schaffers_f7 needs d >= 2");
    double acc = 0.0;
    for (int i = 0; i + 1 < d; ++i) {
        // mild diagonal conditioning (ratio 10 across axes)
        const double yi = std::pow(10.0, 0.5 * i / (d - 1)) * z[i];
        const double yj = std::pow(10.0, 0.5 * (i + 1) / (d - 1)) * z[i + 1];
        const double si = std::sqrt(yi * yi + yj * yj);
        const double sn = std::sin(50.0 * std::pow(si, 0.2));
        acc += std::sqrt(si) * (1.0 + sn * sn);
    }
    acc /= (d - 1);
    return acc * acc;
}

// location and value of the per-coordinate peak of w sin(sqrt w)
constexpr double kSchwefelPeakArg = 420.96874635998205;

inline double schwefel_term(double w) {
    if (std::abs(w) <= 500.0) return w * std::sin(std::sqrt(std::abs(w)));
    const double edge = 500.0 * std::sin(std::sqrt(500.0)) * (w > 0.0 ? 1.0 : -1.0);
    const double over = std::abs(w) - 500.0;
    return edge - over * over / 100.0;
}

inline double schwefel(const Vector& z) {
    const double peak = schwefel_term(kSchwefelPeakArg);
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        s += peak - schwefel_term(100.0 * z[i] + kSchwefelPeakArg);
    return s;
}

}  // namespace canonical

/// Seeded data of a Gallagher-style many-peaks landscape: the global peak
/// sits at the canonical origin, all others are strictly lower.
struct GallagherPeaks {
    Vector heights;   // 101, heights[0] is the strict maximum
    Matrix centers;   // 101 x d, row 0 is zero
    Matrix weights;   // 101 x d, per-axis quadratic weights (condition ~30)

    double value(const Vector& z) const {
        const int npeaks = static_cast<int>(heights.size());
        const int d = static_cast<int>(z.size());
        double best = 0.0;
        for (int i = 0; i < npeaks; ++i) {
            double q = 0.0;
            for (int k = 0; k < d; ++k) {
                const double dz = z[k] - centers(i, k);
                q += weights(i, k) * dz * dz;
            }
            best = std::max(best, heights[i] * std::exp(-q / (2.0 * d)));
        }
        return 10.0 - best;
    }
};

/// Append-only record of objective evaluations of one run.
class EvaluationLedger {
public:
    void append(const Vector& x, double f) {
        xs_.push_back(x);
        fs_.push_back(f);
    }

    std::size_t count() const { return fs_.size(); }
    const std::vector<Vector>& points() const { return xs_; }
    const std::vector<double>& values() const { return fs_; }

    std::vector<double> best_so_far() const {
        std::vector<double> out(fs_.size());
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < fs_.size(); ++i) {
            best = std::min(best, fs_[i]);
            out[i] = best;
        }
        return out;
    }

    /// 1-based index of the first evaluation with f <= target, 0 if none.
    std::size_t first_hit(double target) const {
        for (std::size_t i = 0; i < fs_.size(); ++i)
            if (fs_[i] <= target) return i + 1;
        return 0;
    }

private:
    std::vector<Vector> xs_;
    std::vector<double> fs_;
};

/// A test function under a seeded rotation of the coordinate system and a
/// seeded translation of the optimum. Immutable after construction.
class FunctionInstance {
public:
    FunctionInstance(TestFunctionId fid, int dim, std::uint64_t seed, Matrix rotation,
                     Vector shift, double f_opt, std::optional<GallagherPeaks> peaks)
        : fid_(fid),
          dim_(dim),
          seed_(seed),
          rotation_(std::move(rotation)),
          shift_(std::move(shift)),
          f_opt_(f_opt),
          peaks_(std::move(peaks)),
          space_(SearchSpace::cube(dim, -5.0, 5.0)) {}

    TestFunctionId function() const { return fid_; }
    int dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }
    const Matrix& rotation() const { return rotation_; }
    const Vector& shift() const { return shift_; }
    double f_opt() const { return f_opt_; }
    const SearchSpace& space() const { return space_; }

    /// Objective value without ledger bookkeeping.
    double objective(const Vector& x) const {
        const Vector z = rotation_ * (x - shift_);
        switch (fid_) {
            case TestFunctionId::F1_Sphere: return canonical::sphere(z);
            case TestFunctionId::F2_Ellipsoidal: return canonical::ellipsoidal(z);
            case TestFunctionId::F3_Rastrigin: return canonical::rastrigin(z);
            case TestFunctionId::F6_AttractiveSector: return canonical::attractive_sector(z);
            case TestFunctionId::F8_Rosenbrock: return canonical::rosenbrock(z);
            case TestFunctionId::F10_RotatedEllipsoidal: return canonical::ellipsoidal(z);
            case TestFunctionId::F12_BentCigar: return canonical::bent_cigar(z);
            case TestFunctionId::F13_SharpRidge: return canonical::sharp_ridge(z);
            case TestFunctionId::F15_RotatedRastrigin: return canonical::rastrigin(z);
            case TestFunctionId::F17_SchaffersF7: return canonical::schaffers_f7(z);
            case TestFunctionId::F20_Schwefel: return canonical::schwefel(z);
            case TestFunctionId::F21_Gallagher101: return peaks_->value(z);
        }
        throw std::logic_error("objective: unknown id");
    }

    /// Evaluate at x inside the box and append to the ledger.
    double evaluate(EvaluationLedger& ledger, const Vector& x) const {
        if (!space_.contains(x, 1e-12))
            throw std::invalid_argument("evaluate: point outside the search space");
        const double f = objective(x);
        ledger.append(x, f);
        return f;
    }

private:
    TestFunctionId fid_;
    int dim_;
    std::uint64_t seed_;
    Matrix rotation_;
    Vector shift_;
    double f_opt_;
    std::optional<GallagherPeaks> peaks_;
    SearchSpace space_;
};

/// A problem is a pair {function instance, value to reach}.
struct Problem {
    TestFunctionId fid;
    int dim;
    std::uint64_t seed;
    double f_opt;
    double target;
};

namespace detail {

inline Matrix haar_rotation(int d, Rng& rng) {
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    return q;
}

inline GallagherPeaks make_gallagher_peaks(int d, Rng& rng) {
    const int npeaks = 101;
    GallagherPeaks p;
    p.heights = Vector(npeaks);
    p.centers = Matrix::Zero(npeaks, d);
    p.weights = Matrix(npeaks, d);
    p.heights[0] = 9.5 + 0.5 * rng.uniform();
    for (int i = 1; i < npeaks; ++i) {
        p.heights[i] = 1.1 + 8.0 * rng.uniform();
        for (int k = 0; k < d; ++k) p.centers(i, k) = rng.uniform(-4.5, 4.5);
    }
    // per-peak diagonal quadratic with condition number 30, axes shuffled
    std::vector<int> order(d);
    for (int i = 0; i < npeaks; ++i) {
        for (int k = 0; k < d; ++k) order[k] = k;
        for (int k = d - 1; k > 0; --k)
            std::swap(order[k], order[rng.index(static_cast<std::size_t>(k) + 1)]);
        for (int k = 0; k < d; ++k) {
            const double e = (d == 1) ? 0.0 : static_cast<double>(k) / (d - 1) - 0.5;
            p.weights(i, order[k]) = std::pow(30.0, e);
        }
    }
    return p;
}

}  // namespace detail

/// Construct a deterministic instance of a test function.
/// Separable functions are translated only; all others are also rotated.
inline FunctionInstance make_instance(TestFunctionId fid, int d, std::uint64_t seed) {
    if (d != 2 && d != 3 && d != 5 && d != 10)
        throw std::invalid_argument("make_instance: d must be one of {2,3,5,10}");

    Rng rot_rng(derive_seed(seed, 101));
    Matrix rotation = (function_group(fid) == FunctionGroup::Separable)
                          ? Matrix::Identity(d, d)
                          : detail::haar_rotation(d, rot_rng);

    Rng shift_rng(derive_seed(seed, 102));
    Vector shift(d);
    for (int i = 0; i < d; ++i) shift[i] = shift_rng.uniform(-4.0, 4.0);

    std::optional<GallagherPeaks> peaks;
    double f_opt = 0.0;
    if (fid == TestFunctionId::F21_Gallagher101) {
        Rng peak_rng(derive_seed(seed, 103));
        peaks = detail::make_gallagher_peaks(d, peak_rng);
        f_opt = 10.0 - peaks->heights[0];
    }
    return FunctionInstance(fid, d, seed, std::move(rotation), std::move(shift), f_opt,
                            std::move(peaks));
}

/// Six problems per instance: targets f_opt + 10^k, k = 2 .. -3.
inline std::vector<Problem> targets_for(const FunctionInstance& inst) {
    std::vector<Problem> out;
    for (int k = 2; k >= -3; --k)
        out.push_back(Problem{inst.function(), inst.dim(), inst.seed(), inst.f_opt(),
                              inst.f_opt() + std::pow(10.0, k)});
    return out;
}

/// Descriptor sufficient for exact campaign replay.
inline nlohmann::json instance_to_json(const FunctionInstance& inst) {
    nlohmann::json j;
    j["function"] = to_string(inst.function());
    j["dim"] = inst.dim();
    j["seed"] = inst.seed();
    j["f_opt"] = inst.f_opt();
    j["shift"] = std::vector<double>(inst.shift().data(), inst.shift().data() + inst.dim());
    std::vector<double> rot;
    rot.reserve(static_cast<std::size_t>(inst.dim()) * inst.dim());
    for (int i = 0; i < inst.dim(); ++i)
        for (int k = 0; k < inst.dim(); ++k) rot.push_back(inst.rotation()(i, k));
    j["rotation"] = rot;
    return j;
}

/// Rebuild an instance from its descriptor. The instance is re-derived from
/// (function, dim, seed) and checked against the stored geometry, so a
/// descriptor written by a different derivation cannot be silently replayed.
inline FunctionInstance instance_from_json(const nlohmann::json& j) {
    FunctionInstance inst = make_instance(parse_function_id(j.at("function").get<std::string>()),
                                          j.at("dim").get<int>(),
                                          j.at("seed").get<std::uint64_t>());
    const auto shift = j.at("shift").get<std::vector<double>>();
    const auto rot = j.at("rotation").get<std::vector<double>>();
    const double f_opt = j.at("f_opt").get<double>();
    bool ok = static_cast<int>(shift.size()) == inst.dim() && f_opt == inst.f_opt();
    for (int i = 0; ok && i < inst.dim(); ++i) ok = shift[i] == inst.shift()[i];
    for (int i = 0; ok && i < inst.dim(); ++i)
        for (int k = 0; ok && k < inst.dim(); ++k)
            ok = rot[static_cast<std::size_t>(i) * inst.dim() + k] == inst.rotation()(i, k);
    if (!ok)
        throw std::runtime_error("instance_from_json: descriptor does not match re-derived instance");
    return inst;
}

}  // namespace bocoa

#endif  // BOCOA_TESTBED_HPP
