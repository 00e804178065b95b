#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "piecevec/counts.hpp"
#include "piecevec/errors.hpp"
#include "piecevec/util/rng.hpp"

namespace piecevec::factor {

// Initialization for the multiplicative updates. Random draws every entry
// from uniform(0.1, 1.1) under the seed. Nndsvda builds W, H from the signs
// of the leading singular vectors with zeros replaced by the matrix mean
// (Boutsidis & Gallopoulos' averaged variant); it exists because
// multiplicative updates can lock onto a zero numerator and stall when the
// target admits an exact factorization with disjoint row supports — the
// regime the prediction oracle tests exercise. Random remains the default.
enum class NmfInit : std::uint8_t { Random, Nndsvda };

inline std::string_view nmf_init_name(NmfInit i) {
    return i == NmfInit::Random ? "random" : "nndsvda";
}

inline std::optional<NmfInit> parse_nmf_init(std::string_view s) {
    if (s == "random") return NmfInit::Random;
    if (s == "nndsvda") return NmfInit::Nndsvda;
    return std::nullopt;
}

struct NmfOptions {
    int d = 10;
    int max_iters = 500;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
    NmfInit init = NmfInit::Random;
};

struct NmfModel {
    Eigen::MatrixXd w;  // n x d, non-negative
    Eigen::MatrixXd h;  // d x p, non-negative
    std::vector<double> objective_trace;  // ||X - WH||_F^2, entry 0 = at init
    int d = 0;
    std::uint64_t seed = 0;
    NmfInit init = NmfInit::Random;
    int iterations_run = 0;
};

namespace detail {

// ||X - WH||_F^2 without forming WH: ||X||^2 - 2<X,WH> + tr((W^T W)(H H^T)).
// <X,WH> touches only X's nonzeros.
inline double nmf_objective(const counts::SparseMatrix& x, const Eigen::MatrixXd& w,
                            const Eigen::MatrixXd& h, double x_sq, const Eigen::MatrixXd& hht) {
    double cross = 0;
    for (int i = 0; i < x.outerSize(); ++i)
        for (counts::SparseMatrix::InnerIterator it(x, i); it; ++it)
            cross += it.value() * w.row(it.row()).dot(h.col(it.col()));
    const Eigen::MatrixXd wtw = w.transpose() * w;
    return x_sq - 2.0 * cross + wtw.cwiseProduct(hht).sum();
}

inline void init_random(Eigen::MatrixXd& w, Eigen::MatrixXd& h, std::uint64_t seed) {
    Rng rng(seed);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index k = 0; k < w.cols(); ++k) w(i, k) = rng.next_double(0.1, 1.1);
    for (Eigen::Index k = 0; k < h.rows(); ++k)
        for (Eigen::Index j = 0; j < h.cols(); ++j) h(k, j) = rng.next_double(0.1, 1.1);
}

inline void init_nndsvda(const counts::SparseMatrix& x, Eigen::MatrixXd& w, Eigen::MatrixXd& h) {
    const int d = static_cast<int>(w.cols());
    const double avg =
        x.sum() / (static_cast<double>(x.rows()) * static_cast<double>(x.cols()));

    Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(x),
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& u = svd.matrixU();
    const auto& v = svd.matrixV();
    const auto& s = svd.singularValues();

    // Components at or beyond the numerical rank carry no signal. They stay
    // zero: mean-filling them plants positive mass at every zero of X that
    // multiplicative updates then shed only sublinearly, which is what keeps
    // overcomplete exact factorizations from converging.
    int active = 0;
    while (active < d && active < s.size() && s[active] > s[0] * 1e-12) ++active;

    w.setZero();
    h.setZero();
    if (active == 0) return;
    w.col(0) = std::sqrt(s[0]) * u.col(0).cwiseAbs();
    h.row(0) = std::sqrt(s[0]) * v.col(0).cwiseAbs().transpose();
    for (int k = 1; k < active; ++k) {
        const Eigen::VectorXd up = u.col(k).cwiseMax(0.0), un = (-u.col(k)).cwiseMax(0.0);
        const Eigen::VectorXd vp = v.col(k).cwiseMax(0.0), vn = (-v.col(k)).cwiseMax(0.0);
        const double nup = up.norm(), nun = un.norm(), nvp = vp.norm(), nvn = vn.norm();
        const double mp = nup * nvp, mn = nun * nvn;
        if (mp >= mn && mp > 0) {
            const double scale = std::sqrt(s[k] * mp);
            w.col(k) = (scale / nup) * up;
            h.row(k) = (scale / nvp) * vp.transpose();
        } else if (mn > 0) {
            const double scale = std::sqrt(s[k] * mn);
            w.col(k) = (scale / nun) * un;
            h.row(k) = (scale / nvn) * vn.transpose();
        } else {
            w.col(k).setZero();
            h.row(k).setZero();
        }
    }
    // the averaged variant: zeros inside the active components would stay
    // zero under multiplicative updates, so lift them to the matrix mean
    const double fill = avg > 0 ? avg : 1e-4;
    auto lift = [fill](double v) { return v <= 0 ? fill : v; };
    w.leftCols(active) = w.leftCols(active).unaryExpr(lift);
    h.topRows(active) = h.topRows(active).unaryExpr(lift);
}

}  // namespace detail

// Lee-Seung multiplicative updates for min ||X - WH||_F^2, W >= 0, H >= 0.
// All products with X touch only its nonzeros, so the piece-bucket matrix
// (up to 524,288 rows) never densifies. Deterministic for a fixed seed.
inline NmfModel nmf_fit(const counts::SparseMatrix& x, const NmfOptions& opts) {
    const Eigen::Index n = x.rows(), p = x.cols();
    if (opts.d < 1) throw InvalidDimension("d must be >= 1, got " + std::to_string(opts.d));
    for (int i = 0; i < x.outerSize(); ++i)
        for (counts::SparseMatrix::InnerIterator it(x, i); it; ++it)
            if (it.value() < 0)
                throw NegativeInput("X(" + std::to_string(it.row()) + "," +
                                    std::to_string(it.col()) + ") = " +
                                    std::to_string(it.value()));

    // Denominator floor. Applied as max(den, eps) rather than den + eps: the
    // additive form shifts every fixed point by O(sqrt(eps)), which is what
    // caps exact factorizations around 1e-6 per entry; the floor form leaves
    // fixed points with den > eps untouched.
    constexpr double kEps = 1e-12;
    NmfModel model;
    model.d = opts.d;
    model.seed = opts.seed;
    model.init = opts.init;
    model.w.resize(n, opts.d);
    model.h.resize(opts.d, p);
    if (opts.init == NmfInit::Random)
        detail::init_random(model.w, model.h, opts.seed);
    else
        detail::init_nndsvda(x, model.w, model.h);

    const double x_sq = x.squaredNorm();
    Eigen::MatrixXd hht = model.h * model.h.transpose();
    double prev = detail::nmf_objective(x, model.w, model.h, x_sq, hht);
    model.objective_trace.push_back(prev);

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        // H <- H .* (W^T X) ./ (W^T W H + eps)
        const Eigen::MatrixXd wtx = (x.transpose() * model.w).transpose();
        const Eigen::MatrixXd wtw = model.w.transpose() * model.w;
        model.h.array() *= wtx.array() / (wtw * model.h).array().max(kEps);

        // W <- W .* (X H^T) ./ (W H H^T + eps)
        const Eigen::MatrixXd xht = x * model.h.transpose();
        hht = model.h * model.h.transpose();
        model.w.array() *= xht.array() / (model.w * hht).array().max(kEps);

        const double cur = detail::nmf_objective(x, model.w, model.h, x_sq, hht);
        model.objective_trace.push_back(cur);
        model.iterations_run = iter + 1;
        // rel_tol = 0 disables early stopping (exact-factorization probes
        // want the full budget; improvements can round to one ulp uphill)
        if (opts.rel_tol > 0 && prev > 0 && (prev - cur) / prev < opts.rel_tol) break;
        prev = cur;
    }
    return model;
}

inline NmfModel nmf_fit(const Eigen::MatrixXd& x, const NmfOptions& opts) {
    return nmf_fit(counts::SparseMatrix(x.sparseView()), opts);
}

inline double reconstruction_error(const NmfModel& model, const counts::SparseMatrix& x) {
    if (x.rows() != model.w.rows() || x.cols() != model.h.cols())
        throw ShapeMismatch("matrix is " + std::to_string(x.rows()) + "x" +
                            std::to_string(x.cols()) + ", model expects " +
                            std::to_string(model.w.rows()) + "x" + std::to_string(model.h.cols()));
    return detail::nmf_objective(x, model.w, model.h, x.squaredNorm(),
                                 model.h * model.h.transpose());
}

inline double reconstruction_error(const NmfModel& model, const Eigen::MatrixXd& x) {
    return reconstruction_error(model, counts::SparseMatrix(x.sparseView()));
}

}  // namespace piecevec::factor
