#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "piecevec/counts.hpp"
#include "piecevec/errors.hpp"

namespace piecevec::factor {

// Rank-d PCA model: loadings C (p x d, orthonormal columns), scores
// W = X C, and per-component explained-variance ratios. The optimal C for
// the reconstruction objective min ||X - X C C^T||_F^2 s.t. C^T C = I is the
// top-d right singular vectors of X, so the fit is a thin SVD, not an
// iterative minimization.
struct PcaModel {
    Eigen::MatrixXd loadings;                  // p x d
    Eigen::MatrixXd scores;                    // n x d
    Eigen::VectorXd explained_variance_ratio;  // d, non-increasing
    Eigen::VectorXd singular_values;           // min(n,p), all of them
    counts::StandardizationParams standardization;
    int d = 0;
};

inline PcaModel pca_fit(const Eigen::MatrixXd& x_std, int d,
                        counts::StandardizationParams standardization = {}) {
    const Eigen::Index n = x_std.rows(), p = x_std.cols();
    if (d < 1 || d > std::min(n, p))
        throw InvalidDimension("d must lie in [1, min(n,p)] = [1, " +
                               std::to_string(std::min(n, p)) + "], got " + std::to_string(d));

    Eigen::BDCSVD<Eigen::MatrixXd> svd(x_std, Eigen::ComputeThinV);
    PcaModel model;
    model.d = d;
    model.singular_values = svd.singularValues();
    model.loadings = svd.matrixV().leftCols(d);

    // Sign is unidentifiable; fix each component so its largest-magnitude
    // loading is positive (ties: the earliest such entry decides).
    for (int k = 0; k < d; ++k) {
        Eigen::Index argmax = 0;
        model.loadings.col(k).cwiseAbs().maxCoeff(&argmax);
        if (model.loadings(argmax, k) < 0) model.loadings.col(k) = -model.loadings.col(k);
    }

    model.scores = x_std * model.loadings;

    const Eigen::VectorXd sq = model.singular_values.array().square();
    const double total = sq.sum();
    model.explained_variance_ratio =
        total > 0 ? Eigen::VectorXd(sq.head(d) / total) : Eigen::VectorXd::Zero(d);
    model.standardization = std::move(standardization);
    return model;
}

// ||X - X C C^T||_F^2; equals the sum of the discarded squared singular
// values when X is the matrix the model was fitted on.
inline double reconstruction_error(const PcaModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.loadings.rows())
        throw ShapeMismatch("matrix has " + std::to_string(x.cols()) + " columns, model expects " +
                            std::to_string(model.loadings.rows()));
    return (x - (x * model.loadings) * model.loadings.transpose()).squaredNorm();
}

}  // namespace piecevec::factor
