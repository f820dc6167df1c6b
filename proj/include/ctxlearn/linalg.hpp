// Least-squares solving shared by the linear classifier and the linear
// context estimator.  Backed by Eigen's complete orthogonal decomposition,
// which yields the minimum-norm solution when the design matrix is
// rank-deficient.
#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ctxlearn/core.hpp"

namespace ctxlearn::linalg {

struct LeastSquares {
    Eigen::MatrixXd coefficients;       // one column per right-hand side
    Eigen::Index rank = 0;
    bool rank_deficient = false;
    std::vector<double> residual_norms;  // ||A x - b|| per right-hand side
};

inline LeastSquares solve_least_squares(const Eigen::MatrixXd& design,
                                        const Eigen::MatrixXd& targets) {
    if (design.rows() != targets.rows()) {
        throw Error("least squares: design and target row counts differ");
    }
    if (design.rows() == 0) {
        throw Error("least squares: empty design matrix");
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    LeastSquares out;
    out.coefficients = cod.solve(targets);
    out.rank = cod.rank();
    out.rank_deficient = out.rank < design.cols();
    out.residual_norms.reserve(static_cast<std::size_t>(targets.cols()));
    const Eigen::MatrixXd residuals = design * out.coefficients - targets;
    for (Eigen::Index c = 0; c < targets.cols(); ++c) {
        out.residual_norms.push_back(residuals.col(c).norm());
    }
    return out;
}

// Design matrix [1 | columns...] from row-major data.
inline Eigen::MatrixXd design_with_intercept(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw Error("least squares: no rows");
    const std::size_t width = rows.front().size();
    Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()),
                           static_cast<Eigen::Index>(width + 1));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        design(static_cast<Eigen::Index>(r), 0) = 1.0;
        for (std::size_t c = 0; c < width; ++c) {
            design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c + 1)) = rows[r][c];
        }
    }
    return design;
}

}  // namespace ctxlearn::linalg
