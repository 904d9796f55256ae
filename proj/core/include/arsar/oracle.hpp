#pragma once

// Dense-matrix realization of the downsampled observation operator, used
// to cross-check the matrix-free solver at desk scale. Vectorization is
// column-major (stacked columns): vec(X)[m + n*M] = X(m, n).

#include <Eigen/Dense>

#include "arsar/complex_image.hpp"
#include "arsar/csa.hpp"

namespace arsar::oracle {

inline constexpr std::size_t kMaxUnknowns = 256;

Eigen::VectorXcd vec(const ComplexImage& a);
ComplexImage unvec(const Eigen::VectorXcd& v, std::size_t rows, std::size_t cols);

/// Gamma with vec(G(X)) = Gamma * vec(X). Shape (M'N') x (MN).
/// rows/cols must equal the context grid and rows*cols <= 256.
Eigen::MatrixXcd materialize_gamma(const OperatorContext& ctx, std::size_t rows, std::size_t cols);

/// Same construction for T: columns are T applied to basis echoes.
Eigen::MatrixXcd materialize_imaging(const OperatorContext& ctx);

/// Direct solve of (2 Gamma^H Gamma + rho I) x = 2 Gamma^H yd + rho (z - v).
/// This is the exact X-subproblem minimizer for the data term ||G X - Yd||^2.
ComplexImage oracle_x_subproblem(const Eigen::MatrixXcd& gamma, const ComplexImage& yd, const ComplexImage& z,
                                 const ComplexImage& v, double rho);

}  // namespace arsar::oracle
