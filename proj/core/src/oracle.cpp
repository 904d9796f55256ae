#include "arsar/oracle.hpp"

#include <string>

#include "arsar/error.hpp"

namespace arsar::oracle {

Eigen::VectorXcd vec(const ComplexImage& a) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t n = 0; n < a.cols(); ++n) {
        for (std::size_t m = 0; m < a.rows(); ++m) v(static_cast<Eigen::Index>(m + n * a.rows())) = a(m, n);
    }
    return v;
}

ComplexImage unvec(const Eigen::VectorXcd& v, std::size_t rows, std::size_t cols) {
    if (static_cast<std::size_t>(v.size()) != rows * cols) throw ShapeError("unvec: length mismatch");
    ComplexImage a(rows, cols);
    for (std::size_t n = 0; n < cols; ++n) {
        for (std::size_t m = 0; m < rows; ++m) a(m, n) = v(static_cast<Eigen::Index>(m + n * rows));
    }
    return a;
}

Eigen::MatrixXcd materialize_gamma(const OperatorContext& ctx, std::size_t rows, std::size_t cols) {
    if (rows * cols > kMaxUnknowns) {
        throw InvalidArgument("materialize_gamma: " + std::to_string(rows * cols) + " unknowns exceeds the cap of " +
                              std::to_string(kMaxUnknowns));
    }
    if (rows != ctx.rows() || cols != ctx.cols()) throw ShapeError("materialize_gamma: grid mismatch");
    const auto out_len = static_cast<Eigen::Index>(ctx.down_rows() * ctx.down_cols());
    Eigen::MatrixXcd gamma(out_len, static_cast<Eigen::Index>(rows * cols));
    for (std::size_t n = 0; n < cols; ++n) {
        for (std::size_t m = 0; m < rows; ++m) {
            ComplexImage e(rows, cols);
            e(m, n) = 1.0;
            gamma.col(static_cast<Eigen::Index>(m + n * rows)) = vec(observation_G(ctx, e));
        }
    }
    return gamma;
}

Eigen::MatrixXcd materialize_imaging(const OperatorContext& ctx) {
    const std::size_t r = ctx.down_rows();
    const std::size_t c = ctx.down_cols();
    if (ctx.rows() * ctx.cols() > kMaxUnknowns) throw InvalidArgument("materialize_imaging: size cap exceeded");
    Eigen::MatrixXcd t(static_cast<Eigen::Index>(ctx.rows() * ctx.cols()), static_cast<Eigen::Index>(r * c));
    for (std::size_t n = 0; n < c; ++n) {
        for (std::size_t m = 0; m < r; ++m) {
            ComplexImage e(r, c);
            e(m, n) = 1.0;
            t.col(static_cast<Eigen::Index>(m + n * r)) = vec(imaging_T(ctx, e));
        }
    }
    return t;
}

ComplexImage oracle_x_subproblem(const Eigen::MatrixXcd& gamma, const ComplexImage& yd, const ComplexImage& z,
                                 const ComplexImage& v, double rho) {
    if (!(rho > 0.0)) throw InvalidArgument("oracle_x_subproblem: rho must be > 0");
    require_same_shape(z, v, "oracle_x_subproblem(Z, V)");
    const auto unknowns = static_cast<Eigen::Index>(z.size());
    if (static_cast<std::size_t>(unknowns) > kMaxUnknowns) throw InvalidArgument("oracle_x_subproblem: size cap");
    if (gamma.cols() != unknowns || gamma.rows() != static_cast<Eigen::Index>(yd.size())) {
        throw ShapeError("oracle_x_subproblem: Gamma does not conform to Yd/Z");
    }
    const Eigen::MatrixXcd gh = gamma.adjoint();
    Eigen::MatrixXcd a = 2.0 * gh * gamma;
    a.diagonal().array() += rho;
    const Eigen::VectorXcd b = 2.0 * gh * vec(yd) + rho * (vec(z) - vec(v));
    Eigen::LLT<Eigen::MatrixXcd> llt(a);
    if (llt.info() != Eigen::Success) throw NumericError("oracle_x_subproblem: system is not positive definite");
    return unvec(llt.solve(b), z.rows(), z.cols());
}

}  // namespace arsar::oracle
