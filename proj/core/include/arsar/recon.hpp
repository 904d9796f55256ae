#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "arsar/complex_image.hpp"
#include "arsar/csa.hpp"

namespace arsar {

enum class ProxKind { none, l1, tv };

const char* to_string(ProxKind k);

/// Hyperparameters of the inversion-free ADMM solver.
///
/// `lipschitz` and `mu` are filled from estimate_lipschitz (mu = 2/L)
/// when left empty. The Z-update prox weight is lambda / rho with
/// rho = rho_n * L.
struct AdmmConfig {
    double rho_n = 0.1;
    std::optional<double> mu;
    std::optional<double> lipschitz;
    double lambda = 0.0;
    std::size_t max_iters = 200;
    double tol = 1e-6;
    ProxKind prox = ProxKind::l1;
    std::size_t tv_inner_iters = 20;
    std::uint64_t seed = 0;  // start vector of the power iteration

    void validate() const;
};

struct AdmmState {
    ComplexImage x;
    ComplexImage z;
    ComplexImage v;
    std::size_t iter = 0;
    std::vector<double> residual_history;  // ||X^k - Z^k|| per iteration
};

/// X^k = (1 - rho_n) X + mu T[Yd - G(X)] + rho_n (Z - V).
ComplexImage x_update(const OperatorContext& ctx, double rho_n, double mu, const AdmmState& state,
                      const ComplexImage& yd);

/// Complex soft threshold, entrywise.
ComplexImage prox_l1(const ComplexImage& w, double threshold);

/// Approximate isotropic-TV prox (dual projection, fixed iteration count),
/// applied to the real and imaginary parts independently. Returns the
/// iterate with the lowest primal objective, so more iterations never
/// give a worse result.
ComplexImage prox_tv(const ComplexImage& w, double weight, std::size_t inner_iters);

/// Isotropic TV of a real field with forward differences and Neumann boundary.
double total_variation(const std::vector<double>& f, std::size_t rows, std::size_t cols);

/// Warm start X = Z = T(Yd), V = 0, then the three-step ADMM loop until
/// max_iters or the relative change of X falls below tol (checked from the
/// second iteration on).
std::pair<ComplexImage, AdmmState> admm_reconstruct(const OperatorContext& ctx, AdmmConfig cfg,
                                                    const ComplexImage& yd);

/// Single back-projection T(Yd).
ComplexImage csa_baseline(const OperatorContext& ctx, const ComplexImage& yd);

}  // namespace arsar
