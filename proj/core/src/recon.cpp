#include "arsar/recon.hpp"

#include <cmath>
#include <string>

#include "arsar/error.hpp"
#include "arsar/manifest.hpp"

namespace arsar {

const char* to_string(ProxKind k) {
    switch (k) {
        case ProxKind::none: return "none";
        case ProxKind::l1: return "l1";
        case ProxKind::tv: return "tv";
    }
    return "?";
}

void AdmmConfig::validate() const {
    if (!(rho_n > 0.0 && rho_n < 1.0)) throw InvalidArgument("rho_n must be in (0, 1), got " + format_double(rho_n));
    if (mu && !(*mu > 0.0 && std::isfinite(*mu))) throw InvalidArgument("mu must be > 0");
    if (lipschitz && !(*lipschitz > 0.0 && std::isfinite(*lipschitz))) throw InvalidArgument("L must be > 0");
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
    if (max_iters == 0) throw InvalidArgument("max_iters must be >= 1");
    if (!(tol >= 0.0)) throw InvalidArgument("tol must be >= 0");
    if (prox == ProxKind::none && lambda > 0.0) throw InvalidArgument("prox 'none' cannot carry lambda > 0");
    if (prox == ProxKind::tv && tv_inner_iters == 0) throw InvalidArgument("tv_inner_iters must be >= 1");
}

ComplexImage x_update(const OperatorContext& ctx, double rho_n, double mu, const AdmmState& state,
                      const ComplexImage& yd) {
    require_same_shape(state.x, state.z, "x_update(X, Z)");
    require_same_shape(state.x, state.v, "x_update(X, V)");
    if (!all_finite(state.x) || !all_finite(state.z) || !all_finite(state.v) || !all_finite(yd)) {
        throw NumericError("x_update: non-finite input");
    }
    auto residual = yd - observation_G(ctx, state.x);
    auto step = imaging_T(ctx, residual);

    ComplexImage out(state.x.rows(), state.x.cols());
    auto o = out.data();
    const auto x = state.x.data();
    const auto z = state.z.data();
    const auto v = state.v.data();
    const auto s = step.data();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = (1.0 - rho_n) * x[i] + mu * s[i] + rho_n * (z[i] - v[i]);
    }
    return out;
}

ComplexImage prox_l1(const ComplexImage& w, double threshold) {
    if (!(threshold >= 0.0)) throw InvalidArgument("prox_l1: threshold must be >= 0");
    ComplexImage out(w.rows(), w.cols());
    auto o = out.data();
    const auto in = w.data();
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double mag = std::abs(in[i]);
        o[i] = mag > threshold ? in[i] * ((mag - threshold) / mag) : cplx{};
    }
    return out;
}

double total_variation(const std::vector<double>& f, std::size_t rows, std::size_t cols) {
    double tv = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = f[r * cols + c];
            const double gx = c + 1 < cols ? f[r * cols + c + 1] - v : 0.0;
            const double gy = r + 1 < rows ? f[(r + 1) * cols + c] - v : 0.0;
            tv += std::sqrt(gx * gx + gy * gy);
        }
    }
    return tv;
}

namespace {

// Dual projection for min 1/2 ||u - f||^2 + weight * TV(u):
//   p <- (p + tau grad(div p - f/weight)) / (1 + tau |grad(div p - f/weight)|)
//   u  = f - weight * div p
// The primal objective of the dual iterates is not monotone, so the best
// primal iterate is kept, starting from u = f (p = 0).
std::vector<double> tv_denoise(const std::vector<double>& f, std::size_t rows, std::size_t cols, double weight,
                               std::size_t iters) {
    constexpr double tau = 0.125;
    const std::size_t n = rows * cols;
    std::vector<double> px(n, 0.0), py(n, 0.0), div(n, 0.0), g(n, 0.0), u(n);

    auto divergence = [&] {
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                const std::size_t i = r * cols + c;
                double dx = c + 1 < cols ? px[i] : 0.0;
                if (c > 0) dx -= px[i - 1];
                double dy = r + 1 < rows ? py[i] : 0.0;
                if (r > 0) dy -= py[i - cols];
                div[i] = dx + dy;
            }
        }
    };
    auto objective = [&](const std::vector<double>& v) {
        double fit = 0.0;
        for (std::size_t i = 0; i < n; ++i) fit += 0.5 * (v[i] - f[i]) * (v[i] - f[i]);
        return fit + weight * total_variation(v, rows, cols);
    };

    std::vector<double> best = f;
    double best_obj = objective(f);
    divergence();
    for (std::size_t it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) g[i] = div[i] - f[i] / weight;
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                const std::size_t i = r * cols + c;
                const double gx = c + 1 < cols ? g[i + 1] - g[i] : 0.0;
                const double gy = r + 1 < rows ? g[i + cols] - g[i] : 0.0;
                const double denom = 1.0 + tau * std::sqrt(gx * gx + gy * gy);
                px[i] = (px[i] + tau * gx) / denom;
                py[i] = (py[i] + tau * gy) / denom;
            }
        }
        divergence();
        for (std::size_t i = 0; i < n; ++i) u[i] = f[i] - weight * div[i];
        const double obj = objective(u);
        if (obj < best_obj) {
            best_obj = obj;
            best = u;
        }
    }
    return best;
}

}  // namespace

ComplexImage prox_tv(const ComplexImage& w, double weight, std::size_t inner_iters) {
    if (!(weight >= 0.0)) throw InvalidArgument("prox_tv: weight must be >= 0");
    if (inner_iters == 0) throw InvalidArgument("prox_tv: inner_iters must be >= 1");
    if (weight == 0.0) return w;

    const std::size_t n = w.size();
    std::vector<double> re(n), im(n);
    const auto in = w.data();
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = in[i].real();
        im[i] = in[i].imag();
    }
    const auto ure = tv_denoise(re, w.rows(), w.cols(), weight, inner_iters);
    const auto uim = tv_denoise(im, w.rows(), w.cols(), weight, inner_iters);
    ComplexImage out(w.rows(), w.cols());
    auto o = out.data();
    for (std::size_t i = 0; i < n; ++i) o[i] = {ure[i], uim[i]};
    return out;
}

std::pair<ComplexImage, AdmmState> admm_reconstruct(const OperatorContext& ctx, AdmmConfig cfg,
                                                    const ComplexImage& yd) {
    cfg.validate();
    if (!cfg.lipschitz) {
        const double l = estimate_lipschitz(ctx, 50, Rng(cfg.seed));
        if (!(l > 0.0)) throw NumericError("admm_reconstruct: Lipschitz estimate is zero");
        cfg.lipschitz = l;
    }
    const double lip = *cfg.lipschitz;
    const double mu = cfg.mu.value_or(2.0 / lip);
    const double rho = cfg.rho_n * lip;
    const double threshold = cfg.lambda / rho;

    AdmmState st;
    st.x = imaging_T(ctx, yd);
    st.z = st.x;
    st.v = ComplexImage(st.x.rows(), st.x.cols());

    for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
        auto x_new = x_update(ctx, cfg.rho_n, mu, st, yd);

        auto w = x_new + st.v;
        ComplexImage z_new;
        switch (cfg.prox) {
            case ProxKind::none: z_new = std::move(w); break;
            case ProxKind::l1: z_new = prox_l1(w, threshold); break;
            case ProxKind::tv: z_new = prox_tv(w, threshold, cfg.tv_inner_iters); break;
        }
        auto gap = x_new - z_new;
        st.v += gap;

        if (!all_finite(x_new) || !all_finite(z_new) || !all_finite(st.v)) {
            throw NumericError("admm_reconstruct: non-finite iterate at iteration " + std::to_string(k));
        }

        const double prev_norm = norm(st.x);
        const double change = norm(x_new - st.x);
        st.x = std::move(x_new);
        st.z = std::move(z_new);
        st.iter = k;
        st.residual_history.push_back(norm(gap));

        // The warm start is a fixed point of the first X-update (T Yd lies
        // in the range of T G), so the test starts at the second iteration.
        const double rel = prev_norm > 0.0 ? change / prev_norm : change;
        if (k > 1 && rel < cfg.tol) break;
    }
    return {st.x, std::move(st)};
}

ComplexImage csa_baseline(const OperatorContext& ctx, const ComplexImage& yd) { return imaging_T(ctx, yd); }

}  // namespace arsar
