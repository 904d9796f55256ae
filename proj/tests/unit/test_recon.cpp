#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"

#include "arsar/error.hpp"
#include "arsar/metrics.hpp"
#include "arsar/oracle.hpp"
#include "arsar/recon.hpp"
#include "arsar/simdata.hpp"
#include "support.hpp"

using namespace arsar;
using test::make_ctx;
using test::random_image;

namespace {

AdmmState state_of(const ComplexImage& x, const ComplexImage& z, const ComplexImage& v) {
    AdmmState s;
    s.x = x;
    s.z = z;
    s.v = v;
    return s;
}

double tv_objective(const std::vector<double>& out, const std::vector<double>& in, std::size_t rows, std::size_t cols,
                    double weight) {
    double fit = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) fit += 0.5 * (out[i] - in[i]) * (out[i] - in[i]);
    return fit + weight * total_variation(out, rows, cols);
}

std::vector<double> real_part(const ComplexImage& a) {
    std::vector<double> r;
    for (const auto& z : a.data()) r.push_back(z.real());
    return r;
}

}  // namespace

TEST_CASE("x_update collapses to a back-projection") {
    const auto ctx = make_ctx(16, 16, 0.5);
    const auto yd = random_image(16, 8, Rng(1));
    const ComplexImage zero(16, 16);
    const auto x = x_update(ctx, 0.0, 0.7, state_of(zero, zero, zero), yd);
    CHECK(relative_error(x, cplx(0.7) * imaging_T(ctx, yd)) <= 1e-15);
}

TEST_CASE("x_update fixed point") {
    const auto ctx = make_ctx(16, 16, 0.5);
    const auto xs = random_image(16, 16, Rng(2));
    const auto yd = observation_G(ctx, xs);
    const auto x = x_update(ctx, 0.1, 1.0, state_of(xs, xs, ComplexImage(16, 16)), yd);
    CHECK(relative_error(x, xs) <= 1e-12);
}

TEST_CASE("x_update validates input") {
    const auto ctx = make_ctx(8, 8, 0.5);
    const ComplexImage zero(8, 8);
    CHECK_THROWS_AS(x_update(ctx, 0.1, 1.0, state_of(zero, zero, zero), ComplexImage(8, 8)), ShapeError);
    CHECK_THROWS_AS(x_update(ctx, 0.1, 1.0, state_of(zero, ComplexImage(8, 7), zero), ComplexImage(8, 4)),
                    ShapeError);
    auto bad = zero;
    bad(1, 1) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(x_update(ctx, 0.1, 1.0, state_of(bad, zero, zero), ComplexImage(8, 4)), NumericError);
}

TEST_CASE("prox_l1") {
    ComplexImage w(1, 3, {cplx(3, 0), 0.5 * std::polar(1.0, 1.1), cplx(0, 0)});
    CHECK(prox_l1(w, 0.0) == w);
    const auto p = prox_l1(w, 1.0);
    CHECK(p(0, 0) == cplx(2, 0));
    CHECK(p(0, 1) == cplx(0, 0));
    CHECK(p(0, 2) == cplx(0, 0));
    for (double th : {0.0, 0.7, 2.3, 6.0}) {
        const auto q = prox_l1(ComplexImage(1, 1, {0.5 * std::polar(1.0, th)}), 1.0);
        CHECK(q(0, 0) == cplx(0, 0));
    }
    // phase is kept
    const auto r = prox_l1(ComplexImage(1, 1, {std::polar(5.0, 0.4)}), 2.0);
    CHECK(std::abs(r(0, 0) - std::polar(3.0, 0.4)) < 1e-15);
    CHECK_THROWS_AS(prox_l1(w, -1.0), InvalidArgument);
}

TEST_CASE("prox_l1 is non-expansive and shrinks magnitudes") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto a = random_image(8, 8, Rng(s));
        const auto b = random_image(8, 8, Rng(s + 50));
        const auto pa = prox_l1(a, 0.6);
        const auto pb = prox_l1(b, 0.6);
        CHECK(norm(pa - pb) <= norm(a - b) * (1.0 + 1e-15));
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(pa.data()[i]) <= std::abs(a.data()[i]));
    }
}

TEST_CASE("prox_tv trivial cases") {
    const auto w = random_image(6, 5, Rng(1));
    CHECK(prox_tv(w, 0.0, 20) == w);
    ComplexImage c(6, 5);
    for (auto& z : c.data()) z = cplx(1.5, -0.25);
    CHECK(relative_error(prox_tv(c, 0.8, 20), c) <= 1e-15);
}

TEST_CASE("total variation of a step") {
    const std::vector<double> f{0, 0, 1, 1};
    CHECK(total_variation(f, 1, 4) == 1.0);
    CHECK(total_variation(f, 4, 1) == 1.0);
    // isotropic corner: one pixel differing from both neighbours
    CHECK(total_variation({1, 0, 0, 0}, 2, 2) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("prox_tv on a step edge against a brute-force minimizer") {
    const std::vector<double> in{0, 0, 1, 1};
    const double weight = 0.25;
    ComplexImage w(1, 4);
    for (std::size_t i = 0; i < 4; ++i) w(0, i) = in[i];

    // exhaustive search on a 1/64 grid over [0, 1]^4
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> cand(4);
    const int steps = 64;
    for (int a = 0; a <= steps; ++a)
        for (int b = 0; b <= steps; ++b)
            for (int c = 0; c <= steps; ++c)
                for (int d = 0; d <= steps; ++d) {
                    cand = {a / double(steps), b / double(steps), c / double(steps), d / double(steps)};
                    best = std::min(best, tv_objective(cand, in, 1, 4, weight));
                }
    CHECK(best == doctest::Approx(0.21875).epsilon(1e-12));

    const double identity = tv_objective(in, in, 1, 4, weight);
    double prev = identity;
    for (std::size_t iters : {1u, 2u, 5u, 10u, 20u, 50u, 200u}) {
        const double obj = tv_objective(real_part(prox_tv(w, weight, iters)), in, 1, 4, weight);
        CAPTURE(iters);
        CHECK(obj <= identity);
        CHECK(obj <= prev + 1e-15);
        CHECK(obj >= best - 1e-12);
        prev = obj;
    }
    CHECK(prev <= best + 1e-3);
}

TEST_CASE("admm with no prior recovers the full-sampling image in one step") {
    const auto ctx = make_ctx(32, 32, 1.0);
    const auto y = random_image(32, 32, Rng(4));
    AdmmConfig cfg;
    cfg.prox = ProxKind::none;
    cfg.lambda = 0.0;
    cfg.max_iters = 1;
    const auto [x, st] = admm_reconstruct(ctx, cfg, y);
    CHECK(relative_error(x, imaging_M(ctx.plan(), y)) <= 1e-8);
    CHECK(st.iter == 1);
}

TEST_CASE("admm zero echo gives zero image") {
    const auto ctx = make_ctx(16, 16, 0.5);
    for (auto kind : {ProxKind::l1, ProxKind::tv}) {
        AdmmConfig cfg;
        cfg.prox = kind;
        cfg.lambda = 0.05;
        cfg.max_iters = 5;
        const auto [x, st] = admm_reconstruct(ctx, cfg, ComplexImage(16, 8));
        CHECK(norm(x) == 0.0);
    }
    CHECK(norm(csa_baseline(ctx, ComplexImage(16, 8))) == 0.0);
}

TEST_CASE("admm config validation") {
    const auto ctx = make_ctx(8, 8, 0.5);
    AdmmConfig cfg;
    cfg.prox = ProxKind::none;
    cfg.lambda = 0.1;
    CHECK_THROWS_AS(admm_reconstruct(ctx, cfg, ComplexImage(8, 4)), InvalidArgument);
    cfg = {};
    cfg.rho_n = 1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.max_iters = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.mu = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    CHECK_THROWS_AS(admm_reconstruct(ctx, AdmmConfig{}, ComplexImage(8, 8)), ShapeError);
}

TEST_CASE("admm l1 beats the back-projection on a sparse scene") {
    const auto ctx = make_ctx(64, 64, 0.5, 7);
    const auto scene = gen_point_targets(64, 64, 10, 0.5, 1.0, Rng(7).split(1));
    const auto sample = synthesize(ctx, scene, std::nullopt, Rng(7).split(2));
    AdmmConfig cfg;
    cfg.lambda = 0.05;
    cfg.prox = ProxKind::l1;
    const auto [x, st] = admm_reconstruct(ctx, cfg, sample.echo_down);
    const auto base = csa_baseline(ctx, sample.echo_down);
    CHECK(metrics::nrmse(x, scene.image) <= 0.5 * metrics::nrmse(base, scene.image));
    CHECK(metrics::psnr(base, scene.image).db < metrics::psnr(x, scene.image).db);

    CHECK(st.residual_history.size() == st.iter);
    CHECK(st.iter >= 2);
    for (double r : st.residual_history) CHECK(std::isfinite(r));
    CHECK(norm(x) < 10.0 * norm(base));
}

TEST_CASE("admm tv stays bounded") {
    const auto ctx = make_ctx(32, 32, 0.5, 3);
    const auto scene = gen_distributed(32, 32, 0.4, Rng(3));
    const auto sample = synthesize(ctx, scene, std::nullopt, Rng(4));
    AdmmConfig cfg;
    cfg.lambda = 0.05;
    cfg.prox = ProxKind::tv;
    cfg.max_iters = 50;
    const auto [x, st] = admm_reconstruct(ctx, cfg, sample.echo_down);
    CHECK(all_finite(x));
    for (double r : st.residual_history) CHECK(std::isfinite(r));
    CHECK(norm(x) < 10.0 * norm(scene.image));
}

TEST_CASE("csa baseline at full sampling is the imaging operator") {
    const auto ctx = make_ctx(16, 16, 1.0);
    const auto y = random_image(16, 16, Rng(1));
    CHECK(csa_baseline(ctx, y) == imaging_M(ctx.plan(), y));
    CHECK_THROWS_AS(csa_baseline(ctx, ComplexImage(16, 8)), ShapeError);
}

TEST_CASE("materialized gamma") {
    const auto full = make_ctx(4, 4, 1.0);
    const auto g = oracle::materialize_gamma(full, 4, 4);
    REQUIRE(g.rows() == 16);
    REQUIRE(g.cols() == 16);
    const Eigen::MatrixXcd gram = g.adjoint() * g;
    CHECK((gram - Eigen::MatrixXcd::Identity(16, 16)).norm() <= 1e-10);
    std::size_t zero_cols = 0;
    for (Eigen::Index c = 0; c < g.cols(); ++c) zero_cols += g.col(c).norm() == 0.0;
    CHECK(zero_cols == 0);

    const auto ctx = make_ctx(8, 8, 0.5);
    const auto gd = oracle::materialize_gamma(ctx, 8, 8);
    CHECK(gd.rows() == 32);
    const auto x = random_image(8, 8, Rng(1));
    CHECK((gd * oracle::vec(x) - oracle::vec(observation_G(ctx, x))).norm() <= 1e-12 * oracle::vec(x).norm());
    const auto y = random_image(8, 4, Rng(2));
    CHECK((gd.adjoint() * oracle::vec(y) - oracle::vec(imaging_T(ctx, y))).norm() <= 1e-12 * oracle::vec(y).norm());
    const auto t = oracle::materialize_imaging(ctx);
    CHECK((gd.adjoint() - t).norm() <= 1e-10 * gd.norm());

    CHECK_THROWS_AS(oracle::materialize_gamma(make_ctx(16, 17, 1.0), 16, 17), InvalidArgument);
    CHECK_THROWS_AS(oracle::materialize_gamma(ctx, 4, 4), ShapeError);
}

TEST_CASE("vec is column-major") {
    ComplexImage a(2, 3);
    a(1, 0) = 7.0;
    a(0, 1) = 9.0;
    const auto v = oracle::vec(a);
    CHECK(v(1) == cplx(7.0));
    CHECK(v(2) == cplx(9.0));
    CHECK(oracle::unvec(v, 2, 3) == a);
}

TEST_CASE("oracle x-subproblem limits") {
    const auto full = make_ctx(4, 4, 1.0);
    const auto gamma = oracle::materialize_gamma(full, 4, 4);
    const auto y = random_image(4, 4, Rng(1));
    const ComplexImage zero(4, 4);
    const auto x = oracle::oracle_x_subproblem(gamma, y, zero, zero, 1e-9);
    CHECK(relative_error(x, imaging_M(full.plan(), y)) <= 1e-4);

    const auto z = random_image(4, 4, Rng(2));
    const auto v = random_image(4, 4, Rng(3));
    const double rho = 1e8;
    const auto xl = oracle::oracle_x_subproblem(gamma, y, z, v, rho);
    CHECK(norm(xl - (z - v)) <= 10.0 / rho * (norm(y) + norm(z - v)));
    CHECK_THROWS_AS(oracle::oracle_x_subproblem(gamma, y, z, v, 0.0), InvalidArgument);
}

TEST_CASE("iterated x_update converges to the direct solve") {
    const auto ctx = make_ctx(8, 8, 0.5, 13);
    const double l = estimate_lipschitz(ctx, 100, Rng(1));
    const double rho_n = 0.1, mu = 2.0 / l;
    const auto yd = random_image(8, 4, Rng(2));
    const auto z = random_image(8, 8, Rng(3));
    const auto v = cplx(0.2) * random_image(8, 8, Rng(4));
    const auto direct =
        oracle::oracle_x_subproblem(oracle::materialize_gamma(ctx, 8, 8), yd, z, v, rho_n * l);

    AdmmState s = state_of(imaging_T(ctx, yd), z, v);
    std::size_t used = 0;
    for (; used < 5000; ++used) {
        s.x = x_update(ctx, rho_n, mu, s, yd);
        if (relative_error(s.x, direct) <= 1e-6) break;
    }
    CAPTURE(used);
    CHECK(used < 5000);
    CHECK(relative_error(s.x, direct) <= 1e-6);
}
