#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arsar/csa.hpp"
#include "arsar/error.hpp"
#include "arsar/manifest.hpp"
#include "arsar/metrics.hpp"
#include "arsar/net/arsar_net.hpp"
#include "arsar/net/checkpoint.hpp"
#include "arsar/net/gradcheck.hpp"
#include "arsar/net/train.hpp"
#include "arsar/recon.hpp"
#include "arsar/sar_params.hpp"
#include "arsar/simdata.hpp"

namespace fs = std::filesystem;

namespace arsar::cli {

namespace {

/// Raised for flag values that parse but make no sense.
struct UsageFailure : Error {
    using Error::Error;
};

/// Raised when a net checkpoint is absent.
struct MissingCheckpoint : Error {
    using Error::Error;
};

struct Globals {
    std::string radar;
    std::uint64_t seed = 1;
    std::string out = ".";
    std::string grid;
};

std::pair<std::size_t, std::size_t> parse_grid(const std::string& g) {
    const auto x = g.find_first_of("xX");
    if (x == std::string::npos) throw UsageFailure("--grid expects MxN, got '" + g + "'");
    try {
        std::size_t used = 0;
        const auto m = std::stoul(g.substr(0, x), &used);
        if (used != x) throw UsageFailure("--grid expects MxN, got '" + g + "'");
        const auto rest = g.substr(x + 1);
        const auto n = std::stoul(rest, &used);
        if (used != rest.size() || m == 0 || n == 0) throw UsageFailure("--grid expects MxN, got '" + g + "'");
        return {m, n};
    } catch (const std::logic_error&) {
        throw UsageFailure("--grid expects MxN, got '" + g + "'");
    }
}

/// Radar file (or the default system) with the grid taken from --grid, then
/// the file, then `fallback`.
SarSystemParams radar_params(const Globals& g, std::size_t fallback_rows, std::size_t fallback_cols,
                             const std::string& fallback_file = {}) {
    SarSystemParams p = default_params(fallback_rows, fallback_cols);
    if (!g.radar.empty()) {
        p = load_params(g.radar, p);
    } else if (!fallback_file.empty() && fs::exists(fallback_file)) {
        p = load_params(fallback_file, p);
    }
    if (!g.grid.empty()) std::tie(p.rows, p.cols) = parse_grid(g.grid);
    p.validate();
    return p;
}

void check_rate(double r, const char* flag) {
    if (!(r > 0.0 && r <= 1.0)) throw UsageFailure(std::string(flag) + " must be in (0, 1], got " + format_double(r));
}

SamplingScheme scheme_for(Axis axis, std::size_t full, double rate, const Rng& rng) {
    return rate >= 1.0 ? identity_sampling(axis, full) : make_sampling(axis, full, rate, rng);
}

std::string input_id(const std::string& echo_path) {
    std::ifstream in(echo_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + echo_path);
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void append_csv(const fs::path& path, const std::string& header, const std::string& row) {
    const bool fresh = !fs::exists(path);
    std::ofstream f(path, std::ios::app);
    if (!f) throw IoError("cannot write " + path.string());
    if (fresh) f << header << '\n';
    f << row << '\n';
}

fs::path ensure_dir(const std::string& d) {
    fs::path p(d);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create output directory " + d + ": " + ec.message());
    return p;
}

// ---------------------------------------------------------------- simulate

struct SimulateFlags {
    std::string scene = "point";
    std::optional<std::size_t> count;  // default 10 per scene, recipe default for datasets
    double sparsity = 0.1;
    double amp_lo = 0.5;
    double amp_hi = 1.0;
    double rate_az = 0.5;
    double rate_rg = 1.0;
    std::optional<double> snr;
    bool dataset = false;
    std::size_t n_point = 16;
    std::size_t n_sparse = 8;
    std::size_t n_dense = 8;
};

int cmd_simulate(const Globals& g, const SimulateFlags& f, std::ostream& out) {
    check_rate(f.rate_az, "--rate-az");
    check_rate(f.rate_rg, "--rate-rg");
    const fs::path dir = ensure_dir(g.out);

    if (f.dataset) {
        const SarSystemParams radar = radar_params(g, 16, 16);
        DatasetSpec spec;
        spec.rows = radar.rows;
        spec.cols = radar.cols;
        spec.rate_azimuth = f.rate_az;
        spec.rate_range = f.rate_rg;
        spec.snr_db = f.snr;
        spec.seed = g.seed;
        spec.n_point = f.n_point;
        spec.n_distributed_sparse = f.n_sparse;
        spec.n_distributed_dense = f.n_dense;
        if (f.count) spec.point_count = *f.count;
        spec.amp_lo = f.amp_lo;
        spec.amp_hi = f.amp_hi;
        spec.sparse_fraction = f.sparsity;
        if (spec.size() == 0) throw UsageFailure("dataset would be empty");
        // generate once so invalid recipes fail here rather than in train
        const OperatorContext ctx = dataset_context(spec, radar);
        (void)make_dataset(spec, ctx);
        spec.to_manifest().save((dir / "dataset.manifest").string(), "dataset recipe");
        save_params((dir / "radar.txt").string(), radar);
        out << "dataset," << spec.size() << ',' << (dir / "dataset.manifest").string() << '\n';
        return kOk;
    }

    const SarSystemParams radar = radar_params(g, 64, 64);
    const Rng root(g.seed);
    const OperatorContext ctx(build_phase_plan(radar), scheme_for(Axis::range, radar.rows, f.rate_rg, root.split(101)),
                              scheme_for(Axis::azimuth, radar.cols, f.rate_az, root.split(102)));
    Scene scene;
    if (f.scene == "point") {
        scene = gen_point_targets(radar.rows, radar.cols, f.count.value_or(10), f.amp_lo, f.amp_hi, root.split(1));
    } else if (f.scene == "distributed") {
        scene = gen_distributed(radar.rows, radar.cols, f.sparsity, root.split(1));
    } else {
        throw UsageFailure("--scene must be point or distributed");
    }
    const Sample s = synthesize(ctx, scene, f.snr, root.split(2));

    save_arsn((dir / "scene.arsn").string(), s.scene.image);
    save_arsn((dir / "echo_full.arsn").string(), s.echo_full);
    save_arsn((dir / "echo_down.arsn").string(), s.echo_down);
    save_scheme((dir / "scheme_range.txt").string(), s.scheme_range);
    save_scheme((dir / "scheme_azimuth.txt").string(), s.scheme_azimuth);
    save_params((dir / "radar.txt").string(), radar);
    export_magnitude_png((dir / "scene.png").string(), s.scene.image, -40.0);

    KeyValueFile m = s.scene.metadata;
    m.set("scene", f.scene);
    m.set("rows", static_cast<std::uint64_t>(radar.rows));
    m.set("cols", static_cast<std::uint64_t>(radar.cols));
    m.set("seed", g.seed);
    m.set("rate_azimuth", f.rate_az);
    m.set("rate_range", f.rate_rg);
    if (f.snr) m.set("snr_db", *f.snr);
    m.set("input_id", input_id((dir / "echo_down.arsn").string()));
    m.save((dir / "manifest").string(), "simulated scene");
    out << "scene," << m.get_string("input_id") << ',' << dir.string() << '\n';
    return kOk;
}

// ------------------------------------------------------------- reconstruct

struct ReconstructFlags {
    std::string in;
    std::string method = "csa";
    double lambda = 0.05;
    std::size_t iters = 200;
    double tol = 1e-6;
    double rho = 0.1;
    std::size_t tv_inner = 20;
    std::string checkpoint;
    std::string truth;
    std::string name;
    bool dump_residuals = false;
    std::size_t time_reps = 0;
};

OperatorContext echo_context(const Globals& g, const fs::path& in) {
    Globals local = g;
    local.grid.clear();  // the echo directory fixes the grid
    const SarSystemParams radar = radar_params(local, 64, 64, (in / "radar.txt").string());
    SamplingScheme sr = fs::exists(in / "scheme_range.txt") ? load_scheme((in / "scheme_range.txt").string())
                                                            : identity_sampling(Axis::range, radar.rows);
    SamplingScheme sa = fs::exists(in / "scheme_azimuth.txt") ? load_scheme((in / "scheme_azimuth.txt").string())
                                                              : identity_sampling(Axis::azimuth, radar.cols);
    if (sr.full_size != radar.rows || sa.full_size != radar.cols) {
        throw ShapeError("sampling schemes do not match the radar grid");
    }
    if (!g.grid.empty()) {
        const auto [m, n] = parse_grid(g.grid);
        if (m != radar.rows || n != radar.cols) throw ShapeError("--grid disagrees with the echo directory");
    }
    return OperatorContext(build_phase_plan(radar), std::move(sr), std::move(sa));
}

int cmd_reconstruct(const Globals& g, const ReconstructFlags& f, std::ostream& out, std::ostream& err) {
    const std::vector<std::string> methods{"csa", "l1", "tv", "net-swift", "net-pro"};
    if (std::find(methods.begin(), methods.end(), f.method) == methods.end()) {
        throw UsageFailure("--method must be one of csa, l1, tv, net-swift, net-pro");
    }
    if (f.time_reps != 0 && f.time_reps < 5) throw UsageFailure("--time needs at least 5 repetitions");
    const fs::path in(f.in);
    if (!fs::exists(in / "echo_down.arsn")) throw IoError("no echo_down.arsn in " + f.in);

    const bool is_net = f.method.rfind("net-", 0) == 0;
    std::optional<net::NetParams> params;
    if (is_net) {
        if (f.checkpoint.empty() || !fs::exists(f.checkpoint)) {
            throw MissingCheckpoint("method " + f.method + " needs an existing --checkpoint");
        }
        params = net::load_checkpoint(f.checkpoint);
        const auto want = f.method == "net-swift" ? net::Variant::swift : net::Variant::pro;
        if (params->config.variant != want) {
            throw ShapeError(std::string("checkpoint holds the ") + net::to_string(params->config.variant) +
                             " variant");
        }
    }

    const OperatorContext ctx = echo_context(g, in);
    const ComplexImage yd = load_arsn((in / "echo_down.arsn").string());
    if (yd.rows() != ctx.down_rows() || yd.cols() != ctx.down_cols()) {
        throw ShapeError("echo is " + std::to_string(yd.rows()) + "x" + std::to_string(yd.cols()) +
                         ", schemes expect " + std::to_string(ctx.down_rows()) + "x" +
                         std::to_string(ctx.down_cols()));
    }
    if (params && (params->config.height != ctx.rows() || params->config.width != ctx.cols())) {
        throw ShapeError("checkpoint grid " + std::to_string(params->config.height) + "x" +
                         std::to_string(params->config.width) + " != echo grid " + std::to_string(ctx.rows()) +
                         "x" + std::to_string(ctx.cols()));
    }

    AdmmConfig admm;
    admm.lambda = f.lambda;
    admm.max_iters = f.iters;
    admm.tol = f.tol;
    admm.rho_n = f.rho;
    admm.tv_inner_iters = f.tv_inner;
    admm.prox = f.method == "tv" ? ProxKind::tv : ProxKind::l1;
    admm.seed = g.seed;
    if (f.method == "l1" || f.method == "tv") {
        admm.validate();
        admm.lipschitz = estimate_lipschitz(ctx, 50, Rng(g.seed));
    }

    std::vector<double> residuals;
    auto reconstruct = [&]() -> ComplexImage {
        if (f.method == "csa") return csa_baseline(ctx, yd);
        if (is_net) {
            net::NetParams local = *params;
            return net::forward(ctx, local.config, local, yd).first;
        }
        auto [x, state] = admm_reconstruct(ctx, admm, yd);
        residuals = std::move(state.residual_history);
        return x;
    };
    const ComplexImage x = reconstruct();

    const fs::path dir = ensure_dir(g.out);
    const std::string stem = "recon_" + f.method;
    save_arsn((dir / (stem + ".arsn")).string(), x);
    export_magnitude_png((dir / (stem + ".png")).string(), x, -40.0);

    if (f.dump_residuals) {
        std::ofstream r(dir / (stem + "_residuals.csv"));
        r << "iter,residual\n";
        for (std::size_t i = 0; i < residuals.size(); ++i) r << i << ',' << format_double(residuals[i]) << '\n';
    }

    if (f.time_reps > 0) {
        std::vector<double> secs;
        for (std::size_t i = 0; i < f.time_reps; ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            (void)reconstruct();
            secs.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        std::sort(secs.begin(), secs.end());
        const double median = secs.size() % 2 ? secs[secs.size() / 2]
                                              : 0.5 * (secs[secs.size() / 2 - 1] + secs[secs.size() / 2]);
        KeyValueFile t;
        t.set("method", f.method);
        t.set("reps", static_cast<std::uint64_t>(f.time_reps));
        t.set("median_seconds", median);
        t.set("items_per_s", median > 0.0 ? 1.0 / median : 0.0);
        t.save((dir / (stem + ".timing")).string(), "wall-clock reconstruction timing");
    }

    const fs::path truth = f.truth.empty() ? in / "scene.arsn" : fs::path(f.truth);
    if (!fs::exists(truth)) {
        err << "no ground truth at " << truth.string() << "; metrics skipped\n";
        return kOk;
    }
    const ComplexImage gt = load_arsn(truth.string());
    if (gt.rows() != x.rows() || gt.cols() != x.cols()) throw ShapeError("ground truth shape differs from output");
    const std::string row =
        input_id((in / "echo_down.arsn").string()) + ',' +
        metrics::csv_row(f.name.empty() ? f.method : f.name, metrics::evaluate(x, gt));
    append_csv(dir / "metrics.csv", "input_id," + metrics::csv_header(), row);
    out << row << '\n';
    return kOk;
}

// ------------------------------------------------------------------- train

struct NetFlags {
    std::string variant = "swift";
    std::size_t layers = 3;
    std::size_t channels = 4;
    std::size_t levels = 2;
    std::size_t pairs = 2;
    std::string norm = "batch";
    bool share = false;
};

net::NetConfig net_config(const NetFlags& f, std::size_t rows, std::size_t cols, std::uint64_t seed) {
    net::NetConfig c;
    c.variant = net::parse_variant(f.variant);
    c.num_layers = f.layers;
    c.base_channels = f.channels;
    c.pyramid_levels = f.levels;
    c.pair_count = f.pairs;
    c.height = rows;
    c.width = cols;
    c.seed = seed;
    if (f.norm == "batch") {
        c.norm = net::NormMode::batch;
    } else if (f.norm == "instance") {
        c.norm = net::NormMode::instance;
    } else {
        throw UsageFailure("--norm must be batch or instance");
    }
    c.share_weights = f.share;
    c.validate();
    return c;
}

struct TrainFlags {
    NetFlags net;
    std::string dataset;
    std::size_t epochs = 0;
    std::size_t steps = 0;
    double lr = 3e-3;
    std::size_t batch = 4;
};

std::vector<net::TrainingPair> pairs_of(const std::vector<Sample>& samples) {
    std::vector<net::TrainingPair> out;
    for (const auto& s : samples) out.push_back({s.echo_down, s.scene.image});
    return out;
}

int cmd_train(const Globals& g, const TrainFlags& f, std::ostream& out, std::ostream& err) {
    if (!fs::exists(f.dataset)) throw IoError("dataset manifest not found: " + f.dataset);
    const DatasetSpec spec = DatasetSpec::from_manifest(KeyValueFile::load(f.dataset));
    Globals local = g;
    local.grid = std::to_string(spec.rows) + "x" + std::to_string(spec.cols);
    if (!g.grid.empty() && parse_grid(g.grid) != std::make_pair(spec.rows, spec.cols)) {
        throw ShapeError("--grid disagrees with the dataset manifest");
    }
    const SarSystemParams radar =
        radar_params(local, spec.rows, spec.cols, (fs::path(f.dataset).parent_path() / "radar.txt").string());
    const net::NetConfig cfg = net_config(f.net, spec.rows, spec.cols, g.seed);

    net::TrainConfig tc;
    tc.lr = f.lr;
    tc.batch = f.batch;
    tc.max_steps = f.steps;
    const std::size_t per_epoch = (spec.size() + f.batch - 1) / std::max<std::size_t>(f.batch, 1);
    tc.epochs = f.epochs != 0 ? f.epochs : f.steps != 0 ? (f.steps + per_epoch - 1) / per_epoch : 1;
    tc.validate();

    const OperatorContext ctx = dataset_context(spec, radar);
    const auto data = pairs_of(make_dataset(spec, ctx));
    const Rng root(g.seed);
    const double lip = estimate_lipschitz(ctx, 50, root.split(7));
    net::NetParams init = net::init_params(cfg, lip);

    const fs::path dir = ensure_dir(g.out);
    net::TrainResult res;
    try {
        res = net::train(ctx, std::move(init), data, tc, root.split(11));
    } catch (const net::TrainingDiverged& e) {
        err << "training diverged at step " << e.step() << ": " << e.what() << '\n';
        return kDiverged;
    }
    net::save_checkpoint((dir / "checkpoint.arsw").string(), res.params);
    std::ofstream loss(dir / "loss.csv", std::ios::trunc);
    loss << "step,loss\n";
    for (std::size_t i = 0; i < res.loss_history.size(); ++i) {
        loss << i << ',' << format_double(res.loss_history[i]) << '\n';
    }
    const auto& h = res.loss_history;
    out << "steps," << h.size() << '\n';
    if (!h.empty()) out << "first_loss," << format_double(h.front()) << "\nlast_loss," << format_double(h.back()) << '\n';
    return kOk;
}

// --------------------------------------------------------------- gradcheck

struct GradcheckFlags {
    NetFlags net;
    std::size_t samples = 2;
    double rate_az = 0.5;
    double step = 1e-5;
    double tol = 1e-4;
    bool inject = false;
};

int cmd_gradcheck(const Globals& g, GradcheckFlags f, std::ostream& out, std::ostream& err) {
    check_rate(f.rate_az, "--rate-az");
    if (f.samples < 1) throw UsageFailure("--samples must be >= 1");
    Globals local = g;
    if (local.grid.empty()) local.grid = "16x16";
    const SarSystemParams radar = radar_params(local, 16, 16);
    const net::NetConfig cfg = net_config(f.net, radar.rows, radar.cols, g.seed);

    DatasetSpec spec;
    spec.rows = radar.rows;
    spec.cols = radar.cols;
    spec.rate_azimuth = f.rate_az;
    spec.seed = g.seed;
    spec.n_point = (f.samples + 1) / 2;
    spec.n_distributed_sparse = f.samples / 2;
    spec.n_distributed_dense = 0;
    spec.point_count = std::min<std::size_t>(4, radar.rows * radar.cols / 4);
    const OperatorContext ctx = dataset_context(spec, radar);
    const auto data = pairs_of(make_dataset(spec, ctx));
    const auto params = net::init_params(cfg, estimate_lipschitz(ctx, 50, Rng(g.seed).split(7)));

    net::GradcheckOptions opt;
    opt.step = f.step;
    opt.tol = f.tol;
    opt.inject_sign_flip = f.inject;
    const auto rep = net::gradcheck(ctx, params, data, opt);

    out << "parameter,entries,max_rel_error,kink_retries,kink_skipped\n";
    for (const auto& t : rep.tensors) {
        out << t.name << ',' << t.entries << ',' << format_double(t.max_rel_error) << ',' << t.kink_retries << ','
            << t.kink_skipped << '\n';
    }
    if (!rep.passed) {
        err << "gradient check failed (tolerance " << format_double(f.tol) << "):\n";
        for (const auto& t : rep.tensors) {
            if (t.max_rel_error > f.tol) {
                err << "  " << t.name << " max relative error " << format_double(t.max_rel_error) << " at entry "
                    << t.worst_entry << '\n';
            }
        }
        return kGradcheckFailed;
    }
    err << "gradient check passed: " << rep.entries << " entries, max relative error "
        << format_double(rep.max_rel_error) << '\n';
    return kOk;
}

// -------------------------------------------------------------------- eval

struct EvalFlags {
    std::vector<std::string> pairs;
};

int cmd_eval(const Globals& g, const EvalFlags& f, std::ostream& out) {
    if (f.pairs.empty()) throw UsageFailure("eval needs at least one --pair NAME=RECON,TRUTH");
    std::vector<std::string> rows;
    for (const auto& spec : f.pairs) {
        const auto eq = spec.find('=');
        const auto comma = spec.find(',', eq == std::string::npos ? 0 : eq);
        if (eq == std::string::npos || comma == std::string::npos) {
            throw UsageFailure("--pair expects NAME=RECON,TRUTH, got '" + spec + "'");
        }
        const std::string name = spec.substr(0, eq);
        const fs::path recon = spec.substr(eq + 1, comma - eq - 1);
        const fs::path truth = spec.substr(comma + 1);
        if (!fs::exists(recon) || !fs::exists(truth)) throw ShapeError("unmatched pair '" + name + "': missing file");
        const ComplexImage x = load_arsn(recon.string());
        const ComplexImage t = load_arsn(truth.string());
        if (!x.same_shape(t)) throw ShapeError("unmatched pair '" + name + "': shapes differ");

        std::string speed;
        fs::path timing = recon;
        timing.replace_extension(".timing");
        if (fs::exists(timing)) speed = format_double(KeyValueFile::load(timing.string()).get_double("items_per_s"));
        rows.push_back(metrics::csv_row(name, metrics::evaluate(x, t)) + ',' + speed);
    }
    const std::string header = metrics::csv_header() + ",items_per_s";
    out << header << '\n';
    for (const auto& r : rows) out << r << '\n';
    if (g.out != ".") {
        std::ofstream csv(ensure_dir(g.out) / "eval.csv", std::ios::trunc);
        csv << header << '\n';
        for (const auto& r : rows) csv << r << '\n';
    }
    return kOk;
}

void add_net_flags(CLI::App* c, NetFlags& f) {
    c->add_option("--variant", f.variant, "swift or pro")->capture_default_str();
    c->add_option("--layers", f.layers, "unfolded layers N_s")->capture_default_str();
    c->add_option("--channels", f.channels, "base channel width C")->capture_default_str();
    c->add_option("--levels", f.levels, "swift pyramid levels")->capture_default_str();
    c->add_option("--pairs", f.pairs, "pro convolution pairs K")->capture_default_str();
    c->add_option("--norm", f.norm, "batch or instance")->capture_default_str();
    c->add_flag("--share-weights", f.share, "one regularizer shared by all layers");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse SAR imaging: CSA operators, ADMM and the unfolded network"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--radar", g.radar, "radar parameter file (key = value)");
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--grid", g.grid, "image grid MxN");

    SimulateFlags sf;
    auto* sim = app.add_subcommand("simulate", "synthesize a scene and its echoes, or a dataset recipe");
    sim->add_option("--scene", sf.scene, "point or distributed")->capture_default_str();
    sim->add_option("--count", sf.count, "point targets per scene (default 10)");
    sim->add_option("--sparsity", sf.sparsity, "support fraction of distributed scenes")->capture_default_str();
    sim->add_option("--amp-lo", sf.amp_lo)->capture_default_str();
    sim->add_option("--amp-hi", sf.amp_hi)->capture_default_str();
    sim->add_option("--rate-az", sf.rate_az, "azimuth sampling rate")->capture_default_str();
    sim->add_option("--rate-rg", sf.rate_rg, "range sampling rate")->capture_default_str();
    sim->add_option("--snr", sf.snr, "echo SNR in dB (noise-free when absent)");
    sim->add_flag("--dataset", sf.dataset, "write a dataset manifest instead of one scene");
    sim->add_option("--n-point", sf.n_point)->capture_default_str();
    sim->add_option("--n-sparse", sf.n_sparse)->capture_default_str();
    sim->add_option("--n-dense", sf.n_dense)->capture_default_str();

    ReconstructFlags rf;
    auto* rec = app.add_subcommand("reconstruct", "image a downsampled echo");
    rec->add_option("--in", rf.in, "directory written by simulate")->required();
    rec->add_option("--method", rf.method, "csa, l1, tv, net-swift or net-pro")->capture_default_str();
    rec->add_option("--lambda", rf.lambda)->capture_default_str();
    rec->add_option("--iters", rf.iters)->capture_default_str();
    rec->add_option("--tol", rf.tol)->capture_default_str();
    rec->add_option("--rho", rf.rho, "normalized penalty rho_n")->capture_default_str();
    rec->add_option("--tv-inner", rf.tv_inner)->capture_default_str();
    rec->add_option("--checkpoint", rf.checkpoint, "ARSW file for net methods");
    rec->add_option("--truth", rf.truth, "ground truth (default <in>/scene.arsn)");
    rec->add_option("--name", rf.name, "row name in metrics.csv (default: method)");
    rec->add_flag("--dump-residuals", rf.dump_residuals);
    rec->add_option("--time", rf.time_reps, "timing repetitions (>= 5)");

    TrainFlags tf;
    auto* trn = app.add_subcommand("train", "train the unfolded network on a dataset recipe");
    trn->add_option("--dataset", tf.dataset, "dataset.manifest from simulate --dataset")->required();
    add_net_flags(trn, tf.net);
    trn->add_option("--epochs", tf.epochs, "epochs (default: enough for --steps)");
    trn->add_option("--steps", tf.steps, "stop after this many steps");
    trn->add_option("--lr", tf.lr)->capture_default_str();
    trn->add_option("--batch", tf.batch)->capture_default_str();

    GradcheckFlags gf;
    gf.net.layers = 2;
    auto* gc = app.add_subcommand("gradcheck", "compare backward against finite differences");
    add_net_flags(gc, gf.net);
    gc->add_option("--samples", gf.samples)->capture_default_str();
    gc->add_option("--rate-az", gf.rate_az)->capture_default_str();
    gc->add_option("--step", gf.step)->capture_default_str();
    gc->add_option("--tol", gf.tol)->capture_default_str();
#ifdef ARSAR_FAULT_INJECTION
    gc->add_flag("--inject-sign-flip", gf.inject, "negate the analytic gradient");
#endif

    EvalFlags ef;
    auto* ev = app.add_subcommand("eval", "metrics for reconstruction / ground-truth pairs");
    ev->add_option("--pair", ef.pairs, "NAME=RECON,TRUTH (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(g, sf, out);
        if (rec->parsed()) return cmd_reconstruct(g, rf, out, err);
        if (trn->parsed()) return cmd_train(g, tf, out, err);
        if (gc->parsed()) return cmd_gradcheck(g, gf, out, err);
        if (ev->parsed()) return cmd_eval(g, ef, out);
    } catch (const UsageFailure& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const MissingCheckpoint& e) {
        err << "error: " << e.what() << '\n';
        return kMissingCheckpoint;
    } catch (const ShapeError& e) {
        err << "shape mismatch: " << e.what() << '\n';
        return kShapeMismatch;
    } catch (const net::TrainingDiverged& e) {
        err << "diverged at step " << e.step() << ": " << e.what() << '\n';
        return kDiverged;
    } catch (const InvalidArgument& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParameterError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace arsar::cli
