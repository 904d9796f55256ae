#include "arsar/simdata.hpp"

#include "bytes.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "arsar/error.hpp"

namespace arsar {

using namespace detail;

const char* to_string(SceneKind k) {
    switch (k) {
        case SceneKind::point_targets: return "point";
        case SceneKind::distributed: return "distributed";
        case SceneKind::from_file: return "file";
    }
    return "?";
}

Scene gen_point_targets(std::size_t rows, std::size_t cols, std::size_t count, double amp_lo, double amp_hi,
                        const Rng& rng) {
    if (count == 0) throw InvalidArgument("gen_point_targets: count must be >= 1");
    if (count > rows * cols / 4) {
        throw InvalidArgument("gen_point_targets: " + std::to_string(count) + " targets overcrowd a " +
                              std::to_string(rows) + "x" + std::to_string(cols) + " grid");
    }
    if (!(amp_lo > 0.0 && amp_hi >= amp_lo)) throw InvalidArgument("gen_point_targets: bad amplitude range");

    Rng local = rng;
    Rng pos_rng = local.split(1);
    const auto positions = sample_without_replacement(rows * cols, count, pos_rng);
    Rng amp = local.split(2);
    Scene s;
    s.image = ComplexImage(rows, cols);
    for (std::size_t k = 0; k < count; ++k) {
        const auto idx = positions[k];
        const double mag = amp.uniform(amp_lo, amp_hi);
        const double phase = amp.uniform(-std::numbers::pi, std::numbers::pi);
        s.image.data()[idx] = std::polar(mag, phase);
    }
    s.kind = SceneKind::point_targets;
    s.metadata.set("kind", "point");
    s.metadata.set("seed", rng.seed());
    s.metadata.set("count", static_cast<std::uint64_t>(count));
    s.metadata.set("amp_lo", amp_lo);
    s.metadata.set("amp_hi", amp_hi);
    return s;
}

Scene gen_distributed(std::size_t rows, std::size_t cols, double sparsity, const Rng& rng) {
    if (!(sparsity >= 0.0 && sparsity <= 1.0)) throw InvalidArgument("gen_distributed: sparsity must be in [0, 1]");
    const std::size_t n = rows * cols;
    const auto keep = static_cast<std::size_t>(std::llround(sparsity * static_cast<double>(n)));
    if (keep == 0) throw InvalidArgument("gen_distributed: empty support gives a zero-norm scene");

    Rng local = rng;
    Rng noise = local.split(1);
    std::vector<double> tex(n);
    for (auto& v : tex) v = noise.normal();

    // Three passes of a radius-2 periodic box blur approximate a Gaussian.
    std::vector<double> tmp(n);
    const long r = 2;
    for (int pass = 0; pass < 3; ++pass) {
        for (std::size_t y = 0; y < rows; ++y) {
            for (std::size_t x = 0; x < cols; ++x) {
                double acc = 0.0;
                for (long d = -r; d <= r; ++d) {
                    const auto xx = static_cast<std::size_t>((static_cast<long>(x + cols) + d) % static_cast<long>(cols));
                    acc += tex[y * cols + xx];
                }
                tmp[y * cols + x] = acc / (2 * r + 1);
            }
        }
        for (std::size_t y = 0; y < rows; ++y) {
            for (std::size_t x = 0; x < cols; ++x) {
                double acc = 0.0;
                for (long d = -r; d <= r; ++d) {
                    const auto yy = static_cast<std::size_t>((static_cast<long>(y + rows) + d) % static_cast<long>(rows));
                    acc += tmp[yy * cols + x];
                }
                tex[y * cols + x] = acc / (2 * r + 1);
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return tex[a] > tex[b]; });

    const double hi = tex[order.front()];
    const double lo = tex[order[keep - 1]];
    const double span = hi > lo ? hi - lo : 1.0;

    Rng phase = local.split(2);
    Scene s;
    s.image = ComplexImage(rows, cols);
    for (std::size_t k = 0; k < keep; ++k) {
        const auto idx = order[k];
        const double mag = 0.2 + 0.8 * (tex[idx] - lo) / span;
        s.image.data()[idx] = std::polar(mag, phase.uniform(-std::numbers::pi, std::numbers::pi));
    }
    s.kind = SceneKind::distributed;
    s.metadata.set("kind", "distributed");
    s.metadata.set("seed", rng.seed());
    s.metadata.set("sparsity", sparsity);
    return s;
}

Sample synthesize(const OperatorContext& ctx, const Scene& scene, std::optional<double> snr_db, const Rng& rng) {
    if (scene.image.rows() != ctx.rows() || scene.image.cols() != ctx.cols()) {
        throw ShapeError("synthesize: scene does not match the operator grid");
    }
    Sample s;
    s.scene = scene;
    s.echo_full = observation_H(ctx.plan(), scene.image);
    if (snr_db) {
        Rng local = rng;
        ComplexImage noise(ctx.rows(), ctx.cols());
        for (auto& v : noise.data()) v = local.complex_normal();
        const double signal = squared_norm(s.echo_full);
        const double target = signal / std::pow(10.0, *snr_db / 10.0);
        noise *= std::sqrt(target / squared_norm(noise));
        s.echo_full += noise;
    }
    s.echo_down = s.echo_full;
    if (!ctx.s_range().is_identity()) s.echo_down = apply_sampling(ctx.s_range(), s.echo_down);
    if (!ctx.s_azimuth().is_identity()) s.echo_down = apply_sampling(ctx.s_azimuth(), s.echo_down);
    s.scheme_azimuth = ctx.s_azimuth();
    s.scheme_range = ctx.s_range();
    s.noise_snr_db = snr_db;
    return s;
}

namespace {

constexpr std::size_t kArsnHeader = 16;

}  // namespace

std::vector<unsigned char> encode_arsn(const ComplexImage& a) {
    if (a.rows() == 0 || a.cols() == 0) throw InvalidArgument("save_arsn: empty image");
    if (a.rows() > 0xffffffffu || a.cols() > 0xffffffffu) throw InvalidArgument("save_arsn: image too large");
    std::vector<unsigned char> b;
    b.reserve(kArsnHeader + a.size() * 16);
    put_tag(b, "ARSN");
    put_u16(b, 1);
    b.push_back(0);
    b.push_back(0);
    put_u32(b, static_cast<std::uint32_t>(a.rows()));
    put_u32(b, static_cast<std::uint32_t>(a.cols()));
    for (const auto& v : a.data()) {
        put_f64(b, v.real());
        put_f64(b, v.imag());
    }
    return b;
}

ComplexImage decode_arsn(const std::vector<unsigned char>& b) {
    if (b.size() < 4) throw FormatError("ARSN: truncated magic", b.size());
    if (std::memcmp(b.data(), "ARSN", 4) != 0) throw FormatError("ARSN: bad magic", 0);
    if (b.size() < kArsnHeader) throw FormatError("ARSN: truncated header", b.size());
    const auto version = get_le(b, 4, 2);
    if (version != 1) throw FormatError("ARSN: unsupported version " + std::to_string(version), 4);
    if (b[6] != 0) throw FormatError("ARSN: unsupported dtype " + std::to_string(b[6]), 6);
    const auto rows = get_le(b, 8, 4);
    const auto cols = get_le(b, 12, 4);
    if (rows == 0 || cols == 0) throw FormatError("ARSN: empty image", 8);
    const auto need = kArsnHeader + rows * cols * 16;
    if (b.size() < need) throw FormatError("ARSN: truncated payload, expected " + std::to_string(need) + " bytes", b.size());
    if (b.size() > need) throw FormatError("ARSN: trailing bytes", need);
    ComplexImage a(rows, cols);
    std::size_t off = kArsnHeader;
    for (auto& v : a.data()) {
        const double re = std::bit_cast<double>(get_le(b, off, 8));
        const double im = std::bit_cast<double>(get_le(b, off + 8, 8));
        v = {re, im};
        off += 16;
    }
    return a;
}

void save_arsn(const std::string& path, const ComplexImage& a) { write_all(path, encode_arsn(a)); }

ComplexImage load_arsn(const std::string& path) { return decode_arsn(read_all(path)); }

std::vector<unsigned char> magnitude_to_u8(const ComplexImage& a, double db_floor) {
    if (!(db_floor < 0.0)) throw InvalidArgument("export_magnitude_png: db_floor must be < 0");
    std::vector<unsigned char> px(a.size(), 0);
    double peak = 0.0;
    for (const auto& v : a.data()) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return px;
    const auto d = a.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double mag = std::abs(d[i]);
        double db = mag > 0.0 ? 20.0 * std::log10(mag / peak) : db_floor;
        db = std::clamp(db, db_floor, 0.0);
        px[i] = static_cast<unsigned char>(std::lround(255.0 * (db - db_floor) / -db_floor));
    }
    return px;
}

void export_magnitude_png(const std::string& path, const ComplexImage& a, double db_floor) {
    const auto px = magnitude_to_u8(a, db_floor);
    png_image img;
    std::memset(&img, 0, sizeof(img));
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(a.cols());
    img.height = static_cast<png_uint_32>(a.rows());
    img.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&img, path.c_str(), 0, px.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw IoError("PNG write failed for " + path + ": " + msg);
    }
}

void save_scheme(const std::string& path, const SamplingScheme& s) {
    KeyValueFile kv;
    kv.set("axis", to_string(s.axis));
    kv.set("full_size", static_cast<std::uint64_t>(s.full_size));
    kv.set("rate", s.rate);
    kv.set("seed", s.seed);
    std::ostringstream idx;
    for (std::size_t i = 0; i < s.kept_indices.size(); ++i) idx << (i ? " " : "") << s.kept_indices[i];
    kv.set("indices", idx.str());
    kv.save(path, "sampling scheme");
}

SamplingScheme load_scheme(const std::string& path) {
    const auto kv = KeyValueFile::load(path);
    SamplingScheme s;
    const auto axis = kv.get_string("axis");
    if (axis == "range") s.axis = Axis::range;
    else if (axis == "azimuth") s.axis = Axis::azimuth;
    else throw InvalidArgument("scheme " + path + ": unknown axis '" + axis + "'");
    s.full_size = kv.get_u64("full_size");
    s.rate = kv.get_double("rate");
    s.seed = kv.get_u64("seed");
    std::istringstream idx(kv.get_string("indices"));
    std::size_t v = 0;
    while (idx >> v) {
        if (v >= s.full_size || (!s.kept_indices.empty() && v <= s.kept_indices.back())) {
            throw InvalidArgument("scheme " + path + ": indices must be strictly increasing and < full_size");
        }
        s.kept_indices.push_back(v);
    }
    return s;
}

KeyValueFile DatasetSpec::to_manifest() const {
    KeyValueFile kv;
    kv.set("rows", static_cast<std::uint64_t>(rows));
    kv.set("cols", static_cast<std::uint64_t>(cols));
    kv.set("rate_azimuth", rate_azimuth);
    kv.set("rate_range", rate_range);
    if (snr_db) kv.set("snr_db", *snr_db);
    kv.set("seed", seed);
    kv.set("n_point", static_cast<std::uint64_t>(n_point));
    kv.set("n_distributed_sparse", static_cast<std::uint64_t>(n_distributed_sparse));
    kv.set("n_distributed_dense", static_cast<std::uint64_t>(n_distributed_dense));
    kv.set("point_count", static_cast<std::uint64_t>(point_count));
    kv.set("amp_lo", amp_lo);
    kv.set("amp_hi", amp_hi);
    kv.set("sparse_fraction", sparse_fraction);
    kv.set("dense_fraction", dense_fraction);
    return kv;
}

DatasetSpec DatasetSpec::from_manifest(const KeyValueFile& kv) {
    DatasetSpec d;
    d.rows = kv.get_u64("rows", d.rows);
    d.cols = kv.get_u64("cols", d.cols);
    d.rate_azimuth = kv.get_double("rate_azimuth", d.rate_azimuth);
    d.rate_range = kv.get_double("rate_range", d.rate_range);
    if (kv.contains("snr_db")) d.snr_db = kv.get_double("snr_db");
    d.seed = kv.get_u64("seed", d.seed);
    d.n_point = kv.get_u64("n_point", d.n_point);
    d.n_distributed_sparse = kv.get_u64("n_distributed_sparse", d.n_distributed_sparse);
    d.n_distributed_dense = kv.get_u64("n_distributed_dense", d.n_distributed_dense);
    d.point_count = kv.get_u64("point_count", d.point_count);
    d.amp_lo = kv.get_double("amp_lo", d.amp_lo);
    d.amp_hi = kv.get_double("amp_hi", d.amp_hi);
    d.sparse_fraction = kv.get_double("sparse_fraction", d.sparse_fraction);
    d.dense_fraction = kv.get_double("dense_fraction", d.dense_fraction);
    if (d.size() == 0) throw InvalidArgument("dataset manifest describes zero samples");
    return d;
}

OperatorContext dataset_context(const DatasetSpec& spec, const SarSystemParams& radar) {
    SarSystemParams p = radar;
    p.rows = spec.rows;
    p.cols = spec.cols;
    const Rng root(spec.seed);
    auto s_rg = spec.rate_range >= 1.0 ? identity_sampling(Axis::range, spec.rows)
                                       : make_sampling(Axis::range, spec.rows, spec.rate_range, root.split(101));
    auto s_az = spec.rate_azimuth >= 1.0
                    ? identity_sampling(Axis::azimuth, spec.cols)
                    : make_sampling(Axis::azimuth, spec.cols, spec.rate_azimuth, root.split(102));
    return OperatorContext(build_phase_plan(p), std::move(s_rg), std::move(s_az));
}

std::vector<Sample> make_dataset(const DatasetSpec& spec, const OperatorContext& ctx) {
    if (ctx.rows() != spec.rows || ctx.cols() != spec.cols) throw ShapeError("make_dataset: context grid mismatch");
    const Rng root(spec.seed);
    std::vector<Sample> out;
    out.reserve(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const Rng scene_rng = root.split(1000 + i);
        Scene scene;
        if (i < spec.n_point) {
            scene = gen_point_targets(spec.rows, spec.cols, spec.point_count, spec.amp_lo, spec.amp_hi, scene_rng);
        } else if (i < spec.n_point + spec.n_distributed_sparse) {
            scene = gen_distributed(spec.rows, spec.cols, spec.sparse_fraction, scene_rng);
        } else {
            scene = gen_distributed(spec.rows, spec.cols, spec.dense_fraction, scene_rng);
        }
        out.push_back(synthesize(ctx, scene, spec.snr_db, root.split(5000 + i)));
    }
    return out;
}

}  // namespace arsar
