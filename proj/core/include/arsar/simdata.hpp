#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arsar/complex_image.hpp"
#include "arsar/csa.hpp"
#include "arsar/manifest.hpp"
#include "arsar/rng.hpp"
#include "arsar/sampling.hpp"

namespace arsar {

enum class SceneKind { point_targets, distributed, from_file };

const char* to_string(SceneKind k);

struct Scene {
    ComplexImage image;
    SceneKind kind = SceneKind::point_targets;
    KeyValueFile metadata;  // generator seed and parameters
};

struct Sample {
    Scene scene;
    ComplexImage echo_full;
    ComplexImage echo_down;
    SamplingScheme scheme_azimuth;
    SamplingScheme scheme_range;
    std::optional<double> noise_snr_db;
};

/// `count` distinct pixels with magnitude uniform in [amp_lo, amp_hi] and
/// uniform phase. Requires 1 <= count <= rows*cols/4.
Scene gen_point_targets(std::size_t rows, std::size_t cols, std::size_t count, double amp_lo, double amp_hi,
                        const Rng& rng);

/// Smoothed random texture keeping the top `sparsity` fraction of pixels,
/// with a random phase per pixel. Zero support is rejected.
Scene gen_distributed(std::size_t rows, std::size_t cols, double sparsity, const Rng& rng);

/// echo_full = H(X) (+ circular white noise at exactly snr_db), echo_down =
/// both schemes of `ctx` applied to echo_full.
Sample synthesize(const OperatorContext& ctx, const Scene& scene, std::optional<double> snr_db, const Rng& rng);

// ARSN: "ARSN" | u16 version=1 | u8 dtype=0 | u8 reserved | u32 rows |
// u32 cols | rows*cols (re, im) little-endian float64, row-major.
void save_arsn(const std::string& path, const ComplexImage& a);
ComplexImage load_arsn(const std::string& path);
std::vector<unsigned char> encode_arsn(const ComplexImage& a);
ComplexImage decode_arsn(const std::vector<unsigned char>& bytes);

/// 8-bit grayscale PNG of 20 log10(|a| / peak) clipped at db_floor (< 0).
void export_magnitude_png(const std::string& path, const ComplexImage& a, double db_floor);

/// The 8-bit pixels export_magnitude_png would write.
std::vector<unsigned char> magnitude_to_u8(const ComplexImage& a, double db_floor);

// Scheme files are key-value text with the kept indices space-separated.
void save_scheme(const std::string& path, const SamplingScheme& s);
SamplingScheme load_scheme(const std::string& path);

/// Reproducible dataset recipe. Scene kinds follow a 2:1:1 split:
/// point targets, sparse distributed, dense distributed.
struct DatasetSpec {
    std::size_t rows = 16;
    std::size_t cols = 16;
    double rate_azimuth = 0.5;
    double rate_range = 1.0;
    std::optional<double> snr_db;
    std::uint64_t seed = 1;
    std::size_t n_point = 16;
    std::size_t n_distributed_sparse = 8;
    std::size_t n_distributed_dense = 8;
    std::size_t point_count = 4;
    double amp_lo = 0.5;
    double amp_hi = 1.0;
    double sparse_fraction = 0.1;
    double dense_fraction = 0.4;

    std::size_t size() const { return n_point + n_distributed_sparse + n_distributed_dense; }

    KeyValueFile to_manifest() const;
    static DatasetSpec from_manifest(const KeyValueFile& kv);
};

/// The shared sampling schemes of a dataset (one pair for every sample).
OperatorContext dataset_context(const DatasetSpec& spec, const SarSystemParams& radar);

/// Regenerates every sample of the recipe; identical output for identical spec.
std::vector<Sample> make_dataset(const DatasetSpec& spec, const OperatorContext& ctx);

}  // namespace arsar
