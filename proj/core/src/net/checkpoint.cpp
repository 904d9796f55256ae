#include "arsar/net/checkpoint.hpp"

#include <bit>
#include <cmath>

#include "../bytes.hpp"
#include "arsar/error.hpp"

namespace arsar::net {

using namespace arsar::detail;

namespace {

constexpr std::size_t kHeader = 48;

std::uint32_t narrow(std::size_t v, const char* what) {
    if (v > 0xffffffffu) throw InvalidArgument(std::string("checkpoint: ") + what + " too large");
    return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<unsigned char> encode_checkpoint(const NetParams& p) {
    if (p.values.size() != p.plan.num_params || p.buffers.size() != p.plan.num_buffers) {
        throw ShapeError("checkpoint: parameters do not match their plan");
    }
    const NetConfig& c = p.config;
    std::vector<unsigned char> b;
    b.reserve(kHeader + 16 + 8 * (p.values.size() + p.buffers.size()));
    put_tag(b, "ARSW");
    put_u16(b, kArswVersion);
    put_u8(b, c.variant == Variant::swift ? 0 : 1);
    put_u8(b, c.norm == NormMode::batch ? 0 : 1);
    put_u32(b, narrow(c.num_layers, "num_layers"));
    put_u32(b, narrow(c.base_channels, "base_channels"));
    put_u32(b, narrow(c.pyramid_levels, "pyramid_levels"));
    put_u32(b, narrow(c.pair_count, "pair_count"));
    put_u32(b, narrow(c.height, "height"));
    put_u32(b, narrow(c.width, "width"));
    put_u8(b, c.share_weights ? 1 : 0);
    put_u8(b, 0);
    put_u16(b, 0);
    put_u32(b, 0);
    put_u64(b, c.seed);
    put_u64(b, p.values.size());
    for (double v : p.values) put_f64(b, v);
    put_u64(b, p.buffers.size());
    for (double v : p.buffers) put_f64(b, v);
    return b;
}

NetParams decode_checkpoint(const std::vector<unsigned char>& b) {
    if (b.size() < 4) throw FormatError("ARSW: truncated magic", b.size());
    if (b[0] != 'A' || b[1] != 'R' || b[2] != 'S' || b[3] != 'W') throw FormatError("ARSW: bad magic", 0);
    if (b.size() < kHeader) throw FormatError("ARSW: truncated header", b.size());
    if (get_le(b, 4, 2) != kArswVersion) throw FormatError("ARSW: unsupported version", 4);
    if (b[6] > 1) throw FormatError("ARSW: unknown variant tag", 6);
    if (b[7] > 1) throw FormatError("ARSW: unknown normalization tag", 7);
    if (b[32] > 1) throw FormatError("ARSW: bad share flag", 32);

    NetConfig c;
    c.variant = b[6] == 0 ? Variant::swift : Variant::pro;
    c.norm = b[7] == 0 ? NormMode::batch : NormMode::instance;
    c.num_layers = get_le(b, 8, 4);
    c.base_channels = get_le(b, 12, 4);
    c.pyramid_levels = get_le(b, 16, 4);
    c.pair_count = get_le(b, 20, 4);
    c.height = get_le(b, 24, 4);
    c.width = get_le(b, 28, 4);
    c.share_weights = b[32] == 1;
    c.seed = get_le(b, 40, 8);

    NetParams p;
    p.config = c;
    try {
        p.plan = make_plan(c);
    } catch (const Error& e) {
        throw FormatError(std::string("ARSW: invalid config block: ") + e.what(), 8);
    }

    std::size_t off = kHeader;
    auto read_block = [&](std::vector<double>& dst, std::size_t expected, const char* what) {
        if (b.size() < off + 8) throw FormatError(std::string("ARSW: truncated ") + what + " count", b.size());
        const std::uint64_t n = get_le(b, off, 8);
        if (n != expected) {
            throw ShapeError(std::string("ARSW: ") + what + " count " + std::to_string(n) +
                             " does not match the config plan (" + std::to_string(expected) + ")");
        }
        off += 8;
        if ((b.size() - off) / 8 < n) throw FormatError(std::string("ARSW: truncated ") + what, b.size());
        dst.resize(n);
        for (std::size_t i = 0; i < n; ++i, off += 8) dst[i] = std::bit_cast<double>(get_le(b, off, 8));
    };
    read_block(p.values, p.plan.num_params, "parameter");
    read_block(p.buffers, p.plan.num_buffers, "buffer");
    if (off != b.size()) throw FormatError("ARSW: trailing bytes", off);
    if (!p.all_finite()) throw FormatError("ARSW: non-finite parameter", kHeader + 8);
    return p;
}

void save_checkpoint(const std::string& path, const NetParams& p) { write_all(path, encode_checkpoint(p)); }

NetParams load_checkpoint(const std::string& path) { return decode_checkpoint(read_all(path)); }

}  // namespace arsar::net
