#include "arsar/sar_params.hpp"

#include <cmath>
#include <fstream>

#include "arsar/error.hpp"
#include "arsar/manifest.hpp"

namespace arsar {

void SarSystemParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0)) {
            throw ParameterError(std::string(name) + " must be finite and > 0, got " + format_double(v));
        }
    };
    positive(bandwidth, "bandwidth");
    positive(pulse_width, "pulse_width");
    positive(prf, "prf");
    positive(carrier_freq, "carrier_freq");
    positive(slant_range_ref, "slant_range_ref");
    positive(velocity, "velocity");
    positive(range_sample_rate, "range_sample_rate");
    if (rows == 0 || cols == 0) throw ParameterError("grid must be at least 1x1");
    if (range_sample_rate < bandwidth) {
        throw ParameterError("range_sample_rate below bandwidth (range Nyquist violated)");
    }
    const double kr = chirp_rate();
    if (!(std::isfinite(kr) && kr > 0.0)) throw ParameterError("chirp rate is not finite and positive");
    // Migration factor must stay real and positive up to the folding frequency.
    if (!(kSpeedOfLight * (prf / 2.0) < 2.0 * velocity * carrier_freq)) {
        throw ParameterError("PRF too high for velocity/carrier: migration factor leaves (0, 1]");
    }
}

SarSystemParams default_params(std::size_t rows, std::size_t cols) {
    SarSystemParams p;
    p.rows = rows;
    p.cols = cols;
    return p;
}

SarSystemParams parse_params(std::istream& in, SarSystemParams base) {
    const auto kv = KeyValueFile::parse(in);
    for (const auto& [key, value] : kv.entries()) {
        static const char* known[] = {"bandwidth", "pulse_width",     "prf",      "carrier_freq", "slant_range_ref",
                                      "velocity",  "range_sample_rate", "rows",   "cols"};
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw InvalidArgument("radar config: unknown key '" + key + "'");
    }
    SarSystemParams p = base;
    p.bandwidth = kv.get_double("bandwidth", base.bandwidth);
    p.pulse_width = kv.get_double("pulse_width", base.pulse_width);
    p.prf = kv.get_double("prf", base.prf);
    p.carrier_freq = kv.get_double("carrier_freq", base.carrier_freq);
    p.slant_range_ref = kv.get_double("slant_range_ref", base.slant_range_ref);
    p.velocity = kv.get_double("velocity", base.velocity);
    p.range_sample_rate = kv.get_double("range_sample_rate", 1.1 * p.bandwidth);
    p.rows = kv.get_u64("rows", base.rows);
    p.cols = kv.get_u64("cols", base.cols);
    p.validate();
    return p;
}

SarSystemParams load_params(const std::string& path, SarSystemParams base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open radar config " + path);
    return parse_params(in, base);
}

void save_params(const std::string& path, const SarSystemParams& p) {
    KeyValueFile kv;
    kv.set("bandwidth", p.bandwidth);
    kv.set("pulse_width", p.pulse_width);
    kv.set("prf", p.prf);
    kv.set("carrier_freq", p.carrier_freq);
    kv.set("slant_range_ref", p.slant_range_ref);
    kv.set("velocity", p.velocity);
    kv.set("range_sample_rate", p.range_sample_rate);
    kv.set("rows", static_cast<std::uint64_t>(p.rows));
    kv.set("cols", static_cast<std::uint64_t>(p.cols));
    kv.save(path, "radar parameters");
}

}  // namespace arsar
