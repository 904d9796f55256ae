#include "arsar/net/params.hpp"

#include <cmath>

#include "arsar/error.hpp"
#include "arsar/rng.hpp"

namespace arsar::net {

const char* to_string(Variant v) { return v == Variant::swift ? "swift" : "pro"; }

Variant parse_variant(const std::string& s) {
    if (s == "swift") return Variant::swift;
    if (s == "pro") return Variant::pro;
    throw InvalidArgument("unknown variant '" + s + "' (expected swift or pro)");
}

void NetConfig::validate() const {
    if (num_layers < 1) throw InvalidArgument("num_layers must be >= 1");
    if (base_channels < 2) throw InvalidArgument("base_channels must be >= 2");
    if (height < 1 || width < 1) throw InvalidArgument("image size must be positive");
    if (variant == Variant::swift) {
        if (pyramid_levels < 1) throw InvalidArgument("pyramid_levels must be >= 1");
        if (pyramid_levels > 16) throw InvalidArgument("pyramid_levels too large");
        const std::size_t f = std::size_t{1} << pyramid_levels;
        if (height % f != 0 || width % f != 0) {
            throw ShapeError("swift needs H and W divisible by " + std::to_string(f) + ", got " +
                             std::to_string(height) + "x" + std::to_string(width));
        }
        if (norm == NormMode::instance && (height / f) * (width / f) < 2) {
            throw ShapeError("instance normalization needs >= 2 pixels at the coarsest level");
        }
    } else {
        if (pair_count < 1) throw InvalidArgument("pair_count must be >= 1");
        if (pair_count > 16) throw InvalidArgument("pair_count too large");
    }
}

std::vector<ConvDecl> regularizer_layout(const NetConfig& cfg) {
    const std::size_t c0 = cfg.base_channels;
    std::vector<ConvDecl> out;
    out.push_back({"lift", 2, c0, 3, 1, false});
    if (cfg.variant == Variant::swift) {
        for (std::size_t l = 0; l < cfg.pyramid_levels; ++l) {
            const std::size_t c = c0 << l;
            out.push_back({"down" + std::to_string(l), c, c, 3, 2, true});
            out.push_back({"expand" + std::to_string(l), c, 2 * c, 1, 1, false});
        }
        for (std::size_t l = cfg.pyramid_levels; l-- > 0;) {
            const std::size_t c = c0 << l;
            out.push_back({"fuse" + std::to_string(l), 3 * c, c, 3, 1, false});
        }
    } else {
        for (std::size_t p = 0; p < cfg.pair_count; ++p) {
            const std::size_t c = c0 << p;
            out.push_back({"up" + std::to_string(p), c, 2 * c, 3, 1, false});
        }
        for (std::size_t p = cfg.pair_count; p-- > 0;) {
            const std::size_t c = c0 << p;
            out.push_back({"down" + std::to_string(p), 2 * c, c, 3, 1, false});
        }
    }
    out.push_back({"proj", c0, 2, 3, 1, false});
    return out;
}

ParamPlan make_plan(const NetConfig& cfg) {
    cfg.validate();
    ParamPlan plan;
    auto add = [&](const std::string& name, Shape s) {
        plan.tensors.push_back({name, s, plan.num_params});
        plan.num_params += s.numel();
    };
    const Shape scalar{1, 1, 1, 1};
    add("rho_t", scalar);
    add("mu_t", scalar);
    add("eta_t", scalar);

    const auto layout = regularizer_layout(cfg);
    plan.blocks = cfg.share_weights ? 1 : cfg.num_layers;
    for (std::size_t k = 0; k < plan.blocks; ++k) {
        const std::string prefix = cfg.share_weights ? "shared." : "layer" + std::to_string(k) + ".";
        for (const auto& d : layout) {
            add(prefix + d.name + ".weight", Shape{d.cout, d.cin, d.kernel, d.kernel});
            add(prefix + d.name + ".bias", Shape{1, d.cout, 1, 1});
            if (d.norm) {
                add(prefix + d.name + ".gamma", Shape{1, d.cout, 1, 1});
                add(prefix + d.name + ".beta", Shape{1, d.cout, 1, 1});
                plan.buffers.push_back({prefix + d.name + ".running", d.cout, plan.num_buffers});
                plan.num_buffers += 2 * d.cout;
            }
        }
    }
    plan.tensors_per_block = (plan.tensors.size() - 3) / plan.blocks;
    plan.buffers_per_block = plan.buffers.size() / plan.blocks;
    return plan;
}

const TensorSpec& NetParams::spec(const std::string& name) const {
    for (const auto& s : plan.tensors) {
        if (s.name == name) return s;
    }
    throw InvalidArgument("no parameter named '" + name + "'");
}

Tensor NetParams::tensor(const TensorSpec& s) const {
    Tensor t(s.shape);
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(s.offset), s.size(), t.data.begin());
    return t;
}

void NetParams::zero_regularizer() {
    for (std::size_t i = 3; i < values.size(); ++i) values[i] = 0.0;
}

bool NetParams::all_finite() const {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

namespace {

bool ends_with(const std::string& s, const std::string& tail) {
    return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

}  // namespace

NetParams init_params(const NetConfig& cfg, double lipschitz) {
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
        throw InvalidArgument("init_params: lipschitz estimate must be positive and finite");
    }
    NetParams p;
    p.config = cfg;
    p.plan = make_plan(cfg);
    p.values.assign(p.plan.num_params, 0.0);
    p.buffers.assign(p.plan.num_buffers, 0.0);
    p.rho_t() = 0.1;
    p.mu_t() = 2.0 / lipschitz;
    p.eta_t() = 1.0;

    const Rng root(cfg.seed);
    for (std::size_t i = 3; i < p.plan.tensors.size(); ++i) {
        const auto& s = p.plan.tensors[i];
        double* dst = p.values.data() + s.offset;
        if (ends_with(s.name, ".gamma")) {
            std::fill(dst, dst + s.size(), 1.0);
        } else if (ends_with(s.name, ".weight")) {
            // expand and proj feed no rectifier
            const bool linear = s.name.find(".expand") != std::string::npos || ends_with(s.name, ".proj.weight");
            const double fan_in = static_cast<double>(s.shape.c * s.shape.h * s.shape.w);
            double bound = std::sqrt((linear ? 3.0 : 6.0) / fan_in);
            // pro starts close to its identity skip
            if (cfg.variant == Variant::pro && ends_with(s.name, ".proj.weight")) bound *= kProProjectionScale;
            Rng rng = root.split(i);
            for (std::size_t j = 0; j < s.size(); ++j) dst[j] = rng.uniform(-bound, bound);
        }
    }
    for (const auto& b : p.plan.buffers) {
        std::fill_n(p.buffers.begin() + static_cast<std::ptrdiff_t>(b.offset + b.channels), b.channels, 1.0);
    }
    return p;
}

}  // namespace arsar::net
