// Library HDL modules: their port shapes (used when building the graph),
// their pipeline latencies, and their cycle-accurate simulation behavior.
#include "spdc/builtins.hpp"

#include <array>
#include <cstdlib>

#include "spdc/stream.hpp"
#include "spdc/stream_sim.hpp"

namespace spdc {

namespace {

const HdlParam* find_hdl_param(const HdlCall& call, std::string_view name) {
    for (const auto& p : call.params)
        if (p.name == name) return &p;
    return nullptr;
}

int parse_param_value(const HdlParam& p) {
    const std::string& v = p.value;
    size_t tick = v.find('\'');
    if (tick == std::string::npos) {
        char* end = nullptr;
        long n = std::strtol(v.c_str(), &end, 10);
        if (end == v.c_str() || *end != '\0')
            fail(Errc::BadNumber, p.loc,
                 "parameter ." + p.name + "(" + v + ") is not an integer");
        return static_cast<int>(n);
    }
    // Sized literal: <width>'<base><digits>
    if (tick + 2 > v.size())
        fail(Errc::BadNumber, p.loc, "malformed sized literal '" + v + "'");
    int base = 10;
    switch (v[tick + 1]) {
        case 'b': case 'B': base = 2; break;
        case 'o': case 'O': base = 8; break;
        case 'd': case 'D': base = 10; break;
        case 'h': case 'H': base = 16; break;
        default:
            fail(Errc::BadNumber, p.loc,
                 "unknown base in sized literal '" + v + "'");
    }
    char* end = nullptr;
    long n = std::strtol(v.c_str() + tick + 2, &end, base);
    if (end == v.c_str() + tick + 2 || *end != '\0')
        fail(Errc::BadNumber, p.loc, "malformed sized literal '" + v + "'");
    return static_cast<int>(n);
}

void check_arity(const HdlCall& call, size_t n_in, size_t n_out) {
    if (call.inputs.size() != n_in)
        fail(Errc::SizeMismatch, call.loc,
             call.module + " takes " + std::to_string(n_in) +
                 " inputs, got " + std::to_string(call.inputs.size()));
    if (call.outputs.size() != n_out)
        fail(Errc::SizeMismatch, call.loc,
             call.module + " produces " + std::to_string(n_out) +
                 " outputs, got " + std::to_string(call.outputs.size()));
}

}  // namespace

int hdl_param_int(const HdlCall& call, std::string_view name,
                  std::optional<int> fallback) {
    const HdlParam* p = find_hdl_param(call, name);
    if (!p) {
        if (fallback) return *fallback;
        fail(Errc::ParamMissing, call.loc,
             call.module + " requires parameter ." + std::string(name));
    }
    return parse_param_value(*p);
}

bool is_builtin_module(std::string_view module) {
    return module == "mDelay" || module == "mMux" || module == "less_than" ||
           module == "swap" || module == "mTrans";
}

std::optional<BuiltinShape> builtin_shape(const HdlCall& call) {
    const std::string& m = call.module;
    if (!is_builtin_module(m)) return std::nullopt;
    BuiltinShape s;
    if (m == "mDelay") {
        check_arity(call, 1, 1);
        int w = hdl_param_int(call, "pWidth", 32);
        s = {m, {w}, {w}};
    } else if (m == "mMux") {
        check_arity(call, 3, 1);
        int w = hdl_param_int(call, "pWidth", 32);
        s = {m, {w, w, 1}, {w}};
    } else if (m == "less_than") {
        check_arity(call, 2, 1);
        s = {m, {32, 32}, {1}};
    } else if (m == "swap") {
        check_arity(call, 3, 2);
        s = {m, {1, 32, 32}, {32, 32}};
    } else {  // mTrans: 9 planes + attribute word + valid/sop/eop through
        check_arity(call, 13, 13);
        std::vector<int> w(13, 32);
        w[10] = w[11] = w[12] = 1;
        s = {m, w, w};
    }
    return s;
}

int builtin_latency(const HdlCall& call) {
    const std::string& m = call.module;
    if (m == "mDelay") return hdl_param_int(call, "pDelay", std::nullopt);
    if (m == "mMux") return 1;
    if (m == "less_than") return 1;
    if (m == "swap") return 0;
    if (m == "mTrans") return hdl_param_int(call, "pUnitLength", std::nullopt) + 2;
    fail(Errc::MissingPlugin, call.loc,
         "no built-in behavior for module '" + m + "'");
}

// --------------------------------------------------------------------------
// Simulation behaviors.

namespace {

uint32_t width_mask(int width) {
    return width >= 32 ? ~0u : ((1u << width) - 1u);
}

// Fixed-length word delay (identity function, .pDelay stages).
class DelayPlugin final : public HdlPlugin {
public:
    explicit DelayPlugin(const HdlCall& call)
        : lat_(hdl_param_int(call, "pDelay", std::nullopt)),
          mask_(width_mask(hdl_param_int(call, "pWidth", 32))),
          buf_(static_cast<size_t>(lat_ > 0 ? lat_ : 1), 0u) {
        if (lat_ < 0)
            fail(Errc::BadNumber, call.loc, "mDelay .pDelay must be >= 0");
    }
    int latency() const override { return lat_; }
    void peek(const std::vector<uint32_t>& in,
              std::vector<uint32_t>& out) override {
        out[0] = lat_ > 0 ? buf_[pos_] : (in[0] & mask_);
    }
    void advance(const std::vector<uint32_t>& in) override {
        if (lat_ == 0) return;
        buf_[pos_] = in[0] & mask_;
        pos_ = (pos_ + 1) % buf_.size();
    }

private:
    int lat_;
    uint32_t mask_;
    std::vector<uint32_t> buf_;
    size_t pos_ = 0;
};

// Registered two-way multiplexer: out <= sel ? b : a.
class MuxPlugin final : public HdlPlugin {
public:
    explicit MuxPlugin(const HdlCall& call)
        : mask_(width_mask(hdl_param_int(call, "pWidth", 32))) {}
    int latency() const override { return 1; }
    void peek(const std::vector<uint32_t>&,
              std::vector<uint32_t>& out) override {
        out[0] = reg_;
    }
    void advance(const std::vector<uint32_t>& in) override {
        reg_ = ((in[2] & 1u) ? in[1] : in[0]) & mask_;
    }

private:
    uint32_t mask_;
    uint32_t reg_ = 0;
};

// Registered float comparison: out <= (a < b). Any NaN compares false.
class LessThanPlugin final : public HdlPlugin {
public:
    explicit LessThanPlugin(const HdlCall&) {}
    int latency() const override { return 1; }
    void peek(const std::vector<uint32_t>&,
              std::vector<uint32_t>& out) override {
        out[0] = reg_;
    }
    void advance(const std::vector<uint32_t>& in) override {
        reg_ = word_to_float(in[0]) < word_to_float(in[1]) ? 1u : 0u;
    }

private:
    uint32_t reg_ = 0;
};

// Combinational conditional exchange:
// (big, small) = less ? (y, x) : (x, y).
class SwapPlugin final : public HdlPlugin {
public:
    explicit SwapPlugin(const HdlCall&) {}
    int latency() const override { return 0; }
    void peek(const std::vector<uint32_t>& in,
              std::vector<uint32_t>& out) override {
        bool less = (in[0] & 1u) != 0;
        out[0] = less ? in[2] : in[1];
        out[1] = less ? in[1] : in[2];
    }
    void advance(const std::vector<uint32_t>&) override {}

private:
};

// Stream translation for a 2-D unit of width W (.pUnitLength): thirteen
// parallel delay lines over the flattened cell stream. The common path
// (attribute word, valid/sop/eop, and the rest plane f0) is W + 2 stages
// deep; plane k leads or trails it by its displacement d_k = c_x + W*c_y,
// so cell j of plane k leaves carrying the word that entered at cell
// j - d_k. The datapath is qualified by the valid bit: cycles without a
// live cell write blank slots, so taps that reach past either end of a
// frame read zero.
class TransPlugin final : public HdlPlugin {
public:
    explicit TransPlugin(const HdlCall& call)
        : w_(hdl_param_int(call, "pUnitLength", std::nullopt)),
          depth_(w_ + 2),
          hist_len_(static_cast<size_t>(2 * w_ + 4)) {
        if (w_ < 2)
            fail(Errc::BadNumber, call.loc,
                 "mTrans .pUnitLength must be at least 2");
        const int w = w_;
        const std::array<int, 13> disp = {0,  1,     w,     -1,    -w,
                                          w + 1, w - 1, -w - 1, -w + 1,
                                          0,  0,     0,     0};
        for (size_t s = 0; s < 13; ++s) {
            taps_[s] = depth_ + disp[s];
            hist_[s].assign(hist_len_, 0u);
        }
    }
    int latency() const override { return depth_; }
    void peek(const std::vector<uint32_t>&,
              std::vector<uint32_t>& out) override {
        for (size_t s = 0; s < 13; ++s) {
            int64_t at = t_ - taps_[s];
            out[s] = at >= 0
                         ? hist_[s][static_cast<size_t>(at) % hist_len_]
                         : 0u;
        }
    }
    void advance(const std::vector<uint32_t>& in) override {
        size_t slot = static_cast<size_t>(t_) % hist_len_;
        const bool live = (in[10] & 1u) != 0;
        for (size_t s = 0; s < 13; ++s) {
            uint32_t v = in[s];
            if (s >= 10)
                v &= 1u;  // valid/sop/eop are single bits
            else if (!live)
                v = 0u;  // idle cycles leave blank slots behind
            hist_[s][slot] = v;
        }
        ++t_;
    }

private:
    int w_;
    int depth_;
    size_t hist_len_;
    std::array<int, 13> taps_{};
    std::array<std::vector<uint32_t>, 13> hist_;
    int64_t t_ = 0;
};

}  // namespace

PluginRegistry builtin_plugins() {
    PluginRegistry reg;
    reg.add("mDelay", [](const HdlCall& c) {
        return std::make_unique<DelayPlugin>(c);
    });
    reg.add("mMux", [](const HdlCall& c) {
        return std::make_unique<MuxPlugin>(c);
    });
    reg.add("less_than", [](const HdlCall& c) {
        return std::make_unique<LessThanPlugin>(c);
    });
    reg.add("swap", [](const HdlCall& c) {
        return std::make_unique<SwapPlugin>(c);
    });
    reg.add("mTrans", [](const HdlCall& c) {
        return std::make_unique<TransPlugin>(c);
    });
    return reg;
}

}  // namespace spdc
