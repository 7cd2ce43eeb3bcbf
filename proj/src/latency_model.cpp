#include "spdc/latency_model.hpp"

#include <fstream>

#include "json.hpp"

namespace spdc {

LatencyModel LatencyModel::defaults() {
    LatencyModel m;
    m.tiers = {
        {125, {3, 3, 2, 2, 12, 1, 1}},
        {250, {5, 5, 4, 3, 18, 1, 1}},
        {500, {8, 8, 7, 5, 30, 2, 2}},
    };
    return m;
}

LatencyModel LatencyModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::FileNotFound, "cannot open latency model: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::BadLatencyModel, path + ": " + e.what());
    }
    LatencyModel m;
    try {
        for (const auto& jt : j.at("tiers")) {
            LatencyTier t;
            t.max_frequency_mhz = jt.at("max_frequency_mhz").get<int>();
            t.ops.add = jt.at("add").get<int>();
            t.ops.sub = jt.at("sub").get<int>();
            t.ops.mul = jt.at("mul").get<int>();
            t.ops.const_mul = jt.at("const_mul").get<int>();
            t.ops.div = jt.at("div").get<int>();
            t.ops.converter_in = jt.at("converter_in").get<int>();
            t.ops.converter_out = jt.at("converter_out").get<int>();
            m.tiers.push_back(t);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::BadLatencyModel, path + ": " + e.what());
    }
    m.validate();
    return m;
}

void LatencyModel::validate() const {
    if (tiers.empty())
        fail(Errc::BadLatencyModel, "latency model has no tiers");
    const LatencyTier* prev = nullptr;
    for (const auto& t : tiers) {
        if (t.max_frequency_mhz <= 0)
            fail(Errc::BadLatencyModel, "tier frequency must be positive");
        const OpLatencies& o = t.ops;
        if (o.add < 1 || o.sub < 1 || o.mul < 1 || o.const_mul < 1 || o.div < 1)
            fail(Errc::BadLatencyModel,
                 "operator latencies must be at least 1 cycle");
        if (o.converter_in < 0 || o.converter_out < 0)
            fail(Errc::BadLatencyModel, "converter latencies must be >= 0");
        if (prev) {
            if (t.max_frequency_mhz <= prev->max_frequency_mhz)
                fail(Errc::BadLatencyModel,
                     "tiers must be in ascending frequency order");
            const OpLatencies& p = prev->ops;
            bool mono = o.add >= p.add && o.sub >= p.sub && o.mul >= p.mul &&
                        o.const_mul >= p.const_mul && o.div >= p.div &&
                        o.converter_in >= p.converter_in &&
                        o.converter_out >= p.converter_out;
            if (!mono)
                fail(Errc::BadLatencyModel,
                     "latencies must not decrease with frequency (tier " +
                         std::to_string(t.max_frequency_mhz) + " MHz)");
        }
        prev = &t;
    }
}

const LatencyTier& LatencyModel::select(int freq_mhz) const {
    for (const auto& t : tiers)
        if (freq_mhz <= t.max_frequency_mhz) return t;
    fail(Errc::FreqAboveModel,
         std::to_string(freq_mhz) + " MHz exceeds the latency model's top "
         "tier (" + std::to_string(tiers.back().max_frequency_mhz) + " MHz)");
}

}  // namespace spdc
