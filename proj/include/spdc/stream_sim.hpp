#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spdc/dfg.hpp"
#include "spdc/expr_synth.hpp"
#include "spdc/stream.hpp"

namespace spdc {

// Behavioral stand-in for one HDL module instance, split like synchronous
// hardware: peek() returns the words currently visible on the output pins
// (for registered modules, pure register state; combinational modules may
// read `in`), and advance() commits one enabled clock edge with the inputs
// of that cycle. A plugin of latency L must make cycle-t outputs depend only
// on inputs from cycles <= t - L.
class HdlPlugin {
public:
    virtual ~HdlPlugin() = default;
    virtual int latency() const = 0;
    virtual void peek(const std::vector<uint32_t>& in,
                      std::vector<uint32_t>& out) = 0;
    virtual void advance(const std::vector<uint32_t>& in) = 0;
};

using PluginFactory =
    std::function<std::unique_ptr<HdlPlugin>(const HdlCall& call)>;

class PluginRegistry {
public:
    void add(const std::string& module, PluginFactory factory);
    bool has(std::string_view module) const;
    // Instantiate for a concrete call; MISSING_PLUGIN when unregistered.
    std::unique_ptr<HdlPlugin> create(const HdlCall& call) const;

private:
    std::map<std::string, PluginFactory, std::less<>> factories_;
};

/// Registry preloaded with the library modules: mDelay, mMux, less_than,
/// swap, mTrans.
PluginRegistry builtin_plugins();

// ---------------------------------------------------------------------------

struct SimOptions {
    // Downstream back-pressure: explicit cycles where out_ready is low ...
    std::vector<int64_t> stall_cycles;
    // ... or a pseudo-random pattern: each cycle stalls with probability
    // `duty`, drawn from an mt19937 seeded below.
    std::optional<double> stall_duty;
    uint32_t stall_seed = 1;

    int trace_cycles = 0;  // record pin values for this many leading cycles
};

struct TraceRow {
    int64_t cycle = 0;
    bool enabled = false;  // clock-enable state this cycle
    bool out_valid = false;
    std::vector<uint32_t> outputs;  // output-port data words
    std::vector<uint32_t> pins;     // every node out-pin word (pin_layout())
};

struct SimResult {
    Stream output;
    int64_t depth_observed = -1;  // first cycle out_valid was high
    int64_t cycles_run = 0;
    bool stalled_run = false;
    // One output per cycle over [depth, depth+N) — meaningful only when no
    // stalls were injected.
    bool throughput_one = false;
    std::vector<TraceRow> trace;
};

// What one clock cycle looked like from outside the pipeline.
struct CycleIo {
    bool in_ready = false;   // == clock enable
    bool accepted = false;   // an input vector was taken this cycle
    bool out_valid = false;
    bool out_ready = false;
    bool transfer = false;   // out_valid && out_ready
    bool out_sop = false;
    bool out_eop = false;
    std::vector<uint32_t> out_words;
};

/// Cycle-accurate execution of a balanced design. The whole pipeline shares
/// one clock-enable, CE = out_ready OR NOT out_valid; state freezes on
/// stalled cycles, so injected back-pressure shifts timing but never values.
/// Data enters one vector per enabled cycle; valid/sop/eop either traverse
/// user logic (declared control ports) or synthesized delay lines of
/// pipeline depth.
class StreamSimulator {
public:
    StreamSimulator(const Dfg& dfg, const SpdProgram& program,
                    const std::map<int, OperatorDag>& equations,
                    int pipeline_depth, const PluginRegistry& plugins);
    ~StreamSimulator();

    StreamSimulator(const StreamSimulator&) = delete;
    StreamSimulator& operator=(const StreamSimulator&) = delete;

    // Names of the packed data fields (numeric/raw ports, declaration
    // order); input streams must match.
    const std::vector<std::string>& input_fields() const;
    const std::vector<std::string>& output_fields() const;
    // (node name, pin name) per entry of TraceRow::pins.
    const std::vector<std::pair<std::string, std::string>>& pin_layout() const;

    /// Run from reset until every input vector is consumed and every output
    /// has drained. Does not preserve state across calls.
    SimResult run(const Stream& input, const SimOptions& opt = {});

    /// Incremental interface for feedback experiments (state persists
    /// between ticks until reset). Offer an input vector (nullptr = none /
    /// in_valid low) and the downstream ready; the returned record says
    /// whether it was accepted and what the pipeline presented.
    void reset();
    CycleIo tick(const std::vector<uint32_t>* in_words, bool in_sop,
                 bool in_eop, bool out_ready);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace spdc
