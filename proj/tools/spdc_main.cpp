// spdc — stream-processor compiler and simulator driver.
//
//   spdc compile  design.spd [--freq N] [--out DIR] ...   emit Verilog + report
//   spdc simulate design.spd --input in.stream ...        run the pipeline model
//   spdc explore  design.spd --freqs 125,250,500          cost across frequencies
//   spdc dot      design.spd [--pre-balance]              graph in DOT format
//
// Timestamps embedded in artifacts come from the SPDC_EPOCH environment
// variable (seconds since the Unix epoch) when set, so repeated builds are
// byte-identical; otherwise the current time is used.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spdc/codegen.hpp"
#include "spdc/compile.hpp"
#include "spdc/report.hpp"
#include "spdc/stream.hpp"
#include "spdc/stream_sim.hpp"

namespace {

long long resolve_epoch() {
    if (const char* e = std::getenv("SPDC_EPOCH")) {
        char* end = nullptr;
        long long v = std::strtoll(e, &end, 10);
        if (end && *end == '\0') return v;
        std::cerr << "warning: ignoring malformed SPDC_EPOCH '" << e << "'\n";
    }
    return static_cast<long long>(std::time(nullptr));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os || !os.write(text.data(),
                         static_cast<std::streamsize>(text.size())))
        spdc::fail(spdc::Errc::IoError, "cannot write '" + path + "'");
}

std::string default_out_dir(const std::string& spd_path) {
    return std::filesystem::path(spd_path).stem().string() + "_out";
}

// Shared per-subcommand knobs that feed CompileOptions.
struct CompileArgs {
    std::string spd_path;
    int freq = 125;
    std::string latency_model;
    bool no_sharing = false;
    int mem_threshold = 32;

    spdc::CompileOptions options() const {
        spdc::CompileOptions o;
        o.freq_mhz = freq;
        o.latency_model_path = latency_model;
        o.share_chains = !no_sharing;
        o.memory_threshold = mem_threshold;
        return o;
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("design", spd_path, "SPD design file")->required();
        cmd->add_option("--freq", freq,
                        "target clock in MHz (selects the latency tier)")
            ->capture_default_str();
        cmd->add_option("--latency-model", latency_model,
                        "operator latency table (JSON); default: built-in");
        cmd->add_flag("--no-delay-sharing", no_sharing,
                      "give every padded edge its own delay chain instead of "
                      "tapping shared ones");
        cmd->add_option("--mem-threshold", mem_threshold,
                        "delay chains at least this long become circular "
                        "memory buffers")
            ->capture_default_str();
    }
};

// Back-pressure pattern: either "duty:<0..1>" (pseudo-random, see
// --stall-seed) or a comma-separated list of stalled cycle numbers.
void parse_stall_pattern(const std::string& text, spdc::SimOptions& opt) {
    if (text.rfind("duty:", 0) == 0) {
        char* end = nullptr;
        double d = std::strtod(text.c_str() + 5, &end);
        if (!end || *end != '\0' || d < 0.0 || d > 1.0)
            spdc::fail(spdc::Errc::BadNumber,
                       "stall duty must be a fraction in [0,1], got '" + text +
                           "'");
        opt.stall_duty = d;
        return;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        long long c = std::strtoll(item.c_str(), &end, 10);
        if (!end || *end != '\0' || c < 0)
            spdc::fail(spdc::Errc::BadNumber,
                       "stall cycle list entry '" + item +
                           "' is not a non-negative integer");
        opt.stall_cycles.push_back(c);
    }
}

int cmd_compile(const CompileArgs& args, std::string out_dir, bool print_dot,
                bool dump_dfg, bool dump_schedule) {
    if (dump_dfg) {
        // Pre-balancing graph: compile with delay insertion disabled.
        spdc::CompileOptions o = args.options();
        o.run_balancer = false;
        spdc::CompiledDesign d = spdc::compile_spd_file(args.spd_path, o);
        std::cout << spdc::emit_dot(d.dfg, d.program.name);
        return 0;
    }

    spdc::CompiledDesign d =
        spdc::compile_spd_file(args.spd_path, args.options());
    spdc::EmitOptions eo;
    eo.epoch = resolve_epoch();
    spdc::HdlArtifactSet art = spdc::emit_artifacts(d, eo);
    spdc::BuildReport rep = spdc::make_report(d, art.design);

    if (dump_schedule) {
        std::cout << "node\tkind\tlatency\tready\tarrival\n";
        for (const auto& row : rep.schedule)
            std::cout << row.node << '\t' << row.kind << '\t' << row.latency
                      << '\t' << row.ready << '\t' << row.arrival << '\n';
        return 0;
    }
    if (print_dot) {
        std::cout << art.dot;
        return 0;
    }

    if (out_dir.empty()) out_dir = default_out_dir(args.spd_path);
    spdc::write_artifacts(art, out_dir);
    write_text(out_dir + "/report.txt", spdc::report_text(rep));
    write_text(out_dir + "/report.json", spdc::report_json(rep));

    for (const auto& w : d.dfg.warnings)
        std::cerr << args.spd_path << ": warning: " << w.message << "\n";

    std::cout << spdc::report_text(rep);
    std::cout << "artifacts: " << out_dir << "/\n";
    return 0;
}

int cmd_simulate(const CompileArgs& args, const std::string& input_path,
                 std::string output_path, const std::string& stall_pattern,
                 uint32_t stall_seed, int trace_cycles) {
    spdc::CompiledDesign d =
        spdc::compile_spd_file(args.spd_path, args.options());
    spdc::Stream input = spdc::read_stream_auto(input_path);

    spdc::PluginRegistry plugins = spdc::builtin_plugins();
    spdc::StreamSimulator sim(d.dfg, d.program, d.equations,
                              d.schedule.pipeline_depth, plugins);

    spdc::SimOptions opt;
    if (!stall_pattern.empty()) parse_stall_pattern(stall_pattern, opt);
    opt.stall_seed = stall_seed;
    opt.trace_cycles = trace_cycles;

    spdc::SimResult res = sim.run(input, opt);

    if (trace_cycles > 0) {
        const auto& layout = sim.pin_layout();
        std::cout << "cycle\tce\tvalid";
        for (const auto& [node, pin] : layout)
            std::cout << '\t' << node << '.' << pin;
        std::cout << '\n';
        for (const auto& row : res.trace) {
            std::cout << row.cycle << '\t' << (row.enabled ? 1 : 0) << '\t'
                      << (row.out_valid ? 1 : 0);
            char buf[16];
            for (uint32_t w : row.pins) {
                std::snprintf(buf, sizeof buf, "%08x", w);
                std::cout << '\t' << buf;
            }
            std::cout << '\n';
        }
    }

    if (output_path.empty())
        output_path =
            std::filesystem::path(input_path).stem().string() + "_out.stream";
    spdc::write_stream_auto(res.output, output_path);

    std::cout << "design: " << d.program.name << "\n";
    std::cout << "pipeline depth (compiled): " << d.schedule.pipeline_depth
              << "\n";
    if (res.depth_observed >= 0)
        std::cout << "pipeline depth (observed): " << res.depth_observed
                  << "\n";
    else
        std::cout << "pipeline depth (observed): n/a (no output vectors)\n";
    std::cout << "vectors: " << input.size() << " in, " << res.output.size()
              << " out over " << res.cycles_run << " cycles\n";
    if (res.stalled_run)
        std::cout << "throughput-one: n/a (back-pressure injected)\n";
    else
        std::cout << "throughput-one: " << (res.throughput_one ? "yes" : "no")
                  << "\n";
    std::cout << "output: " << output_path << "\n";
    return 0;
}

int cmd_explore(const CompileArgs& args, std::vector<int> freqs) {
    std::sort(freqs.begin(), freqs.end());
    freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());

    std::vector<spdc::BuildReport> rows;
    for (int f : freqs) {
        spdc::CompileOptions o = args.options();
        o.freq_mhz = f;
        spdc::CompiledDesign d = spdc::compile_spd_file(args.spd_path, o);
        rows.push_back(spdc::make_report(d, d.program.name));
    }

    std::cout << "freq_mhz\ttier_mhz\tdepth\tchains\tword_cycles\t"
                 "register_bits\test_gflops\n";
    char line[160];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%d\t%d\t%d\t%d\t%.1f\t%lld\t%s\n",
                      r.freq_mhz, r.tier_mhz, r.pipeline_depth, r.delay_chains,
                      r.delay_word_cycles, r.register_bits_estimate,
                      spdc::format_gflops(r.est_gflops).c_str());
        std::cout << line;
    }

    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].pipeline_depth < rows[i - 1].pipeline_depth ||
            rows[i].delay_word_cycles < rows[i - 1].delay_word_cycles) {
            std::cerr << "error: cost decreased from " << rows[i - 1].freq_mhz
                      << " MHz to " << rows[i].freq_mhz
                      << " MHz; the latency model is not monotone\n";
            return 1;
        }
    }
    if (rows.size() > 1)
        std::cout << "trend: pipeline depth and delay word-cycles are "
                     "monotone non-decreasing over frequency\n";
    return 0;
}

int cmd_dot(const CompileArgs& args, const std::string& out_path,
            bool pre_balance) {
    spdc::CompileOptions o = args.options();
    o.run_balancer = !pre_balance;
    spdc::CompiledDesign d = spdc::compile_spd_file(args.spd_path, o);
    std::string dot = spdc::emit_dot(d.dfg, d.program.name);
    if (out_path.empty())
        std::cout << dot;
    else
        write_text(out_path, dot);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPD stream-processor compiler and cycle-accurate simulator"};
    app.require_subcommand(1);

    CompileArgs cargs;
    std::string out_dir;
    bool print_dot = false, dump_dfg = false, dump_schedule = false;
    CLI::App* compile =
        app.add_subcommand("compile", "compile a design to Verilog + reports");
    cargs.attach(compile);
    compile->add_option("--out", out_dir,
                        "artifact directory (default: <design>_out)");
    compile->add_flag("--dot", print_dot,
                      "print the balanced graph in DOT format and stop");
    compile->add_flag("--dump-dfg", dump_dfg,
                      "print the pre-balancing graph in DOT format and stop");
    compile->add_flag("--dump-schedule", dump_schedule,
                      "print the node schedule as tab-separated text and stop");

    CompileArgs sargs;
    std::string input_path, output_path, stall_pattern;
    uint32_t stall_seed = 1;
    int trace_cycles = 0;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "run a stream through the cycle-accurate pipeline model");
    sargs.attach(simulate);
    simulate->add_option("--input", input_path,
                         "input stream file (.stream binary or .csv)")
        ->required();
    simulate->add_option("--output", output_path,
                         "output stream file (default: <input>_out.stream)");
    simulate->add_option("--stall-pattern", stall_pattern,
                         "back-pressure: 'duty:<0..1>' or cycle list 'a,b,c'");
    simulate->add_option("--stall-seed", stall_seed,
                         "seed for the duty-cycle pattern")
        ->capture_default_str();
    simulate->add_option("--trace", trace_cycles,
                         "print every node output for the first N cycles");

    CompileArgs eargs;
    std::vector<int> freqs;
    CLI::App* explore = app.add_subcommand(
        "explore", "compare balancing cost across target frequencies");
    eargs.attach(explore);
    explore->add_option("--freqs", freqs, "target frequencies in MHz")
        ->required()
        ->delimiter(',');

    CompileArgs dargs;
    std::string dot_out;
    bool pre_balance = false;
    CLI::App* dot =
        app.add_subcommand("dot", "emit the dataflow graph in DOT format");
    dargs.attach(dot);
    dot->add_option("--out", dot_out, "write to a file instead of stdout");
    dot->add_flag("--pre-balance", pre_balance,
                  "graph before delay insertion");

    CLI11_PARSE(app, argc, argv);

    const CompileArgs* active = nullptr;
    try {
        if (compile->parsed()) {
            active = &cargs;
            return cmd_compile(cargs, out_dir, print_dot, dump_dfg,
                               dump_schedule);
        }
        if (simulate->parsed()) {
            active = &sargs;
            return cmd_simulate(sargs, input_path, output_path, stall_pattern,
                                stall_seed, trace_cycles);
        }
        if (explore->parsed()) {
            active = &eargs;
            return cmd_explore(eargs, freqs);
        }
        active = &dargs;
        return cmd_dot(dargs, dot_out, pre_balance);
    } catch (const spdc::CompileError& e) {
        std::cerr << e.format(active ? active->spd_path : std::string{})
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
