#include "spdc/compile.hpp"

#include <fstream>
#include <sstream>

#include "spdc/parser.hpp"

namespace spdc {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::FileNotFound, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) fail(Errc::IoError, "error reading '" + path + "'");
    return ss.str();
}

CompiledDesign compile_spd(const std::string& source,
                           const std::string& filename,
                           const CompileOptions& opt) {
    (void)filename;  // diagnostics carry line/column; the driver adds the file
    CompiledDesign d;
    d.options = opt;

    LatencyModel model = opt.latency_model_path.empty()
                             ? LatencyModel::defaults()
                             : LatencyModel::load(opt.latency_model_path);
    d.tier = model.select(opt.freq_mhz);

    d.program = parse_program(source);
    d.dfg = build_dfg(d.program);
    route_control_sideband(d.dfg, d.program);
    insert_format_converters(d.dfg, d.tier.ops.converter_in,
                             d.tier.ops.converter_out);
    d.equations = lower_all_equations(d.dfg, d.program, d.tier);
    topo_sort(d.dfg);
    note_unused_pins(d.dfg);

    if (opt.run_balancer) {
        BalanceOptions bopt;
        bopt.share_chains = opt.share_chains;
        bopt.memory_threshold = opt.memory_threshold;
        d.schedule = balance(d.dfg, bopt);
    }
    return d;
}

CompiledDesign compile_spd_file(const std::string& path,
                                const CompileOptions& opt) {
    return compile_spd(read_text_file(path), path, opt);
}

}  // namespace spdc
