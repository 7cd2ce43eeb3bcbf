// End-to-end command-line tests. These drive the installed binaries through
// a shell, so they check argument parsing, exit codes, file layout and the
// printed summaries rather than internals. No compiler library is linked.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved

    bool contains(const std::string& needle) const {
        return output.find(needle) != std::string::npos;
    }
};

RunResult run(const std::string& cmd) {
    RunResult r;
    FILE* p = popen((cmd + " 2>&1").c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, n);
    int status = pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const std::string spdc = std::string(SPDC_BIN);
const std::string spdc_lat = std::string(SPDC_LAT_BIN);
const fs::path design_dir = fs::path(SPDC_DESIGN_DIR);

// Fresh scratch directory per test case, removed on destruction.
struct Scratch {
    fs::path dir;
    explicit Scratch(const char* name)
        : dir(fs::temp_directory_path() / (std::string("spdc_cli_") + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    fs::path operator/(const char* leaf) const { return dir / leaf; }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

size_t line_count(const std::string& text) {
    size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("compile: artifacts, report and summary") {
    Scratch tmp("compile");
    fs::path art = tmp / "art";
    RunResult r = run(spdc + " compile " + q(design_dir / "sample_core.spd") +
                      " --out " + q(art));
    CHECK(r.exit_code == 0);
    CHECK(r.contains("design: sample_core"));
    CHECK(r.contains("target: 125 MHz (tier <= 125 MHz)"));
    CHECK(r.contains("pipeline depth: 23 cycles"));
    CHECK(r.contains(
        "operators: ADD 1, SUB 1, MUL 0, CONST_MUL 1, DIV 1  (N_ops 4)"));
    CHECK(r.contains("est. throughput: 0.5 GFLOPS (125 MHz x 4 ops/cycle)"));
    CHECK(r.contains("delay insertion: 5 padded edges, 4 chains, 27.0"));
    CHECK(r.contains("schedule:"));
    CHECK(r.contains("artifacts: "));

    for (const char* f : {"top.v", "manifest.txt", "hw.tcl", "dfg.dot",
                          "report.txt", "report.json"})
        CHECK(fs::exists(art / f));
    CHECK(fs::exists(art / "eq" / "eq1.v"));
    CHECK(fs::exists(art / "eq" / "eq2.v"));
    CHECK(fs::exists(art / "hdl_lib" / "spdc_delay.v"));
    CHECK(fs::exists(art / "hdl_lib" / "fp_div.v"));

    // report.json is valid JSON and agrees with the text summary.
    nlohmann::json j = nlohmann::json::parse(slurp(art / "report.json"));
    CHECK(j["design"] == "sample_core");
    CHECK(j["pipeline_depth"] == 23);
    CHECK(j["n_ops"] == 4);
    CHECK(j["est_gflops_display"] == "0.5");
    CHECK(j["delay_chains"] == 4);
    CHECK(j["census"]["div"] == 1);
    CHECK(j["schedule"].is_array());
}

TEST_CASE("compile: schedule dump and graph output") {
    Scratch tmp("dumps");
    RunResult sched = run(spdc + " compile " +
                          q(design_dir / "sample_core.spd") +
                          " --dump-schedule");
    CHECK(sched.exit_code == 0);
    CHECK(sched.output.rfind("node\tkind\tlatency\tready\tarrival\n", 0) == 0);
    CHECK(sched.contains("swp\t"));

    RunResult dot = run(spdc + " compile " + q(design_dir / "sample_core.spd") +
                        " --dot");
    CHECK(dot.exit_code == 0);
    CHECK(dot.output.rfind("digraph sample_core {", 0) == 0);
    CHECK(dot.contains("dly"));  // balanced graph shows inserted delays

    RunResult pre = run(spdc + " compile " + q(design_dir / "sample_core.spd") +
                        " --dump-dfg");
    CHECK(pre.exit_code == 0);
    CHECK(pre.output.rfind("digraph sample_core {", 0) == 0);
    CHECK(!pre.contains("dly"));  // pre-balancing graph has none

    RunResult viadot = run(spdc + " dot " + q(design_dir / "sample_core.spd") +
                           " --pre-balance");
    CHECK(viadot.exit_code == 0);
    CHECK(viadot.output == pre.output);
}

TEST_CASE("compile: SPDC_EPOCH pins artifacts byte for byte") {
    Scratch tmp("epoch");
    fs::path a = tmp / "a", b = tmp / "b";
    std::string env = "SPDC_EPOCH=1700000000 ";
    REQUIRE(run(env + spdc + " compile " + q(design_dir / "sample_core.spd") +
                " --out " + q(a))
                .exit_code == 0);
    REQUIRE(run(env + spdc + " compile " + q(design_dir / "sample_core.spd") +
                " --out " + q(b))
                .exit_code == 0);
    for (const char* f : {"top.v", "manifest.txt", "hw.tcl", "dfg.dot",
                          "report.txt", "report.json"})
        CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / "eq" / "eq1.v") == slurp(b / "eq" / "eq1.v"));
    CHECK(slurp(a / "eq" / "eq2.v") == slurp(b / "eq" / "eq2.v"));
    CHECK(slurp(a / "manifest.txt").find("build-epoch 1700000000\n") !=
          std::string::npos);
}

TEST_CASE("simulate: stream in, stream out, stall invariance") {
    Scratch tmp("simulate");
    fs::path in_csv = tmp / "in.csv";
    {
        std::ofstream os(in_csv);
        os << "a,b,c,d\n";
        for (int i = 0; i < 32; ++i)
            os << i + 0.5 << "," << 2 * i << "," << i + 2 << ","
               << (i % 7) + 1 << "\n";
    }
    fs::path out1 = tmp / "clean.csv", out2 = tmp / "stalled.csv";

    RunResult clean = run(spdc + " simulate " +
                          q(design_dir / "sample_core.spd") + " --input " +
                          q(in_csv) + " --output " + q(out1));
    CHECK(clean.exit_code == 0);
    CHECK(clean.contains("design: sample_core"));
    CHECK(clean.contains("pipeline depth (compiled): 23"));
    CHECK(clean.contains("pipeline depth (observed): 23"));
    CHECK(clean.contains("vectors: 32 in, 32 out"));
    CHECK(clean.contains("throughput-one: yes"));

    RunResult stalled = run(spdc + " simulate " +
                            q(design_dir / "sample_core.spd") + " --input " +
                            q(in_csv) + " --output " + q(out2) +
                            " --stall-pattern duty:0.5 --stall-seed 77");
    CHECK(stalled.exit_code == 0);
    CHECK(stalled.contains("throughput-one: n/a (back-pressure injected)"));

    std::string c1 = slurp(out1), c2 = slurp(out2);
    CHECK(c1.rfind("lg,sm\n", 0) == 0);
    CHECK(line_count(c1) == 33);  // header + one row per vector
    CHECK(c1 == c2);              // back-pressure never changes the data

    RunResult traced =
        run(spdc + " simulate " + q(design_dir / "sample_core.spd") +
            " --input " + q(in_csv) + " --output " + q(out1) + " --trace 4");
    CHECK(traced.exit_code == 0);
    CHECK(traced.contains("cycle\tce\tvalid"));
    CHECK(traced.contains("\n0\t1\t0\t"));  // cycle 0: enabled, not yet valid
}

TEST_CASE("explore: monotone cost table across tiers") {
    RunResult r = run(spdc + " explore " + q(design_dir / "sample_core.spd") +
                      " --freqs 500,125,250");
    CHECK(r.exit_code == 0);
    CHECK(r.contains("freq_mhz\ttier_mhz\tdepth\tchains\tword_cycles\t"
                     "register_bits\test_gflops"));
    CHECK(r.contains("125\t125\t23\t4\t27.0\t1888\t0.5\n"));
    CHECK(r.contains("\n250\t250\t"));
    CHECK(r.contains("\n500\t500\t"));
    // Rows come out sorted by frequency and the tool verifies the trend.
    CHECK(r.output.find("125\t125") < r.output.find("250\t250"));
    CHECK(r.output.find("250\t250") < r.output.find("500\t500"));
    CHECK(r.contains("trend: pipeline depth and delay word-cycles are "
                     "monotone non-decreasing over frequency"));
}

TEST_CASE("lattice tool: build, step, convert, round-trip") {
    Scratch tmp("lat");
    fs::path ch = tmp / "ch.lat";
    RunResult mk = run(spdc_lat + " make-channel 16 8 " + q(ch));
    CHECK(mk.exit_code == 0);
    std::string raw = slurp(ch);
    CHECK(raw.rfind("spdlat 1\n16 8\n", 0) == 0);
    CHECK(raw.size() == std::string("spdlat 1\n16 8\n").size() +
                            10 * 4 * 16 * 8);  // ten 32-bit planes

    fs::path stepped = tmp / "stepped.lat";
    RunResult st =
        run(spdc_lat + " step " + q(ch) + " " + q(stepped) + " --steps 2");
    CHECK(st.exit_code == 0);
    CHECK(st.contains("total mass after 2 step(s):"));

    fs::path stream = tmp / "flat.stream", back = tmp / "back.lat";
    CHECK(run(spdc_lat + " lat2stream " + q(stepped) + " " + q(stream))
              .exit_code == 0);
    CHECK(run(spdc_lat + " stream2lat " + q(stream) + " 16 8 " + q(back))
              .exit_code == 0);
    CHECK(slurp(back) == slurp(stepped));  // flatten/rebuild is lossless

    fs::path csv = tmp / "flow.csv";
    CHECK(run(spdc_lat + " lat2csv " + q(stepped) + " " + q(csv)).exit_code ==
          0);
    std::string table = slurp(csv);
    CHECK(table.rfind("x,y,rho,u,v\n", 0) == 0);
    CHECK(line_count(table) == 1 + 16 * 8);
}

TEST_CASE("diagnostics carry codes, locations and exit status 2") {
    Scratch tmp("diag");
    RunResult missing = run(spdc + " compile " + q(tmp / "nope.spd"));
    CHECK(missing.exit_code == 2);
    CHECK(missing.contains("FILE_NOT_FOUND"));

    fs::path bad = tmp / "bad.spd";
    std::ofstream(bad) << "Name demo\nInput a\nOutput q\nn1 3,equ q = a\n";
    RunResult syn = run(spdc + " compile " + q(bad));
    CHECK(syn.exit_code == 2);
    CHECK(syn.contains("SYNTAX_ERROR"));
    CHECK(syn.contains("bad.spd:4:"));  // file and line of the broken decl

    fs::path in_csv = tmp / "in.csv";
    std::ofstream(in_csv) << "a,b,c,d\n1,2,3,4\n";
    RunResult duty = run(spdc + " simulate " +
                         q(design_dir / "sample_core.spd") + " --input " +
                         q(in_csv) + " --stall-pattern duty:2");
    CHECK(duty.exit_code == 2);
    CHECK(duty.contains("BAD_NUMBER"));
    CHECK(duty.contains("stall duty must be a fraction"));
}

TEST_CASE("usage errors are rejected by the argument parser") {
    CHECK(run(spdc).exit_code != 0);
    CHECK(run(spdc + " frobnicate").exit_code != 0);
    RunResult r = run(spdc + " simulate " + q(design_dir / "sample_core.spd"));
    CHECK(r.exit_code != 0);  // --input is required
    CHECK(r.contains("--input"));
    CHECK(run(spdc_lat + " make-channel 16").exit_code != 0);
}
