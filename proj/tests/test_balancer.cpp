// Pipeline-balancer tests: the frozen schedule for the bundled sample
// design, tapped-chain sharing, block-RAM classification, and a randomized
// cross-check of arrival times against an independent longest-path oracle.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "spdc/balancer.hpp"
#include "spdc/expr_synth.hpp"
#include "spdc/parser.hpp"

using namespace spdc;

namespace {

SpdProgram load_sample_core() {
    std::ifstream in(std::string(SPDC_DESIGN_DIR) + "/sample_core.spd",
                     std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_program(os.str());
}

Dfg lowered_sample_core(const SpdProgram& p) {
    Dfg g = build_dfg(p);
    insert_format_converters(g, 1, 1);
    lower_all_equations(g, p, LatencyModel::defaults().select(125));
    return g;
}

using DelayKey = std::tuple<std::string, std::string, int>;  // var, dst, cycles

std::vector<DelayKey> keys_of(const Dfg& g, const Schedule& s) {
    std::vector<DelayKey> keys;
    for (const auto& d : s.inserted)
        keys.push_back({d.var, g.node(d.dst_node).name, d.cycles});
    return keys;
}

// All in-edges of every node deliver values of the same stream index, and
// every output port sits at the common depth.
void check_balanced(Dfg& g, int expected_depth) {
    std::vector<int> ready, arrival;
    compute_arrivals(g, ready, arrival);
    for (const auto& n : g.nodes) {
        int seen = -1;
        for (int eid : n.in_edge) {
            if (eid < 0) continue;
            int t = arrival[static_cast<size_t>(g.edge(eid).src_node)];
            if (seen < 0) seen = t;
            CAPTURE(n.name);
            CHECK(seen == t);
        }
    }
    for (int id : g.output_ports)
        CHECK(arrival[static_cast<size_t>(id)] == expected_depth);
}

}  // namespace

TEST_CASE("sample_core settles at depth 23 with five padded edges") {
    SpdProgram p = load_sample_core();
    Dfg g = lowered_sample_core(p);
    Schedule s = balance(g);

    CHECK(s.pipeline_depth == 23);

    std::vector<DelayKey> expect{
        {"c", "eq2", 5},      {"d", "eq2", 5},    {"tmp1", "lathan", 15},
        {"tmp1", "swp", 16},  {"tmp2", "swp", 1},
    };
    CHECK(keys_of(g, s) == expect);

    // Shared chains: one per padded source pin, the tmp1 line tapped twice.
    REQUIRE(s.num_chains() == 4);
    const DelayChain* tmp1_chain = nullptr;
    for (const auto& c : s.chains)
        if (c.taps.size() == 2) tmp1_chain = &c;
    REQUIRE(tmp1_chain != nullptr);
    CHECK(tmp1_chain->taps == std::vector<int>{15, 16});
    CHECK(tmp1_chain->total_cycles() == 16);
    CHECK_FALSE(tmp1_chain->memory_based);
    REQUIRE(tmp1_chain->segment_nodes.size() == 2);
    CHECK(g.node(tmp1_chain->segment_nodes[0]).latency == 15);
    CHECK(g.node(tmp1_chain->segment_nodes[1]).latency == 1);
    CHECK(g.node(tmp1_chain->segment_nodes[0]).kind ==
          DfgNodeKind::DelayModule);
    CHECK(g.node(tmp1_chain->segment_nodes[0]).name.rfind("dly", 0) == 0);

    // The comparator taps the 15-cycle stage, the swap the 16-cycle stage.
    int lt = g.find_node("lathan");
    int sw = g.find_node("swp");
    CHECK(g.edge(g.node(lt).in_edge[0]).src_node ==
          tmp1_chain->segment_nodes[0]);
    CHECK(g.edge(g.node(sw).in_edge[1]).src_node ==
          tmp1_chain->segment_nodes[1]);

    // Register bits tally: 5 + 5 + 16 + 1 cycles of one 32-bit word each.
    CHECK(s.delay_word_cycles == doctest::Approx(27.0));

    check_balanced(g, 23);

    // Balancing is a fixpoint: a second pass has nothing to do.
    Schedule again = balance(g);
    CHECK(again.inserted.empty());
    CHECK(again.num_chains() == 0);
    CHECK(again.pipeline_depth == 23);
}

TEST_CASE("disabling chain sharing duplicates the tmp1 line") {
    SpdProgram p = load_sample_core();
    Dfg g = lowered_sample_core(p);
    BalanceOptions opt;
    opt.share_chains = false;
    Schedule s = balance(g, opt);

    CHECK(s.pipeline_depth == 23);
    CHECK(s.num_chains() == 5);  // one per padded edge
    for (const auto& c : s.chains) CHECK(c.taps.size() == 1);
    // 5 + 5 + 15 + 16 + 1: the two tmp1 consumers no longer share registers.
    CHECK(s.delay_word_cycles == doctest::Approx(42.0));
    check_balanced(g, 23);
}

TEST_CASE("long chains are marked for block RAM at the threshold") {
    const char* src =
        "Name t\nInput a, b\nOutput q\n"
        "n1 40,HDL, slow = mDelay(a,<.pWidth(32) ,.pDelay(40)>)\n"
        "n2 0,equ, q = slow + b\n";
    SpdProgram p = parse_program(src);

    {
        Dfg g = build_dfg(p);
        lower_all_equations(g, p, LatencyModel::defaults().select(125));
        Schedule s = balance(g);
        REQUIRE(s.num_chains() == 1);
        CHECK(s.chains[0].total_cycles() == 40);
        CHECK(s.chains[0].memory_based);  // 40 >= default threshold 32
        CHECK(s.pipeline_depth == 43);
    }
    {
        Dfg g = build_dfg(p);
        lower_all_equations(g, p, LatencyModel::defaults().select(125));
        BalanceOptions opt;
        opt.memory_threshold = 45;
        Schedule s = balance(g, opt);
        REQUIRE(s.num_chains() == 1);
        CHECK_FALSE(s.chains[0].memory_based);
    }
}

TEST_CASE("sliced and full-width consumers never share a chain") {
    // One source pin feeds a join twice — once sliced to a single bit, once
    // as the full word — while a slow arm forces both edges to wait 9
    // cycles. The two lagging edges must ride separate lines, the sliced
    // line must carry one bit, and the retargeted edge must not re-slice.
    Dfg h;
    int in = h.add_node(DfgNodeKind::InputPort, "a");
    h.node(in).out_pins.push_back({"a", PortClass::Numeric, 32});
    h.node(in).in_edge.assign(0, -1);
    h.node(in).out_edges.assign(1, {});
    h.input_ports.push_back(in);

    int slow = h.add_node(DfgNodeKind::EquationModule, "slow");
    h.node(slow).latency = 9;
    h.node(slow).in_pins.push_back({"a", PortClass::Numeric, 32});
    h.node(slow).out_pins.push_back({"s", PortClass::Numeric, 32});
    h.node(slow).in_edge.assign(1, -1);
    h.node(slow).out_edges.assign(1, {});

    int join = h.add_node(DfgNodeKind::EquationModule, "join");
    h.node(join).latency = 1;
    h.node(join).in_pins.push_back({"bit", PortClass::Numeric, 1});
    h.node(join).in_pins.push_back({"s", PortClass::Numeric, 32});
    h.node(join).in_pins.push_back({"word", PortClass::Numeric, 32});
    h.node(join).out_pins.push_back({"q", PortClass::Numeric, 32});
    h.node(join).in_edge.assign(3, -1);
    h.node(join).out_edges.assign(1, {});

    int out = h.add_node(DfgNodeKind::OutputPort, "q");
    h.node(out).in_pins.push_back({"q", PortClass::Numeric, 32});
    h.node(out).in_edge.assign(1, -1);
    h.node(out).out_edges.assign(0, {});
    h.output_ports.push_back(out);

    h.add_edge(in, 0, join, 0, "a", std::pair{0, 0});  // sliced consumer
    h.add_edge(in, 0, slow, 0, "a");
    h.add_edge(slow, 0, join, 1, "s");
    h.add_edge(in, 0, join, 2, "a");  // full-width consumer
    h.add_edge(join, 0, out, 0, "q");

    Schedule s = balance(h);
    CHECK(s.pipeline_depth == 10);
    REQUIRE(s.num_chains() == 2);
    const DelayChain* sliced = nullptr;
    const DelayChain* wide = nullptr;
    for (const auto& c : s.chains)
        (c.bits ? sliced : wide) = &c;
    REQUIRE(sliced != nullptr);
    REQUIRE(wide != nullptr);
    CHECK(sliced->bits->first == 0);
    CHECK(sliced->bits->second == 0);
    CHECK(sliced->width == 1);
    CHECK(sliced->taps == std::vector<int>{9});
    CHECK(wide->width == 32);
    CHECK(wide->taps == std::vector<int>{9});
    // Only the sliced line contributes a fractional word to the register
    // tally: 9 × 1/32 + 9 × 32/32.
    CHECK(s.delay_word_cycles == doctest::Approx(9.0 + 9.0 / 32.0));

    // The feed into the sliced line's segment carries the slice; the
    // retargeted consumer edge does not slice again.
    int seg = sliced->segment_nodes[0];
    const DfgEdge& feed = h.edge(h.node(seg).in_edge[0]);
    REQUIRE(feed.bits.has_value());
    const DfgEdge& into_join = h.edge(h.node(join).in_edge[0]);
    CHECK(into_join.src_node == seg);
    CHECK_FALSE(into_join.bits.has_value());
    check_balanced(h, 10);
}

TEST_CASE("random graphs match an independent longest-path oracle") {
    std::mt19937 rng(4242);

    for (int iter = 0; iter < 100; ++iter) {
        CAPTURE(iter);
        Dfg g;
        std::vector<int> producers;

        int n_inputs = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < n_inputs; ++i) {
            int id = g.add_node(DfgNodeKind::InputPort,
                                "in" + std::to_string(i));
            g.node(id).out_pins.push_back(
                {"v" + std::to_string(id), PortClass::Numeric, 32});
            g.node(id).in_edge.assign(0, -1);
            g.node(id).out_edges.assign(1, {});
            g.input_ports.push_back(id);
            producers.push_back(id);
        }

        int n_internal = 4 + static_cast<int>(rng() % 42);
        for (int i = 0; i < n_internal; ++i) {
            int id = g.add_node(DfgNodeKind::EquationModule,
                                "n" + std::to_string(i));
            DfgNode& n = g.node(id);
            n.latency = static_cast<int>(rng() % 21);
            int nins = 1 + static_cast<int>(rng() % 3);
            for (int p = 0; p < nins; ++p)
                n.in_pins.push_back({"x" + std::to_string(p),
                                     PortClass::Numeric, 32});
            n.out_pins.push_back(
                {"v" + std::to_string(id), PortClass::Numeric, 32});
            n.in_edge.assign(static_cast<size_t>(nins), -1);
            n.out_edges.assign(1, {});
            for (int p = 0; p < nins; ++p) {
                int src = producers[rng() % producers.size()];
                g.add_edge(src, 0, id, p, g.node(src).out_pins[0].name);
            }
            producers.push_back(id);
        }

        int n_outputs = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < n_outputs; ++i) {
            int id = g.add_node(DfgNodeKind::OutputPort,
                                "out" + std::to_string(i));
            g.node(id).in_pins.push_back({"o", PortClass::Numeric, 32});
            g.node(id).in_edge.assign(1, -1);
            g.node(id).out_edges.assign(0, {});
            g.output_ports.push_back(id);
            int src = producers[n_inputs +
                                static_cast<int>(rng() %
                                                 static_cast<size_t>(n_internal))];
            g.add_edge(src, 0, id, 0, g.node(src).out_pins[0].name);
        }

        // Oracle: recursive memoized longest path over the raw edge list,
        // written independently of the production topological sweep.
        std::vector<int> memo(g.nodes.size(), -1);
        std::function<int(int)> longest = [&](int id) -> int {
            int& m = memo[static_cast<size_t>(id)];
            if (m >= 0) return m;
            int best = 0;
            for (const auto& e : g.edges)
                if (e.dst_node == id) best = std::max(best, longest(e.src_node));
            m = best + g.node(id).latency;
            return m;
        };
        int expect_depth = 0;
        for (int id : g.output_ports)
            expect_depth = std::max(expect_depth, longest(id));

        std::vector<int> ready, arrival;
        compute_arrivals(g, ready, arrival);
        for (const auto& n : g.nodes)
            CHECK(arrival[static_cast<size_t>(n.id)] == longest(n.id));

        // Balance a copy under each sharing mode; both must reach the oracle
        // depth, synchronize every join, and be a fixpoint.
        for (bool share : {true, false}) {
            CAPTURE(share);
            Dfg b = g;
            BalanceOptions opt;
            opt.share_chains = share;
            Schedule s = balance(b, opt);
            CHECK(s.pipeline_depth == expect_depth);
            check_balanced(b, expect_depth);
            Schedule fix = balance(b, opt);
            CHECK(fix.inserted.empty());
            CHECK(fix.num_chains() == 0);
        }

        // Determinism: balancing identical graphs yields identical schedules.
        Dfg b1 = g, b2 = g;
        Schedule s1 = balance(b1), s2 = balance(b2);
        CHECK(keys_of(b1, s1) == keys_of(b2, s2));
        CHECK(s1.delay_word_cycles == s2.delay_word_cycles);
        REQUIRE(s1.num_chains() == s2.num_chains());
        for (int i = 0; i < s1.num_chains(); ++i)
            CHECK(s1.chains[static_cast<size_t>(i)].taps ==
                  s2.chains[static_cast<size_t>(i)].taps);
    }
}
