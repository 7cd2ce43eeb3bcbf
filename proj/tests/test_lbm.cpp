// Fluid-processor model tests: collision accuracy against a double-precision
// twin and the textbook equilibrium, lattice construction and file formats,
// the plane-translation step, and bit-exact agreement between the compiled
// pipeline and the software reference.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "spdc/builtins.hpp"
#include "spdc/compile.hpp"
#include "spdc/lbm.hpp"
#include "spdc/parser.hpp"
#include "spdc/stream_sim.hpp"

using namespace spdc;

namespace {

std::string design_path(const char* file) {
    return std::string(SPDC_DESIGN_DIR) + "/" + file;
}

// Random positive distribution set near rest-state equilibrium.
void random_cell(std::mt19937& rng, float f[9]) {
    std::uniform_real_distribution<float> rho(0.8f, 1.2f);
    std::uniform_real_distribution<float> eps(-0.05f, 0.05f);
    float r = rho(rng);
    for (int i = 0; i < 9; ++i)
        f[i] = static_cast<float>(LbmConstants::weight[static_cast<size_t>(i)]) *
               r * (1.0f + eps(rng));
}

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-3);
}

struct TempPath {
    std::string path;
    explicit TempPath(std::string p) : path(std::move(p)) {}
    ~TempPath() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("single-cell collision tracks its double-precision twin") {
    std::mt19937 rng(31);
    double worst = 0.0;
    for (int iter = 0; iter < 1000; ++iter) {
        float f[9], out[9];
        double fd[9], outd[9];
        random_cell(rng, f);
        for (int i = 0; i < 9; ++i) fd[i] = static_cast<double>(f[i]);
        lbm_collide_cell(f, out);
        lbm_collide_cell_d(fd, outd);
        for (int i = 0; i < 9; ++i)
            worst = std::max(worst,
                             rel_err(static_cast<double>(out[i]), outd[i]));
    }
    CHECK(worst <= 1e-5);
    CHECK(worst > 0.0);  // float really does round somewhere
}

TEST_CASE("collision conserves density and momentum") {
    std::mt19937 rng(32);
    for (int iter = 0; iter < 200; ++iter) {
        float f[9];
        random_cell(rng, f);
        double fd[9], outd[9];
        for (int i = 0; i < 9; ++i) fd[i] = static_cast<double>(f[i]);
        lbm_collide_cell_d(fd, outd);

        double rho_in_ = 0, rho_out_ = 0, mx_in = 0, mx_out = 0, my_in = 0,
               my_out = 0;
        static const int cx[9] = {0, 1, 0, -1, 0, 1, -1, -1, 1};
        static const int cy[9] = {0, 0, 1, 0, -1, 1, 1, -1, -1};
        for (int i = 0; i < 9; ++i) {
            rho_in_ += fd[i];
            rho_out_ += outd[i];
            mx_in += cx[i] * fd[i];
            mx_out += cx[i] * outd[i];
            my_in += cy[i] * fd[i];
            my_out += cy[i] * outd[i];
        }
        CHECK(std::fabs(rho_out_ - rho_in_) <= 1e-9 * std::fabs(rho_in_));
        CHECK(std::fabs(mx_out - mx_in) <= 1e-9);
        CHECK(std::fabs(my_out - my_in) <= 1e-9);
    }
}

TEST_CASE("restructured equilibrium equals the textbook form") {
    // Recover the equilibrium the collision relaxed toward,
    // eq = f + (out - f) / one_tau, and compare with the classic
    // w_i * rho * (1 + 3c.u + 4.5(c.u)^2 - 1.5u^2) evaluated from the
    // macroscopic moments.
    std::mt19937 rng(33);
    for (int iter = 0; iter < 200; ++iter) {
        float f[9];
        random_cell(rng, f);
        double fd[9], outd[9];
        for (int i = 0; i < 9; ++i) fd[i] = static_cast<double>(f[i]);
        lbm_collide_cell_d(fd, outd);

        double rho, u, v;
        lbm_macro(fd, rho, u, v);
        double feq[9];
        lbm_equilibrium(rho, u, v, feq);

        for (int i = 0; i < 9; ++i) {
            double recovered =
                fd[i] + (outd[i] - fd[i]) / LbmConstants::one_tau;
            CAPTURE(i);
            CHECK(std::fabs(recovered - feq[i]) <=
                  1e-8 * std::max(1.0, std::fabs(feq[i])));
        }
    }
}

TEST_CASE("channel lattice: walls, inlet, outlet, unit density") {
    Lattice l = make_channel(64, 32);
    CHECK(l.nx == 64);
    CHECK(l.ny == 32);
    REQUIRE(l.cells() == 2048);

    for (int y = 0; y < l.ny; ++y) {
        for (int x = 0; x < l.nx; ++x) {
            uint32_t a = l.attr[static_cast<size_t>(x + 64 * y)];
            if (y == 0 || y == l.ny - 1) {
                CHECK(a == kAttrWall);
            } else if (x == 0) {
                CHECK(a == kAttrInlet);
            } else if (x == l.nx - 1) {
                CHECK(a == kAttrOutlet);
            } else {
                CHECK(a == 0u);
            }
        }
    }
    // Every cell starts at equilibrium with density 1, so the mass is the
    // cell count (up to per-cell float rounding).
    CHECK(total_mass(l) == doctest::Approx(2048.0).epsilon(1e-6));
}

TEST_CASE("sealed box: walls all around and a centered bump") {
    Lattice l = make_box(16, 12, 0.05f);
    auto rho_at = [&](int x, int y) {
        double r = 0;
        for (int p = 0; p < 9; ++p)
            r += l.f[static_cast<size_t>(p)][static_cast<size_t>(x + 16 * y)];
        return r;
    };
    for (int y = 0; y < l.ny; ++y)
        for (int x = 0; x < l.nx; ++x) {
            uint32_t a = l.attr[static_cast<size_t>(x + 16 * y)];
            bool edge = x == 0 || x == 15 || y == 0 || y == 11;
            CHECK(a == (edge ? kAttrWall : 0u));
            // Rim cells start empty so every gram sits in the cavity.
            if (edge) CHECK(rho_at(x, y) == 0.0);
        }
    const int interior = (16 - 2) * (12 - 2);
    double mass = total_mass(l);
    CHECK(mass > interior);                  // the bump adds mass
    CHECK(mass < interior * 1.05 + 1.0);     // bounded by the amplitude

    // Density peaks in the middle of the fluid region.
    CHECK(rho_at(8, 6) > rho_at(2, 2));
    CHECK(rho_at(8, 6) > rho_at(13, 9));
}

TEST_CASE("lattice files round-trip bit for bit") {
    Lattice l = make_box(8, 8, 0.1f);
    TempPath tmp("lbm_roundtrip_test.lat");
    write_lattice(l, tmp.path);
    Lattice r = read_lattice(tmp.path);
    CHECK(r.nx == l.nx);
    CHECK(r.ny == l.ny);
    CHECK(r.attr == l.attr);
    for (int p = 0; p < 9; ++p)
        for (size_t j = 0; j < l.cells(); ++j)
            CHECK(float_to_word(r.f[static_cast<size_t>(p)][j]) ==
                  float_to_word(l.f[static_cast<size_t>(p)][j]));
}

TEST_CASE("lattice file error handling") {
    try {
        read_lattice("no_such_lattice.lat");
        FAIL("expected a diagnostic");
    } catch (const CompileError& e) {
        CHECK(e.code() == Errc::FileNotFound);
    }
    {
        TempPath tmp("lbm_bad_magic_test.lat");
        std::ofstream(tmp.path) << "not a lattice\n4 4\n";
        try {
            read_lattice(tmp.path);
            FAIL("expected a diagnostic");
        } catch (const CompileError& e) {
            CHECK(e.code() == Errc::BadStreamFile);
        }
    }
    {
        TempPath tmp("lbm_truncated_test.lat");
        std::ofstream(tmp.path) << "spdlat 1\n4 4\nshort";
        try {
            read_lattice(tmp.path);
            FAIL("expected a diagnostic");
        } catch (const CompileError& e) {
            CHECK(e.code() == Errc::BadStreamFile);
        }
    }
}

TEST_CASE("lattice to stream and back") {
    Lattice l = make_channel(8, 4);
    Stream s = lattice_to_stream(l);
    REQUIRE(s.width() == 10);
    REQUIRE(s.size() == 32);
    CHECK(s.fields[0] == "if0");
    CHECK(s.fields[8] == "if8");
    CHECK(s.fields[9] == "iAtr_RAW");
    CHECK(s.sop[0] == 1);
    CHECK(s.eop[31] == 1);
    CHECK(s.sop[1] == 0);

    Lattice back = stream_to_lattice(s, 8, 4);
    CHECK(back.attr == l.attr);
    for (int p = 0; p < 9; ++p)
        for (size_t j = 0; j < l.cells(); ++j)
            CHECK(float_to_word(back.f[static_cast<size_t>(p)][j]) ==
                  float_to_word(l.f[static_cast<size_t>(p)][j]));

    try {
        stream_to_lattice(s, 8, 5);  // wrong cell count
        FAIL("expected a diagnostic");
    } catch (const CompileError& e) {
        CHECK(e.code() == Errc::SizeMismatch);
    }
}

TEST_CASE("reference step translates planes by their displacement") {
    // Uniform interior with one marked cell: after collision + translation,
    // plane p's value from the marked cell must surface exactly d_p cells
    // downstream, frame edges read zero, and attr 0 leaves values alone.
    const int nx = 8, ny = 4;
    const int64_t n = nx * ny;
    Lattice l;
    l.nx = nx;
    l.ny = ny;
    for (int p = 0; p < 9; ++p) l.f[static_cast<size_t>(p)].assign(32, 1.0f);
    l.attr.assign(32, 0u);
    const int64_t marked = 18;
    l.f[0][static_cast<size_t>(marked)] = 2.0f;  // disturb every output plane

    // Per-cell collision results for the two cell states.
    float uniform_in[9], uniform_out[9], marked_in[9], marked_out[9];
    for (int p = 0; p < 9; ++p) uniform_in[p] = 1.0f;
    for (int p = 0; p < 9; ++p) marked_in[p] = 1.0f;
    marked_in[0] = 2.0f;
    lbm_collide_cell(uniform_in, uniform_out);
    lbm_collide_cell(marked_in, marked_out);

    Lattice out = lbm_step_reference(l);
    const int64_t d[9] = {0, 1, nx, -1, -nx, nx + 1, nx - 1, -nx - 1, -nx + 1};
    for (int p = 0; p < 9; ++p) {
        for (int64_t j = 0; j < n; ++j) {
            CAPTURE(p);
            CAPTURE(j);
            const int64_t src = j - d[p];
            float expect;
            if (src < 0 || src >= n)
                expect = 0.0f;
            else if (src == marked)
                expect = marked_out[p];
            else
                expect = uniform_out[p];
            CHECK(out.f[static_cast<size_t>(p)][static_cast<size_t>(j)] ==
                  expect);
        }
    }
    CHECK(out.attr == l.attr);
}

TEST_CASE("reference step float vs double stays within 1e-5") {
    Lattice l = make_channel(16, 8);
    Lattice f1 = lbm_step_reference(l);
    LatticeD d1 = lbm_step_reference_d(to_double(l));
    double worst = 0.0;
    for (int p = 0; p < 9; ++p)
        for (size_t j = 0; j < l.cells(); ++j)
            worst = std::max(
                worst, rel_err(static_cast<double>(
                                   f1.f[static_cast<size_t>(p)][j]),
                               d1.f[static_cast<size_t>(p)][j]));
    CHECK(worst <= 1e-5);
}

TEST_CASE("sealed box holds its mass over repeated steps") {
    Lattice l = make_box(16, 16, 0.05f);
    const double m0 = total_mass(l);
    for (int step = 0; step < 10; ++step) {
        l = lbm_step_reference(l);
        for (int p = 0; p < 9; ++p)
            for (float v : l.f[static_cast<size_t>(p)])
                REQUIRE(std::isfinite(v));
        CHECK(std::fabs(total_mass(l) - m0) <= 1e-3 * m0);
    }
}

TEST_CASE("design parameters spell the model constants") {
    SpdProgram p = parse_program(read_text_file(design_path("lbm.spd")));
    auto value = [&](const char* name) {
        const ParamDecl* d = p.find_param(name);
        REQUIRE(d != nullptr);
        return d->value;
    };
    CHECK(value("P_one_tau") == static_cast<float>(0.516262261));
    CHECK(value("P_rho_in") == static_cast<float>(1.05));
    CHECK(value("P_rho_out") == static_cast<float>(0.95));
    CHECK(value("P5") == static_cast<float>(0.111111111111111));
    CHECK(value("P6") == static_cast<float>(0.0277777777777778));
    CHECK(value("Pa") == static_cast<float>(0.444444444444444));
    CHECK(value("P0") == static_cast<float>(0.666666666666667));
}

TEST_CASE("compiled per-cell design reproduces the collision bit for bit") {
    CompiledDesign d = compile_spd_file(design_path("lbm_cell.spd"));
    PluginRegistry plugins = builtin_plugins();
    StreamSimulator sim(d.dfg, d.program, d.equations,
                        d.schedule.pipeline_depth, plugins);

    REQUIRE(sim.input_fields().size() == 9);
    REQUIRE(sim.output_fields().size() == 9);

    const size_t n = 256;
    std::mt19937 rng(8);
    Stream in;
    in.fields = sim.input_fields();
    std::vector<std::array<float, 9>> cells(n);
    for (size_t i = 0; i < n; ++i) {
        random_cell(rng, cells[i].data());
        std::vector<uint32_t> row(9);
        for (int p = 0; p < 9; ++p)
            row[static_cast<size_t>(p)] = float_to_word(cells[i][static_cast<size_t>(p)]);
        in.push(std::move(row));
    }
    in.frame_all();

    SimResult res = sim.run(in);
    REQUIRE(res.output.size() == n);
    CHECK(res.throughput_one);

    for (size_t i = 0; i < n; ++i) {
        float expect[9];
        lbm_collide_cell(cells[i].data(), expect);
        for (int p = 0; p < 9; ++p) {
            CAPTURE(i);
            CAPTURE(p);
            CHECK(res.output.data[i][static_cast<size_t>(p)] ==
                  float_to_word(expect[p]));
        }
    }
}

TEST_CASE("compiled full processor reproduces the reference step bit for bit") {
    CompiledDesign d = compile_spd_file(design_path("lbm.spd"));
    PluginRegistry plugins = builtin_plugins();
    StreamSimulator sim(d.dfg, d.program, d.equations,
                        d.schedule.pipeline_depth, plugins);

    // The stream-translation unit is bound to 64-cell rows, so any test
    // lattice must be 64 wide.
    Lattice l = make_channel(64, 4);
    Stream in = lattice_to_stream(l);
    REQUIRE(in.fields == sim.input_fields());

    SimResult res = sim.run(in);
    REQUIRE(res.output.size() == l.cells());
    CHECK(res.depth_observed == d.schedule.pipeline_depth);
    CHECK(res.throughput_one);

    Lattice got = stream_to_lattice(res.output, 64, 4);
    Lattice want = lbm_step_reference(l);
    CHECK(got.attr == want.attr);
    size_t mismatches = 0;
    for (int p = 0; p < 9; ++p)
        for (size_t j = 0; j < l.cells(); ++j)
            if (float_to_word(got.f[static_cast<size_t>(p)][j]) !=
                float_to_word(want.f[static_cast<size_t>(p)][j]))
                ++mismatches;
    CHECK(mismatches == 0);
}
