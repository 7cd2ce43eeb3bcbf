// Software model of the D2Q9 processor. The float functions replicate the
// generated pipeline's arithmetic exactly — same operator tree, same
// binary32 rounding at every step, constants converted from the same
// decimal text — so a hardware run on a cold frame can be compared word
// for word. The double functions keep the identical structure in binary64
// for measuring accumulated rounding error.

#include "spdc/lbm.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spdc/diag.hpp"

namespace spdc {

namespace {

// The processor's tuned constants, one decimal literal per design
// parameter (double first, then narrowed, matching how parameters reach
// the operator graph).
template <typename T>
struct K {
    static constexpr T P0 = static_cast<T>(0.666666666666667);    // 2/3
    static constexpr T P1 = static_cast<T>(0.166666666666667);    // 1/6
    static constexpr T P2 = static_cast<T>(0.5);
    static constexpr T P3 = static_cast<T>(0.333333333333333);    // 1/3
    static constexpr T P4 = static_cast<T>(0.166666666666667);    // 1/6
    static constexpr T P5 = static_cast<T>(0.111111111111111);    // 1/9
    static constexpr T P6 = static_cast<T>(0.0277777777777778);   // 1/36
    static constexpr T P7 = static_cast<T>(0.0833333333333333);   // 1/12
    static constexpr T P8 = static_cast<T>(0.125);
    static constexpr T P9 = static_cast<T>(0.0416666666666667);   // 1/24
    static constexpr T Pa = static_cast<T>(0.444444444444444);    // 4/9
    static constexpr T Pb = static_cast<T>(0.666666666666667);    // 2/3
    static constexpr T one_tau = static_cast<T>(0.516262261);
    static constexpr T rho_in = static_cast<T>(1.05);
    static constexpr T rho_out = static_cast<T>(0.95);
    static constexpr T one = static_cast<T>(1.0);
    static constexpr T two = static_cast<T>(2.0);
};

template <typename T>
void collide_cell_t(const T f[9], T out[9]) {
    const T f5M7 = f[5] - f[7];
    const T f6M8 = f[6] - f[8];
    const T f1M3 = f[1] - f[3];
    const T f2M4 = f[2] - f[4];
    const T rho = ((f[5] + f[7]) + (f[6] + f[8])) +
                  (((f[1] + f[3]) + (f[2] + f[4])) + f[0]);
    const T rho_u = (f5M7 - f6M8) + f1M3;
    const T rho_v = (f5M7 + f6M8) + f2M4;
    const T rho_uMv = (f1M3 - f2M4) - K<T>::two * f6M8;
    const T rho_uPv = (f1M3 + f2M4) + K<T>::two * f5M7;

    const T rho_u2 = rho_u * rho_u;
    const T rho_v2 = rho_v * rho_v;
    const T rho_uPv2 = rho_uPv * rho_uPv;
    const T rho_uMv2 = rho_uMv * rho_uMv;
    const T rho2 = rho_u2 + rho_v2;
    const T divrho = K<T>::one / rho;

    T eq[9];
    eq[0] = (K<T>::Pa * rho) - ((K<T>::Pb * rho2) * divrho);
    eq[1] = ((K<T>::P5 * rho) + (K<T>::P3 * rho_u)) +
            (((K<T>::P2 * rho_u2) - (K<T>::P4 * rho2)) * divrho);
    eq[2] = ((K<T>::P5 * rho) + (K<T>::P3 * rho_v)) +
            (((K<T>::P2 * rho_v2) - (K<T>::P4 * rho2)) * divrho);
    eq[3] = ((K<T>::P5 * rho) - (K<T>::P3 * rho_u)) +
            (((K<T>::P2 * rho_u2) - (K<T>::P4 * rho2)) * divrho);
    eq[4] = ((K<T>::P5 * rho) - (K<T>::P3 * rho_v)) +
            (((K<T>::P2 * rho_v2) - (K<T>::P4 * rho2)) * divrho);
    eq[5] = ((K<T>::P6 * rho) + (K<T>::P7 * rho_uPv)) +
            (((K<T>::P8 * rho_uPv2) - (K<T>::P9 * rho2)) * divrho);
    eq[6] = ((K<T>::P6 * rho) - (K<T>::P7 * rho_uMv)) +
            (((K<T>::P8 * rho_uMv2) - (K<T>::P9 * rho2)) * divrho);
    eq[7] = ((K<T>::P6 * rho) - (K<T>::P7 * rho_uPv)) +
            (((K<T>::P8 * rho_uPv2) - (K<T>::P9 * rho2)) * divrho);
    eq[8] = ((K<T>::P6 * rho) + (K<T>::P7 * rho_uMv)) +
            (((K<T>::P8 * rho_uMv2) - (K<T>::P9 * rho2)) * divrho);

    for (int i = 0; i < 9; ++i)
        out[i] = f[i] - K<T>::one_tau * (f[i] - eq[i]);
}

// Constant-density substitution at inlet/outlet cells, then wall
// bounce-back, mirroring the processor's multiplexer cascade. `tr` holds
// the post-translation values of the cell.
template <typename T>
void boundary_cell_t(uint32_t attr, const T tr[9], T out[9]) {
    const bool wall = (attr & kAttrWall) != 0;
    const bool inlet = (attr & kAttrInlet) != 0;
    const bool outlet = (attr & kAttrOutlet) != 0;

    // Density deficit over the six directions known at the boundary; at
    // the outlet the unknown west-moving trio is replaced by its mirrored
    // east-moving counterpart.
    const T f3_tmp = outlet ? tr[1] : tr[3];
    const T f6_tmp = outlet ? tr[8] : tr[6];
    const T f7_tmp = outlet ? tr[5] : tr[7];
    const T rho_given = outlet ? K<T>::rho_out : K<T>::rho_in;
    const T rho_diff =
        rho_given -
        (((tr[0] + tr[2]) + (f3_tmp + tr[4])) + (f6_tmp + f7_tmp));
    // Deficit split 2/3 onto the axis direction, 1/6 onto each diagonal,
    // which restores the prescribed density exactly.
    const T f1_sub = K<T>::P0 * rho_diff;
    const T f5_sub = K<T>::P1 * rho_diff;

    const T f1_cp = inlet ? f1_sub : tr[1];
    const T f5_cp = inlet ? f5_sub : tr[5];
    const T f8_cp = inlet ? f5_sub : tr[8];
    const T f3_cp = outlet ? f1_sub : tr[3];
    const T f7_cp = outlet ? f5_sub : tr[7];
    const T f6_cp = outlet ? f5_sub : tr[6];

    out[0] = tr[0];
    out[1] = wall ? f3_cp : f1_cp;
    out[2] = wall ? tr[4] : tr[2];
    out[3] = wall ? f1_cp : f3_cp;
    out[4] = wall ? tr[2] : tr[4];
    out[5] = wall ? f7_cp : f5_cp;
    out[6] = wall ? f8_cp : f6_cp;
    out[7] = wall ? f5_cp : f7_cp;
    out[8] = wall ? f6_cp : f8_cp;
}

template <typename T, typename LatT>
LatT step_impl(const LatT& in) {
    const int nx = in.nx;
    const int64_t n = static_cast<int64_t>(in.cells());
    LatT out;
    out.nx = in.nx;
    out.ny = in.ny;
    out.attr = in.attr;

    std::array<std::vector<T>, 9> co, tr;
    for (int p = 0; p < 9; ++p) {
        co[p].resize(static_cast<size_t>(n));
        tr[p].resize(static_cast<size_t>(n));
        out.f[p].resize(static_cast<size_t>(n));
    }

    T cell_in[9], cell_out[9];
    for (int64_t j = 0; j < n; ++j) {
        for (int p = 0; p < 9; ++p) cell_in[p] = in.f[p][j];
        if ((in.attr[j] & kAttrWall) != 0u) {
            // Solid cells hold their planes: relaxing them would aim mass at
            // the frame edge, where the clipped shift cannot bring it back.
            for (int p = 0; p < 9; ++p) co[p][j] = cell_in[p];
            continue;
        }
        collide_cell_t(cell_in, cell_out);
        for (int p = 0; p < 9; ++p) co[p][j] = cell_out[p];
    }

    // Plane p shifts by its displacement along the flattened cell stream.
    const int64_t d[9] = {0,      1,      nx,      -1,      -int64_t(nx),
                          nx + 1, nx - 1, -nx - 1, -nx + 1};
    for (int p = 0; p < 9; ++p) {
        for (int64_t j = 0; j < n; ++j) {
            const int64_t s = j - d[p];
            tr[p][j] = (s >= 0 && s < n) ? co[p][s] : T(0);
        }
    }

    for (int64_t j = 0; j < n; ++j) {
        for (int p = 0; p < 9; ++p) cell_in[p] = tr[p][j];
        boundary_cell_t(in.attr[j], cell_in, cell_out);
        for (int p = 0; p < 9; ++p) out.f[p][j] = cell_out[p];
    }
    return out;
}

void store_le32(std::string& out, uint32_t w) {
    out.push_back(static_cast<char>(w & 0xff));
    out.push_back(static_cast<char>((w >> 8) & 0xff));
    out.push_back(static_cast<char>((w >> 16) & 0xff));
    out.push_back(static_cast<char>((w >> 24) & 0xff));
}

uint32_t load_le32(const char* p) {
    return static_cast<uint32_t>(static_cast<unsigned char>(p[0])) |
           (static_cast<uint32_t>(static_cast<unsigned char>(p[1])) << 8) |
           (static_cast<uint32_t>(static_cast<unsigned char>(p[2])) << 16) |
           (static_cast<uint32_t>(static_cast<unsigned char>(p[3])) << 24);
}

}  // namespace

void lbm_collide_cell(const float in[9], float out[9]) {
    collide_cell_t<float>(in, out);
}

void lbm_collide_cell_d(const double in[9], double out[9]) {
    collide_cell_t<double>(in, out);
}

namespace {
constexpr int kCx[9] = {0, 1, 0, -1, 0, 1, -1, -1, 1};
constexpr int kCy[9] = {0, 0, 1, 0, -1, 1, 1, -1, -1};
}  // namespace

void lbm_macro(const double f[9], double& rho, double& u, double& v) {
    rho = 0.0;
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < 9; ++i) {
        rho += f[i];
        mx += kCx[i] * f[i];
        my += kCy[i] * f[i];
    }
    u = mx / rho;
    v = my / rho;
}

void lbm_equilibrium(double rho, double u, double v, double feq[9]) {
    const double v2 = u * u + v * v;
    for (int i = 0; i < 9; ++i) {
        const double a = LbmConstants::weight[static_cast<size_t>(i)];
        const double cv = kCx[i] * u + kCy[i] * v;
        feq[i] = rho * (a + 3.0 * a * cv + 4.5 * a * cv * cv -
                        1.5 * a * v2);
    }
}

Lattice lbm_step_reference(const Lattice& in) {
    return step_impl<float, Lattice>(in);
}

LatticeD lbm_step_reference_d(const LatticeD& in) {
    return step_impl<double, LatticeD>(in);
}

LatticeD to_double(const Lattice& l) {
    LatticeD d;
    d.nx = l.nx;
    d.ny = l.ny;
    d.attr = l.attr;
    for (int p = 0; p < 9; ++p)
        d.f[p].assign(l.f[p].begin(), l.f[p].end());
    return d;
}

double total_mass(const Lattice& l) {
    double m = 0.0;
    for (int p = 0; p < 9; ++p)
        for (float v : l.f[p]) m += static_cast<double>(v);
    return m;
}

double total_mass_d(const LatticeD& l) {
    double m = 0.0;
    for (int p = 0; p < 9; ++p)
        for (double v : l.f[p]) m += v;
    return m;
}

namespace {

Lattice blank_lattice(int nx, int ny) {
    if (nx < 4 || ny < 4)
        fail(Errc::SizeMismatch, "lattice must be at least 4x4");
    Lattice l;
    l.nx = nx;
    l.ny = ny;
    for (int p = 0; p < 9; ++p) l.f[p].assign(l.cells(), 0.0f);
    l.attr.assign(l.cells(), 0u);
    return l;
}

void fill_equilibrium(Lattice& l, int64_t j, double rho) {
    for (int p = 0; p < 9; ++p)
        l.f[p][static_cast<size_t>(j)] =
            static_cast<float>(LbmConstants::weight[static_cast<size_t>(p)] *
                               rho);
}

}  // namespace

Lattice make_channel(int nx, int ny) {
    Lattice l = blank_lattice(nx, ny);
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            const int64_t j = x + static_cast<int64_t>(nx) * y;
            uint32_t a = 0;
            if (y == 0 || y == ny - 1)
                a = kAttrWall;
            else if (x == 0)
                a = kAttrInlet;
            else if (x == nx - 1)
                a = kAttrOutlet;
            l.attr[static_cast<size_t>(j)] = a;
            fill_equilibrium(l, j, 1.0);
        }
    }
    return l;
}

Lattice make_box(int nx, int ny, float bump_amplitude) {
    Lattice l = blank_lattice(nx, ny);
    const double cx = (nx - 1) / 2.0;
    const double cy = (ny - 1) / 2.0;
    const double sigma = std::min(nx, ny) / 8.0;
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            const int64_t j = x + static_cast<int64_t>(nx) * y;
            if (x == 0 || x == nx - 1 || y == 0 || y == ny - 1) {
                // Solid rim cells start empty; all mass lives in the fluid
                // interior where the sealed cavity can recirculate it.
                l.attr[static_cast<size_t>(j)] = kAttrWall;
                continue;
            }
            const double r2 =
                (x - cx) * (x - cx) + (y - cy) * (y - cy);
            const double rho =
                1.0 + bump_amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
            fill_equilibrium(l, j, rho);
        }
    }
    return l;
}

Lattice read_lattice(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::FileNotFound, "cannot open '" + path + "'");
    std::string magic, dims;
    if (!std::getline(in, magic) || magic != "spdlat 1")
        fail(Errc::BadStreamFile, "'" + path + "': not a lattice file");
    if (!std::getline(in, dims))
        fail(Errc::BadStreamFile, "'" + path + "': missing dimensions");
    std::istringstream ds(dims);
    int nx = 0, ny = 0;
    if (!(ds >> nx >> ny) || nx < 1 || ny < 1)
        fail(Errc::BadStreamFile, "'" + path + "': bad dimensions '" + dims +
                                      "'");
    Lattice l = blank_lattice(nx, ny);
    const size_t n = l.cells();
    std::vector<char> buf(n * 4);
    for (int p = 0; p < 10; ++p) {
        if (!in.read(buf.data(), static_cast<std::streamsize>(buf.size())))
            fail(Errc::BadStreamFile,
                 "'" + path + "': truncated (plane " + std::to_string(p) +
                     ")");
        for (size_t j = 0; j < n; ++j) {
            uint32_t w = load_le32(buf.data() + j * 4);
            if (p < 9)
                l.f[static_cast<size_t>(p)][j] = word_to_float(w);
            else
                l.attr[j] = w;
        }
    }
    return l;
}

void write_lattice(const Lattice& l, const std::string& path) {
    std::string out = "spdlat 1\n" + std::to_string(l.nx) + " " +
                      std::to_string(l.ny) + "\n";
    out.reserve(out.size() + l.cells() * 40);
    for (int p = 0; p < 10; ++p) {
        for (size_t j = 0; j < l.cells(); ++j) {
            uint32_t w = p < 9 ? float_to_word(l.f[static_cast<size_t>(p)][j])
                               : l.attr[j];
            store_le32(out, w);
        }
    }
    std::ofstream os(path, std::ios::binary);
    if (!os || !os.write(out.data(), static_cast<std::streamsize>(out.size())))
        fail(Errc::IoError, "cannot write '" + path + "'");
}

Stream lattice_to_stream(const Lattice& l) {
    Stream s;
    for (int p = 0; p < 9; ++p)
        s.fields.push_back("if" + std::to_string(p));
    s.fields.push_back("iAtr_RAW");
    for (size_t j = 0; j < l.cells(); ++j) {
        std::vector<uint32_t> row(10);
        for (int p = 0; p < 9; ++p)
            row[static_cast<size_t>(p)] =
                float_to_word(l.f[static_cast<size_t>(p)][j]);
        row[9] = l.attr[j];
        s.push(std::move(row));
    }
    s.frame_all();
    return s;
}

Lattice stream_to_lattice(const Stream& s, int nx, int ny) {
    if (s.width() != 10)
        fail(Errc::SizeMismatch,
             "lattice stream needs 10 fields, got " +
                 std::to_string(s.width()));
    if (s.size() != static_cast<size_t>(nx) * static_cast<size_t>(ny))
        fail(Errc::SizeMismatch,
             "stream has " + std::to_string(s.size()) + " vectors, lattice " +
                 std::to_string(nx) + "x" + std::to_string(ny) + " needs " +
                 std::to_string(static_cast<size_t>(nx) *
                                static_cast<size_t>(ny)));
    Lattice l = blank_lattice(nx, ny);
    for (size_t j = 0; j < l.cells(); ++j) {
        for (int p = 0; p < 9; ++p)
            l.f[static_cast<size_t>(p)][j] =
                word_to_float(s.data[j][static_cast<size_t>(p)]);
        l.attr[j] = s.data[j][9];
    }
    return l;
}

void write_flow_csv(const Lattice& l, const std::string& path) {
    std::ofstream os(path);
    if (!os) fail(Errc::IoError, "cannot write '" + path + "'");
    os << "x,y,rho,u,v\n";
    char line[160];
    for (int y = 0; y < l.ny; ++y) {
        for (int x = 0; x < l.nx; ++x) {
            const size_t j =
                static_cast<size_t>(x) + static_cast<size_t>(l.nx) *
                                             static_cast<size_t>(y);
            double f[9];
            for (int p = 0; p < 9; ++p)
                f[p] = static_cast<double>(l.f[static_cast<size_t>(p)][j]);
            const double rho = f[0] + f[1] + f[2] + f[3] + f[4] + f[5] +
                               f[6] + f[7] + f[8];
            const double mx = (f[1] - f[3]) + (f[5] - f[7]) + (f[8] - f[6]);
            const double my = (f[2] - f[4]) + (f[5] - f[7]) + (f[6] - f[8]);
            const double u = rho != 0.0 ? mx / rho : 0.0;
            const double v = rho != 0.0 ? my / rho : 0.0;
            std::snprintf(line, sizeof line, "%d,%d,%.9g,%.9g,%.9g\n", x, y,
                          rho, u, v);
            os << line;
        }
    }
    if (!os) fail(Errc::IoError, "cannot write '" + path + "'");
}

}  // namespace spdc
