#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spdc/stream.hpp"

namespace spdc {

// D2Q9 lattice state: nine distribution planes plus one attribute word per
// cell, row-major (cell index j = x + nx*y). Plane order and displacements:
//   0 rest, 1 E(+1), 2 N(+nx), 3 W(-1), 4 S(-nx),
//   5 NE(+nx+1), 6 NW(+nx-1), 7 SW(-nx-1), 8 SE(-nx+1).
struct Lattice {
    int nx = 0, ny = 0;
    std::array<std::vector<float>, 9> f;
    std::vector<uint32_t> attr;

    size_t cells() const {
        return static_cast<size_t>(nx) * static_cast<size_t>(ny);
    }
};

// Double-precision copy for error analysis.
struct LatticeD {
    int nx = 0, ny = 0;
    std::array<std::vector<double>, 9> f;
    std::vector<uint32_t> attr;

    size_t cells() const {
        return static_cast<size_t>(nx) * static_cast<size_t>(ny);
    }
};

// Attribute bits acted on by the boundary stage.
inline constexpr uint32_t kAttrWall = 1u << 3;    // bounce-back cell
inline constexpr uint32_t kAttrInlet = 1u << 9;   // fixed density, east flow
inline constexpr uint32_t kAttrOutlet = 1u << 11; // fixed density, drain

// Model constants, written exactly as they appear in the processor design
// so a decimal literal parses to the same value on both paths.
struct LbmConstants {
    static constexpr double rho_in = 1.05;
    static constexpr double rho_out = 0.95;
    static constexpr double one_tau = 0.516262261;  // 1/tau

    // Lattice weights: 4/9 rest, 1/9 axes, 1/36 diagonals.
    static constexpr std::array<double, 9> weight = {
        4.0 / 9.0,  1.0 / 9.0,  1.0 / 9.0,  1.0 / 9.0, 1.0 / 9.0,
        1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0};
};

/// Collision for one cell with the same operator tree the generated
/// pipeline uses (binary32 throughout, no contraction): macroscopic sums,
/// equilibrium with one shared reciprocal of density, then BGK relaxation
/// out[i] = in[i] - one_tau*(in[i] - eq[i]).
void lbm_collide_cell(const float in[9], float out[9]);
void lbm_collide_cell_d(const double in[9], double out[9]);

/// Macroscopic density and velocity: rho = sum f_i, (u,v) = sum(c_i f_i)/rho.
void lbm_macro(const double f[9], double& rho, double& u, double& v);

/// Textbook D2Q9 equilibrium, f_i = rho*(A + 3A(c.V) + 4.5A(c.V)^2
/// - 1.5A|V|^2), evaluated straightforwardly in double. Used as an
/// independent check on the processor's restructured form.
void lbm_equilibrium(double rho, double u, double v, double feq[9]);

/// One full processor step, frame in isolation: collision (wall cells carry
/// their planes through unchanged), stream-order translation of each plane
/// by its displacement (slots pulled from before the first or after the
/// last cell read as zero), then per-cell constant-density substitution and
/// wall bounce-back driven by the attribute bits. Matches the hardware
/// pipeline bit for bit on a single cold frame.
Lattice lbm_step_reference(const Lattice& in);
LatticeD lbm_step_reference_d(const LatticeD& in);

LatticeD to_double(const Lattice& l);

/// Total of all distribution values, summed in double.
double total_mass(const Lattice& l);
double total_mass_d(const LatticeD& l);

/// Pressure-driven channel: bounce-back walls along the north and south
/// rows (corners included), fixed inflow density on the rest of the west
/// column, fixed outflow density on the east column; every cell starts at
/// rest-state equilibrium, density 1.
Lattice make_channel(int nx, int ny);

/// Sealed box: bounce-back walls on all four edges, no inlet or outlet,
/// and a centered Gaussian density bump of the given amplitude so the run
/// has transient dynamics. Wall cells start with empty planes; combined
/// with the collision hold on walls, nothing ever aims past the frame edge
/// and total mass stays put apart from rounding.
Lattice make_box(int nx, int ny, float bump_amplitude = 0.05f);

// Lattice container file: text header (magic, nx, ny) followed by ten
// little-endian word planes (nine binary32 distributions, one raw
// attribute plane).
Lattice read_lattice(const std::string& path);
void write_lattice(const Lattice& l, const std::string& path);

/// Flatten to the processor's input stream: one vector per cell in stream
/// order, fields if0..if8 plus the attribute word; framed as one packet.
Stream lattice_to_stream(const Lattice& l);

/// Rebuild a lattice from an output stream (10 data fields per vector).
Lattice stream_to_lattice(const Stream& s, int nx, int ny);

/// Flow-field table per cell (x, y, density, x/y velocity) for plotting.
void write_flow_csv(const Lattice& l, const std::string& path);

}  // namespace spdc
