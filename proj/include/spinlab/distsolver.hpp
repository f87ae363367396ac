#ifndef SPINLAB_DISTSOLVER_HPP
#define SPINLAB_DISTSOLVER_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "spinlab/rng.hpp"

// Discrete search for joint densities rho(Z_A, Z_B, Z_AB) that keep the
// uniform single/pairwise marginals while matching the quadrant law
// P(up-up | Z_AB) = (1+Z_AB)/4, via marginal-preserving tetrahedron
// redistribution moves on a cubic grid.

namespace spinlab::distsolver {

struct DensityGrid {
    int n = 0;
    std::vector<double> cells; // index (i*n + j)*n + k, axes (Z_A, Z_B, Z_AB)

    double cell_width() const { return 2.0 / n; }
    double cell_volume() const { return cell_width() * cell_width() * cell_width(); }
    double center(int idx) const { return -1.0 + (idx + 0.5) * cell_width(); }
    double& at(int i, int j, int k) { return cells[(static_cast<size_t>(i) * n + j) * n + k]; }
    double at(int i, int j, int k) const { return cells[(static_cast<size_t>(i) * n + j) * n + k]; }
    double integral() const;
    // Transpose the Z_A and Z_B axes.
    DensityGrid mirrored() const;
};

DensityGrid uniform_grid(int n);

// Cell-averaged tetrahedral delta density: per cell, 1/8 of the plane measure
// crossing the cell divided by the cell volume, by exact polygon clipping.
DensityGrid discretize_eq11(int n);

// Redistribution move on the 8 cells (i1,i2)x(j1,j2)x(k1,k2): cells whose
// index-parity (count of second coordinates picked) is even gain delta, odd
// lose delta. Preserves all three pairwise marginals exactly.
struct MoveSpec {
    int i1, i2, j1, j2, k1, k2;
    double delta;
};

struct MoveResult {
    bool accepted;
    double max_feasible; // largest |delta| of the same sign that would pass
};

// In-place; rejects (grid untouched) if any losing cell would go negative.
MoveResult apply_move(DensityGrid& grid, const MoveSpec& move);

struct ResidualReport {
    double r_c1;  // max |Z_AB marginal density - 1/2|
    double r_c2a; // max |(Z_A, Z_AB) pairwise marginal density - 1/4|
    double r_c2b; // max |(Z_B, Z_AB) pairwise marginal density - 1/4|
    double r_c3;  // max |P(Z_A>0, Z_B>0 | slice) - (1+z)/4| over slices
};

ResidualReport residuals(const DensityGrid& grid);

// Move-selection policy: proposes the coordinate pairs for the next move.
struct MoveProposal {
    int i1, i2, j1, j2, k1, k2;
};
using Schedule = std::function<MoveProposal(RandomStream&, const DensityGrid&)>;

Schedule default_schedule();
// Same proposals with the Z_A/Z_B roles swapped (for the mirror property).
Schedule mirrored_schedule(Schedule inner);

enum class SolveStatus { Converged, Stalled, BudgetExhausted };

struct SolveOptions {
    double tol = 5e-3;
    std::uint64_t max_moves = 2000000; // accepted-move budget
};

struct TracePoint {
    std::uint64_t moves;
    ResidualReport res;
};

struct SolveResult {
    SolveStatus status;
    std::uint64_t move_count;
    ResidualReport report;
    std::vector<TracePoint> trace; // one point per sweep
};

// Drives redistribution moves until the quadrant residual drops below tol,
// the budget runs out, or a full sweep finds nothing to accept. The merit
// (sum of squared per-slice quadrant deviations) never increases; moves that
// leave it unchanged are taken only when they sharpen the density
// (increase sum rho^2), which drains mass onto the delta planes.
SolveResult solve(DensityGrid& grid, const Schedule& schedule, const SolveOptions& opts,
                  RandomStream& rng);

// Fraction of total mass in cells whose center is within `slack` cell widths
// of one of the four delta planes (max-norm distance |form|/3).
double plane_mass_fraction(const DensityGrid& grid, double slack = 1.0);

// Snapshot text format: optional '#' comment lines, a header `n=<int>`, then
// one `i j k density` row per cell.
void write_snapshot(std::ostream& out, const DensityGrid& grid,
                    const std::vector<std::string>& comments = {});
DensityGrid read_snapshot(std::istream& in);

std::string residuals_json(const ResidualReport& rep, std::uint64_t move_count);

} // namespace spinlab::distsolver

#endif
