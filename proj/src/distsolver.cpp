#include "spinlab/distsolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "spinlab/correlation.hpp"

namespace spinlab::distsolver {

double DensityGrid::integral() const {
    double sum = 0.0;
    for (double v : cells)
        sum += v;
    return sum * cell_volume();
}

DensityGrid DensityGrid::mirrored() const {
    DensityGrid g;
    g.n = n;
    g.cells.resize(cells.size());
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++)
            for (int k = 0; k < n; k++)
                g.at(i, j, k) = at(j, i, k);
    return g;
}

DensityGrid uniform_grid(int n) {
    if (n < 2)
        throw std::invalid_argument("uniform_grid: n must be >= 2");
    DensityGrid g;
    g.n = n;
    g.cells.assign(static_cast<size_t>(n) * n * n, 0.125);
    return g;
}

// ---------------------------------------------------------------------------
// Exact discretization of the four-plane delta density.

namespace {

struct Pt {
    double x, y;
};

// Keep the part of a convex polygon with a*x + b*y <= c.
std::vector<Pt> clip_halfplane(const std::vector<Pt>& poly, double a, double b, double c) {
    std::vector<Pt> out;
    size_t m = poly.size();
    for (size_t v = 0; v < m; v++) {
        const Pt& p = poly[v];
        const Pt& q = poly[(v + 1) % m];
        double fp = a * p.x + b * p.y - c;
        double fq = a * q.x + b * q.y - c;
        if (fp <= 0.0)
            out.push_back(p);
        if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
            double t = fp / (fp - fq);
            out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
        }
    }
    return out;
}

double polygon_area(const std::vector<Pt>& poly) {
    double a2 = 0.0;
    size_t m = poly.size();
    for (size_t v = 0; v < m; v++) {
        const Pt& p = poly[v];
        const Pt& q = poly[(v + 1) % m];
        a2 += p.x * q.y - q.x * p.y;
    }
    return 0.5 * std::fabs(a2);
}

// zab on plane p as alpha*za + beta*zb + gamma
struct PlaneLin {
    double alpha, beta, gamma;
};
const PlaneLin kPlaneLin[4] = {
    {-1.0, -1.0, -1.0}, // za + zb + zab = -1
    {1.0, -1.0, 1.0},   // za - zb - zab = -1
    {1.0, 1.0, -1.0},   // za + zb - zab =  1
    {-1.0, 1.0, 1.0},   // za - zb + zab =  1
};

} // namespace

DensityGrid discretize_eq11(int n) {
    if (n < 2)
        throw std::invalid_argument("discretize_eq11: n must be >= 2");
    DensityGrid g;
    g.n = n;
    g.cells.assign(static_cast<size_t>(n) * n * n, 0.0);
    double w = g.cell_width();
    double vol = g.cell_volume();
    for (int i = 0; i < n; i++) {
        double xa = -1.0 + i * w, xb = xa + w;
        for (int j = 0; j < n; j++) {
            double ya = -1.0 + j * w, yb = ya + w;
            std::vector<Pt> rect = {{xa, ya}, {xb, ya}, {xb, yb}, {xa, yb}};
            for (int k = 0; k < n; k++) {
                double lo = -1.0 + k * w, hi = lo + w;
                double mass = 0.0;
                for (int p = 0; p < 4; p++) {
                    const PlaneLin& L = kPlaneLin[p];
                    // lo <= alpha*za + beta*zb + gamma <= hi
                    std::vector<Pt> poly = clip_halfplane(rect, L.alpha, L.beta, hi - L.gamma);
                    poly = clip_halfplane(poly, -L.alpha, -L.beta, L.gamma - lo);
                    if (poly.size() >= 3)
                        mass += 0.125 * polygon_area(poly);
                }
                g.at(i, j, k) = mass / vol;
            }
        }
    }
    return g;
}

// ---------------------------------------------------------------------------

namespace {

// parity sign of the 8-cell pattern: +1 where an even number of
// second-coordinates was picked
inline double parity_sign(int a, int b, int c) { return ((a + b + c) & 1) ? -1.0 : 1.0; }

// fraction of cell `idx` (of n) lying at positive coordinate
double positive_weight(int idx, int n) {
    double w = 2.0 / n;
    double lo = -1.0 + idx * w, hi = lo + w;
    if (lo >= 0.0)
        return 1.0;
    if (hi <= 0.0)
        return 0.0;
    return hi / (hi - lo);
}

} // namespace

MoveResult apply_move(DensityGrid& grid, const MoveSpec& move) {
    int n = grid.n;
    const int is[2] = {move.i1, move.i2};
    const int js[2] = {move.j1, move.j2};
    const int ks[2] = {move.k1, move.k2};
    if (move.i1 == move.i2 || move.j1 == move.j2 || move.k1 == move.k2)
        throw std::invalid_argument("apply_move: coordinate pairs must be distinct");
    for (int v : {move.i1, move.i2, move.j1, move.j2, move.k1, move.k2})
        if (v < 0 || v >= n)
            throw std::out_of_range("apply_move: cell index out of range");

    double feasible = 0.0;
    bool first = true;
    for (int a = 0; a < 2; a++)
        for (int b = 0; b < 2; b++)
            for (int c = 0; c < 2; c++) {
                if (parity_sign(a, b, c) * move.delta < 0.0 || move.delta == 0.0) {
                    // this cell loses |delta| (or delta==0: bound over odd cells)
                    double v = grid.at(is[a], js[b], ks[c]);
                    feasible = first ? v : std::min(feasible, v);
                    first = false;
                }
            }
    if (std::fabs(move.delta) > feasible)
        return {false, feasible};
    for (int a = 0; a < 2; a++)
        for (int b = 0; b < 2; b++)
            for (int c = 0; c < 2; c++)
                grid.at(is[a], js[b], ks[c]) += parity_sign(a, b, c) * move.delta;
    return {true, feasible};
}

ResidualReport residuals(const DensityGrid& grid) {
    int n = grid.n;
    ResidualReport rep{0.0, 0.0, 0.0, 0.0};
    // slice sums and quadrant sums per Z_AB slice
    std::vector<double> slice(n, 0.0), quad(n, 0.0);
    for (int k = 0; k < n; k++) {
        double s = 0.0, q = 0.0;
        for (int i = 0; i < n; i++) {
            double wi = positive_weight(i, n);
            for (int j = 0; j < n; j++) {
                double v = grid.at(i, j, k);
                s += v;
                if (wi > 0.0) {
                    double wj = positive_weight(j, n);
                    if (wj > 0.0)
                        q += wi * wj * v;
                }
            }
        }
        slice[k] = s;
        quad[k] = q;
    }
    for (int k = 0; k < n; k++) {
        double marg = slice[k] * 4.0 / (static_cast<double>(n) * n);
        rep.r_c1 = std::max(rep.r_c1, std::fabs(marg - 0.5));
        if (slice[k] > 0.0) {
            double target = 0.25 * (1.0 + grid.center(k));
            rep.r_c3 = std::max(rep.r_c3, std::fabs(quad[k] / slice[k] - target));
        }
    }
    for (int k = 0; k < n; k++) {
        for (int i = 0; i < n; i++) {
            double sa = 0.0, sb = 0.0;
            for (int j = 0; j < n; j++) {
                sa += grid.at(i, j, k);
                sb += grid.at(j, i, k);
            }
            rep.r_c2a = std::max(rep.r_c2a, std::fabs(sa * 2.0 / n - 0.25));
            rep.r_c2b = std::max(rep.r_c2b, std::fabs(sb * 2.0 / n - 0.25));
        }
    }
    return rep;
}

Schedule default_schedule() {
    return [](RandomStream& rng, const DensityGrid& grid) {
        int n = grid.n;
        MoveProposal p;
        p.i1 = rng.next_index(n);
        p.i2 = rng.next_index(n - 1);
        if (p.i2 >= p.i1)
            p.i2++;
        p.j1 = rng.next_index(n);
        p.j2 = rng.next_index(n - 1);
        if (p.j2 >= p.j1)
            p.j2++;
        p.k1 = rng.next_index(n);
        p.k2 = rng.next_index(n - 1);
        if (p.k2 >= p.k1)
            p.k2++;
        return p;
    };
}

Schedule mirrored_schedule(Schedule inner) {
    return [inner](RandomStream& rng, const DensityGrid& grid) {
        MoveProposal p = inner(rng, grid);
        std::swap(p.i1, p.j1);
        std::swap(p.i2, p.j2);
        return p;
    };
}

SolveResult solve(DensityGrid& grid, const Schedule& schedule, const SolveOptions& opts,
                  RandomStream& rng) {
    int n = grid.n;
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("solve: n must be even and >= 2");
    {
        ResidualReport r0 = residuals(grid);
        if (r0.r_c1 > 1e-12 || r0.r_c2a > 1e-12 || r0.r_c2b > 1e-12)
            throw std::invalid_argument("solve: grid violates the conserved marginals");
    }
    int h = n / 2; // first positive cell index

    // Running slice sums S[k] and quadrant sums Q[k]. Accumulated in a
    // transpose-symmetric order (diagonal terms, then (i,j)+(j,i) pairs) so
    // that a mirrored run produces bit-identical floating point.
    std::vector<double> S(n, 0.0), Q(n, 0.0), target(n);
    for (int k = 0; k < n; k++) {
        double s = 0.0, q = 0.0;
        for (int i = 0; i < n; i++) {
            double d = grid.at(i, i, k);
            s += d;
            if (i >= h)
                q += d;
        }
        for (int i = 0; i < n; i++)
            for (int j = i + 1; j < n; j++) {
                double pair = grid.at(i, j, k) + grid.at(j, i, k);
                s += pair;
                if (i >= h && j >= h)
                    q += pair;
            }
        S[k] = s;
        Q[k] = q;
        target[k] = 0.25 * (1.0 + grid.center(k));
    }

    auto r_c3_now = [&]() {
        double worst = 0.0;
        for (int k = 0; k < n; k++)
            worst = std::max(worst, std::fabs(Q[k] / S[k] - target[k]));
        return worst;
    };

    const std::uint64_t sweep_len = 8ULL * n * n * n;
    std::uint64_t accepted = 0, since_sweep = 0, accepted_in_sweep = 0;
    SolveResult result;
    result.trace.push_back({0, residuals(grid)});
    SolveStatus status = SolveStatus::BudgetExhausted;
    bool tol_met = r_c3_now() <= opts.tol;

    while (accepted < opts.max_moves) {
        MoveProposal mp = schedule(rng, grid);
        since_sweep++;

        const int is[2] = {mp.i1, mp.i2};
        const int js[2] = {mp.j1, mp.j2};
        const int ks[2] = {mp.k1, mp.k2};
        // quadrant parity count of the (i,j) pattern in slice k1 (k2 flips)
        int sq = 0;
        for (int a = 0; a < 2; a++)
            for (int b = 0; b < 2; b++)
                if (is[a] >= h && js[b] >= h)
                    sq += ((a + b) & 1) ? -1 : 1;

        // feasibility bounds: dpos empties the odd-parity cells, dneg the even
        double dpos = 1e300, dneg = 1e300;
        for (int a = 0; a < 2; a++)
            for (int b = 0; b < 2; b++)
                for (int c = 0; c < 2; c++) {
                    double v = grid.at(is[a], js[b], ks[c]);
                    if (((a + b + c) & 1) != 0)
                        dpos = std::min(dpos, v);
                    else
                        dneg = std::min(dneg, v);
                }
        if (dpos <= 0.0 && dneg <= 0.0)
            goto sweep_check;

        {
            double delta = 0.0;
            if (sq != 0) {
                // merit-affecting move: minimize the two touched slice terms
                double e1 = Q[ks[0]] / S[ks[0]] - target[ks[0]];
                double e2 = Q[ks[1]] / S[ks[1]] - target[ks[1]];
                double g1 = sq / S[ks[0]];
                double g2 = -sq / S[ks[1]];
                double B = e1 * g1 + e2 * g2;
                double C = g1 * g1 + g2 * g2;
                double cand[3];
                int nc = 0;
                cand[nc++] = std::clamp(-B / C, -dneg, dpos);
                cand[nc++] = dpos;
                cand[nc++] = -dneg;
                double best = 0.0, best_gain = 0.0;
                for (int t = 0; t < nc; t++) {
                    double d = cand[t];
                    double gain = 2.0 * d * B + d * d * C;
                    if (gain < best_gain) {
                        best_gain = gain;
                        best = d;
                    }
                }
                if (best_gain >= -1e-30)
                    goto sweep_check;
                delta = best;
            } else {
                // merit-neutral: sharpen the density along the gradient of
                // sum(rho^2); transpose-safe two-term groupings throughout
                double G = 0.0;
                for (int c = 0; c < 2; c++) {
                    double even = grid.at(is[0], js[0], ks[c]) + grid.at(is[1], js[1], ks[c]);
                    double odd = grid.at(is[0], js[1], ks[c]) + grid.at(is[1], js[0], ks[c]);
                    G += (c == 0) ? (even - odd) : (odd - even);
                }
                double d = (G >= 0.0) ? dpos : -dneg;
                if (d == 0.0 || std::fabs(d) < 1e-12)
                    goto sweep_check;
                double gain = 2.0 * d * G + 8.0 * d * d;
                if (gain <= 1e-15)
                    goto sweep_check;
                delta = d;
            }

            for (int a = 0; a < 2; a++)
                for (int b = 0; b < 2; b++)
                    for (int c = 0; c < 2; c++)
                        grid.at(is[a], js[b], ks[c]) += parity_sign(a, b, c) * delta;
            if (sq != 0) {
                Q[ks[0]] += delta * sq;
                Q[ks[1]] -= delta * sq;
            }
            accepted++;
            accepted_in_sweep++;
        }

    sweep_check:
        if (since_sweep >= sweep_len) {
            result.trace.push_back({accepted, residuals(grid)});
            tol_met = r_c3_now() <= opts.tol;
            if (accepted_in_sweep == 0) {
                status = tol_met ? SolveStatus::Converged : SolveStatus::Stalled;
                break;
            }
            since_sweep = 0;
            accepted_in_sweep = 0;
        }
    }

    if (status == SolveStatus::BudgetExhausted && r_c3_now() <= opts.tol)
        status = SolveStatus::Converged;
    result.status = status;
    result.move_count = accepted;
    result.report = residuals(grid);
    if (result.trace.empty() || result.trace.back().moves != accepted)
        result.trace.push_back({accepted, result.report});
    return result;
}

double plane_mass_fraction(const DensityGrid& grid, double slack) {
    int n = grid.n;
    double near_mass = 0.0, total = 0.0;
    double bound = 3.0 * slack * grid.cell_width();
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++)
            for (int k = 0; k < n; k++) {
                correlation::CosineTriple c{grid.center(i), grid.center(j), grid.center(k)};
                double best = 1e300;
                for (int p = 0; p < 4; p++)
                    best = std::min(best, std::fabs(correlation::plane_form(p, c)));
                double v = grid.at(i, j, k);
                total += v;
                if (best <= bound)
                    near_mass += v;
            }
    return total > 0.0 ? near_mass / total : 0.0;
}

void write_snapshot(std::ostream& out, const DensityGrid& grid,
                    const std::vector<std::string>& comments) {
    for (const std::string& c : comments)
        out << "# " << c << "\n";
    out << "n=" << grid.n << "\n";
    char buf[64];
    for (int i = 0; i < grid.n; i++)
        for (int j = 0; j < grid.n; j++)
            for (int k = 0; k < grid.n; k++) {
                std::snprintf(buf, sizeof buf, "%d %d %d %.17g\n", i, j, k, grid.at(i, j, k));
                out << buf;
            }
}

DensityGrid read_snapshot(std::istream& in) {
    std::string line;
    int n = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (line.rfind("n=", 0) == 0) {
            n = std::stoi(line.substr(2));
            break;
        }
        throw std::runtime_error("read_snapshot: expected n=<int> header");
    }
    if (n < 2)
        throw std::runtime_error("read_snapshot: missing or bad header");
    DensityGrid g;
    g.n = n;
    g.cells.assign(static_cast<size_t>(n) * n * n, 0.0);
    int i, j, k;
    double v;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream row(line);
        if (!(row >> i >> j >> k >> v))
            throw std::runtime_error("read_snapshot: bad row: " + line);
        g.at(i, j, k) = v;
    }
    return g;
}

std::string residuals_json(const ResidualReport& rep, std::uint64_t move_count) {
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "{\"r_c1\": %.17g, \"r_c2a\": %.17g, \"r_c2b\": %.17g, \"r_c3\": %.17g, "
                  "\"move_count\": %llu}",
                  rep.r_c1, rep.r_c2a, rep.r_c2b, rep.r_c3,
                  static_cast<unsigned long long>(move_count));
    return buf;
}

} // namespace spinlab::distsolver
