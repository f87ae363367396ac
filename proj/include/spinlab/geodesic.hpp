#ifndef SPINLAB_GEODESIC_HPP
#define SPINLAB_GEODESIC_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinlab/io_util.hpp"

// Spacetime engine for the metric
//   ds^2 = cos^2(theta) dt^2 - dr^2 - r^2 dtheta^2 - r^2 sin^2(theta) dphi^2
//          + 2 r sin^2(theta) dphi dt
// metric, connection, geodesic flow, first integrals P/X/A/W, orbit
// classification, plane tilt, node precession, and the sign-of-X outcome.

namespace spinlab::geodesic {

struct State {
    double t, r, theta, phi;           // coordinates
    double u_t, u_r, u_theta, u_phi;   // d(coordinate)/ds
};

struct Metric {
    double g_tt, g_rr, g_thth, g_phph, g_tph;
    // components by index order (t, r, theta, phi)
    double comp(int i, int j) const;
};

Metric metric_components(double r, double theta); // throws on r <= 0

// The thirteen nonzero coefficient families (symmetric in the lower pair).
struct Connection {
    double t_tr;     // sin^2/2r
    double t_rph;    // -sin^2/2
    double r_tph;    // sin^2/2
    double r_thth;   // -r
    double r_phph;   // -r sin^2
    double th_tt;    // -sin cos / r^2
    double th_tph;   // sin cos / r
    double th_rth;   // 1/r
    double th_phph;  // -sin cos
    double ph_tr;    // -cos^2 / 2r^2
    double ph_tth;   // -cos / (r sin)   [pole-singular]
    double ph_rph;   // (1+cos^2) / 2r
    double ph_thph;  // cos / sin        [pole-singular]
    double coeff(int i, int j, int k) const; // Gamma^i_{jk}, index order (t,r,theta,phi)
};

// Throws std::domain_error on r <= 0, or at sin(theta) = 0 where the
// pole-singular coefficients are undefined.
Connection connection(double r, double theta);

struct PoleError : std::runtime_error {
    double s;
    State state;
    PoleError(const std::string& what, double s_, const State& st)
        : std::runtime_error(what), s(s_), state(st) {}
};

struct StepUnderflowError : std::runtime_error {
    double s;
    State state;
    StepUnderflowError(const std::string& what, double s_, const State& st)
        : std::runtime_error(what), s(s_), state(st) {}
};

// Geodesic equations; derivative of all 8 fields per unit affine parameter.
// Throws PoleError when sin(theta) falls below the 1e-8 guard with a
// non-negligible pole term.
State rhs(const State& y);

struct Constants {
    double P, X, A, W;
    bool tilt_defined;  // A > 0
    double S;           // X/sqrt(A) when defined, else 0
};

Constants constants_of_motion(const State& y);
double tilt(const Constants& c); // throws std::domain_error when A == 0

struct EnergyParts {
    double kinetic;             // ((U^r)^2 + (U^perp)^2)/2
    double coulomb_term;        // -XP/r
    double inverse_square_term; // -X^2/(2 r^2)
    double total;               // (P^2 - W)/2
};
EnergyParts energy_decomposition(const State& y);

double node_precession_rate(double r); // 1/r, throws on r <= 0

enum class SignOutcome { Up, Down };
SignOutcome measurement_sign(const Constants& c); // throws std::domain_error on X == 0

enum class OrbitKind { Unbound, BarelyUnbound, Bound, ConstantRadius, Forbidden };

struct OrbitClass {
    OrbitKind kind;
    std::vector<double> turning_radii; // 0-2 entries, ascending
};

// Root analysis of (U^r)^2 = -(A - X^2) u^2 + 2 P X u + (P^2 - W), u = 1/r.
OrbitClass classify_orbit(const Constants& c);
std::string orbit_kind_name(OrbitKind kind);

// Rebuild a state from constants at (r0, theta0, phi0) with the given signs
// for U^r and U^theta. Throws std::domain_error when (r0, theta0) is
// infeasible for the constants (e.g. sin(theta0) < |S|).
State state_from_constants(const Constants& c, double r0, double theta0, double phi0,
                           int sign_ur, int sign_utheta);

// Rescale the 4-velocity so W lands on -1, 0, or +1 (sign of the current W);
// throws when W == 0 (null states cannot be rescaled to +-1).
State normalize_velocity(const State& y);

struct IntegrateControls {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double max_step = 1e100;
};

struct Step {
    double s0, s1;
    State y0, y1;
    State f0, f1; // derivatives at the ends (cubic Hermite dense output)
};

struct DriftReport {
    double dP, dX, dA, dW;  // max |change| / max(1, |initial|)
    double max_velocity_gap; // worst gap between U and the closed forms
};

struct Trajectory {
    std::vector<Step> steps;
    Constants initial;
    DriftReport drift;

    double s_begin() const { return steps.front().s0; }
    double s_end() const { return steps.back().s1; }
    State sample(double s) const; // cubic Hermite interpolation
};

// Adaptive embedded Dormand-Prince 5(4) with PI step control.
Trajectory integrate(const State& y0, double s_end, const IntegrateControls& ctl = {});

// Observables read off an integrated trajectory by root-solving the dense
// output: radial turning points, polar excursion, ascending equator
// crossings and the node-line rotation rate there.
struct OrbitObservables {
    double r_min, r_max;
    double min_sin_theta;
    std::vector<double> crossing_s;   // ascending (u_theta > 0) crossings
    std::vector<double> node_rates;   // instantaneous d(psi)/dt at each crossing
    double fitted_node_rate;          // mean of node_rates (NaN when none)
};
OrbitObservables analyze(const Trajectory& traj);

// Trajectory CSV: s,t,r,theta,phi,u_t,u_r,u_theta,u_phi,P,X,A,W
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int samples,
                          const RunMeta& meta);

State state_from_json_text(const std::string& text);
std::string state_to_json_text(const State& y);

} // namespace spinlab::geodesic

#endif
