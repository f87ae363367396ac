#include "spinlab/geodesic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace spinlab::geodesic {

namespace {
enum { T = 0, R = 1, TH = 2, PH = 3 };
}

double Metric::comp(int i, int j) const {
    if (i > j)
        std::swap(i, j);
    if (i == T && j == T)
        return g_tt;
    if (i == R && j == R)
        return g_rr;
    if (i == TH && j == TH)
        return g_thth;
    if (i == PH && j == PH)
        return g_phph;
    if (i == T && j == PH)
        return g_tph;
    return 0.0;
}

Metric metric_components(double r, double theta) {
    if (!(r > 0.0))
        throw std::domain_error("metric_components: r must be positive");
    double sin = std::sin(theta), cos = std::cos(theta);
    Metric g;
    g.g_tt = cos * cos;
    g.g_rr = -1.0;
    g.g_thth = -r * r;
    g.g_phph = -r * r * sin * sin;
    g.g_tph = r * sin * sin;
    return g;
}

Connection connection(double r, double theta) {
    if (!(r > 0.0))
        throw std::domain_error("connection: r must be positive");
    double sin = std::sin(theta), cos = std::cos(theta);
    if (sin == 0.0)
        throw std::domain_error("connection: pole-singular coefficients undefined at sin(theta)=0");
    double s2 = sin * sin, c2 = cos * cos;
    Connection G;
    G.t_tr = s2 / (2.0 * r);
    G.t_rph = -s2 / 2.0;
    G.r_tph = s2 / 2.0;
    G.r_thth = -r;
    G.r_phph = -r * s2;
    G.th_tt = -sin * cos / (r * r);
    G.th_tph = sin * cos / r;
    G.th_rth = 1.0 / r;
    G.th_phph = -sin * cos;
    G.ph_tr = -c2 / (2.0 * r * r);
    G.ph_tth = -cos / (r * sin);
    G.ph_rph = (1.0 + c2) / (2.0 * r);
    G.ph_thph = cos / sin;
    return G;
}

double Connection::coeff(int i, int j, int k) const {
    if (j > k)
        std::swap(j, k);
    if (i == T) {
        if (j == T && k == R)
            return t_tr;
        if (j == R && k == PH)
            return t_rph;
    } else if (i == R) {
        if (j == T && k == PH)
            return r_tph;
        if (j == TH && k == TH)
            return r_thth;
        if (j == PH && k == PH)
            return r_phph;
    } else if (i == TH) {
        if (j == T && k == T)
            return th_tt;
        if (j == T && k == PH)
            return th_tph;
        if (j == R && k == TH)
            return th_rth;
        if (j == PH && k == PH)
            return th_phph;
    } else if (i == PH) {
        if (j == T && k == R)
            return ph_tr;
        if (j == T && k == TH)
            return ph_tth;
        if (j == R && k == PH)
            return ph_rph;
        if (j == TH && k == PH)
            return ph_thph;
    }
    return 0.0;
}

State rhs(const State& y) {
    double sin = std::sin(y.theta), cos = std::cos(y.theta);
    double r = y.r;
    double br = sin * (y.u_t - r * y.u_phi); // the recurring bracket
    if (std::fabs(sin) < 1e-8 &&
        (std::fabs(br) > 0.0 || std::fabs(y.u_theta * y.u_phi) > 0.0))
        throw PoleError("geodesic hit the polar axis guard (sin theta < 1e-8)",
                        std::numeric_limits<double>::quiet_NaN(), y);
    State d;
    d.t = y.u_t;
    d.r = y.u_r;
    d.theta = y.u_theta;
    d.phi = y.u_phi;
    d.u_t = -y.u_r * sin * br / r;
    d.u_r = (r * y.u_theta * (r * y.u_theta) - (r * y.u_phi * sin) * br) / r;
    d.u_theta = cos * br * (y.u_t - r * y.u_phi) / (r * r) - 2.0 * y.u_r * y.u_theta / r;
    d.u_phi = cos * cos * y.u_t * y.u_r / (r * r) -
              (1.0 + cos * cos) * y.u_r * y.u_phi / r +
              2.0 * cos * y.u_theta * (y.u_t - r * y.u_phi) / (r * sin);
    return d;
}

Constants constants_of_motion(const State& y) {
    double sin = std::sin(y.theta), cos = std::cos(y.theta);
    double r = y.r;
    double s2 = sin * sin;
    Constants c;
    c.P = cos * cos * y.u_t + r * s2 * y.u_phi;
    c.X = r * s2 * (y.u_t - r * y.u_phi);
    double a1 = r * r * y.u_theta;
    double a2 = r * sin * (y.u_t - r * y.u_phi);
    c.A = a1 * a1 + a2 * a2;
    c.W = cos * cos * y.u_t * y.u_t - y.u_r * y.u_r - r * r * y.u_theta * y.u_theta -
          r * r * s2 * y.u_phi * y.u_phi + 2.0 * r * s2 * y.u_t * y.u_phi;
    c.tilt_defined = c.A > 0.0;
    c.S = c.tilt_defined ? c.X / std::sqrt(c.A) : 0.0;
    return c;
}

double tilt(const Constants& c) {
    if (!(c.A > 0.0))
        throw std::domain_error("tilt: undefined for A = 0");
    return c.X / std::sqrt(c.A);
}

EnergyParts energy_decomposition(const State& y) {
    Constants c = constants_of_motion(y);
    double sin = std::sin(y.theta);
    double t1 = y.r * y.u_theta;
    double t2 = sin * (y.u_t - y.r * y.u_phi);
    double uperp2 = t1 * t1 + t2 * t2;
    EnergyParts e;
    e.kinetic = 0.5 * (y.u_r * y.u_r + uperp2);
    e.coulomb_term = -c.X * c.P / y.r;
    e.inverse_square_term = -c.X * c.X / (2.0 * y.r * y.r);
    e.total = 0.5 * (c.P * c.P - c.W);
    return e;
}

double node_precession_rate(double r) {
    if (!(r > 0.0))
        throw std::domain_error("node_precession_rate: r must be positive");
    return 1.0 / r;
}

SignOutcome measurement_sign(const Constants& c) {
    if (c.X == 0.0)
        throw std::domain_error("measurement_sign: undefined for X = 0");
    return c.X > 0.0 ? SignOutcome::Up : SignOutcome::Down;
}

OrbitClass classify_orbit(const Constants& c) {
    double a2 = c.A - c.X * c.X; // quadratic coefficient (negated)
    double scale = std::max({c.A, c.X * c.X, 1e-300});
    if (a2 < -1e-12 * scale)
        throw std::invalid_argument("classify_orbit: requires A >= X^2");

    OrbitClass oc;
    if (a2 <= 1e-12 * scale) {
        // linear case: (U^r)^2 = 2 P X u + (P^2 - W)
        double b = 2.0 * c.P * c.X;
        double c0 = c.P * c.P - c.W;
        double lscale = std::max({std::fabs(b), std::fabs(c0), 1e-300});
        if (std::fabs(b) <= 1e-14 * lscale) {
            if (c0 > 1e-14 * lscale)
                oc.kind = OrbitKind::Unbound;
            else if (c0 < -1e-14 * lscale)
                oc.kind = OrbitKind::Forbidden;
            else
                oc.kind = OrbitKind::ConstantRadius; // (U^r)^2 = 0 at every r
            return oc;
        }
        double ustar = -c0 / b;
        if (b > 0.0) {
            // admissible side is u >= ustar (motion confined below r*)
            if (ustar > 0.0) {
                oc.kind = OrbitKind::Bound;
                oc.turning_radii = {1.0 / ustar};
            } else {
                oc.kind = OrbitKind::Unbound;
            }
        } else {
            // admissible side is u <= ustar (motion outside r*)
            if (ustar > 0.0) {
                oc.kind = OrbitKind::Unbound;
                oc.turning_radii = {1.0 / ustar};
            } else {
                oc.kind = OrbitKind::Forbidden;
            }
        }
        return oc;
    }

    double disc = c.A * c.P * c.P - c.A * c.W + c.X * c.X * c.W; // quarter discriminant
    double dscale = std::fabs(c.A * c.P * c.P) + std::fabs(c.A * c.W) +
                    std::fabs(c.X * c.X * c.W) + 1e-300;
    if (disc < -1e-12 * dscale) {
        oc.kind = OrbitKind::Forbidden;
        return oc;
    }
    if (disc <= 1e-12 * dscale) {
        double ustar = c.P * c.X / a2;
        if (ustar > 0.0) {
            oc.kind = OrbitKind::ConstantRadius;
            oc.turning_radii = {1.0 / ustar};
        } else {
            oc.kind = OrbitKind::Forbidden;
        }
        return oc;
    }
    double sd = std::sqrt(disc);
    double u1 = (c.P * c.X - sd) / a2;
    double u2 = (c.P * c.X + sd) / a2;
    double utol = 1e-12 * (std::fabs(c.P * c.X) + sd) / a2;
    if (u2 <= utol) {
        oc.kind = OrbitKind::Forbidden;
    } else if (u1 > utol) {
        oc.kind = OrbitKind::Bound;
        oc.turning_radii = {1.0 / u2, 1.0 / u1};
    } else if (u1 >= -utol) {
        oc.kind = OrbitKind::BarelyUnbound;
        oc.turning_radii = {1.0 / u2};
    } else {
        oc.kind = OrbitKind::Unbound;
        oc.turning_radii = {1.0 / u2};
    }
    return oc;
}

std::string orbit_kind_name(OrbitKind kind) {
    switch (kind) {
        case OrbitKind::Unbound: return "Unbound";
        case OrbitKind::BarelyUnbound: return "BarelyUnbound";
        case OrbitKind::Bound: return "Bound";
        case OrbitKind::ConstantRadius: return "ConstantRadius";
        case OrbitKind::Forbidden: return "Forbidden";
    }
    return "?";
}

State state_from_constants(const Constants& c, double r0, double theta0, double phi0,
                           int sign_ur, int sign_utheta) {
    if (!(r0 > 0.0))
        throw std::domain_error("state_from_constants: r0 must be positive");
    if (!(theta0 > 0.0 && theta0 < M_PI))
        throw std::domain_error("state_from_constants: theta0 outside (0, pi)");
    double sin0 = std::sin(theta0), cos0 = std::cos(theta0);
    double s2 = sin0 * sin0;
    double r2 = r0 * r0;

    double uth2 = (c.A - c.X * c.X / s2) / (r2 * r2);
    double ur2 = -(c.A - c.X * c.X) / r2 + 2.0 * c.P * c.X / r0 + c.P * c.P - c.W;
    double tolth = 1e-12 * (std::fabs(c.A) + c.X * c.X / s2) / (r2 * r2) + 1e-300;
    double tolr = 1e-12 * (std::fabs(c.A - c.X * c.X) / r2 + std::fabs(2.0 * c.P * c.X / r0) +
                           c.P * c.P + std::fabs(c.W)) + 1e-300;
    if (uth2 < -tolth)
        throw std::domain_error("state_from_constants: sin(theta0) < |S|, infeasible");
    if (ur2 < -tolr)
        throw std::domain_error("state_from_constants: radial speed squared negative at r0");

    State y;
    y.t = 0.0;
    y.r = r0;
    y.theta = theta0;
    y.phi = phi0;
    y.u_t = c.P + c.X / r0;
    y.u_phi = (c.P - c.X * (cos0 * cos0 / s2) / r0) / r0;
    y.u_theta = (sign_utheta >= 0 ? 1.0 : -1.0) * std::sqrt(std::max(0.0, uth2));
    y.u_r = (sign_ur >= 0 ? 1.0 : -1.0) * std::sqrt(std::max(0.0, ur2));
    return y;
}

State normalize_velocity(const State& y) {
    Constants c = constants_of_motion(y);
    if (std::fabs(c.W) < 1e-300)
        throw std::domain_error("normalize_velocity: W = 0 cannot be rescaled to unit norm");
    double f = 1.0 / std::sqrt(std::fabs(c.W));
    State z = y;
    z.u_t *= f;
    z.u_r *= f;
    z.u_theta *= f;
    z.u_phi *= f;
    return z;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with PI step control and Hermite dense output.

namespace {

using Arr = std::array<double, 8>;

Arr to_arr(const State& y) {
    return {y.t, y.r, y.theta, y.phi, y.u_t, y.u_r, y.u_theta, y.u_phi};
}

State to_state(const Arr& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]};
}

Arr eval_rhs(const Arr& a) { return to_arr(rhs(to_state(a))); }

} // namespace

State Trajectory::sample(double s) const {
    // locate the step containing s
    size_t lo = 0, hi = steps.size();
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (steps[mid].s0 <= s)
            lo = mid;
        else
            hi = mid;
    }
    const Step& st = steps[lo];
    double h = st.s1 - st.s0;
    double x = (s - st.s0) / h;
    double h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
    double h10 = x * (1.0 - x) * (1.0 - x);
    double h01 = x * x * (3.0 - 2.0 * x);
    double h11 = x * x * (x - 1.0);
    Arr y0 = to_arr(st.y0), y1 = to_arr(st.y1), f0 = to_arr(st.f0), f1 = to_arr(st.f1);
    Arr out;
    for (int i = 0; i < 8; i++)
        out[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
    return to_state(out);
}

Trajectory integrate(const State& y_init, double s_end, const IntegrateControls& ctl) {
    if (!(s_end > 0.0))
        throw std::invalid_argument("integrate: s_end must be positive");
    if (!(ctl.abs_tol > 0.0 && ctl.rel_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");
    if (!(y_init.r > 0.0) || !(y_init.theta > 0.0 && y_init.theta < M_PI))
        throw std::invalid_argument("integrate: initial state outside the chart");

    // Dormand-Prince 5(4) tableau
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Trajectory traj;
    traj.initial = constants_of_motion(y_init);
    traj.drift = {0.0, 0.0, 0.0, 0.0, 0.0};

    Arr y = to_arr(y_init);
    double s = 0.0;
    Arr f;
    try {
        f = eval_rhs(y);
    } catch (PoleError& e) {
        e.s = s;
        throw;
    }

    double h = std::min({ctl.max_step, 1e-2, s_end});
    double errold = 1.0;
    const double denomP = std::max(1.0, std::fabs(traj.initial.P));
    const double denomX = std::max(1.0, std::fabs(traj.initial.X));
    const double denomA = std::max(1.0, std::fabs(traj.initial.A));
    const double denomW = std::max(1.0, std::fabs(traj.initial.W));

    while (s < s_end) {
        bool last = false;
        if (s + h >= s_end) {
            h = s_end - s;
            last = true;
        }
        if (h < 1e-14 * std::max(1.0, std::fabs(s)))
            throw StepUnderflowError("integrate: step size underflow", s, to_state(y));

        Arr k1 = f, k2, k3, k4, k5, k6, k7, y1;
        try {
            Arr w;
            for (int i = 0; i < 8; i++)
                w[i] = y[i] + h * a21 * k1[i];
            k2 = eval_rhs(w);
            for (int i = 0; i < 8; i++)
                w[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            k3 = eval_rhs(w);
            for (int i = 0; i < 8; i++)
                w[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = eval_rhs(w);
            for (int i = 0; i < 8; i++)
                w[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = eval_rhs(w);
            for (int i = 0; i < 8; i++)
                w[i] = y[i] +
                       h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            k6 = eval_rhs(w);
            for (int i = 0; i < 8; i++)
                y1[i] = y[i] +
                        h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            k7 = eval_rhs(y1);
        } catch (PoleError& e) {
            e.s = s;
            throw;
        }

        double err = 0.0;
        for (int i = 0; i < 8; i++) {
            double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                             e7 * k7[i]);
            double sc = ctl.abs_tol + ctl.rel_tol * std::max(std::fabs(y[i]), std::fabs(y1[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / 8.0);

        if (err <= 1.0) {
            Step step;
            step.s0 = s;
            step.s1 = s + h;
            step.y0 = to_state(y);
            step.y1 = to_state(y1);
            step.f0 = to_state(k1);
            step.f1 = to_state(k7);
            traj.steps.push_back(step);

            s += h;
            y = y1;
            f = k7; // FSAL

            // conservation and closed-form monitors
            State cur = step.y1;
            Constants c = constants_of_motion(cur);
            traj.drift.dP = std::max(traj.drift.dP, std::fabs(c.P - traj.initial.P) / denomP);
            traj.drift.dX = std::max(traj.drift.dX, std::fabs(c.X - traj.initial.X) / denomX);
            traj.drift.dA = std::max(traj.drift.dA, std::fabs(c.A - traj.initial.A) / denomA);
            traj.drift.dW = std::max(traj.drift.dW, std::fabs(c.W - traj.initial.W) / denomW);
            {
                double sin = std::sin(cur.theta), cos = std::cos(cur.theta);
                double r = cur.r, s2 = sin * sin;
                const Constants& c0 = traj.initial;
                double gap = std::fabs(cur.u_t - (c0.P + c0.X / r));
                gap = std::max(gap, std::fabs(cur.u_phi -
                                              (c0.P - c0.X * (cos * cos / s2) / r) / r));
                double uth2 = (c0.A - c0.X * c0.X / s2) / (r * r * r * r);
                gap = std::max(gap, std::fabs(cur.u_theta * cur.u_theta - uth2));
                double ur2 = -(c0.A - c0.X * c0.X) / (r * r) + 2.0 * c0.P * c0.X / r +
                             c0.P * c0.P - c0.W;
                gap = std::max(gap, std::fabs(cur.u_r * cur.u_r - ur2));
                traj.drift.max_velocity_gap = std::max(traj.drift.max_velocity_gap, gap);
            }

            if (last)
                break;
            double fac = 0.9 * std::pow(err > 1e-300 ? err : 1e-300, -0.17) *
                         std::pow(errold, 0.04);
            fac = std::clamp(fac, 0.2, 5.0);
            h = std::min(h * fac, ctl.max_step);
            errold = std::max(err, 1e-4);
        } else {
            double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
            h *= fac;
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------

namespace {

// root of component extractor g within [s0,s1] by bisection on dense output
template <class F>
double bisect_root(const Trajectory& traj, double s0, double s1, const F& g) {
    double g0 = g(traj.sample(s0));
    for (int it = 0; it < 200; it++) {
        double mid = 0.5 * (s0 + s1);
        if (mid == s0 || mid == s1)
            break;
        double gm = g(traj.sample(mid));
        if ((g0 <= 0.0) == (gm <= 0.0)) {
            s0 = mid;
            g0 = gm;
        } else {
            s1 = mid;
        }
    }
    return 0.5 * (s0 + s1);
}

} // namespace

OrbitObservables analyze(const Trajectory& traj) {
    OrbitObservables obs;
    obs.r_min = std::numeric_limits<double>::infinity();
    obs.r_max = -obs.r_min;
    obs.min_sin_theta = std::numeric_limits<double>::infinity();
    const Constants& c = traj.initial;

    auto note_state = [&](const State& y) {
        obs.r_min = std::min(obs.r_min, y.r);
        obs.r_max = std::max(obs.r_max, y.r);
        obs.min_sin_theta = std::min(obs.min_sin_theta, std::sin(y.theta));
    };
    note_state(traj.steps.front().y0);

    for (const Step& st : traj.steps) {
        note_state(st.y1);
        // radial turning point inside the step
        if ((st.y0.u_r <= 0.0) != (st.y1.u_r <= 0.0)) {
            double s = bisect_root(traj, st.s0, st.s1, [](const State& y) { return y.u_r; });
            note_state(traj.sample(s));
        }
        // polar excursion extremum
        if ((st.y0.u_theta <= 0.0) != (st.y1.u_theta <= 0.0)) {
            double s = bisect_root(traj, st.s0, st.s1, [](const State& y) { return y.u_theta; });
            note_state(traj.sample(s));
        }
        // ascending equator crossing: theta passes pi/2 with u_theta > 0
        double g0 = st.y0.theta - M_PI_2, g1 = st.y1.theta - M_PI_2;
        if ((g0 <= 0.0) != (g1 <= 0.0)) {
            double s = bisect_root(traj, st.s0, st.s1,
                                   [](const State& y) { return y.theta - M_PI_2; });
            State y = traj.sample(s);
            if (y.u_theta > 0.0) {
                obs.crossing_s.push_back(s);
                if (c.tilt_defined && std::fabs(c.S) < 1.0) {
                    // instantaneous node-line rotation rate of the rotating
                    // orbital plane, evaluated at the node itself
                    double sini = std::sqrt(1.0 - c.S * c.S);
                    double rate = (y.u_phi + std::fabs(c.S) * y.u_theta / sini) / y.u_t;
                    obs.node_rates.push_back(rate);
                }
            }
        }
    }
    if (obs.node_rates.empty()) {
        obs.fitted_node_rate = std::numeric_limits<double>::quiet_NaN();
    } else {
        double sum = 0.0;
        for (double v : obs.node_rates)
            sum += v;
        obs.fitted_node_rate = sum / obs.node_rates.size();
    }
    return obs;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int samples,
                          const RunMeta& meta) {
    for (const std::string& line : meta.header_lines())
        out << "# " << line << "\n";
    out << "s,t,r,theta,phi,u_t,u_r,u_theta,u_phi,P,X,A,W\n";
    if (samples < 2)
        samples = 2;
    double s0 = traj.s_begin(), s1 = traj.s_end();
    for (int i = 0; i < samples; i++) {
        double s = s0 + (s1 - s0) * i / (samples - 1);
        State y = traj.sample(s);
        Constants c = constants_of_motion(y);
        out << format_double(s);
        for (double v : {y.t, y.r, y.theta, y.phi, y.u_t, y.u_r, y.u_theta, y.u_phi,
                         c.P, c.X, c.A, c.W})
            out << ',' << format_double(v);
        out << "\n";
    }
}

State state_from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    State y;
    y.t = j.value("t", 0.0);
    y.r = j.at("r").get<double>();
    y.theta = j.at("theta").get<double>();
    y.phi = j.value("phi", 0.0);
    y.u_t = j.at("u_t").get<double>();
    y.u_r = j.at("u_r").get<double>();
    y.u_theta = j.at("u_theta").get<double>();
    y.u_phi = j.at("u_phi").get<double>();
    return y;
}

std::string state_to_json_text(const State& y) {
    nlohmann::json j;
    j["t"] = y.t;
    j["r"] = y.r;
    j["theta"] = y.theta;
    j["phi"] = y.phi;
    j["u_t"] = y.u_t;
    j["u_r"] = y.u_r;
    j["u_theta"] = y.u_theta;
    j["u_phi"] = y.u_phi;
    return j.dump(2);
}

} // namespace spinlab::geodesic
