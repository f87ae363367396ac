// End-to-end acceptance gate: one pass/fail line per criterion, nonzero exit
// if any of them fails. Everything runs from fixed seeds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinlab/correlation.hpp"
#include "spinlab/distsolver.hpp"
#include "spinlab/experiment.hpp"
#include "spinlab/geodesic.hpp"
#include "spinlab/reconstruct.hpp"
#include "spinlab/rng.hpp"

using namespace spinlab;
namespace fs = std::filesystem;

static const double kPi = 3.14159265358979323846;
static bool g_all_ok = true;

static void report(int num, bool ok, const std::string& what) {
    std::printf("criterion %2d: %s - %s\n", num, ok ? "PASS" : "FAIL", what.c_str());
    if (!ok) g_all_ok = false;
}

static double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

static experiment::PostConfig single_post(experiment::PostLabel label, const std::string& id,
                                          experiment::Vec3 dir) {
    experiment::PostConfig p;
    p.label = label;
    p.marks = {experiment::Mark{id, dir}};
    return p;
}

static double p_hat_for(double angle, experiment::Model model, std::uint64_t trials,
                        std::uint64_t seed) {
    auto left = single_post(experiment::PostLabel::Left, "L", {0, 0, 1});
    auto right = single_post(experiment::PostLabel::Right, "R",
                             {std::sin(angle), 0.0, std::cos(angle)});
    RandomStream rng(seed);
    auto log = experiment::run_experiment(left, right, trials, model, rng);
    auto table = experiment::aggregate(log);
    return table.rows.begin()->second.p_hat();
}

// ---- criteria 1 and 2: the quantum law and the hidden-variable match ----

static void criteria_1_2() {
    const std::uint64_t n = 1000000;
    std::vector<double> angles, qm_hat, tetra_hat;
    for (int m = 0; m <= 12; ++m) angles.push_back(m * kPi / 12.0);

    double start = now_seconds();
    bool qm_ok = true;
    std::string worst;
    for (size_t m = 0; m < angles.size(); ++m) {
        double p = correlation::p_same(angles[m]);
        double hat = p_hat_for(angles[m], experiment::Model::QM, n, 1000 + m);
        qm_hat.push_back(hat);
        double sigma = std::sqrt(p * (1.0 - p) / n);
        if (std::abs(hat - p) > 4.0 * sigma) {
            qm_ok = false;
            worst = " (angle index " + std::to_string(m) + ")";
        }
    }
    double elapsed = now_seconds() - start;
    bool time_ok = elapsed <= 10.0;
    {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "quantum p-hat within 4 sigma of sin^2(angle/2) at 13 angles, 1e6 "
                      "trials each, %.2f s (limit 10 s)%s",
                      elapsed, worst.c_str());
        report(1, qm_ok && time_ok, buf);
    }

    bool match_ok = true, side_ok = true;
    for (size_t m = 0; m < angles.size(); ++m) {
        double hat = p_hat_for(angles[m], experiment::Model::Tetrahedral, n, 2000 + m);
        tetra_hat.push_back(hat);
        double sigma = std::sqrt(qm_hat[m] * (1.0 - qm_hat[m]) / n +
                                 hat * (1.0 - hat) / n);
        if (std::abs(hat - qm_hat[m]) > 4.0 * sigma) match_ok = false;

        // locality: each post alone sees a fair coin, whatever the pair cosine
        RandomStream rng(3000 + m);
        double z_ab = -std::cos(angles[m]);
        std::uint64_t a_up = 0, b_up = 0;
        const std::uint64_t ns = 1000000;
        for (std::uint64_t k = 0; k < ns; ++k) {
            auto [z_a, z_b] = correlation::sample_tetrahedral(z_ab, rng);
            if (z_a > 0) ++a_up;
            if (z_b > 0) ++b_up;
        }
        double sig = 4.0 * std::sqrt(0.25 / ns);
        if (std::abs(double(a_up) / ns - 0.5) > sig) side_ok = false;
        if (std::abs(double(b_up) / ns - 0.5) > sig) side_ok = false;
    }
    report(2, match_ok && side_ok,
           "tetrahedral sampling matches the quantum p-hat within 4 combined sigma at "
           "every angle; per-side up frequency 0.5 within 4 sigma");
}

static void criterion_3() {
    const std::uint64_t n = 1000000;
    double hat = p_hat_for(kPi / 3.0, experiment::Model::ClassicalSign, n, 77);
    double sigma = std::sqrt(hat * (1.0 - hat) / n);
    bool ok = std::abs(hat - 1.0 / 3.0) <= 4.0 * sigma && std::abs(hat - 0.25) > 5.0 * sigma;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "classical sign model at pi/3: p-hat %.5f within 4 sigma of 1/3 and more "
                  "than 5 sigma from 1/4",
                  hat);
    report(3, ok, buf);
}

static void criterion_4() {
    using namespace distsolver;
    DensityGrid grid = uniform_grid(8);
    double baseline = plane_mass_fraction(grid);
    RandomStream rng(4242);
    SolveOptions opts; // tol 5e-3, budget 2e6
    double start = now_seconds();
    SolveResult out = solve(grid, default_schedule(), opts, rng);
    double elapsed = now_seconds() - start;

    bool conserved = true;
    for (const TracePoint& tp : out.trace)
        if (tp.res.r_c1 > 1e-12 || tp.res.r_c2a > 1e-12 || tp.res.r_c2b > 1e-12)
            conserved = false;
    double mass = plane_mass_fraction(grid);
    bool ok = out.report.r_c3 <= 5e-3 && conserved && mass >= 0.90 && mass > baseline &&
              elapsed <= 60.0;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "n=8 solve: quadrant residual %.2e (<= 5e-3), marginals conserved to "
                  "1e-12, near-plane mass %.3f (>= 0.90, uniform start %.3f), %.1f s "
                  "(limit 60 s)",
                  out.report.r_c3, mass, baseline, elapsed);
    report(4, ok, buf);
}

static void criterion_5() {
    // Monte Carlo over triples of independent random directions vs the closed
    // form. The printed closed form understates the true density by exactly 2x
    // (it integrates to 1/2 over the cube), so the histogram is compared
    // against 2x the closed form; the probe values themselves are checked
    // verbatim first.
    bool probes_ok =
        std::abs(correlation::classical_triple_density(0, 0, 0) - 1.0 / (8 * kPi)) < 1e-12 &&
        std::abs(correlation::classical_triple_density(0.5, 0.5, 0.5) - 0.056270) < 1e-4;

    struct Probe {
        double s, t, u;
    };
    const std::vector<Probe> probes = {
        {0.0, 0.0, 0.0}, {0.5, 0.5, 0.5}, {0.3, -0.2, 0.1}, {-0.4, 0.25, 0.3}};
    const double h = 0.075; // box half-width
    const std::uint64_t n = 10000000;
    std::vector<std::uint64_t> hits(probes.size(), 0);

    RandomStream rng(505);
    for (std::uint64_t k = 0; k < n; ++k) {
        experiment::Vec3 a = experiment::random_unit_vector(rng);
        experiment::Vec3 b = experiment::random_unit_vector(rng);
        experiment::Vec3 c = experiment::random_unit_vector(rng);
        double s = experiment::dot(a, c);
        double t = experiment::dot(b, c);
        double u = experiment::dot(a, b);
        for (size_t p = 0; p < probes.size(); ++p) {
            if (std::abs(s - probes[p].s) <= h && std::abs(t - probes[p].t) <= h &&
                std::abs(u - probes[p].u) <= h)
                ++hits[p];
        }
    }

    bool mc_ok = true;
    double worst = 0.0;
    for (size_t p = 0; p < probes.size(); ++p) {
        // box-averaged closed form (5x5x5 midpoints), times the factor 2
        double avg = 0.0;
        const int m = 5;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k2 = 0; k2 < m; ++k2) {
                    double s = probes[p].s + (-1.0 + (2.0 * i + 1.0) / m) * h;
                    double t = probes[p].t + (-1.0 + (2.0 * j + 1.0) / m) * h;
                    double u = probes[p].u + (-1.0 + (2.0 * k2 + 1.0) / m) * h;
                    avg += correlation::classical_triple_density(s, t, u);
                }
        avg /= m * m * m;
        double vol = 8.0 * h * h * h;
        double mc_density = static_cast<double>(hits[p]) / n / vol;
        double rel = std::abs(mc_density / (2.0 * avg) - 1.0);
        worst = std::max(worst, rel);
        if (rel > 0.05) mc_ok = false;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "closed-form probes exact; 1e7-triple histogram within 5%% of the "
                  "closed form (x2 normalization; worst deviation %.1f%%)",
                  100.0 * worst);
    report(5, probes_ok && mc_ok, buf);
}

static Eigen::Matrix4d metric_matrix(double r, double th) {
    geodesic::Metric g = geodesic::metric_components(r, th);
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            m(i, j) = g.comp(i, j);
    return m;
}

static void criterion_6() {
    const double h = 1e-5;
    double worst = 0.0;
    for (double r : {0.5, 1.0, 2.0, 5.0}) {
        for (double th : {0.2, 1.0, kPi / 2, 2.5, kPi - 0.2}) {
            geodesic::Connection con = geodesic::connection(r, th);
            Eigen::Matrix4d ginv = metric_matrix(r, th).inverse();
            auto dg = [&](int wrt, int a, int b) -> double {
                if (wrt == 0 || wrt == 3) return 0.0;
                double rp = r, rm = r, tp = th, tm = th;
                if (wrt == 1) {
                    rp += h;
                    rm -= h;
                } else {
                    tp += h;
                    tm -= h;
                }
                return (metric_matrix(rp, tp)(a, b) - metric_matrix(rm, tm)(a, b)) / (2 * h);
            };
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    for (int k = 0; k < 4; ++k) {
                        double fd = 0.0;
                        for (int l = 0; l < 4; ++l)
                            fd += 0.5 * ginv(i, l) * (dg(j, l, k) + dg(k, l, j) - dg(l, j, k));
                        worst = std::max(worst, std::abs(con.coeff(i, j, k) - fd));
                    }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "all connection coefficients within 1e-6 of the finite-difference "
                  "oracle (worst %.2e)",
                  worst);
    report(6, worst <= 1e-6, buf);
}

struct OrbitRun {
    std::string name;
    geodesic::Trajectory traj;
};

static std::vector<OrbitRun> integrate_test_orbits() {
    using namespace geodesic;
    std::vector<OrbitRun> runs;
    IntegrateControls ctl; // 1e-10 tolerances

    State equatorial{0.0, 1.0, kPi / 2, 0.0, 1.0, 0.0, 0.0, 1.0}; // circular, r = 1
    runs.push_back({"equatorial", integrate(equatorial, 100.0, ctl)});

    Constants bound{0.9, 0.5, 1.0, 1.0, true, 0.5};
    runs.push_back(
        {"tilted bound", integrate(state_from_constants(bound, 2.0, kPi / 2, 0.0, 1, 1),
                                   100.0, ctl)});

    Constants unbound{1.2, 0.5, 1.0, 1.0, true, 0.5};
    runs.push_back(
        {"unbound", integrate(state_from_constants(unbound, 2.0, kPi / 2, 0.0, 1, 1),
                              100.0, ctl)});
    return runs;
}

static void criteria_7_8(const std::vector<OrbitRun>& runs) {
    using namespace geodesic;
    bool drift_ok = true;
    double worst = 0.0;
    for (const OrbitRun& run : runs) {
        const DriftReport& d = run.traj.drift;
        double w = std::max({d.dP, d.dX, d.dA, d.dW});
        worst = std::max(worst, w);
        if (w > 1e-8) drift_ok = false;
    }
    char buf7[160];
    std::snprintf(buf7, sizeof buf7,
                  "P, X, A, W drift <= 1e-8 over affine length 100 for the equatorial, "
                  "tilted-bound and unbound orbits (worst %.2e)",
                  worst);
    report(7, drift_ok, buf7);

    // geometry of the tilted bound orbit
    const Trajectory& traj = runs[1].traj;
    OrbitObservables obs = analyze(traj);
    OrbitClass oc = classify_orbit(traj.initial);
    bool turn_ok = oc.turning_radii.size() == 2 &&
                   std::abs(obs.r_min - oc.turning_radii[0]) <= 1e-6 &&
                   std::abs(obs.r_max - oc.turning_radii[1]) <= 1e-6;
    bool polar_ok = std::abs(obs.min_sin_theta - std::abs(traj.initial.S)) <= 1e-6;

    // node rotation of a constant-radius orbit
    double P = std::sqrt(0.75), r0 = std::sqrt(3.0);
    Constants cr{P, 0.5, 1.0, 1.0, true, 0.5};
    Trajectory circ = integrate(state_from_constants(cr, r0, kPi / 2, 0.0, 1, 1), 100.0);
    OrbitObservables cobs = analyze(circ);
    double want = node_precession_rate(r0);
    bool node_ok = !cobs.node_rates.empty() &&
                   std::abs(cobs.fitted_node_rate - want) <= 0.01 * want;
    char buf8[220];
    std::snprintf(buf8, sizeof buf8,
                  "turning radii within 1e-6 of the closed-form roots, polar cap at |S| "
                  "within 1e-6, node rotation rate %.6f vs 1/r = %.6f (within 1%%)",
                  cobs.fitted_node_rate, want);
    report(8, turn_ok && polar_ok && node_ok, buf8);
}

static std::pair<experiment::PostConfig, experiment::PostConfig> truth_posts() {
    using experiment::Mark;
    using experiment::Vec3;
    auto unit = [](double x, double y, double z) {
        double n = std::sqrt(x * x + y * y + z * z);
        return Vec3{x / n, y / n, z / n};
    };
    experiment::PostConfig left;
    left.label = experiment::PostLabel::Left;
    left.marks = {Mark{"L0", unit(0, 0, 1)}, Mark{"L1", unit(1, 0, 0.2)},
                  Mark{"L2", unit(0.3, 1, -0.1)}, Mark{"L3", unit(-0.5, 0.4, 0.8)}};
    experiment::PostConfig right;
    right.label = experiment::PostLabel::Right;
    right.marks = {Mark{"R0", unit(0.1, -0.2, 1)}, Mark{"R1", unit(1, 0.5, -0.3)},
                   Mark{"R2", unit(-0.7, 0.6, 0.2)}, Mark{"R3", unit(0.2, -0.9, -0.4)}};
    return {left, right};
}

static void criterion_9() {
    using namespace reconstruct;
    auto [left, right] = truth_posts();

    // exact cross products, no sampling noise at all
    CrossGram exact;
    for (const auto& m : left.marks) exact.left_ids.push_back(m.id);
    for (const auto& m : right.marks) exact.right_ids.push_back(m.id);
    exact.c.resize(4, 4);
    exact.w = Eigen::MatrixXd::Ones(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            exact.c(i, j) = experiment::dot(left.marks[i].dir, right.marks[j].dir);
    RandomStream rng1(91);
    Embedding e_exact = embed(exact, 5000, 1e-16, rng1);
    double rms_exact = align_to_truth(e_exact, left, right);

    // 1e5 samples per mark pair through the full experiment pipeline
    RandomStream rng2(92);
    auto log = experiment::run_experiment(left, right, 1600000, experiment::Model::QM, rng2);
    auto table = experiment::aggregate(log);
    RandomStream rng3(93);
    Embedding e_mc = embed(gram_from_table(table, Law::SinSq), 500, 1e-13, rng3);
    double rms_mc = align_to_truth(e_mc, left, right);

    // the linear angle hypothesis must fail on the very same data
    RandomStream rng4(94);
    Embedding e_lin = embed(gram_from_table(table, Law::Linear), 500, 1e-13, rng4);

    bool ok = rms_exact <= 1e-9 && rms_mc <= 2e-2 && e_lin.stress >= 1e-2;
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "frame recovery: exact-gram rms %.2e rad (<= 1e-9), sampled rms %.2e "
                  "rad (<= 2e-2), linear-law stress %.3f (>= 1e-2)",
                  rms_exact, rms_mc, e_lin.stress);
    report(9, ok, buf);
}

static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

static void criterion_10() {
    fs::path dir = fs::temp_directory_path() / "spinlab_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path pairs = dir / "pairs.json";
    {
        std::ofstream out(pairs);
        out << R"({"left":[{"id":"L0","dir":[0,0,1]},{"id":"L1","dir":[1,0,0]}],)"
            << R"("right":[{"id":"R0","dir":[0,1,0]},{"id":"R1","dir":[0,0,-1]}]})";
    }
    auto shell = [&](const std::string& args) {
        std::string cmd = std::string(SPINLAB_BIN) + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };

    bool ok = true;
    struct Case {
        std::function<std::string(const std::string&)> command; // tag -> command line
        std::vector<std::string> files;                         // produced, with "X" marker
    };
    std::vector<Case> cases = {
        {[&](const std::string& tag) {
             return "simulate --model tetrahedral --trials 50000 --seed 5 --pairs " +
                    pairs.string() + " --out " + (dir / ("log" + tag + ".csv")).string() +
                    " --table " + (dir / ("tab" + tag + ".json")).string();
         },
         {"logX.csv", "tabX.json"}},
        {[&](const std::string& tag) {
             return "solve-dist --n 4 --seed 5 --out-prefix " + (dir / ("d" + tag)).string();
         },
         {"dX_initial.grid", "dX_final.grid", "dX_trace.csv", "dX_residuals.json"}},
        {[&](const std::string& tag) {
             return "geodesic --constants 0.9 0.5 1 1 --r0 2 --s-end 25 --samples 200 --out " +
                    (dir / ("traj" + tag + ".csv")).string() + " --report " +
                    (dir / ("rep" + tag + ".json")).string();
         },
         {"trajX.csv", "repX.json"}},
        {[&](const std::string& tag) {
             // consumes the simulate output written above
             return "reconstruct --logbook " + (dir / "logA.csv").string() +
                    " --law sinsq --seed 5 --out " + (dir / ("emb" + tag + ".json")).string();
         },
         {"embX.json"}},
    };
    for (const Case& cs : cases) {
        if (!shell(cs.command("A"))) ok = false;
        if (!shell(cs.command("B"))) ok = false;
        for (const std::string& f : cs.files) {
            std::string a = f, b = f;
            a.replace(a.find('X'), 1, "A");
            b.replace(b.find('X'), 1, "B");
            std::string ba = slurp(dir / a), bb = slurp(dir / b);
            if (ba.empty() || ba != bb) ok = false;
        }
    }

    report(10, ok, "simulate, solve-dist, geodesic and reconstruct byte-identical across "
                   "repeated runs under a fixed seed");
}

int main() {
    now_seconds(); // start the clock
    criteria_1_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    auto runs = integrate_test_orbits();
    criteria_7_8(runs);
    criterion_9();
    criterion_10();
    std::printf("%s\n", g_all_ok ? "all criteria satisfied" : "FAILURES present");
    return g_all_ok ? 0 : 1;
}
