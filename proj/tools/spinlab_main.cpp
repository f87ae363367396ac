// spinlab: reproducible command-line runs of the spin-statistics laboratory.
// Subcommands: simulate, solve-dist, geodesic, reconstruct.
// Exit codes: 0 success, 1 validation, 2 I/O, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spinlab/correlation.hpp"
#include "spinlab/distsolver.hpp"
#include "spinlab/experiment.hpp"
#include "spinlab/geodesic.hpp"
#include "spinlab/io_util.hpp"
#include "spinlab/reconstruct.hpp"
#include "spinlab/rng.hpp"

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out)
        throw IoError("write failed: " + path);
}

std::uint64_t parse_count(const std::string& text) {
    // accepts 1000000 or 1e6 style counts
    double v = std::stod(text);
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e18)
        throw CLI::ValidationError("count must be a positive integer");
    return static_cast<std::uint64_t>(v);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& model_name, const std::string& trials_text,
                 const std::string& pairs_path, std::uint64_t seed, const std::string& out_path,
                 const std::string& table_path) {
    using namespace spinlab;
    std::uint64_t trials = parse_count(trials_text);
    std::string pairs_text = read_file(pairs_path);
    auto [left, right] = experiment::posts_from_json_text(pairs_text);

    experiment::Model model;
    if (model_name == "qm")
        model = experiment::Model::QM;
    else if (model_name == "classical")
        model = experiment::Model::ClassicalSign;
    else if (model_name == "tetrahedral")
        model = experiment::Model::Tetrahedral;
    else
        throw std::invalid_argument("unknown model: " + model_name);

    RunMeta meta;
    meta.seed = seed;
    meta.config_digest = fnv1a64("simulate model=" + model_name + " trials=" +
                                 std::to_string(trials) + " seed=" + std::to_string(seed) +
                                 " pairs=" + pairs_text);

    RandomStream rng(seed);
    auto log = experiment::run_experiment(left, right, trials, model, rng);

    std::ostringstream csv;
    experiment::write_logbook_csv(csv, log, meta);
    write_file(out_path, csv.str());

    if (!table_path.empty()) {
        auto table = experiment::aggregate(log);
        write_file(table_path, experiment::table_json(table, meta));
    }
    std::cout << "simulate: model=" << model_name << " trials=" << trials << " seed=" << seed
              << " records=" << log.size() << "\n";
    return 0;
}

int cmd_solve_dist(int n, double tol, std::uint64_t max_moves, std::uint64_t seed,
                   const std::string& init, const std::string& prefix) {
    using namespace spinlab;
    using namespace spinlab::distsolver;
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("solve-dist: n must be even and >= 2");

    RunMeta meta;
    meta.seed = seed;
    meta.config_digest = fnv1a64("solve-dist n=" + std::to_string(n) + " tol=" +
                                 format_double(tol) + " max_moves=" + std::to_string(max_moves) +
                                 " init=" + init + " seed=" + std::to_string(seed));

    DensityGrid grid = (init == "eq11") ? discretize_eq11(n) : uniform_grid(n);
    if (init != "eq11" && init != "uniform")
        throw std::invalid_argument("solve-dist: --init must be uniform or eq11");

    auto comments = meta.header_lines();
    {
        std::ostringstream out;
        write_snapshot(out, grid, comments);
        write_file(prefix + "_initial.grid", out.str());
    }

    SolveOptions opts;
    opts.tol = tol;
    opts.max_moves = max_moves;
    // already-at-target starts take no moves
    ResidualReport pre = residuals(grid);
    SolveResult result;
    if (pre.r_c3 <= tol) {
        result.status = SolveStatus::Converged;
        result.move_count = 0;
        result.report = pre;
        result.trace.push_back({0, pre});
    } else {
        RandomStream rng(seed);
        result = solve(grid, default_schedule(), opts, rng);
    }

    {
        std::ostringstream out;
        write_snapshot(out, grid, comments);
        write_file(prefix + "_final.grid", out.str());
    }
    {
        std::ostringstream out;
        for (const std::string& line : comments)
            out << "# " << line << "\n";
        const char* status_name = result.status == SolveStatus::Converged  ? "converged"
                                  : result.status == SolveStatus::Stalled ? "stalled"
                                                                          : "budget_exhausted";
        out << "# status=" << status_name << "\n";
        out << "moves,r_c1,r_c2a,r_c2b,r_c3\n";
        for (const TracePoint& tp : result.trace)
            out << tp.moves << ',' << format_double(tp.res.r_c1) << ','
                << format_double(tp.res.r_c2a) << ',' << format_double(tp.res.r_c2b) << ','
                << format_double(tp.res.r_c3) << "\n";
        write_file(prefix + "_trace.csv", out.str());
        write_file(prefix + "_residuals.json",
                   residuals_json(result.report, result.move_count) + "\n");
        std::cout << "solve-dist: status=" << status_name << " moves=" << result.move_count
                  << " r_c3=" << format_double(result.report.r_c3)
                  << " plane_mass=" << format_double(plane_mass_fraction(grid)) << "\n";
    }
    return 0;
}

int cmd_geodesic(const std::string& initial_path, const std::vector<double>& constants,
                 double r0, double theta0, double phi0, int sign_ur, int sign_utheta,
                 double s_end, double abs_tol, double rel_tol, int samples,
                 const std::string& out_path, const std::string& report_path,
                 std::uint64_t seed) {
    using namespace spinlab;
    using namespace spinlab::geodesic;

    State y0;
    std::string config;
    if (!initial_path.empty()) {
        std::string text = read_file(initial_path);
        y0 = state_from_json_text(text);
        config = "geodesic initial=" + text;
    } else {
        if (constants.size() != 4)
            throw std::invalid_argument("--constants needs exactly P X A W");
        Constants c;
        c.P = constants[0];
        c.X = constants[1];
        c.A = constants[2];
        c.W = constants[3];
        c.tilt_defined = c.A > 0.0;
        c.S = c.tilt_defined ? c.X / std::sqrt(c.A) : 0.0;
        y0 = state_from_constants(c, r0, theta0, phi0, sign_ur, sign_utheta);
        std::ostringstream cfg;
        cfg << "geodesic constants=" << format_double(c.P) << ',' << format_double(c.X) << ','
            << format_double(c.A) << ',' << format_double(c.W) << " r0=" << format_double(r0)
            << " theta0=" << format_double(theta0) << " phi0=" << format_double(phi0)
            << " signs=" << sign_ur << ',' << sign_utheta;
        config = cfg.str();
    }

    RunMeta meta;
    meta.seed = seed;
    meta.config_digest = fnv1a64(config + " s_end=" + format_double(s_end) + " abs_tol=" +
                                 format_double(abs_tol) + " rel_tol=" + format_double(rel_tol) +
                                 " samples=" + std::to_string(samples));

    Constants c0 = constants_of_motion(y0);
    IntegrateControls ctl;
    ctl.abs_tol = abs_tol;
    ctl.rel_tol = rel_tol;
    Trajectory traj = integrate(y0, s_end, ctl);
    OrbitObservables obs = analyze(traj);
    OrbitClass oc = classify_orbit(c0);

    {
        std::ostringstream out;
        write_trajectory_csv(out, traj, samples, meta);
        write_file(out_path, out.str());
    }

    std::cout << "constants: P=" << format_double(c0.P) << " X=" << format_double(c0.X)
              << " A=" << format_double(c0.A) << " W=" << format_double(c0.W) << "\n";
    std::cout << "orbit class: " << orbit_kind_name(oc.kind);
    if (!oc.turning_radii.empty()) {
        std::cout << " turning radii:";
        for (double r : oc.turning_radii)
            std::cout << ' ' << format_double(r);
    }
    std::cout << "\n";
    if (c0.tilt_defined)
        std::cout << "tilt S=" << format_double(c0.S) << " min sin(theta)=" <<
            format_double(obs.min_sin_theta) << "\n";
    else
        std::cout << "tilt undefined (A=0), min sin(theta)=" <<
            format_double(obs.min_sin_theta) << "\n";
    std::cout << "observed r range: [" << format_double(obs.r_min) << ", "
              << format_double(obs.r_max) << "]\n";
    if (std::isnan(obs.fitted_node_rate))
        std::cout << "node rate: no ascending equator crossings\n";
    else
        std::cout << "node rate: fitted=" << format_double(obs.fitted_node_rate)
                  << " over " << obs.node_rates.size() << " crossings\n";
    std::cout << "drift: dP=" << format_double(traj.drift.dP)
              << " dX=" << format_double(traj.drift.dX)
              << " dA=" << format_double(traj.drift.dA)
              << " dW=" << format_double(traj.drift.dW)
              << " closed_form_gap=" << format_double(traj.drift.max_velocity_gap) << "\n";

    if (!report_path.empty()) {
        std::ostringstream out;
        out << "{\n  \"orbit_class\": \"" << orbit_kind_name(oc.kind) << "\",\n"
            << "  \"turning_radii\": [";
        for (size_t i = 0; i < oc.turning_radii.size(); i++)
            out << (i ? ", " : "") << format_double(oc.turning_radii[i]);
        out << "],\n  \"min_sin_theta\": " << format_double(obs.min_sin_theta)
            << ",\n  \"r_min\": " << format_double(obs.r_min)
            << ",\n  \"r_max\": " << format_double(obs.r_max)
            << ",\n  \"fitted_node_rate\": "
            << (std::isnan(obs.fitted_node_rate) ? std::string("null")
                                                 : format_double(obs.fitted_node_rate))
            << ",\n  \"drift\": {\"dP\": " << format_double(traj.drift.dP)
            << ", \"dX\": " << format_double(traj.drift.dX)
            << ", \"dA\": " << format_double(traj.drift.dA)
            << ", \"dW\": " << format_double(traj.drift.dW) << "}\n}\n";
        write_file(report_path, out.str());
    }
    return 0;
}

int cmd_reconstruct(const std::string& logbook_path, const std::string& law_name,
                    const std::string& out_path, const std::string& truth_path, int max_iters,
                    double tol, std::uint64_t seed, int starts) {
    using namespace spinlab;
    std::string text = read_file(logbook_path);
    std::istringstream in(text);
    auto log = experiment::read_logbook_csv(in);
    auto table = experiment::aggregate(log);

    reconstruct::Law law;
    if (law_name == "sinsq")
        law = reconstruct::Law::SinSq;
    else if (law_name == "linear")
        law = reconstruct::Law::Linear;
    else
        throw std::invalid_argument("unknown law: " + law_name);

    RunMeta meta;
    meta.seed = seed;
    meta.config_digest =
        fnv1a64("reconstruct law=" + law_name + " max_iters=" + std::to_string(max_iters) +
                " tol=" + format_double(tol) + " seed=" + std::to_string(seed) +
                " starts=" + std::to_string(starts) + " logbook=" + text);

    auto gram = reconstruct::gram_from_table(table, law);
    RandomStream rng(seed);
    auto emb = reconstruct::embed(gram, max_iters, tol, rng, starts);
    write_file(out_path, reconstruct::embedding_json(emb, meta));
    std::cout << "reconstruct: law=" << law_name << " stress=" << format_double(emb.stress)
              << " iterations=" << emb.iterations << "\n";

    if (!truth_path.empty()) {
        auto [left, right] = experiment::posts_from_json_text(read_file(truth_path));
        double rms = reconstruct::align_to_truth(emb, left, right);
        std::cout << "alignment rms=" << format_double(rms) << " rad\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin statistics and spacetime geodesic laboratory"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the two-post experiment");
    std::string sim_model, sim_trials = "1000000", sim_pairs, sim_out = "logbook.csv",
                sim_table;
    std::uint64_t sim_seed = 0;
    sim->add_option("--model", sim_model, "qm | classical | tetrahedral")->required();
    sim->add_option("--trials", sim_trials, "number of trials (integer or 1e6 form)");
    sim->add_option("--pairs", sim_pairs, "post config JSON")->required();
    sim->add_option("--seed", sim_seed, "random seed");
    sim->add_option("--out", sim_out, "logbook CSV path");
    sim->add_option("--table", sim_table, "aggregated table JSON path");

    // solve-dist
    auto* sol = app.add_subcommand("solve-dist", "search for a constraint-satisfying density");
    int sol_n = 8;
    double sol_tol = 5e-3;
    std::uint64_t sol_moves = 2000000, sol_seed = 0;
    std::string sol_init = "uniform", sol_prefix = "dist";
    sol->add_option("--n", sol_n, "cells per axis (even)");
    sol->add_option("--tol", sol_tol, "target quadrant residual");
    sol->add_option("--max-moves", sol_moves, "accepted-move budget");
    sol->add_option("--seed", sol_seed, "random seed");
    sol->add_option("--init", sol_init, "uniform | eq11");
    sol->add_option("--out-prefix", sol_prefix, "output file prefix");

    // geodesic
    auto* geo = app.add_subcommand("geodesic", "integrate a geodesic");
    std::string geo_initial, geo_out = "trajectory.csv", geo_report;
    std::vector<double> geo_constants;
    double geo_r0 = 1.0, geo_theta0 = M_PI_2, geo_phi0 = 0.0;
    int geo_sur = 1, geo_suth = 1, geo_samples = 1000;
    double geo_send = 100.0, geo_atol = 1e-10, geo_rtol = 1e-10;
    std::uint64_t geo_seed = 0;
    geo->add_option("--initial", geo_initial, "initial state JSON");
    geo->add_option("--constants", geo_constants, "P X A W")->expected(4);
    geo->add_option("--r0", geo_r0, "starting radius (with --constants)");
    geo->add_option("--theta0", geo_theta0, "starting polar angle");
    geo->add_option("--phi0", geo_phi0, "starting azimuth");
    geo->add_option("--sign-ur", geo_sur, "sign of U^r (+1/-1)");
    geo->add_option("--sign-utheta", geo_suth, "sign of U^theta (+1/-1)");
    geo->add_option("--s-end", geo_send, "affine length");
    geo->add_option("--abs-tol", geo_atol, "absolute tolerance");
    geo->add_option("--rel-tol", geo_rtol, "relative tolerance");
    geo->add_option("--samples", geo_samples, "CSV sample count");
    geo->add_option("--out", geo_out, "trajectory CSV path");
    geo->add_option("--report", geo_report, "orbit report JSON path");
    geo->add_option("--seed", geo_seed, "seed recorded in metadata");

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "recover mark directions from a logbook");
    std::string rec_log, rec_law = "sinsq", rec_out = "embedding.json", rec_truth;
    int rec_iters = 500, rec_starts = 4;
    double rec_tol = 1e-13;
    std::uint64_t rec_seed = 0;
    rec->add_option("--logbook", rec_log, "logbook CSV")->required();
    rec->add_option("--law", rec_law, "sinsq | linear");
    rec->add_option("--out", rec_out, "embedding JSON path");
    rec->add_option("--truth", rec_truth, "ground-truth post config JSON");
    rec->add_option("--max-iters", rec_iters, "iteration budget");
    rec->add_option("--tol", rec_tol, "stress decrease tolerance");
    rec->add_option("--seed", rec_seed, "random seed");
    rec->add_option("--starts", rec_starts, "multi-start count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_model, sim_trials, sim_pairs, sim_seed, sim_out, sim_table);
        if (sol->parsed())
            return cmd_solve_dist(sol_n, sol_tol, sol_moves, sol_seed, sol_init, sol_prefix);
        if (geo->parsed())
            return cmd_geodesic(geo_initial, geo_constants, geo_r0, geo_theta0, geo_phi0,
                                geo_sur, geo_suth, geo_send, geo_atol, geo_rtol, geo_samples,
                                geo_out, geo_report, geo_seed);
        if (rec->parsed())
            return cmd_reconstruct(rec_log, rec_law, rec_out, rec_truth, rec_iters, rec_tol,
                                   rec_seed, rec_starts);
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    } catch (const spinlab::geodesic::PoleError& e) {
        std::cerr << "numerical failure: " << e.what() << " at s=" << e.s << "\n";
        return 3;
    } catch (const spinlab::geodesic::StepUnderflowError& e) {
        std::cerr << "numerical failure: " << e.what() << " at s=" << e.s << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
