#include "cavsim/analysis.hpp"
#include "cavsim/ensemble.hpp"
#include "cavsim/hssde.hpp"
#include "cavsim/io.hpp"
#include "cavsim/lindblad.hpp"
#include "cavsim/mcwf.hpp"
#include "cavsim/microbeam.hpp"
#include "cavsim/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using cavsim::io::json;
using namespace cavsim;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Config {
    std::string raw;  // file bytes, hashed into the manifest
    json j;
};

Config load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::domain_error("cannot read config " + path);
    Config c;
    c.raw.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    c.j = json::parse(c.raw);
    return c;
}

FieldState initial_state(const json& j, int dim) {
    const json& init = j.at("initial");
    const std::string type = init.at("type").get<std::string>();
    if (type == "fock") return make_fock(init.at("n").get<int>(), dim);
    if (type == "coherent")
        return make_coherent(Complex(init.at("alpha_re").get<double>(),
                                     init.value("alpha_im", 0.0)),
                             dim);
    if (type == "thermal_pure")
        throw std::domain_error("initial.type thermal_pure: use engine lindblad");
    throw std::domain_error("initial.type must be fock or coherent");
}

ReservoirParams reservoir_from(const json& j, const std::string& engine) {
    ReservoirParams p;
    if (engine == "micro2" || engine == "micro3") {
        BeamSchedule sched;
        sched.r_a = j.at("r_a").get<double>();
        sched.r_b = j.at("r_b").get<double>();
        sched.validate(j.at("coupling_tau").get<double>());
        p.r_a = sched.r_a;
        p.r_b = sched.r_b;
        p.coupling_tau = j.at("coupling_tau").get<double>();
        const AtomModel model =
            engine == "micro2" ? AtomModel::two_level : AtomModel::three_level;
        p.gamma = effective_gamma(sched, *p.coupling_tau, model);
        p.nbar = sched.nbar();
        if (engine == "micro3") p.epsilon = j.at("epsilon").get<double>();
    } else {
        p.gamma = j.at("gamma").get<double>();
        p.nbar = j.value("nbar", 0.0);
        if (j.contains("epsilon")) p.epsilon = j.at("epsilon").get<double>();
    }
    p.validate(engine == "micro3");
    return p;
}

struct EngineRun {
    EnsembleResult ensemble;           // mean density on the sample grid
    std::vector<TrajectoryRecord> first;  // a few individual realizations
};

TrajectoryRecord run_one(const json& j, const std::string& engine,
                         const FieldState& psi0, const ReservoirParams& p,
                         std::uint64_t seed, bool with_snapshots) {
    const double horizon = j.at("horizon").get<double>();
    if (engine == "mcwf") {
        TrajectoryOptions o;
        o.exact_no_jump = j.value("exact", false);
        o.snapshot_every = with_snapshots ? 1 : 0;
        return run_mc_trajectory(psi0, p, horizon, j.at("dt").get<double>(),
                                 j.value("sample_every", 1L), seed, o);
    }
    if (engine == "hssde") {
        HssdeOptions o;
        o.exact_drift = j.value("exact", false);
        o.substeps = j.value("substeps", 1L);
        o.snapshot_every = with_snapshots ? 1 : 0;
        return run_hssde_trajectory(psi0, p, horizon, j.at("dt").get<double>(),
                                    j.value("sample_every", 1L), seed, o);
    }
    const AtomModel model =
        engine == "micro2" ? AtomModel::two_level : AtomModel::three_level;
    BeamSchedule sched;
    sched.r_a = *p.r_a;
    sched.r_b = *p.r_b;
    sched.poisson_arrivals = j.value("poisson_arrivals", false);
    BeamOptions o;
    o.record_atom_events = true;
    o.snapshot_every = with_snapshots ? 1 : 0;
    std::optional<double> eps;
    if (p.epsilon) eps = *p.epsilon;
    return run_beam_trajectory(psi0, sched, model, *p.coupling_tau, eps,
                               j.at("horizon").get<double>(),
                               j.at("sample_dt").get<double>(), seed, o);
}

EnsembleResult run_ensemble_engine(const json& j, const std::string& engine,
                                   const FieldState& psi0, const ReservoirParams& p,
                                   std::uint64_t seed0, int workers) {
    const double horizon = j.at("horizon").get<double>();
    const long m = j.at("trajectories").get<long>();
    if (engine == "mcwf") {
        TrajectoryOptions o;
        o.exact_no_jump = j.value("exact", false);
        return ensemble_mean_density(psi0, p, horizon, j.at("dt").get<double>(),
                                     j.value("sample_every", 1L), m, seed0, o, workers);
    }
    if (engine == "hssde") {
        HssdeOptions o;
        o.exact_drift = j.value("exact", false);
        o.substeps = j.value("substeps", 1L);
        return hssde_ensemble_mean_density(psi0, p, horizon, j.at("dt").get<double>(),
                                           j.value("sample_every", 1L), m, seed0, o,
                                           workers);
    }
    const AtomModel model =
        engine == "micro2" ? AtomModel::two_level : AtomModel::three_level;
    BeamSchedule sched;
    sched.r_a = *p.r_a;
    sched.r_b = *p.r_b;
    sched.poisson_arrivals = j.value("poisson_arrivals", false);
    std::optional<double> eps;
    if (p.epsilon) eps = *p.epsilon;
    return beam_ensemble_mean_density(psi0, sched, model, *p.coupling_tau, eps, horizon,
                                      j.at("sample_dt").get<double>(), m, seed0, workers);
}

std::vector<MasterSnapshot> run_oracle(const json& j, const FieldState& psi0,
                                       const ReservoirParams& p) {
    const double horizon = j.at("horizon").get<double>();
    const double dt = j.value("oracle_dt", 1e-3);
    const long steps = std::lround(horizon / dt);
    long sample_every = std::max(1L, steps / std::max(1L, j.value("oracle_samples", 20L)));
    return evolve_master(from_pure(psi0), p, dt, steps, sample_every);
}

void require_engine(const std::string& engine, bool allow_lindblad) {
    static const std::vector<std::string> stochastic{"mcwf", "hssde", "micro2", "micro3"};
    for (const auto& e : stochastic)
        if (engine == e) return;
    if (allow_lindblad && engine == "lindblad") return;
    throw std::domain_error("unknown engine '" + engine + "'");
}

int cmd_run(const std::string& config_path, const std::string& engine,
            std::uint64_t seed, const std::string& out_dir, int workers,
            bool no_clobber) {
    const Config cfg = load_config(config_path);
    const json& j = cfg.j;
    require_engine(engine, true);
    const int dim = j.at("dim").get<int>();
    const ReservoirParams p = reservoir_from(j, engine);
    const FieldState psi0 = initial_state(j, dim);
    const std::string config_hash = io::fnv1a_hex(cfg.raw);

    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    std::vector<fs::path> files;

    if (engine == "lindblad") {
        const auto snaps = run_oracle(j, psi0, p);
        io::write_file(out / "master.csv", io::master_csv(snaps), no_clobber);
        files.emplace_back("master.csv");
        io::write_file(out / "density.json",
                       io::to_json(snaps.back().t, snaps.back().rho).dump(2) + "\n",
                       no_clobber);
        files.emplace_back("density.json");
    } else {
        const EnsembleResult res =
            run_ensemble_engine(j, engine, psi0, p, seed, workers);
        io::write_file(out / "master.csv", io::master_csv(res.mean), no_clobber);
        files.emplace_back("master.csv");
        io::write_file(out / "density.json",
                       io::to_json(res.mean.back().t, res.mean.back().rho).dump(2) + "\n",
                       no_clobber);
        files.emplace_back("density.json");
        const long keep = std::min<long>(j.value("record_trajectories", 3L),
                                         j.at("trajectories").get<long>());
        for (long k = 0; k < keep; ++k) {
            const TrajectoryRecord rec =
                run_one(j, engine, psi0, p, trajectory_seed(seed, k), false);
            if (!rec.ok())
                throw std::runtime_error("trajectory " + std::to_string(k) +
                                         " aborted: " + *rec.abort_reason);
            const std::string base = "traj_" + std::to_string(k);
            io::write_file(out / (base + ".csv"), io::trajectory_csv(rec), no_clobber);
            files.emplace_back(base + ".csv");
            io::write_file(out / (base + ".json"),
                           io::trajectory_sidecar(rec).dump(2) + "\n", no_clobber);
            files.emplace_back(base + ".json");
        }
        std::cout << "trajectories: " << res.total << " (aborted " << res.aborted
                  << ")\n";
    }
    io::write_manifest(out, files, config_hash);
    std::cout << "wrote " << files.size() + 1 << " files to " << out_dir << "\n";
    return 0;
}

int cmd_compare(const std::string& config_path, const std::string& engine,
                std::uint64_t seed, const std::string& out_dir, int workers,
                bool no_clobber) {
    const Config cfg = load_config(config_path);
    const json& j = cfg.j;
    require_engine(engine, false);
    const int dim = j.at("dim").get<int>();
    const ReservoirParams p = reservoir_from(j, engine);
    const FieldState psi0 = initial_state(j, dim);

    const EnsembleResult res = run_ensemble_engine(j, engine, psi0, p, seed, workers);
    // Oracle snapshots on the stochastic sample grid.
    const double horizon = j.at("horizon").get<double>();
    const long grid = static_cast<long>(res.mean.size()) - 1;
    const double grid_dt = horizon / grid;
    const double dt = j.value("oracle_dt", 1e-3);
    const long per = std::max(1L, std::lround(grid_dt / dt));
    const auto oracle =
        evolve_master(from_pure(psi0), p, grid_dt / per, grid * per, per);
    if (oracle.size() != res.mean.size())
        throw std::runtime_error("compare: oracle/ensemble grid mismatch");

    json report;
    report["engine"] = engine;
    report["trajectories"] = res.total;
    report["aborted"] = res.aborted;
    json points = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        const double d = trace_distance(res.mean[i].rho, oracle[i].rho);
        worst = std::max(worst, d);
        points.push_back({{"t", oracle[i].t}, {"trace_distance", d}});
    }
    report["points"] = points;
    report["max_trace_distance"] = worst;

    fs::create_directories(out_dir);
    io::write_file(fs::path(out_dir) / "compare.json", report.dump(2) + "\n", no_clobber);
    io::write_manifest(out_dir, {"compare.json"}, io::fnv1a_hex(cfg.raw));
    std::cout << "max trace distance vs oracle: " << worst << "\n";
    return 0;
}

int cmd_qgrid(const std::string& config_path, const std::string& engine,
              std::uint64_t seed, const std::string& out_dir, bool no_clobber) {
    const Config cfg = load_config(config_path);
    const json& j = cfg.j;
    require_engine(engine, false);
    const int dim = j.at("dim").get<int>();
    const ReservoirParams p = reservoir_from(j, engine);
    const FieldState psi0 = initial_state(j, dim);

    const TrajectoryRecord rec = run_one(j, engine, psi0, p, seed, true);
    if (!rec.ok()) throw std::runtime_error("trajectory aborted: " + *rec.abort_reason);
    if (rec.snapshots.empty()) throw std::runtime_error("qgrid: no snapshots");

    QGridSpec spec;
    if (j.contains("qgrid")) {
        const json& q = j["qgrid"];
        spec.re_min = q.value("re_min", spec.re_min);
        spec.re_max = q.value("re_max", spec.re_max);
        spec.im_min = q.value("im_min", spec.im_min);
        spec.im_max = q.value("im_max", spec.im_max);
        spec.nx = q.value("nx", spec.nx);
        spec.ny = q.value("ny", spec.ny);
    }
    const auto& [t_final, psi_final] = rec.snapshots.back();
    const QGrid g = husimi_q(psi_final, spec);

    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    io::write_file(out / "qgrid.csv", io::qgrid_csv(g), no_clobber);
    json meta;
    meta["engine"] = engine;
    meta["seed"] = seed;
    meta["t"] = t_final;
    meta["n_mean"] = expval_number(psi_final);
    io::write_file(out / "qgrid_meta.json", meta.dump(2) + "\n", no_clobber);
    io::write_manifest(out, {"qgrid.csv", "qgrid_meta.json"}, io::fnv1a_hex(cfg.raw));
    std::cout << "Q grid at t = " << t_final << " written to " << out_dir << "\n";
    return 0;
}

int cmd_pmf(const std::string& config_path, const std::string& engine,
            std::uint64_t seed, const std::string& out_dir, bool no_clobber) {
    const Config cfg = load_config(config_path);
    const json& j = cfg.j;
    require_engine(engine, false);
    const int dim = j.at("dim").get<int>();
    const ReservoirParams p = reservoir_from(j, engine);
    const FieldState psi0 = initial_state(j, dim);

    const TrajectoryRecord rec = run_one(j, engine, psi0, p, seed, true);
    if (!rec.ok()) throw std::runtime_error("trajectory aborted: " + *rec.abort_reason);
    const double burn_in = j.value("burn_in", 0.0);
    const auto pmf = time_avg_photon_pmf(rec.snapshots, burn_in);
    std::vector<double> be(pmf.size());
    for (std::size_t n = 0; n < pmf.size(); ++n)
        be[n] = bose_einstein_pmf(p.nbar, static_cast<int>(n));
    const double tv = compare_pmf(pmf, be);

    fs::create_directories(out_dir);
    io::write_file(fs::path(out_dir) / "pmf.csv", io::pmf_csv(pmf, p.nbar), no_clobber);
    io::write_manifest(out_dir, {"pmf.csv"}, io::fnv1a_hex(cfg.raw));
    std::cout << "total variation vs Bose-Einstein: " << tv << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Damped-cavity trajectory simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", engine = "mcwf";
    std::uint64_t seed = 1;
    int workers = 1;
    bool no_clobber = false;

    auto add_common = [&](CLI::App* sub, bool with_workers) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--seed", seed, "base RNG seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--engine", engine,
                        "lindblad | mcwf | hssde | micro2 | micro3");
        sub->add_flag("--no-clobber", no_clobber, "refuse to overwrite outputs");
        if (with_workers) sub->add_option("--workers", workers, "thread count");
    };

    CLI::App* run = app.add_subcommand("run", "simulate and write outputs");
    add_common(run, true);
    CLI::App* compare =
        app.add_subcommand("compare", "ensemble mean vs master-equation oracle");
    add_common(compare, true);
    CLI::App* qgrid = app.add_subcommand("qgrid", "Husimi Q of one trajectory's end state");
    add_common(qgrid, false);
    CLI::App* pmf = app.add_subcommand("pmf", "time-averaged photon statistics");
    add_common(pmf, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (run->parsed())
            return cmd_run(config_path, engine, seed, out_dir, workers, no_clobber);
        if (compare->parsed())
            return cmd_compare(config_path, engine, seed, out_dir, workers, no_clobber);
        if (qgrid->parsed())
            return cmd_qgrid(config_path, engine, seed, out_dir, no_clobber);
        return cmd_pmf(config_path, engine, seed, out_dir, no_clobber);
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
