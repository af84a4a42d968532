#include "chacs/cli.hpp"

#include "chacs/diagnostics.hpp"
#include "chacs/error.hpp"
#include "chacs/harness.hpp"
#include "chacs/io.hpp"
#include "chacs/irnls.hpp"
#include "chacs/slave.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace chacs {

namespace {

std::uint64_t default_master_seed()
{
    if (const char* env = std::getenv("CHACS_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return v;
        throw InvalidArgument("CHACS_SEED must be a non-negative integer");
    }
    return 0;
}

struct MapFlags {
    double a = 1.4;
    double b = 0.3;
    double x0 = 0.25;
    double y0 = 0.25;

    void attach(CLI::App& app)
    {
        app.add_option("--a", a, "Henon parameter a")->capture_default_str();
        app.add_option("--b", b, "Henon parameter b")->capture_default_str();
        app.add_option("--x0", x0, "initial x")->capture_default_str();
        app.add_option("--y0", y0, "initial y")->capture_default_str();
    }
    HenonParams params() const { return {a, b}; }
    PlanarState init() const { return {x0, y0}; }
};

struct SolverFlags {
    IRNLSConfig config;

    void attach(CLI::App& app)
    {
        app.add_option("--mu", config.mu, "regularization weight")->check(CLI::NonNegativeNumber)->capture_default_str();
        app.add_option("--eps", config.eps, "weight floor")->check(CLI::PositiveNumber)->capture_default_str();
        app.add_option("--tol", config.outer_tol, "outer relative-change tolerance")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--max-outer", config.max_outer, "outer iteration cap")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--max-inner", config.inner.max_inner, "inner iteration cap")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--gradient-tol", config.inner.gradient_tol, "inner gradient tolerance")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }
};

void write_text(const std::string& path, const std::string& text) { write_file_atomic(path, text); }

int cmd_attractor(const MapFlags& map, std::size_t steps, const std::string& out_path, std::ostream& out)
{
    const Trajectory traj = run_master(map.params(), map.init(), steps);
    std::ostringstream csv;
    csv << "n,x,y\n";
    for (std::size_t n = 0; n < traj.size(); ++n)
        csv << n << ',' << format_real(traj[n].x) << ',' << format_real(traj[n].y) << '\n';
    write_text(out_path, csv.str());
    out << "wrote " << traj.size() << " states to " << out_path << '\n';
    return kExitOk;
}

int cmd_sync_demo(const MapFlags& map, std::size_t lambda, std::size_t steps, PlanarState slave_init,
                  const std::string& out_path, std::ostream& out)
{
    const Trajectory master = run_master(map.params(), map.init(), steps);
    const SyncRun run = run_impulsive_slave_free(master, lambda, map.params(), slave_init);
    std::ostringstream csv;
    csv << "n,x_master,x_slave,error\n";
    for (std::size_t n = 0; n < master.size(); ++n)
        csv << n << ',' << format_real(master[n].x) << ',' << format_real(run.slave[n].x) << ','
            << format_real(run.error[n]) << '\n';
    write_text(out_path, csv.str());
    out << "final sync error " << format_real(run.error.back()) << " (lambda " << lambda << ")\n";
    return kExitOk;
}

struct MeasureFlags {
    std::size_t n = 128;
    std::size_t k = 15;
    std::size_t lambda = 2;
    std::string distribution = "gaussian";
    double target_amplitude = kDefaultTargetAmplitude;
    std::uint64_t seed = 0;
    std::string out = "record.json";
    std::string truth_out;
};

int cmd_measure(const MapFlags& map, const MeasureFlags& f, std::ostream& out)
{
    const Distribution dist = parse_distribution(f.distribution);
    const Dictionary dict(f.n);
    if (f.lambda > f.n) throw EmptyMeasurement("--lambda exceeds --n");
    const SparseCoefficients coeffs = sample_sparse_coefficients(f.n, f.k, dist, f.seed);
    const double scale = choose_scale(dict, coeffs.alpha, map.params(), map.init(), f.target_amplitude);
    const Signal signal = synthesize_signal(dict, coeffs.alpha, scale);
    const MeasurementRecord record = measure(map.params(), map.init(), signal, f.lambda);
    write_text(f.out, to_json(record));
    if (!f.truth_out.empty())
        write_text(f.truth_out, to_json(GroundTruth{f.n, dist, scale, coeffs.support, coeffs.alpha}));
    out << "wrote " << record.m << " measurements to " << f.out << " (scale " << format_real(scale) << ")\n";
    return kExitOk;
}

struct ReconstructFlags {
    std::string record;
    std::string out = "result.json";
    std::string truth;
    std::size_t restarts = 1;
    std::uint64_t seed = 0;
};

int cmd_reconstruct(const ReconstructFlags& f, const IRNLSConfig& config, std::ostream& out)
{
    const MeasurementRecord record = measurement_record_from_json(read_file(f.record));
    std::optional<GroundTruth> truth;
    if (!f.truth.empty()) {
        truth = ground_truth_from_json(read_file(f.truth));
        if (truth->n != record.n) throw DimensionMismatch("--truth length does not match the record");
    }
    config.validate();
    const Dictionary dict(record.n);

    std::optional<ReconstructionResult> best;
    double best_objective = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < f.restarts; ++r) {
        const std::uint64_t seed = f.restarts == 1 ? f.seed : derive_seed(f.seed, r);
        ReconstructionResult result = irnls_reconstruct(record, dict, config, seed);
        const double objective = result.objective_history.empty() ? std::numeric_limits<double>::infinity()
                                                                  : result.objective_history.back();
        out << "restart " << r << ": objective " << format_real(objective) << ", outer iterations "
            << result.outer_iterations << (result.converged ? ", converged" : ", not converged") << '\n';
        if (!best || objective < best_objective) {
            best_objective = objective;
            best = std::move(result);
        }
    }
    write_text(f.out, to_json(*best));
    if (truth) {
        const Signal s_true = synthesize_signal(dict, truth->alpha, record.scale);
        const Signal s_hat = synthesize_signal(dict, best->alpha_hat, record.scale);
        out << "Err " << format_real(relative_error(s_true.samples, s_hat.samples)) << '\n';
    }
    return kExitOk;
}

struct SweepFlags {
    std::size_t n = 128;
    std::vector<std::size_t> lambdas{2};
    std::vector<std::size_t> ks{5, 15, 25};
    std::vector<std::string> distributions{"gaussian", "bernoulli"};
    std::vector<std::size_t> filter_lengths{64};
    std::size_t realizations = 20;
    std::uint64_t seed = 0;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    double target_amplitude = kDefaultTargetAmplitude;
    bool timing = false;
    std::string out;
    std::string summary_out;
};

int cmd_sweep(Method method, const MapFlags& map, const SweepFlags& f, const IRNLSConfig& config,
              std::ostream& out)
{
    SweepGrid grid;
    grid.method = method;
    grid.distributions.clear();
    for (const auto& d : f.distributions) grid.distributions.push_back(parse_distribution(d));
    grid.lambdas = f.lambdas;
    grid.ks = f.ks;
    grid.filter_lengths = f.filter_lengths;

    TrialSettings settings;
    settings.n = f.n;
    settings.params = map.params();
    settings.init = map.init();
    settings.target_amplitude = f.target_amplitude;
    settings.solver = config;
    build_real_fourier_dictionary(f.n); // rejects a bad N before any trial runs

    const SweepTable table = run_sweep(grid, settings, {f.realizations, f.seed, f.threads, f.timing});

    std::ostringstream trials, summary;
    write_trials_csv(trials, table.trials);
    write_summary_csv(summary, table.summary);
    write_text(f.out, trials.str());
    write_text(f.summary_out, summary.str());
    for (const SummaryRow& row : table.summary)
        out << to_string(row.key.method) << ' ' << to_string(row.key.distribution) << " lambda=" << row.key.lambda
            << " K=" << row.key.k << (method == Method::RanCS ? " L=" + std::to_string(row.key.filter_length) : "")
            << " median_err=" << format_real(row.median_err) << '\n';
    return kExitOk;
}

struct JacobianFlags {
    std::size_t n = 32;
    std::size_t k = 5;
    std::size_t lambda = 2;
    std::size_t points = 5;
    double step = 1e-6;
    std::uint64_t seed = 0;
};

int cmd_jacobian_check(const MapFlags& map, const JacobianFlags& f, std::ostream& out)
{
    const Dictionary dict(f.n);
    const SparseCoefficients coeffs = sample_sparse_coefficients(f.n, f.k, Distribution::Gaussian, f.seed);
    const double scale = choose_scale(dict, coeffs.alpha, map.params(), map.init());
    const MeasurementRecord record =
        measure(map.params(), map.init(), synthesize_signal(dict, coeffs.alpha, scale), f.lambda);

    double worst = 0.0;
    for (std::size_t p = 0; p < f.points; ++p) {
        const std::vector<double> point = random_start(f.n, derive_seed(f.seed, 100 + p));
        const SlaveRun run = run_excited_slave(record, point, dict, {.jacobian = true});
        const Eigen::MatrixXd fd = finite_difference_jacobian(record, dict, point, f.step);
        const JacobianComparison cmp = compare_jacobians(*run.jacobian, fd);
        worst = std::max(worst, cmp.worst_ratio);
        out << "point " << p << ": max_abs_err " << format_real(cmp.max_abs_error) << ", max_rel_err "
            << format_real(cmp.max_rel_error) << ", tolerance ratio " << format_real(cmp.worst_ratio) << '\n';
    }
    const bool pass = worst <= 1.0;
    out << (pass ? "PASS" : "FAIL") << ": worst tolerance ratio " << format_real(worst)
        << " (relative 1e-5, absolute floor 1e-8)\n";
    return pass ? kExitOk : kExitNumerical;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Chaos-based compressed sensing with the Henon map", "chacs"};
    app.require_subcommand(1);

    MapFlags map;
    SolverFlags solver;

    auto* attractor = app.add_subcommand("attractor", "dump a free-running orbit as CSV");
    map.attach(*attractor);
    std::size_t attractor_steps = 10000;
    std::string attractor_out = "attractor.csv";
    attractor->add_option("--steps", attractor_steps, "iterations")->capture_default_str();
    attractor->add_option("--out", attractor_out, "output CSV")->capture_default_str();

    auto* sync = app.add_subcommand("sync-demo", "impulsive synchronization error trace");
    map.attach(*sync);
    std::size_t sync_lambda = 2, sync_steps = 1000;
    PlanarState slave_init{0.0, 0.0};
    std::string sync_out = "sync.csv";
    sync->add_option("--lambda", sync_lambda, "injection spacing")->check(CLI::PositiveNumber)->capture_default_str();
    sync->add_option("--steps", sync_steps, "iterations")->capture_default_str();
    sync->add_option("--slave-x0", slave_init.x, "slave initial x")->capture_default_str();
    sync->add_option("--slave-y0", slave_init.y, "slave initial y")->capture_default_str();
    sync->add_option("--out", sync_out, "output CSV")->capture_default_str();

    std::uint64_t env_seed = 0;
    try {
        env_seed = default_master_seed();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    auto* meas = app.add_subcommand("measure", "generate a sparse signal and its chaotic measurements");
    map.attach(*meas);
    MeasureFlags mf;
    mf.seed = env_seed;
    meas->add_option("--n", mf.n, "signal length (even)")->capture_default_str();
    meas->add_option("--k", mf.k, "sparsity")->capture_default_str();
    meas->add_option("--lambda", mf.lambda, "downsampling rate")->check(CLI::PositiveNumber)->capture_default_str();
    meas->add_option("--distribution", mf.distribution, "gaussian | bernoulli")
        ->check(CLI::IsMember({"gaussian", "bernoulli"}))
        ->capture_default_str();
    meas->add_option("--target-amplitude", mf.target_amplitude, "peak excitation before validation")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    meas->add_option("--seed", mf.seed, "coefficient seed (default $CHACS_SEED or 0)");
    meas->add_option("--out", mf.out, "measurement record JSON")->capture_default_str();
    meas->add_option("--truth-out", mf.truth_out, "optional ground-truth JSON");

    auto* recon = app.add_subcommand("reconstruct", "IRNLS reconstruction from a measurement record");
    solver.attach(*recon);
    ReconstructFlags rf;
    rf.seed = env_seed;
    recon->add_option("--record", rf.record, "measurement record JSON")->required()->check(CLI::ExistingFile);
    recon->add_option("--out", rf.out, "reconstruction result JSON")->capture_default_str();
    recon->add_option("--truth", rf.truth, "ground-truth JSON; prints Err when given")->check(CLI::ExistingFile);
    recon->add_option("--restarts", rf.restarts, "random restarts; best objective wins")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    recon->add_option("--seed", rf.seed, "initialization seed (default $CHACS_SEED or 0)");

    SweepFlags chacs_flags, rancs_flags;
    auto add_sweep = [&](const char* name, const char* help, SweepFlags& f, bool rancs) {
        auto* sub = app.add_subcommand(name, help);
        map.attach(*sub);
        solver.attach(*sub);
        f.seed = env_seed;
        f.out = std::string(name) + "_trials.csv";
        f.summary_out = std::string(name) + "_summary.csv";
        sub->add_option("--n", f.n, "signal length (even)")->capture_default_str();
        sub->add_option("--lambdas", f.lambdas, "downsampling rates")->delimiter(',')->capture_default_str();
        sub->add_option("--ks", f.ks, "sparsity levels")->delimiter(',')->capture_default_str();
        sub->add_option("--distributions", f.distributions, "gaussian,bernoulli")
            ->delimiter(',')
            ->check(CLI::IsMember({"gaussian", "bernoulli"}))
            ->capture_default_str();
        if (rancs)
            sub->add_option("--filter-lengths", f.filter_lengths, "FIR lengths")
                ->delimiter(',')
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
        sub->add_option("--realizations", f.realizations, "trials per grid point")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--seed", f.seed, "master seed (default $CHACS_SEED or 0)");
        sub->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--target-amplitude", f.target_amplitude, "peak excitation before validation")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_flag("--timing", f.timing, "record wall time per trial (output no longer reproducible)");
        sub->add_option("--out", f.out, "per-trial CSV")->capture_default_str();
        sub->add_option("--summary-out", f.summary_out, "median summary CSV")->capture_default_str();
        return sub;
    };
    auto* chacs_sweep = add_sweep("chacs-sweep", "median-error sweep of the chaotic pipeline", chacs_flags, false);
    auto* rancs_sweep = add_sweep("rancs-sweep", "median-error sweep of the random-filter baseline", rancs_flags, true);

    auto* jac = app.add_subcommand("jacobian-check", "compare sensitivities with finite differences");
    map.attach(*jac);
    JacobianFlags jf;
    jf.seed = env_seed;
    jac->add_option("--n", jf.n, "signal length (even)")->capture_default_str();
    jac->add_option("--k", jf.k, "sparsity of the measured signal")->capture_default_str();
    jac->add_option("--lambda", jf.lambda, "downsampling rate")->check(CLI::PositiveNumber)->capture_default_str();
    jac->add_option("--points", jf.points, "random evaluation points")->capture_default_str();
    jac->add_option("--step", jf.step, "central-difference step")->check(CLI::PositiveNumber)->capture_default_str();
    jac->add_option("--seed", jf.seed, "seed (default $CHACS_SEED or 0)");

    if (args.empty()) {
        err << app.help();
        return kExitValidation;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    try {
        if (attractor->parsed()) return cmd_attractor(map, attractor_steps, attractor_out, out);
        if (sync->parsed()) return cmd_sync_demo(map, sync_lambda, sync_steps, slave_init, sync_out, out);
        if (meas->parsed()) return cmd_measure(map, mf, out);
        if (recon->parsed()) return cmd_reconstruct(rf, solver.config, out);
        if (chacs_sweep->parsed()) return cmd_sweep(Method::ChaCS, map, chacs_flags, solver.config, out);
        if (rancs_sweep->parsed()) return cmd_sweep(Method::RanCS, map, rancs_flags, solver.config, out);
        if (jac->parsed()) return cmd_jacobian_check(map, jf, out);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    err << app.help();
    return kExitValidation;
}

} // namespace chacs
