#include "chacs/error.hpp"
#include "chacs/harness.hpp"
#include "chacs/henon.hpp"
#include "chacs/io.hpp"
#include "chacs/irnls.hpp"
#include "chacs/rancs.hpp"
#include "chacs/slave.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace chacs;

namespace {

using Vec = std::vector<double>;

py::array_t<double> states_array(const Trajectory& t)
{
    py::array_t<double> out({static_cast<py::ssize_t>(t.size()), py::ssize_t{2}});
    auto v = out.mutable_unchecked<2>();
    for (std::size_t n = 0; n < t.size(); ++n) {
        v(static_cast<py::ssize_t>(n), 0) = t[n].x;
        v(static_cast<py::ssize_t>(n), 1) = t[n].y;
    }
    return out;
}

Distribution distribution_arg(const std::string& name) { return parse_distribution(name); }

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Chaos-based compressed sensing core";

    auto base = py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    // Subclasses must be registered after their bases so the most derived type wins.
    py::register_exception<DivergenceError>(m, "DivergenceError", numerical.ptr());
    py::register_exception<ScalingFailure>(m, "ScalingFailure", numerical.ptr());
    py::register_exception<SolverStall>(m, "SolverStall", numerical.ptr());
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
    py::register_exception<EmptyMeasurement>(m, "EmptyMeasurement", base.ptr());

    m.attr("DIVERGENCE_BOUND") = kDivergenceBound;

    py::class_<HenonParams>(m, "HenonParams")
        .def(py::init([](double a, double b) { return HenonParams{a, b}; }), py::arg("a") = 1.4, py::arg("b") = 0.3)
        .def_readwrite("a", &HenonParams::a)
        .def_readwrite("b", &HenonParams::b)
        .def("__repr__", [](const HenonParams& p) {
            return "HenonParams(a=" + format_real(p.a) + ", b=" + format_real(p.b) + ")";
        });

    py::class_<PlanarState>(m, "PlanarState")
        .def(py::init([](double x, double y) { return PlanarState{x, y}; }), py::arg("x") = 0.0, py::arg("y") = 0.0)
        .def_readwrite("x", &PlanarState::x)
        .def_readwrite("y", &PlanarState::y)
        .def(py::self == py::self)
        .def("__repr__", [](const PlanarState& s) {
            return "PlanarState(x=" + format_real(s.x) + ", y=" + format_real(s.y) + ")";
        });
    py::implicitly_convertible<py::tuple, PlanarState>();

    m.def("henon_step", &henon_step, py::arg("state"), py::arg("params") = HenonParams{},
          py::arg("excitation") = 0.0);
    m.def(
        "run_master",
        [](const HenonParams& p, const PlanarState& init, std::size_t steps) {
            return states_array(run_master(p, init, steps));
        },
        py::arg("params"), py::arg("init"), py::arg("steps"), "States (steps + 1, 2) of the free orbit.");
    m.def(
        "run_excited_master",
        [](const HenonParams& p, const PlanarState& init, const Vec& s) {
            return states_array(run_excited_master(p, init, s));
        },
        py::arg("params"), py::arg("init"), py::arg("excitation"));
    m.def(
        "sync_error",
        [](const HenonParams& p, const PlanarState& master_init, const PlanarState& slave_init, std::size_t lambda,
           std::size_t steps) {
            return run_impulsive_slave_free(run_master(p, master_init, steps), lambda, p, slave_init).error;
        },
        py::arg("params"), py::arg("master_init"), py::arg("slave_init"), py::arg("lambda_"), py::arg("steps"),
        "Pre-injection |x error| of an impulsively synchronised slave.");

    py::class_<ChaosReport>(m, "ChaosReport")
        .def_readonly("bounded", &ChaosReport::bounded)
        .def_readonly("lyapunov_estimate", &ChaosReport::lyapunov_estimate);
    m.def(
        "check_chaotic",
        [](const HenonParams& p, const PlanarState& init, std::optional<Vec> excitation, std::size_t transient,
           std::size_t steps) {
            std::optional<std::span<const double>> span;
            if (excitation) span = std::span<const double>(*excitation);
            return check_chaotic(p, init, span, ChaosCheckOptions{transient, steps});
        },
        py::arg("params"), py::arg("init"), py::arg("excitation") = py::none(), py::arg("transient") = 1000,
        py::arg("steps") = 100000);

    py::class_<Dictionary>(m, "Dictionary")
        .def(py::init<std::size_t>(), py::arg("n"))
        .def_property_readonly("n", &Dictionary::size)
        .def_property_readonly("atoms", &Dictionary::atoms, py::return_value_policy::reference_internal)
        .def("frequency", &Dictionary::frequency, py::arg("k"));

    py::class_<SparseCoefficients>(m, "SparseCoefficients")
        .def_readonly("alpha", &SparseCoefficients::alpha)
        .def_readonly("support", &SparseCoefficients::support)
        .def_property_readonly("distribution",
                               [](const SparseCoefficients& c) { return std::string(to_string(c.distribution)); });
    m.def(
        "sample_sparse_coefficients",
        [](std::size_t n, std::size_t k, const std::string& dist, std::uint64_t seed) {
            return sample_sparse_coefficients(n, k, distribution_arg(dist), seed);
        },
        py::arg("n"), py::arg("k"), py::arg("distribution") = "gaussian", py::arg("seed") = 0);

    py::class_<Signal>(m, "Signal")
        .def_readonly("samples", &Signal::samples)
        .def_readonly("scale", &Signal::scale);
    m.def(
        "synthesize_signal", [](const Dictionary& d, const Vec& alpha, double scale) {
            return synthesize_signal(d, alpha, scale);
        },
        py::arg("dictionary"), py::arg("alpha"), py::arg("scale") = 1.0);
    m.def(
        "analyze_signal", [](const Dictionary& d, const Vec& s) { return analyze_signal(d, s); },
        py::arg("dictionary"), py::arg("samples"));
    m.def(
        "choose_scale",
        [](const Dictionary& d, const Vec& alpha, const HenonParams& p, const PlanarState& init, double target) {
            return choose_scale(d, alpha, p, init, target);
        },
        py::arg("dictionary"), py::arg("alpha"), py::arg("params") = HenonParams{},
        py::arg("init") = PlanarState{0.25, 0.25}, py::arg("target_amplitude") = kDefaultTargetAmplitude);

    py::class_<MeasurementRecord>(m, "MeasurementRecord")
        .def_readonly("params", &MeasurementRecord::params)
        .def_readonly("lambda_", &MeasurementRecord::lambda)
        .def_readonly("n", &MeasurementRecord::n)
        .def_readonly("m", &MeasurementRecord::m)
        .def_readonly("initial", &MeasurementRecord::initial)
        .def_readonly("scale", &MeasurementRecord::scale)
        .def_readonly("z", &MeasurementRecord::z)
        .def("to_json", [](const MeasurementRecord& r) { return to_json(r); })
        .def_static("from_json", &measurement_record_from_json, py::arg("text"));
    m.def("measure", &measure, py::arg("params"), py::arg("init"), py::arg("signal"), py::arg("lambda_"));
    m.def(
        "run_excited_slave",
        [](const MeasurementRecord& rec, const Vec& alpha, const Dictionary& d, bool jacobian) -> py::object {
            SlaveRun run = run_excited_slave(rec, alpha, d, {.jacobian = jacobian});
            if (!jacobian) return py::cast(run.zbar);
            return py::make_tuple(run.zbar, *run.jacobian);
        },
        py::arg("record"), py::arg("alpha"), py::arg("dictionary"), py::arg("jacobian") = false,
        "Slave outputs, or (outputs, Jacobian) when jacobian=True.");

    py::class_<InnerConfig>(m, "InnerConfig")
        .def(py::init<>())
        .def_readwrite("max_inner", &InnerConfig::max_inner)
        .def_readwrite("gradient_tol", &InnerConfig::gradient_tol)
        .def_readwrite("initial_damping", &InnerConfig::initial_damping);
    py::class_<IRNLSConfig>(m, "IRNLSConfig")
        .def(py::init<>())
        .def_readwrite("mu", &IRNLSConfig::mu)
        .def_readwrite("eps", &IRNLSConfig::eps)
        .def_readwrite("outer_tol", &IRNLSConfig::outer_tol)
        .def_readwrite("max_outer", &IRNLSConfig::max_outer)
        .def_readwrite("inner", &IRNLSConfig::inner)
        .def("validate", &IRNLSConfig::validate);

    py::class_<ReconstructionResult>(m, "ReconstructionResult")
        .def_readonly("alpha_hat", &ReconstructionResult::alpha_hat)
        .def_readonly("objective_history", &ReconstructionResult::objective_history)
        .def_readonly("outer_iterations", &ReconstructionResult::outer_iterations)
        .def_readonly("converged", &ReconstructionResult::converged)
        .def_readonly("final_relative_change", &ReconstructionResult::final_relative_change)
        .def("to_json", [](const ReconstructionResult& r) { return to_json(r); });
    m.def(
        "compute_weights", [](const Vec& alpha, double eps) { return compute_weights(alpha, eps).w; },
        py::arg("alpha"), py::arg("eps") = 1e-14);
    m.def("irnls_reconstruct", &irnls_reconstruct, py::arg("record"), py::arg("dictionary"),
          py::arg("config") = IRNLSConfig{}, py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());

    py::class_<LinearIrlsResult>(m, "LinearIrlsResult")
        .def_readonly("alpha_hat", &LinearIrlsResult::alpha_hat)
        .def_readonly("objective_history", &LinearIrlsResult::objective_history)
        .def_readonly("majorized_history", &LinearIrlsResult::majorized_history)
        .def_readonly("outer_iterations", &LinearIrlsResult::outer_iterations)
        .def_readonly("converged", &LinearIrlsResult::converged)
        .def_readonly("ridge_fallback", &LinearIrlsResult::ridge_fallback);
    m.def(
        "generate_random_taps", [](std::size_t l, std::uint64_t seed) { return generate_random_taps(l, seed).taps; },
        py::arg("length"), py::arg("seed") = 0);
    m.def(
        "fir_measure",
        [](const Vec& s, const Vec& taps, std::size_t lambda) { return fir_measure(s, RancsFilter{taps}, lambda); },
        py::arg("signal"), py::arg("taps"), py::arg("lambda_"));
    m.def(
        "build_measurement_matrix",
        [](const Vec& taps, const Dictionary& d, std::size_t lambda) {
            return build_measurement_matrix(RancsFilter{taps}, d, d.size(), lambda);
        },
        py::arg("taps"), py::arg("dictionary"), py::arg("lambda_"));
    m.def(
        "irls_linear_reconstruct",
        [](const Eigen::MatrixXd& a, const Vec& z, const IRNLSConfig& cfg) { return irls_linear_reconstruct(a, z, cfg); },
        py::arg("matrix"), py::arg("z"), py::arg("config") = IRNLSConfig{});

    m.def("relative_error", [](const Vec& s, const Vec& e) { return relative_error(s, e); }, py::arg("s_true"),
          py::arg("s_hat"));
    m.def("median_error", [](const Vec& e) { return median_error(e); }, py::arg("errors"));

    py::class_<TrialSettings>(m, "TrialSettings")
        .def(py::init<>())
        .def_readwrite("n", &TrialSettings::n)
        .def_readwrite("params", &TrialSettings::params)
        .def_readwrite("init", &TrialSettings::init)
        .def_readwrite("target_amplitude", &TrialSettings::target_amplitude)
        .def_readwrite("solver", &TrialSettings::solver);

    py::class_<TrialRecord>(m, "TrialRecord")
        .def_property_readonly("method", [](const TrialRecord& t) { return std::string(to_string(t.method)); })
        .def_property_readonly("distribution",
                               [](const TrialRecord& t) { return std::string(to_string(t.distribution)); })
        .def_readonly("k", &TrialRecord::k)
        .def_readonly("lambda_", &TrialRecord::lambda)
        .def_readonly("filter_length", &TrialRecord::filter_length)
        .def_readonly("seed", &TrialRecord::seed)
        .def_readonly("err", &TrialRecord::err)
        .def_readonly("outer_iterations", &TrialRecord::outer_iterations)
        .def_readonly("converged", &TrialRecord::converged);
    m.def(
        "run_chacs_trial",
        [](const TrialSettings& s, std::size_t k, std::size_t lambda, const std::string& dist, std::uint64_t seed) {
            return run_chacs_trial(s, k, lambda, distribution_arg(dist), seed);
        },
        py::arg("settings"), py::arg("k"), py::arg("lambda_"), py::arg("distribution") = "gaussian",
        py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_rancs_trial",
        [](const TrialSettings& s, std::size_t k, std::size_t lambda, std::size_t l, const std::string& dist,
           std::uint64_t seed) { return run_rancs_trial(s, k, lambda, l, distribution_arg(dist), seed); },
        py::arg("settings"), py::arg("k"), py::arg("lambda_"), py::arg("filter_length"),
        py::arg("distribution") = "gaussian", py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());

    m.def(
        "run_sweep",
        [](const std::string& method, const TrialSettings& settings, std::vector<std::string> distributions,
           std::vector<std::size_t> lambdas, std::vector<std::size_t> ks, std::vector<std::size_t> filter_lengths,
           std::size_t realizations, std::uint64_t seed, unsigned threads) {
            SweepGrid grid;
            if (method == "chacs") grid.method = Method::ChaCS;
            else if (method == "rancs") grid.method = Method::RanCS;
            else throw InvalidArgument("method must be 'chacs' or 'rancs'");
            grid.distributions.clear();
            for (const auto& d : distributions) grid.distributions.push_back(distribution_arg(d));
            grid.lambdas = std::move(lambdas);
            grid.ks = std::move(ks);
            grid.filter_lengths = std::move(filter_lengths);
            SweepOptions opts;
            opts.realizations = realizations;
            opts.master_seed = seed;
            opts.threads = threads;
            SweepTable table;
            {
                py::gil_scoped_release release;
                table = run_sweep(grid, settings, opts);
            }
            std::ostringstream trials, summary;
            write_trials_csv(trials, table.trials);
            write_summary_csv(summary, table.summary);
            return py::make_tuple(trials.str(), summary.str());
        },
        py::arg("method"), py::arg("settings") = TrialSettings{}, py::arg("distributions") = std::vector<std::string>{"gaussian"},
        py::arg("lambdas") = std::vector<std::size_t>{2}, py::arg("ks") = std::vector<std::size_t>{5, 15, 25},
        py::arg("filter_lengths") = std::vector<std::size_t>{}, py::arg("realizations") = 20, py::arg("seed") = 0,
        py::arg("threads") = 1, "Runs a sweep and returns (trials_csv, summary_csv) text.");
}
