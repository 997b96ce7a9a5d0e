#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "regopt/equivalence.hpp"
#include "regopt/hedging.hpp"
#include "regopt/io.hpp"
#include "regopt/oracle.hpp"
#include "regopt/solver.hpp"

namespace py = pybind11;
using namespace regopt;

PYBIND11_MODULE(_regopt, m) {
    m.doc() = "Closed-form optimal terminal wealth and hedging under VaR/ES "
              "regulation in a Black-Scholes market, with a brute-force dual "
              "verification oracle.";

    py::register_exception<InfeasibleError>(m, "InfeasibleError");

    py::class_<MarketParams>(m, "MarketParams")
        .def(py::init<double, double, double, double>(), py::arg("mu"), py::arg("r"),
             py::arg("sigma"), py::arg("T"))
        .def_readonly("mu", &MarketParams::mu)
        .def_readonly("r", &MarketParams::r)
        .def_readonly("sigma", &MarketParams::sigma)
        .def_readonly("T", &MarketParams::T)
        .def("theta", &MarketParams::theta);

    py::class_<LognormalLaw>(m, "LognormalLaw")
        .def(py::init<double, double>(), py::arg("m"), py::arg("s"))
        .def_readonly("m", &LognormalLaw::m)
        .def_readonly("s", &LognormalLaw::s)
        .def("mean", &LognormalLaw::mean)
        .def("median", &LognormalLaw::median);

    m.def("terminal_density_law", &terminal_density_law, py::arg("mkt"));
    m.def("truncated_mean", &truncated_mean, py::arg("law"), py::arg("power"),
          py::arg("a"), py::arg("b"));
    m.def("quantile_threshold", &quantile_threshold, py::arg("law"), py::arg("alpha"));

    py::class_<CrraUtility>(m, "CrraUtility")
        .def(py::init<double>(), py::arg("gamma"))
        .def_readonly("gamma", &CrraUtility::gamma)
        .def("value", &CrraUtility::value)
        .def("marginal", &CrraUtility::marginal)
        .def("inverse_marginal", &CrraUtility::inverse_marginal);

    py::class_<TangentPoint>(m, "TangentPoint")
        .def_readonly("d", &TangentPoint::d)
        .def_readonly("hat_d", &TangentPoint::hat_d)
        .def("degenerate", &TangentPoint::degenerate);
    m.def("tangent_point", &tangent_point, py::arg("utility"), py::arg("d"));

    py::class_<Institution>(m, "Institution")
        .def(py::init<double, double>(), py::arg("x0"), py::arg("DT"))
        .def_static("from_growth", &Institution::from_growth, py::arg("x0"),
                    py::arg("D0"), py::arg("g"), py::arg("mkt"))
        .def_readonly("x0", &Institution::x0)
        .def_readonly("DT", &Institution::DT);

    py::class_<NoConstraint>(m, "NoConstraint").def(py::init<>());
    py::class_<VarConstraint>(m, "VarConstraint")
        .def(py::init<double, double>(), py::arg("L"), py::arg("alpha"))
        .def_readonly("L", &VarConstraint::L)
        .def_readonly("alpha", &VarConstraint::alpha);
    py::class_<EsConstraint>(m, "EsConstraint")
        .def(py::init<double, double>(), py::arg("L"), py::arg("epsilon"))
        .def_readonly("L", &EsConstraint::L)
        .def_readonly("epsilon", &EsConstraint::epsilon);

    py::class_<WealthProfile>(m, "WealthProfile")
        .def("gamma", &WealthProfile::gamma)
        .def("evaluate", &WealthProfile::evaluate, py::arg("xi"))
        .def("boundaries", &WealthProfile::boundaries);

    m.def("budget", &budget);
    m.def("default_probability", &default_probability);
    m.def("probability_below", &probability_below);
    m.def("expected_shortfall", &expected_shortfall);
    m.def("expected_utility", &expected_utility);

    py::class_<Diagnostics>(m, "Diagnostics")
        .def_readonly("budget", &Diagnostics::budget)
        .def_readonly("default_prob", &Diagnostics::default_prob)
        .def_readonly("prob_below_threshold", &Diagnostics::prob_below_threshold)
        .def_readonly("expected_shortfall", &Diagnostics::expected_shortfall)
        .def_readonly("expected_utility", &Diagnostics::expected_utility)
        .def_readonly("x0_min", &Diagnostics::x0_min)
        .def_readonly("x0_slack", &Diagnostics::x0_slack);

    py::class_<Solution>(m, "Solution")
        .def_readonly("profile", &Solution::profile)
        .def_readonly("lambda_budget", &Solution::lambda_budget)
        .def_readonly("lambda_risk", &Solution::lambda_risk)
        .def_readonly("regime", &Solution::regime)
        .def_readonly("diagnostics", &Solution::diagnostics)
        .def("to_json", [](const Solution& sol) { return solution_to_json(sol).dump(2); });

    m.def("feasibility_min", &feasibility_min, py::arg("mkt"), py::arg("constraint"));
    m.def("solve_benchmark", &solve_benchmark, py::arg("mkt"), py::arg("inst"),
          py::arg("utility"));
    m.def("solve_var", &solve_var, py::arg("mkt"), py::arg("inst"), py::arg("utility"),
          py::arg("constraint"));
    m.def("solve_es", &solve_es, py::arg("mkt"), py::arg("inst"), py::arg("utility"),
          py::arg("constraint"));
    m.def("solve", &solve, py::arg("mkt"), py::arg("inst"), py::arg("utility"),
          py::arg("constraint"));

    py::class_<EquivalenceRow>(m, "EquivalenceRow")
        .def_readonly("alpha", &EquivalenceRow::alpha)
        .def_readonly("epsilon", &EquivalenceRow::epsilon)
        .def_readonly("epsilon_pct", &EquivalenceRow::epsilon_pct);
    m.def("epsilon_for_alpha", &epsilon_for_alpha, py::arg("mkt"), py::arg("L"),
          py::arg("alpha"));
    m.def("alpha_for_epsilon", &alpha_for_epsilon, py::arg("mkt"), py::arg("L"),
          py::arg("epsilon"));
    m.def("equivalence_table", &equivalence_table, py::arg("mkt"), py::arg("x0"),
          py::arg("L"), py::arg("alphas"));

    m.def("wealth_pre_horizon", &wealth_pre_horizon, py::arg("sol"), py::arg("mkt"),
          py::arg("utility"), py::arg("t"), py::arg("xi_t"));
    m.def("strategy_pre_horizon", &strategy_pre_horizon, py::arg("sol"), py::arg("mkt"),
          py::arg("utility"), py::arg("t"), py::arg("xi_t"));
    m.def("risky_exposure", &risky_exposure, py::arg("sol"), py::arg("mkt"),
          py::arg("utility"), py::arg("t"), py::arg("xi_t"));
    m.def("relative_risk_exposure", &relative_risk_exposure, py::arg("constrained"),
          py::arg("benchmark"), py::arg("mkt"), py::arg("utility"), py::arg("t"),
          py::arg("xi_t"));

    py::class_<ReplicationReport>(m, "ReplicationReport")
        .def_readonly("rmse", &ReplicationReport::rmse)
        .def_readonly("mean_abs_budget_drift", &ReplicationReport::mean_abs_budget_drift)
        .def_readonly("budget_se", &ReplicationReport::budget_se)
        .def_readonly("n_paths", &ReplicationReport::n_paths)
        .def_readonly("n_steps", &ReplicationReport::n_steps)
        .def_readonly("boundary_hits", &ReplicationReport::boundary_hits);
    m.def("simulate_replication", &simulate_replication, py::arg("sol"), py::arg("mkt"),
          py::arg("utility"), py::arg("n_paths"), py::arg("n_steps"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<Atom>(m, "Atom")
        .def_readonly("xi", &Atom::xi)
        .def_readonly("p", &Atom::p);
    py::class_<OracleInstance>(m, "OracleInstance")
        .def_readonly("atoms", &OracleInstance::atoms)
        .def_readonly("x0", &OracleInstance::x0)
        .def_readonly("DT", &OracleInstance::DT)
        .def_readonly("gamma", &OracleInstance::gamma);
    py::class_<OracleSolution>(m, "OracleSolution")
        .def_readonly("allocation", &OracleSolution::allocation)
        .def_readonly("lambda_budget", &OracleSolution::lambda_budget)
        .def_readonly("lambda_risk", &OracleSolution::lambda_risk)
        .def_readonly("expected_utility", &OracleSolution::expected_utility)
        .def_readonly("budget", &OracleSolution::budget)
        .def_readonly("shortfall", &OracleSolution::shortfall)
        .def_readonly("prob_below", &OracleSolution::prob_below)
        .def_readonly("dual_bound", &OracleSolution::dual_bound);
    py::class_<CrosscheckReport>(m, "CrosscheckReport")
        .def_readonly("utility_gap", &CrosscheckReport::utility_gap)
        .def_readonly("profile_sup_gap", &CrosscheckReport::profile_sup_gap)
        .def_readonly("boundary_atoms", &CrosscheckReport::boundary_atoms)
        .def_readonly("bands", &CrosscheckReport::bands)
        .def_readonly("pass_", &CrosscheckReport::pass)
        .def_readonly("detail", &CrosscheckReport::detail);

    m.def("discretize", &discretize, py::arg("law"), py::arg("n_states"));
    m.def("make_instance", &make_instance, py::arg("mkt"), py::arg("inst"),
          py::arg("utility"), py::arg("constraint"), py::arg("n_states"),
          py::arg("n_grid") = 2000);
    m.def("oracle_solve", &oracle_solve, py::arg("instance"),
          py::call_guard<py::gil_scoped_release>());
    m.def("crosscheck", &crosscheck, py::arg("sol"), py::arg("instance"),
          py::arg("utility_tol") = 1e-3, py::arg("profile_tol") = 1e-2,
          py::call_guard<py::gil_scoped_release>());
}
