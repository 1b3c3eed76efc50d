#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "crnstab/crn.hpp"
#include "crnstab/limits.hpp"
#include "crnstab/lyapunov.hpp"
#include "crnstab/ode.hpp"
#include "crnstab/partition.hpp"
#include "crnstab/rng.hpp"
#include "crnstab/simulate.hpp"
#include "crnstab/stats.hpp"

namespace py = pybind11;
using namespace crnstab;

namespace {

py::object u128_to_pyint(unsigned __int128 v) {
    const auto hi = static_cast<std::uint64_t>(v >> 64);
    const auto lo = static_cast<std::uint64_t>(v);
    py::object big = py::cast(hi);
    return big.attr("__lshift__")(py::cast(64)).attr("__or__")(py::cast(lo));
}

std::string state_repr(const LatticeState& x) {
    std::ostringstream s;
    s << "State(" << x.x1 << ", " << x.x2 << ")";
    return s.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "simulation and drift-certification toolkit for a two-species reaction network";

    // ---- states and the network ----
    py::class_<LatticeState>(m, "State")
        .def(py::init<>())
        .def(py::init<std::int64_t, std::int64_t>(), py::arg("x1"), py::arg("x2"))
        .def_readwrite("x1", &LatticeState::x1)
        .def_readwrite("x2", &LatticeState::x2)
        .def("norm1", &LatticeState::norm1)
        .def("__eq__", [](const LatticeState& a, const LatticeState& b) { return a == b; })
        .def("__repr__", &state_repr);

    py::enum_<ChainKind>(m, "Chain")
        .value("X", ChainKind::X)
        .value("Y", ChainKind::Y)
        .value("Z", ChainKind::Z);

    m.def(
        "falling_factorial",
        [](std::uint64_t y, unsigned p) { return u128_to_pyint(falling_factorial(y, p)); },
        py::arg("y"), py::arg("p"), "y (y-1) ... (y-p+1); exact integer, 0 when y < p");
    m.def("propensities", &propensities, py::arg("chain"), py::arg("x"));
    m.def("jump_targets", &jump_targets, py::arg("chain"), py::arg("x"));
    m.def(
        "apply_generator",
        [](ChainKind chain, const std::function<double(LatticeState)>& V, LatticeState x) {
            return apply_generator(chain, V, x);
        },
        py::arg("chain"), py::arg("V"), py::arg("x"),
        "sum of rate * (V(target) - V(x)) in fixed reaction order");

    // ---- partition ----
    py::class_<PartitionParams>(m, "PartitionParams")
        .def(py::init<>())
        .def_readwrite("p_num", &PartitionParams::p_num)
        .def_readwrite("p_den", &PartitionParams::p_den)
        .def_readwrite("eta0", &PartitionParams::eta0)
        .def_readwrite("eta1", &PartitionParams::eta1)
        .def_readwrite("beta", &PartitionParams::beta)
        .def("p", &PartitionParams::p)
        .def("q", &PartitionParams::q)
        .def("validate", &PartitionParams::validate)
        .def("analysis_condition_gaps", &PartitionParams::analysis_condition_gaps);

    py::class_<AxialCoord>(m, "AxialCoord")
        .def(py::init<std::int64_t, std::int64_t>(), py::arg("r"), py::arg("d"))
        .def_readwrite("r", &AxialCoord::r)
        .def_readwrite("d", &AxialCoord::d)
        .def("__repr__", [](const AxialCoord& a) {
            return "AxialCoord(" + std::to_string(a.r) + ", " + std::to_string(a.d) + ")";
        });

    py::enum_<Region>(m, "Region")
        .value("SideRight", Region::SideRight)
        .value("SideLeft", Region::SideLeft)
        .value("ConeCenter", Region::ConeCenter)
        .value("ConeRight", Region::ConeRight)
        .value("ConeLeft", Region::ConeLeft);

    py::enum_<DeltaSide>(m, "DeltaSide")
        .value("NoStrip", DeltaSide::None)
        .value("Right", DeltaSide::Right)
        .value("Left", DeltaSide::Left);

    m.def("to_axial", &to_axial, py::arg("x"));
    m.def("from_axial", &from_axial, py::arg("a"));
    m.def("classify", &classify, py::arg("x"), py::arg("params"));
    m.def("in_delta", &in_delta, py::arg("x"), py::arg("params"));
    m.def("cone_exit_q", &cone_exit_q, py::arg("params"));

    // ---- energy and certification ----
    py::class_<EnergyParams>(m, "EnergyParams")
        .def_static("make", &EnergyParams::make, py::arg("params"))
        .def_readwrite("partition", &EnergyParams::partition)
        .def_readonly("c_s", &EnergyParams::c_s);

    m.def("c_S", &c_S, py::arg("p"));
    m.def("energy",
          py::overload_cast<double, double, const EnergyParams&>(&energy), py::arg("x1"),
          py::arg("x2"), py::arg("params"));
    m.def("energy", py::overload_cast<LatticeState, const EnergyParams&>(&energy), py::arg("x"),
          py::arg("params"));
    m.def("energy_axial", &energy_axial, py::arg("r"), py::arg("d"), py::arg("params"));
    m.def("drift", &drift, py::arg("x"), py::arg("params"));

    py::enum_<ScanRegion>(m, "ScanRegion")
        .value("All", ScanRegion::All)
        .value("OutsideInteriorCone", ScanRegion::OutsideInteriorCone)
        .value("InteriorCone", ScanRegion::InteriorCone)
        .value("RightTransport", ScanRegion::RightTransport)
        .value("LeftTransport", ScanRegion::LeftTransport);

    py::class_<DriftViolation>(m, "DriftViolation")
        .def_readonly("state", &DriftViolation::state)
        .def_readonly("value", &DriftViolation::value);

    py::class_<DriftReport>(m, "DriftReport")
        .def_readonly("region", &DriftReport::region)
        .def_readonly("r_lo", &DriftReport::r_lo)
        .def_readonly("r_hi", &DriftReport::r_hi)
        .def_readonly("gamma", &DriftReport::gamma)
        .def_readonly("points_scanned", &DriftReport::points_scanned)
        .def_readonly("violation_count", &DriftReport::violation_count)
        .def_readonly("violations", &DriftReport::violations)
        .def_readonly("max_violation_radius", &DriftReport::max_violation_radius)
        .def_readonly("certified_min_radius", &DriftReport::certified_min_radius);

    m.def(
        "verify_drift",
        [](ScanRegion region, std::int64_t r_lo, std::int64_t r_hi, double gamma,
           const EnergyParams& params, int jobs) {
            return verify_drift(region, r_lo, r_hi, gamma, params, jobs);
        },
        py::arg("region"), py::arg("r_lo"), py::arg("r_hi"), py::arg("gamma"), py::arg("params"),
        py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());

    py::class_<InterfaceViolation>(m, "InterfaceViolation")
        .def_readonly("state", &InterfaceViolation::state)
        .def_readonly("cone_value", &InterfaceViolation::cone_value)
        .def_readonly("side_value", &InterfaceViolation::side_value);

    py::class_<InterfaceReport>(m, "InterfaceReport")
        .def_readonly("r_lo", &InterfaceReport::r_lo)
        .def_readonly("r_hi", &InterfaceReport::r_hi)
        .def_readonly("points_scanned", &InterfaceReport::points_scanned)
        .def_readonly("violation_count", &InterfaceReport::violation_count)
        .def_readonly("violations", &InterfaceReport::violations)
        .def_readonly("max_violation_radius", &InterfaceReport::max_violation_radius)
        .def_readonly("certified_min_radius", &InterfaceReport::certified_min_radius);

    m.def(
        "verify_interface_ordering",
        [](std::int64_t r_lo, std::int64_t r_hi, const EnergyParams& params, int jobs) {
            return verify_interface_ordering(r_lo, r_hi, params, jobs);
        },
        py::arg("r_lo"), py::arg("r_hi"), py::arg("params"), py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>());

    py::class_<CondConstReport>(m, "CondConstReport")
        .def_readonly("eps0", &CondConstReport::eps0)
        .def_readonly("T", &CondConstReport::T)
        .def_readonly("c_tau", &CondConstReport::c_tau)
        .def_readonly("lhs1", &CondConstReport::lhs1)
        .def_readonly("rhs1", &CondConstReport::rhs1)
        .def_readonly("lhs2", &CondConstReport::lhs2)
        .def_readonly("rhs2", &CondConstReport::rhs2)
        .def_readonly("first_holds", &CondConstReport::first_holds)
        .def_readonly("second_holds", &CondConstReport::second_holds)
        .def("ok", &CondConstReport::ok);

    m.def("check_cond_const",
          py::overload_cast<double, double, const PartitionParams&>(&check_cond_const),
          py::arg("eps0"), py::arg("T"), py::arg("params"));

    // ---- randomness ----
    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream") = 0)
        .def("next_u64", &RngStream::next_u64)
        .def("uniform", &RngStream::uniform)
        .def("exponential", py::overload_cast<double>(&RngStream::exponential), py::arg("rate"))
        .def("normal", &RngStream::normal)
        .def_property_readonly("seed", &RngStream::seed)
        .def_property_readonly("stream", &RngStream::stream);

    py::class_<RngLayout>(m, "RngLayout")
        .def(py::init([](std::uint64_t seed, std::uint64_t base) {
                 return RngLayout{seed, base};
             }),
             py::arg("seed"), py::arg("base") = 0)
        .def_readwrite("seed", &RngLayout::seed)
        .def_readwrite("base", &RngLayout::base)
        .def("at", &RngLayout::at, py::arg("i"));

    // ---- simulation ----
    py::enum_<StopKind>(m, "StopKind")
        .value("ExitInteriorCone", StopKind::ExitInteriorCone)
        .value("ExitCone", StopKind::ExitCone)
        .value("NormAbove", StopKind::NormAbove)
        .value("NormBelow", StopKind::NormBelow)
        .value("Time", StopKind::Time)
        .value("Events", StopKind::Events)
        .value("Tcn", StopKind::Tcn);

    py::class_<StopRule>(m, "StopRule")
        .def(py::init([](StopKind kind, double value) {
                 return StopRule{kind, value};
             }),
             py::arg("kind"), py::arg("value"))
        .def_readwrite("kind", &StopRule::kind)
        .def_readwrite("value", &StopRule::value);

    py::class_<Event>(m, "Event")
        .def_readonly("t", &Event::t)
        .def_readonly("state", &Event::state)
        .def_readonly("reaction", &Event::reaction);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("initial", &Trajectory::initial)
        .def_readonly("events", &Trajectory::events)
        .def_readonly("final_state", &Trajectory::final_state)
        .def_readonly("final_time", &Trajectory::final_time)
        .def_readonly("event_count", &Trajectory::event_count)
        .def_readonly("stop_reason", &Trajectory::stop_reason);

    py::class_<ReactionSystem>(m, "ReactionSystem")
        .def(py::init([](ChainKind chain) {
                 return ReactionSystem{chain, {1, 1, 1, 1, 1}};
             }),
             py::arg("chain"))
        .def(py::init([](ChainKind chain, const std::array<double, 5>& constants) {
                 return ReactionSystem{chain, constants};
             }),
             py::arg("chain"), py::arg("rate_constants"))
        .def_readwrite("chain", &ReactionSystem::chain)
        .def_readwrite("rate_constants", &ReactionSystem::rate_constants)
        .def("count", &ReactionSystem::count);

    m.def(
        "ssa_run",
        [](const ReactionSystem& system, LatticeState x0, const std::vector<StopRule>& stops,
           const PartitionParams& params, RngStream& rng) {
            return ssa_run(system, x0, stops, params, rng);
        },
        py::arg("system"), py::arg("x0"), py::arg("stops"), py::arg("params"), py::arg("rng"),
        py::call_guard<py::gil_scoped_release>());

    py::class_<CoupledResult>(m, "CoupledResult")
        .def_readonly("y", &CoupledResult::y)
        .def_readonly("z", &CoupledResult::z)
        .def_readonly("sup_distance", &CoupledResult::sup_distance)
        .def_readonly("stop_time", &CoupledResult::stop_time)
        .def_readonly("stop_reason", &CoupledResult::stop_reason)
        .def_readonly("events", &CoupledResult::events);

    m.def(
        "coupled_yz_run",
        [](LatticeState x0, double T, std::int64_t N, const PartitionParams& params,
           RngStream& rng, bool record) {
            return coupled_yz_run(x0, T, N, params, rng, record);
        },
        py::arg("x0"), py::arg("T"), py::arg("N"), py::arg("params"), py::arg("rng"),
        py::arg("record") = true, py::call_guard<py::gil_scoped_release>());

    py::class_<TimeChangeMap>(m, "TimeChangeMap")
        .def(py::init<const Trajectory&>(), py::arg("z_trajectory"))
        .def("theta", &TimeChangeMap::theta, py::arg("s"))
        .def("lam", &TimeChangeMap::lambda, py::arg("t"),
             "inverse clock: the trajectory time at internal time t")
        .def("horizon", &TimeChangeMap::horizon);

    py::class_<Excursion>(m, "Excursion")
        .def_readonly("start", &Excursion::start)
        .def_readonly("end", &Excursion::end)
        .def_readonly("peak", &Excursion::peak)
        .def_readonly("duration", &Excursion::duration)
        .def_readonly("truncated", &Excursion::truncated);

    m.def("excursion_scan", &excursion_scan, py::arg("trajectory"), py::arg("lo"), py::arg("hi"));

    // ---- deterministic dynamics ----
    py::class_<Vec2>(m, "Vec2")
        .def(py::init<double, double>(), py::arg("x1"), py::arg("x2"))
        .def_readwrite("x1", &Vec2::x1)
        .def_readwrite("x2", &Vec2::x2)
        .def("__repr__", [](const Vec2& v) {
            return "Vec2(" + std::to_string(v.x1) + ", " + std::to_string(v.x2) + ")";
        });

    m.def("vector_field", &vector_field, py::arg("x"));
    m.def("diagonal_rhs", &diagonal_rhs, py::arg("f"));

    py::class_<Equilibrium>(m, "Equilibrium")
        .def_readonly("value", &Equilibrium::value)
        .def_readonly("stable", &Equilibrium::stable)
        .def_readonly("eig_tangential", &Equilibrium::eig_tangential)
        .def_readonly("eig_transversal", &Equilibrium::eig_transversal);

    m.def("equilibria", &equilibria);

    py::enum_<OdeVerdict>(m, "OdeVerdict")
        .value("ConvergedToEquilibrium", OdeVerdict::ConvergedToEquilibrium)
        .value("BlowUp", OdeVerdict::BlowUp)
        .value("HorizonReached", OdeVerdict::HorizonReached);

    py::class_<OdeOptions>(m, "OdeOptions")
        .def(py::init<>())
        .def_readwrite("rtol", &OdeOptions::rtol)
        .def_readwrite("atol", &OdeOptions::atol)
        .def_readwrite("magnitude_cap", &OdeOptions::magnitude_cap)
        .def_readwrite("grid", &OdeOptions::grid);

    py::class_<OdeResult>(m, "OdeResult")
        .def_readonly("verdict", &OdeResult::verdict)
        .def_readonly("final_time", &OdeResult::final_time)
        .def_readonly("final_state", &OdeResult::final_state)
        .def_readonly("blow_up_time", &OdeResult::blow_up_time)
        .def_readonly("blow_up_error", &OdeResult::blow_up_error)
        .def_readonly("path", &OdeResult::path)
        .def_readonly("steps_accepted", &OdeResult::steps_accepted)
        .def_readonly("steps_rejected", &OdeResult::steps_rejected);

    m.def("integrate", &integrate, py::arg("x0"), py::arg("T"), py::arg("options") = OdeOptions{},
          py::call_guard<py::gil_scoped_release>());

    py::class_<BlowUpTime>(m, "BlowUpTime")
        .def_readonly("value", &BlowUpTime::value)
        .def_readonly("error_bound", &BlowUpTime::error_bound);

    m.def("blow_up_time", &blow_up_time, py::arg("f0"));

    // ---- scaling limits ----
    m.def("k0", &k0);
    m.def("c_tau", &c_tau);
    m.def("hitting_tail_bound", &hitting_tail_bound, py::arg("s"), py::arg("eta1"));
    m.def("ou_transition_sample", &ou_transition_sample, py::arg("d0"), py::arg("t"),
          py::arg("rng"));

    py::class_<OuHittingOptions>(m, "OuHittingOptions")
        .def(py::init<>())
        .def_readwrite("d0", &OuHittingOptions::d0)
        .def_readwrite("eta1", &OuHittingOptions::eta1)
        .def_readwrite("replicas", &OuHittingOptions::replicas)
        .def_readwrite("dt", &OuHittingOptions::dt)
        .def_readwrite("max_time", &OuHittingOptions::max_time)
        .def_readwrite("bridge_correction", &OuHittingOptions::bridge_correction);

    py::class_<OuHittingResult>(m, "OuHittingResult")
        .def_readonly("tau", &OuHittingResult::tau)
        .def_readonly("censored", &OuHittingResult::censored)
        .def_readonly("exp_moment", &OuHittingResult::exp_moment)
        .def_readonly("exp_moment_se", &OuHittingResult::exp_moment_se)
        .def_readonly("bias_warning", &OuHittingResult::bias_warning)
        .def("survival", &OuHittingResult::survival, py::arg("s"));

    m.def("ou_hitting_mc", &ou_hitting_mc, py::arg("options"), py::arg("rng"), py::arg("jobs") = 1,
          py::call_guard<py::gil_scoped_release>());

    py::class_<ScalingOptions>(m, "ScalingOptions")
        .def(py::init<>())
        .def_readwrite("N", &ScalingOptions::N)
        .def_readwrite("d_N", &ScalingOptions::d_N)
        .def_readwrite("T", &ScalingOptions::T)
        .def_readwrite("replicas", &ScalingOptions::replicas)
        .def_readwrite("eta1", &ScalingOptions::eta1)
        .def_readwrite("checkpoints", &ScalingOptions::checkpoints)
        .def_readwrite("tau_time_cap", &ScalingOptions::tau_time_cap)
        .def_readwrite("tau_mc_dt", &ScalingOptions::tau_mc_dt);

    py::class_<CheckpointStat>(m, "CheckpointStat")
        .def_readonly("t", &CheckpointStat::t)
        .def_readonly("samples", &CheckpointStat::samples)
        .def_readonly("mean", &CheckpointStat::mean)
        .def_readonly("var", &CheckpointStat::var)
        .def_readonly("ou_mean", &CheckpointStat::ou_mean)
        .def_readonly("ou_var", &CheckpointStat::ou_var);

    py::class_<ScalingReport>(m, "ScalingReport")
        .def_readonly("mean_sup_dev", &ScalingReport::mean_sup_dev)
        .def_readonly("checkpoints", &ScalingReport::checkpoints)
        .def_readonly("moment1_mean", &ScalingReport::moment1_mean)
        .def_readonly("moment2_mean", &ScalingReport::moment2_mean)
        .def_readonly("moment1_target", &ScalingReport::moment1_target)
        .def_readonly("moment2_target", &ScalingReport::moment2_target)
        .def_readonly("tau_y", &ScalingReport::tau_y)
        .def_readonly("tau_censored", &ScalingReport::tau_censored)
        .def_readonly("tau_ks_distance", &ScalingReport::tau_ks_distance);

    m.def("scaling_experiment", &scaling_experiment, py::arg("options"), py::arg("rng"),
          py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());

    py::class_<MonotoneChainResult>(m, "MonotoneChainResult")
        .def_readonly("upper", &MonotoneChainResult::upper)
        .def_readonly("lower", &MonotoneChainResult::lower)
        .def_readonly("upper_hit", &MonotoneChainResult::upper_hit)
        .def_readonly("lower_hit", &MonotoneChainResult::lower_hit)
        .def_readonly("upper_time", &MonotoneChainResult::upper_time)
        .def_readonly("lower_time", &MonotoneChainResult::lower_time);

    m.def("monotone_chain_run", &monotone_chain_run, py::arg("N"), py::arg("d_start"),
          py::arg("alpha"), py::arg("eta1"), py::arg("max_steps"), py::arg("rng"));

    // ---- statistics helpers ----
    m.def("ks_two_sample", &ks_two_sample, py::arg("a"), py::arg("b"));
    m.def("ks_two_sample_pvalue", &ks_two_sample_pvalue, py::arg("a"), py::arg("b"));
    m.def("exponentiality_pvalue", &exponentiality_pvalue, py::arg("gaps"));

    m.attr("__version__") = "0.1.0";
}
