#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "safepass/kinematics.hpp"
#include "safepass/scenario.hpp"
#include "safepass/trajectory_io.hpp"
#include "safepass/verify.hpp"

namespace py = pybind11;
using namespace safepass;

namespace {

// Column-stacked copy of one vector field across all records.
template <typename Get>
Matrix stack(const Trajectory& traj, Get get) {
    if (traj.records.empty()) return Matrix(0, 0);
    const auto width = get(traj.records.front()).size();
    Matrix out(static_cast<Eigen::Index>(traj.records.size()), width);
    for (std::size_t k = 0; k < traj.records.size(); ++k) {
        out.row(static_cast<Eigen::Index>(k)) = get(traj.records[k]).transpose();
    }
    return out;
}

template <typename Get>
Vector column(const Trajectory& traj, Get get) {
    Vector out(static_cast<Eigen::Index>(traj.records.size()));
    for (std::size_t k = 0; k < traj.records.size(); ++k) out(static_cast<Eigen::Index>(k)) = get(traj.records[k]);
    return out;
}

py::dict trajectory_arrays(const Trajectory& traj) {
    py::dict d;
    d["t"] = column(traj, [](const SimRecord& r) { return r.t; });
    d["q"] = stack(traj, [](const SimRecord& r) { return r.q; });
    d["v"] = stack(traj, [](const SimRecord& r) { return r.v; });
    d["x"] = stack(traj, [](const SimRecord& r) { return r.x; });
    d["c"] = column(traj, [](const SimRecord& r) { return r.c; });
    d["h"] = column(traj, [](const SimRecord& r) { return r.h; });
    d["phi"] = column(traj, [](const SimRecord& r) { return r.phi; });
    d["u"] = stack(traj, [](const SimRecord& r) { return r.u; });
    d["u_nom"] = stack(traj, [](const SimRecord& r) { return r.u_nom; });
    d["mu"] = stack(traj, [](const SimRecord& r) { return r.mu; });
    d["S"] = column(traj, [](const SimRecord& r) { return r.storage; });
    d["hdot"] = column(traj, [](const SimRecord& r) { return r.hdot; });
    d["in_C"] = column(traj, [](const SimRecord& r) { return r.in_c ? 1.0 : 0.0; });
    d["in_C_eps"] = column(traj, [](const SimRecord& r) { return r.in_c_eps ? 1.0 : 0.0; });
    return d;
}

py::dict report_dict(const CheckReport& r) {
    py::dict d;
    d["name"] = r.name;
    d["status"] = to_string(r.status);
    d["worst_margin"] = r.worst_margin;
    d["worst_index"] = r.worst_index;
    d["worst_time"] = r.worst_time;
    d["tolerance"] = r.tolerance;
    d["detail"] = r.detail;
    return d;
}

py::list report_list(const std::vector<CheckReport>& reports) {
    py::list out;
    for (const auto& r : reports) out.append(report_dict(r));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Safe, passive barrier control for mechanical systems";

    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
    py::register_exception<CsvFormatError>(m, "CsvFormatError", PyExc_ValueError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

    // --- models -------------------------------------------------------------
    py::class_<MechanicalModel, std::shared_ptr<MechanicalModel>>(m, "MechanicalModel")
        .def_property_readonly("dof", &MechanicalModel::dof)
        .def_property_readonly("name", &MechanicalModel::name)
        .def_property_readonly("task_dim", &MechanicalModel::task_dim)
        .def("mass_matrix", &MechanicalModel::mass_matrix, py::arg("q"))
        .def("coriolis_matrix", &MechanicalModel::coriolis_matrix, py::arg("q"), py::arg("v"))
        .def("gravity_vector", &MechanicalModel::gravity_vector, py::arg("q"))
        .def("potential_energy", &MechanicalModel::potential_energy, py::arg("q"))
        .def("task_position", &MechanicalModel::task_position, py::arg("q"))
        .def("task_jacobian", &MechanicalModel::task_jacobian, py::arg("q"))
        .def("damping", &MechanicalModel::damping)
        .def(
            "acceleration",
            [](const MechanicalModel& self, const Vector& q, const Vector& v, const Vector& u,
               std::optional<Vector> mu) {
                const JointState s{q, v};
                return mu ? acceleration(self, s, u, *mu) : acceleration(self, s, u);
            },
            py::arg("q"), py::arg("v"), py::arg("u"), py::arg("mu") = py::none())
        .def(
            "kinetic_energy",
            [](const MechanicalModel& self, const Vector& q, const Vector& v) {
                return kinetic_energy(self, JointState{q, v});
            },
            py::arg("q"), py::arg("v"));

    py::class_<TwoLinkParams>(m, "TwoLinkParams")
        .def(py::init<>())
        .def_readwrite("m1", &TwoLinkParams::m1)
        .def_readwrite("m2", &TwoLinkParams::m2)
        .def_readwrite("l1", &TwoLinkParams::l1)
        .def_readwrite("l2", &TwoLinkParams::l2)
        .def_readwrite("lc1", &TwoLinkParams::lc1)
        .def_readwrite("lc2", &TwoLinkParams::lc2)
        .def_readwrite("I1", &TwoLinkParams::I1)
        .def_readwrite("I2", &TwoLinkParams::I2)
        .def_readwrite("g0", &TwoLinkParams::g0)
        .def_readwrite("damping", &TwoLinkParams::damping);

    py::class_<TwoLinkArmModel, MechanicalModel, std::shared_ptr<TwoLinkArmModel>>(m, "TwoLinkArm")
        .def(py::init<>())
        .def(py::init<const TwoLinkParams&>(), py::arg("params"))
        .def_property_readonly("params", &TwoLinkArmModel::params)
        .def("forward_kinematics",
             [](const TwoLinkArmModel& self, const Vector& q) { return Vector(forward_kinematics(self, q)); },
             py::arg("q"));

    py::class_<PointMassModel, MechanicalModel, std::shared_ptr<PointMassModel>>(m, "PointMass")
        .def(py::init<double, int, double>(), py::arg("mass"), py::arg("dof"), py::arg("damping") = 0.0)
        .def(py::init<double, int, const Vector&, const Vector&>(), py::arg("mass"), py::arg("dof"),
             py::arg("damping"), py::arg("gravity"));

    // --- constraint and barrier ----------------------------------------------
    py::enum_<ConstraintSpace>(m, "ConstraintSpace")
        .value("Joint", ConstraintSpace::Joint)
        .value("Task", ConstraintSpace::Task);

    py::class_<EllipsoidSpec>(m, "Ellipsoid")
        .def(py::init([](const Vector& center, const Matrix& shape, ConstraintSpace space) {
                 return EllipsoidSpec{center, shape, space};
             }),
             py::arg("center"), py::arg("shape"), py::arg("space") = ConstraintSpace::Task)
        .def_readwrite("center", &EllipsoidSpec::center)
        .def_readwrite("shape", &EllipsoidSpec::shape)
        .def_readwrite("space", &EllipsoidSpec::space)
        .def("validate", &EllipsoidSpec::validate, py::arg("model"));

    py::enum_<BlendCurve>(m, "BlendCurve").value("Cubic", BlendCurve::Cubic).value("Linear", BlendCurve::Linear);

    py::class_<BarrierConfig>(m, "BarrierConfig")
        .def(py::init([](double k_h, double epsilon, double v_bar, BlendCurve curve) {
                 BarrierConfig cfg{k_h, epsilon, curve, v_bar};
                 cfg.validate();
                 return cfg;
             }),
             py::arg("k_h") = 0.25, py::arg("epsilon") = 0.1, py::arg("v_bar") = 36.0,
             py::arg("kappa") = BlendCurve::Cubic)
        .def_readwrite("k_h", &BarrierConfig::k_h)
        .def_readwrite("epsilon", &BarrierConfig::epsilon)
        .def_readwrite("v_bar", &BarrierConfig::v_bar)
        .def_readwrite("kappa", &BarrierConfig::kappa);

    m.def("c_value", &c_value, py::arg("spec"), py::arg("model"), py::arg("q"));
    m.def("grad_c", &grad_c, py::arg("spec"), py::arg("model"), py::arg("q"));
    m.def(
        "h_value",
        [](const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg, const Vector& q,
           const Vector& v) { return h_value(model, spec, cfg, JointState{q, v}); },
        py::arg("model"), py::arg("spec"), py::arg("cfg"), py::arg("q"), py::arg("v"));
    m.def("phi_eps", &phi_eps, py::arg("h"), py::arg("cfg"));
    m.def("kappa", &kappa, py::arg("curve"), py::arg("h"), py::arg("eps"));

    // --- control --------------------------------------------------------------
    m.def(
        "safe_control",
        [](const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg, const Vector& q,
           const Vector& v, const Vector& u_nom) {
            const JointState s{q, v};
            double phi = 0.0;
            const Vector u = blend_torque(evaluate_barrier(model, spec, cfg, s), cfg, u_nom, &phi);
            return py::make_tuple(u, phi);
        },
        py::arg("model"), py::arg("spec"), py::arg("cfg"), py::arg("q"), py::arg("v"), py::arg("u_nom"),
        "Blended torque and blend weight phi for a given nominal torque.");
    m.def(
        "baseline_qp_control",
        [](const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg, const Vector& q,
           const Vector& v, const Vector& u_nom, double alpha_gain) -> std::optional<Vector> {
            const auto out = baseline_qp_control(model, spec, cfg, JointState{q, v}, u_nom,
                                                 linear_class_k(alpha_gain));
            if (const auto* u = std::get_if<Vector>(&out)) return *u;
            return std::nullopt;
        },
        py::arg("model"), py::arg("spec"), py::arg("cfg"), py::arg("q"), py::arg("v"), py::arg("u_nom"),
        py::arg("alpha_gain") = 1.0, "Closed-form QP filter; None when infeasible.");

    // --- calibration -----------------------------------------------------------
    py::class_<GainCalibration>(m, "GainCalibration")
        .def_readonly("mu1", &GainCalibration::mu1)
        .def_readonly("cbar", &GainCalibration::cbar)
        .def_readonly("kh_max", &GainCalibration::kh_max)
        .def_readonly("kh", &GainCalibration::kh)
        .def_readonly("v_bar", &GainCalibration::v_bar)
        .def_property_readonly("admissible", &GainCalibration::admissible);
    m.def(
        "calibrate_gain",
        [](const EllipsoidSpec& spec, const MechanicalModel& model, double kh, double v_bar, const Vector& lower,
           const Vector& upper, std::size_t samples, std::uint64_t seed) {
            return calibrate_gain(spec, model, kh, v_bar, JointBoxSampler(lower, upper, samples, seed));
        },
        py::arg("spec"), py::arg("model"), py::arg("kh"), py::arg("v_bar"), py::arg("lower"), py::arg("upper"),
        py::arg("samples") = 100000, py::arg("seed") = 0);

    // --- scenarios and simulation ------------------------------------------------
    py::class_<TrajectorySummary>(m, "TrajectorySummary")
        .def_readonly("min_h", &TrajectorySummary::min_h)
        .def_readonly("min_c", &TrajectorySummary::min_c)
        .def_readonly("max_v_sq", &TrajectorySummary::max_v_sq)
        .def_readonly("fraction_in_c_eps", &TrajectorySummary::fraction_in_c_eps)
        .def_readonly("peak_u_norm", &TrajectorySummary::peak_u_norm)
        .def_readonly("baseline_infeasible_count", &TrajectorySummary::baseline_infeasible_count);

    py::class_<Trajectory>(m, "Trajectory")
        .def("__len__", [](const Trajectory& t) { return t.records.size(); })
        .def_property_readonly("dof", &Trajectory::dof)
        .def_readonly("scenario_digest", &Trajectory::scenario_digest)
        .def("summary", &Trajectory::summary)
        .def("arrays", &trajectory_arrays, "Dict of numpy arrays, one row per record.")
        .def("to_csv", [](const Trajectory& t) {
            std::ostringstream out;
            write_csv(t, out);
            return out.str();
        })
        .def("write_csv", &write_csv_file, py::arg("path"));

    m.def("read_csv", &read_csv_file, py::arg("path"));

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("name", &Scenario::name)
        .def_property_readonly("model", [](const Scenario& s) { return std::const_pointer_cast<MechanicalModel>(s.model); })
        .def_readonly("constraint", &Scenario::constraint)
        .def_readonly("barrier", &Scenario::barrier)
        .def_readwrite("dt", &Scenario::dt)
        .def_readwrite("duration", &Scenario::duration)
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("zero_order_hold", &Scenario::zero_order_hold)
        .def_readonly("digest", &Scenario::digest);

    py::class_<TrajectoryCheckOptions>(m, "TrajectoryCheckOptions")
        .def(py::init<>())
        .def_readwrite("invariance_tol", &TrajectoryCheckOptions::invariance_tol)
        .def_readwrite("v_bar", &TrajectoryCheckOptions::v_bar)
        .def_readwrite("velocity_tol", &TrajectoryCheckOptions::velocity_tol)
        .def_readwrite("passivity_tol", &TrajectoryCheckOptions::passivity_tol)
        .def_readwrite("return_window", &TrajectoryCheckOptions::return_window)
        .def_readwrite("return_tol", &TrajectoryCheckOptions::return_tol)
        .def_readwrite("rest_speed", &TrajectoryCheckOptions::rest_speed);

    py::class_<ScenarioFile>(m, "ScenarioFile")
        .def_readonly("scenario", &ScenarioFile::scenario)
        .def_readonly("tolerances", &ScenarioFile::tolerances)
        .def_readonly("output_csv", &ScenarioFile::output_csv)
        .def("simulate", [](const ScenarioFile& f) { return simulate(f.scenario); })
        .def("calibrate", [](const ScenarioFile& f) {
            const Scenario& s = f.scenario;
            return calibrate_gain(s.constraint, *s.model, s.barrier.k_h, s.barrier.v_bar,
                                  f.calibration.sampler(s.seed));
        });

    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def("parse_scenario", &parse_scenario, py::arg("json_text"));
    m.def("simulate", &simulate, py::arg("scenario"), py::call_guard<py::gil_scoped_release>());

    // --- verification ----------------------------------------------------------------
    m.def(
        "verify",
        [](const Trajectory& traj, const TrajectoryCheckOptions& opts) {
            return report_list(run_trajectory_checks(traj, opts));
        },
        py::arg("trajectory"), py::arg("options") = TrajectoryCheckOptions{});
    m.def(
        "check_structural",
        [](const MechanicalModel& model, std::size_t samples, std::uint64_t seed, const EllipsoidSpec* spec) {
            StructuralCheckOptions opts;
            opts.samples = samples;
            opts.seed = seed;
            return report_list(check_structural(model, opts, spec));
        },
        py::arg("model"), py::arg("samples") = 1000, py::arg("seed") = 1, py::arg("spec") = nullptr);
}
