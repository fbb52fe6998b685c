#include "safepass/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace safepass {

namespace {

using json = nlohmann::json;

// Strict view of one JSON object: every key must be read before close(),
// otherwise the leftovers are reported as unknown.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ScenarioError(path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    std::string path(const std::string& key) const { return path_ + "." + key; }

    const json& at(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ScenarioError(path(key), "missing required key");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number()) throw ScenarioError(path(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ScenarioError(path(key), "must be finite");
        return x;
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    double positive(const std::string& key, double fallback) {
        const double x = number(key, fallback);
        if (!(x > 0.0)) throw ScenarioError(path(key), "must be positive");
        return x;
    }
    double non_negative(const std::string& key, double fallback) {
        const double x = number(key, fallback);
        if (!(x >= 0.0)) throw ScenarioError(path(key), "must be non-negative");
        return x;
    }

    std::string text(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) throw ScenarioError(path(key), "expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) {
        return has(key) ? text(key) : fallback;
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_boolean()) throw ScenarioError(path(key), "expected true or false");
        return v.get<bool>();
    }

    std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw ScenarioError(path(key), "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    Vector vector(const std::string& key, Eigen::Index size = -1) {
        const json& v = at(key);
        if (!v.is_array()) throw ScenarioError(path(key), "expected an array of numbers");
        Vector out(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ScenarioError(path(key), "expected an array of numbers");
            out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
        }
        if (!out.allFinite()) throw ScenarioError(path(key), "entries must be finite");
        if (size >= 0 && out.size() != size) {
            throw ScenarioError(path(key), "expected " + std::to_string(size) + " entries, got " +
                                               std::to_string(out.size()));
        }
        return out;
    }
    Vector vector(const std::string& key, Eigen::Index size, const Vector& fallback) {
        return has(key) ? vector(key, size) : fallback;
    }

    Matrix matrix(const std::string& key, Eigen::Index size) {
        const json& v = at(key);
        if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != size) {
            throw ScenarioError(path(key), "expected a " + std::to_string(size) + "x" +
                                               std::to_string(size) + " array of rows");
        }
        Matrix out(size, size);
        for (Eigen::Index r = 0; r < size; ++r) {
            const json& row = v[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != size) {
                throw ScenarioError(path(key), "row " + std::to_string(r) + " has the wrong length");
            }
            for (Eigen::Index c = 0; c < size; ++c) {
                const json& x = row[static_cast<std::size_t>(c)];
                if (!x.is_number()) throw ScenarioError(path(key), "expected numbers");
                out(r, c) = x.get<double>();
            }
        }
        if (!out.allFinite()) throw ScenarioError(path(key), "entries must be finite");
        return out;
    }

    Obj child(const std::string& key) { return Obj(at(key), path(key)); }

    void close() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) throw ScenarioError(path(item.key()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::shared_ptr<const MechanicalModel> parse_model(Obj o) {
    const std::string type = o.text("type");
    std::shared_ptr<const MechanicalModel> model;
    if (type == "two_link") {
        TwoLinkParams p;
        p.m1 = o.positive("m1", p.m1);
        p.m2 = o.positive("m2", p.m2);
        p.l1 = o.positive("l1", p.l1);
        p.l2 = o.positive("l2", p.l2);
        p.lc1 = o.non_negative("lc1", p.l1 / 2.0);
        p.lc2 = o.non_negative("lc2", p.l2 / 2.0);
        p.I1 = o.positive("I1", p.m1 * p.l1 * p.l1 / 12.0);
        p.I2 = o.positive("I2", p.m2 * p.l2 * p.l2 / 12.0);
        p.g0 = o.non_negative("g0", p.g0);
        const Vector damping = o.vector("damping", 2, Vector(p.damping));
        if ((damping.array() <= 0.0).any()) {
            throw ScenarioError(o.path("damping"), "entries must be positive");
        }
        p.damping = damping;
        model = std::make_shared<TwoLinkArmModel>(p);
    } else if (type == "point_mass") {
        const auto dof = static_cast<int>(o.unsigned_int("dof", 2));
        if (dof < 1) throw ScenarioError(o.path("dof"), "must be at least 1");
        const double mass = o.positive("mass", 1.0);
        const Vector damping = o.vector("damping", dof, Vector::Constant(dof, 0.1));
        if ((damping.array() < 0.0).any()) {
            throw ScenarioError(o.path("damping"), "entries must be non-negative");
        }
        const Vector gravity = o.vector("gravity", dof, Vector::Zero(dof));
        model = std::make_shared<PointMassModel>(mass, dof, damping, gravity);
    } else {
        throw ScenarioError(o.path("type"), "unknown model type '" + type +
                                                "' (expected two_link or point_mass)");
    }
    o.close();
    return model;
}

EllipsoidSpec parse_constraint(Obj o, const MechanicalModel& model) {
    EllipsoidSpec spec;
    const std::string space = o.text("space", "task");
    if (space == "task") {
        spec.space = ConstraintSpace::Task;
    } else if (space == "joint") {
        spec.space = ConstraintSpace::Joint;
    } else {
        throw ScenarioError(o.path("space"), "expected 'task' or 'joint'");
    }
    const Eigen::Index dim = spec.space == ConstraintSpace::Joint ? model.dof() : model.task_dim();
    spec.center = o.vector("center", dim);
    if (o.has("shape") == o.has("shape_diagonal")) {
        throw ScenarioError(o.path("shape"), "give exactly one of shape or shape_diagonal");
    }
    if (o.has("shape")) {
        spec.shape = o.matrix("shape", dim);
    } else {
        spec.shape = o.vector("shape_diagonal", dim).asDiagonal();
    }
    o.close();
    try {
        spec.validate(model);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(o.path(o.has("shape") ? "shape" : "shape_diagonal"), e.what());
    }
    return spec;
}

BarrierConfig parse_barrier(Obj o) {
    BarrierConfig cfg;
    cfg.k_h = o.positive("k_h", cfg.k_h);
    cfg.epsilon = o.positive("epsilon", cfg.epsilon);
    cfg.v_bar = o.positive("v_bar", cfg.v_bar);
    const std::string curve = o.text("kappa", "cubic");
    if (curve == "cubic") {
        cfg.kappa = BlendCurve::Cubic;
    } else if (curve == "linear") {
        cfg.kappa = BlendCurve::Linear;
    } else {
        throw ScenarioError(o.path("kappa"), "expected 'cubic' or 'linear'");
    }
    o.close();
    return cfg;
}

NominalController parse_nominal(Obj o, int n) {
    const std::string type = o.text("type");
    NominalController out;
    if (type == "gravity_compensation") {
        out = GravityCompensation{};
    } else if (type == "constant_torque") {
        out = ConstantTorque{o.vector("torque", n)};
    } else if (type == "inverse_dynamics") {
        InverseDynamicsTracker t;
        t.kp = o.vector("kp", n, Vector::Constant(n, 100.0));
        t.kd = o.vector("kd", n, Vector::Constant(n, 20.0));
        Obj ref = o.child("reference");
        t.reference.offset = ref.vector("offset", n);
        t.reference.amplitude = ref.vector("amplitude", n, Vector::Zero(n));
        t.reference.frequency = ref.vector("frequency", n, Vector::Zero(n));
        t.reference.phase = ref.vector("phase", n, Vector::Zero(n));
        ref.close();
        out = std::move(t);
    } else {
        throw ScenarioError(o.path("type"),
                            "unknown nominal controller '" + type +
                                "' (expected gravity_compensation, inverse_dynamics or constant_torque)");
    }
    o.close();
    return out;
}

DisturbanceProfile parse_disturbance(const json& j, const std::string& path, int n) {
    if (!j.is_array()) throw ScenarioError(path, "expected an array of windows");
    std::vector<DisturbanceWindow> windows;
    for (std::size_t i = 0; i < j.size(); ++i) {
        Obj w(j[i], path + "[" + std::to_string(i) + "]");
        DisturbanceWindow win;
        win.start = w.number("start");
        win.end = w.number("end");
        win.torque = w.vector("torque", n);
        w.close();
        windows.push_back(std::move(win));
    }
    DisturbanceProfile profile(std::move(windows));
    try {
        profile.validate(n);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(path, e.what());
    }
    return profile;
}

CalibrationSettings default_calibration(const Scenario& scn) {
    const int n = scn.model->dof();
    CalibrationSettings cal;
    const bool joint_box_from_ellipsoid =
        scn.constraint.space == ConstraintSpace::Joint || scn.model->name() == "point_mass";
    if (joint_box_from_ellipsoid) {
        // Axis extents of {p : (p - x0)^T P (p - x0) <= 1} are sqrt((P^-1)_ii).
        const Vector half = scn.constraint.shape.inverse().diagonal().cwiseSqrt() * 1.05;
        cal.lower = scn.constraint.center - half;
        cal.upper = scn.constraint.center + half;
    } else {
        cal.lower = Vector::Constant(n, -std::numbers::pi);
        cal.upper = Vector::Constant(n, std::numbers::pi);
    }
    return cal;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

ScenarioFile parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError("scenario", std::string("invalid JSON: ") + e.what());
    }
    Obj root(doc, "scenario");
    ScenarioFile file;
    Scenario& scn = file.scenario;

    scn.name = root.text("name");
    scn.model = parse_model(root.child("model"));
    const int n = scn.model->dof();
    scn.constraint = parse_constraint(root.child("constraint"), *scn.model);
    scn.barrier = root.has("barrier") ? parse_barrier(root.child("barrier")) : BarrierConfig{};
    scn.nominal = root.has("nominal") ? parse_nominal(root.child("nominal"), n)
                                      : NominalController{GravityCompensation{}};

    if (root.has("controller")) {
        Obj c = root.child("controller");
        const std::string type = c.text("type", "safe");
        if (type == "safe") {
            scn.mode = ControlMode::Safe;
        } else if (type == "nominal") {
            scn.mode = ControlMode::Nominal;
        } else if (type == "baseline_qp") {
            scn.mode = ControlMode::BaselineQp;
        } else {
            throw ScenarioError(c.path("type"), "expected 'safe', 'nominal' or 'baseline_qp'");
        }
        scn.baseline_alpha_gain = c.positive("alpha_gain", 1.0);
        c.close();
    }

    if (root.has("disturbance")) {
        scn.disturbance = parse_disturbance(root.at("disturbance"), root.path("disturbance"), n);
    }

    {
        Obj init = root.child("initial");
        scn.initial.q = init.vector("q", n);
        scn.initial.v = init.vector("v", n, Vector::Zero(n));
        init.close();
    }

    {
        Obj sim = root.child("simulation");
        scn.dt = sim.positive("dt", 1e-3);
        scn.duration = sim.positive("duration", 10.0);
        scn.seed = sim.unsigned_int("seed", 0);
        scn.zero_order_hold = sim.boolean("zoh", false);
        if (scn.duration < scn.dt) throw ScenarioError(sim.path("duration"), "must be at least dt");
        sim.close();
    }

    file.calibration = default_calibration(scn);
    if (root.has("calibration")) {
        Obj cal = root.child("calibration");
        file.calibration.samples = cal.unsigned_int("samples", file.calibration.samples);
        if (file.calibration.samples == 0) throw ScenarioError(cal.path("samples"), "must be positive");
        file.calibration.lower = cal.vector("lower", n, file.calibration.lower);
        file.calibration.upper = cal.vector("upper", n, file.calibration.upper);
        if ((file.calibration.upper.array() < file.calibration.lower.array()).any()) {
            throw ScenarioError(cal.path("upper"), "must be >= lower");
        }
        cal.close();
    }

    file.tolerances.v_bar = scn.barrier.v_bar;
    if (root.has("tolerances")) {
        Obj tol = root.child("tolerances");
        auto& t = file.tolerances;
        t.invariance_tol = tol.non_negative("invariance", t.invariance_tol);
        t.velocity_tol = tol.non_negative("velocity", t.velocity_tol);
        t.passivity_tol = tol.non_negative("passivity", t.passivity_tol);
        t.return_window = tol.non_negative("return_window", t.return_window);
        t.return_tol = tol.non_negative("return", t.return_tol);
        t.rest_speed = tol.non_negative("rest_speed", t.rest_speed);
        tol.close();
    }

    if (root.has("output")) {
        Obj out = root.child("output");
        if (out.has("csv")) file.output_csv = out.text("csv");
        out.close();
    }
    root.close();

    try {
        scn.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError("scenario", e.what());
    }
    scn.digest = fnv1a64(doc.dump());
    return file;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("scenario", "cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

}  // namespace safepass
