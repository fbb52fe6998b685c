#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "safepass/constraints.hpp"
#include "safepass/simulate.hpp"
#include "safepass/verify.hpp"

namespace safepass {

/// Schema violation in a scenario document. key() is the dotted path of the
/// offending entry, e.g. "scenario.barrier.k_h".
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string key, const std::string& problem)
        : std::runtime_error(key + ": " + problem), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct CalibrationSettings {
    Vector lower;
    Vector upper;
    std::size_t samples = 100000;

    JointBoxSampler sampler(std::uint64_t seed) const {
        return JointBoxSampler(lower, upper, samples, seed);
    }
};

/// A parsed scenario document: everything needed to simulate, calibrate and
/// verify one experiment.
struct ScenarioFile {
    Scenario scenario;
    CalibrationSettings calibration;
    TrajectoryCheckOptions tolerances;
    std::optional<std::string> output_csv;
};

/// Parses JSON text. Unknown keys, wrong types and out-of-range values raise
/// ScenarioError naming the key; the assembled scenario is validated as well.
ScenarioFile parse_scenario(const std::string& json_text);
ScenarioFile load_scenario(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace safepass
