#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chemoblow/bounds.hpp"
#include "chemoblow/config.hpp"
#include "chemoblow/functionals.hpp"
#include "chemoblow/grid.hpp"
#include "chemoblow/model.hpp"
#include "chemoblow/parabolic.hpp"

namespace chemoblow {

struct ProfileSpec {
    ProfileKind kind = ProfileKind::singular_capped;
    double L = 0.0128;
    double cap = 200.0;
    double scale = 1.0;
};

struct GridSpec {
    int cells = 512;
    Stretching stretching;
};

/// One parameter varied by a sweep. `key` is `section.field` (for example
/// `model.chi`) or `dominance`, which sets χ = (dominance + ξγ)/α.
struct SweepAxis {
    std::string key;
    std::vector<double> values;
};

struct Scenario {
    std::string name = "scenario";
    ModelParams params;
    ProfileSpec profile;
    GridSpec grid;
    StepControl control;
    MomentConfig moment;
    double sigma = 2.0;
    GNConfig gn;
    /// Also integrate the mass formulation and compare against the primal run.
    bool cross_check = false;
    /// Output directory; empty means the current directory.
    std::string output_dir;
    std::vector<SweepAxis> axes;
};

/// Reads and validates a scenario. Every problem is reported as ConfigError
/// naming the file, line and field.
[[nodiscard]] Scenario parse_scenario(const ConfigDocument& doc);
[[nodiscard]] Scenario load_scenario(const std::string& path);

/// Re-runs the validators of all sub-records; throws ValidationError.
void validate(const Scenario& scenario);

/// Sets one axis value on a copy of the scenario. Throws ParameterError for an
/// unsupported key.
[[nodiscard]] Scenario apply_axis(Scenario scenario, const std::string& key, double value);

[[nodiscard]] bool is_sweep_key(const std::string& key);

}  // namespace chemoblow
