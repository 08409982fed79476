#pragma once

#include <string>
#include <vector>

#include "chemoblow/scenario.hpp"

namespace chemoblow {

/// Concentrated singular-capped start with χα - ξγ = 9 and k = 1.1; blows up
/// near t = 5.8e-4 on 512 uniform cells.
[[nodiscard]] Scenario reference_blowup_scenario();

/// The reference scenario with χ = 0.5, so χα - ξγ = -0.5; runs to t_end.
[[nodiscard]] Scenario reference_subcritical_scenario();

/// Smooth Gaussian starts that stay bounded, for the Ψ' decomposition check.
[[nodiscard]] std::vector<Scenario> smooth_scenarios();

/// Mass-bound suite: λ < 0, λ = 0, λ > 0 with both signs of χα - ξγ.
[[nodiscard]] std::vector<Scenario> mass_bound_scenarios();

struct VerifyCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double limit = 0.0;
    /// Positive when passing: distance of value from the limit on the safe side.
    double margin = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::string suite;
    std::vector<VerifyCheck> checks;
    double wall_seconds = 0.0;

    [[nodiscard]] bool passed() const;
};

/// Runs the `fast` or `full` suite. Throws ParameterError for other names.
[[nodiscard]] VerifyReport run_verify(const std::string& suite);

/// Report without timings, so repeated runs give identical bytes.
[[nodiscard]] std::string verify_json(const VerifyReport& report);

}  // namespace chemoblow
