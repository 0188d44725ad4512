#pragma once

#include "hbs/admissibility.hpp"
#include "hbs/cohomology.hpp"
#include "hbs/hierarchy.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace hbs
{

struct ScenarioOptions
{
    std::string backend = "float"; // "exact" | "float"
    double tolerance = 1e-10;
    double gap_threshold = 1e3;
    std::int64_t exact_cap = 5'000'000;

    bool operator==(const ScenarioOptions&) const = default;
};

/// Declarative refinement scenario: base knot vectors, a refinement rule
/// producing the level knot vectors, and per-level refinement domains.
struct Scenario
{
    struct Refinement
    {
        int level = 0;
        std::vector<MultiIndex> zero_forms;
        // rational corner pairs (lo, hi), aligned with the finer level's mesh
        std::vector<std::pair<std::vector<Rational>, std::vector<Rational>>> boxes;
        bool allow_assumption2_violation = false;

        bool operator==(const Refinement&) const = default;
    };

    int dimension = 0;
    std::vector<int> degrees;
    std::vector<std::vector<Rational>> base_knots; // per direction
    int levels = 1;                                // L + 1
    bool dyadic = true;
    // explicit rule: [level 1..L][direction] knot values
    std::vector<std::vector<std::vector<Rational>>> explicit_knots;
    std::vector<Refinement> refinements;
    ScenarioOptions options;

    static Scenario from_json(const nlohmann::json& j);
    static Scenario load(const std::string& path);
    nlohmann::ordered_json to_json() const;

    DomainHierarchy build() const;
    RankOptions rank_options() const;

    bool operator==(const Scenario&) const = default;
};

nlohmann::ordered_json admissibility_to_json(const AdmissibilityReport& report);
nlohmann::ordered_json cohomology_to_json(const CohomologyReport& report);

struct RunResult
{
    int exit_code = 0;
    nlohmann::ordered_json report;
};

/// Exit code 0 when Assumption 3 (and the zero-form-union condition) holds,
/// 1 otherwise.
RunResult run_check(const Scenario& scenario);

/// Exit code 0 for an exact complex, 1 when spurious harmonics exist, 3 when
/// the floating rank decision was indeterminate.
RunResult run_cohomology(const Scenario& scenario);

/// Cohomology plus harmonic representative extraction; representative
/// counts must match the cohomology dimensions.
RunResult run_harmonics(const Scenario& scenario);

} // namespace hbs
