#pragma once

#include "hbs/hierarchy.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hbs
{

/// Per-direction first/last fine-knot indices matching a coarse 0-form
/// support's endpoints (1-based positions in the level-(l+1) knot list).
struct IndexMaps
{
    std::vector<int> minus;
    std::vector<int> plus;
};

IndexMaps index_maps(const DomainHierarchy& h, int l, const MultiIndex& idx);

struct IntersectionInfo
{
    bool shares = false;
    /// Directions (0-based) admissible as the single-knot direction k0.
    std::vector<int> k0_directions;
};

/// Condition-1 test: do two refined 0-forms share an (n-1,l+1)-intersection?
/// delta may have negative components; the test is reflection-symmetric.
IntersectionInfo shares_intersection(const DomainHierarchy& h, int l, const MultiIndex& ibar,
                                     const std::vector<int>& delta);

/// Condition-2 search: a monotone unit-step chain of refined 0-forms from
/// ibar to ibar+delta, every member supported on Omega_{l+1}. Found by
/// dynamic programming over the offset box; equivalent to exhaustive path
/// enumeration.
std::optional<std::vector<MultiIndex>> shortest_chain(const DomainHierarchy& h, int l, const MultiIndex& ibar,
                                                      const std::vector<int>& delta);

enum class Verdict
{
    Pass,
    NoChainNeeded,
    Violation,
};

struct PairReport
{
    int level = 0;
    MultiIndex i;
    std::vector<int> delta;
    bool shares_intersection = false;
    std::optional<int> intersection_direction;
    std::optional<std::vector<MultiIndex>> chain;
    Verdict verdict = Verdict::NoChainNeeded;
    std::string reason;
};

/// Full report for one candidate pair.
PairReport check_pair(const DomainHierarchy& h, int l, const MultiIndex& ibar, const std::vector<int>& delta);

struct AdmissibilityReport
{
    bool overall = true;
    std::vector<PairReport> violations;
    std::int64_t pairs_swept = 0;
    std::int64_t chains_found = 0;
};

/// Sweeps every level l < L and every pair of refined 0-forms whose closed
/// supports overlap in all directions; aggregates Condition-1/2 verdicts.
/// Levels violating the zero-form-union assumption are reported as
/// violations with reason "assumption2".
AdmissibilityReport check_assumption3(const DomainHierarchy& h);

} // namespace hbs
