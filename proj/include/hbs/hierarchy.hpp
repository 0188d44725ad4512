#pragma once

#include "hbs/tensor_forms.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

namespace hbs
{

/// Set of Bezier cells of one level's tensor grid, stored canonically as
/// sorted flattened ids (row-major, direction 1 slowest, 0-based).
class CellSet
{
    public:
    CellSet() = default;
    CellSet(std::vector<int> cells_per_direction, std::vector<std::int64_t> ids);

    static CellSet full(const std::vector<int>& cells_per_direction);
    static CellSet empty(const std::vector<int>& cells_per_direction);

    int n() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    const std::vector<std::int64_t>& ids() const { return ids_; }
    bool is_empty() const { return ids_.empty(); }
    std::int64_t size() const { return static_cast<std::int64_t>(ids_.size()); }

    std::int64_t flatten(const std::vector<int>& cell) const; // 1-based coords
    std::vector<int> unflatten(std::int64_t id) const;

    bool contains(std::int64_t id) const;
    /// True iff every cell of the closed 1-based range box is in the set.
    bool contains_box(const std::vector<int>& lo, const std::vector<int>& hi) const;

    void insert_box(const std::vector<int>& lo, const std::vector<int>& hi);
    void canonicalize();

    CellSet set_union(const CellSet& other) const;
    bool subset_of(const CellSet& other) const;
    bool operator==(const CellSet& other) const = default;

    /// Dense membership mask for hot loops.
    std::vector<char> bitmap() const;

    private:
    std::vector<int> dims_;
    std::vector<std::int64_t> ids_;
};

/// Cell set tagged with the level whose Bezier grid it lives on.
struct SubdomainRef
{
    int cell_level = 0;
    CellSet cells;

    bool operator==(const SubdomainRef&) const = default;
};

/// Per-level refinement request: either a set of level-l 0-form indices
/// (Assumption 2 holds by construction) or raw level-(l+1) cells (Assumption
/// 2 is then verified by a set-cover check, or optionally waived).
struct RefinementInput
{
    std::vector<MultiIndex> zero_forms;
    std::optional<CellSet> raw_cells;
    bool allow_assumption2_violation = false;
};

/// Nested levels with refinement domains Omega_0 >= Omega_1 >= ... >=
/// Omega_L. Omega_{l} is stored as level-l cells. Immutable after build.
class DomainHierarchy
{
    public:
    static DomainHierarchy build(std::vector<LevelSpaces> levels, std::vector<RefinementInput> refinements);

    int num_levels() const { return static_cast<int>(levels_.size()); } // L + 1
    int max_level() const { return num_levels() - 1; }                  // L
    const LevelSpaces& level(int l) const;
    int n() const { return levels_.front().n(); }

    /// Omega_l as level-l cells; l = 0 is the full box. l = L+1 is empty.
    SubdomainRef omega(int l) const;
    bool assumption2_satisfied(int l) const; // refinement producing Omega_l
    bool assumption2_satisfied_all() const;

    /// Support of a level-`s` basis function as cells of level `cell_level`
    /// (>= s), as a per-direction closed 1-based range.
    std::pair<std::vector<int>, std::vector<int>> support_cell_box(int s, const FormComponent& c,
                                                                   const MultiIndex& idx,
                                                                   int cell_level) const;

    /// True iff supp of the level-`s` function is contained in Y.
    bool supported_on(int s, const FormComponent& c, const MultiIndex& idx, const SubdomainRef& y) const;

    /// All level-`s` B-splines of component `c` supported on Y (Eq.-style
    /// B_s(Y) selection). Deterministic lexicographic order.
    std::vector<MultiIndex> basis_on(int s, const FormComponent& c, const SubdomainRef& y) const;

    /// Kraft selection for one component; returns keys of mixed levels.
    std::vector<BasisKey> kraft_select(const FormComponent& c) const;

    /// Extended knot domain chi^j_i of level l; index bounds
    /// 1 <= i_k <= n_{l,k} + j_k - 1.
    Box extended_knot_domain(int l, const FormComponent& c, const MultiIndex& idx) const;
    bool extended_domain_index_valid(int l, const FormComponent& c, const MultiIndex& idx) const;

    /// Index-space neighbours of a 0-form index: all i with
    /// j_k - 1 <= i_k - ibar_k <= 0. Out-of-range entries are nullopt.
    std::vector<std::optional<MultiIndex>> neighbour_indices(int l, const FormComponent& c,
                                                             const MultiIndex& ibar) const;

    /// D^j_{l,l+1}(i): 1-extended knot domains inside Omega_{l+1} adjacent
    /// to i with 0 <= ibar_k - i_k <= 1 - j_k.
    std::vector<MultiIndex> deriv_set(int l, const FormComponent& c, const MultiIndex& idx) const;

    /// Membership of i in Itpb_{l,l+1}^j.
    bool in_itpb(int l, const FormComponent& c, const MultiIndex& idx) const;

    /// Omega^j_{l+1}(i) as level-(l+1) cells; empty when i is not in Itpb.
    SubdomainRef omega_subdomain(int l, const FormComponent& c, const MultiIndex& idx) const;

    /// Lemma-style partition test: union of Omega^j_{l+1}(i) over Itpb
    /// equals Omega_{l+1}.
    bool partition_check(int l, const FormComponent& c) const;

    /// Refine a cell set from its level to a finer level's grid.
    CellSet refine_cells(const CellSet& cells, int from_level, int to_level) const;

    /// Convert a rational box to cells of the given level; the box must be
    /// aligned with that level's unique knots.
    CellSet cells_from_box(int cell_level, const Box& box) const;

    /// Cells of level `cell_level` covered by the 0-form support box union
    /// of the level-l basis functions listed.
    CellSet cells_from_supports(int l, const std::vector<MultiIndex>& zero_forms, int cell_level) const;

    private:
    DomainHierarchy() = default;

    CellSet refine_cells_impl(const CellSet& cells, int from_level, int to_level) const;
    CellSet cells_from_supports_impl(int l, const std::vector<MultiIndex>& zero_forms, int cell_level,
                                     const std::vector<int>& dims) const;

    std::vector<LevelSpaces> levels_;
    std::vector<CellSet> omega_;
    std::vector<bool> assumption2_;
    // child_[l][k][c-1] = 1-based range of level-(l+1) cells refining cell c
    std::vector<std::vector<std::vector<std::pair<int, int>>>> child_;
};

/// Output of Kraft selection over all components, keys sorted canonically.
struct HierarchicalBasis
{
    std::map<FormComponent, std::vector<BasisKey>> components;

    std::int64_t form_dim(int n, int j) const;
};

HierarchicalBasis kraft_select_all(const DomainHierarchy& h);

} // namespace hbs
