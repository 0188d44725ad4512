#pragma once

#include "hbs/hierarchy.hpp"
#include "hbs/rank.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hbs
{

/// Columns of the level-L coefficient representation of a hierarchical
/// basis: one column per selected B-spline, stacked over components.
struct BasisMatrix
{
    int j = 0;
    SparseRationalMatrix matrix; // fine j-form space x hierarchical dim
    std::vector<BasisKey> columns;
};

/// Caches per-direction insertion operators to level L and produces fine
/// coefficient columns of hierarchical basis functions.
class FineExpansion
{
    public:
    explicit FineExpansion(const DomainHierarchy& h);

    /// Sparse fine-component coefficients of one basis function; the pairs
    /// are (flat index within the fine component block, value), sorted.
    std::vector<std::pair<std::int64_t, Rational>> fine_column(const BasisKey& key) const;

    /// Derivative images: for every direction k with c_k = 0, the sparse
    /// coefficients of the partial-derivative block in component c+delta_k,
    /// including the wedge sign.
    std::vector<std::pair<std::int64_t, Rational>>
    fine_derivative_column(const BasisKey& key, std::vector<std::pair<FormComponent, std::int64_t>>* blocks) const;

    const DomainHierarchy& hierarchy() const { return h_; }

    private:
    const std::vector<std::pair<int, Rational>>& insertion_column(int level, int k, int jbit, int index) const;

    const DomainHierarchy& h_;
    // [level][k][jbit] -> column-major insertion matrix to level L
    mutable std::map<std::tuple<int, int, int>, std::vector<std::vector<std::pair<int, Rational>>>> cache_;
};

BasisMatrix hierarchical_basis_matrix(const DomainHierarchy& h, const HierarchicalBasis& basis, int j);

/// True iff d maps the hierarchical j-forms into the span of the
/// hierarchical (j+1)-forms: rank [P_{j+1} | D_j P_j] == rank P_{j+1}.
bool closure_check(const DomainHierarchy& h, const HierarchicalBasis& basis, int j,
                   const RankOptions& options);

struct CohomologyReport
{
    std::vector<std::int64_t> dims;       // dim H^0 .. dim H^n
    std::vector<std::int64_t> spurious;   // dims - (0,...,0,1)
    std::vector<std::int64_t> space_dims; // dim HBS^j
    std::vector<std::int64_t> ranks;      // rank(D_j P_j), j = 0..n-1
    std::string backend;
    double rank_tolerance = 0;
    bool indeterminate = false;
    double elapsed_seconds = 0;

    bool exact() const;
};

/// Cohomology dimensions from ranks of the composed derivative matrices.
/// Throws ClosureViolated when the selected spaces do not form a complex.
CohomologyReport cohomology_dims(const DomainHierarchy& h, const HierarchicalBasis& basis,
                                 const RankOptions& options);

} // namespace hbs
