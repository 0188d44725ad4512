#pragma once

#include "hbs/hierarchy.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace hbs
{

/// Cuboidal cell complex carried by a Greville subgrid. Cells are Greville
/// entities (products of per-direction points and edges); the stored
/// dimension of a cell is that of its dual block, n - |component|, so a
/// 0-form entity (a Greville vertex) carries an n-dimensional block. The
/// complex is closed under faces in this dual sense whenever the generating
/// B-spline selection is closed under support shrinking, which holds for
/// every supported-on-Y selection.
class CuboidalComplex
{
    public:
    struct Cell
    {
        FormComponent component;
        MultiIndex index;
        auto operator<=>(const Cell&) const = default;
    };

    static CuboidalComplex build(int n, const std::vector<Cell>& cells);

    int n() const { return n_; }
    std::int64_t num_cells(int dual_dim) const;
    const std::vector<Cell>& cells(int dual_dim) const;

    /// Boundary operator from dual dimension d to d-1 with +-1 entries and
    /// product orientation; boundary(d-1) * boundary(d) == 0.
    SparseRationalMatrix boundary(int dual_dim) const;

    private:
    int n_ = 0;
    std::vector<std::vector<Cell>> cells_;            // by dual dimension
    std::vector<std::map<Cell, std::int64_t>> index_; // cell -> position
};

struct BettiProfile
{
    std::vector<std::int64_t> ranks; // b_0 .. b_n

    bool operator==(const BettiProfile&) const = default;
    bool is_ball(int n) const;
};

/// Betti numbers over the rationals, via free-pair collapsing followed by
/// exact boundary ranks.
BettiProfile betti(const CuboidalComplex& complex);

/// Greville subcomplex of all level-`space_level` B-splines (all form
/// components) supported on Y.
CuboidalComplex greville_subcomplex(const DomainHierarchy& h, int space_level, const SubdomainRef& y);

/// Cohomology dimensions of the spline complex spanned by the level-`s`
/// B-splines supported on A, by exact ranks of the restricted derivative
/// matrices. Returns an empty vector when the selection fails to be a
/// subcomplex.
std::vector<std::int64_t> spline_cohomology_on(const DomainHierarchy& h, int space_level,
                                               const SubdomainRef& a);

/// Cross-check of spline-Greville duality on A = Omega^j_{l+1}(i): both
/// levels' spline complexes on A are exact and both Greville subcomplexes
/// are homology balls. Vacuously true for empty A.
bool duality_check(const DomainHierarchy& h, int l, const FormComponent& c, const MultiIndex& idx);

} // namespace hbs
