#pragma once

#include "hbs/rational.hpp"
#include "hbs/sparse_matrix.hpp"

#include <vector>

namespace hbs
{

/// Open rational interval. A degenerate interval (lo == hi) is used for
/// Greville points; `empty` marks the canonical empty set.
struct Interval
{
    Rational lo;
    Rational hi;

    bool degenerate() const { return lo == hi; }
    bool contains(const Interval& other) const
    {
        return other.lo >= lo && other.hi <= hi;
    }
    bool operator==(const Interval& other) const = default;
};

struct GrevilleMesh1D
{
    /// gamma_0 .. gamma_{m+1}, strictly increasing with endpoints 0 and 1.
    std::vector<Rational> points;

    /// Number of edges, equal to dim S^1.
    int num_edges() const { return static_cast<int>(points.size()) - 1; }

    /// i-th Greville edge (gamma_{i-1}, gamma_i), 1-based.
    Interval edge(int i) const;
    /// i-th Greville point, 0-based as gamma_0 .. gamma_{m+1}.
    const Rational& point(int i) const;
};

/// Open knot vector of degree p >= 1 on [0,1]. End knots appear with
/// multiplicity exactly p; no interior knot exceeds multiplicity p. The two
/// univariate spline spaces carried by a knot vector are S^0 (degree p,
/// vanishing at the endpoints) and S^1 (degree p-1), of dimensions m and
/// m+1 where the knot count is m+p+1.
class KnotVector
{
    public:
    /// Validates and constructs. Error codes: NotSorted, BadRange (ends not
    /// 0/1), NotOpen (end multiplicity != p), ExcessMultiplicity (interior
    /// knot repeated more than p times).
    static KnotVector validate(std::vector<Rational> knots, int degree);

    /// Uniform open knot vector with `cells` unit spans and simple interior
    /// knots (maximal smoothness).
    static KnotVector uniform(int degree, int cells);

    int degree() const { return degree_; }
    /// m = dim S^0.
    int num_basis() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
    /// dim S^j = m + j for j in {0,1}.
    int dimension(int j) const;

    const std::vector<Rational>& knots() const { return knots_; }
    /// 1-based knot access, i in [1, m+p+1].
    const Rational& knot(int i) const;

    /// Local knot vector (xi_i, ..., xi_{i+p-j+1}) identifying the i-th
    /// basis function of S^j.
    std::vector<Rational> local_knots(int j, int i) const;

    /// Open support (xi_i, xi_{i+p-j+1}) of the i-th basis function of S^j.
    Interval support(int j, int i) const;

    /// Support expressed as a closed 1-based range of Bezier cells.
    std::pair<int, int> support_cells(int j, int i) const;

    GrevilleMesh1D greville_mesh() const;

    /// Bezier cells: unique knot spans, 1-based.
    int num_cells() const { return static_cast<int>(unique_.size()) - 1; }
    Interval cell(int c) const;
    const std::vector<Rational>& unique_knots() const { return unique_; }

    bool operator==(const KnotVector& other) const
    {
        return degree_ == other.degree_ && knots_ == other.knots_;
    }

    private:
    KnotVector(std::vector<Rational> knots, int degree);

    int degree_;
    std::vector<Rational> knots_;
    std::vector<Rational> unique_;
};

/// Value of the i-th basis function of S^j at x, by the Cox-de Boor
/// recursion. Spans are half-open with the last span right-closed.
double eval_basis(const KnotVector& kv, int j, int i, double x);

/// Exact-arithmetic twin of eval_basis; the only difference is the scalar.
Rational eval_basis_exact(const KnotVector& kv, int j, int i, const Rational& x);

/// (m+1) x m matrix D with (da/dx coefficients in S^1) = D * (a coefficients
/// in S^0); bidiagonal, exact.
SparseRationalMatrix derivative_matrix_1d(const KnotVector& kv);

/// True iff every coarse knot multiplicity is matched or exceeded in fine.
bool is_nested(const KnotVector& coarse, const KnotVector& fine);

/// Coefficient map S^j(coarse) -> S^j(fine) by successive single knot
/// insertion. Requires is_nested(coarse, fine).
SparseRationalMatrix insertion_matrix_1d(const KnotVector& coarse, const KnotVector& fine, int j);

/// One dyadic refinement step: the midpoint of every Bezier cell is inserted
/// once; existing multiplicities are preserved.
KnotVector dyadic_refinement(const KnotVector& kv);

/// Mirror image knot vector (knots 1 - xi in reversed order). Basis i of the
/// image is the reflection of basis m+j+1-i.
KnotVector reflect(const KnotVector& kv);

/// Exact Gram matrix G_ir = integral of B_i B_r over [0,1] for S^j.
SparseRationalMatrix gram_matrix_1d(const KnotVector& kv, int j);

/// All S^j basis values on one Bezier cell at a rational point inside the
/// cell's closure; exact. Returns a dense column of length dim S^j.
std::vector<Rational> eval_all_on_cell(const KnotVector& kv, int j, int cell, const Rational& x);

} // namespace hbs
