#pragma once

#include "hbs/knot_vector.hpp"
#include "hbs/sparse_matrix.hpp"

#include <compare>
#include <cstdint>
#include <vector>

namespace hbs
{

/// Form-component tuple j in {0,1}^n. Components of a fixed form degree are
/// ordered lexicographically by the positions of their 1-bits.
struct FormComponent
{
    std::vector<int> bits;

    int n() const { return static_cast<int>(bits.size()); }
    int order() const;
    auto operator<=>(const FormComponent&) const = default;
};

/// All C(n, j) components with |j| = j, lexicographic.
std::vector<FormComponent> component_list(int n, int j);

using MultiIndex = std::vector<int>; // 1-based per direction

/// Axis-aligned box, possibly degenerate per direction; `empty` is the
/// canonical empty box.
struct Box
{
    std::vector<Interval> intervals;
    bool empty = false;

    static Box empty_box(int n);
    bool operator==(const Box&) const = default;
};

/// (level, component, multi-index) naming one tensor-product B-spline.
struct BasisKey
{
    int level;
    FormComponent component;
    MultiIndex index;

    auto operator<=>(const BasisKey&) const = default;
};

/// One refinement level: n knot vectors and derived per-level quantities.
/// Immutable after construction.
class LevelSpaces
{
    public:
    LevelSpaces(int level, std::vector<KnotVector> knot_vectors);

    int level() const { return level_; }
    int n() const { return static_cast<int>(kv_.size()); }
    const KnotVector& direction(int k) const; // 0-based direction
    const std::vector<KnotVector>& directions() const { return kv_; }

    /// dim of the component space = product of univariate dims.
    std::int64_t component_dim(const FormComponent& c) const;
    /// dim of the full j-form space (all components stacked).
    std::int64_t form_dim(int j) const;

    /// Row-major flattening within a component; direction 1 varies slowest.
    std::int64_t flatten(const FormComponent& c, const MultiIndex& idx) const;
    MultiIndex unflatten(const FormComponent& c, std::int64_t flat) const;
    /// Offset of a component's block inside the stacked j-form space.
    std::int64_t component_offset(const FormComponent& c) const;

    Box tp_support(const FormComponent& c, const MultiIndex& idx) const;
    Box tp_greville_entity(const FormComponent& c, const MultiIndex& idx) const;

    /// Tensor-product Bezier mesh: one box per product of unique knot spans.
    std::vector<Box> bezier_mesh() const;
    std::int64_t num_cells() const;

    const GrevilleMesh1D& greville(int k) const { return greville_[k]; }

    bool valid_index(const FormComponent& c, const MultiIndex& idx) const;

    private:
    int level_;
    std::vector<KnotVector> kv_;
    std::vector<GrevilleMesh1D> greville_;
};

/// Matrix of the exterior derivative from j-forms to (j+1)-forms in the
/// stacked component bases. Block (c', c) is nonzero iff c' = c + delta_k,
/// where it equals sign(c,k) I x ... x D_k x ... x I with
/// sign(c,k) = (-1)^{#{l < k : c_l = 1}}.
SparseRationalMatrix exterior_derivative_matrix(const LevelSpaces& spaces, int j);

/// Kronecker product of univariate insertion matrices for one component.
SparseRationalMatrix prolongation_matrix(const LevelSpaces& coarse, const LevelSpaces& fine,
                                         const FormComponent& c);

} // namespace hbs
