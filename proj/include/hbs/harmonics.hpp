#pragma once

#include "hbs/cohomology.hpp"
#include "hbs/hierarchy.hpp"

#include <optional>
#include <vector>

namespace hbs
{

/// Block-diagonal L2 mass matrix of the full tensor j-form space: one
/// Kronecker product of univariate Gram matrices per component. Exact,
/// symmetric positive definite.
SparseRationalMatrix mass_matrix(const LevelSpaces& spaces, int j);

struct HarmonicSet
{
    int j = 0;
    /// Fine-level coefficient vectors, unit mass norm, sign-fixed so the
    /// largest-magnitude coefficient is positive.
    std::vector<std::vector<double>> representatives;
};

/// Discrete harmonic j-forms: kernel vectors of the composed derivative
/// that are mass-orthogonal to every coboundary, pushed to fine-level
/// coefficients. When `expected_count` is given a mismatch throws
/// DimensionMismatch.
HarmonicSet harmonic_representatives(const DomainHierarchy& h, const HierarchicalBasis& basis, int j,
                                     double tolerance, std::optional<std::int64_t> expected_count = {});

/// Componentwise evaluation of a fine-level j-form coefficient vector on a
/// uniform grid with `resolution` points per direction (row-major, direction
/// 1 slowest). One value array per component, in component order.
std::vector<std::vector<double>> sample_field(const LevelSpaces& spaces,
                                              const std::vector<double>& coefficients, int j,
                                              int resolution);

} // namespace hbs
