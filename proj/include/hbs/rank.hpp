#pragma once

#include "hbs/sparse_matrix.hpp"

#include <cstdint>
#include <vector>

namespace hbs
{

struct RankOptions
{
    enum class Backend
    {
        Exact,
        Floating,
    };

    Backend backend = Backend::Exact;
    double tolerance = 1e-10;      // relative pivot threshold, floating only
    double gap_threshold = 1e3;    // accepted/rejected pivot ratio sanity gap
    std::int64_t exact_cap = 5'000'000; // nonzero cap for the exact backend
    std::uint64_t sketch_seed = 0x9e3779b97f4a7c15ull;
};

/// Exact rank by sparse elimination over the rationals with Markowitz-style
/// pivoting. Throws BackendCapExceeded when fill exceeds `nnz_cap`.
std::int64_t rank_exact_sparse(const SparseRationalMatrix& m, std::int64_t nnz_cap);

struct FloatingRankResult
{
    std::int64_t rank = 0;
    bool indeterminate = false;
    double gap = 0; // ratio between smallest accepted and largest rejected pivot
};

/// Column-streamed sparse matrix for the floating backend: columns are fed
/// once, rows may arrive in any order. When the row count is large the rows
/// are compressed by a sparse random-sign sketch before the dense
/// column-pivoted QR; the sketch can only lower the rank, never raise it.
class FloatingRankAccumulator
{
    public:
    FloatingRankAccumulator(std::int64_t rows, std::int64_t cols, const RankOptions& options);

    void add(std::int64_t row, std::int64_t col, double value);

    FloatingRankResult rank() const;

    /// Dense compressed image (sketch rows x cols); valid after all adds.
    const std::vector<double>& data() const { return data_; }
    std::int64_t sketch_rows() const { return sketch_rows_; }
    std::int64_t cols() const { return cols_; }

    private:
    std::int64_t rows_;
    std::int64_t cols_;
    std::int64_t sketch_rows_;
    bool sketched_;
    RankOptions options_;
    std::vector<double> data_; // column-major sketch_rows_ x cols_
};

/// Floating rank of an already materialized sparse matrix.
FloatingRankResult rank_floating(const SparseMatrix<double>& m, const RankOptions& options);

/// Dispatches on options.backend; exact results are returned with
/// indeterminate = false and gap = infinity.
FloatingRankResult rank_of(const SparseRationalMatrix& m, const RankOptions& options);

} // namespace hbs
