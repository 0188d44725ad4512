#include "hbs/rank.hpp"

#include "hbs/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace hbs
{

namespace
{

struct SparseRow
{
    // sorted by column
    std::vector<std::pair<std::int64_t, Rational>> entries;
};

} // namespace

std::int64_t rank_exact_sparse(const SparseRationalMatrix& m, std::int64_t nnz_cap)
{
    if (m.nnz() > nnz_cap)
        fail(Errc::BackendCapExceeded, "matrix exceeds the exact backend nonzero cap");

    std::vector<SparseRow> rows(m.rows());
    for (const auto& [rc, v] : m.entries())
        rows[rc.first].entries.emplace_back(rc.second, v);

    std::vector<std::int64_t> col_count(m.cols(), 0);
    std::int64_t nnz = 0;
    for (const auto& row : rows)
        for (const auto& [c, v] : row.entries)
        {
            ++col_count[c];
            ++nnz;
        }

    std::vector<char> row_done(m.rows(), 0);
    std::vector<char> col_done(m.cols(), 0);
    std::int64_t rank = 0;

    for (;;)
    {
        // Markowitz-style pivot: smallest (row fill - 1) * (col fill - 1).
        std::int64_t best_row = -1, best_col = -1;
        std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
        for (std::int64_t r = 0; r < m.rows(); ++r)
        {
            if (row_done[r] || rows[r].entries.empty())
                continue;
            const std::int64_t row_fill = static_cast<std::int64_t>(rows[r].entries.size()) - 1;
            if (row_fill >= best_cost)
                continue;
            for (const auto& [c, v] : rows[r].entries)
            {
                const std::int64_t cost = row_fill * (col_count[c] - 1);
                if (cost < best_cost)
                {
                    best_cost = cost;
                    best_row = r;
                    best_col = c;
                    if (cost == 0)
                        break;
                }
            }
            if (best_cost == 0)
                break;
        }
        if (best_row < 0)
            break;

        ++rank;
        row_done[best_row] = 1;
        col_done[best_col] = 1;

        const SparseRow pivot_row = rows[best_row];
        Rational pivot_value(0);
        for (const auto& [c, v] : pivot_row.entries)
            if (c == best_col)
                pivot_value = v;

        for (const auto& [c, v] : pivot_row.entries)
            --col_count[c];
        rows[best_row].entries.clear();

        for (std::int64_t r = 0; r < m.rows(); ++r)
        {
            if (row_done[r] || rows[r].entries.empty())
                continue;
            Rational factor(0);
            for (const auto& [c, v] : rows[r].entries)
                if (c == best_col)
                    factor = v;
            if (factor == 0)
                continue;
            factor /= pivot_value;

            SparseRow updated;
            updated.entries.reserve(rows[r].entries.size() + pivot_row.entries.size());
            auto ita = rows[r].entries.begin();
            auto itb = pivot_row.entries.begin();
            while (ita != rows[r].entries.end() || itb != pivot_row.entries.end())
            {
                if (itb == pivot_row.entries.end()
                    || (ita != rows[r].entries.end() && ita->first < itb->first))
                {
                    if (!col_done[ita->first])
                        updated.entries.push_back(*ita);
                    ++ita;
                }
                else if (ita == rows[r].entries.end() || itb->first < ita->first)
                {
                    if (!col_done[itb->first])
                    {
                        const Rational value = -factor * itb->second;
                        if (value != 0)
                            updated.entries.emplace_back(itb->first, value);
                    }
                    ++itb;
                }
                else
                {
                    if (!col_done[ita->first])
                    {
                        const Rational value = ita->second - factor * itb->second;
                        if (value != 0)
                            updated.entries.emplace_back(ita->first, value);
                    }
                    ++ita;
                    ++itb;
                }
            }
            for (const auto& [c, v] : rows[r].entries)
                --col_count[c];
            nnz -= static_cast<std::int64_t>(rows[r].entries.size());
            rows[r] = std::move(updated);
            for (const auto& [c, v] : rows[r].entries)
                ++col_count[c];
            nnz += static_cast<std::int64_t>(rows[r].entries.size());
            if (nnz > nnz_cap)
                fail(Errc::BackendCapExceeded, "fill-in exceeds the exact backend nonzero cap");
        }
    }
    return rank;
}

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr int kSketchSpread = 8;
constexpr std::int64_t kSketchPad = 48;

FloatingRankResult rank_from_dense(const Eigen::MatrixXd& dense, const RankOptions& options)
{
    FloatingRankResult result;
    if (dense.size() == 0 || dense.cols() == 0 || dense.rows() == 0)
    {
        result.gap = std::numeric_limits<double>::infinity();
        return result;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dense);
    const Eigen::MatrixXd& r = qr.matrixR();
    const std::int64_t diag = std::min<std::int64_t>(r.rows(), r.cols());
    std::vector<double> pivots(diag);
    for (std::int64_t i = 0; i < diag; ++i)
        pivots[i] = std::abs(r(i, i));
    const double max_pivot = pivots.empty() ? 0.0 : pivots.front();
    if (max_pivot == 0.0)
    {
        result.gap = std::numeric_limits<double>::infinity();
        return result;
    }
    const double threshold = options.tolerance * max_pivot;
    std::int64_t rank = 0;
    while (rank < diag && pivots[rank] > threshold)
        ++rank;
    result.rank = rank;
    if (rank == diag || pivots[rank] == 0.0)
        result.gap = std::numeric_limits<double>::infinity();
    else
        result.gap = pivots[rank - 1 >= 0 ? rank - 1 : 0] / pivots[rank];
    if (rank > 0 && rank < diag)
        result.indeterminate = result.gap < options.gap_threshold;
    return result;
}

} // namespace

FloatingRankAccumulator::FloatingRankAccumulator(std::int64_t rows, std::int64_t cols,
                                                 const RankOptions& options)
    : rows_(rows), cols_(cols), options_(options)
{
    const std::int64_t budget = cols + kSketchPad;
    sketched_ = rows > budget;
    sketch_rows_ = sketched_ ? budget : rows;
    data_.assign(static_cast<std::size_t>(sketch_rows_ * cols_), 0.0);
}

void FloatingRankAccumulator::add(std::int64_t row, std::int64_t col, double value)
{
    if (row < 0 || row >= rows_ || col < 0 || col >= cols_)
        fail(Errc::IndexOutOfRange, "sketch index out of range");
    if (value == 0.0)
        return;
    double* column = data_.data() + static_cast<std::size_t>(col * sketch_rows_);
    if (!sketched_)
    {
        column[row] += value;
        return;
    }
    // Sparse random-sign row compression, deterministic in (seed, row).
    const std::uint64_t base = splitmix64(options_.sketch_seed ^ static_cast<std::uint64_t>(row));
    for (int t = 0; t < kSketchSpread; ++t)
    {
        const std::uint64_t h = splitmix64(base + 0x632be59bd9b4e019ull * (t + 1));
        const std::int64_t target = static_cast<std::int64_t>(h % static_cast<std::uint64_t>(sketch_rows_));
        const double sign = (h >> 63) ? 1.0 : -1.0;
        column[target] += sign * value;
    }
}

FloatingRankResult FloatingRankAccumulator::rank() const
{
    Eigen::Map<const Eigen::MatrixXd> dense(data_.data(), sketch_rows_, cols_);
    return rank_from_dense(dense, options_);
}

FloatingRankResult rank_floating(const SparseMatrix<double>& m, const RankOptions& options)
{
    FloatingRankAccumulator acc(m.rows(), m.cols(), options);
    for (const auto& [rc, v] : m.entries())
        acc.add(rc.first, rc.second, v);
    return acc.rank();
}

FloatingRankResult rank_of(const SparseRationalMatrix& m, const RankOptions& options)
{
    if (options.backend == RankOptions::Backend::Exact)
    {
        FloatingRankResult result;
        result.rank = rank_exact_sparse(m, options.exact_cap);
        result.gap = std::numeric_limits<double>::infinity();
        return result;
    }
    return rank_floating(m.cast<double>(), options);
}

} // namespace hbs
