#include "hbs/cohomology.hpp"

#include "hbs/error.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <unordered_map>

namespace hbs
{

FineExpansion::FineExpansion(const DomainHierarchy& h) : h_(h) {}

const std::vector<std::pair<int, Rational>>& FineExpansion::insertion_column(int level, int k, int jbit,
                                                                             int index) const
{
    const auto key = std::make_tuple(level, k, jbit);
    auto it = cache_.find(key);
    if (it == cache_.end())
    {
        const KnotVector& coarse = h_.level(level).direction(k);
        const KnotVector& fine = h_.level(h_.max_level()).direction(k);
        const SparseRationalMatrix t = insertion_matrix_1d(coarse, fine, jbit);
        std::vector<std::vector<std::pair<int, Rational>>> columns(t.cols());
        for (const auto& [rc, v] : t.entries())
            columns[rc.second].emplace_back(static_cast<int>(rc.first), v);
        it = cache_.emplace(key, std::move(columns)).first;
    }
    return it->second[index - 1];
}

std::vector<std::pair<std::int64_t, Rational>> FineExpansion::fine_column(const BasisKey& key) const
{
    const int n = h_.n();
    const LevelSpaces& fine = h_.level(h_.max_level());

    std::vector<std::pair<std::int64_t, Rational>> acc{{0, Rational(1)}};
    for (int k = 0; k < n; ++k)
    {
        const auto& col = insertion_column(key.level, k, key.component.bits[k], key.index[k]);
        const int fine_dim = fine.direction(k).dimension(key.component.bits[k]);
        std::vector<std::pair<std::int64_t, Rational>> next;
        next.reserve(acc.size() * col.size());
        for (const auto& [flat, value] : acc)
            for (const auto& [row, weight] : col)
                next.emplace_back(flat * fine_dim + row, value * weight);
        acc = std::move(next);
    }
    return acc;
}

std::vector<std::pair<std::int64_t, Rational>> FineExpansion::fine_derivative_column(
    const BasisKey& key, std::vector<std::pair<FormComponent, std::int64_t>>* blocks) const
{
    const int n = h_.n();
    const LevelSpaces& fine = h_.level(h_.max_level());

    std::vector<const std::vector<std::pair<int, Rational>>*> factors(n);
    for (int k = 0; k < n; ++k)
        factors[k] = &insertion_column(key.level, k, key.component.bits[k], key.index[k]);

    std::vector<std::pair<std::int64_t, Rational>> out;
    blocks->clear();
    for (int k = 0; k < n; ++k)
    {
        if (key.component.bits[k] == 1)
            continue;
        FormComponent target = key.component;
        target.bits[k] = 1;
        int sign = 1;
        for (int l = 0; l < k; ++l)
            if (key.component.bits[l] == 1)
                sign = -sign;

        // apply the fine univariate derivative to the k-th factor
        const KnotVector& kv = fine.direction(k);
        const int p = kv.degree();
        std::vector<Rational> image(kv.dimension(1), Rational(0));
        for (const auto& [row, value] : *factors[k])
        {
            // column row+1 of the bidiagonal derivative matrix
            const int i = row + 1;
            image[i - 1] += value * p / (kv.knot(i + p) - kv.knot(i));
            image[i] -= value * p / (kv.knot(i + 1 + p) - kv.knot(i + 1));
        }
        std::vector<std::pair<int, Rational>> dcol;
        for (int r = 0; r < static_cast<int>(image.size()); ++r)
            if (image[r] != 0)
                dcol.emplace_back(r, image[r]);

        std::vector<std::pair<std::int64_t, Rational>> acc{{0, Rational(sign)}};
        for (int kk = 0; kk < n; ++kk)
        {
            const int fine_dim = fine.direction(kk).dimension(target.bits[kk]);
            const auto& col = (kk == k) ? dcol : *factors[kk];
            std::vector<std::pair<std::int64_t, Rational>> next;
            next.reserve(acc.size() * col.size());
            for (const auto& [flat, value] : acc)
                for (const auto& [row, weight] : col)
                    next.emplace_back(flat * fine_dim + row, value * weight);
            acc = std::move(next);
        }
        const std::int64_t start = static_cast<std::int64_t>(out.size());
        out.insert(out.end(), acc.begin(), acc.end());
        blocks->emplace_back(target, start);
    }
    return out;
}

BasisMatrix hierarchical_basis_matrix(const DomainHierarchy& h, const HierarchicalBasis& basis, int j)
{
    const int n = h.n();
    const LevelSpaces& fine = h.level(h.max_level());
    FineExpansion expansion(h);

    BasisMatrix out;
    out.j = j;
    std::int64_t cols = 0;
    for (const auto& c : component_list(n, j))
    {
        auto it = basis.components.find(c);
        if (it == basis.components.end())
            fail(Errc::ConfigError, "hierarchical basis misses a component");
        cols += static_cast<std::int64_t>(it->second.size());
    }
    out.matrix = SparseRationalMatrix(fine.form_dim(j), cols);

    std::int64_t col = 0;
    for (const auto& c : component_list(n, j))
    {
        const std::int64_t offset = fine.component_offset(c);
        for (const auto& key : basis.components.at(c))
        {
            for (const auto& [row, value] : expansion.fine_column(key))
                out.matrix.set(offset + row, col, value);
            out.columns.push_back(key);
            ++col;
        }
    }
    return out;
}

namespace
{

// Rows pinned by the level-L basis functions of HBS^j: those columns of P_j
// are unit vectors, so the rank of any matrix extended by them equals their
// count plus the rank of the rest with the pinned rows eliminated.
struct FineRowQuotient
{
    std::vector<std::int64_t> pinned_rows; // sorted fine flat indices
    std::int64_t pinned = 0;

    bool is_pinned(std::int64_t row) const
    {
        return std::binary_search(pinned_rows.begin(), pinned_rows.end(), row);
    }
};

FineRowQuotient make_quotient(const DomainHierarchy& h, const HierarchicalBasis& basis, int j)
{
    const int n = h.n();
    const LevelSpaces& fine = h.level(h.max_level());
    FineRowQuotient q;
    for (const auto& c : component_list(n, j))
    {
        const std::int64_t offset = fine.component_offset(c);
        for (const auto& key : basis.components.at(c))
            if (key.level == h.max_level())
                q.pinned_rows.push_back(offset + fine.flatten(c, key.index));
    }
    std::sort(q.pinned_rows.begin(), q.pinned_rows.end());
    q.pinned = static_cast<std::int64_t>(q.pinned_rows.size());
    return q;
}

template <class Visitor>
void stream_p_columns(const DomainHierarchy& h, const HierarchicalBasis& basis, int j,
                      FineExpansion& expansion, bool coarse_only, Visitor&& visit)
{
    const int n = h.n();
    const LevelSpaces& fine = h.level(h.max_level());
    std::int64_t col = 0;
    for (const auto& c : component_list(n, j))
    {
        const std::int64_t offset = fine.component_offset(c);
        for (const auto& key : basis.components.at(c))
        {
            if (coarse_only && key.level == h.max_level())
                continue;
            for (const auto& [row, value] : expansion.fine_column(key))
                visit(offset + row, col, value);
            ++col;
        }
    }
}

template <class Visitor>
void stream_dp_columns(const DomainHierarchy& h, const HierarchicalBasis& basis, int j,
                       FineExpansion& expansion, Visitor&& visit)
{
    const int n = h.n();
    const LevelSpaces& fine = h.level(h.max_level());
    std::int64_t col = 0;
    std::vector<std::pair<FormComponent, std::int64_t>> blocks;
    for (const auto& c : component_list(n, j))
    {
        for (const auto& key : basis.components.at(c))
        {
            const auto entries = expansion.fine_derivative_column(key, &blocks);
            for (std::size_t b = 0; b < blocks.size(); ++b)
            {
                const std::int64_t offset = fine.component_offset(blocks[b].first);
                const std::int64_t end =
                    (b + 1 < blocks.size()) ? blocks[b + 1].second : static_cast<std::int64_t>(entries.size());
                for (std::int64_t e = blocks[b].second; e < end; ++e)
                    visit(offset + entries[e].first, col, entries[e].second);
            }
            ++col;
        }
    }
}

SparseRationalMatrix exact_dp(const DomainHierarchy& h, const HierarchicalBasis& basis, int j,
                              FineExpansion& expansion)
{
    const LevelSpaces& fine = h.level(h.max_level());
    SparseRationalMatrix dp(fine.form_dim(j + 1), basis.form_dim(h.n(), j));
    stream_dp_columns(h, basis, j, expansion,
                      [&](std::int64_t r, std::int64_t c, const Rational& v) { dp.add(r, c, v); });
    return dp;
}

// Floating closure test with the pinned-row quotient: the level-L columns of
// P_{j+1} are unit vectors, so it suffices to compare ranks of the remaining
// columns with the pinned rows dropped. Columns of D_j P_j supported
// entirely on pinned rows vanish and are dropped as well.
bool closure_floating(const DomainHierarchy& h, const HierarchicalBasis& basis, int j,
                      const RankOptions& options, FineExpansion& expansion)
{
    const int n = h.n();
    const LevelSpaces& fine = h.level(h.max_level());
    const FineRowQuotient quotient = make_quotient(h, basis, j + 1);

    std::int64_t coarse_cols = 0;
    for (const auto& c : component_list(n, j + 1))
        for (const auto& key : basis.components.at(c))
            coarse_cols += key.level == h.max_level() ? 0 : 1;

    // Surviving entries of D_j P_j and of the coarse part of P_{j+1}.
    std::vector<std::vector<std::pair<std::int64_t, double>>> dp_cols(basis.form_dim(n, j));
    stream_dp_columns(h, basis, j, expansion, [&](std::int64_t r, std::int64_t c, const Rational& v) {
        if (!quotient.is_pinned(r))
            dp_cols[c].emplace_back(r, to_double(v));
    });
    std::vector<std::vector<std::pair<std::int64_t, double>>> p_cols(coarse_cols);
    {
        std::int64_t coarse_index = 0;
        for (const auto& c : component_list(n, j + 1))
        {
            const std::int64_t offset = fine.component_offset(c);
            for (const auto& key : basis.components.at(c))
            {
                if (key.level == h.max_level())
                    continue;
                auto& entries = p_cols[coarse_index++];
                for (const auto& [row, value] : expansion.fine_column(key))
                    if (!quotient.is_pinned(offset + row))
                        entries.emplace_back(offset + row, to_double(value));
            }
        }
    }

    // compress the surviving rows
    std::unordered_map<std::int64_t, std::int64_t> row_position;
    std::int64_t live_dp_cols = 0;
    for (const auto& column : p_cols)
        for (const auto& [r, v] : column)
            row_position.emplace(r, 0);
    for (const auto& column : dp_cols)
    {
        if (column.empty())
            continue;
        ++live_dp_cols;
        for (const auto& [r, v] : column)
            row_position.emplace(r, 0);
    }
    std::int64_t next_row = 0;
    for (auto& [row, pos] : row_position)
        pos = next_row++;

    const std::int64_t rows = next_row;
    FloatingRankAccumulator acc_p(rows, coarse_cols, options);
    FloatingRankAccumulator acc_both(rows, coarse_cols + live_dp_cols, options);
    for (std::int64_t c = 0; c < coarse_cols; ++c)
        for (const auto& [r, v] : p_cols[c])
        {
            const std::int64_t rr = row_position.at(r);
            acc_p.add(rr, c, v);
            acc_both.add(rr, c, v);
        }
    std::int64_t live = 0;
    for (const auto& column : dp_cols)
    {
        if (column.empty())
            continue;
        for (const auto& [r, v] : column)
            acc_both.add(row_position.at(r), coarse_cols + live, v);
        ++live;
    }
    return acc_both.rank().rank == acc_p.rank().rank;
}

bool closure_exact(const DomainHierarchy& h, const HierarchicalBasis& basis, int j,
                   const RankOptions& options, FineExpansion& expansion)
{
    const int n = h.n();
    const LevelSpaces& fine = h.level(h.max_level());
    const std::int64_t rows = fine.form_dim(j + 1);
    const std::int64_t p_cols = basis.form_dim(n, j + 1);
    const std::int64_t dp_cols = basis.form_dim(n, j);

    SparseRationalMatrix stacked(rows, p_cols + dp_cols);
    SparseRationalMatrix p_next(rows, p_cols);
    stream_p_columns(h, basis, j + 1, expansion, false, [&](std::int64_t r, std::int64_t c, const Rational& v) {
        stacked.set(r, c, v);
        p_next.set(r, c, v);
    });
    stream_dp_columns(h, basis, j, expansion, [&](std::int64_t r, std::int64_t c, const Rational& v) {
        stacked.add(r, p_cols + c, v);
    });
    return rank_exact_sparse(stacked, options.exact_cap) == rank_exact_sparse(p_next, options.exact_cap);
}

} // namespace

bool closure_check(const DomainHierarchy& h, const HierarchicalBasis& basis, int j,
                   const RankOptions& options)
{
    if (j < 0 || j > h.n() - 1)
        fail(Errc::BadDegree, "closure degree out of range");
    FineExpansion expansion(h);
    if (options.backend == RankOptions::Backend::Exact)
        return closure_exact(h, basis, j, options, expansion);
    return closure_floating(h, basis, j, options, expansion);
}

bool CohomologyReport::exact() const
{
    return backend == "exact";
}

CohomologyReport cohomology_dims(const DomainHierarchy& h, const HierarchicalBasis& basis,
                                 const RankOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    const int n = h.n();
    FineExpansion expansion(h);

    for (int j = 0; j < n; ++j)
    {
        const bool closed = options.backend == RankOptions::Backend::Exact
                                ? closure_exact(h, basis, j, options, expansion)
                                : closure_floating(h, basis, j, options, expansion);
        if (!closed)
            fail(Errc::ClosureViolated,
                 "hierarchical spaces do not form a complex at degree " + std::to_string(j));
    }

    CohomologyReport report;
    report.backend = options.backend == RankOptions::Backend::Exact ? "exact" : "floating";
    report.rank_tolerance = options.backend == RankOptions::Backend::Exact ? 0 : options.tolerance;

    for (int j = 0; j <= n; ++j)
        report.space_dims.push_back(basis.form_dim(n, j));

    const LevelSpaces& fine = h.level(h.max_level());
    for (int j = 0; j < n; ++j)
    {
        if (options.backend == RankOptions::Backend::Exact)
        {
            report.ranks.push_back(rank_exact_sparse(exact_dp(h, basis, j, expansion), options.exact_cap));
        }
        else
        {
            FloatingRankAccumulator acc(fine.form_dim(j + 1), basis.form_dim(n, j), options);
            stream_dp_columns(h, basis, j, expansion, [&](std::int64_t r, std::int64_t c, const Rational& v) {
                acc.add(r, c, to_double(v));
            });
            const FloatingRankResult result = acc.rank();
            report.ranks.push_back(result.rank);
            report.indeterminate = report.indeterminate || result.indeterminate;
        }
    }

    for (int j = 0; j <= n; ++j)
    {
        const std::int64_t rank_j = j < n ? report.ranks[j] : 0;
        const std::int64_t rank_prev = j > 0 ? report.ranks[j - 1] : 0;
        report.dims.push_back(report.space_dims[j] - rank_j - rank_prev);
    }
    report.spurious = report.dims;
    report.spurious.back() -= 1;

    report.elapsed_seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() - start)
            .count();
    return report;
}

} // namespace hbs
