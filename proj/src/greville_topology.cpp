#include "hbs/greville_topology.hpp"

#include "hbs/error.hpp"
#include "hbs/rank.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace hbs
{

CuboidalComplex CuboidalComplex::build(int n, const std::vector<Cell>& cells)
{
    CuboidalComplex complex;
    complex.n_ = n;
    complex.cells_.resize(n + 1);
    complex.index_.resize(n + 1);
    for (const Cell& cell : cells)
    {
        const int dual_dim = n - cell.component.order();
        complex.cells_[dual_dim].push_back(cell);
    }
    for (int d = 0; d <= n; ++d)
    {
        auto& list = complex.cells_[d];
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(list.size()); ++i)
            complex.index_[d].emplace(list[i], i);
    }
    // Face-closedness in the dual sense: shrinking a point to an adjacent
    // edge must stay inside the complex.
    for (int d = 1; d <= n; ++d)
    {
        for (const Cell& cell : complex.cells_[d])
        {
            for (int k = 0; k < n; ++k)
            {
                if (cell.component.bits[k] == 1)
                    continue;
                for (int shift = 0; shift <= 1; ++shift)
                {
                    Cell facet = cell;
                    facet.component.bits[k] = 1;
                    facet.index[k] += shift;
                    if (!complex.index_[d - 1].count(facet))
                        fail(Errc::ValidationError, "Greville cell set is not closed under faces");
                }
            }
        }
    }
    return complex;
}

std::int64_t CuboidalComplex::num_cells(int dual_dim) const
{
    if (dual_dim < 0 || dual_dim > n_)
        return 0;
    return static_cast<std::int64_t>(cells_[dual_dim].size());
}

const std::vector<CuboidalComplex::Cell>& CuboidalComplex::cells(int dual_dim) const
{
    if (dual_dim < 0 || dual_dim > n_)
        fail(Errc::IndexOutOfRange, "dual dimension out of range");
    return cells_[dual_dim];
}

SparseRationalMatrix CuboidalComplex::boundary(int dual_dim) const
{
    if (dual_dim < 1 || dual_dim > n_)
        fail(Errc::IndexOutOfRange, "boundary dimension out of range");
    SparseRationalMatrix b(num_cells(dual_dim - 1), num_cells(dual_dim));
    for (std::int64_t c = 0; c < num_cells(dual_dim); ++c)
    {
        const Cell& cell = cells_[dual_dim][c];
        int axis_position = 0;
        for (int k = 0; k < n_; ++k)
        {
            if (cell.component.bits[k] == 1)
                continue;
            const int sign = (axis_position % 2 == 0) ? 1 : -1;
            for (int shift = 0; shift <= 1; ++shift)
            {
                Cell facet = cell;
                facet.component.bits[k] = 1;
                facet.index[k] += shift;
                const std::int64_t row = index_[dual_dim - 1].at(facet);
                b.add(row, c, Rational(shift == 1 ? sign : -sign));
            }
            ++axis_position;
        }
    }
    return b;
}

bool BettiProfile::is_ball(int n) const
{
    if (static_cast<int>(ranks.size()) != n + 1 || ranks[0] != 1)
        return false;
    for (std::size_t d = 1; d < ranks.size(); ++d)
        if (ranks[d] != 0)
            return false;
    return true;
}

namespace
{

struct CollapseState
{
    // Global cell ids: (dual_dim, position) flattened.
    std::vector<std::vector<std::int64_t>> facets;  // per cell
    std::vector<std::vector<std::int64_t>> cofaces; // per cell
    std::vector<char> alive;
};

} // namespace

BettiProfile betti(const CuboidalComplex& complex)
{
    const int n = complex.n();
    std::vector<std::int64_t> offset(n + 2, 0);
    for (int d = 0; d <= n; ++d)
        offset[d + 1] = offset[d] + complex.num_cells(d);
    const std::int64_t total = offset[n + 1];

    CollapseState state;
    state.facets.resize(total);
    state.cofaces.resize(total);
    state.alive.assign(total, 1);

    for (int d = 1; d <= n; ++d)
    {
        const SparseRationalMatrix b = complex.boundary(d);
        for (const auto& [rc, v] : b.entries())
        {
            const std::int64_t cell = offset[d] + rc.second;
            const std::int64_t facet = offset[d - 1] + rc.first;
            state.facets[cell].push_back(facet);
            state.cofaces[facet].push_back(cell);
        }
    }

    // Free-pair collapsing: a cell with exactly one living coface is removed
    // together with that coface; a homotopy equivalence in a face-closed
    // cuboidal complex.
    std::vector<int> coface_count(total, 0);
    std::deque<std::int64_t> queue;
    for (std::int64_t i = 0; i < total; ++i)
    {
        coface_count[i] = static_cast<int>(state.cofaces[i].size());
        if (coface_count[i] == 1)
            queue.push_back(i);
    }
    auto decrement = [&](std::int64_t facet) {
        if (--coface_count[facet] == 1 && state.alive[facet])
            queue.push_back(facet);
    };
    while (!queue.empty())
    {
        const std::int64_t tau = queue.front();
        queue.pop_front();
        if (!state.alive[tau] || coface_count[tau] != 1)
            continue;
        std::int64_t sigma = -1;
        for (std::int64_t cof : state.cofaces[tau])
            if (state.alive[cof])
                sigma = cof;
        if (sigma < 0)
            continue;
        state.alive[tau] = 0;
        state.alive[sigma] = 0;
        for (std::int64_t f : state.facets[sigma])
            if (state.alive[f])
                decrement(f);
        for (std::int64_t f : state.facets[tau])
            if (state.alive[f])
                decrement(f);
    }

    // Exact ranks of the boundary operators restricted to surviving cells.
    std::vector<std::int64_t> alive_count(n + 1, 0);
    std::vector<std::map<std::int64_t, std::int64_t>> renumber(n + 1);
    for (int d = 0; d <= n; ++d)
        for (std::int64_t i = 0; i < complex.num_cells(d); ++i)
            if (state.alive[offset[d] + i])
                renumber[d].emplace(i, alive_count[d]++);

    std::vector<std::int64_t> boundary_rank(n + 2, 0);
    for (int d = 1; d <= n; ++d)
    {
        if (alive_count[d] == 0 || alive_count[d - 1] == 0)
            continue;
        const SparseRationalMatrix full = complex.boundary(d);
        SparseRationalMatrix restricted(alive_count[d - 1], alive_count[d]);
        for (const auto& [rc, v] : full.entries())
        {
            const auto row = renumber[d - 1].find(rc.first);
            const auto col = renumber[d].find(rc.second);
            if (row != renumber[d - 1].end() && col != renumber[d].end())
                restricted.set(row->second, col->second, v);
        }
        boundary_rank[d] = rank_exact_sparse(restricted, std::numeric_limits<std::int64_t>::max());
    }

    BettiProfile profile;
    for (int d = 0; d <= n; ++d)
        profile.ranks.push_back(alive_count[d] - boundary_rank[d] - boundary_rank[d + 1]);
    return profile;
}

CuboidalComplex greville_subcomplex(const DomainHierarchy& h, int space_level, const SubdomainRef& y)
{
    const int n = h.n();
    std::vector<CuboidalComplex::Cell> cells;
    for (int j = 0; j <= n; ++j)
        for (const auto& c : component_list(n, j))
            for (const auto& idx : h.basis_on(space_level, c, y))
                cells.push_back(CuboidalComplex::Cell{c, idx});
    return CuboidalComplex::build(n, cells);
}

std::vector<std::int64_t> spline_cohomology_on(const DomainHierarchy& h, int space_level,
                                               const SubdomainRef& a)
{
    const int n = h.n();
    const LevelSpaces& spaces = h.level(space_level);

    // Selected flat indices per component.
    std::map<FormComponent, std::vector<std::int64_t>> selected;
    std::map<FormComponent, std::map<std::int64_t, std::int64_t>> position;
    for (int j = 0; j <= n; ++j)
    {
        for (const auto& c : component_list(n, j))
        {
            auto& flat = selected[c];
            for (const auto& idx : h.basis_on(space_level, c, a))
                flat.push_back(spaces.flatten(c, idx));
            std::sort(flat.begin(), flat.end());
            auto& pos = position[c];
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(flat.size()); ++i)
                pos.emplace(flat[i], i);
        }
    }

    auto stacked_dim = [&](int j) {
        std::int64_t dim = 0;
        for (const auto& c : component_list(n, j))
            dim += static_cast<std::int64_t>(selected[c].size());
        return dim;
    };
    auto stacked_offset = [&](const FormComponent& c) {
        std::int64_t off = 0;
        for (const auto& other : component_list(n, c.order()))
        {
            if (other == c)
                return off;
            off += static_cast<std::int64_t>(selected[other].size());
        }
        return off;
    };

    std::vector<std::int64_t> ranks(n, 0);
    for (int j = 0; j < n; ++j)
    {
        SparseRationalMatrix restricted(stacked_dim(j + 1), stacked_dim(j));
        for (const auto& c : component_list(n, j))
        {
            const std::int64_t col_offset = stacked_offset(c);
            for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(selected[c].size()); ++ci)
            {
                const MultiIndex idx = spaces.unflatten(c, selected[c][ci]);
                int sign = 1;
                for (int k = 0; k < n; ++k)
                {
                    if (c.bits[k] == 1)
                    {
                        sign = -sign;
                        continue;
                    }
                    FormComponent target = c;
                    target.bits[k] = 1;
                    const KnotVector& kv = spaces.direction(k);
                    const int p = kv.degree();
                    for (int shift = 0; shift <= 1; ++shift)
                    {
                        const int r = idx[k] + shift;
                        const Rational value =
                            Rational(shift == 0 ? p : -p) / (kv.knot(r + p) - kv.knot(r));
                        MultiIndex row_idx = idx;
                        row_idx[k] = r;
                        const auto pos = position[target].find(spaces.flatten(target, row_idx));
                        if (pos == position[target].end())
                            return {}; // selection is not a subcomplex
                        restricted.add(stacked_offset(target) + pos->second, col_offset + ci,
                                       sign > 0 ? value : -value);
                    }
                }
            }
        }
        ranks[j] = rank_exact_sparse(restricted, std::numeric_limits<std::int64_t>::max());
    }

    std::vector<std::int64_t> dims;
    for (int j = 0; j <= n; ++j)
    {
        const std::int64_t rank_j = j < n ? ranks[j] : 0;
        const std::int64_t rank_prev = j > 0 ? ranks[j - 1] : 0;
        dims.push_back(stacked_dim(j) - rank_j - rank_prev);
    }
    return dims;
}

bool duality_check(const DomainHierarchy& h, int l, const FormComponent& c, const MultiIndex& idx)
{
    const SubdomainRef a = h.omega_subdomain(l, c, idx);
    if (a.cells.is_empty())
        return true;
    for (int s = 0; s <= 1; ++s)
    {
        const auto dims = spline_cohomology_on(h, l + s, a);
        if (dims.empty())
            return false;
        for (int j = 0; j < h.n(); ++j)
            if (dims[j] != 0)
                return false;
        if (dims[h.n()] != 1)
            return false;
        if (!betti(greville_subcomplex(h, l + s, a)).is_ball(h.n()))
            return false;
    }
    return true;
}

} // namespace hbs
