#include "hbs/hierarchy.hpp"

#include "hbs/error.hpp"

#include <algorithm>

namespace hbs
{

namespace
{

std::int64_t product(const std::vector<int>& dims)
{
    std::int64_t p = 1;
    for (int d : dims)
        p *= d;
    return p;
}

} // namespace

CellSet::CellSet(std::vector<int> cells_per_direction, std::vector<std::int64_t> ids)
    : dims_(std::move(cells_per_direction)), ids_(std::move(ids))
{
    canonicalize();
}

CellSet CellSet::full(const std::vector<int>& cells_per_direction)
{
    std::vector<std::int64_t> ids(product(cells_per_direction));
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(ids.size()); ++i)
        ids[i] = i;
    return CellSet(cells_per_direction, std::move(ids));
}

CellSet CellSet::empty(const std::vector<int>& cells_per_direction)
{
    return CellSet(cells_per_direction, {});
}

std::int64_t CellSet::flatten(const std::vector<int>& cell) const
{
    std::int64_t flat = 0;
    for (int k = 0; k < n(); ++k)
    {
        if (cell[k] < 1 || cell[k] > dims_[k])
            fail(Errc::IndexOutOfRange, "cell coordinate out of range");
        flat = flat * dims_[k] + (cell[k] - 1);
    }
    return flat;
}

std::vector<int> CellSet::unflatten(std::int64_t id) const
{
    std::vector<int> cell(n());
    for (int k = n() - 1; k >= 0; --k)
    {
        cell[k] = static_cast<int>(id % dims_[k]) + 1;
        id /= dims_[k];
    }
    return cell;
}

bool CellSet::contains(std::int64_t id) const
{
    return std::binary_search(ids_.begin(), ids_.end(), id);
}

bool CellSet::contains_box(const std::vector<int>& lo, const std::vector<int>& hi) const
{
    std::vector<int> cell = lo;
    for (;;)
    {
        if (!contains(flatten(cell)))
            return false;
        int k = n() - 1;
        while (k >= 0)
        {
            if (++cell[k] <= hi[k])
                break;
            cell[k] = lo[k];
            --k;
        }
        if (k < 0)
            return true;
    }
}

void CellSet::insert_box(const std::vector<int>& lo, const std::vector<int>& hi)
{
    for (int k = 0; k < n(); ++k)
        if (lo[k] > hi[k])
            return;
    std::vector<int> cell = lo;
    for (;;)
    {
        ids_.push_back(flatten(cell));
        int k = n() - 1;
        while (k >= 0)
        {
            if (++cell[k] <= hi[k])
                break;
            cell[k] = lo[k];
            --k;
        }
        if (k < 0)
            break;
    }
    canonicalize();
}

void CellSet::canonicalize()
{
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

CellSet CellSet::set_union(const CellSet& other) const
{
    if (dims_ != other.dims_)
        fail(Errc::ShapeMismatch, "cell sets live on different grids");
    std::vector<std::int64_t> merged;
    merged.reserve(ids_.size() + other.ids_.size());
    std::merge(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(), std::back_inserter(merged));
    return CellSet(dims_, std::move(merged));
}

bool CellSet::subset_of(const CellSet& other) const
{
    if (dims_ != other.dims_)
        fail(Errc::ShapeMismatch, "cell sets live on different grids");
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

std::vector<char> CellSet::bitmap() const
{
    std::vector<char> mask(product(dims_), 0);
    for (std::int64_t id : ids_)
        mask[id] = 1;
    return mask;
}

DomainHierarchy DomainHierarchy::build(std::vector<LevelSpaces> levels,
                                       std::vector<RefinementInput> refinements)
{
    if (levels.empty())
        fail(Errc::ConfigError, "at least one level required");
    const int big_l = static_cast<int>(levels.size()) - 1;
    if (static_cast<int>(refinements.size()) != big_l)
        fail(Errc::ConfigError, "expected one refinement input per level below the finest");
    const int n = levels.front().n();
    for (const auto& lvl : levels)
    {
        if (lvl.n() != n)
            fail(Errc::ConfigError, "level dimensions differ");
        for (int k = 0; k < n; ++k)
            if (lvl.direction(k).num_basis() < 2)
                fail(Errc::ConfigError, "each direction requires dim S^0 >= 2");
    }
    for (int l = 0; l + 1 <= big_l; ++l)
        for (int k = 0; k < n; ++k)
            if (!is_nested(levels[l].direction(k), levels[l + 1].direction(k)))
                fail(Errc::NotNested, "level " + std::to_string(l + 1) + " does not refine level "
                                          + std::to_string(l) + " in direction " + std::to_string(k + 1));

    DomainHierarchy h;
    h.levels_ = std::move(levels);

    // Per-direction child maps between consecutive levels.
    h.child_.resize(big_l);
    for (int l = 0; l < big_l; ++l)
    {
        h.child_[l].resize(n);
        for (int k = 0; k < n; ++k)
        {
            const auto& coarse = h.levels_[l].direction(k).unique_knots();
            const auto& fine = h.levels_[l + 1].direction(k).unique_knots();
            auto& ranges = h.child_[l][k];
            ranges.resize(coarse.size() - 1);
            for (std::size_t c = 0; c + 1 < coarse.size(); ++c)
            {
                const auto lo = std::lower_bound(fine.begin(), fine.end(), coarse[c]) - fine.begin();
                const auto hi = std::lower_bound(fine.begin(), fine.end(), coarse[c + 1]) - fine.begin();
                ranges[c] = {static_cast<int>(lo) + 1, static_cast<int>(hi)};
            }
        }
    }

    auto grid_dims = [&](int l) {
        std::vector<int> dims(n);
        for (int k = 0; k < n; ++k)
            dims[k] = h.levels_[l].direction(k).num_cells();
        return dims;
    };

    h.omega_.push_back(CellSet::full(grid_dims(0)));
    h.assumption2_.push_back(true);

    for (int l = 0; l < big_l; ++l)
    {
        const std::vector<int> fine_dims = grid_dims(l + 1);
        CellSet next;
        bool a2 = true;
        const RefinementInput& input = refinements[l];
        if (input.raw_cells.has_value())
        {
            next = *input.raw_cells;
            if (next.dims() != fine_dims)
                fail(Errc::ShapeMismatch, "refinement cells do not match the level grid");
        }
        else
        {
            for (const auto& idx : input.zero_forms)
                if (!h.levels_[l].valid_index(FormComponent{std::vector<int>(n, 0)}, idx))
                    fail(Errc::IndexOutOfRange, "refinement selects an invalid 0-form index");
            next = h.cells_from_supports_impl(l, input.zero_forms, l + 1, fine_dims);
        }

        // Containment Omega_{l+1} <= Omega_l.
        const CellSet omega_l_refined = h.refine_cells_impl(h.omega_[l], l, l + 1);
        if (!next.subset_of(omega_l_refined))
            fail(Errc::NotContained, "Omega_" + std::to_string(l + 1) + " is not contained in Omega_"
                                         + std::to_string(l));

        if (input.raw_cells.has_value() && !next.is_empty())
        {
            // Set-cover check for Assumption 2: 0-form supports inside the
            // cell set must reproduce it exactly.
            h.omega_.push_back(next); // temporarily visible for basis_on
            h.assumption2_.push_back(true);
            const FormComponent zero{std::vector<int>(n, 0)};
            const SubdomainRef y{l + 1, next};
            CellSet covered = CellSet::empty(fine_dims);
            for (const auto& idx : h.basis_on(l, zero, y))
            {
                const auto [lo, hi] = h.support_cell_box(l, zero, idx, l + 1);
                covered.insert_box(lo, hi);
            }
            h.omega_.pop_back();
            h.assumption2_.pop_back();
            a2 = covered == next;
            if (!a2 && !input.allow_assumption2_violation)
                fail(Errc::ValidationError,
                     "refinement cells at level " + std::to_string(l + 1)
                         + " are not a union of coarse 0-form supports (Assumption 2)");
        }
        h.omega_.push_back(std::move(next));
        h.assumption2_.push_back(a2);
    }
    return h;
}

const LevelSpaces& DomainHierarchy::level(int l) const
{
    if (l < 0 || l >= num_levels())
        fail(Errc::IndexOutOfRange, "level out of range");
    return levels_[l];
}

SubdomainRef DomainHierarchy::omega(int l) const
{
    if (l == num_levels())
    {
        std::vector<int> dims(n(), 1);
        for (int k = 0; k < n(); ++k)
            dims[k] = levels_.back().direction(k).num_cells();
        return SubdomainRef{max_level(), CellSet::empty(dims)};
    }
    if (l < 0 || l > max_level())
        fail(Errc::IndexOutOfRange, "level out of range");
    return SubdomainRef{l, omega_[l]};
}

bool DomainHierarchy::assumption2_satisfied(int l) const
{
    if (l < 1 || l > max_level())
        fail(Errc::IndexOutOfRange, "level out of range");
    return assumption2_[l];
}

bool DomainHierarchy::assumption2_satisfied_all() const
{
    for (int l = 1; l <= max_level(); ++l)
        if (!assumption2_[l])
            return false;
    return true;
}

CellSet DomainHierarchy::refine_cells_impl(const CellSet& cells, int from_level, int to_level) const
{
    if (from_level == to_level)
        return cells;
    std::vector<int> to_dims(n());
    for (int k = 0; k < n(); ++k)
        to_dims[k] = levels_[to_level].direction(k).num_cells();
    CellSet out = CellSet::empty(to_dims);
    for (std::int64_t id : cells.ids())
    {
        std::vector<int> lo = cells.unflatten(id);
        std::vector<int> hi = lo;
        for (int l = from_level; l < to_level; ++l)
        {
            for (int k = 0; k < n(); ++k)
            {
                const auto& ranges = child_[l][k];
                const int new_lo = ranges[lo[k] - 1].first;
                const int new_hi = ranges[hi[k] - 1].second;
                lo[k] = new_lo;
                hi[k] = new_hi;
            }
        }
        out.insert_box(lo, hi);
    }
    return out;
}

CellSet DomainHierarchy::refine_cells(const CellSet& cells, int from_level, int to_level) const
{
    if (from_level > to_level || to_level > max_level())
        fail(Errc::IndexOutOfRange, "bad level pair");
    return refine_cells_impl(cells, from_level, to_level);
}

std::pair<std::vector<int>, std::vector<int>> DomainHierarchy::support_cell_box(int s, const FormComponent& c,
                                                                                const MultiIndex& idx,
                                                                                int cell_level) const
{
    if (cell_level < s || cell_level > max_level())
        fail(Errc::IndexOutOfRange, "cell level out of range");
    std::vector<int> lo(n()), hi(n());
    for (int k = 0; k < n(); ++k)
    {
        const auto [c0, c1] = levels_[s].direction(k).support_cells(c.bits[k], idx[k]);
        lo[k] = c0;
        hi[k] = c1;
    }
    for (int l = s; l < cell_level; ++l)
    {
        for (int k = 0; k < n(); ++k)
        {
            lo[k] = child_[l][k][lo[k] - 1].first;
            hi[k] = child_[l][k][hi[k] - 1].second;
        }
    }
    return {lo, hi};
}

bool DomainHierarchy::supported_on(int s, const FormComponent& c, const MultiIndex& idx,
                                   const SubdomainRef& y) const
{
    if (y.cells.is_empty())
        return false;
    const int target = std::max(s, y.cell_level);
    const auto [lo, hi] = support_cell_box(s, c, idx, target);
    const CellSet yy = y.cell_level == target ? y.cells : refine_cells_impl(y.cells, y.cell_level, target);
    return yy.contains_box(lo, hi);
}

std::vector<MultiIndex> DomainHierarchy::basis_on(int s, const FormComponent& c, const SubdomainRef& y) const
{
    std::vector<MultiIndex> out;
    if (y.cells.is_empty())
        return out;
    const int target = std::max(s, y.cell_level);
    const CellSet yy = y.cell_level == target ? y.cells : refine_cells_impl(y.cells, y.cell_level, target);
    const std::vector<char> mask = yy.bitmap();

    // Per-direction support ranges at the target grid, for every univariate
    // index of the component.
    std::vector<std::vector<std::pair<int, int>>> ranges(n());
    for (int k = 0; k < n(); ++k)
    {
        const int dim = levels_[s].direction(k).dimension(c.bits[k]);
        ranges[k].resize(dim);
        for (int i = 1; i <= dim; ++i)
        {
            auto r = levels_[s].direction(k).support_cells(c.bits[k], i);
            for (int l = s; l < target; ++l)
                r = {child_[l][k][r.first - 1].first, child_[l][k][r.second - 1].second};
            ranges[k][i - 1] = r;
        }
    }

    MultiIndex idx(n(), 1);
    std::vector<int> lo(n()), hi(n());
    for (;;)
    {
        bool inside = true;
        for (int k = 0; k < n(); ++k)
        {
            lo[k] = ranges[k][idx[k] - 1].first;
            hi[k] = ranges[k][idx[k] - 1].second;
        }
        std::vector<int> cell = lo;
        while (inside)
        {
            std::int64_t flat = 0;
            for (int k = 0; k < n(); ++k)
                flat = flat * yy.dims()[k] + (cell[k] - 1);
            if (!mask[flat])
                inside = false;
            int k = n() - 1;
            while (k >= 0)
            {
                if (++cell[k] <= hi[k])
                    break;
                cell[k] = lo[k];
                --k;
            }
            if (k < 0)
                break;
        }
        if (inside)
            out.push_back(idx);
        int k = n() - 1;
        while (k >= 0)
        {
            if (++idx[k] <= levels_[s].direction(k).dimension(c.bits[k]))
                break;
            idx[k] = 1;
            --k;
        }
        if (k < 0)
            break;
    }
    return out;
}

std::vector<BasisKey> DomainHierarchy::kraft_select(const FormComponent& c) const
{
    std::vector<BasisKey> selected;
    {
        // H_0 = all level-0 functions.
        const auto full = omega(0);
        for (const auto& idx : basis_on(0, c, full))
            selected.push_back(BasisKey{0, c, idx});
    }
    for (int l = 0; l < max_level(); ++l)
    {
        const SubdomainRef target = omega(l + 1);
        std::vector<BasisKey> next;
        for (const auto& key : selected)
            if (!supported_on(key.level, c, key.index, target))
                next.push_back(key);
        for (const auto& idx : basis_on(l + 1, c, target))
            next.push_back(BasisKey{l + 1, c, idx});
        selected = std::move(next);
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

bool DomainHierarchy::extended_domain_index_valid(int l, const FormComponent& c, const MultiIndex& idx) const
{
    for (int k = 0; k < n(); ++k)
    {
        const int ndof = levels_[l].direction(k).num_basis();
        if (idx[k] < 1 || idx[k] > ndof + c.bits[k] - 1)
            return false;
    }
    return true;
}

Box DomainHierarchy::extended_knot_domain(int l, const FormComponent& c, const MultiIndex& idx) const
{
    if (!extended_domain_index_valid(l, c, idx))
        fail(Errc::IndexOutOfRange, "extended knot domain index out of range");
    Box box;
    for (int k = 0; k < n(); ++k)
    {
        const auto& kv = levels_[l].direction(k);
        box.intervals.push_back(Interval{kv.knot(idx[k]), kv.knot(idx[k] + kv.degree() - c.bits[k] + 2)});
    }
    return box;
}

std::vector<std::optional<MultiIndex>> DomainHierarchy::neighbour_indices(int l, const FormComponent& c,
                                                                          const MultiIndex& ibar) const
{
    const FormComponent zero{std::vector<int>(n(), 0)};
    if (!levels_[l].valid_index(zero, ibar))
        fail(Errc::IndexOutOfRange, "0-form index out of range");
    std::vector<std::optional<MultiIndex>> out;
    MultiIndex offset(n(), 0); // per-direction offset in [j_k - 1, 0]
    for (;;)
    {
        MultiIndex idx(n());
        for (int k = 0; k < n(); ++k)
            idx[k] = ibar[k] + offset[k];
        if (extended_domain_index_valid(l, c, idx))
            out.emplace_back(std::move(idx));
        else
            out.emplace_back(std::nullopt);
        int k = n() - 1;
        while (k >= 0)
        {
            if (c.bits[k] == 0 && offset[k] == 0)
            {
                offset[k] = -1;
                break;
            }
            offset[k] = 0;
            --k;
        }
        if (k < 0)
            break;
    }
    return out;
}

std::vector<MultiIndex> DomainHierarchy::deriv_set(int l, const FormComponent& c, const MultiIndex& idx) const
{
    if (l + 1 > max_level())
        fail(Errc::IndexOutOfRange, "no finer level");
    std::vector<MultiIndex> out;
    const SubdomainRef target = omega(l + 1);
    const FormComponent zero{std::vector<int>(n(), 0)};
    MultiIndex offset(n(), 0); // ibar_k - i_k in [0, 1 - j_k]
    for (;;)
    {
        MultiIndex ibar(n());
        bool in_range = true;
        for (int k = 0; k < n(); ++k)
        {
            ibar[k] = idx[k] + offset[k];
            in_range = in_range && ibar[k] >= 1 && ibar[k] <= levels_[l].direction(k).num_basis();
        }
        // chi^1_ibar is the support of the 0-form ibar.
        if (in_range && supported_on(l, zero, ibar, target))
            out.push_back(ibar);
        int k = n() - 1;
        while (k >= 0)
        {
            if (c.bits[k] == 0 && offset[k] == 0)
            {
                offset[k] = 1;
                break;
            }
            offset[k] = 0;
            --k;
        }
        if (k < 0)
            break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool DomainHierarchy::in_itpb(int l, const FormComponent& c, const MultiIndex& idx) const
{
    if (!extended_domain_index_valid(l, c, idx))
        return false;
    return !deriv_set(l, c, idx).empty();
}

SubdomainRef DomainHierarchy::omega_subdomain(int l, const FormComponent& c, const MultiIndex& idx) const
{
    std::vector<int> dims(n());
    for (int k = 0; k < n(); ++k)
        dims[k] = levels_[l + 1].direction(k).num_cells();
    CellSet cells = CellSet::empty(dims);
    if (in_itpb(l, c, idx))
    {
        const FormComponent zero{std::vector<int>(n(), 0)};
        for (const auto& ibar : deriv_set(l, c, idx))
        {
            const auto [lo, hi] = support_cell_box(l, zero, ibar, l + 1);
            cells.insert_box(lo, hi);
        }
    }
    return SubdomainRef{l + 1, cells};
}

bool DomainHierarchy::partition_check(int l, const FormComponent& c) const
{
    if (l >= max_level())
        fail(Errc::IndexOutOfRange, "no finer level");
    std::vector<int> dims(n());
    for (int k = 0; k < n(); ++k)
        dims[k] = levels_[l + 1].direction(k).num_cells();
    CellSet acc = CellSet::empty(dims);
    MultiIndex idx(n(), 1);
    for (;;)
    {
        if (in_itpb(l, c, idx))
            acc = acc.set_union(omega_subdomain(l, c, idx).cells);
        int k = n() - 1;
        while (k >= 0)
        {
            const int bound = levels_[l].direction(k).num_basis() + c.bits[k] - 1;
            if (++idx[k] <= bound)
                break;
            idx[k] = 1;
            --k;
        }
        if (k < 0)
            break;
    }
    return acc == omega_[l + 1];
}

CellSet DomainHierarchy::cells_from_box(int cell_level, const Box& box) const
{
    std::vector<int> dims(n());
    for (int k = 0; k < n(); ++k)
        dims[k] = levels_[cell_level].direction(k).num_cells();
    CellSet out = CellSet::empty(dims);
    if (box.empty)
        return out;
    std::vector<int> lo(n()), hi(n());
    for (int k = 0; k < n(); ++k)
    {
        const auto& unique = levels_[cell_level].direction(k).unique_knots();
        const auto lo_it = std::lower_bound(unique.begin(), unique.end(), box.intervals[k].lo);
        const auto hi_it = std::lower_bound(unique.begin(), unique.end(), box.intervals[k].hi);
        if (lo_it == unique.end() || *lo_it != box.intervals[k].lo || hi_it == unique.end()
            || *hi_it != box.intervals[k].hi)
            fail(Errc::ValidationError, "box is not aligned with the level's Bezier mesh");
        lo[k] = static_cast<int>(lo_it - unique.begin()) + 1;
        hi[k] = static_cast<int>(hi_it - unique.begin());
        if (lo[k] > hi[k])
            return out; // degenerate box
    }
    out.insert_box(lo, hi);
    return out;
}

CellSet DomainHierarchy::cells_from_supports(int l, const std::vector<MultiIndex>& zero_forms,
                                             int cell_level) const
{
    std::vector<int> dims(n());
    for (int k = 0; k < n(); ++k)
        dims[k] = levels_[cell_level].direction(k).num_cells();
    return cells_from_supports_impl(l, zero_forms, cell_level, dims);
}

CellSet DomainHierarchy::cells_from_supports_impl(int l, const std::vector<MultiIndex>& zero_forms,
                                                  int cell_level, const std::vector<int>& dims) const
{
    CellSet out = CellSet::empty(dims);
    const FormComponent zero{std::vector<int>(n(), 0)};
    for (const auto& idx : zero_forms)
    {
        const auto [lo, hi] = support_cell_box(l, zero, idx, cell_level);
        out.insert_box(lo, hi);
    }
    return out;
}

std::int64_t HierarchicalBasis::form_dim(int n, int j) const
{
    std::int64_t dim = 0;
    for (const auto& c : component_list(n, j))
    {
        auto it = components.find(c);
        if (it != components.end())
            dim += static_cast<std::int64_t>(it->second.size());
    }
    return dim;
}

HierarchicalBasis kraft_select_all(const DomainHierarchy& h)
{
    HierarchicalBasis basis;
    for (int j = 0; j <= h.n(); ++j)
        for (const auto& c : component_list(h.n(), j))
            basis.components[c] = h.kraft_select(c);
    return basis;
}

} // namespace hbs
