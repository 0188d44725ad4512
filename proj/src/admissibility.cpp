#include "hbs/admissibility.hpp"

#include "hbs/error.hpp"

#include <algorithm>
#include <set>

namespace hbs
{

namespace
{

void require_refined(const DomainHierarchy& h, int l, const MultiIndex& idx)
{
    const FormComponent zero{std::vector<int>(h.n(), 0)};
    if (!h.level(l).valid_index(zero, idx))
        fail(Errc::IndexOutOfRange, "0-form index out of range");
    if (!h.supported_on(l, zero, idx, h.omega(l + 1)))
        fail(Errc::NotRefined, "0-form is not supported on the next refinement domain");
}

// First (1-based) index of `value` in the level's knot list for direction k.
int first_knot_index(const LevelSpaces& spaces, int k, const Rational& value)
{
    const auto& knots = spaces.direction(k).knots();
    const auto it = std::lower_bound(knots.begin(), knots.end(), value);
    return static_cast<int>(it - knots.begin()) + 1;
}

int last_knot_index(const LevelSpaces& spaces, int k, const Rational& value)
{
    const auto& knots = spaces.direction(k).knots();
    const auto it = std::upper_bound(knots.begin(), knots.end(), value);
    return static_cast<int>(it - knots.begin());
}

} // namespace

IndexMaps index_maps(const DomainHierarchy& h, int l, const MultiIndex& idx)
{
    if (l + 1 > h.max_level())
        fail(Errc::IndexOutOfRange, "no finer level");
    const FormComponent zero{std::vector<int>(h.n(), 0)};
    if (!h.level(l).valid_index(zero, idx))
        fail(Errc::IndexOutOfRange, "0-form index out of range");
    IndexMaps maps;
    for (int k = 0; k < h.n(); ++k)
    {
        const KnotVector& kv = h.level(l).direction(k);
        maps.minus.push_back(first_knot_index(h.level(l + 1), k, kv.knot(idx[k])));
        maps.plus.push_back(last_knot_index(h.level(l + 1), k, kv.knot(idx[k] + kv.degree() + 1)));
    }
    return maps;
}

IntersectionInfo shares_intersection(const DomainHierarchy& h, int l, const MultiIndex& ibar,
                                     const std::vector<int>& delta)
{
    MultiIndex other(h.n());
    for (int k = 0; k < h.n(); ++k)
        other[k] = ibar[k] + delta[k];
    require_refined(h, l, ibar);
    require_refined(h, l, other);

    // Reflection-normalized form: per direction, use the left function's
    // support end against the right one's support start.
    std::vector<bool> fat(h.n(), false);
    for (int k = 0; k < h.n(); ++k)
    {
        const int a = std::min(ibar[k], other[k]);
        const int b = std::max(ibar[k], other[k]);
        const KnotVector& kv = h.level(l).direction(k);
        const int i_plus = last_knot_index(h.level(l + 1), k, kv.knot(a + kv.degree() + 1));
        const int i_minus = first_knot_index(h.level(l + 1), k, kv.knot(b));
        if (i_plus < i_minus)
            return IntersectionInfo{};
        fat[k] = (i_plus - i_minus) >= h.level(l + 1).direction(k).degree();
    }
    int fat_count = 0;
    for (int k = 0; k < h.n(); ++k)
        fat_count += fat[k] ? 1 : 0;
    if (fat_count < h.n() - 1)
        return IntersectionInfo{};

    IntersectionInfo info;
    info.shares = true;
    for (int k0 = 0; k0 < h.n(); ++k0)
    {
        bool ok = true;
        for (int k = 0; k < h.n(); ++k)
            ok = ok && (k == k0 || fat[k]);
        if (ok)
            info.k0_directions.push_back(k0);
    }
    return info;
}

std::optional<std::vector<MultiIndex>> shortest_chain(const DomainHierarchy& h, int l, const MultiIndex& ibar,
                                                      const std::vector<int>& delta)
{
    const int n = h.n();
    MultiIndex other(n);
    for (int k = 0; k < n; ++k)
        other[k] = ibar[k] + delta[k];
    require_refined(h, l, ibar);
    require_refined(h, l, other);

    const FormComponent zero{std::vector<int>(n, 0)};
    const SubdomainRef target = h.omega(l + 1);

    std::vector<int> extent(n), sign(n);
    std::int64_t states = 1;
    for (int k = 0; k < n; ++k)
    {
        extent[k] = std::abs(delta[k]);
        sign[k] = delta[k] >= 0 ? 1 : -1;
        states *= extent[k] + 1;
    }

    auto member = [&](const std::vector<int>& offset) {
        MultiIndex idx(n);
        for (int k = 0; k < n; ++k)
            idx[k] = ibar[k] + sign[k] * offset[k];
        return idx;
    };
    auto flatten = [&](const std::vector<int>& offset) {
        std::int64_t flat = 0;
        for (int k = 0; k < n; ++k)
            flat = flat * (extent[k] + 1) + offset[k];
        return flat;
    };

    // reach_end[r]: a monotone path from offset r to delta exists with all
    // members supported on Omega_{l+1}.
    std::vector<char> reach_end(states, 0);
    std::vector<int> offset = extent;
    for (;;)
    {
        const MultiIndex idx = member(offset);
        bool ok = h.level(l).valid_index(zero, idx) && h.supported_on(l, zero, idx, target);
        if (ok && offset != extent)
        {
            bool successor = false;
            for (int k = 0; k < n && !successor; ++k)
            {
                if (offset[k] < extent[k])
                {
                    auto up = offset;
                    ++up[k];
                    successor = reach_end[flatten(up)] != 0;
                }
            }
            ok = successor;
        }
        reach_end[flatten(offset)] = ok ? 1 : 0;

        // descend in reverse lexicographic order
        int k = n - 1;
        while (k >= 0)
        {
            if (offset[k] > 0)
            {
                --offset[k];
                for (int k2 = k + 1; k2 < n; ++k2)
                    offset[k2] = extent[k2];
                break;
            }
            --k;
        }
        if (k < 0)
            break;
    }

    if (!reach_end[flatten(std::vector<int>(n, 0))])
        return std::nullopt;

    std::vector<MultiIndex> chain;
    offset.assign(n, 0);
    chain.push_back(member(offset));
    while (offset != extent)
    {
        for (int k = 0; k < n; ++k)
        {
            if (offset[k] == extent[k])
                continue;
            auto next = offset;
            ++next[k];
            if (reach_end[flatten(next)])
            {
                offset = next;
                chain.push_back(member(offset));
                break;
            }
        }
    }
    return chain;
}

PairReport check_pair(const DomainHierarchy& h, int l, const MultiIndex& ibar, const std::vector<int>& delta)
{
    PairReport report;
    report.level = l;
    report.i = ibar;
    report.delta = delta;
    const IntersectionInfo info = shares_intersection(h, l, ibar, delta);
    report.shares_intersection = info.shares;
    if (!info.shares)
    {
        report.verdict = Verdict::NoChainNeeded;
        return report;
    }
    report.intersection_direction = info.k0_directions.front();
    report.chain = shortest_chain(h, l, ibar, delta);
    if (report.chain.has_value())
    {
        report.verdict = Verdict::Pass;
    }
    else
    {
        report.verdict = Verdict::Violation;
        report.reason = "no_shortest_chain";
    }
    return report;
}

AdmissibilityReport check_assumption3(const DomainHierarchy& h)
{
    AdmissibilityReport report;
    const int n = h.n();
    const FormComponent zero{std::vector<int>(n, 0)};

    for (int l = 0; l < h.max_level(); ++l)
    {
        if (!h.assumption2_satisfied(l + 1))
        {
            PairReport violation;
            violation.level = l;
            violation.verdict = Verdict::Violation;
            violation.reason = "assumption2";
            report.violations.push_back(std::move(violation));
        }

        const std::vector<MultiIndex> refined = h.basis_on(l, zero, h.omega(l + 1));
        std::set<std::pair<MultiIndex, MultiIndex>> settled;

        for (std::size_t a = 0; a < refined.size(); ++a)
        {
            for (std::size_t b = a + 1; b < refined.size(); ++b)
            {
                // Sweep bound: the pair is a candidate only if the closed
                // supports overlap in every direction.
                bool overlap = true;
                for (int k = 0; k < n && overlap; ++k)
                {
                    const KnotVector& kv = h.level(l).direction(k);
                    const int lo = std::min(refined[a][k], refined[b][k]);
                    const int hi = std::max(refined[a][k], refined[b][k]);
                    overlap = kv.knot(lo + kv.degree() + 1) >= kv.knot(hi);
                }
                if (!overlap)
                    continue;
                ++report.pairs_swept;

                const IntersectionInfo info = shares_intersection(
                    h, l, refined[a],
                    [&] {
                        std::vector<int> d(n);
                        for (int k = 0; k < n; ++k)
                            d[k] = refined[b][k] - refined[a][k];
                        return d;
                    }());
                if (!info.shares)
                    continue;
                if (settled.count({refined[a], refined[b]}))
                    continue;

                std::vector<int> delta(n);
                for (int k = 0; k < n; ++k)
                    delta[k] = refined[b][k] - refined[a][k];
                const auto chain = shortest_chain(h, l, refined[a], delta);
                if (chain.has_value())
                {
                    ++report.chains_found;
                    // The shortest-chain relation restricts to sub-chains,
                    // so settled pairs need no second search.
                    for (std::size_t s = 0; s < chain->size(); ++s)
                        for (std::size_t t = s + 1; t < chain->size(); ++t)
                        {
                            auto lo = (*chain)[s];
                            auto hi = (*chain)[t];
                            if (hi < lo)
                                std::swap(lo, hi);
                            settled.insert({lo, hi});
                        }
                }
                else
                {
                    PairReport violation;
                    violation.level = l;
                    violation.i = refined[a];
                    violation.delta = delta;
                    violation.shares_intersection = true;
                    violation.intersection_direction = info.k0_directions.front();
                    violation.verdict = Verdict::Violation;
                    violation.reason = "no_shortest_chain";
                    report.violations.push_back(std::move(violation));
                }
            }
        }
    }
    report.overall = report.violations.empty();
    return report;
}

} // namespace hbs
