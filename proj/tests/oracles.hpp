#pragma once

// Test-only oracles, independent of the library's evaluation and search
// paths. Nothing here may call the code under test except for plain data
// accessors (knots, degrees, dimensions).

#include "hbs/hierarchy.hpp"
#include "hbs/knot_vector.hpp"
#include "hbs/rational.hpp"

#include <map>
#include <random>
#include <vector>

namespace oracles
{

using hbs::KnotVector;
using hbs::Rational;

// (t - x)_+^e with the right-continuous convention (value 0 at t == x for
// e == 0).
inline Rational truncated_power(const Rational& t, const Rational& x, int e)
{
    if (t <= x)
        return Rational(0);
    Rational out(1);
    for (int i = 0; i < e; ++i)
        out *= (t - x);
    return out;
}

inline Rational binomial(int n, int k)
{
    Rational out(1);
    for (int i = 0; i < k; ++i)
        out = out * Rational(n - i) / Rational(i + 1);
    return out;
}

// Divided difference of t -> (t - x)_+^d over knots[a..b], with the Hermite
// convention for repeated knots: f^{(k)}(t)/k! = C(d,k) (t - x)_+^{d-k}.
inline Rational divided_difference(const std::vector<Rational>& knots, int a, int b, const Rational& x, int d)
{
    if (knots[a] == knots[b])
    {
        const int k = b - a;
        if (k > d)
            return Rational(0);
        return binomial(d, k) * truncated_power(knots[a], x, d - k);
    }
    return (divided_difference(knots, a + 1, b, x, d) - divided_difference(knots, a, b - 1, x, d))
           / (knots[b] - knots[a]);
}

// Curry-Schoenberg form of the i-th basis function of S^j: the divided
// difference of the truncated power over the local knots, scaled by the
// local knot span.
inline Rational eval_basis_truncated_power(const KnotVector& kv, int j, int i, const Rational& x)
{
    const std::vector<Rational> local = kv.local_knots(j, i);
    const int d = kv.degree() - j;
    const int last = static_cast<int>(local.size()) - 1;
    if (local[0] == local[last])
        return Rational(0);
    return (local[last] - local[0]) * divided_difference(local, 0, last, x, d);
}

// Random open knot vector of the given degree with `cells` unique interior
// spans on a grid of the given denominator; occasional repeated knots up to
// multiplicity `max_mult`.
inline KnotVector random_knot_vector(std::mt19937_64& rng, int degree, int cells, int max_mult = 1)
{
    const int denom = 4 * (cells + 2);
    std::vector<int> cuts;
    std::uniform_int_distribution<int> pick(1, denom - 1);
    while (static_cast<int>(cuts.size()) < cells - 1)
    {
        int c = pick(rng);
        bool fresh = true;
        for (int u : cuts)
            fresh = fresh && u != c;
        if (fresh)
            cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<Rational> knots;
    for (int i = 0; i < degree; ++i)
        knots.emplace_back(0);
    std::uniform_int_distribution<int> mult(1, max_mult);
    for (int c : cuts)
    {
        const int m = std::min(mult(rng), degree);
        for (int i = 0; i < m; ++i)
            knots.emplace_back(Rational(c, denom));
    }
    for (int i = 0; i < degree; ++i)
        knots.emplace_back(1);
    return KnotVector::validate(std::move(knots), degree);
}

// Random nested hierarchy with Assumption-2-compliant refinements driven by
// random 0-form index sets chosen among the functions supported on the
// previous refinement domain; containment holds by construction. Refinement
// is dyadic, degrees differ per direction.
inline hbs::DomainHierarchy random_hierarchy(std::mt19937_64& rng, int n, int levels, int max_degree = 4,
                                             int base_cells = 4, double pick_probability = 0.25)
{
    std::vector<hbs::KnotVector> base;
    for (int k = 0; k < n; ++k)
    {
        const int degree = 1 + static_cast<int>(rng() % max_degree);
        base.push_back(random_knot_vector(rng, degree, base_cells, 1));
    }
    std::vector<hbs::LevelSpaces> spaces;
    spaces.emplace_back(0, base);
    for (int l = 1; l < levels; ++l)
    {
        std::vector<hbs::KnotVector> next;
        for (int k = 0; k < n; ++k)
            next.push_back(hbs::dyadic_refinement(spaces.back().direction(k)));
        spaces.emplace_back(l, next);
    }

    const hbs::FormComponent zero{std::vector<int>(n, 0)};
    std::uniform_real_distribution<double> coin(0, 1);
    std::vector<hbs::RefinementInput> inputs;
    for (int l = 0; l < levels - 1; ++l)
    {
        const hbs::DomainHierarchy partial = hbs::DomainHierarchy::build(
            std::vector<hbs::LevelSpaces>(spaces.begin(), spaces.begin() + l + 1), inputs);
        hbs::RefinementInput input;
        for (const auto& idx : partial.basis_on(l, zero, partial.omega(l)))
            if (coin(rng) < pick_probability)
                input.zero_forms.push_back(idx);
        inputs.push_back(std::move(input));
    }
    return hbs::DomainHierarchy::build(spaces, inputs);
}

// Random rational point in [0,1] avoiding the given knot values.
inline Rational random_point_off_knots(std::mt19937_64& rng, const std::vector<Rational>& knots)
{
    std::uniform_int_distribution<long> num(0, 1 << 20);
    for (;;)
    {
        Rational x(num(rng), 1 << 20);
        bool hit = false;
        for (const Rational& k : knots)
            hit = hit || k == x;
        if (!hit)
            return x;
    }
}

} // namespace oracles
