#include "hbs/knot_vector.hpp"

#include "hbs/error.hpp"

#include <algorithm>
#include <cstddef>

namespace hbs
{

namespace
{

template <class Scalar>
Scalar to_scalar(const Rational& v)
{
    return static_cast<Scalar>(v);
}

template <>
double to_scalar<double>(const Rational& v)
{
    return to_double(v);
}

// Cox-de Boor recursion over an explicit local knot list, scalar-generic.
// Base-case spans are half-open except the span ending at the domain's
// right endpoint, which is right-closed.
template <class Scalar>
Scalar cox_de_boor(const std::vector<Rational>& t, int lo, int deg, const Scalar& x, const Rational& domain_end)
{
    if (deg == 0)
    {
        const Scalar a = to_scalar<Scalar>(t[lo]);
        const Scalar b = to_scalar<Scalar>(t[lo + 1]);
        if (a <= x && x < b)
            return Scalar(1);
        if (x == to_scalar<Scalar>(domain_end) && b == x && a < b)
            return Scalar(1);
        return Scalar(0);
    }
    Scalar value(0);
    const Scalar ta = to_scalar<Scalar>(t[lo]);
    const Scalar tb = to_scalar<Scalar>(t[lo + deg]);
    if (tb > ta)
        value += (x - ta) / (tb - ta) * cox_de_boor(t, lo, deg - 1, x, domain_end);
    const Scalar ua = to_scalar<Scalar>(t[lo + 1]);
    const Scalar ub = to_scalar<Scalar>(t[lo + deg + 1]);
    if (ub > ua)
        value += (ub - x) / (ub - ua) * cox_de_boor(t, lo + 1, deg - 1, x, domain_end);
    return value;
}

template <class Scalar>
Scalar eval_basis_impl(const KnotVector& kv, int j, int i, const Scalar& x)
{
    if (j != 0 && j != 1)
        fail(Errc::BadDegree, "form exponent must be 0 or 1");
    if (i < 1 || i > kv.dimension(j))
        fail(Errc::IndexOutOfRange, "basis index out of range");
    if (x < Scalar(0) || x > Scalar(1))
        fail(Errc::OutOfDomain, "evaluation point outside [0,1]");
    const std::vector<Rational> local = kv.local_knots(j, i);
    return cox_de_boor<Scalar>(local, 0, kv.degree() - j, x, Rational(1));
}

int multiplicity_run(const std::vector<Rational>& knots, std::size_t start)
{
    std::size_t end = start;
    while (end < knots.size() && knots[end] == knots[start])
        ++end;
    return static_cast<int>(end - start);
}

} // namespace

Interval GrevilleMesh1D::edge(int i) const
{
    if (i < 1 || i > num_edges())
        fail(Errc::IndexOutOfRange, "Greville edge index out of range");
    return Interval{points[i - 1], points[i]};
}

const Rational& GrevilleMesh1D::point(int i) const
{
    if (i < 0 || i >= static_cast<int>(points.size()))
        fail(Errc::IndexOutOfRange, "Greville point index out of range");
    return points[i];
}

KnotVector::KnotVector(std::vector<Rational> knots, int degree)
    : degree_(degree), knots_(std::move(knots))
{
    unique_.push_back(knots_.front());
    for (const Rational& k : knots_)
        if (k != unique_.back())
            unique_.push_back(k);
}

KnotVector KnotVector::validate(std::vector<Rational> knots, int degree)
{
    if (degree < 1)
        fail(Errc::BadDegree, "degree must be at least 1");
    if (!std::is_sorted(knots.begin(), knots.end()))
        fail(Errc::NotSorted, "knots must be non-decreasing");
    if (knots.empty() || knots.front() != 0 || knots.back() != 1)
        fail(Errc::BadRange, "knot vector must start at 0 and end at 1");
    const int lead = multiplicity_run(knots, 0);
    if (lead != degree)
        fail(Errc::NotOpen, "leading knot multiplicity " + std::to_string(lead) + " != degree");
    int trail = 0;
    for (auto it = knots.rbegin(); it != knots.rend() && *it == 1; ++it)
        ++trail;
    if (trail != degree)
        fail(Errc::NotOpen, "trailing knot multiplicity " + std::to_string(trail) + " != degree");
    for (std::size_t s = degree; s + degree < knots.size();)
    {
        const int mult = multiplicity_run(knots, s);
        if (mult > degree)
            fail(Errc::ExcessMultiplicity,
                 "interior knot " + to_string(knots[s]) + " has multiplicity " + std::to_string(mult));
        s += mult;
    }
    const int m = static_cast<int>(knots.size()) - degree - 1;
    if (m < 1)
        fail(Errc::BadRange, "knot vector too short (m < 1)");
    return KnotVector(std::move(knots), degree);
}

KnotVector KnotVector::uniform(int degree, int cells)
{
    if (cells < 1)
        fail(Errc::BadRange, "at least one cell required");
    std::vector<Rational> knots;
    for (int i = 0; i < degree; ++i)
        knots.emplace_back(0);
    for (int c = 1; c < cells; ++c)
        knots.emplace_back(Rational(c, cells));
    for (int i = 0; i < degree; ++i)
        knots.emplace_back(1);
    return validate(std::move(knots), degree);
}

int KnotVector::dimension(int j) const
{
    if (j != 0 && j != 1)
        fail(Errc::BadDegree, "form exponent must be 0 or 1");
    return num_basis() + j;
}

const Rational& KnotVector::knot(int i) const
{
    if (i < 1 || i > static_cast<int>(knots_.size()))
        fail(Errc::IndexOutOfRange, "knot index out of range");
    return knots_[i - 1];
}

std::vector<Rational> KnotVector::local_knots(int j, int i) const
{
    if (j != 0 && j != 1)
        fail(Errc::BadDegree, "form exponent must be 0 or 1");
    if (i < 1 || i > dimension(j))
        fail(Errc::IndexOutOfRange, "basis index out of range");
    // (xi_i, ..., xi_{i+p-j+1})
    return {knots_.begin() + (i - 1), knots_.begin() + (i + degree_ - j + 1)};
}

Interval KnotVector::support(int j, int i) const
{
    const std::vector<Rational> local = local_knots(j, i);
    return Interval{local.front(), local.back()};
}

std::pair<int, int> KnotVector::support_cells(int j, int i) const
{
    const Interval s = support(j, i);
    const auto lo = std::lower_bound(unique_.begin(), unique_.end(), s.lo) - unique_.begin();
    const auto hi = std::lower_bound(unique_.begin(), unique_.end(), s.hi) - unique_.begin();
    return {static_cast<int>(lo) + 1, static_cast<int>(hi)};
}

GrevilleMesh1D KnotVector::greville_mesh() const
{
    GrevilleMesh1D mesh;
    const int m = num_basis();
    mesh.points.reserve(m + 2);
    mesh.points.emplace_back(0);
    for (int i = 1; i <= m; ++i)
    {
        Rational sum(0);
        for (int r = i + 1; r <= i + degree_; ++r)
            sum += knot(r);
        mesh.points.push_back(sum / degree_);
    }
    mesh.points.emplace_back(1);
    for (std::size_t i = 1; i < mesh.points.size(); ++i)
        if (!(mesh.points[i - 1] < mesh.points[i]))
            fail(Errc::BadRange, "Greville points not strictly increasing");
    return mesh;
}

Interval KnotVector::cell(int c) const
{
    if (c < 1 || c > num_cells())
        fail(Errc::IndexOutOfRange, "cell index out of range");
    return Interval{unique_[c - 1], unique_[c]};
}

double eval_basis(const KnotVector& kv, int j, int i, double x)
{
    return eval_basis_impl<double>(kv, j, i, x);
}

Rational eval_basis_exact(const KnotVector& kv, int j, int i, const Rational& x)
{
    return eval_basis_impl<Rational>(kv, j, i, x);
}

SparseRationalMatrix derivative_matrix_1d(const KnotVector& kv)
{
    const int p = kv.degree();
    const int m = kv.num_basis();
    SparseRationalMatrix d(m + 1, m);
    for (int r = 1; r <= m + 1; ++r)
    {
        const Rational width = kv.knot(r + p) - kv.knot(r);
        const Rational factor = Rational(p) / width;
        if (r <= m)
            d.add(r - 1, r - 1, factor);
        if (r >= 2)
            d.add(r - 1, r - 2, -factor);
    }
    return d;
}

bool is_nested(const KnotVector& coarse, const KnotVector& fine)
{
    if (coarse.degree() != fine.degree())
        fail(Errc::DegreeMismatch, "nestedness requires equal degrees");
    const auto& a = coarse.knots();
    const auto& b = fine.knots();
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size())
    {
        if (b[ib] < a[ia])
            ++ib;
        else if (b[ib] == a[ia])
        {
            ++ia;
            ++ib;
        }
        else
            return false;
    }
    return ia == a.size();
}

SparseRationalMatrix insertion_matrix_1d(const KnotVector& coarse, const KnotVector& fine, int j)
{
    if (j != 0 && j != 1)
        fail(Errc::BadDegree, "form exponent must be 0 or 1");
    if (!is_nested(coarse, fine))
        fail(Errc::NotNested, "fine knot vector does not refine the coarse one");
    const int d = coarse.degree() - j;

    // Values to insert: multiset difference fine \ coarse, ascending.
    std::vector<Rational> to_insert;
    {
        const auto& a = coarse.knots();
        const auto& b = fine.knots();
        std::size_t ia = 0;
        for (const Rational& v : b)
        {
            if (ia < a.size() && a[ia] == v)
                ++ia;
            else
                to_insert.push_back(v);
        }
    }

    std::vector<Rational> t = coarse.knots();
    SparseRationalMatrix matrix = SparseRationalMatrix::identity(coarse.dimension(j));
    for (const Rational& x : to_insert)
    {
        // Boehm single insertion for degree-d splines on the running list t.
        const int nb = static_cast<int>(t.size()) - d - 1; // current basis count
        const int k = static_cast<int>(std::upper_bound(t.begin(), t.end(), x) - t.begin()); // 1-based span
        SparseRationalMatrix step(nb + 1, nb);
        for (int i = 1; i <= nb + 1; ++i)
        {
            if (i <= k - d)
                step.set(i - 1, i - 1, Rational(1));
            else if (i > k)
                step.set(i - 1, i - 2, Rational(1));
            else
            {
                // Coefficients outside the boundary-condition basis are zero.
                const Rational alpha = (x - t[i - 1]) / (t[i + d - 1] - t[i - 1]);
                if (i <= nb)
                    step.set(i - 1, i - 1, alpha);
                if (i >= 2)
                    step.set(i - 1, i - 2, Rational(1) - alpha);
            }
        }
        matrix = step * matrix;
        t.insert(t.begin() + k, x);
    }
    return matrix;
}

KnotVector dyadic_refinement(const KnotVector& kv)
{
    std::vector<Rational> knots;
    const auto& old_knots = kv.knots();
    for (std::size_t i = 0; i < old_knots.size(); ++i)
    {
        knots.push_back(old_knots[i]);
        if (i + 1 < old_knots.size() && old_knots[i] < old_knots[i + 1])
            knots.push_back((old_knots[i] + old_knots[i + 1]) / 2);
    }
    std::sort(knots.begin(), knots.end());
    return KnotVector::validate(std::move(knots), kv.degree());
}

KnotVector reflect(const KnotVector& kv)
{
    std::vector<Rational> knots;
    const auto& old_knots = kv.knots();
    for (auto it = old_knots.rbegin(); it != old_knots.rend(); ++it)
        knots.push_back(Rational(1) - *it);
    return KnotVector::validate(std::move(knots), kv.degree());
}

std::vector<Rational> eval_all_on_cell(const KnotVector& kv, int j, int cell, const Rational& x)
{
    const Interval span = kv.cell(cell);
    const int dim = kv.dimension(j);
    const int deg = kv.degree() - j;
    std::vector<Rational> values(dim, Rational(0));
    const auto& t = kv.knots();

    // Polynomial restriction to the cell: the degree-0 base case selects the
    // knot span containing the cell instead of testing x, so endpoint
    // evaluations give one-sided limits from inside the cell.
    auto piece = [&](int lo, auto&& self, int d) -> Rational {
        if (d == 0)
            return (t[lo] <= span.lo && span.hi <= t[lo + 1]) ? Rational(1) : Rational(0);
        Rational value(0);
        if (t[lo + d] > t[lo])
        {
            const Rational left = self(lo, self, d - 1);
            if (left != 0)
                value += (x - t[lo]) / (t[lo + d] - t[lo]) * left;
        }
        if (t[lo + d + 1] > t[lo + 1])
        {
            const Rational right = self(lo + 1, self, d - 1);
            if (right != 0)
                value += (t[lo + d + 1] - x) / (t[lo + d + 1] - t[lo + 1]) * right;
        }
        return value;
    };

    for (int i = 1; i <= dim; ++i)
    {
        const auto [c0, c1] = kv.support_cells(j, i);
        if (cell < c0 || cell > c1)
            continue;
        values[i - 1] = piece(i - 1, piece, deg);
    }
    return values;
}

namespace
{

// Exact quadrature weights on [0,1] for equally spaced nodes t/(q-1),
// integrating polynomials of degree <= q-1 exactly.
std::vector<Rational> newton_cotes_weights(int q)
{
    std::vector<Rational> weights(q);
    for (int t = 0; t < q; ++t)
    {
        // Integrate the Lagrange basis polynomial for node t.
        std::vector<Rational> poly{Rational(1)}; // coefficients, low order first
        Rational denom(1);
        const Rational xt(t, q - 1);
        for (int s = 0; s < q; ++s)
        {
            if (s == t)
                continue;
            const Rational xs(s, q - 1);
            std::vector<Rational> next(poly.size() + 1, Rational(0));
            for (std::size_t c = 0; c < poly.size(); ++c)
            {
                next[c] += poly[c] * (-xs);
                next[c + 1] += poly[c];
            }
            poly = std::move(next);
            denom *= (xt - xs);
        }
        Rational integral(0);
        for (std::size_t c = 0; c < poly.size(); ++c)
            integral += poly[c] / Rational(static_cast<int>(c) + 1);
        weights[t] = integral / denom;
    }
    return weights;
}

} // namespace

SparseRationalMatrix gram_matrix_1d(const KnotVector& kv, int j)
{
    if (j != 0 && j != 1)
        fail(Errc::BadDegree, "form exponent must be 0 or 1");
    const int deg = kv.degree() - j;
    const int dim = kv.dimension(j);
    const int q = 2 * deg + 2; // exact for the degree-2*deg integrand
    static thread_local std::map<int, std::vector<Rational>> weight_cache;
    auto cache_it = weight_cache.find(q);
    if (cache_it == weight_cache.end())
        cache_it = weight_cache.emplace(q, newton_cotes_weights(q)).first;
    const std::vector<Rational>& ref_weights = cache_it->second;

    SparseRationalMatrix gram(dim, dim);
    for (int c = 1; c <= kv.num_cells(); ++c)
    {
        const Interval span = kv.cell(c);
        const Rational width = span.hi - span.lo;
        for (int tnode = 0; tnode < q; ++tnode)
        {
            const Rational x = span.lo + width * Rational(tnode, q - 1);
            const std::vector<Rational> vals = eval_all_on_cell(kv, j, c, x);
            const Rational w = width * ref_weights[tnode];
            for (int a = 0; a < dim; ++a)
            {
                if (vals[a] == 0)
                    continue;
                for (int b = a; b < dim; ++b)
                {
                    if (vals[b] == 0)
                        continue;
                    const Rational contrib = w * vals[a] * vals[b];
                    gram.add(a, b, contrib);
                    if (b != a)
                        gram.add(b, a, contrib);
                }
            }
        }
    }
    return gram;
}

} // namespace hbs
