#include "hbs/tensor_forms.hpp"

#include "hbs/error.hpp"

namespace hbs
{

int FormComponent::order() const
{
    int sum = 0;
    for (int b : bits)
        sum += b;
    return sum;
}

std::vector<FormComponent> component_list(int n, int j)
{
    if (j < 0 || j > n)
        fail(Errc::BadDegree, "form degree out of range");
    std::vector<FormComponent> out;
    std::vector<int> bits(n, 0);
    auto recurse = [&](auto&& self, int pos, int remaining) -> void {
        if (remaining == 0)
        {
            out.push_back(FormComponent{bits});
            return;
        }
        if (pos >= n || n - pos < remaining)
            return;
        bits[pos] = 1;
        self(self, pos + 1, remaining - 1);
        bits[pos] = 0;
        self(self, pos + 1, remaining);
    };
    recurse(recurse, 0, j);
    return out;
}

Box Box::empty_box(int n)
{
    Box b;
    b.intervals.assign(n, Interval{Rational(0), Rational(0)});
    b.empty = true;
    return b;
}

LevelSpaces::LevelSpaces(int level, std::vector<KnotVector> knot_vectors)
    : level_(level), kv_(std::move(knot_vectors))
{
    if (kv_.empty())
        fail(Errc::ConfigError, "at least one direction required");
    greville_.reserve(kv_.size());
    for (const auto& kv : kv_)
        greville_.push_back(kv.greville_mesh());
}

const KnotVector& LevelSpaces::direction(int k) const
{
    if (k < 0 || k >= n())
        fail(Errc::IndexOutOfRange, "direction out of range");
    return kv_[k];
}

std::int64_t LevelSpaces::component_dim(const FormComponent& c) const
{
    std::int64_t dim = 1;
    for (int k = 0; k < n(); ++k)
        dim *= kv_[k].dimension(c.bits[k]);
    return dim;
}

std::int64_t LevelSpaces::form_dim(int j) const
{
    std::int64_t dim = 0;
    for (const auto& c : component_list(n(), j))
        dim += component_dim(c);
    return dim;
}

std::int64_t LevelSpaces::flatten(const FormComponent& c, const MultiIndex& idx) const
{
    if (!valid_index(c, idx))
        fail(Errc::IndexOutOfRange, "multi-index out of range");
    std::int64_t flat = 0;
    for (int k = 0; k < n(); ++k)
        flat = flat * kv_[k].dimension(c.bits[k]) + (idx[k] - 1);
    return flat;
}

MultiIndex LevelSpaces::unflatten(const FormComponent& c, std::int64_t flat) const
{
    MultiIndex idx(n());
    for (int k = n() - 1; k >= 0; --k)
    {
        const int dim = kv_[k].dimension(c.bits[k]);
        idx[k] = static_cast<int>(flat % dim) + 1;
        flat /= dim;
    }
    return idx;
}

std::int64_t LevelSpaces::component_offset(const FormComponent& c) const
{
    std::int64_t offset = 0;
    for (const auto& other : component_list(n(), c.order()))
    {
        if (other == c)
            return offset;
        offset += component_dim(other);
    }
    fail(Errc::BadDegree, "component not found");
}

bool LevelSpaces::valid_index(const FormComponent& c, const MultiIndex& idx) const
{
    if (static_cast<int>(idx.size()) != n() || c.n() != n())
        return false;
    for (int k = 0; k < n(); ++k)
        if (idx[k] < 1 || idx[k] > kv_[k].dimension(c.bits[k]))
            return false;
    return true;
}

Box LevelSpaces::tp_support(const FormComponent& c, const MultiIndex& idx) const
{
    if (!valid_index(c, idx))
        fail(Errc::IndexOutOfRange, "multi-index out of range");
    Box box;
    for (int k = 0; k < n(); ++k)
        box.intervals.push_back(kv_[k].support(c.bits[k], idx[k]));
    return box;
}

Box LevelSpaces::tp_greville_entity(const FormComponent& c, const MultiIndex& idx) const
{
    if (!valid_index(c, idx))
        fail(Errc::IndexOutOfRange, "multi-index out of range");
    Box box;
    for (int k = 0; k < n(); ++k)
    {
        if (c.bits[k] == 0)
        {
            const Rational& gamma = greville_[k].point(idx[k]);
            box.intervals.push_back(Interval{gamma, gamma});
        }
        else
            box.intervals.push_back(greville_[k].edge(idx[k]));
    }
    return box;
}

std::vector<Box> LevelSpaces::bezier_mesh() const
{
    std::vector<Box> cells;
    MultiIndex c(n(), 1);
    for (;;)
    {
        Box box;
        for (int k = 0; k < n(); ++k)
            box.intervals.push_back(kv_[k].cell(c[k]));
        cells.push_back(std::move(box));
        int k = n() - 1;
        while (k >= 0)
        {
            if (++c[k] <= kv_[k].num_cells())
                break;
            c[k] = 1;
            --k;
        }
        if (k < 0)
            break;
    }
    return cells;
}

std::int64_t LevelSpaces::num_cells() const
{
    std::int64_t count = 1;
    for (int k = 0; k < n(); ++k)
        count *= kv_[k].num_cells();
    return count;
}

SparseRationalMatrix exterior_derivative_matrix(const LevelSpaces& spaces, int j)
{
    const int n = spaces.n();
    if (j < 0 || j > n - 1)
        fail(Errc::BadDegree, "exterior derivative degree out of range");

    SparseRationalMatrix d(spaces.form_dim(j + 1), spaces.form_dim(j));
    for (const auto& c : component_list(n, j))
    {
        const std::int64_t col_offset = spaces.component_offset(c);
        for (int k = 0; k < n; ++k)
        {
            if (c.bits[k] == 1)
                continue;
            FormComponent target = c;
            target.bits[k] = 1;
            const std::int64_t row_offset = spaces.component_offset(target);
            int sign = 1;
            for (int l = 0; l < k; ++l)
                if (c.bits[l] == 1)
                    sign = -sign;

            // sign * (I x ... x D_k x ... x I), assembled entry-wise.
            const SparseRationalMatrix dk = derivative_matrix_1d(spaces.direction(k));
            const std::int64_t cols = spaces.component_dim(c);
            for (std::int64_t flat = 0; flat < cols; ++flat)
            {
                const MultiIndex idx = spaces.unflatten(c, flat);
                MultiIndex target_idx = idx;
                for (const auto& [rc, v] : dk.entries())
                {
                    if (rc.second != idx[k] - 1)
                        continue;
                    target_idx[k] = static_cast<int>(rc.first) + 1;
                    d.add(row_offset + spaces.flatten(target, target_idx), col_offset + flat,
                          sign > 0 ? v : -v);
                }
            }
        }
    }
    return d;
}

SparseRationalMatrix prolongation_matrix(const LevelSpaces& coarse, const LevelSpaces& fine,
                                         const FormComponent& c)
{
    if (coarse.n() != fine.n() || c.n() != coarse.n())
        fail(Errc::ShapeMismatch, "dimension mismatch between levels");
    SparseRationalMatrix out = insertion_matrix_1d(coarse.direction(0), fine.direction(0), c.bits[0]);
    for (int k = 1; k < coarse.n(); ++k)
        out = out.kron(insertion_matrix_1d(coarse.direction(k), fine.direction(k), c.bits[k]));
    return out;
}

} // namespace hbs
