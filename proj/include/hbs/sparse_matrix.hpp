#pragma once

#include "hbs/error.hpp"
#include "hbs/rational.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace hbs
{

/// Sparse matrix with ordered (row, col) -> value storage and no stored
/// zeros. Used with Rational entries for all structural operators and with
/// double entries by the floating rank backend.
template <class T>
class SparseMatrix
{
    public:
    using Index = std::int64_t;
    using EntryMap = std::map<std::pair<Index, Index>, T>;

    SparseMatrix() : rows_(0), cols_(0) {}
    SparseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols) {}

    static SparseMatrix identity(Index dim)
    {
        SparseMatrix m(dim, dim);
        for (Index i = 0; i < dim; ++i)
            m.entries_.emplace(std::make_pair(i, i), T(1));
        return m;
    }

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    Index nnz() const { return static_cast<Index>(entries_.size()); }
    const EntryMap& entries() const { return entries_; }

    void set(Index r, Index c, const T& v)
    {
        check_index(r, c);
        if (v == T(0))
            entries_.erase({r, c});
        else
            entries_[{r, c}] = v;
    }

    void add(Index r, Index c, const T& v)
    {
        check_index(r, c);
        auto it = entries_.find({r, c});
        if (it == entries_.end())
        {
            if (v != T(0))
                entries_.emplace(std::make_pair(r, c), v);
            return;
        }
        it->second += v;
        if (it->second == T(0))
            entries_.erase(it);
    }

    T get(Index r, Index c) const
    {
        check_index(r, c);
        auto it = entries_.find({r, c});
        return it == entries_.end() ? T(0) : it->second;
    }

    bool operator==(const SparseMatrix& other) const
    {
        return rows_ == other.rows_ && cols_ == other.cols_ && entries_ == other.entries_;
    }

    bool is_zero() const { return entries_.empty(); }

    SparseMatrix operator*(const SparseMatrix& rhs) const
    {
        if (cols_ != rhs.rows_)
            fail(Errc::ShapeMismatch, "matrix product shape mismatch");
        // rhs grouped by row for the inner loop
        std::vector<std::vector<std::pair<Index, T>>> rhs_rows(rhs.rows_);
        for (const auto& [rc, v] : rhs.entries_)
            rhs_rows[rc.first].emplace_back(rc.second, v);
        SparseMatrix out(rows_, rhs.cols_);
        for (const auto& [rc, v] : entries_)
            for (const auto& [c2, v2] : rhs_rows[rc.second])
                out.add(rc.first, c2, v * v2);
        return out;
    }

    SparseMatrix operator-(const SparseMatrix& rhs) const
    {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            fail(Errc::ShapeMismatch, "matrix difference shape mismatch");
        SparseMatrix out = *this;
        for (const auto& [rc, v] : rhs.entries_)
            out.add(rc.first, rc.second, -v);
        return out;
    }

    SparseMatrix scaled(const T& s) const
    {
        SparseMatrix out(rows_, cols_);
        if (s == T(0))
            return out;
        for (const auto& [rc, v] : entries_)
            out.entries_.emplace(rc, v * s);
        return out;
    }

    /// Kronecker product; row/col of the right factor vary fastest.
    SparseMatrix kron(const SparseMatrix& rhs) const
    {
        SparseMatrix out(rows_ * rhs.rows_, cols_ * rhs.cols_);
        for (const auto& [rc, v] : entries_)
            for (const auto& [rc2, v2] : rhs.entries_)
                out.entries_.emplace(
                    std::make_pair(rc.first * rhs.rows_ + rc2.first, rc.second * rhs.cols_ + rc2.second),
                    v * v2);
        return out;
    }

    std::vector<T> apply(const std::vector<T>& x) const
    {
        if (static_cast<Index>(x.size()) != cols_)
            fail(Errc::ShapeMismatch, "matrix-vector shape mismatch");
        std::vector<T> y(rows_, T(0));
        for (const auto& [rc, v] : entries_)
            y[rc.first] += v * x[rc.second];
        return y;
    }

    template <class U>
    SparseMatrix<U> cast() const
    {
        SparseMatrix<U> out(rows_, cols_);
        for (const auto& [rc, v] : entries_)
            out.set(rc.first, rc.second, static_cast<U>(v));
        return out;
    }

    private:
    void check_index(Index r, Index c) const
    {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
            fail(Errc::IndexOutOfRange, "sparse matrix index out of range");
    }

    Index rows_;
    Index cols_;
    EntryMap entries_;
};

using SparseRationalMatrix = SparseMatrix<Rational>;

template <>
template <>
inline SparseMatrix<double> SparseMatrix<Rational>::cast<double>() const
{
    SparseMatrix<double> out(rows_, cols_);
    for (const auto& [rc, v] : entries_)
        out.set(rc.first, rc.second, to_double(v));
    return out;
}

} // namespace hbs
