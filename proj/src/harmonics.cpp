#include "hbs/harmonics.hpp"

#include "hbs/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>

namespace hbs
{

SparseRationalMatrix mass_matrix(const LevelSpaces& spaces, int j)
{
    const int n = spaces.n();
    if (j < 0 || j > n)
        fail(Errc::BadDegree, "form degree out of range");
    SparseRationalMatrix mass(spaces.form_dim(j), spaces.form_dim(j));
    for (const auto& c : component_list(n, j))
    {
        SparseRationalMatrix block = gram_matrix_1d(spaces.direction(0), c.bits[0]);
        for (int k = 1; k < n; ++k)
            block = block.kron(gram_matrix_1d(spaces.direction(k), c.bits[k]));
        const std::int64_t offset = spaces.component_offset(c);
        for (const auto& [rc, v] : block.entries())
            mass.set(offset + rc.first, offset + rc.second, v);
    }
    return mass;
}

namespace
{

// Columns spanning the kernel of a dense matrix, SVD-based with a relative
// singular value threshold.
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& a, double tolerance)
{
    if (a.rows() == 0 || a.cols() == 0)
        return Eigen::MatrixXd::Identity(a.cols(), a.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? tolerance * sv(0) : 0.0;
    std::int64_t rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff)
        ++rank;
    return svd.matrixV().rightCols(a.cols() - rank);
}

// Streams the columns of D_j P_j into a visitor(row, col, value).
template <class Visitor>
void stream_dp(const DomainHierarchy& h, const HierarchicalBasis& basis, int j, FineExpansion& expansion,
               Visitor&& visit)
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
                    visit(offset + entries[e].first, col, to_double(entries[e].second));
            }
            ++col;
        }
    }
}

// Streams the columns of P_j into a visitor(row, col, value).
template <class Visitor>
void stream_p(const DomainHierarchy& h, const HierarchicalBasis& basis, int j, FineExpansion& expansion,
              Visitor&& visit)
{
    const int n = h.n();
    const LevelSpaces& fine = h.level(h.max_level());
    std::int64_t col = 0;
    for (const auto& c : component_list(n, j))
    {
        const std::int64_t offset = fine.component_offset(c);
        for (const auto& key : basis.components.at(c))
        {
            for (const auto& [row, value] : expansion.fine_column(key))
                visit(offset + row, col, to_double(value));
            ++col;
        }
    }
}

} // namespace

HarmonicSet harmonic_representatives(const DomainHierarchy& h, const HierarchicalBasis& basis, int j,
                                     double tolerance, std::optional<std::int64_t> expected_count)
{
    const int n = h.n();
    if (j < 0 || j > n)
        fail(Errc::BadDegree, "form degree out of range");
    const LevelSpaces& fine = h.level(h.max_level());
    FineExpansion expansion(h);

    const std::int64_t cols_j = basis.form_dim(n, j);

    // Kernel of the composed derivative in hierarchical coefficients. The
    // row sketch preserves kernels: a vector killed by the matrix is killed
    // by any row compression of it, and the dimensions agree.
    Eigen::MatrixXd kernel;
    if (j == n)
        kernel = Eigen::MatrixXd::Identity(cols_j, cols_j);
    else
    {
        RankOptions sketch_options;
        sketch_options.tolerance = tolerance;
        FloatingRankAccumulator acc(fine.form_dim(j + 1), cols_j, sketch_options);
        stream_dp(h, basis, j, expansion, [&](std::int64_t r, std::int64_t c, double v) { acc.add(r, c, v); });
        Eigen::Map<const Eigen::MatrixXd> dense(acc.data().data(), acc.sketch_rows(), cols_j);
        kernel = kernel_basis(dense, tolerance);
    }

    HarmonicSet out;
    out.j = j;
    if (kernel.cols() == 0)
    {
        if (expected_count.has_value() && *expected_count != 0)
            fail(Errc::DimensionMismatch, "no harmonic candidates where some were expected");
        return out;
    }

    // fine_kernel = P_j * kernel.
    Eigen::MatrixXd fine_kernel = Eigen::MatrixXd::Zero(fine.form_dim(j), kernel.cols());
    stream_p(h, basis, j, expansion,
             [&](std::int64_t r, std::int64_t c, double v) { fine_kernel.row(r) += v * kernel.row(c); });

    const SparseRationalMatrix mass = mass_matrix(fine, j);

    Eigen::MatrixXd harmonic_coeffs;
    if (j == 0)
        harmonic_coeffs = kernel;
    else
    {
        // Orthogonality to coboundaries: (D_{j-1} P_{j-1})^T M fine_kernel.
        Eigen::MatrixXd weighted = Eigen::MatrixXd::Zero(fine.form_dim(j), kernel.cols());
        for (const auto& [rc, v] : mass.entries())
            weighted.row(rc.first) += to_double(v) * fine_kernel.row(rc.second);
        Eigen::MatrixXd constraints = Eigen::MatrixXd::Zero(basis.form_dim(n, j - 1), kernel.cols());
        stream_dp(h, basis, j - 1, expansion,
                  [&](std::int64_t r, std::int64_t c, double v) { constraints.row(c) += v * weighted.row(r); });
        harmonic_coeffs = kernel * kernel_basis(constraints, tolerance);
    }

    if (expected_count.has_value() && harmonic_coeffs.cols() != *expected_count)
        fail(Errc::DimensionMismatch, "harmonic count " + std::to_string(harmonic_coeffs.cols())
                                          + " != expected " + std::to_string(*expected_count));

    // Push to fine coefficients, normalize in the mass norm, fix signs.
    for (std::int64_t v = 0; v < harmonic_coeffs.cols(); ++v)
    {
        Eigen::VectorXd fine_coeffs = Eigen::VectorXd::Zero(fine.form_dim(j));
        {
            const Eigen::VectorXd coeffs = harmonic_coeffs.col(v);
            std::int64_t col = 0;
            for (const auto& c : component_list(n, j))
            {
                const std::int64_t offset = fine.component_offset(c);
                for (const auto& key : basis.components.at(c))
                {
                    if (coeffs(col) != 0.0)
                        for (const auto& [row, value] : expansion.fine_column(key))
                            fine_coeffs(offset + row) += to_double(value) * coeffs(col);
                    ++col;
                }
            }
        }
        double norm_sq = 0;
        for (const auto& [rc, mv] : mass.entries())
            norm_sq += fine_coeffs(rc.first) * to_double(mv) * fine_coeffs(rc.second);
        if (norm_sq > 0)
            fine_coeffs /= std::sqrt(norm_sq);
        std::int64_t argmax = 0;
        for (std::int64_t i = 1; i < fine_coeffs.size(); ++i)
            if (std::abs(fine_coeffs(i)) > std::abs(fine_coeffs(argmax)))
                argmax = i;
        if (fine_coeffs(argmax) < 0)
            fine_coeffs = -fine_coeffs;
        out.representatives.emplace_back(fine_coeffs.data(), fine_coeffs.data() + fine_coeffs.size());
    }
    return out;
}

std::vector<std::vector<double>> sample_field(const LevelSpaces& spaces,
                                              const std::vector<double>& coefficients, int j,
                                              int resolution)
{
    const int n = spaces.n();
    if (j < 0 || j > n)
        fail(Errc::BadDegree, "form degree out of range");
    if (static_cast<std::int64_t>(coefficients.size()) != spaces.form_dim(j))
        fail(Errc::ShapeMismatch, "coefficient vector does not match the j-form space");
    if (resolution < 2)
        fail(Errc::ShapeMismatch, "resolution must be at least 2");

    std::vector<std::vector<double>> out;
    for (const auto& c : component_list(n, j))
    {
        // Per-direction value tables: tables[k](g, i) = B_i(x_g).
        std::vector<Eigen::MatrixXd> tables(n);
        for (int k = 0; k < n; ++k)
        {
            const int dim = spaces.direction(k).dimension(c.bits[k]);
            tables[k] = Eigen::MatrixXd::Zero(resolution, dim);
            for (int g = 0; g < resolution; ++g)
            {
                const double x = static_cast<double>(g) / (resolution - 1);
                for (int i = 1; i <= dim; ++i)
                    tables[k](g, i - 1) = eval_basis(spaces.direction(k), c.bits[k], i, x);
            }
        }

        // Contract the coefficient tensor one direction at a time.
        const std::int64_t offset = spaces.component_offset(c);
        std::vector<double> current(coefficients.begin() + offset,
                                    coefficients.begin() + offset + spaces.component_dim(c));
        std::int64_t lead = 1;
        std::int64_t trail = spaces.component_dim(c);
        for (int k = 0; k < n; ++k)
        {
            const int dim = spaces.direction(k).dimension(c.bits[k]);
            trail /= dim;
            std::vector<double> next(lead * resolution * trail, 0.0);
            for (std::int64_t a = 0; a < lead; ++a)
                for (int g = 0; g < resolution; ++g)
                    for (int i = 0; i < dim; ++i)
                    {
                        const double w = tables[k](g, i);
                        if (w == 0.0)
                            continue;
                        const double* src = current.data() + (a * dim + i) * trail;
                        double* dst = next.data() + (a * resolution + g) * trail;
                        for (std::int64_t t = 0; t < trail; ++t)
                            dst[t] += w * src[t];
                    }
            current = std::move(next);
            lead *= resolution;
        }
        out.push_back(std::move(current));
    }
    return out;
}

} // namespace hbs
