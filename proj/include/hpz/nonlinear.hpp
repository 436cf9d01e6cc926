#ifndef HPZ_NONLINEAR_HPP_
#define HPZ_NONLINEAR_HPP_

/**
 * @file nonlinear.hpp
 * @brief Exact image of a hybrid polynomial zonotope under a quadratic-affine map.
 *
 * Output r of the map is x^T Q_r x + (A x)_r + d_r. Binary factors are removed by
 * enumerating leaves; each leaf's image is expanded monomial by monomial and the
 * images are re-united.
 */

#include <cstdint>
#include <utility>
#include <vector>

#include "feasibility.hpp"
#include "leaf.hpp"
#include "ops.hpp"
#include "set.hpp"

namespace hpz
{

struct QuadraticAffineMap
{
    std::vector<Matrix> Q;
    Matrix A;
    Vector d;

    Index input_dim() const { return A.cols(); }
    Index output_dim() const { return A.rows(); }

    void validate() const
    {
        const Index n = A.cols();
        if (d.size() != A.rows())
            throw Error(ErrorCode::DimensionMismatch, "offset has length " + std::to_string(d.size()) +
                                                          ", linear part has " + std::to_string(A.rows()) + " rows");
        if (static_cast<Index>(Q.size()) != A.rows())
            throw Error(ErrorCode::DimensionMismatch, std::to_string(Q.size()) + " quadratic forms for " +
                                                          std::to_string(A.rows()) + " outputs");
        for (std::size_t r = 0; r < Q.size(); ++r)
        {
            if (Q[r].rows() != n || Q[r].cols() != n)
                throw Error(ErrorCode::DimensionMismatch, "quadratic form " + std::to_string(r) + " is " +
                                                              detail::shape(Q[r].rows(), Q[r].cols()) + ", expected " +
                                                              detail::shape(n, n));
        }
    }

    /// f(x)
    Vector operator()(const Vector& x) const
    {
        Vector y = A * x + d;
        for (std::size_t r = 0; r < Q.size(); ++r)
            y(static_cast<Index>(r)) += x.dot(Q[r] * x);
        return y;
    }
};

/// Every binary assignment with its leaf set, in leaf-index order.
inline std::vector<std::pair<Vector, HybridPolynomialZonotope>> leaves(const HybridPolynomialZonotope& Z,
                                                                       std::int64_t leaf_cap = kDefaultLeafCap)
{
    std::vector<std::pair<Vector, HybridPolynomialZonotope>> out;
    for (Vector& xb : all_binary_assignments(Z.num_binary(), leaf_cap))
    {
        HybridPolynomialZonotope L = fix_binaries(Z, xb);
        out.emplace_back(std::move(xb), std::move(L));
    }
    return out;
}

/// Exact image of a binary-free set; the result is compacted.
inline HybridPolynomialZonotope quadratic_map_leaf(const QuadraticAffineMap& f, const HybridPolynomialZonotope& L)
{
    f.validate();
    if (L.num_binary() != 0)
        throw Error(ErrorCode::DimensionMismatch, "quadratic_map_leaf expects a set without binary factors");
    if (f.input_dim() != L.dim())
        throw Error(ErrorCode::DimensionMismatch, "map input dimension " + std::to_string(f.input_dim()) +
                                                      " differs from set dimension " + std::to_string(L.dim()));
    const Index m = f.output_dim();
    const Index ng = L.num_generators();
    const Index ne = L.num_factors();
    const Matrix& G = L.Gc();
    const Vector& c = L.c();

    const Index ncols = ng + ng + ng * (ng - 1) / 2;
    Matrix coef = Matrix::Zero(m, ncols);
    IntMatrix exps(ne, ncols);
    Vector center = f(c);

    for (Index i = 0; i < ng; ++i)
    {
        exps.col(i) = L.E().col(i);
        exps.col(ng + i) = 2 * L.E().col(i);
    }
    Index col = 2 * ng;
    for (Index i = 0; i < ng; ++i)
    {
        for (Index j = i + 1; j < ng; ++j, ++col)
            exps.col(col) = L.E().col(i) + L.E().col(j);
    }

    if (ng > 0)
        coef.leftCols(ng) = f.A * G;
    for (Index r = 0; r < m; ++r)
    {
        const Matrix& Q = f.Q[static_cast<std::size_t>(r)];
        if (Q.isZero(0.0) || ng == 0)
            continue;
        const Matrix P = Q + Q.transpose();
        const Matrix W = G.transpose() * P * G;
        coef.row(r).head(ng) += c.transpose() * P * G;
        for (Index i = 0; i < ng; ++i)
            coef(r, ng + i) = 0.5 * W(i, i);
        col = 2 * ng;
        for (Index i = 0; i < ng; ++i)
        {
            for (Index j = i + 1; j < ng; ++j, ++col)
                coef(r, col) = W(i, j);
        }
    }

    return compact(HybridPolynomialZonotope(center, coef, Matrix(m, 0), exps, L.Ac(), Matrix(L.num_constraints(), 0),
                                            L.b(), L.R()));
}

/// Union of a list of sets, combined pairwise in a fixed balanced order.
inline HybridPolynomialZonotope union_all(std::vector<HybridPolynomialZonotope> sets, Index dim)
{
    if (sets.empty())
        return HybridPolynomialZonotope::empty(dim);
    while (sets.size() > 1)
    {
        std::vector<HybridPolynomialZonotope> next;
        for (std::size_t i = 0; i + 1 < sets.size(); i += 2)
            next.push_back(compact(union_of(sets[i], sets[i + 1])));
        if (sets.size() % 2 == 1)
            next.push_back(std::move(sets.back()));
        sets = std::move(next);
    }
    return std::move(sets.front());
}

struct StepStats
{
    std::size_t candidate_leaves = 0;
    std::size_t mapped_leaves = 0;
};

/**
 * @brief f applied to every leaf, images re-united.
 *
 * Leaves excluded by interval evaluation, exact reduction or box bisection are skipped. When no
 * leaf survives the result is the empty set of the output dimension.
 */
inline HybridPolynomialZonotope nonlinear_step(const QuadraticAffineMap& f, const HybridPolynomialZonotope& Z,
                                               std::int64_t leaf_cap = kDefaultLeafCap, StepStats* stats = nullptr)
{
    f.validate();
    if (f.input_dim() != Z.dim())
        throw Error(ErrorCode::DimensionMismatch, "map input dimension " + std::to_string(f.input_dim()) +
                                                      " differs from set dimension " + std::to_string(Z.dim()));
    if (Z.num_binary() > 0)
        detail::check_leaf_budget(Z.num_binary(), leaf_cap);
    const std::vector<Vector> cand = enumerate_leaves(Z, leaf_cap);
    std::vector<HybridPolynomialZonotope> images;
    for (const Vector& xb : cand)
    {
        const std::optional<ReducedLeaf> red = reduce_leaf(fix_binaries(Z, xb));
        if (!red || refute_by_bisection(red->set))
            continue;
        images.push_back(quadratic_map_leaf(f, red->set));
    }
    if (stats)
    {
        stats->candidate_leaves = cand.size();
        stats->mapped_leaves = images.size();
    }
    return compact(union_all(std::move(images), f.output_dim()));
}

} // namespace hpz

#endif
