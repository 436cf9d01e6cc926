#ifndef HPZ_SAMPLE_HPP_
#define HPZ_SAMPLE_HPP_

/**
 * @file sample.hpp
 * @brief Deterministic point clouds of a hybrid polynomial zonotope.
 *
 * Every binary leaf is reduced exactly, then its continuous factors are split into
 * geometric factors (appearing in some generator) and slack factors (constraint-only).
 * Starts are drawn over the geometric factors: a uniform grid plus seeded random points.
 * Constraint rows over geometric factors alone are polished per connected component
 * (exact box projection when affine, projected Gauss-Newton otherwise). The remaining
 * rows are then solved for the slack factors with the geometric factors held fixed.
 * A point is kept when every residual component is within kFeasTol.
 */

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "leaf.hpp"
#include "set.hpp"
#include "solvers.hpp"

namespace hpz
{

struct PointCloud
{
    Index dim = 0;
    std::vector<Vector> points;
    /// leaf index of the binary assignment that produced each point
    std::vector<std::uint64_t> leaf;
    std::uint64_t seed = 0;
    int grid_res = 0;
    /// leaves that produced at least one point
    std::size_t feasible_leaves = 0;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

struct SampleOptions
{
    int grid_res = 8;
    std::size_t max_points = 4096;
    std::uint64_t seed = 0;
    std::int64_t leaf_cap = kDefaultLeafCap;
    /// top the grid up with random starts to max_points; off gives grid-only clouds
    bool random_fill = true;
};

namespace detail
{

struct UnionFind
{
    std::vector<Index> parent;
    explicit UnionFind(Index n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    Index find(Index i)
    {
        while (parent[static_cast<std::size_t>(i)] != i)
            i = parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
        return i;
    }
    void unite(Index a, Index b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

struct Component
{
    std::vector<Index> factors;
    std::vector<Index> rows;
};

/// Groups `rows` into connected components through the factors in `movable`.
inline std::vector<Component> components(const Matrix& A, const IntMatrix& R, const std::vector<Index>& rows,
                                         const std::vector<bool>& movable)
{
    const Index ne = R.rows();
    UnionFind uf(ne);
    std::vector<bool> touched(static_cast<std::size_t>(ne), false);
    std::vector<Index> anchor;
    for (Index r : rows)
    {
        Index first = -1;
        for (Index j = 0; j < A.cols(); ++j)
        {
            if (A(r, j) == 0.0)
                continue;
            for (Index k = 0; k < ne; ++k)
            {
                if (R(k, j) == 0 || !movable[static_cast<std::size_t>(k)])
                    continue;
                touched[static_cast<std::size_t>(k)] = true;
                if (first < 0)
                    first = k;
                else
                    uf.unite(first, k);
            }
        }
        anchor.push_back(first);
    }
    std::vector<Index> slot(static_cast<std::size_t>(ne), -1);
    std::vector<Component> out;
    for (Index k = 0; k < ne; ++k)
    {
        if (!touched[static_cast<std::size_t>(k)])
            continue;
        const Index root = uf.find(k);
        if (slot[static_cast<std::size_t>(root)] < 0)
        {
            slot[static_cast<std::size_t>(root)] = static_cast<Index>(out.size());
            out.emplace_back();
        }
        out[static_cast<std::size_t>(slot[static_cast<std::size_t>(root)])].factors.push_back(k);
    }
    std::vector<Index> orphan_rows;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        if (anchor[i] < 0)
            orphan_rows.push_back(rows[i]);
        else
            out[static_cast<std::size_t>(slot[static_cast<std::size_t>(uf.find(anchor[i]))])].rows.push_back(rows[i]);
    }
    // rows that involve no movable factor are only checked, never solved
    if (!orphan_rows.empty())
        out.push_back({{}, orphan_rows});
    return out;
}

/// Solves one component's rows for its factors, other factors held at their values in xi.
/// Affine components use the exact box projection of `xi`; others use multi-start projected
/// Gauss-Newton. Returns the solved xi.
inline Vector solve_component(const Matrix& A, const IntMatrix& R, const Vector& b, const Component& comp, Vector xi,
                              bool multi_start, int max_iter)
{
    if (comp.factors.empty())
        return xi;
    const Index nr = static_cast<Index>(comp.rows.size());
    const Index nf = static_cast<Index>(comp.factors.size());
    std::vector<Index> local(static_cast<std::size_t>(R.rows()), -1);
    for (Index i = 0; i < nf; ++i)
        local[static_cast<std::size_t>(comp.factors[static_cast<std::size_t>(i)])] = i;

    // affine in the component factors: each term has degree <= 1 in them
    bool affine = true;
    Matrix Al = Matrix::Zero(nr, nf);
    Vector beta(nr);
    for (Index i = 0; i < nr && affine; ++i)
    {
        const Index r = comp.rows[static_cast<std::size_t>(i)];
        beta(i) = b(r);
        for (Index j = 0; j < A.cols() && affine; ++j)
        {
            const double a = A(r, j);
            if (a == 0.0)
                continue;
            double fixed = a;
            Index var = -1;
            for (Index k = 0; k < R.rows(); ++k)
            {
                const int e = R(k, j);
                if (e == 0)
                    continue;
                if (local[static_cast<std::size_t>(k)] >= 0)
                {
                    if (e != 1 || var >= 0)
                    {
                        affine = false;
                        break;
                    }
                    var = local[static_cast<std::size_t>(k)];
                }
                else
                {
                    fixed *= ipow(xi(k), e);
                }
            }
            if (!affine)
                break;
            if (var >= 0)
                Al(i, var) += fixed;
            else
                beta(i) -= fixed;
        }
    }
    if (affine)
    {
        Vector g(nf);
        for (Index i = 0; i < nf; ++i)
            g(i) = xi(comp.factors[static_cast<std::size_t>(i)]);
        const SolveResult s = project_box_affine(Al, beta, g);
        for (Index i = 0; i < nf; ++i)
            xi(comp.factors[static_cast<std::size_t>(i)]) = s.xi(i);
        return xi;
    }

    PolySystem sys{Matrix(nr, A.cols()), R, Vector(nr)};
    for (Index i = 0; i < nr; ++i)
    {
        sys.coef.row(i) = A.row(comp.rows[static_cast<std::size_t>(i)]);
        sys.target(i) = b(comp.rows[static_cast<std::size_t>(i)]);
    }
    SolveResult best = gauss_newton(sys, xi, comp.factors, max_iter);
    if (multi_start && best.residual_inf > kFeasTol)
    {
        const int patterns = nf >= 3 ? 8 : (1 << nf);
        for (int p = 0; p < patterns && best.residual_inf > kFeasTol; ++p)
        {
            Vector start = xi;
            for (Index i = 0; i < nf; ++i)
                start(comp.factors[static_cast<std::size_t>(i)]) = ((p >> (i % 3)) & 1) ? 0.5 : -0.5;
            SolveResult s = gauss_newton(sys, start, comp.factors, max_iter);
            if (s.residual_inf < best.residual_inf)
                best = std::move(s);
        }
    }
    return best.xi;
}

/// Factors appearing in some generator column.
inline std::vector<bool> geometric_factors(const HybridPolynomialZonotope& S)
{
    std::vector<bool> geo(static_cast<std::size_t>(S.num_factors()), false);
    for (Index j = 0; j < S.num_generators(); ++j)
    {
        if (S.Gc().col(j).isZero(0.0))
            continue;
        for (Index k = 0; k < S.num_factors(); ++k)
        {
            if (S.E()(k, j) != 0)
                geo[static_cast<std::size_t>(k)] = true;
        }
    }
    return geo;
}

/// Samples one binary-free set. `emit` receives each accepted full assignment.
template <typename Emit>
void sample_leaf(const HybridPolynomialZonotope& S, int grid_res, std::size_t max_points, bool random_fill,
                 std::uint64_t seed, std::uint64_t leaf_index, Emit&& emit)
{
    const Index ne = S.num_factors();
    const std::vector<bool> geo = geometric_factors(S);
    std::vector<Index> geo_ids;
    for (Index k = 0; k < ne; ++k)
    {
        if (geo[static_cast<std::size_t>(k)])
            geo_ids.push_back(k);
    }
    std::vector<bool> slack(geo.size());
    for (std::size_t k = 0; k < geo.size(); ++k)
        slack[k] = !geo[k];

    std::vector<Index> pure_rows, mixed_rows;
    for (Index r = 0; r < S.num_constraints(); ++r)
    {
        bool pure = true;
        for (Index j = 0; j < S.num_constraint_terms() && pure; ++j)
        {
            if (S.Ac()(r, j) == 0.0)
                continue;
            for (Index k = 0; k < ne; ++k)
            {
                if (S.R()(k, j) != 0 && !geo[static_cast<std::size_t>(k)])
                {
                    pure = false;
                    break;
                }
            }
        }
        (pure ? pure_rows : mixed_rows).push_back(r);
    }
    const std::vector<Component> pure_comps = components(S.Ac(), S.R(), pure_rows, geo);
    const std::vector<Component> mixed_comps = components(S.Ac(), S.R(), mixed_rows, slack);

    // starts over the geometric factors
    const std::size_t ng = geo_ids.size();
    const std::size_t res = static_cast<std::size_t>(std::max(grid_res, 1));
    std::size_t grid_count = 1;
    bool grid_fits = true;
    for (std::size_t i = 0; i < ng; ++i)
    {
        if (grid_count > max_points / res)
        {
            grid_fits = false;
            break;
        }
        grid_count *= res;
    }
    if (grid_count > max_points)
        grid_fits = false;
    const std::size_t n_grid = grid_fits ? grid_count : 0;
    std::size_t n_random = ng == 0 ? 0 : (grid_fits ? max_points - grid_count : max_points);
    if (grid_fits && !random_fill)
        n_random = 0;

    auto axis = [&](std::size_t i) { return res == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(res - 1); };

    std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(leaf_index), static_cast<std::uint32_t>(leaf_index >> 32)};
    std::mt19937_64 rng(sseq);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    const std::size_t total = n_grid + n_random;
    for (std::size_t s = 0; s < total; ++s)
    {
        Vector xi = Vector::Zero(ne);
        if (s < n_grid)
        {
            std::size_t idx = s;
            for (std::size_t i = 0; i < ng; ++i)
            {
                xi(geo_ids[i]) = axis(idx % res);
                idx /= res;
            }
        }
        else
        {
            for (std::size_t i = 0; i < ng; ++i)
                xi(geo_ids[i]) = unit(rng);
        }
        for (const Component& c : pure_comps)
            xi = solve_component(S.Ac(), S.R(), S.b(), c, std::move(xi), false, 50);
        for (const Component& c : mixed_comps)
            xi = solve_component(S.Ac(), S.R(), S.b(), c, std::move(xi), true, 100);
        const FactorAssignment a{xi, Vector(0)};
        if (is_feasible(S, a))
            emit(a);
    }
}

inline void check_leaf_budget(Index nb, std::int64_t cap)
{
    if (nb >= 62 || (std::int64_t{1} << nb) > cap)
        throw Error(ErrorCode::BudgetExceeded,
                    "2^" + std::to_string(nb) + " binary leaves exceed the cap of " + std::to_string(cap));
}

} // namespace detail

/// Point cloud of Z; deterministic for fixed options.
inline PointCloud sample(const HybridPolynomialZonotope& Z, const SampleOptions& opt = {})
{
    detail::check_leaf_budget(Z.num_binary(), opt.leaf_cap);
    PointCloud cloud;
    cloud.dim = Z.dim();
    cloud.seed = opt.seed;
    cloud.grid_res = opt.grid_res;
    for (const Vector& xb : enumerate_leaves(Z, opt.leaf_cap))
    {
        const std::uint64_t idx = index_from_binary(xb);
        const std::optional<ReducedLeaf> red = reduce_leaf(fix_binaries(Z, xb));
        if (!red)
            continue;
        const std::size_t before = cloud.points.size();
        detail::sample_leaf(red->set, opt.grid_res, opt.max_points, opt.random_fill, opt.seed, idx,
                            [&](const FactorAssignment& a)
                            {
                                cloud.points.push_back(evaluate(red->set, a));
                                cloud.leaf.push_back(idx);
                            });
        if (cloud.points.size() > before)
            ++cloud.feasible_leaves;
    }
    return cloud;
}

inline PointCloud sample(const HybridPolynomialZonotope& Z, int grid_res, std::size_t max_points, std::uint64_t seed)
{
    SampleOptions opt;
    opt.grid_res = grid_res;
    opt.max_points = max_points;
    opt.seed = seed;
    return sample(Z, opt);
}

} // namespace hpz

#endif
