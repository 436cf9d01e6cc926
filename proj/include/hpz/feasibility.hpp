#ifndef HPZ_FEASIBILITY_HPP_
#define HPZ_FEASIBILITY_HPP_

/**
 * @file feasibility.hpp
 * @brief Conservative emptiness test and approximate membership with a witness.
 *
 * Both tests are one-sided. is_provably_empty == false means "unknown";
 * approx_member == false means "no witness found".
 */

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "leaf.hpp"
#include "ops.hpp"
#include "sample.hpp"
#include "solvers.hpp"

namespace hpz
{

/// True only when interval evaluation of the constraints excludes every binary leaf.
inline bool is_provably_empty(const HybridPolynomialZonotope& Z, std::int64_t leaf_cap = kDefaultLeafCap)
{
    return enumerate_leaves(Z, leaf_cap).empty();
}

/// Number of binary leaves not excluded by interval evaluation.
inline std::size_t count_candidate_leaves(const HybridPolynomialZonotope& Z, std::int64_t leaf_cap = kDefaultLeafCap)
{
    return enumerate_leaves(Z, leaf_cap).size();
}

struct Membership
{
    bool member = false;
    FactorAssignment witness;
    double residual = 0.0;
};

struct MemberOptions
{
    int max_iter = 100;
    /// starts seeded from a coarse grid when the fixed starts fail
    int grid_res = 9;
    int grid_starts = 8;
    std::int64_t leaf_cap = kDefaultLeafCap;
};

namespace detail
{

inline SolveResult member_search(const HybridPolynomialZonotope& S, const Vector& p, double tol,
                                 const MemberOptions& opt)
{
    const Index n = S.dim();
    const Index ng = S.num_generators();
    const Index nq = S.num_constraint_terms();
    const Index nc = S.num_constraints();
    const Index ne = S.num_factors();

    PolySystem sys{Matrix::Zero(n + nc, ng + nq), IntMatrix(ne, ng + nq), Vector(n + nc)};
    sys.coef.topLeftCorner(n, ng) = S.Gc();
    sys.coef.bottomRightCorner(nc, nq) = S.Ac();
    sys.exps << S.E(), S.R();
    sys.target << p - S.c(), S.b();

    std::vector<Index> vars(static_cast<std::size_t>(ne));
    for (Index k = 0; k < ne; ++k)
        vars[static_cast<std::size_t>(k)] = k;

    auto norm = [](const Vector& r) { return r.size() == 0 ? 0.0 : r.norm(); };
    SolveResult best{Vector::Zero(ne), norm(sys.residual(Vector::Zero(ne)))};
    auto attempt = [&](const Vector& start)
    {
        SolveResult s = gauss_newton(sys, start, vars, opt.max_iter);
        s.residual_inf = norm(sys.residual(s.xi));
        if (s.residual_inf < best.residual_inf)
            best = std::move(s);
        return best.residual_inf <= tol;
    };

    // center, then +-0.5 sign patterns
    if (attempt(Vector::Zero(ne)))
        return best;
    for (int pat = 0; pat < 7 && ne > 0; ++pat)
    {
        Vector start(ne);
        for (Index k = 0; k < ne; ++k)
            start(k) = (((pat + 1) >> (k % 3)) & 1) ? 0.5 : -0.5;
        if (attempt(start))
            return best;
    }

    // grid starts over the geometric factors ranked by distance to p
    const std::vector<bool> geo = geometric_factors(S);
    std::vector<Index> geo_ids;
    for (Index k = 0; k < ne; ++k)
    {
        if (geo[static_cast<std::size_t>(k)])
            geo_ids.push_back(k);
    }
    if (geo_ids.empty() || opt.grid_res < 2)
        return best;
    std::size_t count = 1;
    for (std::size_t i = 0; i < geo_ids.size() && count <= 4096; ++i)
        count *= static_cast<std::size_t>(opt.grid_res);
    if (count > 4096)
        return best;
    std::vector<std::pair<double, Vector>> ranked;
    ranked.reserve(count);
    for (std::size_t s = 0; s < count; ++s)
    {
        Vector xi = Vector::Zero(ne);
        std::size_t idx = s;
        for (Index k : geo_ids)
        {
            xi(k) = -1.0 + 2.0 * static_cast<double>(idx % static_cast<std::size_t>(opt.grid_res)) /
                               static_cast<double>(opt.grid_res - 1);
            idx /= static_cast<std::size_t>(opt.grid_res);
        }
        const Vector x = evaluate(S, {xi, Vector(0)});
        ranked.emplace_back((x - p).squaredNorm(), std::move(xi));
    }
    const std::size_t keep = std::min(ranked.size(), static_cast<std::size_t>(opt.grid_starts));
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < keep; ++i)
    {
        if (attempt(ranked[i].second))
            break;
    }
    return best;
}

} // namespace detail

/**
 * @brief Searches every candidate leaf for an assignment mapping to p.
 *
 * Multi-start damped Gauss-Newton on [evaluate - p; constraint residual], projected to
 * the factor box. The witness is a full assignment of Z.
 */
inline Membership approx_member(const HybridPolynomialZonotope& Z, const Vector& p, double tol = 1e-6,
                                const MemberOptions& opt = {})
{
    if (p.size() != Z.dim())
        throw Error(ErrorCode::DimensionMismatch, "approx_member: point has length " + std::to_string(p.size()) +
                                                      ", set dimension " + std::to_string(Z.dim()));
    Membership best;
    best.residual = std::numeric_limits<double>::infinity();
    for (const Vector& xb : enumerate_leaves(Z, opt.leaf_cap))
    {
        const HybridPolynomialZonotope L = fix_binaries(Z, xb);
        // cheap bound certificate before any search
        bool outside = false;
        for (Index i = 0; i < Z.dim() && !outside; ++i)
        {
            const SupportBounds sb = functional_bounds(L, Vector::Unit(Z.dim(), i));
            outside = p(i) < sb.lower - tol || p(i) > sb.upper + tol;
        }
        if (outside)
            continue;
        const std::optional<ReducedLeaf> red = reduce_leaf(L);
        if (!red)
            continue;
        const detail::SolveResult s = detail::member_search(red->set, p, tol, opt);
        if (s.residual_inf < best.residual)
        {
            best.residual = s.residual_inf;
            best.witness = {red->expand(s.xi), xb};
            best.member = s.residual_inf <= tol;
        }
        if (best.member)
            break;
    }
    return best;
}

} // namespace hpz

#endif
