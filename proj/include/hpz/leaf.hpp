#ifndef HPZ_LEAF_HPP_
#define HPZ_LEAF_HPP_

/**
 * @file leaf.hpp
 * @brief Binary-leaf enumeration and exact leaf reduction.
 *
 * A leaf is the constrained polynomial zonotope obtained by fixing every binary
 * factor. Enumeration walks the binary factors depth-first and prunes a subtree as
 * soon as interval evaluation of some constraint row excludes zero.
 *
 * Reduction removes structure that does not change the leaf's point set:
 *  - factors whose value is forced by interval contraction are substituted,
 *  - a row a*s + rest = b whose slack factor s appears nowhere else, and for which
 *    (b - rest)/a stays inside [-1,1] over the whole box, is dropped with s,
 *  - constant rows 0 = 0 are dropped; a constant row 0 = b != 0 proves emptiness.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "interval.hpp"
#include "set.hpp"

namespace hpz
{

namespace detail
{

/// Interval of each constraint row's continuous part minus b, factors over the unit box.
inline std::vector<Interval> continuous_row_ranges(const HybridPolynomialZonotope& Z)
{
    const std::vector<Interval> box(static_cast<std::size_t>(Z.num_factors()), Interval::unit());
    std::vector<Interval> mono(static_cast<std::size_t>(Z.num_constraint_terms()));
    for (Index j = 0; j < Z.num_constraint_terms(); ++j)
        mono[static_cast<std::size_t>(j)] = monomial_range(Z.R(), j, box);
    std::vector<Interval> out(static_cast<std::size_t>(Z.num_constraints()));
    for (Index r = 0; r < Z.num_constraints(); ++r)
    {
        Interval s = Interval::point(-Z.b()(r));
        for (Index j = 0; j < Z.num_constraint_terms(); ++j)
        {
            const double a = Z.Ac()(r, j);
            if (a != 0.0)
                s += a * mono[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(r)] = s;
    }
    return out;
}

} // namespace detail

/// Binary assignments whose leaves are not excluded by interval evaluation of the
/// constraints, in increasing leaf-index order. Throws BudgetExceeded when more than
/// `node_cap` search nodes would be visited.
inline std::vector<Vector> enumerate_leaves(const HybridPolynomialZonotope& Z, std::int64_t node_cap = kDefaultLeafCap)
{
    const Index nb = Z.num_binary();
    const Index nc = Z.num_constraints();
    const std::vector<Interval> cont = detail::continuous_row_ranges(Z);

    // running sums: assigned binary contribution and radius of the unassigned ones
    std::vector<double> assigned(static_cast<std::size_t>(nc), 0.0);
    std::vector<double> radius(static_cast<std::size_t>(nc), 0.0);
    for (Index r = 0; r < nc; ++r)
        radius[static_cast<std::size_t>(r)] = nb > 0 ? Z.Ab().row(r).cwiseAbs().sum() : 0.0;

    auto consistent = [&]()
    {
        for (Index r = 0; r < nc; ++r)
        {
            const auto i = static_cast<std::size_t>(r);
            const Interval total{cont[i].lo + assigned[i] - radius[i], cont[i].hi + assigned[i] + radius[i]};
            if (!total.contains(0.0, kFeasTol))
                return false;
        }
        return true;
    };

    std::vector<Vector> out;
    std::int64_t nodes = 0;
    Vector xb = Vector::Zero(nb);

    // assign from the last binary factor down to the first
    auto dfs = [&](auto&& self, Index depth) -> void
    {
        if (++nodes > node_cap)
            throw Error(ErrorCode::BudgetExceeded,
                        "binary leaf enumeration exceeded the cap of " + std::to_string(node_cap) + " nodes");
        if (!consistent())
            return;
        if (depth == nb)
        {
            out.push_back(xb);
            return;
        }
        const Index i = nb - 1 - depth;
        for (double v : {-1.0, 1.0})
        {
            xb(i) = v;
            for (Index r = 0; r < nc; ++r)
            {
                const double a = Z.Ab()(r, i);
                assigned[static_cast<std::size_t>(r)] += a * v;
                radius[static_cast<std::size_t>(r)] -= std::abs(a);
            }
            self(self, depth + 1);
            for (Index r = 0; r < nc; ++r)
            {
                const double a = Z.Ab()(r, i);
                assigned[static_cast<std::size_t>(r)] -= a * v;
                radius[static_cast<std::size_t>(r)] += std::abs(a);
            }
        }
        xb(i) = 0.0;
    };
    dfs(dfs, 0);

    std::sort(out.begin(), out.end(), [](const Vector& a, const Vector& b)
              { return index_from_binary(a) < index_from_binary(b); });
    return out;
}

/// Every binary assignment in leaf-index order; BudgetExceeded when 2^nb exceeds `leaf_cap`.
inline std::vector<Vector> all_binary_assignments(Index nb, std::int64_t leaf_cap = kDefaultLeafCap)
{
    if (nb >= 62 || (std::int64_t{1} << nb) > leaf_cap)
        throw Error(ErrorCode::BudgetExceeded,
                    "2^" + std::to_string(nb) + " binary leaves exceed the cap of " + std::to_string(leaf_cap));
    std::vector<Vector> out;
    const std::uint64_t count = std::uint64_t{1} << nb;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i)
        out.push_back(binary_from_index(i, nb));
    return out;
}

/// A leaf after exact reduction, with enough bookkeeping to rebuild a full assignment.
struct ReducedLeaf
{
    struct Term
    {
        double coef = 0.0;
        std::vector<std::pair<Index, int>> powers;
    };

    /// One eliminated factor: either a forced value or a slack solved from a dropped row.
    struct Elimination
    {
        Index factor = 0;
        bool fixed = true;
        double value = 0.0;
        std::vector<Term> rest;
        double rhs = 0.0;
        double slack_coef = 1.0;
    };

    HybridPolynomialZonotope set;
    std::vector<Index> factor_ids;
    std::vector<Elimination> log;
    Index original_factors = 0;

    /// Continuous assignment of the unreduced leaf reproducing the reduced assignment.
    Vector expand(const Vector& reduced) const
    {
        Vector full = Vector::Zero(original_factors);
        for (std::size_t i = 0; i < factor_ids.size(); ++i)
            full(factor_ids[i]) = reduced(static_cast<Index>(i));
        for (auto it = log.rbegin(); it != log.rend(); ++it)
        {
            if (it->fixed)
            {
                full(it->factor) = it->value;
                continue;
            }
            double s = it->rhs;
            for (const Term& t : it->rest)
            {
                double m = t.coef;
                for (const auto& [k, e] : t.powers)
                    m *= detail::ipow(full(k), e);
                s -= m;
            }
            full(it->factor) = std::clamp(s / it->slack_coef, -1.0, 1.0);
        }
        return full;
    }
};

namespace detail
{

struct LeafWork
{
    Vector c;
    Matrix G;
    IntMatrix E;
    Vector b;
    Matrix A;
    IntMatrix R;
    std::vector<Index> ids;

    Index factors() const { return E.rows(); }
};

template <typename M>
M keep_rows(const M& X, const std::vector<Index>& rows)
{
    M out(static_cast<Index>(rows.size()), X.cols());
    for (Index i = 0; i < static_cast<Index>(rows.size()); ++i)
        out.row(i) = X.row(rows[static_cast<std::size_t>(i)]);
    return out;
}

template <typename M>
M keep_cols(const M& X, const std::vector<Index>& cols)
{
    M out(X.rows(), static_cast<Index>(cols.size()));
    for (Index i = 0; i < static_cast<Index>(cols.size()); ++i)
        out.col(i) = X.col(cols[static_cast<std::size_t>(i)]);
    return out;
}

inline Vector keep_entries(const Vector& v, const std::vector<Index>& idx)
{
    Vector out(static_cast<Index>(idx.size()));
    for (Index i = 0; i < static_cast<Index>(idx.size()); ++i)
        out(i) = v(idx[static_cast<std::size_t>(i)]);
    return out;
}

/// Normalizes columns, drops trivial rows and unused factors. Returns false on a
/// constant row that cannot be satisfied.
inline bool tidy(LeafWork& w)
{
    normalize_terms(w.G, w.E, w.c, 1.0);
    normalize_terms(w.A, w.R, w.b, -1.0);
    std::vector<Index> rows;
    for (Index r = 0; r < w.A.rows(); ++r)
    {
        if (w.A.cols() == 0 || w.A.row(r).isZero(0.0))
        {
            if (std::abs(w.b(r)) > kFeasTol)
                return false;
            continue;
        }
        rows.push_back(r);
    }
    if (static_cast<Index>(rows.size()) != w.A.rows())
    {
        w.A = keep_rows(w.A, rows);
        w.b = keep_entries(w.b, rows);
    }
    std::vector<Index> keep;
    for (Index k = 0; k < w.factors(); ++k)
    {
        const bool used = (w.E.cols() > 0 && (w.E.row(k).array() != 0).any()) ||
                          (w.R.cols() > 0 && (w.R.row(k).array() != 0).any());
        if (used)
            keep.push_back(k);
    }
    if (static_cast<Index>(keep.size()) != w.factors())
    {
        w.E = select_rows(w.E, keep);
        w.R = select_rows(w.R, keep);
        std::vector<Index> ids;
        for (Index k : keep)
            ids.push_back(w.ids[static_cast<std::size_t>(k)]);
        w.ids = std::move(ids);
    }
    return true;
}

/// Sparse view of the constraint rows: nonzero powers per column, nonzero terms per row.
struct SparseRows
{
    std::vector<std::vector<std::pair<Index, int>>> powers;
    std::vector<std::vector<std::pair<Index, double>>> terms;
    /// factor of each degree-one single-factor column, else -1
    std::vector<Index> linear;
    /// (factor, power) of each single-factor column, factor -1 otherwise
    std::vector<std::pair<Index, int>> single;
    Vector b;

    explicit SparseRows(const LeafWork& w)
        : powers(static_cast<std::size_t>(w.R.cols())), terms(static_cast<std::size_t>(w.A.rows())),
          linear(static_cast<std::size_t>(w.R.cols()), -1),
          single(static_cast<std::size_t>(w.R.cols()), {-1, 0}), b(w.b)
    {
        for (Index j = 0; j < w.R.cols(); ++j)
        {
            auto& pw = powers[static_cast<std::size_t>(j)];
            for (Index k = 0; k < w.R.rows(); ++k)
            {
                if (w.R(k, j) != 0)
                    pw.emplace_back(k, w.R(k, j));
            }
            if (pw.size() == 1)
                single[static_cast<std::size_t>(j)] = pw.front();
            if (pw.size() == 1 && pw.front().second == 1)
                linear[static_cast<std::size_t>(j)] = pw.front().first;
        }
        for (Index j = 0; j < w.A.cols(); ++j)
        {
            for (Index r = 0; r < w.A.rows(); ++r)
            {
                if (w.A(r, j) != 0.0)
                    terms[static_cast<std::size_t>(r)].emplace_back(j, w.A(r, j));
            }
        }
    }

    Interval range(Index j, const std::vector<Interval>& dom) const
    {
        Interval r = Interval::point(1.0);
        for (const auto& [k, e] : powers[static_cast<std::size_t>(j)])
            r = r * pow(dom[static_cast<std::size_t>(k)], e);
        return r;
    }
};

enum class ContractOutcome
{
    Ok,
    Infeasible
};

/// Hull of {x in d : x^e in t}; lo > hi when there is none.
inline Interval inverse_power(const Interval& t, int e, const Interval& d)
{
    if (e == 1)
        return {std::max(d.lo, t.lo), std::min(d.hi, t.hi)};
    auto root = [e](double v)
    {
        if (e == 2)
            return std::sqrt(v);
        if (e == 3)
            return std::cbrt(v);
        return std::pow(v, 1.0 / e);
    };
    if (e % 2 == 1)
    {
        auto signed_root = [&](double v) { return v < 0 ? -root(-v) : root(v); };
        return {std::max(d.lo, signed_root(t.lo)), std::min(d.hi, signed_root(t.hi))};
    }
    if (t.hi < 0.0)
        return {1.0, -1.0};
    const double hi = root(t.hi);
    const double lo = t.lo > 0.0 ? root(t.lo) : 0.0;
    Interval out{std::max(d.lo, -hi), std::min(d.hi, hi)};
    // a one-signed domain also excludes the gap around zero
    if (d.lo >= 0.0)
        out.lo = std::max(out.lo, lo);
    else if (d.hi <= 0.0)
        out.hi = std::min(out.hi, -lo);
    return out;
}

/// Forward-backward interval contraction of the factor domains against every row.
/// The backward step inverts the single-factor power terms of each row.
inline ContractOutcome contract(const SparseRows& sp, std::vector<Interval>& dom, int sweeps = 30)
{
    std::vector<Interval> t, prefix, suffix;
    for (int s = 0; s < sweeps; ++s)
    {
        bool changed = false;
        for (std::size_t r = 0; r < sp.terms.size(); ++r)
        {
            const auto& row = sp.terms[r];
            const std::size_t m = row.size();
            t.assign(m, Interval::point(0.0));
            prefix.assign(m + 1, Interval::point(0.0));
            suffix.assign(m + 1, Interval::point(0.0));
            for (std::size_t i = 0; i < m; ++i)
            {
                t[i] = row[i].second * sp.range(row[i].first, dom);
                prefix[i + 1] = prefix[i] + t[i];
            }
            for (std::size_t i = m; i-- > 0;)
                suffix[i] = suffix[i + 1] + t[i];
            const double b = sp.b(static_cast<Index>(r));
            if (!prefix[m].contains(b, kFeasTol))
                return ContractOutcome::Infeasible;
            for (std::size_t i = 0; i < m; ++i)
            {
                const auto [k, e] = sp.single[static_cast<std::size_t>(row[i].first)];
                if (k < 0)
                    continue;
                const double a = row[i].second;
                const Interval rest = prefix[i] + suffix[i + 1];
                const Interval cand = (1.0 / a) * (Interval::point(b) - rest);
                Interval& d = dom[static_cast<std::size_t>(k)];
                Interval nd = inverse_power(cand, e, d);
                if (nd.lo > nd.hi)
                {
                    const double slack = kFeasTol / std::abs(a);
                    const Interval wide = inverse_power({cand.lo - slack, cand.hi + slack}, e, d);
                    if (wide.lo > wide.hi)
                        return ContractOutcome::Infeasible;
                    nd = Interval::point(wide.mid());
                }
                if (nd.lo > d.lo + 1e-15 || nd.hi < d.hi - 1e-15)
                {
                    d = nd;
                    changed = true;
                }
            }
        }
        if (!changed)
            break;
    }
    return ContractOutcome::Ok;
}

inline void substitute(LeafWork& w, Index k, double v)
{
    for (Index j = 0; j < w.E.cols(); ++j)
    {
        if (w.E(k, j) != 0)
        {
            w.G.col(j) *= ipow(v, w.E(k, j));
            w.E(k, j) = 0;
        }
    }
    for (Index j = 0; j < w.R.cols(); ++j)
    {
        if (w.R(k, j) != 0)
        {
            w.A.col(j) *= ipow(v, w.R(k, j));
            w.R(k, j) = 0;
        }
    }
}

} // namespace detail

/// Exact reduction of a leaf (n_b = 0). Returns nullopt when the leaf is proven empty.
inline std::optional<ReducedLeaf> reduce_leaf(const HybridPolynomialZonotope& L)
{
    if (L.num_binary() != 0)
        throw Error(ErrorCode::DimensionMismatch, "reduce_leaf expects a set without binary factors");
    detail::LeafWork w{L.c(), L.Gc(), L.E(), L.b(), L.Ac(), L.R(), {}};
    for (Index k = 0; k < L.num_factors(); ++k)
        w.ids.push_back(k);
    std::vector<ReducedLeaf::Elimination> log;

    for (int guard = 0; guard < 10000; ++guard)
    {
        if (!detail::tidy(w))
            return std::nullopt;

        const detail::SparseRows sp(w);
        std::vector<Interval> dom(static_cast<std::size_t>(w.factors()), Interval::unit());
        if (detail::contract(sp, dom) == detail::ContractOutcome::Infeasible)
            return std::nullopt;

        bool progress = false;
        for (Index k = 0; k < w.factors(); ++k)
        {
            const Interval& d = dom[static_cast<std::size_t>(k)];
            if (d.width() <= 1e-12)
            {
                const double v = std::clamp(d.mid(), -1.0, 1.0);
                detail::substitute(w, k, v);
                log.push_back({w.ids[static_cast<std::size_t>(k)], true, v, {}, 0.0, 1.0});
                progress = true;
            }
        }
        if (progress)
            continue;

        // redundant slack rows: a*s + rest = b with s in no other term and
        // (b - rest)/a inside [-1,1] over the whole box
        const std::vector<Interval> box(static_cast<std::size_t>(w.factors()), Interval::unit());
        std::vector<int> uses(static_cast<std::size_t>(w.factors()), 0);
        for (const auto& pw : sp.powers)
        {
            for (const auto& kv : pw)
                ++uses[static_cast<std::size_t>(kv.first)];
        }
        std::vector<Index> row_of_col(static_cast<std::size_t>(w.A.cols()), -1);
        std::vector<int> rows_count(static_cast<std::size_t>(w.A.cols()), 0);
        for (std::size_t r = 0; r < sp.terms.size(); ++r)
        {
            for (const auto& term : sp.terms[r])
            {
                ++rows_count[static_cast<std::size_t>(term.first)];
                row_of_col[static_cast<std::size_t>(term.first)] = static_cast<Index>(r);
            }
        }
        std::vector<bool> drop_row(static_cast<std::size_t>(w.A.rows()), false);
        std::vector<bool> drop_col(static_cast<std::size_t>(w.A.cols()), false);
        for (Index col = 0; col < w.A.cols(); ++col)
        {
            const Index s = sp.linear[static_cast<std::size_t>(col)];
            if (s < 0 || uses[static_cast<std::size_t>(s)] != 1 || rows_count[static_cast<std::size_t>(col)] != 1)
                continue;
            if (w.E.cols() > 0 && (w.E.row(s).array() != 0).any())
                continue;
            const Index row = row_of_col[static_cast<std::size_t>(col)];
            if (drop_row[static_cast<std::size_t>(row)])
                continue;
            const double a = w.A(row, col);
            Interval rest = Interval::point(0.0);
            for (const auto& [j, aj] : sp.terms[static_cast<std::size_t>(row)])
            {
                if (j != col)
                    rest += aj * sp.range(j, box);
            }
            const Interval range = (1.0 / a) * (Interval::point(w.b(row)) - rest);
            if (range.lo < -1.0 - 1e-12 || range.hi > 1.0 + 1e-12)
                continue;

            ReducedLeaf::Elimination e;
            e.factor = w.ids[static_cast<std::size_t>(s)];
            e.fixed = false;
            e.rhs = w.b(row);
            e.slack_coef = a;
            for (const auto& [j, aj] : sp.terms[static_cast<std::size_t>(row)])
            {
                if (j == col)
                    continue;
                ReducedLeaf::Term t;
                t.coef = aj;
                for (const auto& [k, p] : sp.powers[static_cast<std::size_t>(j)])
                    t.powers.emplace_back(w.ids[static_cast<std::size_t>(k)], p);
                e.rest.push_back(std::move(t));
            }
            log.push_back(std::move(e));
            drop_row[static_cast<std::size_t>(row)] = true;
            drop_col[static_cast<std::size_t>(col)] = true;
            progress = true;
        }
        if (!progress)
            break;
        std::vector<Index> rows, cols;
        for (Index r = 0; r < w.A.rows(); ++r)
        {
            if (!drop_row[static_cast<std::size_t>(r)])
                rows.push_back(r);
        }
        for (Index j = 0; j < w.A.cols(); ++j)
        {
            if (!drop_col[static_cast<std::size_t>(j)])
                cols.push_back(j);
        }
        w.A = detail::keep_cols(detail::keep_rows(w.A, rows), cols);
        w.b = detail::keep_entries(w.b, rows);
        w.R = detail::keep_cols(w.R, cols);
    }

    ReducedLeaf out{HybridPolynomialZonotope(w.c, w.G, Matrix(w.c.size(), 0), w.E, w.A, Matrix(w.A.rows(), 0), w.b,
                                             w.R),
                    w.ids, std::move(log), L.num_factors()};
    return out;
}

/**
 * @brief Tries to prove a binary-free set empty by bisecting the factor box.
 *
 * Each box is contracted against every row; a box whose contraction fails is discarded.
 * Returns true only if every box is discarded within `max_boxes` boxes.
 */
inline bool refute_by_bisection(const HybridPolynomialZonotope& L, int max_boxes = 1024)
{
    if (L.num_binary() != 0)
        throw Error(ErrorCode::DimensionMismatch, "refute_by_bisection expects a set without binary factors");
    if (L.num_constraints() == 0)
        return false;
    detail::LeafWork w{L.c(), L.Gc(), L.E(), L.b(), L.Ac(), L.R(), {}};
    const detail::SparseRows sp(w);
    const Index ne = L.num_factors();
    std::vector<bool> in_rows(static_cast<std::size_t>(ne), false);
    for (Index k = 0; k < ne; ++k)
        in_rows[static_cast<std::size_t>(k)] = w.R.cols() > 0 && (w.R.row(k).array() != 0).any();

    std::vector<std::vector<Interval>> stack{std::vector<Interval>(static_cast<std::size_t>(ne), Interval::unit())};
    int boxes = 0;
    while (!stack.empty())
    {
        if (++boxes > max_boxes)
            return false;
        std::vector<Interval> dom = std::move(stack.back());
        stack.pop_back();
        if (detail::contract(sp, dom, 4) == detail::ContractOutcome::Infeasible)
            continue;
        // split generator factors first; slack factors are usually pinned by contraction
        Index split = -1;
        for (int pass = 0; pass < 2 && split < 0; ++pass)
        {
            double widest = 1e-9;
            for (Index k = 0; k < ne; ++k)
            {
                const bool geo = w.E.cols() > 0 && (w.E.row(k).array() != 0).any();
                const double wk = dom[static_cast<std::size_t>(k)].width();
                if (in_rows[static_cast<std::size_t>(k)] && (geo || pass == 1) && wk > widest)
                {
                    widest = wk;
                    split = k;
                }
            }
        }
        if (split < 0)
            return false;
        const Interval d = dom[static_cast<std::size_t>(split)];
        std::vector<Interval> lower = dom;
        lower[static_cast<std::size_t>(split)] = {d.lo, d.mid()};
        dom[static_cast<std::size_t>(split)] = {d.mid(), d.hi};
        stack.push_back(std::move(lower));
        stack.push_back(std::move(dom));
    }
    return true;
}

} // namespace hpz

#endif
