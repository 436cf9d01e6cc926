#ifndef HPZ_ORACLE_HPP_
#define HPZ_ORACLE_HPP_

/**
 * @file oracle.hpp
 * @brief Brute-force ground truth for differential testing.
 *
 * Nothing here calls the operation, sampling or solver code of the library. The
 * enumerator handles sets whose constraint terms are linear in the factors (every
 * R column has a single exponent 1): on a uniform factor grid it computes the exact
 * Euclidean projection onto {A xi = beta} ∩ [-1,1]^n by trying every active-bound
 * pattern. Operation semantics are applied pointwise to clouds.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "error.hpp"
#include "reach.hpp"
#include "set.hpp"

namespace hpz::oracle
{

using Cloud = std::vector<Vector>;

/// Independent evaluation: c + Gb xb + sum_i (prod_k xi_k^E(k,i)) Gc(:,i).
inline Vector evaluate(const HybridPolynomialZonotope& Z, const Vector& xi, const Vector& xb)
{
    Vector x = Z.c();
    for (Index i = 0; i < Z.num_binary(); ++i)
        x += xb(i) * Z.Gb().col(i);
    for (Index i = 0; i < Z.num_generators(); ++i)
    {
        double m = 1.0;
        for (Index k = 0; k < Z.num_factors(); ++k)
            m *= std::pow(xi(k), static_cast<double>(Z.E()(k, i)));
        x += m * Z.Gc().col(i);
    }
    return x;
}

/// Independent residual: Ab xb + sum_j (prod_k xi_k^R(k,j)) Ac(:,j) - b.
inline Vector residual(const HybridPolynomialZonotope& Z, const Vector& xi, const Vector& xb)
{
    Vector r = -Z.b();
    for (Index i = 0; i < Z.num_binary(); ++i)
        r += xb(i) * Z.Ab().col(i);
    for (Index j = 0; j < Z.num_constraint_terms(); ++j)
    {
        double m = 1.0;
        for (Index k = 0; k < Z.num_factors(); ++k)
            m *= std::pow(xi(k), static_cast<double>(Z.R()(k, j)));
        r += m * Z.Ac().col(j);
    }
    return r;
}

/// True when every constraint term is a single factor to the first power.
inline bool has_linear_constraints(const HybridPolynomialZonotope& Z)
{
    for (Index j = 0; j < Z.num_constraint_terms(); ++j)
    {
        if (Z.R().col(j).sum() != 1 || Z.R().col(j).maxCoeff() != 1)
            return false;
    }
    return true;
}

/// Exact projection of g onto {x in [-1,1]^n : A x = beta} by active-set enumeration.
/// Returns false when the set is empty (within tol).
inline bool project(const Matrix& A, const Vector& beta, const Vector& g, Vector& out, double tol = 1e-9)
{
    const Index n = g.size();
    if (A.rows() == 0)
    {
        out = g.cwiseMax(-1.0).cwiseMin(1.0);
        return true;
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> state(static_cast<std::size_t>(n), 0); // 0 free, 1 at -1, 2 at +1
    std::uint64_t total = 1;
    for (Index i = 0; i < n; ++i)
        total *= 3;
    for (std::uint64_t code = 0; code < total; ++code)
    {
        std::uint64_t t = code;
        std::vector<Index> freev;
        Vector x(n);
        for (Index i = 0; i < n; ++i)
        {
            state[static_cast<std::size_t>(i)] = static_cast<int>(t % 3);
            t /= 3;
            if (state[static_cast<std::size_t>(i)] == 0)
                freev.push_back(i);
            else
                x(i) = state[static_cast<std::size_t>(i)] == 1 ? -1.0 : 1.0;
        }
        Vector rhs = beta;
        for (Index i = 0; i < n; ++i)
        {
            if (state[static_cast<std::size_t>(i)] != 0)
                rhs -= A.col(i) * x(i);
        }
        if (!freev.empty())
        {
            Matrix AF(A.rows(), static_cast<Index>(freev.size()));
            Vector gF(static_cast<Index>(freev.size()));
            for (Index j = 0; j < static_cast<Index>(freev.size()); ++j)
            {
                AF.col(j) = A.col(freev[static_cast<std::size_t>(j)]);
                gF(j) = g(freev[static_cast<std::size_t>(j)]);
            }
            const Matrix AAt = AF * AF.transpose();
            const Vector lam = AAt.completeOrthogonalDecomposition().solve(rhs - AF * gF);
            const Vector xF = gF + AF.transpose() * lam;
            for (Index j = 0; j < static_cast<Index>(freev.size()); ++j)
                x(freev[static_cast<std::size_t>(j)]) = xF(j);
        }
        if ((x.array().abs() > 1.0 + 1e-12).any())
            continue;
        x = x.cwiseMax(-1.0).cwiseMin(1.0);
        if ((A * x - beta).cwiseAbs().maxCoeff() > tol)
            continue;
        const double d = (x - g).squaredNorm();
        if (d < best)
        {
            best = d;
            out = x;
        }
    }
    return std::isfinite(best);
}

/**
 * @brief Cloud of a set with linear constraint terms.
 *
 * Every binary assignment in index order; grid_res^n_e grid points per leaf, projected
 * exactly onto the leaf's constraint set. Points with residual above tol are dropped.
 */
inline Cloud enumerate(const HybridPolynomialZonotope& Z, int grid_res, double tol = 1e-9)
{
    if (!has_linear_constraints(Z))
        throw Error(ErrorCode::DimensionMismatch, "oracle enumerator requires linear constraint terms");
    const Index ne = Z.num_factors();
    const Index nb = Z.num_binary();
    // constraint matrix over factors
    Matrix A = Matrix::Zero(Z.num_constraints(), ne);
    for (Index j = 0; j < Z.num_constraint_terms(); ++j)
    {
        Index k = 0;
        Z.R().col(j).maxCoeff(&k);
        A.col(k) += Z.Ac().col(j);
    }
    std::uint64_t grid = 1;
    for (Index k = 0; k < ne; ++k)
        grid *= static_cast<std::uint64_t>(grid_res);

    Cloud out;
    for (std::uint64_t leaf = 0; leaf < (std::uint64_t{1} << nb); ++leaf)
    {
        Vector xb(nb);
        for (Index i = 0; i < nb; ++i)
            xb(i) = (leaf >> i) & 1u ? 1.0 : -1.0;
        Vector beta = Z.b();
        for (Index i = 0; i < nb; ++i)
            beta -= xb(i) * Z.Ab().col(i);
        for (std::uint64_t s = 0; s < grid; ++s)
        {
            Vector g(ne);
            std::uint64_t t = s;
            for (Index k = 0; k < ne; ++k)
            {
                const auto i = static_cast<double>(t % static_cast<std::uint64_t>(grid_res));
                g(k) = grid_res == 1 ? 0.0 : -1.0 + 2.0 * i / static_cast<double>(grid_res - 1);
                t /= static_cast<std::uint64_t>(grid_res);
            }
            Vector xi;
            if (!project(A, beta, g, xi, tol))
                continue;
            if (Z.num_constraints() > 0 && residual(Z, xi, xb).cwiseAbs().maxCoeff() > tol)
                continue;
            out.push_back(evaluate(Z, xi, xb));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Operation semantics on clouds

inline Cloud map_cloud(const Matrix& M, const Cloud& A)
{
    Cloud out;
    out.reserve(A.size());
    for (const Vector& p : A)
        out.push_back(M * p);
    return out;
}

inline Cloud translate_cloud(const Cloud& A, const Vector& t)
{
    Cloud out;
    for (const Vector& p : A)
        out.push_back(p + t);
    return out;
}

inline Cloud sum_cloud(const Cloud& A, const Cloud& B)
{
    Cloud out;
    out.reserve(A.size() * B.size());
    for (const Vector& p : A)
        for (const Vector& q : B)
            out.push_back(p + q);
    return out;
}

inline Cloud product_cloud(const Cloud& A, const Cloud& B)
{
    Cloud out;
    out.reserve(A.size() * B.size());
    for (const Vector& p : A)
    {
        for (const Vector& q : B)
        {
            Vector s(p.size() + q.size());
            s << p, q;
            out.push_back(std::move(s));
        }
    }
    return out;
}

inline Cloud union_cloud(const Cloud& A, const Cloud& B)
{
    Cloud out = A;
    out.insert(out.end(), B.begin(), B.end());
    return out;
}

inline Cloud filter_cloud(const Cloud& A, const std::function<bool(const Vector&)>& keep)
{
    Cloud out;
    for (const Vector& p : A)
    {
        if (keep(p))
            out.push_back(p);
    }
    return out;
}

inline Cloud halfspace_cloud(const Cloud& A, const Vector& l, double rho, double tol = 1e-9)
{
    return filter_cloud(A, [&](const Vector& p) { return l.dot(p) <= rho + tol; });
}

inline Cloud image_cloud(const std::function<Vector(const Vector&)>& f, const Cloud& A)
{
    Cloud out;
    out.reserve(A.size());
    for (const Vector& p : A)
        out.push_back(f(p));
    return out;
}

/// Exact membership in an unconstrained hybrid zonotope with square invertible Gc.
inline bool in_square_hz(const HybridPolynomialZonotope& Z, const Vector& p, double tol = 1e-9)
{
    const Eigen::FullPivLU<Matrix> lu(Z.Gc());
    const Index nb = Z.num_binary();
    for (std::uint64_t leaf = 0; leaf < (std::uint64_t{1} << nb); ++leaf)
    {
        Vector q = p - Z.c();
        for (Index i = 0; i < nb; ++i)
            q -= ((leaf >> i) & 1u ? 1.0 : -1.0) * Z.Gb().col(i);
        const Vector xi = lu.solve(q);
        if (xi.cwiseAbs().maxCoeff() <= 1.0 + tol)
            return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Cloud comparison

struct CloudMetrics
{
    double directed_hausdorff_ab = 0.0;
    double directed_hausdorff_ba = 0.0;
    /// fraction of b's points within epsilon of a
    double coverage_fraction = 1.0;
    bool a_empty = false;
    bool b_empty = false;

    double hausdorff() const { return std::max(directed_hausdorff_ab, directed_hausdorff_ba); }
    bool empty_agree() const { return a_empty == b_empty; }
    /// both empty, or both nonempty with symmetric Hausdorff at most tol
    bool within(double tol) const
    {
        if (a_empty || b_empty)
            return a_empty && b_empty;
        return hausdorff() <= tol;
    }
};

namespace detail
{

/// max over a in A of min over b in B of |a - b|; B sorted by first coordinate.
inline double directed(const Cloud& A, const Cloud& Bsorted)
{
    double worst = 0.0;
    for (const Vector& a : A)
    {
        const auto it = std::lower_bound(Bsorted.begin(), Bsorted.end(), a(0),
                                         [](const Vector& v, double x) { return v(0) < x; });
        double best = std::numeric_limits<double>::infinity();
        for (auto f = it; f != Bsorted.end(); ++f)
        {
            const double dx = (*f)(0) - a(0);
            if (dx * dx >= best)
                break;
            best = std::min(best, (*f - a).squaredNorm());
        }
        for (auto r = it; r != Bsorted.begin();)
        {
            --r;
            const double dx = a(0) - (*r)(0);
            if (dx * dx >= best)
                break;
            best = std::min(best, (*r - a).squaredNorm());
        }
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

inline Cloud sorted(Cloud c)
{
    std::sort(c.begin(), c.end(), [](const Vector& a, const Vector& b) { return a(0) < b(0); });
    return c;
}

} // namespace detail

/// Exact directed Hausdorff distance; throws EmptyCloud when either cloud is empty.
inline double directed_hausdorff(const Cloud& A, const Cloud& B)
{
    if (A.empty() || B.empty())
        throw Error(ErrorCode::EmptyCloud, "directed Hausdorff distance is undefined for an empty cloud");
    return detail::directed(A, detail::sorted(B));
}

inline CloudMetrics compare(const Cloud& A, const Cloud& B, double epsilon = 1e-6)
{
    CloudMetrics m;
    m.a_empty = A.empty();
    m.b_empty = B.empty();
    if (m.a_empty || m.b_empty)
    {
        const double inf = std::numeric_limits<double>::infinity();
        m.directed_hausdorff_ab = m.a_empty ? 0.0 : inf;
        m.directed_hausdorff_ba = m.b_empty ? 0.0 : inf;
        m.coverage_fraction = m.b_empty ? 1.0 : 0.0;
        return m;
    }
    if (A.front().size() != B.front().size())
        throw Error(ErrorCode::DimensionMismatch, "clouds have different dimensions");
    const Cloud As = detail::sorted(A);
    const Cloud Bs = detail::sorted(B);
    m.directed_hausdorff_ab = detail::directed(A, Bs);
    m.directed_hausdorff_ba = detail::directed(B, As);
    std::size_t covered = 0;
    for (const Vector& b : B)
    {
        if (detail::directed(Cloud{b}, As) <= epsilon)
            ++covered;
    }
    m.coverage_fraction = static_cast<double>(covered) / static_cast<double>(B.size());
    return m;
}

// ---------------------------------------------------------------------------
// Trajectories

/// Mode selected at x: lowest index whose guard holds (within tol); -1 when none.
inline int select_mode(const PwnaModel& model, const Vector& x, double tol = 1e-12)
{
    for (std::size_t i = 0; i < model.modes.size(); ++i)
    {
        const Polyhedron& g = model.modes[i].guard;
        bool inside = true;
        for (Index r = 0; r < g.L.rows() && inside; ++r)
        {
            double s = 0.0;
            for (Index j = 0; j < g.L.cols(); ++j)
                s += g.L(r, j) * x(j);
            inside = s <= g.rho(r) + tol;
        }
        if (inside)
            return static_cast<int>(i);
    }
    return -1;
}

/// x^T Q_r x + (A x)_r + d_r, written out elementwise.
inline Vector apply_dynamics(const QuadraticAffineMap& f, const Vector& x)
{
    Vector y(f.d.size());
    for (Index r = 0; r < y.size(); ++r)
    {
        double v = f.d(r);
        for (Index j = 0; j < x.size(); ++j)
            v += f.A(r, j) * x(j);
        const Matrix& Q = f.Q[static_cast<std::size_t>(r)];
        for (Index i = 0; i < x.size(); ++i)
            for (Index j = 0; j < x.size(); ++j)
                v += x(i) * Q(i, j) * x(j);
        y(r) = v;
    }
    return y;
}

/**
 * @brief States x(0..N) of the piecewise system from x0.
 *
 * Boundary ties go to the lowest mode index. Models with an input set need one input
 * per step in `inputs`. Throws NoModeContains when a state leaves every guard.
 */
inline Cloud simulate(const PwnaModel& model, const Vector& x0, int N, const std::vector<Vector>& inputs = {})
{
    if (model.input_set && static_cast<int>(inputs.size()) < N)
        throw Error(ErrorCode::LengthMismatch, "simulation needs one input per step");
    Cloud traj{x0};
    for (int k = 0; k < N; ++k)
    {
        const Vector& x = traj.back();
        const int mode = select_mode(model, x);
        if (mode < 0)
            throw Error(ErrorCode::NoModeContains, "state at step " + std::to_string(k) + " lies in no guard");
        Vector arg = x;
        if (model.input_set)
        {
            arg.resize(x.size() + inputs[static_cast<std::size_t>(k)].size());
            arg << x, inputs[static_cast<std::size_t>(k)];
        }
        traj.push_back(apply_dynamics(model.modes[static_cast<std::size_t>(mode)].dynamics, arg));
    }
    return traj;
}

} // namespace hpz::oracle

#endif
