#ifndef HPZ_SOLVERS_HPP_
#define HPZ_SOLVERS_HPP_

// Local solvers over the unit box used by sampling and membership.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "set.hpp"

namespace hpz::detail
{

/// residual(xi) = coef * m(xi) - target, with m the monomials of `exps`.
struct PolySystem
{
    Matrix coef;
    IntMatrix exps;
    Vector target;

    Index rows() const { return coef.rows(); }

    Vector residual(const Vector& xi) const
    {
        Vector r = -target;
        if (coef.cols() > 0)
            r += coef * monomials(exps, xi);
        return r;
    }

    /// Jacobian restricted to the factor indices in `vars`.
    Matrix jacobian(const Vector& xi, const std::vector<Index>& vars) const
    {
        const Index q = exps.cols();
        Matrix dm(q, static_cast<Index>(vars.size()));
        for (Index v = 0; v < static_cast<Index>(vars.size()); ++v)
        {
            const Index k = vars[static_cast<std::size_t>(v)];
            for (Index j = 0; j < q; ++j)
            {
                const int e = exps(k, j);
                if (e == 0)
                {
                    dm(j, v) = 0.0;
                    continue;
                }
                double d = e * ipow(xi(k), e - 1);
                for (Index l = 0; l < exps.rows() && d != 0.0; ++l)
                {
                    if (l != k && exps(l, j) != 0)
                        d *= ipow(xi(l), exps(l, j));
                }
                dm(j, v) = d;
            }
        }
        return coef * dm;
    }

    /// True when every column has total degree at most one.
    bool is_affine() const
    {
        for (Index j = 0; j < exps.cols(); ++j)
        {
            if (exps.col(j).sum() > 1)
                return false;
        }
        return true;
    }
};

inline double clamp_unit(double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); }

struct SolveResult
{
    Vector xi;
    double residual_inf = 0.0;
};

/// Projected Gauss-Newton with Armijo backtracking on 0.5*|r|^2. Only the factors in
/// `vars` move; they stay in [-1,1]. Bound-active factors whose descent direction points
/// out of the box are frozen for the step.
inline SolveResult gauss_newton(const PolySystem& sys, Vector xi, const std::vector<Index>& vars, int max_iter)
{
    Vector r = sys.residual(xi);
    auto inf_norm = [](const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); };
    double f = 0.5 * r.squaredNorm();
    for (int it = 0; it < max_iter && inf_norm(r) > 1e-14 && !vars.empty(); ++it)
    {
        const Matrix J = sys.jacobian(xi, vars);
        const Vector grad = J.transpose() * r;
        std::vector<Index> free;
        for (Index v = 0; v < static_cast<Index>(vars.size()); ++v)
        {
            const double x = xi(vars[static_cast<std::size_t>(v)]);
            const bool out_hi = x >= 1.0 && grad(v) < 0.0;
            const bool out_lo = x <= -1.0 && grad(v) > 0.0;
            if (!out_hi && !out_lo)
                free.push_back(v);
        }
        if (free.empty())
            break;
        Matrix Jf(J.rows(), static_cast<Index>(free.size()));
        for (Index i = 0; i < static_cast<Index>(free.size()); ++i)
            Jf.col(i) = J.col(free[static_cast<std::size_t>(i)]);
        const Vector step = -Jf.completeOrthogonalDecomposition().solve(r);
        if (!step.allFinite() || step.norm() < 1e-16)
            break;
        double slope = 0.0;
        for (Index i = 0; i < static_cast<Index>(free.size()); ++i)
            slope += grad(free[static_cast<std::size_t>(i)]) * step(i);

        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, t *= 0.5)
        {
            Vector cand = xi;
            for (Index i = 0; i < static_cast<Index>(free.size()); ++i)
            {
                const Index k = vars[static_cast<std::size_t>(free[static_cast<std::size_t>(i)])];
                cand(k) = clamp_unit(cand(k) + t * step(i));
            }
            const Vector rc = sys.residual(cand);
            const double fc = 0.5 * rc.squaredNorm();
            if (fc <= f + 1e-4 * t * std::min(slope, 0.0) && fc < f)
            {
                xi = std::move(cand);
                r = rc;
                f = fc;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;
    }
    return {std::move(xi), inf_norm(r)};
}

/// Keeps the bound pattern of x and solves the equality part exactly. The Newton loop
/// stops at a residual near 1e-12, which ill-conditioned rows amplify in x.
inline void polish_active_set(const Matrix& A, const Vector& beta, const Vector& g, Vector& x, Vector& grad)
{
    const Index k = A.cols();
    std::vector<Index> free;
    Vector rhs = beta;
    for (Index i = 0; i < k; ++i)
    {
        if (x(i) > -1.0 && x(i) < 1.0)
            free.push_back(i);
        else
            rhs -= A.col(i) * x(i);
    }
    if (free.empty())
        return;
    const Index nf = static_cast<Index>(free.size());
    Matrix AF(A.rows(), nf);
    Vector gF(nf);
    for (Index j = 0; j < nf; ++j)
    {
        AF.col(j) = A.col(free[static_cast<std::size_t>(j)]);
        gF(j) = g(free[static_cast<std::size_t>(j)]);
    }
    const Vector lam = (AF * AF.transpose()).completeOrthogonalDecomposition().solve(rhs - AF * gF);
    const Vector xF = gF + AF.transpose() * lam;
    if ((xF.array().abs() > 1.0 + 1e-12).any() || !xF.allFinite())
        return;
    Vector cand = x;
    for (Index j = 0; j < nf; ++j)
        cand(free[static_cast<std::size_t>(j)]) = clamp_unit(xF(j));
    const Vector gc = beta - A * cand;
    if (gc.cwiseAbs().maxCoeff() <= grad.cwiseAbs().maxCoeff())
    {
        x = cand;
        grad = gc;
    }
}

/// Euclidean projection of `g` onto {x in [-1,1]^k : A x = beta}, by semismooth Newton
/// ascent on the dual. The returned residual tells whether the feasible set was reached.
inline SolveResult project_box_affine(const Matrix& A, const Vector& beta, const Vector& g, int max_iter = 200)
{
    const Index m = A.rows();
    const Index k = A.cols();
    auto primal = [&](const Vector& lam)
    {
        Vector x = g + A.transpose() * lam;
        for (Index i = 0; i < k; ++i)
            x(i) = clamp_unit(x(i));
        return x;
    };
    auto dual = [&](const Vector& lam, const Vector& x)
    { return 0.5 * (x - g).squaredNorm() + lam.dot(beta - A * x); };

    Vector lam = Vector::Zero(m);
    Vector x = primal(lam);
    Vector grad = beta - A * x;
    double d = dual(lam, x);
    for (int it = 0; it < max_iter; ++it)
    {
        if (m == 0 || grad.cwiseAbs().maxCoeff() <= 1e-14)
            break;
        const Vector z = g + A.transpose() * lam;
        Matrix H = Matrix::Zero(m, m);
        for (Index i = 0; i < k; ++i)
        {
            if (z(i) > -1.0 && z(i) < 1.0)
                H.noalias() += A.col(i) * A.col(i).transpose();
        }
        H.diagonal().array() += 1e-12;
        Vector dir = H.ldlt().solve(grad);
        if (!dir.allFinite())
            dir = grad;
        double t = 1.0;
        bool accepted = false;
        const double slope = grad.dot(dir);
        for (int ls = 0; ls < 60; ++ls, t *= 0.5)
        {
            const Vector lc = lam + t * dir;
            const Vector xc = primal(lc);
            const double dc = dual(lc, xc);
            if (dc >= d + 1e-6 * t * slope && dc > d)
            {
                lam = lc;
                x = xc;
                d = dc;
                accepted = true;
                break;
            }
        }
        grad = beta - A * x;
        if (!accepted)
            break;
    }
    if (m > 0)
        polish_active_set(A, beta, g, x, grad);
    return {x, m == 0 ? 0.0 : grad.cwiseAbs().maxCoeff()};
}

} // namespace hpz::detail

#endif
