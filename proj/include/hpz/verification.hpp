#ifndef HPZ_VERIFICATION_HPP_
#define HPZ_VERIFICATION_HPP_

/**
 * @file verification.hpp
 * @brief Randomized oracle-equivalence checks for every set operation.
 *
 * Instances are generated with planted constraints: a random assignment is drawn first
 * and b is chosen so that it is feasible, so no instance is empty by accident.
 * Constraint terms are linear in the factors so the oracle can project exactly.
 * Constructed sets are sampled grid-only with the same grid the oracle uses, which
 * makes the two clouds comparable point for point.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "feasibility.hpp"
#include "nonlinear.hpp"
#include "ops.hpp"
#include "oracle.hpp"
#include "reach.hpp"
#include "sample.hpp"
#include "set.hpp"

namespace hpz::verify
{

using Rng = std::mt19937_64;

struct Instance
{
    HybridPolynomialZonotope set;
    FactorAssignment planted;
};

struct GenSpec
{
    Index n = 2;
    Index ne_max = 3;
    Index ng_max = 4;
    Index nb_max = 2;
    Index nc_max = 2;
    int deg_max = 3;
    /// E = R = I: a hybrid zonotope
    bool identity_exponents = false;
    /// polynomial constraint terms (the oracle enumerator cannot handle these)
    bool polynomial_constraints = false;
};

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline Index uniform_int(Rng& rng, Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); }

inline Matrix random_matrix(Rng& rng, Index r, Index c, double scale = 1.0)
{
    Matrix M(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j)
            M(i, j) = uniform(rng, -scale, scale);
    return M;
}

/// Exponent matrix whose first ne columns give every factor its own monomial.
inline IntMatrix random_exponents(Rng& rng, Index ne, Index cols, int deg_max)
{
    IntMatrix E = IntMatrix::Zero(ne, cols);
    for (Index j = 0; j < cols; ++j)
    {
        if (j < ne)
            E(j, j) = static_cast<int>(uniform_int(rng, 1, deg_max));
        for (Index k = 0; k < ne; ++k)
        {
            if (j < ne && k == j)
                continue;
            if (uniform(rng, 0.0, 1.0) < 0.35)
                E(k, j) = static_cast<int>(uniform_int(rng, 1, deg_max));
        }
        if (E.col(j).sum() == 0)
            E(uniform_int(rng, 0, ne - 1), j) = static_cast<int>(uniform_int(rng, 1, deg_max));
    }
    return E;
}

inline Instance random_instance(Rng& rng, const GenSpec& spec)
{
    const Index n = spec.n;
    const Index ne = uniform_int(rng, 1, spec.ne_max);
    const Index ng = spec.identity_exponents ? ne : uniform_int(rng, ne, std::max(ne, spec.ng_max));
    const Index nb = uniform_int(rng, 0, spec.nb_max);
    const Index nc = uniform_int(rng, 0, spec.nc_max);

    const Vector c = random_matrix(rng, n, 1);
    const Matrix Gc = random_matrix(rng, n, ng);
    const Matrix Gb = random_matrix(rng, n, nb, 1.5);
    const IntMatrix E = spec.identity_exponents ? IntMatrix(IntMatrix::Identity(ne, ne))
                                                : random_exponents(rng, ne, ng, spec.deg_max);
    IntMatrix R;
    if (spec.polynomial_constraints && !spec.identity_exponents)
        R = random_exponents(rng, ne, uniform_int(rng, ne, ne + 2), spec.deg_max);
    else
        R = IntMatrix::Identity(ne, ne);
    const Matrix Ac = random_matrix(rng, nc, R.cols());
    const Matrix Ab = random_matrix(rng, nc, nb);

    FactorAssignment a;
    a.continuous = random_matrix(rng, ne, 1, 0.7);
    a.binary = Vector(nb);
    for (Index i = 0; i < nb; ++i)
        a.binary(i) = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    Vector b = Vector::Zero(nc);
    if (nc > 0)
    {
        b = Ac * detail::monomials(R, a.continuous);
        if (nb > 0)
            b += Ab * a.binary;
    }
    return {HybridPolynomialZonotope(c, Gc, Gb, E, Ac, Ab, b, R), a};
}

inline SampleOptions grid_only(int grid_res)
{
    SampleOptions o;
    o.grid_res = grid_res;
    o.max_points = std::size_t{1} << 22;
    o.random_fill = false;
    return o;
}

inline oracle::Cloud cloud_of(const HybridPolynomialZonotope& Z, int grid_res)
{
    return sample(Z, grid_only(grid_res)).points;
}

/// Block counts (n, n_g, n_b, n_c, n_e, n_q).
struct Sizes
{
    Index n = 0, ng = 0, nb = 0, nc = 0, ne = 0, nq = 0;
    bool operator==(const Sizes&) const = default;
    std::string str() const
    {
        return "(n " + std::to_string(n) + ", ng " + std::to_string(ng) + ", nb " + std::to_string(nb) + ", nc " +
               std::to_string(nc) + ", ne " + std::to_string(ne) + ", nq " + std::to_string(nq) + ")";
    }
};

inline Sizes sizes(const HybridPolynomialZonotope& Z)
{
    return {Z.dim(), Z.num_generators(), Z.num_binary(), Z.num_constraints(), Z.num_factors(),
            Z.num_constraint_terms()};
}

/// Outcome of one operation over many trials.
struct CheckResult
{
    std::string name;
    int trials = 0;
    int cloud_passed = 0;
    int sizes_passed = 0;
    int constructive_passed = 0;
    int constructive_trials = 0;
    double worst_hausdorff = 0.0;
    double worst_residual = 0.0;
    double seconds = 0.0;
    std::string first_failure;

    bool ok() const
    {
        return cloud_passed == trials && sizes_passed == trials && constructive_passed == constructive_trials;
    }
};

struct TrialRecord
{
    CheckResult& res;

    void cloud(const oracle::Cloud& expected, const oracle::Cloud& got, double tol, const std::string& what)
    {
        const oracle::CloudMetrics m = oracle::compare(expected, got);
        if (m.within(tol))
        {
            ++res.cloud_passed;
            if (!m.a_empty)
                res.worst_hausdorff = std::max(res.worst_hausdorff, m.hausdorff());
        }
        else
        {
            res.worst_hausdorff = std::max(res.worst_hausdorff, m.hausdorff());
            fail(what + ": clouds differ (oracle " + std::to_string(expected.size()) + " pts, set " +
                 std::to_string(got.size()) + " pts, Hausdorff " + std::to_string(m.hausdorff()) + ")");
        }
    }

    void size(const Sizes& expected, const Sizes& got, const std::string& what)
    {
        if (expected == got)
            ++res.sizes_passed;
        else
            fail(what + ": sizes " + got.str() + " expected " + expected.str());
    }

    /// Evaluates `a` on Z and checks point and feasibility.
    void constructive(const HybridPolynomialZonotope& Z, const FactorAssignment& a, const Vector& point,
                      const std::string& what, double tol = 1e-12)
    {
        ++res.constructive_trials;
        const bool in_box = (a.continuous.size() == 0 || a.continuous.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        const Vector r = constraint_residual(Z, a);
        const double rinf = r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, point.cwiseAbs().maxCoeff());
        const double perr = (evaluate(Z, a) - point).cwiseAbs().maxCoeff() / scale;
        res.worst_residual = std::max({res.worst_residual, rinf, perr});
        if (in_box && rinf <= tol && perr <= tol)
            ++res.constructive_passed;
        else
            fail(what + ": constructive assignment residual " + std::to_string(rinf) + ", point error " +
                 std::to_string(perr) + (in_box ? "" : ", outside the factor box"));
    }

    void fail(const std::string& msg)
    {
        if (res.first_failure.empty())
            res.first_failure = msg;
    }
};

inline FactorAssignment concat(const FactorAssignment& a, const FactorAssignment& b)
{
    FactorAssignment out;
    out.continuous.resize(a.continuous.size() + b.continuous.size());
    out.continuous << a.continuous, b.continuous;
    out.binary.resize(a.binary.size() + b.binary.size());
    out.binary << a.binary, b.binary;
    return out;
}

struct SuiteOptions
{
    int trials = 50;
    std::uint64_t seed = 2024;
    int grid_res = 4;
    /// grid for two-operand operations whose clouds multiply
    int grid_res_pair = 3;
    double tol = 1e-6;
};

template <typename Body>
CheckResult run_check(const std::string& name, const SuiteOptions& opt, std::uint64_t salt, Body&& body)
{
    CheckResult res;
    res.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    for (int t = 0; t < opt.trials; ++t)
    {
        Rng rng(opt.seed * 1000003ULL + salt * 7919ULL + static_cast<std::uint64_t>(t));
        TrialRecord rec{res};
        ++res.trials;
        try
        {
            body(rng, rec);
        }
        catch (const std::exception& e)
        {
            rec.fail(std::string("exception: ") + e.what());
        }
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

inline GenSpec spec_for(Rng& rng, const SuiteOptions&)
{
    GenSpec s;
    s.n = uniform_int(rng, 2, 3);
    return s;
}

inline CheckResult check_linear_map(const SuiteOptions& opt)
{
    return run_check("linear_map", opt, 1, [&](Rng& rng, TrialRecord& rec)
    {
        const GenSpec spec = spec_for(rng, opt);
        const Instance I = random_instance(rng, spec);
        const Index m = uniform_int(rng, 1, 3);
        const Matrix M = random_matrix(rng, m, spec.n);
        const HybridPolynomialZonotope S = linear_map(M, I.set);
        rec.cloud(oracle::map_cloud(M, oracle::enumerate(I.set, opt.grid_res)), cloud_of(S, opt.grid_res), opt.tol,
                  "linear_map");
        Sizes want = sizes(I.set);
        want.n = m;
        rec.size(want, sizes(S), "linear_map");
        rec.constructive(S, I.planted, M * oracle::evaluate(I.set, I.planted.continuous, I.planted.binary),
                         "linear_map");
    });
}

inline CheckResult check_minkowski_sum(const SuiteOptions& opt)
{
    return run_check("minkowski_sum", opt, 2, [&](Rng& rng, TrialRecord& rec)
    {
        const GenSpec spec = spec_for(rng, opt);
        const Instance A = random_instance(rng, spec);
        const Instance B = random_instance(rng, spec);
        const HybridPolynomialZonotope S = minkowski_sum(A.set, B.set);
        const int g = opt.grid_res_pair;
        rec.cloud(oracle::sum_cloud(oracle::enumerate(A.set, g), oracle::enumerate(B.set, g)), cloud_of(S, g), opt.tol,
                  "minkowski_sum");
        const Sizes a = sizes(A.set), b = sizes(B.set);
        rec.size({a.n, a.ng + b.ng, a.nb + b.nb, a.nc + b.nc, a.ne + b.ne, a.nq + b.nq}, sizes(S), "minkowski_sum");
        const Vector p = oracle::evaluate(A.set, A.planted.continuous, A.planted.binary) +
                         oracle::evaluate(B.set, B.planted.continuous, B.planted.binary);
        rec.constructive(S, concat(A.planted, B.planted), p, "minkowski_sum");
    });
}

inline CheckResult check_cartesian_product(const SuiteOptions& opt)
{
    return run_check("cartesian_product", opt, 3, [&](Rng& rng, TrialRecord& rec)
    {
        GenSpec sa = spec_for(rng, opt), sb = spec_for(rng, opt);
        sa.n = uniform_int(rng, 1, 2);
        sb.n = uniform_int(rng, 1, 2);
        const Instance A = random_instance(rng, sa);
        const Instance B = random_instance(rng, sb);
        const HybridPolynomialZonotope S = cartesian_product(A.set, B.set);
        const int g = opt.grid_res_pair;
        rec.cloud(oracle::product_cloud(oracle::enumerate(A.set, g), oracle::enumerate(B.set, g)), cloud_of(S, g),
                  opt.tol, "cartesian_product");
        const Sizes a = sizes(A.set), b = sizes(B.set);
        rec.size({a.n + b.n, a.ng + b.ng, a.nb + b.nb, a.nc + b.nc, a.ne + b.ne, a.nq + b.nq}, sizes(S),
                 "cartesian_product");
        Vector p(a.n + b.n);
        p << oracle::evaluate(A.set, A.planted.continuous, A.planted.binary),
            oracle::evaluate(B.set, B.planted.continuous, B.planted.binary);
        rec.constructive(S, concat(A.planted, B.planted), p, "cartesian_product");
    });
}

/// Unconstrained hybrid zonotope with square invertible Gc containing the point p.
inline Instance random_square_hz_containing(Rng& rng, const Vector& p, Index nb_max = 1)
{
    const Index n = p.size();
    Matrix G;
    do
    {
        G = random_matrix(rng, n, n, 1.2);
    } while (std::abs(G.determinant()) < 0.2);
    const Index nb = uniform_int(rng, 0, nb_max);
    const Matrix Gb = random_matrix(rng, n, nb, 1.0);
    FactorAssignment a;
    a.continuous = random_matrix(rng, n, 1, 0.8);
    a.binary = Vector(nb);
    for (Index i = 0; i < nb; ++i)
        a.binary(i) = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    Vector c = p - G * a.continuous;
    if (nb > 0)
        c -= Gb * a.binary;
    return {from_hybrid_zonotope(c, G, Gb, Matrix(0, n), Matrix(0, nb), Vector(0)), a};
}

inline CheckResult check_generalized_intersection(const SuiteOptions& opt)
{
    return run_check("generalized_intersection", opt, 4, [&](Rng& rng, TrialRecord& rec)
    {
        const GenSpec spec = spec_for(rng, opt);
        const Instance A = random_instance(rng, spec);
        const Vector p = oracle::evaluate(A.set, A.planted.continuous, A.planted.binary);
        const Instance B = random_square_hz_containing(rng, p);
        const HybridPolynomialZonotope S = generalized_intersection(A.set, B.set);
        const oracle::Cloud expect = oracle::filter_cloud(oracle::enumerate(A.set, opt.grid_res), [&](const Vector& x)
                                                          { return oracle::in_square_hz(B.set, x); });
        rec.cloud(expect, cloud_of(S, opt.grid_res), opt.tol, "generalized_intersection");
        const Sizes a = sizes(A.set), b = sizes(B.set);
        rec.size({a.n, a.ng + b.ne, a.nb + b.nb, a.nc + b.nc + a.n, a.ne + b.ne, a.nq + b.nq + a.ng + b.ng}, sizes(S),
                 "generalized_intersection");
        rec.constructive(S, concat(A.planted, B.planted), p, "generalized_intersection", 1e-11);
    });
}

inline CheckResult check_halfspace_intersection(const SuiteOptions& opt)
{
    return run_check("halfspace_intersection", opt, 5, [&](Rng& rng, TrialRecord& rec)
    {
        const GenSpec spec = spec_for(rng, opt);
        const Instance A = random_instance(rng, spec);
        Halfspace H;
        Matrix M = Matrix::Identity(spec.n, spec.n);
        if (uniform(rng, 0.0, 1.0) < 0.5)
        {
            M = random_matrix(rng, uniform_int(rng, 1, 3), spec.n);
            H.M = M;
        }
        H.l = random_matrix(rng, M.rows(), 1);
        if (H.l.norm() < 1e-3)
            H.l(0) = 1.0;
        const SupportBounds sb = functional_bounds(A.set, H.l, M);
        H.rho = sb.lower + uniform(rng, -0.2, 1.2) * (sb.upper - sb.lower);
        const HybridPolynomialZonotope S = halfspace_intersection(A.set, H);
        const Vector w = M.transpose() * H.l;
        rec.cloud(oracle::halfspace_cloud(oracle::enumerate(A.set, opt.grid_res), w, H.rho),
                  cloud_of(S, opt.grid_res), opt.tol, "halfspace_intersection");
        const Sizes a = sizes(A.set);
        rec.size({a.n, a.ng + 1, a.nb, a.nc + 1, a.ne + 1, a.nq + a.ng + 1}, sizes(S), "halfspace_intersection");
        const Vector p = oracle::evaluate(A.set, A.planted.continuous, A.planted.binary);
        const double v = w.dot(p);
        if (v <= H.rho && H.rho >= sb.lower)
        {
            FactorAssignment a = A.planted;
            a.continuous.conservativeResize(a.continuous.size() + 1);
            a.continuous(a.continuous.size() - 1) =
                H.rho > sb.lower ? (v - 0.5 * (H.rho + sb.lower)) / (0.5 * (H.rho - sb.lower)) : -1.0;
            rec.constructive(S, a, p, "halfspace_intersection", 1e-11);
        }
    });
}

/// Assignment of the union built from an assignment of one operand: the other operand's
/// continuous factors are 0, its binaries -1, and each slack solves its own coupling row.
inline FactorAssignment union_assignment(const HybridPolynomialZonotope& U, const HybridPolynomialZonotope& Z1,
                                         const HybridPolynomialZonotope& Z2, const FactorAssignment& a, bool first)
{
    const Index ne1 = Z1.num_factors(), ne2 = Z2.num_factors();
    const Index nb1 = Z1.num_binary(), nb2 = Z2.num_binary();
    FactorAssignment u;
    u.continuous = Vector::Zero(U.num_factors());
    u.binary = -Vector::Ones(U.num_binary());
    if (first)
    {
        u.continuous.head(ne1) = a.continuous;
        u.binary.head(nb1) = a.binary;
        u.binary(nb1 + nb2) = 1.0;
    }
    else
    {
        u.continuous.segment(ne1, ne2) = a.continuous;
        u.binary.segment(nb1, nb2) = a.binary;
        u.binary(nb1 + nb2) = -1.0;
    }
    // the slack of coupling row i has coefficient 1 and appears nowhere else
    const Index row0 = Z1.num_constraints() + Z2.num_constraints();
    const Vector r = constraint_residual(U, u);
    const Index nr = U.num_factors() - ne1 - ne2;
    for (Index i = 0; i < nr; ++i)
        u.continuous(ne1 + ne2 + i) = -r(row0 + i);
    return u;
}

inline CheckResult check_union(const SuiteOptions& opt)
{
    return run_check("union", opt, 6, [&](Rng& rng, TrialRecord& rec)
    {
        const GenSpec spec = spec_for(rng, opt);
        const Instance A = random_instance(rng, spec);
        const Instance B = random_instance(rng, spec);
        const HybridPolynomialZonotope S = union_of(A.set, B.set);
        rec.cloud(oracle::union_cloud(oracle::enumerate(A.set, opt.grid_res), oracle::enumerate(B.set, opt.grid_res)),
                  cloud_of(S, opt.grid_res), opt.tol, "union");
        const Sizes a = sizes(A.set), b = sizes(B.set);
        const Index nr = 2 * (a.ne + b.ne + a.nb + b.nb);
        rec.size({a.n, a.ng + b.ng + nr, a.nb + b.nb + 1, a.nc + b.nc + nr, a.ne + b.ne + nr,
                  a.nq + b.nq + a.ne + b.ne + nr},
                 sizes(S), "union");
        rec.constructive(S, union_assignment(S, A.set, B.set, A.planted, true),
                         oracle::evaluate(A.set, A.planted.continuous, A.planted.binary), "union (first operand)");
        rec.constructive(S, union_assignment(S, A.set, B.set, B.planted, false),
                         oracle::evaluate(B.set, B.planted.continuous, B.planted.binary), "union (second operand)");
    });
}

inline CheckResult check_compact(const SuiteOptions& opt)
{
    return run_check("compact", opt, 7, [&](Rng& rng, TrialRecord& rec)
    {
        const GenSpec spec = spec_for(rng, opt);
        const Instance I = random_instance(rng, spec);
        const HybridPolynomialZonotope& Z = I.set;
        // add a duplicate monomial, a constant column, a zero column and an unused factor
        const Index ng = Z.num_generators(), ne = Z.num_factors();
        Matrix G(Z.dim(), ng + 3);
        G << Z.Gc(), random_matrix(rng, Z.dim(), 1), random_matrix(rng, Z.dim(), 1), Matrix::Zero(Z.dim(), 1);
        IntMatrix E = IntMatrix::Zero(ne + 1, ng + 3);
        E.topLeftCorner(ne, ng) = Z.E();
        E.block(0, ng, ne, 1) = Z.E().col(uniform_int(rng, 0, ng - 1));
        E(0, ng + 2) = 1;
        IntMatrix R = IntMatrix::Zero(ne + 1, Z.num_constraint_terms());
        R.topRows(ne) = Z.R();
        const HybridPolynomialZonotope Zx(Z.c(), G, Z.Gb(), E, Z.Ac(), Z.Ab(), Z.b(), R);
        const HybridPolynomialZonotope C = compact(Zx);
        rec.cloud(oracle::enumerate(Zx, opt.grid_res), cloud_of(C, opt.grid_res), opt.tol, "compact");
        if (compact(C) == C && C.num_factors() == ne && C.num_generators() <= ng)
            ++rec.res.sizes_passed;
        else
            rec.fail("compact: not idempotent or factors/generators not reduced " + sizes(C).str());
        FactorAssignment a = I.planted;
        rec.constructive(C, a, oracle::evaluate(Zx, (Vector(ne + 1) << a.continuous, 0.0).finished(), a.binary),
                         "compact", 1e-11);
    });
}

inline QuadraticAffineMap random_quadratic(Rng& rng, Index n)
{
    QuadraticAffineMap f;
    for (Index r = 0; r < n; ++r)
        f.Q.push_back(random_matrix(rng, n, n, 0.4));
    f.A = random_matrix(rng, n, n);
    f.d = random_matrix(rng, n, 1);
    return f;
}

inline CheckResult check_nonlinear(const SuiteOptions& opt)
{
    return run_check("quadratic_map", opt, 8, [&](Rng& rng, TrialRecord& rec)
    {
        GenSpec spec = spec_for(rng, opt);
        spec.nb_max = 2;
        const Instance I = random_instance(rng, spec);
        const QuadraticAffineMap f = random_quadratic(rng, spec.n);
        const HybridPolynomialZonotope S = nonlinear_step(f, I.set);
        const auto image = [&](const Vector& x) { return oracle::apply_dynamics(f, x); };
        rec.cloud(oracle::image_cloud(image, oracle::enumerate(I.set, opt.grid_res)), cloud_of(S, opt.grid_res),
                  opt.tol, "quadratic_map");
        // per-leaf exactness on random assignments
        const HybridPolynomialZonotope L = fix_binaries(I.set, I.planted.binary);
        const HybridPolynomialZonotope Y = quadratic_map_leaf(f, L);
        bool sizes_ok = Y.num_binary() == 0 && Y.num_factors() == L.num_factors();
        if (sizes_ok)
        {
            for (int k = 0; k < 200; ++k)
            {
                const Vector xi = random_matrix(rng, L.num_factors(), 1);
                const Vector want = image(oracle::evaluate(L, xi, Vector(0)));
                const double err = (evaluate(Y, {xi, Vector(0)}) - want).norm();
                rec.res.worst_residual = std::max(rec.res.worst_residual, err);
                if (err > 1e-9 * std::max(1.0, want.norm()))
                {
                    sizes_ok = false;
                    rec.fail("quadratic_map: leaf image differs by " + std::to_string(err));
                    break;
                }
            }
        }
        if (sizes_ok)
            ++rec.res.sizes_passed;
        else
            rec.fail("quadratic_map: leaf image structure or values wrong");
    });
}

inline std::vector<CheckResult> run_suite(const SuiteOptions& opt = {})
{
    return {check_linear_map(opt),          check_minkowski_sum(opt),          check_cartesian_product(opt),
            check_generalized_intersection(opt), check_halfspace_intersection(opt), check_union(opt),
            check_compact(opt),             check_nonlinear(opt)};
}

/// Monte-Carlo containment of simulated trajectories in a reach sequence.
struct ContainmentReport
{
    int trajectories = 0;
    int checks = 0;
    int failures = 0;
    /// trajectories that left every guard before the horizon
    int escaped = 0;
    double worst_residual = 0.0;
    std::string first_failure;

    bool ok() const { return failures == 0 && escaped == 0; }
};

/// Random points of Z: the center of each leaf's factor box plus uniform draws, polished onto the constraints.
inline std::vector<Vector> random_points(const HybridPolynomialZonotope& Z, int count, std::uint64_t seed)
{
    SampleOptions o;
    o.grid_res = 1;
    o.max_points = static_cast<std::size_t>(count);
    o.seed = seed;
    std::vector<Vector> pts = sample(Z, o).points;
    std::shuffle(pts.begin(), pts.end(), Rng(seed));
    if (pts.size() > static_cast<std::size_t>(count))
        pts.resize(static_cast<std::size_t>(count));
    return pts;
}

/**
 * @brief Simulates `count` trajectories from random initial states and checks every state
 * against the matching reach set with approx_member.
 */
inline ContainmentReport check_containment(const PwnaModel& model, const std::vector<HybridPolynomialZonotope>& sets,
                                           int count, std::uint64_t seed, double tol = 1e-6)
{
    ContainmentReport rep;
    const int N = static_cast<int>(sets.size()) - 1;
    const std::vector<Vector> x0 = random_points(model.initial_set, count, seed);
    MemberOptions mo;
    mo.leaf_cap = model.sampling.leaf_cap;
    for (std::size_t t = 0; t < x0.size(); ++t)
    {
        std::vector<Vector> inputs;
        if (model.input_set)
            inputs = random_points(*model.input_set, std::max(N, 1), seed + 1000003ULL * (t + 1));
        while (model.input_set && static_cast<int>(inputs.size()) < N)
            inputs.push_back(inputs.empty() ? Vector(model.input_set->c()) : inputs.back());
        ++rep.trajectories;
        oracle::Cloud traj;
        try
        {
            traj = oracle::simulate(model, x0[t], N, inputs);
        }
        catch (const Error& e)
        {
            ++rep.escaped;
            if (rep.first_failure.empty())
                rep.first_failure = "trajectory " + std::to_string(t) + ": " + e.what();
            continue;
        }
        for (int k = 0; k <= N; ++k)
        {
            ++rep.checks;
            const Membership m = approx_member(sets[static_cast<std::size_t>(k)], traj[static_cast<std::size_t>(k)],
                                               tol, mo);
            if (m.member)
            {
                rep.worst_residual = std::max(rep.worst_residual, m.residual);
                continue;
            }
            ++rep.failures;
            if (rep.first_failure.empty())
                rep.first_failure = "trajectory " + std::to_string(t) + " step " + std::to_string(k) +
                                    ": no witness (best residual " + std::to_string(m.residual) + ")";
        }
    }
    return rep;
}

} // namespace hpz::verify

#endif
