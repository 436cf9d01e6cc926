#ifndef HPZ_OPS_HPP_
#define HPZ_OPS_HPP_

/**
 * @file ops.hpp
 * @brief Closed-form set operations on hybrid polynomial zonotopes.
 *
 * Every operation assembles the result blocks directly; no sampling or optimization
 * is involved. Factor spaces of the operands are concatenated, never shared.
 */

#include <cmath>
#include <vector>

#include "set.hpp"

namespace hpz
{

/// Halfspace {x : l^T M x <= rho}. M defaults to the identity (empty matrix).
struct Halfspace
{
    Vector l;
    double rho = 0.0;
    Matrix M;
};

/// Guaranteed bounds [lower, upper] on l^T M x over the set.
struct SupportBounds
{
    double lower = 0.0;
    double upper = 0.0;
};

namespace detail
{

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
blkdiag(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
        const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& B)
{
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(A.rows() + B.rows(), A.cols() + B.cols());
    out.topLeftCorner(A.rows(), A.cols()) = A;
    out.bottomRightCorner(B.rows(), B.cols()) = B;
    return out;
}

inline Matrix hcat(const Matrix& A, const Matrix& B)
{
    Matrix out(A.rows(), A.cols() + B.cols());
    out << A, B;
    return out;
}

inline Vector vcat(const Vector& a, const Vector& b)
{
    Vector out(a.size() + b.size());
    out << a, b;
    return out;
}

inline Matrix effective_map(const Halfspace& H, Index n)
{
    if (H.M.size() == 0 && H.M.rows() == 0)
        return Matrix::Identity(n, n);
    return H.M;
}

inline void require_same_dim(const HybridPolynomialZonotope& Z1, const HybridPolynomialZonotope& Z2, const char* op)
{
    if (Z1.dim() != Z2.dim())
        throw Error(ErrorCode::DimensionMismatch, std::string(op) + ": operand dimensions " +
                                                      std::to_string(Z1.dim()) + " and " + std::to_string(Z2.dim()) +
                                                      " differ");
}

} // namespace detail

/// <Mc, MGc, MGb, E, Ac, Ab, b, R>
inline HybridPolynomialZonotope linear_map(const Matrix& M, const HybridPolynomialZonotope& Z)
{
    if (M.cols() != Z.dim())
        throw Error(ErrorCode::DimensionMismatch, "linear_map: M has " + std::to_string(M.cols()) +
                                                      " columns, set has dimension " + std::to_string(Z.dim()));
    return {M * Z.c(), M * Z.Gc(), M * Z.Gb(), Z.E(), Z.Ac(), Z.Ab(), Z.b(), Z.R()};
}

/// Translate by p.
inline HybridPolynomialZonotope translate(const HybridPolynomialZonotope& Z, const Vector& p)
{
    if (p.size() != Z.dim())
        throw Error(ErrorCode::DimensionMismatch, "translate: offset length differs from set dimension");
    return {Z.c() + p, Z.Gc(), Z.Gb(), Z.E(), Z.Ac(), Z.Ab(), Z.b(), Z.R()};
}

inline HybridPolynomialZonotope minkowski_sum(const HybridPolynomialZonotope& Z1, const HybridPolynomialZonotope& Z2)
{
    detail::require_same_dim(Z1, Z2, "minkowski_sum");
    using detail::blkdiag;
    return {Z1.c() + Z2.c(),
            detail::hcat(Z1.Gc(), Z2.Gc()),
            detail::hcat(Z1.Gb(), Z2.Gb()),
            blkdiag(Z1.E(), Z2.E()),
            blkdiag(Z1.Ac(), Z2.Ac()),
            blkdiag(Z1.Ab(), Z2.Ab()),
            detail::vcat(Z1.b(), Z2.b()),
            blkdiag(Z1.R(), Z2.R())};
}

inline HybridPolynomialZonotope cartesian_product(const HybridPolynomialZonotope& Z1,
                                                  const HybridPolynomialZonotope& Z2)
{
    using detail::blkdiag;
    return {detail::vcat(Z1.c(), Z2.c()),
            blkdiag(Z1.Gc(), Z2.Gc()),
            blkdiag(Z1.Gb(), Z2.Gb()),
            blkdiag(Z1.E(), Z2.E()),
            blkdiag(Z1.Ac(), Z2.Ac()),
            blkdiag(Z1.Ab(), Z2.Ab()),
            detail::vcat(Z1.b(), Z2.b()),
            blkdiag(Z1.R(), Z2.R())};
}

/**
 * @brief Intersection Z1 ∩ Z2.
 *
 * Keeps Z1's generators (zero-padded over Z2's factors) and adds the coupling rows
 * Gc1 m(xc1) - Gc2 m(xc2) + Gb1 xb1 - Gb2 xb2 = c2 - c1.
 */
inline HybridPolynomialZonotope generalized_intersection(const HybridPolynomialZonotope& Z1,
                                                         const HybridPolynomialZonotope& Z2)
{
    detail::require_same_dim(Z1, Z2, "generalized_intersection");
    const Index n = Z1.dim();
    const Index ne1 = Z1.num_factors(), ne2 = Z2.num_factors();
    const Index ng1 = Z1.num_generators(), ng2 = Z2.num_generators();
    const Index nq1 = Z1.num_constraint_terms(), nq2 = Z2.num_constraint_terms();
    const Index nc1 = Z1.num_constraints(), nc2 = Z2.num_constraints();
    const Index nb1 = Z1.num_binary(), nb2 = Z2.num_binary();

    Matrix Gc = Matrix::Zero(n, ng1 + ne2);
    Gc.leftCols(ng1) = Z1.Gc();
    Matrix Gb = Matrix::Zero(n, nb1 + nb2);
    Gb.leftCols(nb1) = Z1.Gb();
    const IntMatrix E = detail::blkdiag(Z1.E(), IntMatrix(IntMatrix::Identity(ne2, ne2)));

    const Index nq = nq1 + nq2 + ng1 + ng2;
    Matrix Ac = Matrix::Zero(nc1 + nc2 + n, nq);
    Ac.block(0, 0, nc1, nq1) = Z1.Ac();
    Ac.block(nc1, nq1, nc2, nq2) = Z2.Ac();
    Ac.block(nc1 + nc2, nq1 + nq2, n, ng1) = Z1.Gc();
    Ac.block(nc1 + nc2, nq1 + nq2 + ng1, n, ng2) = -Z2.Gc();

    Matrix Ab = Matrix::Zero(nc1 + nc2 + n, nb1 + nb2);
    Ab.block(0, 0, nc1, nb1) = Z1.Ab();
    Ab.block(nc1, nb1, nc2, nb2) = Z2.Ab();
    Ab.block(nc1 + nc2, 0, n, nb1) = Z1.Gb();
    Ab.block(nc1 + nc2, nb1, n, nb2) = -Z2.Gb();

    Vector b(nc1 + nc2 + n);
    b << Z1.b(), Z2.b(), Z2.c() - Z1.c();

    IntMatrix R = IntMatrix::Zero(ne1 + ne2, nq);
    R.block(0, 0, ne1, nq1) = Z1.R();
    R.block(ne1, nq1, ne2, nq2) = Z2.R();
    R.block(0, nq1 + nq2, ne1, ng1) = Z1.E();
    R.block(ne1, nq1 + nq2 + ng1, ne2, ng2) = Z2.E();

    return {Z1.c(), Gc, Gb, E, Ac, Ab, b, R};
}

/// l_m = l^T M c - sum |l^T M Gc(:,i)| - sum |l^T M Gb(:,i)|, u_m mirrored.
inline SupportBounds functional_bounds(const HybridPolynomialZonotope& Z, const Vector& l, const Matrix& M)
{
    if (M.cols() != Z.dim() || l.size() != M.rows())
        throw Error(ErrorCode::DimensionMismatch, "functional_bounds: l is " + std::to_string(l.size()) +
                                                      ", M is " + detail::shape(M.rows(), M.cols()) +
                                                      ", set dimension " + std::to_string(Z.dim()));
    const Eigen::RowVectorXd lM = l.transpose() * M;
    const double center = lM * Z.c();
    double radius = 0.0;
    if (Z.num_generators() > 0)
        radius += (lM * Z.Gc()).cwiseAbs().sum();
    if (Z.num_binary() > 0)
        radius += (lM * Z.Gb()).cwiseAbs().sum();
    return {center - radius, center + radius};
}

inline SupportBounds functional_bounds(const HybridPolynomialZonotope& Z, const Vector& l)
{
    return functional_bounds(Z, l, Matrix::Identity(Z.dim(), Z.dim()));
}

/**
 * @brief Intersection with {x : l^T M x <= rho}.
 *
 * Adds one slack factor s and the row l^T M x(xi) - s (rho - l_m)/2 = (rho + l_m)/2.
 * When rho < l_m the halfspace misses the set; the row is then made infeasible
 * (zero coefficients, right-hand side 1) with the same block sizes.
 */
inline HybridPolynomialZonotope halfspace_intersection(const HybridPolynomialZonotope& Z, const Halfspace& H)
{
    const Matrix M = detail::effective_map(H, Z.dim());
    if (M.cols() != Z.dim() || H.l.size() != M.rows())
        throw Error(ErrorCode::DimensionMismatch, "halfspace_intersection: l is " + std::to_string(H.l.size()) +
                                                      ", M is " + detail::shape(M.rows(), M.cols()) +
                                                      ", set dimension " + std::to_string(Z.dim()));
    const Index n = Z.dim();
    const Index ne = Z.num_factors(), ng = Z.num_generators(), nq = Z.num_constraint_terms();
    const Index nc = Z.num_constraints(), nb = Z.num_binary();
    const SupportBounds sb = functional_bounds(Z, H.l, M);
    const double lm = sb.lower;
    const bool misses = H.rho < lm;
    const Eigen::RowVectorXd lM = H.l.transpose() * M;

    Matrix Gc = Matrix::Zero(n, ng + 1);
    Gc.leftCols(ng) = Z.Gc();
    const IntMatrix E1 = detail::blkdiag(Z.E(), IntMatrix(IntMatrix::Ones(1, 1)));

    Matrix Ac = Matrix::Zero(nc + 1, nq + ng + 1);
    Ac.topLeftCorner(nc, nq) = Z.Ac();
    Matrix Ab(nc + 1, nb);
    Ab.topRows(nc) = Z.Ab();
    Vector b(nc + 1);
    b.head(nc) = Z.b();
    if (misses)
    {
        Ab.row(nc).setZero();
        b(nc) = 1.0;
    }
    else
    {
        if (ng > 0)
            Ac.block(nc, nq, 1, ng) = lM * Z.Gc();
        Ac(nc, nq + ng) = -0.5 * (H.rho - lm);
        if (nb > 0)
            Ab.row(nc) = lM * Z.Gb();
        b(nc) = 0.5 * (H.rho + lm) - lM * Z.c();
    }

    IntMatrix R = IntMatrix::Zero(ne + 1, nq + ng + 1);
    R.topLeftCorner(ne, nq) = Z.R();
    R.rightCols(ng + 1) = E1;

    return {Z.c(), Gc, Z.Gb(), E1, Ac, Ab, b, R};
}

/// Row-by-row halfspace intersection with {x : L x <= rho}.
inline HybridPolynomialZonotope multi_halfspace(const HybridPolynomialZonotope& Z, const Matrix& L, const Vector& rho)
{
    if (L.rows() != rho.size() || L.cols() != Z.dim())
        throw Error(ErrorCode::DimensionMismatch, "multi_halfspace: L is " + detail::shape(L.rows(), L.cols()) +
                                                      ", rho has length " + std::to_string(rho.size()) +
                                                      ", set dimension " + std::to_string(Z.dim()));
    HybridPolynomialZonotope out = Z;
    for (Index i = 0; i < L.rows(); ++i)
        out = halfspace_intersection(out, {L.row(i).transpose(), rho(i), Matrix()});
    return out;
}

/**
 * @brief Union Z1 ∪ Z2.
 *
 * One switching binary r and 2(ne1 + ne2 + nb1 + nb2) slack factors are added.
 * With r = +1 the coupling rows force Z2's continuous factors to 0 and its binaries to -1,
 * and the set reduces to Z1; r = -1 does the same with the roles swapped.
 * Constant (zero-exponent) columns of the operands are folded into c and b first.
 */
inline HybridPolynomialZonotope union_of(const HybridPolynomialZonotope& Z1_in, const HybridPolynomialZonotope& Z2_in)
{
    detail::require_same_dim(Z1_in, Z2_in, "union");
    const HybridPolynomialZonotope Z1 = fold_constant_columns(Z1_in);
    const HybridPolynomialZonotope Z2 = fold_constant_columns(Z2_in);

    const Index n = Z1.dim();
    const Index ne1 = Z1.num_factors(), ne2 = Z2.num_factors();
    const Index nb1 = Z1.num_binary(), nb2 = Z2.num_binary();
    const Index ng1 = Z1.num_generators(), ng2 = Z2.num_generators();
    const Index nq1 = Z1.num_constraint_terms(), nq2 = Z2.num_constraint_terms();
    const Index nc1 = Z1.num_constraints(), nc2 = Z2.num_constraints();
    const Index nr = 2 * (ne1 + ne2 + nb1 + nb2);

    const Vector one1 = Vector::Ones(nb1), one2 = Vector::Ones(nb2);
    const Vector Gb1_1 = nb1 > 0 ? Vector(Z1.Gb() * one1) : Vector(Vector::Zero(n));
    const Vector Gb2_1 = nb2 > 0 ? Vector(Z2.Gb() * one2) : Vector(Vector::Zero(n));
    const Vector Ab1_1 = nb1 > 0 ? Vector(Z1.Ab() * one1) : Vector(Vector::Zero(nc1));
    const Vector Ab2_1 = nb2 > 0 ? Vector(Z2.Ab() * one2) : Vector(Vector::Zero(nc2));

    const Vector c_hat = 0.5 * (Gb2_1 + Z1.c() + Gb1_1 + Z2.c());
    const Vector Gb_hat = 0.5 * (Gb2_1 + Z1.c() - Gb1_1 - Z2.c());
    const Vector Ab1_hat = 0.5 * (-Ab1_1 - Z1.b());
    const Vector b1_hat = 0.5 * (Z1.b() - Ab1_1);
    const Vector Ab2_hat = 0.5 * (Z2.b() + Ab2_1);
    const Vector b2_hat = 0.5 * (Z2.b() - Ab2_1);

    // factors: [xc1 | xc2 | slack], binaries: [xb1 | xb2 | r]
    const Index ne = ne1 + ne2 + nr;
    const Index nb = nb1 + nb2 + 1;

    Matrix Gc = Matrix::Zero(n, ng1 + ng2 + nr);
    Gc.leftCols(ng1) = Z1.Gc();
    Gc.middleCols(ng1, ng2) = Z2.Gc();
    IntMatrix E = IntMatrix::Zero(ne, ng1 + ng2 + nr);
    E.block(0, 0, ne1, ng1) = Z1.E();
    E.block(ne1, ng1, ne2, ng2) = Z2.E();
    E.block(ne1 + ne2, ng1 + ng2, nr, nr) = IntMatrix::Identity(nr, nr);

    Matrix Gb(n, nb);
    Gb << Z1.Gb(), Z2.Gb(), Gb_hat;

    // constraint terms: [Z1 terms | Z2 terms | xc1 | xc2 | slack]
    const Index nq = nq1 + nq2 + ne1 + ne2 + nr;
    const Index nc = nc1 + nc2 + nr;
    Matrix Ac = Matrix::Zero(nc, nq);
    Matrix Ab = Matrix::Zero(nc, nb);
    Vector b = Vector::Zero(nc);
    IntMatrix R = IntMatrix::Zero(ne, nq);

    Ac.block(0, 0, nc1, nq1) = Z1.Ac();
    Ac.block(nc1, nq1, nc2, nq2) = Z2.Ac();
    Ab.block(0, 0, nc1, nb1) = Z1.Ab();
    Ab.block(0, nb - 1, nc1, 1) = Ab1_hat;
    Ab.block(nc1, nb1, nc2, nb2) = Z2.Ab();
    Ab.block(nc1, nb - 1, nc2, 1) = Ab2_hat;
    b.head(nc1) = b1_hat;
    b.segment(nc1, nc2) = b2_hat;

    R.block(0, 0, ne1, nq1) = Z1.R();
    R.block(ne1, nq1, ne2, nq2) = Z2.R();
    R.block(0, nq1 + nq2, ne1 + ne2, ne1 + ne2) = IntMatrix::Identity(ne1 + ne2, ne1 + ne2);
    R.block(ne1 + ne2, nq1 + nq2 + ne1 + ne2, nr, nr) = IntMatrix::Identity(nr, nr);

    const Index row0 = nc1 + nc2;
    const Index col_x1 = nq1 + nq2;
    const Index col_x2 = col_x1 + ne1;
    const Index col_s = col_x2 + ne2;
    const Index r_col = nb - 1;
    Index row = row0;

    // |xc1| <= (1 + r)/2 and |xc2| <= (1 - r)/2
    auto continuous_block = [&](Index col, Index count, double sign, double r_coef)
    {
        for (Index i = 0; i < count; ++i, ++row)
        {
            Ac(row, col + i) = sign;
            Ac(row, col_s + (row - row0)) = 1.0;
            Ab(row, r_col) = r_coef;
            b(row) = 0.5;
        }
    };
    // xb1 = -1 when r = -1, xb2 = -1 when r = +1
    auto binary_block = [&](Index col, Index count, double sign, double r_coef, double rhs)
    {
        for (Index i = 0; i < count; ++i, ++row)
        {
            Ab(row, col + i) = 0.5 * sign;
            Ac(row, col_s + (row - row0)) = 1.0;
            Ab(row, r_col) = r_coef;
            b(row) = rhs;
        }
    };
    continuous_block(col_x1, ne1, 1.0, 0.5);
    continuous_block(col_x1, ne1, -1.0, 0.5);
    continuous_block(col_x2, ne2, 1.0, -0.5);
    continuous_block(col_x2, ne2, -1.0, -0.5);
    binary_block(0, nb1, 1.0, 0.5, 0.0);
    binary_block(0, nb1, -1.0, 0.5, 1.0);
    binary_block(nb1, nb2, 1.0, -0.5, 0.0);
    binary_block(nb1, nb2, -1.0, -0.5, 1.0);

    return {c_hat, Gc, Gb, E, Ac, Ab, b, R};
}

} // namespace hpz

#endif
