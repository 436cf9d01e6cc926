#ifndef HPZ_SET_HPP_
#define HPZ_SET_HPP_

/**
 * @file set.hpp
 * @brief Hybrid polynomial zonotope value type, evaluation, special-case
 * constructors and exact compaction.
 *
 * A hybrid polynomial zonotope is the set
 *
 *   { c + Gb*xb + sum_i (prod_k xc_k^E(k,i)) Gc(:,i)
 *     | Ab*xb + sum_j (prod_k xc_k^R(k,j)) Ac(:,j) = b,
 *       xc in [-1,1]^ne, xb in {-1,1}^nb }.
 *
 * Shorthand: Z = <c, Gc, Gb, E, Ac, Ab, b, R>.
 */

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace hpz
{

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Absolute tolerance on each constraint residual component.
inline constexpr double kFeasTol = 1e-9;

/// Default cap on the number of binary leaves visited by any enumeration.
inline constexpr std::int64_t kDefaultLeafCap = std::int64_t{1} << 20;

/// One point of the factor domain: continuous factors in [-1,1], binary factors in {-1,1}.
struct FactorAssignment
{
    Vector continuous;
    Vector binary;
};

namespace detail
{

inline double ipow(double x, int e)
{
    double r = 1.0;
    for (int i = 0; i < e; ++i)
        r *= x;
    return r;
}

/// Values of every monomial column of `exps` at `xi` (0^0 = 1).
inline Vector monomials(const IntMatrix& exps, const Vector& xi)
{
    Vector m(exps.cols());
    for (Index j = 0; j < exps.cols(); ++j)
    {
        double v = 1.0;
        for (Index k = 0; k < exps.rows(); ++k)
        {
            if (exps(k, j) != 0)
                v *= ipow(xi(k), exps(k, j));
        }
        m(j) = v;
    }
    return m;
}

inline std::string shape(Index r, Index c)
{
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
}

} // namespace detail

class HybridPolynomialZonotope
{
    public:
        /// Zero-dimensional point.
        HybridPolynomialZonotope() : HybridPolynomialZonotope(Vector(0)) {}

        /// Singleton {c}.
        explicit HybridPolynomialZonotope(const Vector& c)
            : HybridPolynomialZonotope(c, Matrix(c.size(), 0), Matrix(c.size(), 0), IntMatrix(0, 0),
                                       Matrix(0, 0), Matrix(0, 0), Vector(0), IntMatrix(0, 0))
        {
        }

        /// Full constructor; throws hpz::Error when the blocks are inconsistent.
        HybridPolynomialZonotope(Vector c, Matrix Gc, Matrix Gb, IntMatrix E, Matrix Ac, Matrix Ab, Vector b,
                                 IntMatrix R)
            : c_(std::move(c)), Gc_(std::move(Gc)), Gb_(std::move(Gb)), E_(std::move(E)), Ac_(std::move(Ac)),
              Ab_(std::move(Ab)), b_(std::move(b)), R_(std::move(R))
        {
            check();
        }

        /// Set with no feasible assignment (single constraint 0 = 1).
        static HybridPolynomialZonotope empty(Index n)
        {
            return {Vector::Zero(n), Matrix(n, 0), Matrix(n, 0), IntMatrix(0, 0),
                    Matrix(1, 0), Matrix(1, 0), Vector::Ones(1), IntMatrix(0, 0)};
        }

        const Vector& c() const { return c_; }
        const Matrix& Gc() const { return Gc_; }
        const Matrix& Gb() const { return Gb_; }
        const IntMatrix& E() const { return E_; }
        const Matrix& Ac() const { return Ac_; }
        const Matrix& Ab() const { return Ab_; }
        const Vector& b() const { return b_; }
        const IntMatrix& R() const { return R_; }

        Index dim() const { return c_.size(); }
        /// n_g
        Index num_generators() const { return Gc_.cols(); }
        /// n_b
        Index num_binary() const { return Gb_.cols(); }
        /// n_c
        Index num_constraints() const { return b_.size(); }
        /// n_e
        Index num_factors() const { return E_.rows(); }
        /// n_q
        Index num_constraint_terms() const { return Ac_.cols(); }

        bool operator==(const HybridPolynomialZonotope& o) const
        {
            auto same = [](const auto& a, const auto& b)
            { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; };
            return same(c_, o.c_) && same(Gc_, o.Gc_) && same(Gb_, o.Gb_) && same(E_, o.E_) && same(Ac_, o.Ac_) &&
                   same(Ab_, o.Ab_) && same(b_, o.b_) && same(R_, o.R_);
        }

        void check() const
        {
            using detail::shape;
            const Index n = c_.size();
            auto mismatch = [](const std::string& what) { throw Error(ErrorCode::DimensionMismatch, what); };
            if (Gc_.rows() != n)
                mismatch("Gc has " + std::to_string(Gc_.rows()) + " rows, center has length " + std::to_string(n));
            if (Gb_.rows() != n)
                mismatch("Gb has " + std::to_string(Gb_.rows()) + " rows, center has length " + std::to_string(n));
            if (E_.cols() != Gc_.cols())
                mismatch("Gc/E column counts differ (Gc " + shape(Gc_.rows(), Gc_.cols()) + ", E " +
                         shape(E_.rows(), E_.cols()) + ")");
            if (R_.cols() != Ac_.cols())
                mismatch("Ac/R column counts differ (Ac " + shape(Ac_.rows(), Ac_.cols()) + ", R " +
                         shape(R_.rows(), R_.cols()) + ")");
            if (Ac_.rows() != b_.size())
                mismatch("Ac has " + std::to_string(Ac_.rows()) + " rows, b has length " + std::to_string(b_.size()));
            if (Ab_.rows() != b_.size())
                mismatch("Ab has " + std::to_string(Ab_.rows()) + " rows, b has length " + std::to_string(b_.size()));
            if (Ab_.cols() != Gb_.cols())
                mismatch("Gb/Ab column counts differ (Gb " + shape(Gb_.rows(), Gb_.cols()) + ", Ab " +
                         shape(Ab_.rows(), Ab_.cols()) + ")");
            if (E_.rows() != R_.rows())
                mismatch("E/R row counts differ (E " + shape(E_.rows(), E_.cols()) + ", R " +
                         shape(R_.rows(), R_.cols()) + ")");
            if ((E_.size() > 0 && E_.minCoeff() < 0) || (R_.size() > 0 && R_.minCoeff() < 0))
                throw Error(ErrorCode::NegativeExponent, "exponent matrices must be nonnegative");
        }

    private:
        Vector c_;
        Matrix Gc_;
        Matrix Gb_;
        IntMatrix E_;
        Matrix Ac_;
        Matrix Ab_;
        Vector b_;
        IntMatrix R_;
};

using HPZ = HybridPolynomialZonotope;

/// Re-checks every block invariant; throws hpz::Error on violation.
inline void validate(const HybridPolynomialZonotope& Z) { Z.check(); }

/// Converts a real-valued exponent matrix, rejecting fractional or negative entries.
inline IntMatrix exponents_from_real(const Matrix& X)
{
    IntMatrix out(X.rows(), X.cols());
    for (Index i = 0; i < X.rows(); ++i)
    {
        for (Index j = 0; j < X.cols(); ++j)
        {
            const double v = X(i, j);
            if (v != std::floor(v))
                throw Error(ErrorCode::NonIntegerExponent,
                            "exponent entry (" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                                std::to_string(v));
            if (v < 0)
                throw Error(ErrorCode::NegativeExponent,
                            "exponent entry (" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                                std::to_string(v));
            out(i, j) = static_cast<int>(v);
        }
    }
    return out;
}

namespace detail
{

inline void check_lengths(const HybridPolynomialZonotope& Z, const FactorAssignment& a)
{
    if (a.continuous.size() != Z.num_factors() || a.binary.size() != Z.num_binary())
        throw Error(ErrorCode::LengthMismatch,
                    "assignment has " + std::to_string(a.continuous.size()) + " continuous / " +
                        std::to_string(a.binary.size()) + " binary factors, set expects " +
                        std::to_string(Z.num_factors()) + " / " + std::to_string(Z.num_binary()));
}

} // namespace detail

/// c + Gb*xb + sum_i m_i(xc) Gc(:,i)
inline Vector evaluate(const HybridPolynomialZonotope& Z, const FactorAssignment& a)
{
    detail::check_lengths(Z, a);
    Vector x = Z.c();
    if (Z.num_binary() > 0)
        x += Z.Gb() * a.binary;
    if (Z.num_generators() > 0)
        x += Z.Gc() * detail::monomials(Z.E(), a.continuous);
    return x;
}

/// Ab*xb + sum_j m_j(xc) Ac(:,j) - b. The assignment is feasible when every entry is within kFeasTol.
inline Vector constraint_residual(const HybridPolynomialZonotope& Z, const FactorAssignment& a)
{
    detail::check_lengths(Z, a);
    Vector r = -Z.b();
    if (Z.num_binary() > 0)
        r += Z.Ab() * a.binary;
    if (Z.num_constraint_terms() > 0)
        r += Z.Ac() * detail::monomials(Z.R(), a.continuous);
    return r;
}

inline bool is_feasible(const HybridPolynomialZonotope& Z, const FactorAssignment& a, double tol = kFeasTol)
{
    const Vector r = constraint_residual(Z, a);
    return r.size() == 0 || r.cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------
// Special cases

inline HybridPolynomialZonotope from_zonotope(const Vector& c, const Matrix& G)
{
    if (G.rows() != c.size())
        throw Error(ErrorCode::DimensionMismatch, "zonotope generator rows differ from center length");
    const Index ng = G.cols();
    return {c, G, Matrix(c.size(), 0), IntMatrix::Identity(ng, ng), Matrix(0, 0), Matrix(0, 0), Vector(0),
            IntMatrix(ng, 0)};
}

inline HybridPolynomialZonotope from_constrained_zonotope(const Vector& c, const Matrix& G, const Matrix& A,
                                                          const Vector& b)
{
    if (G.rows() != c.size() || A.cols() != G.cols() || A.rows() != b.size())
        throw Error(ErrorCode::DimensionMismatch, "constrained zonotope blocks are inconsistent");
    const Index ng = G.cols();
    return {c, G, Matrix(c.size(), 0), IntMatrix::Identity(ng, ng), A, Matrix(A.rows(), 0), b,
            IntMatrix::Identity(ng, ng)};
}

inline HybridPolynomialZonotope from_hybrid_zonotope(const Vector& c, const Matrix& Gc, const Matrix& Gb,
                                                     const Matrix& Ac, const Matrix& Ab, const Vector& b)
{
    if (Gc.rows() != c.size() || Gb.rows() != c.size() || Ac.cols() != Gc.cols() || Ab.cols() != Gb.cols() ||
        Ac.rows() != b.size() || Ab.rows() != b.size())
        throw Error(ErrorCode::DimensionMismatch, "hybrid zonotope blocks are inconsistent");
    const Index ng = Gc.cols();
    return {c, Gc, Gb, IntMatrix::Identity(ng, ng), Ac, Ab, b, IntMatrix::Identity(ng, ng)};
}

inline HybridPolynomialZonotope from_cpz(const Vector& c, const Matrix& G, const IntMatrix& E, const Matrix& A,
                                         const Vector& b, const IntMatrix& R)
{
    return {c, G, Matrix(c.size(), 0), E, A, Matrix(A.rows(), 0), b, R};
}

// ---------------------------------------------------------------------------
// Compaction

namespace detail
{

/// Folds zero-exponent columns into `constant` (with `sign`), merges duplicate exponent
/// columns and drops all-zero coefficient columns. Column order follows first occurrence.
inline void normalize_terms(Matrix& coef, IntMatrix& exps, Vector& constant, double sign)
{
    std::map<std::vector<int>, Index> slot;
    std::vector<std::vector<int>> keys;
    std::vector<Vector> cols;
    for (Index j = 0; j < exps.cols(); ++j)
    {
        std::vector<int> key(exps.col(j).data(), exps.col(j).data() + exps.rows());
        bool constant_col = true;
        for (int e : key)
            constant_col = constant_col && (e == 0);
        if (constant_col)
        {
            constant += sign * coef.col(j);
            continue;
        }
        auto [it, inserted] = slot.emplace(key, static_cast<Index>(cols.size()));
        if (inserted)
        {
            keys.push_back(std::move(key));
            cols.emplace_back(coef.col(j));
        }
        else
        {
            cols[it->second] += coef.col(j);
        }
    }
    std::vector<Index> keep;
    for (Index j = 0; j < static_cast<Index>(cols.size()); ++j)
    {
        if (!cols[j].isZero(0.0))
            keep.push_back(j);
    }
    Matrix new_coef(coef.rows(), static_cast<Index>(keep.size()));
    IntMatrix new_exps(exps.rows(), static_cast<Index>(keep.size()));
    for (Index k = 0; k < static_cast<Index>(keep.size()); ++k)
    {
        new_coef.col(k) = cols[keep[k]];
        for (Index r = 0; r < exps.rows(); ++r)
            new_exps(r, k) = keys[keep[k]][r];
    }
    coef = std::move(new_coef);
    exps = std::move(new_exps);
}

template <typename Derived>
IntMatrix select_rows(const Eigen::MatrixBase<Derived>& M, const std::vector<Index>& rows)
{
    IntMatrix out(static_cast<Index>(rows.size()), M.cols());
    for (Index i = 0; i < static_cast<Index>(rows.size()); ++i)
        out.row(i) = M.row(rows[i]);
    return out;
}

} // namespace detail

/// Result of compaction together with the original index of every surviving factor.
struct CompactResult
{
    HybridPolynomialZonotope set;
    std::vector<Index> kept_factors;
};

inline CompactResult compact_with_map(const HybridPolynomialZonotope& Z)
{
    Vector c = Z.c();
    Matrix G = Z.Gc();
    IntMatrix E = Z.E();
    detail::normalize_terms(G, E, c, 1.0);

    Vector b = Z.b();
    Matrix A = Z.Ac();
    IntMatrix R = Z.R();
    detail::normalize_terms(A, R, b, -1.0);

    std::vector<Index> kept;
    for (Index k = 0; k < Z.num_factors(); ++k)
    {
        const bool used = (E.cols() > 0 && (E.row(k).array() != 0).any()) ||
                          (R.cols() > 0 && (R.row(k).array() != 0).any());
        if (used)
            kept.push_back(k);
    }
    IntMatrix E2 = detail::select_rows(E, kept);
    IntMatrix R2 = detail::select_rows(R, kept);
    return {HybridPolynomialZonotope(std::move(c), std::move(G), Z.Gb(), std::move(E2), std::move(A), Z.Ab(),
                                     std::move(b), std::move(R2)),
            std::move(kept)};
}

/// Exact simplification: merge equal monomials, fold constant monomials into c / b,
/// drop zero columns and factors that no longer appear. The represented set is unchanged.
inline HybridPolynomialZonotope compact(const HybridPolynomialZonotope& Z) { return compact_with_map(Z).set; }

/// Folds only zero-exponent columns into c / b; keeps factor indexing intact.
inline HybridPolynomialZonotope fold_constant_columns(const HybridPolynomialZonotope& Z)
{
    auto fold = [](const Matrix& coef, const IntMatrix& exps, Vector& constant, double sign)
    {
        std::vector<Index> keep;
        for (Index j = 0; j < exps.cols(); ++j)
        {
            if ((exps.col(j).array() != 0).any())
                keep.push_back(j);
            else
                constant += sign * coef.col(j);
        }
        Matrix C(coef.rows(), static_cast<Index>(keep.size()));
        IntMatrix X(exps.rows(), static_cast<Index>(keep.size()));
        for (Index k = 0; k < static_cast<Index>(keep.size()); ++k)
        {
            C.col(k) = coef.col(keep[k]);
            X.col(k) = exps.col(keep[k]);
        }
        return std::pair{C, X};
    };
    Vector c = Z.c();
    Vector b = Z.b();
    auto [G, E] = fold(Z.Gc(), Z.E(), c, 1.0);
    auto [A, R] = fold(Z.Ac(), Z.R(), b, -1.0);
    return {c, G, Z.Gb(), E, A, Z.Ab(), b, R};
}

/// Leaf for one binary assignment: <c + Gb xb, Gc, [], E, Ac, [], b - Ab xb, R>.
inline HybridPolynomialZonotope fix_binaries(const HybridPolynomialZonotope& Z, const Vector& xb)
{
    if (xb.size() != Z.num_binary())
        throw Error(ErrorCode::LengthMismatch, "binary assignment length differs from n_b");
    Vector c = Z.c();
    Vector b = Z.b();
    if (xb.size() > 0)
    {
        c += Z.Gb() * xb;
        b -= Z.Ab() * xb;
    }
    return {c, Z.Gc(), Matrix(Z.dim(), 0), Z.E(), Z.Ac(), Matrix(Z.num_constraints(), 0), b, Z.R()};
}

/// Binary vector for leaf index `idx`: bit i set means xb_i = +1.
inline Vector binary_from_index(std::uint64_t idx, Index nb)
{
    Vector xb(nb);
    for (Index i = 0; i < nb; ++i)
        xb(i) = ((idx >> i) & 1u) ? 1.0 : -1.0;
    return xb;
}

inline std::uint64_t index_from_binary(const Vector& xb)
{
    std::uint64_t idx = 0;
    for (Index i = 0; i < xb.size(); ++i)
    {
        if (xb(i) > 0)
            idx |= (std::uint64_t{1} << i);
    }
    return idx;
}

} // namespace hpz

#endif
