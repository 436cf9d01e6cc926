#include <functional>

#include <gtest/gtest.h>

#include "hpz/fixtures.hpp"
#include "hpz/hpz.hpp"
#include "hpz/oracle.hpp"

using namespace hpz;

namespace
{

Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v)
        out(i++) = x;
    return out;
}

ErrorCode code_of(const std::function<void()>& f)
{
    try
    {
        f();
    }
    catch (const Error& e)
    {
        return e.code();
    }
    ADD_FAILURE() << "no hpz::Error thrown";
    return ErrorCode::IoError;
}

} // namespace

TEST(Set, GeneratorExponentWidthMismatch)
{
    const ErrorCode code = code_of([]
    {
        HPZ Z(Vector::Zero(2), Matrix::Ones(2, 3), Matrix(2, 0), IntMatrix::Ones(2, 2), Matrix(0, 0), Matrix(0, 0),
              Vector(0), IntMatrix(2, 0));
    });
    EXPECT_EQ(code, ErrorCode::DimensionMismatch);
}

TEST(Set, OtherBlockMismatches)
{
    EXPECT_EQ(code_of([] { HPZ(Vector::Zero(2), Matrix(3, 0), Matrix(2, 0), IntMatrix(0, 0), Matrix(0, 0),
                               Matrix(0, 0), Vector(0), IntMatrix(0, 0)); }),
              ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([] { HPZ(Vector::Zero(1), Matrix::Ones(1, 1), Matrix(1, 0), IntMatrix::Ones(1, 1),
                               Matrix::Ones(1, 2), Matrix(1, 0), Vector::Ones(1), IntMatrix::Ones(1, 1)); }),
              ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([] { HPZ(Vector::Zero(1), Matrix::Ones(1, 1), Matrix(1, 0), IntMatrix::Ones(1, 1),
                               Matrix::Ones(1, 1), Matrix(1, 0), Vector::Ones(1), IntMatrix::Ones(2, 1)); }),
              ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([] { HPZ(Vector::Zero(1), Matrix::Ones(1, 1), Matrix(1, 0), -IntMatrix::Ones(1, 1),
                               Matrix(0, 0), Matrix(0, 0), Vector(0), IntMatrix(1, 0)); }),
              ErrorCode::NegativeExponent);
}

TEST(Set, SingletonAndFixture)
{
    const HPZ p(vec({0, 0}));
    EXPECT_EQ(p.dim(), 2);
    EXPECT_EQ(p.num_factors(), 0);
    EXPECT_NO_THROW(validate(fixtures::example1_hpz1()));
    EXPECT_EQ(fixtures::example1_hpz1().num_binary(), 3);
}

TEST(Set, ExponentsFromReal)
{
    Matrix X(1, 2);
    X << 1, 2.5;
    EXPECT_EQ(code_of([&] { exponents_from_real(X); }), ErrorCode::NonIntegerExponent);
    X << 1, -1;
    EXPECT_EQ(code_of([&] { exponents_from_real(X); }), ErrorCode::NegativeExponent);
    X << 3, 0;
    EXPECT_EQ(exponents_from_real(X)(0, 0), 3);
}

TEST(Set, EvaluateSingleton)
{
    const HPZ p(vec({1, -2}));
    EXPECT_EQ(evaluate(p, {Vector(0), Vector(0)}), vec({1, -2}));
}

TEST(Set, EvaluateSquareMonomial)
{
    Matrix G(2, 1);
    G << 1, 0;
    IntMatrix E(1, 1);
    E << 2;
    const HPZ Z(vec({1, 1}), G, Matrix(2, 0), E, Matrix(0, 0), Matrix(0, 0), Vector(0), IntMatrix(1, 0));
    EXPECT_TRUE(evaluate(Z, {vec({0.5}), Vector(0)}).isApprox(vec({1.25, 1})));
}

TEST(Set, EvaluateCpz1AtOnes)
{
    // columns sum to (3, 1) when every factor is 1
    const Vector x = evaluate(fixtures::cpz1(), {vec({1, 1, 1}), Vector(0)});
    EXPECT_DOUBLE_EQ(x(0), 1.0 + 0.0 + 1.5 + 0.5);
    EXPECT_DOUBLE_EQ(x(1), 0.0 + 1.0 + 2.0 - 2.0);
}

TEST(Set, EvaluateChecksLengths)
{
    EXPECT_EQ(code_of([] { evaluate(fixtures::cpz1(), {vec({1, 1}), Vector(0)}); }), ErrorCode::LengthMismatch);
}

TEST(Set, ConstraintResidual)
{
    EXPECT_EQ(constraint_residual(from_zonotope(vec({0}), Matrix::Ones(1, 1)), {vec({0.3}), Vector(0)}).size(), 0);
    const Vector r = constraint_residual(fixtures::cpz1(), {vec({1, 0, 0}), Vector(0)});
    ASSERT_EQ(r.size(), 1);
    EXPECT_DOUBLE_EQ(r(0), 0.0);
    // cubic term: 1*0.5 + 2*(-0.25) + 0.5*0.5^3 - 1
    const Vector r2 = constraint_residual(fixtures::cpz1(), {vec({0.5, -0.25, 0.5}), Vector(0)});
    EXPECT_NEAR(r2(0), 0.5 - 0.5 + 0.0625 - 1.0, 1e-15);
    EXPECT_TRUE(is_feasible(fixtures::cpz1(), {vec({1, 0, 0}), Vector(0)}));
}

TEST(Set, ZeroToTheZeroIsOne)
{
    IntMatrix E(1, 1);
    E << 0;
    const HPZ Z(vec({0}), Matrix::Ones(1, 1), Matrix(1, 0), E, Matrix(0, 0), Matrix(0, 0), Vector(0), IntMatrix(1, 0));
    EXPECT_DOUBLE_EQ(evaluate(Z, {vec({0.0}), Vector(0)})(0), 1.0);
}

TEST(Set, CompactMergesMonomials)
{
    Matrix G(1, 2);
    G << 2, 3;
    IntMatrix E(1, 2);
    E << 1, 1;
    const HPZ C = compact(HPZ(vec({0}), G, Matrix(1, 0), E, Matrix(0, 0), Matrix(0, 0), Vector(0), IntMatrix(1, 0)));
    ASSERT_EQ(C.num_generators(), 1);
    EXPECT_DOUBLE_EQ(C.Gc()(0, 0), 5.0);
    EXPECT_EQ(compact(C), C);
}

TEST(Set, CompactFoldsConstantsAndDropsUnusedFactors)
{
    Matrix G(1, 3);
    G << 1, 4, 0;
    IntMatrix E(2, 3);
    E << 1, 0, 2,
         0, 0, 0;
    const HPZ C = compact(HPZ(vec({1}), G, Matrix(1, 0), E, Matrix(0, 0), Matrix(0, 0), Vector(0), IntMatrix(2, 0)));
    EXPECT_EQ(C.num_generators(), 1);
    EXPECT_EQ(C.num_factors(), 1);
    EXPECT_DOUBLE_EQ(C.c()(0), 5.0);
    EXPECT_EQ(compact(C), C);
}

TEST(Set, CompactKeepsTheCloud)
{
    const HPZ Z = fixtures::example1_hpz2();
    Matrix G(2, Z.num_generators() + 1);
    G << Z.Gc(), Z.Gc().col(0);
    IntMatrix E(Z.num_factors(), Z.num_generators() + 1);
    E << Z.E(), Z.E().col(0);
    const HPZ Zd(Z.c(), G, Z.Gb(), E, Z.Ac(), Z.Ab(), Z.b(), Z.R());
    const HPZ C = compact(Zd);
    EXPECT_EQ(C.num_generators(), Z.num_generators());
    SampleOptions o;
    o.grid_res = 6;
    o.random_fill = false;
    const oracle::CloudMetrics m = oracle::compare(sample(Zd, o).points, sample(C, o).points);
    EXPECT_TRUE(m.within(1e-9)) << m.hausdorff();
}

TEST(Set, Embeddings)
{
    const HPZ Z = from_zonotope(Vector::Zero(2), Matrix::Identity(2, 2));
    SampleOptions o;
    o.grid_res = 5;
    const PointCloud cloud = sample(Z, o);
    double lo = 1, hi = -1;
    for (const Vector& p : cloud.points)
    {
        lo = std::min(lo, p.minCoeff());
        hi = std::max(hi, p.maxCoeff());
    }
    EXPECT_DOUBLE_EQ(lo, -1.0);
    EXPECT_DOUBLE_EQ(hi, 1.0);

    Matrix G(2, 3);
    G << 1, 0, 1,
         0, 1, 1;
    Matrix A(1, 3);
    A << 1, 1, -1;
    const HPZ cz = from_constrained_zonotope(Vector::Zero(2), G, A, vec({0.5}));
    const HPZ hz = from_hybrid_zonotope(Vector::Zero(2), G, Matrix(2, 0), A, Matrix(1, 0), vec({0.5}));
    EXPECT_EQ(cz, hz);

    const HPZ cpz = fixtures::cpz1();
    EXPECT_EQ(cpz.num_binary(), 0);
    EXPECT_EQ(cpz.Ab().rows(), 1);
    EXPECT_EQ(cpz.Ab().cols(), 0);
}

TEST(Set, BinaryIndexRoundTrip)
{
    for (std::uint64_t i = 0; i < 8; ++i)
        EXPECT_EQ(index_from_binary(binary_from_index(i, 3)), i);
    EXPECT_EQ(binary_from_index(5, 3), vec({1, -1, 1}));
}

TEST(Set, FixBinariesShiftsCenterAndRhs)
{
    const HPZ Z = fixtures::example1_hpz2();
    const HPZ L = fix_binaries(Z, vec({1, -1, 1}));
    EXPECT_EQ(L.num_binary(), 0);
    EXPECT_TRUE(L.c().isApprox(Z.Gb() * vec({1, -1, 1})));
    EXPECT_DOUBLE_EQ(L.b()(0), 1.0 - 1.5);
}
