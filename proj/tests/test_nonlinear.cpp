#include <gtest/gtest.h>

#include "hpz/fixtures.hpp"
#include "hpz/hpz.hpp"
#include "hpz/oracle.hpp"
#include "hpz/verification.hpp"

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

QuadraticAffineMap affine(const Matrix& A, const Vector& d)
{
    QuadraticAffineMap f;
    for (Index r = 0; r < A.rows(); ++r)
        f.Q.push_back(Matrix::Zero(A.cols(), A.cols()));
    f.A = A;
    f.d = d;
    return f;
}

} // namespace

TEST(QuadraticMap, SquareOnTheUnitInterval)
{
    QuadraticAffineMap f;
    f.Q.push_back(Matrix::Ones(1, 1));
    f.A = Matrix::Zero(1, 1);
    f.d = Vector::Zero(1);
    const HPZ Y = nonlinear_step(f, from_zonotope(Vector::Zero(1), Matrix::Ones(1, 1)));
    ASSERT_EQ(Y.num_generators(), 1);
    EXPECT_EQ(Y.E()(0, 0), 2);
    EXPECT_DOUBLE_EQ(Y.Gc()(0, 0), 1.0);
    const oracle::Cloud cloud = verify::cloud_of(Y, 41);
    double lo = 1e9, hi = -1e9;
    for (const Vector& p : cloud)
    {
        lo = std::min(lo, p(0));
        hi = std::max(hi, p(0));
    }
    EXPECT_NEAR(lo, 0.0, 1e-9);
    EXPECT_NEAR(hi, 1.0, 1e-9);
}

TEST(QuadraticMap, SingletonMapsToSingleton)
{
    const QuadraticAffineMap f = fixtures::pwna().modes[0].dynamics;
    const Vector p = vec({0.3, -0.2});
    const HPZ Y = nonlinear_step(f, HPZ(p));
    EXPECT_EQ(Y.num_generators(), 0);
    EXPECT_TRUE(Y.c().isApprox(oracle::apply_dynamics(f, p), 1e-14));
}

TEST(QuadraticMap, InputValidation)
{
    QuadraticAffineMap f = affine(Matrix::Identity(2, 2), Vector::Zero(2));
    f.Q[1] = Matrix::Zero(2, 3);
    EXPECT_THROW(f.validate(), Error);
    f = affine(Matrix::Identity(2, 2), Vector::Zero(3));
    EXPECT_THROW(f.validate(), Error);
    EXPECT_THROW(nonlinear_step(affine(Matrix::Identity(3, 3), Vector::Zero(3)), fixtures::cpz1()), Error);
}

TEST(QuadraticMap, AffineAgreesWithLinearMapAndTranslation)
{
    verify::Rng rng(5);
    for (int t = 0; t < 50; ++t)
    {
        verify::GenSpec spec;
        spec.n = verify::uniform_int(rng, 1, 3);
        const verify::Instance I = verify::random_instance(rng, spec);
        const Matrix A = verify::random_matrix(rng, spec.n, spec.n);
        const Vector d = verify::random_matrix(rng, spec.n, 1);
        const QuadraticAffineMap f = affine(A, d);
        // leafwise the expansion equals A x + d at every assignment
        for (const auto& [xb, L] : leaves(I.set))
        {
            const HPZ Y = quadratic_map_leaf(f, L);
            const HPZ T = translate(linear_map(A, L), d);
            ASSERT_EQ(Y.num_factors(), L.num_factors());
            for (int k = 0; k < 20; ++k)
            {
                const Vector xi = verify::random_matrix(rng, L.num_factors(), 1);
                const FactorAssignment a{xi, Vector(0)};
                EXPECT_LE((evaluate(Y, a) - evaluate(T, a)).norm(), 1e-12);
                EXPECT_LE((constraint_residual(Y, a) - constraint_residual(T, a)).norm(), 1e-12);
            }
        }
        const oracle::CloudMetrics m =
            oracle::compare(verify::cloud_of(translate(linear_map(A, I.set), d), 4),
                            verify::cloud_of(nonlinear_step(f, I.set), 4));
        EXPECT_TRUE(m.within(1e-12)) << "trial " << t << " dH " << m.hausdorff();
    }
}

TEST(QuadraticMap, NoBinariesMatchesLeafMap)
{
    const QuadraticAffineMap f = fixtures::pwna().modes[1].dynamics;
    const HPZ Z0 = fixtures::pwna().initial_set;
    EXPECT_EQ(nonlinear_step(f, Z0), quadratic_map_leaf(f, Z0));
}

TEST(QuadraticMap, DisjointBoxesTranslate)
{
    Matrix Gb(2, 1);
    Gb << 3, 0;
    const HPZ Z(Vector::Zero(2), Matrix::Identity(2, 2), Gb, IntMatrix::Identity(2, 2), Matrix(0, 0), Matrix(0, 1),
                Vector(0), IntMatrix(2, 0));
    const Vector d = vec({1, 2});
    const HPZ Y = nonlinear_step(affine(Matrix::Identity(2, 2), d), Z);
    const oracle::Cloud expect = oracle::translate_cloud(verify::cloud_of(Z, 5), d);
    EXPECT_TRUE(oracle::compare(expect, verify::cloud_of(Y, 5)).within(1e-12));
}

TEST(QuadraticMap, PwnaModeOnePushforward)
{
    const PwnaModel m = fixtures::pwna();
    const QuadraticAffineMap& f = m.modes[0].dynamics;
    const HPZ Y = nonlinear_step(f, m.initial_set);
    const oracle::Cloud expect = oracle::image_cloud([&](const Vector& x) { return oracle::apply_dynamics(f, x); },
                                                     oracle::enumerate(m.initial_set, 15));
    const oracle::CloudMetrics cm = oracle::compare(expect, verify::cloud_of(Y, 15));
    EXPECT_TRUE(cm.within(1e-6)) << cm.hausdorff();
}

TEST(QuadraticMap, EmptyLeavesAreSkipped)
{
    const HPZ Z = fixtures::example1_hpz2();
    StepStats stats;
    const HPZ Y = nonlinear_step(fixtures::pwna().modes[0].dynamics, Z, kDefaultLeafCap, &stats);
    EXPECT_EQ(stats.candidate_leaves, 7u);
    EXPECT_EQ(stats.mapped_leaves, 7u);
    // seven mapped leaves are joined by six unions, one binary each
    EXPECT_EQ(Y.num_binary(), 6);

    const HPZ E = nonlinear_step(fixtures::pwna().modes[0].dynamics, HPZ::empty(2), kDefaultLeafCap, &stats);
    EXPECT_EQ(stats.mapped_leaves, 0u);
    EXPECT_TRUE(is_provably_empty(E));
}
