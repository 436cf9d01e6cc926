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

oracle::Cloud grid_cloud(const HPZ& Z, int g = 5)
{
    return verify::cloud_of(Z, g);
}

HPZ box(const Vector& c, double r = 1.0)
{
    return from_zonotope(c, r * Matrix::Identity(c.size(), c.size()));
}

void expect_same(const oracle::Cloud& a, const oracle::Cloud& b, double tol = 1e-9)
{
    const oracle::CloudMetrics m = oracle::compare(a, b);
    EXPECT_TRUE(m.within(tol)) << "dH(a,b) " << m.directed_hausdorff_ab << " dH(b,a) " << m.directed_hausdorff_ba
                               << " sizes " << a.size() << " " << b.size();
}

} // namespace

TEST(LinearMap, IdentityIsStructural)
{
    const HPZ Z = fixtures::example1_hpz2();
    EXPECT_EQ(linear_map(Matrix::Identity(2, 2), Z), Z);
}

TEST(LinearMap, ZeroCollapses)
{
    for (const Vector& p : grid_cloud(linear_map(Matrix::Zero(2, 2), fixtures::cpz1())))
        EXPECT_EQ(p, Vector::Zero(2));
}

TEST(LinearMap, DimensionMismatch)
{
    EXPECT_THROW(linear_map(Matrix::Ones(2, 3), fixtures::cpz1()), Error);
}

TEST(MinkowskiSum, SingletonTranslates)
{
    const HPZ Z = fixtures::cpz1();
    expect_same(grid_cloud(minkowski_sum(Z, HPZ(vec({1, -2})))), oracle::translate_cloud(grid_cloud(Z), vec({1, -2})));
    expect_same(grid_cloud(translate(Z, vec({1, -2}))), oracle::translate_cloud(grid_cloud(Z), vec({1, -2})));
}

TEST(MinkowskiSum, EmptyAbsorbs)
{
    EXPECT_TRUE(grid_cloud(minkowski_sum(fixtures::cpz1(), HPZ::empty(2))).empty());
}

TEST(MinkowskiSum, Hpz1IsCpz1PlusBinaryPart)
{
    const HPZ binary(Vector::Zero(2), Matrix(2, 0), fixtures::example1_binary_generators(), IntMatrix(0, 0),
                     Matrix(0, 0), Matrix(0, 3), Vector(0), IntMatrix(0, 0));
    expect_same(grid_cloud(minkowski_sum(fixtures::cpz1(), binary)), grid_cloud(fixtures::example1_hpz1()));
}

TEST(CartesianProduct, Points)
{
    const HPZ P = cartesian_product(HPZ(vec({1})), HPZ(vec({2, 3})));
    EXPECT_EQ(P.c(), vec({1, 2, 3}));
}

TEST(CartesianProduct, IntervalsMakeASquare)
{
    const HPZ I = box(vec({0}));
    expect_same(grid_cloud(cartesian_product(I, I)), grid_cloud(box(vec({0, 0}))));
}

TEST(Intersection, SelfIntersection)
{
    const HPZ Z = box(vec({0.5, 0}));
    expect_same(grid_cloud(generalized_intersection(Z, Z)), grid_cloud(Z));
}

TEST(Intersection, DisjointBoxesAreEmpty)
{
    const HPZ I = generalized_intersection(box(vec({-3, 0})), box(vec({3, 0})));
    EXPECT_TRUE(grid_cloud(I).empty());
    EXPECT_TRUE(is_provably_empty(I));
}

TEST(Intersection, OverlappingZonotopesMatchFilter)
{
    Matrix G(2, 2);
    G << 1, 0.5,
         0, 1;
    const HPZ Z1 = from_zonotope(vec({0, 0}), G);
    const HPZ Z2 = box(vec({1, 0.5}));
    const oracle::Cloud expect = oracle::filter_cloud(oracle::enumerate(Z1, 9), [&](const Vector& p)
                                                      { return oracle::in_square_hz(Z2, p); });
    ASSERT_FALSE(expect.empty());
    expect_same(expect, verify::cloud_of(generalized_intersection(Z1, Z2), 9), 1e-9);
}

TEST(Halfspace, BoundsOfTheUnitBox)
{
    const SupportBounds sb = functional_bounds(box(vec({0, 0})), vec({1, 0}));
    EXPECT_DOUBLE_EQ(sb.lower, -1.0);
    EXPECT_DOUBLE_EQ(sb.upper, 1.0);
    const SupportBounds sp = functional_bounds(HPZ(vec({2, 3})), vec({1, 1}), Matrix::Identity(2, 2));
    EXPECT_DOUBLE_EQ(sp.lower, 5.0);
    EXPECT_DOUBLE_EQ(sp.upper, 5.0);
}

TEST(Halfspace, BoundsContainCloud)
{
    const HPZ Z = fixtures::example1_hpz2();
    const Vector l = vec({0.3, -1});
    const SupportBounds sb = functional_bounds(Z, l);
    for (const Vector& p : grid_cloud(Z, 8))
    {
        EXPECT_GE(l.dot(p), sb.lower - 1e-12);
        EXPECT_LE(l.dot(p), sb.upper + 1e-12);
    }
}

TEST(Halfspace, ContainingAndExcluding)
{
    const HPZ Z = fixtures::cpz1();
    const SupportBounds sb = functional_bounds(Z, vec({1, 0}));
    expect_same(grid_cloud(halfspace_intersection(Z, {vec({1, 0}), sb.upper, Matrix()})), grid_cloud(Z));
    const HPZ none = halfspace_intersection(Z, {vec({1, 0}), sb.lower - 0.1, Matrix()});
    EXPECT_TRUE(grid_cloud(none).empty());
    EXPECT_TRUE(is_provably_empty(none));
    EXPECT_EQ(none.num_generators(), Z.num_generators() + 1);
}

TEST(Halfspace, GuardOnPwnaStepOne)
{
    const PwnaModel m = fixtures::pwna();
    const HPZ R1 = step(m.initial_set, m, 0);
    // the step-1 set lies right of x1 = 0, so the mode-1 guard removes all of it
    EXPECT_TRUE(verify::cloud_of(halfspace_intersection(R1, {vec({1, 0}), 0.0, Matrix()}), 12).empty());
    // a guard line through the set agrees with the filtered oracle cloud
    const HPZ P = halfspace_intersection(R1, {vec({1, 0}), 0.35, Matrix()});
    const oracle::Cloud expect = oracle::halfspace_cloud(oracle::enumerate(R1, 12), vec({1, 0}), 0.35);
    ASSERT_FALSE(expect.empty());
    expect_same(expect, verify::cloud_of(P, 12), 1e-9);
}

TEST(Halfspace, CutThroughInitialSet)
{
    const PwnaModel m = fixtures::pwna();
    const HPZ P = halfspace_intersection(m.initial_set, {vec({1, 0}), -0.25, Matrix()});
    const oracle::Cloud expect =
        oracle::halfspace_cloud(oracle::enumerate(m.initial_set, 9), vec({1, 0}), -0.25);
    ASSERT_FALSE(expect.empty());
    expect_same(expect, verify::cloud_of(P, 9), 1e-9);
    // the whole initial set lies left of x1 = 0
    EXPECT_TRUE(is_provably_empty(halfspace_intersection(m.initial_set, {vec({-1, 0}), 0.0, Matrix()})));
}

TEST(Union, WithItself)
{
    const HPZ Z = fixtures::cpz1();
    expect_same(grid_cloud(union_of(Z, Z)), grid_cloud(Z));
}

TEST(Union, DisjointBoxes)
{
    const HPZ U = union_of(box(vec({-3, 0})), box(vec({3, 0})));
    const oracle::Cloud cloud = grid_cloud(U);
    ASSERT_FALSE(cloud.empty());
    bool left = false, right = false;
    for (const Vector& p : cloud)
    {
        EXPECT_GE(std::abs(p(0)), 2.0 - 1e-9);
        left = left || p(0) < 0;
        right = right || p(0) > 0;
    }
    EXPECT_TRUE(left && right);
    expect_same(cloud, oracle::union_cloud(grid_cloud(box(vec({-3, 0}))), grid_cloud(box(vec({3, 0})))));
}

TEST(Union, SizeAccounting)
{
    const HPZ Z1 = fixtures::example1_hpz2(), Z2 = fixtures::cpz1();
    const HPZ U = union_of(Z1, Z2);
    const Index nr = 2 * (Z1.num_factors() + Z2.num_factors() + Z1.num_binary() + Z2.num_binary());
    EXPECT_EQ(U.num_binary(), Z1.num_binary() + Z2.num_binary() + 1);
    EXPECT_EQ(U.num_factors(), Z1.num_factors() + Z2.num_factors() + nr);
    EXPECT_EQ(U.num_constraints(), Z1.num_constraints() + Z2.num_constraints() + nr);
}

// Each randomized check of the shared suite, on fewer trials than the acceptance run.
class RandomizedOps : public ::testing::TestWithParam<int>
{
};

TEST_P(RandomizedOps, MatchesOracle)
{
    verify::SuiteOptions opt;
    opt.trials = 12;
    opt.seed = 77;
    using Fn = verify::CheckResult (*)(const verify::SuiteOptions&);
    const Fn checks[] = {verify::check_linear_map,          verify::check_minkowski_sum,
                         verify::check_cartesian_product,   verify::check_generalized_intersection,
                         verify::check_halfspace_intersection, verify::check_union,
                         verify::check_compact,             verify::check_nonlinear};
    const verify::CheckResult r = checks[GetParam()](opt);
    EXPECT_TRUE(r.ok()) << r.name << ": " << r.first_failure;
    EXPECT_EQ(r.trials, opt.trials);
}

INSTANTIATE_TEST_SUITE_P(AllOps, RandomizedOps, ::testing::Range(0, 8));
