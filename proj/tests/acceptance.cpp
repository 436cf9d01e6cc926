// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "hpz/fixtures.hpp"
#include "hpz/hpz.hpp"
#include "hpz/oracle.hpp"
#include "hpz/verification.hpp"

using namespace hpz;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail)
{
    std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

/// Raw hybrid zonotope blocks: c + Gc xi + Gb xb with Ac xi + Ab xb = b.
struct RawHz
{
    Vector c;
    Matrix Gc, Gb, Ac, Ab;
    Vector b;
    /// monomial exponents of the generator columns, identity for a plain hybrid zonotope
    IntMatrix E;
};

/// Direct enumerator on the raw blocks: grid over the factor box, projected exactly onto
/// the linear constraints of every binary leaf.
oracle::Cloud enumerate_raw(const RawHz& Z, int grid_res)
{
    const Index ne = Z.E.rows(), nb = Z.Gb.cols();
    std::uint64_t grid = 1;
    for (Index k = 0; k < ne; ++k)
        grid *= static_cast<std::uint64_t>(grid_res);
    oracle::Cloud out;
    for (std::uint64_t leaf = 0; leaf < (std::uint64_t{1} << nb); ++leaf)
    {
        Vector xb(nb);
        for (Index i = 0; i < nb; ++i)
            xb(i) = (leaf >> i) & 1u ? 1.0 : -1.0;
        const Vector beta = Z.b - Z.Ab * xb;
        for (std::uint64_t s = 0; s < grid; ++s)
        {
            Vector g(ne);
            std::uint64_t t = s;
            for (Index k = 0; k < ne; ++k)
            {
                g(k) = -1.0 + 2.0 * static_cast<double>(t % static_cast<std::uint64_t>(grid_res)) / (grid_res - 1);
                t /= static_cast<std::uint64_t>(grid_res);
            }
            Vector xi;
            if (!oracle::project(Z.Ac, beta, g, xi))
                continue;
            Vector x = Z.c + Z.Gb * xb;
            for (Index j = 0; j < Z.Gc.cols(); ++j)
            {
                double m = 1.0;
                for (Index k = 0; k < ne; ++k)
                    m *= std::pow(xi(k), Z.E(k, j));
                x += m * Z.Gc.col(j);
            }
            out.push_back(x);
        }
    }
    return out;
}

RawHz random_raw(verify::Rng& rng, bool binaries)
{
    verify::GenSpec spec;
    spec.n = verify::uniform_int(rng, 1, 3);
    spec.ne_max = 4;
    spec.ng_max = 4;
    spec.nb_max = binaries ? 3 : 0;
    spec.nc_max = 2;
    spec.identity_exponents = binaries;
    const HPZ Z = verify::random_instance(rng, spec).set;
    // R is the identity here, so Ac acts on the factors directly
    return {Z.c(), Z.Gc(), Z.Gb(), Z.Ac(), Z.Ab(), Z.b(), Z.E()};
}

void criterion1()
{
    const auto t0 = Clock::now();
    verify::Rng rng(101);
    const int grid = 4;
    double worst = 0.0;
    int passed = 0, nonempty = 0;
    for (int t = 0; t < 100; ++t)
    {
        const bool hybrid = t < 50;
        const RawHz raw = random_raw(rng, hybrid);
        const HPZ Z = hybrid ? from_hybrid_zonotope(raw.c, raw.Gc, raw.Gb, raw.Ac, raw.Ab, raw.b)
                             : from_cpz(raw.c, raw.Gc, raw.E, raw.Ac, raw.b,
                                        IntMatrix::Identity(raw.E.rows(), raw.E.rows()));
        const oracle::Cloud expect = enumerate_raw(raw, grid);
        const oracle::CloudMetrics m = oracle::compare(expect, verify::cloud_of(Z, grid));
        if (!expect.empty())
        {
            ++nonempty;
            worst = std::max(worst, m.hausdorff());
        }
        passed += m.within(1e-9) ? 1 : 0;
    }
    const double s = seconds_since(t0);
    report(1, passed == 100 && s < 60.0,
           std::to_string(passed) + "/100 embeddings (50 hybrid, 50 polynomial without binaries, " +
               std::to_string(nonempty) + " nonempty), worst Hausdorff " + fmt("%.2e", worst) + ", " +
               fmt("%.2f", s) + " s");
}

std::vector<verify::CheckResult> suite;

void criterion2()
{
    const auto t0 = Clock::now();
    verify::SuiteOptions opt;
    opt.trials = 50;
    suite = verify::run_suite(opt);
    const double s = seconds_since(t0);
    bool ok = s < 600.0;
    std::string detail;
    for (const verify::CheckResult& r : suite)
    {
        const bool good = r.cloud_passed == r.trials && r.constructive_passed == r.constructive_trials;
        ok = ok && good && r.trials == 50;
        detail += "\n    " + r.name + ": cloud " + std::to_string(r.cloud_passed) + "/" + std::to_string(r.trials) +
                  ", constructive " + std::to_string(r.constructive_passed) + "/" +
                  std::to_string(r.constructive_trials) + ", worst dH " + fmt("%.2e", r.worst_hausdorff) +
                  ", worst residual " + fmt("%.2e", r.worst_residual);
        if (!good)
            detail += " (" + r.first_failure + ")";
    }
    report(2, ok, fmt("%.2f", s) + " s" + detail);
}

void criterion3()
{
    const HPZ cpz = fixtures::cpz1();
    const HPZ hpz1 = fixtures::example1_hpz1();
    const int grid = 12;
    const oracle::Cloud base = verify::cloud_of(cpz, grid);
    oracle::Cloud translates;
    for (std::uint64_t i = 0; i < 8; ++i)
        translates = oracle::union_cloud(
            translates, oracle::translate_cloud(base, fixtures::example1_binary_generators() * binary_from_index(i, 3)));
    const oracle::CloudMetrics m = oracle::compare(translates, verify::cloud_of(hpz1, grid));
    const bool copies = m.within(1e-9) && !base.empty();

    // a leaf is nonempty when the sampler finds a feasible point in it
    const HPZ hpz2 = fixtures::example1_hpz2();
    int nonempty = 0, extent = 0;
    for (std::uint64_t i = 0; i < 8; ++i)
    {
        const HPZ L = fix_binaries(hpz2, binary_from_index(i, 3));
        const oracle::Cloud c = verify::cloud_of(L, 8);
        if (c.empty())
            continue;
        ++nonempty;
        const auto r = reduce_leaf(L);
        extent += r && r->set.num_generators() > 0 ? 1 : 0;
    }
    report(3, copies && nonempty == 6,
           "HPZ1 vs 8 translates dH " + fmt("%.2e", m.hausdorff()) + "; HPZ2 nonempty leaves " +
               std::to_string(nonempty) + " (expected 6), of which " + std::to_string(extent) +
               " have positive extent");
}

void criterion4()
{
    const PwnaModel model = fixtures::pwna();
    const auto t0 = Clock::now();
    const ReachResult r = reach(model);
    if (!r.ok())
    {
        report(4, false, "reach failed: " + r.error_message);
        return;
    }
    const verify::ContainmentReport rep = verify::check_containment(model, r.sets, 1000, 7);

    // every partition cloud respects its guard
    double worst_violation = 0.0;
    std::size_t partition_points = 0;
    for (const HPZ& R : r.sets)
    {
        for (const Mode& mode : model.modes)
        {
            SampleOptions o = model.sampling;
            for (const Vector& p : sample(partition(R, mode.guard), o).points)
            {
                ++partition_points;
                if (mode.guard.L.rows() > 0)
                    worst_violation = std::max(worst_violation, (mode.guard.L * p - mode.guard.rho).maxCoeff());
            }
        }
    }
    const double s = seconds_since(t0);
    const bool a = rep.ok() && rep.trajectories == 1000;
    const bool b = worst_violation <= 1e-9;
    const bool c = s <= 60.0;
    report(4, a && b && c,
           "(a) " + std::to_string(rep.checks - rep.failures) + "/" + std::to_string(rep.checks) +
               " states contained, worst residual " + fmt("%.2e", rep.worst_residual) +
               (rep.first_failure.empty() ? "" : " (" + rep.first_failure + ")") + "; (b) " +
               std::to_string(partition_points) + " partition points, worst guard violation " +
               fmt("%.2e", worst_violation) + "; (c) " + fmt("%.2f", s) + " s, final n_g " +
               std::to_string(r.diagnostics.back().n_g));
}

void criterion5()
{
    QuadraticAffineMap sq;
    sq.Q.push_back(Matrix::Ones(1, 1));
    sq.A = Matrix::Zero(1, 1);
    sq.d = Vector::Zero(1);
    const oracle::Cloud c = verify::cloud_of(nonlinear_step(sq, from_zonotope(Vector::Zero(1), Matrix::Ones(1, 1))), 41);
    double lo = 1e300, hi = -1e300;
    for (const Vector& p : c)
    {
        lo = std::min(lo, p(0));
        hi = std::max(hi, p(0));
    }
    const bool square = !c.empty() && std::abs(lo) <= 1e-9 && std::abs(hi - 1.0) <= 1e-9;

    verify::Rng rng(55);
    int agree = 0;
    double worst = 0.0;
    for (int t = 0; t < 50; ++t)
    {
        verify::GenSpec spec;
        spec.n = verify::uniform_int(rng, 1, 3);
        const HPZ Z = verify::random_instance(rng, spec).set;
        QuadraticAffineMap f;
        f.A = verify::random_matrix(rng, spec.n, spec.n);
        f.d = verify::random_matrix(rng, spec.n, 1);
        for (Index i = 0; i < spec.n; ++i)
            f.Q.push_back(Matrix::Zero(spec.n, spec.n));
        const oracle::CloudMetrics m = oracle::compare(verify::cloud_of(translate(linear_map(f.A, Z), f.d), 4),
                                                       verify::cloud_of(nonlinear_step(f, Z), 4));
        worst = std::max(worst, m.empty_agree() && m.a_empty ? 0.0 : m.hausdorff());
        agree += m.within(1e-12) ? 1 : 0;
    }
    report(5, square && agree == 50,
           "x^2 on [-1, 1] gives [" + fmt("%.3g", lo) + ", " + fmt("%.3g", hi) + "]; affine " +
               std::to_string(agree) + "/50 within 1e-12, worst " + fmt("%.2e", worst));
}

void criterion6()
{
    bool ok = !suite.empty();
    std::string detail;
    for (const verify::CheckResult& r : suite)
    {
        ok = ok && r.sizes_passed == r.trials;
        detail += " " + r.name + " " + std::to_string(r.sizes_passed) + "/" + std::to_string(r.trials) + ";";
    }
    report(6, ok, "size formulas:" + detail);
}

} // namespace

int main()
{
    try
    {
        criterion1();
        criterion2();
        criterion3();
        criterion4();
        criterion5();
        criterion6();
    }
    catch (const std::exception& e)
    {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
