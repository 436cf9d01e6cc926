#ifndef HPZ_REACH_HPP_
#define HPZ_REACH_HPP_

/**
 * @file reach.hpp
 * @brief Forward reachability for discrete-time piecewise quadratic-affine systems.
 *
 * Per step and mode: intersect the current set with the mode's guard, map the part
 * that is not provably empty through the mode dynamics, and unite the images in mode
 * order.
 */

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "feasibility.hpp"
#include "nonlinear.hpp"
#include "ops.hpp"
#include "sample.hpp"

namespace hpz
{

/// {x : L x <= rho}
struct Polyhedron
{
    Matrix L;
    Vector rho;

    void validate(Index n) const
    {
        if (L.rows() != rho.size())
            throw Error(ErrorCode::DimensionMismatch, "guard L has " + std::to_string(L.rows()) +
                                                          " rows, rho has length " + std::to_string(rho.size()));
        if (L.cols() != n)
            throw Error(ErrorCode::DimensionMismatch, "guard L has " + std::to_string(L.cols()) +
                                                          " columns, state dimension is " + std::to_string(n));
    }

    bool contains(const Vector& x, double tol = 0.0) const
    {
        return L.rows() == 0 || ((L * x - rho).array() <= tol).all();
    }
};

struct Mode
{
    Polyhedron guard;
    QuadraticAffineMap dynamics;
};

struct PwnaModel
{
    Index state_dim = 0;
    std::vector<Mode> modes;
    HybridPolynomialZonotope initial_set;
    /// input set used at every step; the dynamics read the last n_u coordinates as u
    std::optional<HybridPolynomialZonotope> input_set;
    int horizon = 0;
    SampleOptions sampling;
    /// hard cap on n_g after each step; none by default
    std::optional<Index> generator_cap;

    Index input_dim() const { return input_set ? input_set->dim() : 0; }

    void validate() const
    {
        if (modes.empty())
            throw Error(ErrorCode::SchemaError, "model has no modes");
        if (horizon < 0)
            throw Error(ErrorCode::SchemaError, "horizon must be nonnegative");
        validate_set(initial_set);
        if (initial_set.dim() != state_dim)
            throw Error(ErrorCode::DimensionMismatch, "initial set has dimension " +
                                                          std::to_string(initial_set.dim()) + ", state dimension is " +
                                                          std::to_string(state_dim));
        if (input_set)
            validate_set(*input_set);
        for (std::size_t i = 0; i < modes.size(); ++i)
        {
            try
            {
                modes[i].guard.validate(state_dim);
                modes[i].dynamics.validate();
                if (modes[i].dynamics.input_dim() != state_dim + input_dim())
                    throw Error(ErrorCode::DimensionMismatch,
                                "dynamics read " + std::to_string(modes[i].dynamics.input_dim()) +
                                    " coordinates, expected " + std::to_string(state_dim + input_dim()));
                if (modes[i].dynamics.output_dim() != state_dim)
                    throw Error(ErrorCode::DimensionMismatch,
                                "dynamics produce " + std::to_string(modes[i].dynamics.output_dim()) +
                                    " coordinates, state dimension is " + std::to_string(state_dim));
            }
            catch (const Error& e)
            {
                throw Error(e.code(), "modes[" + std::to_string(i) + "]: " + strip(e.what()));
            }
        }
    }

  private:
    static void validate_set(const HybridPolynomialZonotope& Z) { Z.check(); }
    static std::string strip(const std::string& what)
    {
        const auto pos = what.find(": ");
        return pos == std::string::npos ? what : what.substr(pos + 2);
    }
};

struct StepDiagnostics
{
    int step = 0;
    Index n_g = 0, n_b = 0, n_c = 0, n_e = 0, n_q = 0;
    /// binary leaves of the set not excluded by interval evaluation
    std::size_t candidate_leaves = 0;
    /// leaves that produced sampled points
    std::size_t feasible_leaves = 0;
    std::size_t cloud_points = 0;
    /// modes whose partition was propagated into this set
    std::vector<int> active_modes;
    double propagate_seconds = 0.0;
    double sample_seconds = 0.0;
};

struct ReachResult
{
    std::vector<HybridPolynomialZonotope> sets;
    std::vector<PointCloud> clouds;
    std::vector<StepDiagnostics> diagnostics;
    /// set when a step failed; results up to the failing step are kept
    std::optional<ErrorCode> error;
    std::string error_message;

    bool ok() const { return !error.has_value(); }
    double total_seconds() const
    {
        double t = 0.0;
        for (const auto& d : diagnostics)
            t += d.propagate_seconds + d.sample_seconds;
        return t;
    }
};

/// Intersection of R with the guard, row by row. Rows that cannot cut the set
/// (upper support bound already <= rho) are skipped.
inline HybridPolynomialZonotope partition(const HybridPolynomialZonotope& R, const Polyhedron& guard)
{
    guard.validate(R.dim());
    HybridPolynomialZonotope out = R;
    for (Index i = 0; i < guard.L.rows(); ++i)
    {
        const Vector l = guard.L.row(i).transpose();
        if (functional_bounds(out, l).upper <= guard.rho(i))
            continue;
        out = halfspace_intersection(out, {l, guard.rho(i), Matrix()});
    }
    return out;
}

inline HybridPolynomialZonotope partition(const HybridPolynomialZonotope& R, const PwnaModel& model, std::size_t mode)
{
    return partition(R, model.modes.at(mode).guard);
}

struct StepReport
{
    std::vector<int> active_modes;
};

/// R_{k+1} from R_k. Throws AllModesEmpty when no mode contributes.
inline HybridPolynomialZonotope step(const HybridPolynomialZonotope& Rk, const PwnaModel& model, int k,
                                     StepReport* report = nullptr)
{
    std::vector<HybridPolynomialZonotope> images;
    std::vector<int> active;
    for (std::size_t i = 0; i < model.modes.size(); ++i)
    {
        const HybridPolynomialZonotope P = partition(Rk, model.modes[i].guard);
        if (is_provably_empty(P, model.sampling.leaf_cap))
            continue;
        const HybridPolynomialZonotope X = model.input_set ? cartesian_product(P, *model.input_set) : P;
        StepStats stats;
        HybridPolynomialZonotope Y = nonlinear_step(model.modes[i].dynamics, X, model.sampling.leaf_cap, &stats);
        if (stats.mapped_leaves == 0)
            continue;
        images.push_back(std::move(Y));
        active.push_back(static_cast<int>(i));
    }
    if (images.empty())
        throw Error(ErrorCode::AllModesEmpty, "every mode partition is empty at step " + std::to_string(k));
    HybridPolynomialZonotope next = compact(union_all(std::move(images), model.state_dim));
    if (model.generator_cap && next.num_generators() > *model.generator_cap)
        throw Error(ErrorCode::GeneratorCapExceeded, "step " + std::to_string(k + 1) + " has " +
                                                         std::to_string(next.num_generators()) +
                                                         " generators, cap is " +
                                                         std::to_string(*model.generator_cap));
    if (report)
        report->active_modes = std::move(active);
    return next;
}

struct ReachOptions
{
    bool sample_clouds = true;
};

/// Runs the model for its horizon. Step failures are recorded, not thrown.
inline ReachResult reach(const PwnaModel& model, const ReachOptions& opt = {})
{
    model.validate();
    using Clock = std::chrono::steady_clock;
    auto seconds = [](Clock::time_point a, Clock::time_point b)
    { return std::chrono::duration<double>(b - a).count(); };

    ReachResult res;
    auto record = [&](const HybridPolynomialZonotope& Z, int k, double prop, std::vector<int> active)
    {
        StepDiagnostics d;
        d.step = k;
        d.n_g = Z.num_generators();
        d.n_b = Z.num_binary();
        d.n_c = Z.num_constraints();
        d.n_e = Z.num_factors();
        d.n_q = Z.num_constraint_terms();
        d.candidate_leaves = count_candidate_leaves(Z, model.sampling.leaf_cap);
        d.propagate_seconds = prop;
        d.active_modes = std::move(active);
        res.sets.push_back(Z);
        if (opt.sample_clouds)
        {
            const auto t0 = Clock::now();
            res.clouds.push_back(sample(Z, model.sampling));
            d.sample_seconds = seconds(t0, Clock::now());
            d.feasible_leaves = res.clouds.back().feasible_leaves;
            d.cloud_points = res.clouds.back().size();
        }
        res.diagnostics.push_back(std::move(d));
    };

    try
    {
        record(model.initial_set, 0, 0.0, {});
        for (int k = 0; k < model.horizon; ++k)
        {
            const auto t0 = Clock::now();
            StepReport rep;
            HybridPolynomialZonotope next = step(res.sets.back(), model, k, &rep);
            record(next, k + 1, seconds(t0, Clock::now()), std::move(rep.active_modes));
        }
    }
    catch (const Error& e)
    {
        res.error = e.code();
        res.error_message = e.what();
    }
    return res;
}

} // namespace hpz

#endif
