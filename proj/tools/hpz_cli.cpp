// Command-line front end: reach runs, fixture demos and the operation check suite.
//
// Exit codes: 0 success, 1 ops-check failures, 2 usage error, otherwise the numeric
// value of the hpz::ErrorCode that stopped the run (error JSON on stderr).

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hpz/fixtures.hpp"
#include "hpz/hpz.hpp"
#include "hpz/io.hpp"
#include "hpz/verification.hpp"

namespace fs = std::filesystem;

namespace
{

struct Common
{
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid_res;
    std::optional<std::size_t> samples;
    std::string emit = "csv";
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--out", c.out, "Output directory (nothing is written without it)");
    app->add_option("--seed", c.seed, "Sampling seed");
    app->add_option("--grid-res", c.grid_res, "Grid points per factor axis")->check(CLI::PositiveNumber);
    app->add_option("--samples", c.samples, "Maximum points per sampled cloud")->check(CLI::PositiveNumber);
    app->add_option("--emit", c.emit, "Artifacts to write")->check(CLI::IsMember({"csv", "svg", "both"}));
}

void apply_common(const Common& c, hpz::SampleOptions& s)
{
    if (c.seed)
        s.seed = *c.seed;
    if (c.grid_res)
        s.grid_res = *c.grid_res;
    if (c.samples)
        s.max_points = *c.samples;
}

std::int64_t leaf_cap_from_env()
{
    const char* v = std::getenv("HPZ_LEAF_CAP");
    if (v == nullptr || *v == '\0')
        return hpz::kDefaultLeafCap;
    char* end = nullptr;
    const long long cap = std::strtoll(v, &end, 10);
    if (*end != '\0' || cap <= 0)
        throw hpz::Error(hpz::ErrorCode::SchemaError, std::string("HPZ_LEAF_CAP must be a positive integer, got '") +
                                                          v + "'");
    return cap;
}

bool wants_csv(const Common& c) { return c.emit == "csv" || c.emit == "both"; }
bool wants_svg(const Common& c) { return c.emit == "svg" || c.emit == "both"; }

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw hpz::Error(hpz::ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
}

std::string in_dir(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

int run_reach(const std::string& model_path, const Common& common, std::optional<int> steps, int containment)
{
    hpz::PwnaModel model = hpz::io::parse_model_file(model_path);
    if (steps)
    {
        if (*steps < 0)
            throw hpz::Error(hpz::ErrorCode::SchemaError, "--steps must be nonnegative");
        model.horizon = *steps;
    }
    apply_common(common, model.sampling);
    model.sampling.leaf_cap = leaf_cap_from_env();

    const hpz::ReachResult result = hpz::reach(model);
    if (!common.out.empty())
    {
        ensure_dir(common.out);
        for (std::size_t k = 0; k < result.clouds.size(); ++k)
        {
            const std::string stem = "step_" + std::to_string(k);
            if (wants_csv(common))
                hpz::io::write_file(in_dir(common.out, stem + ".csv"),
                                    hpz::io::cloud_csv(static_cast<int>(k), result.clouds[k]));
            if (wants_svg(common) && model.state_dim == 2)
            {
                std::vector<hpz::Polyhedron> guards;
                for (const hpz::Mode& m : model.modes)
                    guards.push_back(m.guard);
                hpz::io::SvgOptions so;
                so.title = "step " + std::to_string(k);
                hpz::io::write_file(in_dir(common.out, stem + ".svg"),
                                    hpz::io::scatter_svg({&result.clouds[k]}, guards, so));
            }
        }
        hpz::io::write_file(in_dir(common.out, "diagnostics.json"),
                            hpz::io::diagnostics_json(result).dump(2) + "\n");
    }
    for (const hpz::StepDiagnostics& d : result.diagnostics)
    {
        std::cout << "step " << d.step << ": n_g " << d.n_g << ", n_b " << d.n_b << ", n_c " << d.n_c
                  << ", leaves " << d.feasible_leaves << "/" << d.candidate_leaves << ", points " << d.cloud_points
                  << "\n";
    }
    std::cout << "total " << std::fixed << std::setprecision(3) << result.total_seconds() << " s\n";
    if (!result.ok())
        throw hpz::Error(*result.error, result.error_message);

    if (containment > 0)
    {
        const hpz::verify::ContainmentReport rep =
            hpz::verify::check_containment(model, result.sets, containment, model.sampling.seed + 17);
        const hpz::io::Json j{{"trajectories", rep.trajectories},
                              {"checks", rep.checks},
                              {"failures", rep.failures},
                              {"escaped", rep.escaped},
                              {"worst_residual", rep.worst_residual},
                              {"first_failure", rep.first_failure}};
        std::cout << j.dump() << "\n";
        if (!rep.ok())
            throw hpz::Error(hpz::ErrorCode::ContainmentFailed,
                             std::to_string(rep.failures) + " membership failures, " + std::to_string(rep.escaped) +
                                 " escaped trajectories");
    }
    return 0;
}

int run_demo(const std::string& fixture, const Common& common)
{
    if (fixture == "pwna")
    {
        const std::string text = hpz::io::write_model(hpz::fixtures::pwna());
        if (common.out.empty())
        {
            std::cout << text;
        }
        else
        {
            ensure_dir(common.out);
            hpz::io::write_file(in_dir(common.out, "pwna.json"), text);
        }
        return 0;
    }
    if (fixture != "example1")
        throw hpz::Error(hpz::ErrorCode::SchemaError, "unknown fixture '" + fixture + "' (example1, pwna)");

    hpz::SampleOptions s;
    s.grid_res = 40;
    s.max_points = 2000;
    apply_common(common, s);
    s.leaf_cap = leaf_cap_from_env();
    const std::vector<std::pair<std::string, hpz::HybridPolynomialZonotope>> sets{
        {"cpz1", hpz::fixtures::cpz1()},
        {"hz", hpz::fixtures::example1_hz()},
        {"hpz1", hpz::fixtures::example1_hpz1()},
        {"hpz2", hpz::fixtures::example1_hpz2()}};
    if (!common.out.empty())
        ensure_dir(common.out);
    for (const auto& [name, Z] : sets)
    {
        const hpz::PointCloud cloud = hpz::sample(Z, s);
        std::cout << name << ": " << cloud.size() << " points, " << cloud.feasible_leaves << " nonempty leaves of "
                  << (std::uint64_t{1} << Z.num_binary()) << "\n";
        if (common.out.empty())
            continue;
        if (wants_csv(common))
            hpz::io::write_file(in_dir(common.out, name + ".csv"), hpz::io::cloud_csv(0, cloud));
        if (wants_svg(common))
        {
            hpz::io::SvgOptions so;
            so.title = name;
            hpz::io::write_file(in_dir(common.out, name + ".svg"), hpz::io::scatter_svg({&cloud}, {}, so));
        }
    }
    return 0;
}

int run_ops_check(int trials, std::uint64_t seed)
{
    hpz::verify::SuiteOptions opt;
    opt.trials = trials;
    opt.seed = seed;
    const std::vector<hpz::verify::CheckResult> results = hpz::verify::run_suite(opt);
    bool all = true;
    std::cout << std::left << std::setw(26) << "operation" << std::setw(8) << "result" << std::setw(10) << "clouds"
              << std::setw(10) << "sizes" << std::setw(14) << "assignments" << std::setw(14) << "max dH"
              << std::setw(14) << "max resid" << "seconds\n";
    for (const auto& r : results)
    {
        all = all && r.ok();
        std::cout << std::left << std::setw(26) << r.name << std::setw(8) << (r.ok() ? "PASS" : "FAIL")
                  << std::setw(10) << (std::to_string(r.cloud_passed) + "/" + std::to_string(r.trials))
                  << std::setw(10) << (std::to_string(r.sizes_passed) + "/" + std::to_string(r.trials))
                  << std::setw(14)
                  << (std::to_string(r.constructive_passed) + "/" + std::to_string(r.constructive_trials))
                  << std::setw(14) << std::scientific << std::setprecision(2) << r.worst_hausdorff << std::setw(14)
                  << r.worst_residual << std::fixed << std::setprecision(2) << r.seconds << "\n";
        if (!r.first_failure.empty())
            std::cout << "  first failure: " << r.first_failure << "\n";
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hybrid polynomial zonotope reachability"};
    app.require_subcommand(1);

    Common run_common, demo_common;
    std::string model_path;
    std::optional<int> steps;
    int containment = 0;
    CLI::App* run = app.add_subcommand("run", "Reach sets of a piecewise quadratic model");
    run->add_option("--model", model_path, "Model JSON file")->required();
    run->add_option("--steps", steps, "Override the model horizon");
    run->add_option("--check-containment", containment,
                    "Simulate K trajectories and check every state for membership")
        ->check(CLI::NonNegativeNumber);
    add_common(run, run_common);

    std::string fixture;
    CLI::App* demo = app.add_subcommand("demo", "Sample a built-in fixture");
    demo->add_option("--fixture", fixture, "example1 or pwna")->required();
    add_common(demo, demo_common);

    int trials = 50;
    std::uint64_t seed = 2024;
    CLI::App* ops = app.add_subcommand("ops-check", "Randomized oracle-equivalence suite");
    ops->add_option("--trials", trials, "Trials per operation")->check(CLI::PositiveNumber);
    ops->add_option("--seed", seed, "Suite seed");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try
    {
        if (*run)
            return run_reach(model_path, run_common, steps, containment);
        if (*demo)
            return run_demo(fixture, demo_common);
        return run_ops_check(trials, seed);
    }
    catch (const hpz::Error& e)
    {
        std::cerr << hpz::io::error_json(e.code(), e.what()).dump() << "\n";
        return static_cast<int>(e.code());
    }
    catch (const std::exception& e)
    {
        std::cerr << hpz::io::Json{{"error", "Internal"}, {"code", 3}, {"message", e.what()}}.dump() << "\n";
        return 3;
    }
}
