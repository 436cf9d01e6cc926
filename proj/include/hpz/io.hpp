#ifndef HPZ_IO_HPP_
#define HPZ_IO_HPP_

/**
 * @file io.hpp
 * @brief JSON model files, cloud CSVs, diagnostics JSON and SVG scatter plots.
 *
 * Matrices are arrays of rows. Every error names the offending field path.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "reach.hpp"
#include "set.hpp"

namespace hpz::io
{

using Json = nlohmann::json;

namespace detail
{

[[noreturn]] inline void fail(ErrorCode code, const std::string& path, const std::string& msg)
{
    throw Error(code, (path.empty() ? std::string("model") : path) + ": " + msg);
}

inline void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed)
{
    if (!j.is_object())
        fail(ErrorCode::SchemaError, path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
    {
        if (!ok.count(it.key()))
            fail(ErrorCode::SchemaError, path, "unknown key '" + it.key() + "'");
    }
}

inline const Json& require(const Json& j, const std::string& path, const char* key)
{
    if (!j.contains(key))
        fail(ErrorCode::SchemaError, path, std::string("missing key '") + key + "'");
    return j.at(key);
}

inline std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

inline std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline double number(const Json& j, const std::string& path)
{
    if (!j.is_number())
        fail(ErrorCode::SchemaError, path, "expected a number");
    return j.get<double>();
}

inline int exponent(const Json& j, const std::string& path)
{
    if (!j.is_number())
        fail(ErrorCode::SchemaError, path, "expected an integer exponent");
    if (j.is_number_float())
    {
        const double v = j.get<double>();
        if (v != std::floor(v))
            fail(ErrorCode::NonIntegerExponent, path, "exponent " + std::to_string(v) + " is not an integer");
        if (v < 0)
            fail(ErrorCode::NegativeExponent, path, "exponent is negative");
        return static_cast<int>(v);
    }
    if (j.is_number_integer() && j.get<std::int64_t>() < 0)
        fail(ErrorCode::NegativeExponent, path, "exponent is negative");
    return j.get<int>();
}

inline Vector vector(const Json& j, const std::string& path)
{
    if (!j.is_array())
        fail(ErrorCode::SchemaError, path, "expected an array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Index>(i)) = number(j[i], at(path, i));
    return v;
}

/// Reads an array of rows. An empty array with known row count gives rows x 0.
template <typename Mat, typename Read>
Mat matrix(const Json& j, const std::string& path, Index rows, Read read)
{
    if (!j.is_array())
        fail(ErrorCode::SchemaError, path, "expected an array of rows");
    if (j.empty())
        return Mat(rows < 0 ? 0 : rows, 0);
    const Index r = static_cast<Index>(j.size());
    if (rows >= 0 && r != rows)
        fail(ErrorCode::DimensionMismatch, path, "has " + std::to_string(r) + " rows, expected " + std::to_string(rows));
    Index cols = -1;
    Mat M;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        const Json& row = j[i];
        if (!row.is_array())
            fail(ErrorCode::SchemaError, at(path, i), "expected an array");
        if (cols < 0)
        {
            cols = static_cast<Index>(row.size());
            M.resize(r, cols);
        }
        else if (static_cast<Index>(row.size()) != cols)
        {
            fail(ErrorCode::DimensionMismatch, at(path, i),
                 "has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
        }
        for (std::size_t k = 0; k < row.size(); ++k)
            M(static_cast<Index>(i), static_cast<Index>(k)) = read(row[k], at(at(path, i), k));
    }
    return M;
}

inline Matrix real_matrix(const Json& j, const std::string& path, Index rows = -1)
{
    return matrix<Matrix>(j, path, rows, number);
}

inline IntMatrix int_matrix(const Json& j, const std::string& path, Index rows = -1)
{
    return matrix<IntMatrix>(j, path, rows, exponent);
}

template <typename Mat>
void expect_shape(const Mat& M, Index rows, Index cols, const std::string& path)
{
    if (M.rows() != rows || M.cols() != cols)
        fail(ErrorCode::DimensionMismatch, path,
             "is " + hpz::detail::shape(M.rows(), M.cols()) + ", expected " + hpz::detail::shape(rows, cols));
}

template <typename Mat>
Json rows_of(const Mat& M)
{
    Json out = Json::array();
    for (Index i = 0; i < M.rows(); ++i)
    {
        Json row = Json::array();
        for (Index k = 0; k < M.cols(); ++k)
            row.push_back(M(i, k));
        out.push_back(std::move(row));
    }
    return out;
}

inline Json values_of(const Vector& v)
{
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

} // namespace detail

/// Parses a set object: center, generators, optional binary_generators, exponents
/// (identity when absent) and constraints {A_c, A_b, b, R}.
inline HybridPolynomialZonotope parse_set(const Json& j, const std::string& path)
{
    using namespace detail;
    check_keys(j, path, {"center", "generators", "binary_generators", "exponents", "constraints"});
    const Vector c = vector(require(j, path, "center"), join(path, "center"));
    const Index n = c.size();
    const Matrix Gc = real_matrix(require(j, path, "generators"), join(path, "generators"), n);
    const Index ng = Gc.cols();
    const Matrix Gb =
        j.contains("binary_generators") ? real_matrix(j.at("binary_generators"), join(path, "binary_generators"), n)
                                        : Matrix(n, 0);
    const Index nb = Gb.cols();
    IntMatrix E = IntMatrix::Identity(ng, ng);
    if (j.contains("exponents"))
    {
        E = int_matrix(j.at("exponents"), join(path, "exponents"));
        if (E.rows() == 0 && ng > 0)
            fail(ErrorCode::DimensionMismatch, join(path, "exponents"), "is empty but there are generators");
        if (E.rows() > 0 || ng > 0)
            expect_shape(E, E.rows(), ng, join(path, "exponents"));
    }
    const Index ne = E.rows();

    Matrix Ac(0, ne), Ab(0, nb);
    Vector b(0);
    IntMatrix R = IntMatrix::Identity(ne, ne);
    if (j.contains("constraints"))
    {
        const std::string cp = join(path, "constraints");
        const Json& cj = j.at("constraints");
        check_keys(cj, cp, {"A_c", "A_b", "b", "R"});
        b = vector(require(cj, cp, "b"), join(cp, "b"));
        const Index nc = b.size();
        if (cj.contains("R"))
            R = int_matrix(cj.at("R"), join(cp, "R"), ne);
        Ac = real_matrix(require(cj, cp, "A_c"), join(cp, "A_c"), nc);
        if (nc > 0)
            expect_shape(Ac, nc, R.cols(), join(cp, "A_c"));
        else
            Ac.resize(0, R.cols());
        Ab = cj.contains("A_b") ? real_matrix(cj.at("A_b"), join(cp, "A_b"), nc) : Matrix(Matrix::Zero(nc, nb));
        if (nc == 0)
            Ab.resize(0, nb);
        expect_shape(Ab, nc, nb, join(cp, "A_b"));
    }
    else
    {
        R = IntMatrix(ne, 0);
        Ac.resize(0, 0);
    }
    try
    {
        return HybridPolynomialZonotope(c, Gc, Gb, E, Ac, Ab, b, R);
    }
    catch (const Error& e)
    {
        fail(e.code(), path, e.what());
    }
}

inline Json set_to_json(const HybridPolynomialZonotope& Z)
{
    using namespace detail;
    Json j;
    j["center"] = values_of(Z.c());
    j["generators"] = rows_of(Z.Gc());
    if (Z.num_binary() > 0)
        j["binary_generators"] = rows_of(Z.Gb());
    j["exponents"] = rows_of(Z.E());
    if (Z.num_constraints() > 0 || Z.num_constraint_terms() > 0)
    {
        Json c;
        c["A_c"] = rows_of(Z.Ac());
        if (Z.num_binary() > 0)
            c["A_b"] = rows_of(Z.Ab());
        c["b"] = values_of(Z.b());
        c["R"] = rows_of(Z.R());
        j["constraints"] = std::move(c);
    }
    return j;
}

inline PwnaModel parse_model(const Json& j)
{
    using namespace detail;
    check_keys(j, "", {"state_dim", "modes", "initial_set", "input_set", "horizon", "sampling", "generator_cap"});
    PwnaModel m;
    const Json& sd = require(j, "", "state_dim");
    if (!sd.is_number_integer() || sd.get<std::int64_t>() <= 0)
        fail(ErrorCode::SchemaError, "state_dim", "expected a positive integer");
    m.state_dim = sd.get<Index>();
    const Index n = m.state_dim;

    m.initial_set = parse_set(require(j, "", "initial_set"), "initial_set");
    if (j.contains("input_set"))
        m.input_set = parse_set(j.at("input_set"), "input_set");
    const Index nin = n + m.input_dim();

    const Json& modes = require(j, "", "modes");
    if (!modes.is_array())
        fail(ErrorCode::SchemaError, "modes", "expected an array");
    if (modes.empty())
        fail(ErrorCode::SchemaError, "modes", "must contain at least one mode");
    for (std::size_t i = 0; i < modes.size(); ++i)
    {
        const std::string mp = at("modes", i);
        const Json& mj = modes[i];
        check_keys(mj, mp, {"guard", "quadratic", "linear", "offset"});
        Mode mode;
        const std::string gp = join(mp, "guard");
        const Json& gj = require(mj, mp, "guard");
        check_keys(gj, gp, {"L", "rho"});
        mode.guard.rho = vector(require(gj, gp, "rho"), join(gp, "rho"));
        mode.guard.L = real_matrix(require(gj, gp, "L"), join(gp, "L"), mode.guard.rho.size());
        if (mode.guard.L.rows() > 0)
            expect_shape(mode.guard.L, mode.guard.rho.size(), n, join(gp, "L"));
        else
            mode.guard.L.resize(0, n);

        mode.dynamics.A = real_matrix(require(mj, mp, "linear"), join(mp, "linear"), n);
        expect_shape(mode.dynamics.A, n, nin, join(mp, "linear"));
        mode.dynamics.d = vector(require(mj, mp, "offset"), join(mp, "offset"));
        if (mode.dynamics.d.size() != n)
            fail(ErrorCode::DimensionMismatch, join(mp, "offset"),
                 "has length " + std::to_string(mode.dynamics.d.size()) + ", expected " + std::to_string(n));
        const Json& qj = require(mj, mp, "quadratic");
        if (!qj.is_array())
            fail(ErrorCode::SchemaError, join(mp, "quadratic"), "expected an array of matrices");
        if (static_cast<Index>(qj.size()) != n)
            fail(ErrorCode::DimensionMismatch, join(mp, "quadratic"),
                 "has " + std::to_string(qj.size()) + " matrices, expected " + std::to_string(n));
        for (std::size_t r = 0; r < qj.size(); ++r)
        {
            const std::string qp = at(join(mp, "quadratic"), r);
            Matrix Q = real_matrix(qj[r], qp);
            expect_shape(Q, nin, nin, qp);
            mode.dynamics.Q.push_back(std::move(Q));
        }
        m.modes.push_back(std::move(mode));
    }

    const Json& h = require(j, "", "horizon");
    if (!h.is_number_integer() || h.get<std::int64_t>() < 0)
        fail(ErrorCode::SchemaError, "horizon", "expected a nonnegative integer");
    m.horizon = h.get<int>();

    if (j.contains("sampling"))
    {
        const Json& sj = j.at("sampling");
        check_keys(sj, "sampling", {"grid_res", "max_points", "seed"});
        auto positive = [&](const char* key, std::int64_t lo) -> std::int64_t
        {
            const Json& v = sj.at(key);
            if (!v.is_number_integer() || v.get<std::int64_t>() < lo)
                fail(ErrorCode::SchemaError, join("sampling", key), "expected an integer >= " + std::to_string(lo));
            return v.get<std::int64_t>();
        };
        if (sj.contains("grid_res"))
            m.sampling.grid_res = static_cast<int>(positive("grid_res", 1));
        if (sj.contains("max_points"))
            m.sampling.max_points = static_cast<std::size_t>(positive("max_points", 1));
        if (sj.contains("seed"))
            m.sampling.seed = static_cast<std::uint64_t>(positive("seed", 0));
    }
    if (j.contains("generator_cap"))
    {
        const Json& g = j.at("generator_cap");
        if (!g.is_number_integer() || g.get<std::int64_t>() <= 0)
            fail(ErrorCode::SchemaError, "generator_cap", "expected a positive integer");
        m.generator_cap = g.get<Index>();
    }
    m.validate();
    return m;
}

/// Parses model text. Syntax errors report line and column.
inline PwnaModel parse_model_text(const std::string& text)
{
    Json j;
    try
    {
        j = Json::parse(text);
    }
    catch (const Json::parse_error& e)
    {
        // locate the byte offset as line:column
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
        {
            if (text[i] == '\n')
            {
                ++line;
                col = 1;
            }
            else
            {
                ++col;
            }
        }
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
    return parse_model(j);
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path);
    out << text;
    if (!out)
        throw Error(ErrorCode::IoError, "write failed for " + path);
}

inline PwnaModel parse_model_file(const std::string& path) { return parse_model_text(read_file(path)); }

inline Json model_to_json(const PwnaModel& m)
{
    using namespace detail;
    Json j;
    j["state_dim"] = m.state_dim;
    Json modes = Json::array();
    for (const Mode& mode : m.modes)
    {
        Json mj;
        mj["guard"]["L"] = rows_of(mode.guard.L);
        mj["guard"]["rho"] = values_of(mode.guard.rho);
        Json q = Json::array();
        for (const Matrix& Q : mode.dynamics.Q)
            q.push_back(rows_of(Q));
        mj["quadratic"] = std::move(q);
        mj["linear"] = rows_of(mode.dynamics.A);
        mj["offset"] = values_of(mode.dynamics.d);
        modes.push_back(std::move(mj));
    }
    j["modes"] = std::move(modes);
    j["initial_set"] = set_to_json(m.initial_set);
    if (m.input_set)
        j["input_set"] = set_to_json(*m.input_set);
    j["horizon"] = m.horizon;
    j["sampling"] = {{"grid_res", m.sampling.grid_res},
                     {"max_points", m.sampling.max_points},
                     {"seed", m.sampling.seed}};
    if (m.generator_cap)
        j["generator_cap"] = *m.generator_cap;
    return j;
}

inline std::string write_model(const PwnaModel& m) { return model_to_json(m).dump(2) + "\n"; }

/// Structural equality of two models (exact floating-point comparison).
inline bool same_model(const PwnaModel& a, const PwnaModel& b)
{
    if (a.state_dim != b.state_dim || a.horizon != b.horizon || a.modes.size() != b.modes.size() ||
        !(a.initial_set == b.initial_set) || a.input_set.has_value() != b.input_set.has_value() ||
        a.generator_cap != b.generator_cap || a.sampling.grid_res != b.sampling.grid_res ||
        a.sampling.max_points != b.sampling.max_points || a.sampling.seed != b.sampling.seed)
        return false;
    if (a.input_set && !(*a.input_set == *b.input_set))
        return false;
    for (std::size_t i = 0; i < a.modes.size(); ++i)
    {
        const Mode &x = a.modes[i], &y = b.modes[i];
        if (x.guard.L != y.guard.L || x.guard.rho != y.guard.rho || x.dynamics.A != y.dynamics.A ||
            x.dynamics.d != y.dynamics.d || x.dynamics.Q.size() != y.dynamics.Q.size())
            return false;
        for (std::size_t r = 0; r < x.dynamics.Q.size(); ++r)
        {
            if (x.dynamics.Q[r] != y.dynamics.Q[r])
                return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Artifacts

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Header plus one row per point: step, x1..xn, leaf.
inline std::string cloud_csv(int step, const PointCloud& cloud)
{
    std::string out = "step";
    for (Index i = 0; i < cloud.dim; ++i)
        out += ",x" + std::to_string(i + 1);
    out += ",leaf\n";
    for (std::size_t p = 0; p < cloud.points.size(); ++p)
    {
        out += std::to_string(step);
        for (Index i = 0; i < cloud.dim; ++i)
            out += "," + format_double(cloud.points[p](i));
        out += "," + std::to_string(cloud.leaf[p]) + "\n";
    }
    return out;
}

inline Json diagnostics_json(const ReachResult& r)
{
    Json steps = Json::array();
    for (const StepDiagnostics& d : r.diagnostics)
    {
        steps.push_back({{"step", d.step},
                         {"n_g", d.n_g},
                         {"n_b", d.n_b},
                         {"n_c", d.n_c},
                         {"n_e", d.n_e},
                         {"n_q", d.n_q},
                         {"candidate_leaves", d.candidate_leaves},
                         {"feasible_leaves", d.feasible_leaves},
                         {"cloud_points", d.cloud_points},
                         {"active_modes", d.active_modes},
                         {"propagate_seconds", d.propagate_seconds},
                         {"sample_seconds", d.sample_seconds}});
    }
    Json j{{"steps", std::move(steps)}, {"total_seconds", r.total_seconds()}, {"ok", r.ok()}};
    if (r.error)
        j["error"] = {{"code", static_cast<int>(*r.error)}, {"name", to_string(*r.error)}, {"message", r.error_message}};
    return j;
}

inline Json error_json(ErrorCode code, const std::string& message)
{
    return {{"error", to_string(code)}, {"code", static_cast<int>(code)}, {"message", message}};
}

struct SvgOptions
{
    int width = 480;
    int height = 480;
    double radius = 1.2;
    std::string title;
};

/// Scatter plot of 2-D clouds. Each line L x = rho of the guards is drawn dashed.
inline std::string scatter_svg(const std::vector<const PointCloud*>& clouds, const std::vector<Polyhedron>& guards,
                               const SvgOptions& opt = {})
{
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const PointCloud* c : clouds)
    {
        if (c->dim != 2)
            throw Error(ErrorCode::DimensionMismatch, "SVG output needs 2-D clouds");
        for (const Vector& p : c->points)
        {
            xmin = std::min(xmin, p(0));
            xmax = std::max(xmax, p(0));
            ymin = std::min(ymin, p(1));
            ymax = std::max(ymax, p(1));
        }
    }
    if (!(xmin <= xmax))
    {
        xmin = ymin = -1.0;
        xmax = ymax = 1.0;
    }
    const double padx = 0.05 * std::max(xmax - xmin, 1e-6), pady = 0.05 * std::max(ymax - ymin, 1e-6);
    xmin -= padx;
    xmax += padx;
    ymin -= pady;
    ymax += pady;
    const double m = 40.0, W = opt.width, H = opt.height;
    auto sx = [&](double x) { return m + (x - xmin) / (xmax - xmin) * (W - 2 * m); };
    auto sy = [&](double y) { return H - m - (y - ymin) / (ymax - ymin) * (H - 2 * m); };
    auto f = [](double v) { char b[32]; std::snprintf(b, sizeof(b), "%.3f", v); return std::string(b); };

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) +
                    "\" height=\"" + std::to_string(opt.height) + "\" viewBox=\"0 0 " + std::to_string(opt.width) +
                    " " + std::to_string(opt.height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<path d=\"M" + f(m) + " " + f(m) + " H" + f(W - m) + " V" + f(H - m) + " H" + f(m) +
         " Z\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    // axis labels at the corners of the frame
    s += "<text x=\"" + f(m) + "\" y=\"" + f(H - m + 16) + "\" font-size=\"11\">" + f(xmin) + "</text>\n";
    s += "<text x=\"" + f(W - m) + "\" y=\"" + f(H - m + 16) + "\" font-size=\"11\" text-anchor=\"end\">" + f(xmax) +
         "</text>\n";
    s += "<text x=\"" + f(m - 4) + "\" y=\"" + f(H - m) + "\" font-size=\"11\" text-anchor=\"end\">" + f(ymin) +
         "</text>\n";
    s += "<text x=\"" + f(m - 4) + "\" y=\"" + f(m + 10) + "\" font-size=\"11\" text-anchor=\"end\">" + f(ymax) +
         "</text>\n";
    s += "<text x=\"" + f(W / 2) + "\" y=\"" + f(H - 8) + "\" font-size=\"12\" text-anchor=\"middle\">x1</text>\n";
    s += "<text x=\"12\" y=\"" + f(H / 2) + "\" font-size=\"12\">x2</text>\n";
    if (!opt.title.empty())
        s += "<text x=\"" + f(W / 2) + "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">" + opt.title + "</text>\n";

    for (const Polyhedron& g : guards)
    {
        for (Index r = 0; r < g.L.rows(); ++r)
        {
            if (g.L.cols() != 2)
                continue;
            const double a = g.L(r, 0), b = g.L(r, 1), rho = g.rho(r);
            double x0, y0, x1, y1;
            if (std::abs(b) >= std::abs(a))
            {
                if (b == 0.0)
                    continue;
                x0 = xmin;
                x1 = xmax;
                y0 = (rho - a * x0) / b;
                y1 = (rho - a * x1) / b;
            }
            else
            {
                y0 = ymin;
                y1 = ymax;
                x0 = (rho - b * y0) / a;
                x1 = (rho - b * y1) / a;
            }
            s += "<path d=\"M" + f(sx(x0)) + " " + f(sy(y0)) + " L" + f(sx(x1)) + " " + f(sy(y1)) +
                 "\" stroke=\"#555\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n";
        }
    }
    for (std::size_t k = 0; k < clouds.size(); ++k)
    {
        // one path of tiny squares per cloud keeps the file small
        std::string d;
        const double r = opt.radius;
        for (const Vector& p : clouds[k]->points)
        {
            const double X = sx(p(0)), Y = sy(p(1));
            if (X < m || X > W - m || Y < m || Y > H - m)
                continue;
            d += "M" + f(X - r) + " " + f(Y - r) + "h" + f(2 * r) + "v" + f(2 * r) + "h" + f(-2 * r) + "z";
        }
        s += "<path d=\"" + d + "\" fill=\"" + palette[k % 6] + "\" fill-opacity=\"0.8\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

} // namespace hpz::io

#endif
