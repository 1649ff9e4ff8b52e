#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include <periodlab/elliptic_periods.hpp>
#include <periodlab/gauss_manin.hpp>
#include <periodlab/griffiths_domain.hpp>
#include <periodlab/group_poincare.hpp>
#include <periodlab/hodge_structures.hpp>
#include <periodlab/modular_forms.hpp>

namespace periodlab::cli
{
namespace
{

using json = nlohmann::ordered_json;
using ComplexArgs = std::map<std::string, Complex>;

[[noreturn]] void invalid(const std::string &what)
{
    throw Error(ErrorCode::InvalidArgument, what);
}

double parse_real(std::string_view s, const std::string &context)
{
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
        invalid("cannot read a number from '" + context + "'");
    }
    return v;
}

int exit_code_of(const Error &e)
{
    return is_numerical(e.code()) ? exit_numerical : exit_validation;
}

json to_json(Complex z)
{
    return json::array({z.real(), z.imag()});
}

template <typename Derived>
json to_json(const Eigen::MatrixBase<Derived> &m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if constexpr (std::is_integral_v<typename Derived::Scalar>) {
                row.push_back(m(i, j));
            } else {
                row.push_back(to_json(Complex(m(i, j))));
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Complex complex_from_json(const json &v)
{
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    if (v.is_string()) {
        return parse_complex(v.get<std::string>());
    }
    invalid("expected a complex number, got " + v.dump());
}

CMatrix matrix_from_json(const json &v, const std::string &what)
{
    if (!v.is_array() || v.empty() || !v[0].is_array()) {
        invalid(what + ": expected a nonempty array of rows");
    }
    const std::size_t cols = v[0].size();
    CMatrix m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_array() || v[i].size() != cols) {
            invalid(what + ": rows of unequal length");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            m(Eigen::Index(i), Eigen::Index(j)) = complex_from_json(v[i][j]);
        }
    }
    return m;
}

IMatrix int_matrix_from_json(const json &v, const std::string &what)
{
    const CMatrix c = matrix_from_json(v, what);
    IMatrix m(c.rows(), c.cols());
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            const double re = c(i, j).real();
            if (c(i, j).imag() != 0.0 || re != std::round(re)) {
                invalid(what + ": entries must be integers");
            }
            m(i, j) = static_cast<int>(re);
        }
    }
    return m;
}

json read_json_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        invalid("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        invalid(path + ": " + e.what());
    }
}

struct Settings {
    double tol = default_tol;
    bool normalize = false;
};

json periods_json(const PeriodMatrix2 &p, const Settings &s)
{
    return to_json(s.normalize ? p.normalized().entries : p.entries);
}

Complex need(const ComplexArgs &args, const std::string &key)
{
    const auto it = args.find(key);
    if (it == args.end()) {
        invalid("missing --" + key);
    }
    return it->second;
}

// ---- commands on complex scalars (these can be swept)

json cmd_periods(const ComplexArgs &a, const Settings &s)
{
    const WeierstrassPoint t{need(a, "t2"), need(a, "t3")};
    PeriodOptions opts;
    opts.tol = s.tol;
    const PeriodMatrix2 p = period_matrix(t, opts);
    const ParamPath path = default_path(t, opts);
    const Complex expected_det = double(legendre_sign()) * 2.0 * pi * imag_unit;
    return {
        {"periods", periods_json(p, s)},
        {"tau", to_json(p.tau())},
        {"det", to_json(p.det())},
        {"discriminant", to_json(discriminant(t))},
        {"legendre_sign", legendre_sign()},
        {"diagnostics",
         {{"det_defect", std::abs(p.det() - expected_det)},
          {"path_waypoints", path.waypoints().size()},
          {"path_length", path.length()},
          {"path_clearance", path.clearance()}}},
    };
}

json cmd_tau(const ComplexArgs &a, const Settings &s)
{
    const WeierstrassPoint t{need(a, "t2"), need(a, "t3")};
    const Complex tau = period_map_tau(t, s.tol);
    const ReducedTau r = reduce_tau(tau);
    return {
        {"tau", to_json(tau)},
        {"reduced_tau", to_json(r.tau)},
        {"gamma", to_json(r.gamma)},
        {"j_from_parameters", to_json(std::pow(t.t2, 3) / discriminant(t))},
    };
}

json cmd_j(const ComplexArgs &a, const Settings &s)
{
    const Complex tau = need(a, "tau");
    const Complex j = j_unscaled(tau, s.tol);
    return {
        {"j", to_json(j)},
        {"j_1728", to_json(1728.0 * j)},
        {"diagnostics", {{"reduced_tau", to_json(reduce_tau(tau).tau)}}},
    };
}

json cmd_eisenstein(const ComplexArgs &a, int k, const Settings &s)
{
    const bool has_tau = a.count("tau") != 0;
    const bool has_omega = a.count("omega1") != 0 || a.count("omega2") != 0;
    if (has_tau == has_omega) {
        invalid("give either --tau or both --omega1 and --omega2");
    }
    const Lattice l = has_tau ? Lattice::from_tau(need(a, "tau")) : Lattice::checked(need(a, "omega1"), need(a, "omega2"));
    if (has_tau && !(l.tau().imag() > 0.0)) {
        throw Error(ErrorCode::RealTau, "tau must lie in the upper half plane");
    }
    const Complex sum = eisenstein_lattice(k, l, s.tol);
    json out{{"lattice_sum", to_json(sum)}};
    json diag{{"radius", eisenstein_lattice_radius(k, l, s.tol)}};
    if (k == 4 || k == 6) {
        // E_k(Z w1 + Z w2) = w2^-k E_k(w1 / w2) for the reduced basis
        const Lattice r = reduce_lattice(l);
        const Complex q = std::pow(r.omega2, -k) * eisenstein_q(k, r.tau());
        out["q_series"] = to_json(q);
        diag["difference"] = std::abs(q - sum);
    }
    out["diagnostics"] = diag;
    return out;
}

json cmd_cubic_family(const ComplexArgs &a, const Settings &s)
{
    const CubicFamilyPoint k{need(a, "t0"), need(a, "t1"), need(a, "t2"), need(a, "t3")};
    const ReducedCubicFamily r = reduce_cubic_family(k);
    const PeriodMatrix2 p = cubic_family_period_matrix(k, s.tol);
    return {
        {"weierstrass_t2", to_json(r.point.t2)},
        {"weierstrass_t3", to_json(r.point.t3)},
        {"scale", to_json(r.scale)},
        {"periods", periods_json(p, s)},
        {"tau", to_json(p.tau())},
    };
}

json cmd_monodromy(const ComplexArgs &a, double radius, int turns, const Settings &s)
{
    const Complex t2 = need(a, "t2"), center = need(a, "center");
    if (!(radius > 0.0) || turns < 1) {
        invalid("monodromy needs --radius > 0 and --turns >= 1");
    }
    const ParamPath loop = circle_loop_t3(t2, center, radius, turns);
    const PeriodMatrix2 p0 = period_matrix(WeierstrassPoint::from_param(loop.start()), s.tol);
    OdeStats stats;
    const PeriodMatrix2 end = transport(loop, p0, s.tol, &stats);
    const Eigen::Matrix2cd raw = end.entries * p0.entries.inverse();
    double deviation = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            deviation = std::max(deviation, std::abs(raw(i, j) - std::round(raw(i, j).real())));
        }
    }
    const Eigen::Matrix2i m = round_monodromy(raw).entries;
    const Eigen::Matrix2i n = m - Eigen::Matrix2i::Identity();
    const Eigen::Matrix2i by_quadrature = monodromy_by_quadrature(loop, p0, s.tol).entries;
    return {
        {"matrix", to_json(m)},
        {"trace", m.trace()},
        {"det", m.determinant()},
        {"unipotent", (n * n).isZero()},
        {"diagnostics",
         {{"deviation", deviation},
          {"sides_per_turn", 64},
          {"ode_accepted", stats.accepted},
          {"ode_rejected", stats.rejected},
          {"quadrature_agrees", by_quadrature == m}}},
    };
}

// ---- other commands

std::vector<ParamPoint> waypoints_from_json(const json &v)
{
    if (!v.is_array() || v.size() < 2) {
        invalid("a path needs at least two waypoints");
    }
    std::vector<ParamPoint> w;
    for (const json &p : v) {
        if (!p.is_array() || p.size() != 2) {
            invalid("each waypoint is [t2, t3], got " + p.dump());
        }
        w.push_back(WeierstrassPoint{complex_from_json(p[0]), complex_from_json(p[1])}.as_param());
    }
    return w;
}

json cmd_pf_transport(const std::string &file, const Settings &s)
{
    const json doc = read_json_file(file);
    const DiscriminantFn disc = weierstrass_discriminant();
    std::optional<ParamPath> path;
    if (doc.is_object() && doc.contains("loop")) {
        const json &l = doc["loop"];
        path = circle_loop_t3(complex_from_json(l.value("t2", json(4.0))), complex_from_json(l.at("center")),
                              l.at("radius").get<double>(), l.value("turns", 1));
    } else {
        const std::vector<ParamPoint> w = waypoints_from_json(doc.is_object() ? doc.at("waypoints") : doc);
        const double clearance = doc.is_object() && doc.contains("clearance")
                                     ? doc["clearance"].get<double>()
                                     : ParamPath::default_clearance(w, disc);
        path.emplace(w, clearance, disc);
    }
    const PeriodMatrix2 p0 = period_matrix(WeierstrassPoint::from_param(path->start()), s.tol);
    OdeStats stats;
    const PeriodMatrix2 end = transport(*path, p0, s.tol, &stats);
    const PeriodMatrix2 quad = continue_periods(*path, p0, s.tol);
    json out{
        {"start_periods", periods_json(p0, s)},
        {"end_periods", periods_json(end, s)},
        {"quadrature_end_periods", periods_json(quad, s)},
        {"det_start", to_json(p0.det())},
        {"det_end", to_json(end.det())},
    };
    if (path->is_closed()) {
        out["monodromy"] = to_json(round_monodromy(end.entries * p0.entries.inverse()).entries);
    }
    out["diagnostics"] = {
        {"transport_vs_quadrature", max_abs(end.entries - quad.entries)},
        {"det_drift", std::abs(end.det() - p0.det())},
        {"segments", path->segment_count()},
        {"path_length", path->length()},
        {"clearance", path->clearance()},
        {"ode_accepted", stats.accepted},
        {"ode_rejected", stats.rejected},
    };
    return out;
}

json polarization_json(const HodgeType &type, const HodgeFiltration &f, const Settings &s)
{
    const HodgeDecomposition d = decomposition_from_filtration(f, type);
    const PolarizationReport r = verify_polarization(d, type, s.tol);
    json out{
        {"first_relation", r.first},
        {"second_relation", r.second},
        {"passed", r.passed()},
        {"details", r.details},
    };
    json diag{{"first_defect", r.first_defect}, {"second_min_eigenvalue", r.second_min_eigenvalue}};
    if (r.passed()) {
        const RealHodgeData real = real_structure(d, type, s.tol);
        out["riemann_clauses"] = json::array({real.riemann.clause[0], real.riemann.clause[1], real.riemann.clause[2],
                                               real.riemann.clause[3]});
        diag["weil_form_min_eigenvalue"] = weil_form_min_eigenvalue(d, type);
    }
    out["diagnostics"] = diag;
    return out;
}

json cmd_hodge_check(const std::string &file, json &inputs, const Settings &s)
{
    const json doc = read_json_file(file);
    if (!doc.is_object()) {
        invalid("a point file holds a JSON object");
    }
    if (doc.contains("tau")) {
        const Complex tau = complex_from_json(doc["tau"]);
        inputs["tau"] = to_json(tau);
        const EllipticHodge e = elliptic_hs(tau);
        return polarization_json(e.type, e.filtration, s);
    }
    const int m = doc.at("weight").get<int>();
    const std::vector<int> h = doc.at("hodge_numbers").get<std::vector<int>>();
    const HodgeType type = HodgeType::checked(m, h, int_matrix_from_json(doc.at("psi"), "psi"));
    HodgeFiltration f;
    if (doc.contains("filtration")) {
        for (const json &level : doc["filtration"]) {
            f.level.push_back(matrix_from_json(level, "filtration"));
        }
    } else {
        f = base_point(type);
    }
    validate_filtration(f, type);
    inputs["weight"] = m;
    inputs["hodge_numbers"] = h;
    return polarization_json(type, f, s);
}

// Psi for which a base point is built in, if any.
std::optional<IMatrix> default_form(int m, const std::vector<int> &h)
{
    int mu = 0;
    for (int x : h) {
        mu += x;
    }
    if (m % 2 == 1) {
        return standard_symplectic(mu / 2);
    }
    if (m == 2) {
        IMatrix p = IMatrix::Zero(mu, mu);
        for (int k = 0; k < mu; ++k) {
            p(k, k) = k < 2 * h[0] ? -1 : 1;
        }
        return p;
    }
    return std::nullopt;
}

json cmd_domain_dims(int m, const std::vector<int> &h)
{
    json out{{"hermitian_case", std::string(hermitian_case_name(classify_hermitian(m, h)))}};
    const std::optional<IMatrix> psi = default_form(m, h);
    if (!psi) {
        out["dims"] = nullptr;
        return out;
    }
    const HodgeType type = HodgeType::checked(m, h, *psi);
    HodgeFiltration f;
    try {
        f = base_point(type);
    } catch (const Error &e) {
        if (e.code() != ErrorCode::UnsupportedType) {
            throw;
        }
        out["dims"] = nullptr;
        out["lie_algebra_dim"] = lie_algebra_dim(type);
        return out;
    }
    const DomainReport r = domain_dims(type, f);
    out["dims"] = {
        {"D", r.dim_D},
        {"compact_dual", r.dim_compact_dual},
        {"horizontal", r.dim_horizontal},
        {"lie", r.dim_lie},
        {"F0_lie", r.dim_F0_lie},
        {"lie_filtration", r.lie_dims},
    };
    out["psi"] = to_json(*psi);
    return out;
}

json partial_sums_json(const PartialSumsReport &r)
{
    json sums = json::array();
    for (std::size_t i = 0; i < r.heights.size(); ++i) {
        sums.push_back({{"height", r.heights[i]}, {"sum", to_json(r.partial_sums[i])}, {"terms", r.terms[i]}});
    }
    return {
        {"value", to_json(r.partial_sums.back())},
        {"converged", r.converged},
        {"partial_sums", sums},
        {"diagnostics", {{"tail_estimate", r.tail_estimate}, {"tolerance", r.tolerance}, {"shells", r.heights.size()}}},
    };
}

struct PoincareOptions {
    std::string functional;
    std::string model;
    int height = 0;
    int weight = 4;
    double conv_tol = 1e-4;
};

json cmd_poincare(const ComplexArgs &a, const PoincareOptions &o, const Settings &s)
{
    if (o.functional == "uhp") {
        const PartialSumsReport r =
            poincare_series_uhp([](Complex) { return Complex(1.0); }, o.weight, need(a, "tau"), o.height, o.conv_tol);
        return partial_sums_json(r);
    }
    const WeierstrassPoint t{a.count("t2") ? a.at("t2") : base_point_t.t2, a.count("t3") ? a.at("t3") : base_point_t.t3};
    const PeriodMatrix2 pm = period_matrix(t, s.tol);
    MatrixFunctional p;
    CosetModel model;
    int k = 0;
    if (o.functional == "det") {
        p = [](const Eigen::Matrix2cd &x) { return x.determinant(); };
        model = CosetModel::Whole;
    } else if (o.functional == "x11^-4" || o.functional == "x11^-6") {
        k = o.functional == "x11^-4" ? 4 : 6;
        p = [k](const Eigen::Matrix2cd &x) { return std::pow(x(0, 0), -k); };
        model = CosetModel::FirstRow;
    } else if (o.functional == "one") {
        p = [](const Eigen::Matrix2cd &) { return Complex(1.0); };
        model = CosetModel::FirstRow;
    } else {
        invalid("unknown functional '" + o.functional + "' (det, x11^-4, x11^-6, one, uhp)");
    }
    if (!o.model.empty()) {
        const std::map<std::string, CosetModel> models{
            {"whole", CosetModel::Whole}, {"first-row", CosetModel::FirstRow}, {"bottom-row", CosetModel::BottomRow}};
        const auto it = models.find(o.model);
        if (it == models.end()) {
            invalid("unknown coset model '" + o.model + "' (whole, first-row, bottom-row)");
        }
        model = it->second;
    }
    json out = partial_sums_json(period_poincare(p, pm.entries, model, o.height, o.conv_tol));
    out["diagnostics"]["coset_model"] = std::string(coset_model_name(model));
    if (k != 0) {
        const Lattice l = Lattice::checked(pm.entries(0, 0), pm.entries(1, 0));
        const Complex e = eisenstein_lattice(k, l, s.tol);
        out["diagnostics"]["eisenstein_lattice"] = to_json(e);
        out["diagnostics"]["ratio_to_eisenstein"] = to_json(complex_from_json(out["value"]) / e);
    }
    return out;
}

// ---- sweeps

struct SweepAxis {
    std::string key;
    Complex from, to;
    int count = 1;
};

SweepAxis parse_sweep(const std::string &spec, const std::vector<std::string> &keys)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
        invalid("sweep '" + spec + "' is not of the form key=from:to:count");
    }
    SweepAxis axis;
    axis.key = spec.substr(0, eq);
    if (std::find(keys.begin(), keys.end(), axis.key) == keys.end()) {
        invalid("cannot sweep '" + axis.key + "' for this command");
    }
    std::vector<std::string> parts;
    std::stringstream rest(spec.substr(eq + 1));
    for (std::string p; std::getline(rest, p, ':');) {
        parts.push_back(p);
    }
    if (parts.size() != 3) {
        invalid("sweep '" + spec + "' is not of the form key=from:to:count");
    }
    axis.from = parse_complex(parts[0]);
    axis.to = parse_complex(parts[1]);
    const double n = parse_real(parts[2], parts[2]);
    if (n < 1.0 || n != std::round(n) || n > 1e6) {
        invalid("sweep count must be a positive integer");
    }
    axis.count = static_cast<int>(n);
    return axis;
}

void flatten(const json &v, const std::string &prefix, std::vector<std::pair<std::string, std::string>> &out)
{
    if (v.is_object()) {
        for (const auto &[k, x] : v.items()) {
            flatten(x, prefix.empty() ? k : prefix + "." + k, out);
        }
    } else if (v.is_array() && v.size() == 2 && v[0].is_number_float() && v[1].is_number_float()) {
        out.emplace_back(prefix + ".re", v[0].dump());
        out.emplace_back(prefix + ".im", v[1].dump());
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            flatten(v[i], prefix + "." + std::to_string(i), out);
        }
    } else if (v.is_string()) {
        std::string s = v.get<std::string>();
        std::string q = "\"";
        for (char c : s) {
            q += c == '"' ? std::string("\"\"") : std::string(1, c);
        }
        out.emplace_back(prefix, q + "\"");
    } else {
        out.emplace_back(prefix, v.is_null() ? std::string() : v.dump());
    }
}

using Compute = std::function<json(const ComplexArgs &)>;

int run_sweep(const Compute &compute, ComplexArgs base, const std::vector<SweepAxis> &axes, unsigned threads,
              std::ostream &out)
{
    std::size_t total = 1;
    for (const SweepAxis &a : axes) {
        total *= static_cast<std::size_t>(a.count);
    }
    // grid points in row-major order, the last axis varying fastest
    std::vector<ComplexArgs> grid(total, base);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        for (std::size_t ax = axes.size(); ax-- > 0;) {
            const SweepAxis &a = axes[ax];
            const std::size_t idx = rem % static_cast<std::size_t>(a.count);
            rem /= static_cast<std::size_t>(a.count);
            const double u = a.count == 1 ? 0.0 : double(idx) / double(a.count - 1);
            grid[i][a.key] = a.from + u * (a.to - a.from);
        }
    }

    struct Row {
        int code = exit_ok;
        std::string status = "ok";
        json value;
    };
    std::vector<Row> rows(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                rows[i].value = compute(grid[i]);
            } catch (const Error &e) {
                rows[i].code = exit_code_of(e);
                rows[i].status = std::string(error_name(e.code()));
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::max(1u, std::min<unsigned>(threads, unsigned(total))); ++t) {
        pool.emplace_back(worker);
    }
    for (std::thread &t : pool) {
        t.join();
    }

    std::vector<std::string> columns;
    for (const Row &r : rows) {
        if (r.code == exit_ok) {
            std::vector<std::pair<std::string, std::string>> cells;
            flatten(r.value, "", cells);
            for (const auto &c : cells) {
                columns.push_back(c.first);
            }
            break;
        }
    }
    for (const SweepAxis &a : axes) {
        out << a.key << ".re," << a.key << ".im,";
    }
    out << "status";
    for (const std::string &c : columns) {
        out << ',' << c;
    }
    out << '\n';
    int code = exit_ok;
    for (std::size_t i = 0; i < total; ++i) {
        for (const SweepAxis &a : axes) {
            const Complex z = grid[i].at(a.key);
            out << json(z.real()).dump() << ',' << json(z.imag()).dump() << ',';
        }
        out << rows[i].status;
        std::map<std::string, std::string> cells;
        if (rows[i].code == exit_ok) {
            std::vector<std::pair<std::string, std::string>> flat;
            flatten(rows[i].value, "", flat);
            cells.insert(flat.begin(), flat.end());
        }
        for (const std::string &c : columns) {
            const auto it = cells.find(c);
            out << ',' << (it == cells.end() ? std::string() : it->second);
        }
        out << '\n';
        code = std::max(code, rows[i].code);
    }
    return code;
}

double tolerance_from_env()
{
    const char *env = std::getenv("PERIODLAB_TOL");
    if (env == nullptr) {
        return default_tol;
    }
    const double tol = parse_real(env, std::string("PERIODLAB_TOL=") + env);
    if (!(tol > 0.0)) {
        invalid("PERIODLAB_TOL must be positive");
    }
    return tol;
}

} // namespace

Complex parse_complex(const std::string &text)
{
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            s += c;
        }
    }
    if (!s.empty() && s.front() == '[') {
        try {
            return complex_from_json(json::parse(s));
        } catch (const json::exception &) {
            invalid("cannot read a complex number from '" + text + "'");
        }
    }
    if (s.empty()) {
        invalid("empty complex number");
    }
    if (s.back() != 'i' && s.back() != 'j') {
        return {parse_real(s, text), 0.0};
    }
    s.pop_back();
    // split at the last sign that does not belong to an exponent
    std::size_t split = 0;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    const std::string re = s.substr(0, split), im = s.substr(split);
    const double imag = im.empty() || im == "+" ? 1.0 : im == "-" ? -1.0 : parse_real(im, text);
    return {re.empty() ? 0.0 : parse_real(re, text), imag};
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Periods, modular forms and Hodge structures of elliptic families", "periodlab"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string tol_text, output_path;
    std::vector<std::string> sweeps;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    Settings settings;
    app.add_option("--tol", tol_text, "absolute tolerance (overrides PERIODLAB_TOL)");
    app.add_flag("--normalize", settings.normalize, "divide emitted periods by sqrt(2 pi i)");
    app.add_option("--output,-o", output_path, "write the artifact to a file");
    app.add_option("--sweep", sweeps, "key=from:to:count, repeatable; emits CSV over the grid")->take_all();
    app.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);

    // complex-valued options of every command, kept as text until the run
    std::map<std::string, std::map<std::string, std::string>> text;
    std::map<std::string, std::vector<std::string>> sweepable;
    auto complex_option = [&](CLI::App *sub, const std::string &key, const std::string &help) {
        sub->add_option("--" + key, text[sub->get_name()][key], help);
        sweepable[sub->get_name()].push_back(key);
    };

    CLI::App *periods = app.add_subcommand("periods", "period matrix of y^2 = 4x^3 - t2 x - t3");
    complex_option(periods, "t2", "complex t2");
    complex_option(periods, "t3", "complex t3");

    CLI::App *tau = app.add_subcommand("tau", "period ratio tau = P00 / P10");
    complex_option(tau, "t2", "complex t2");
    complex_option(tau, "t3", "complex t3");

    std::string path_file;
    CLI::App *transport_cmd = app.add_subcommand("pf-transport", "transport periods along a path by the connection");
    transport_cmd->add_option("--path-file", path_file, "JSON waypoints [[t2, t3], ...] or {\"loop\": ...}")
        ->required();

    double radius = 0.0;
    int turns = 1;
    CLI::App *mono = app.add_subcommand("monodromy", "monodromy around a circle in the t3-plane");
    complex_option(mono, "center", "center of the circle");
    complex_option(mono, "t2", "fixed t2 (default 4)");
    mono->add_option("--radius", radius, "circle radius")->required();
    mono->add_option("--turns", turns, "number of turns");

    int k = 4;
    CLI::App *eis = app.add_subcommand("eisenstein", "lattice sum of a^-k");
    eis->add_option("--k", k, "even weight >= 4")->required();
    complex_option(eis, "tau", "lattice Z tau + Z");
    complex_option(eis, "omega1", "first basis vector");
    complex_option(eis, "omega2", "second basis vector");

    CLI::App *jcmd = app.add_subcommand("j", "j-invariant (both normalizations)");
    complex_option(jcmd, "tau", "point of the upper half plane");

    int terms = 10;
    CLI::App *jq = app.add_subcommand("j-qexp", "coefficients of 1728 j from q^-1 on");
    jq->add_option("--terms", terms, "number of coefficients")->check(CLI::Range(1, 200));

    std::string point_file;
    CLI::App *hodge = app.add_subcommand("hodge-check", "Riemann relations of a filtration");
    hodge->add_option("--point-file", point_file, "JSON point description")->required();

    int weight = 1;
    std::vector<int> hodge_numbers;
    CLI::App *dims = app.add_subcommand("domain-dims", "dimensions of the period domain");
    dims->add_option("--weight", weight, "weight m")->required();
    dims->add_option("--hodge-numbers", hodge_numbers, "h^{m,0},...,h^{0,m}")->required()->delimiter(',');

    int ks_n = 0, ks_d = 0;
    CLI::App *ks = app.add_subcommand("ks-count", "moduli count of degree-d hypersurfaces in P^(n+1)");
    ks->add_option("--n", ks_n, "dimension")->required();
    ks->add_option("--d", ks_d, "degree")->required();

    PoincareOptions popt;
    CLI::App *poinc = app.add_subcommand("poincare", "truncated Poincare series");
    poinc->add_option("--functional", popt.functional, "det, x11^-4, x11^-6, one or uhp")->required();
    poinc->add_option("--height", popt.height, "truncation height")->required();
    poinc->add_option("--model", popt.model, "coset model: whole, first-row or bottom-row");
    poinc->add_option("--weight", popt.weight, "weight n for the uhp series");
    poinc->add_option("--conv-tol", popt.conv_tol, "tolerance on the tail estimate");
    complex_option(poinc, "t2", "period matrix parameter (default 4)");
    complex_option(poinc, "t3", "period matrix parameter (default 0)");
    complex_option(poinc, "tau", "point for the uhp series");

    CLI::App *kh = app.add_subcommand("cubic-family", "periods of y^2 = 4 t0 (x - t1)^3 - t2 (x - t1) - t3");
    for (const char *key : {"t0", "t1", "t2", "t3"}) {
        complex_option(kh, key, "complex parameter");
    }

    std::vector<std::string> argv_store{"periodlab"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char *> argv;
    for (const std::string &a : argv_store) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    CLI::App *sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        settings.tol = tol_text.empty() ? tolerance_from_env() : parse_real(tol_text, tol_text);
        if (!(settings.tol > 0.0)) {
            invalid("--tol must be positive");
        }
        ComplexArgs cargs;
        for (const auto &[key, value] : text[name]) {
            if (sub->count("--" + key) > 0) {
                cargs[key] = parse_complex(value);
            }
        }

        json inputs = json::object();
        Compute compute;
        if (sub == periods) {
            compute = [&](const ComplexArgs &a) { return cmd_periods(a, settings); };
        } else if (sub == tau) {
            compute = [&](const ComplexArgs &a) { return cmd_tau(a, settings); };
        } else if (sub == jcmd) {
            compute = [&](const ComplexArgs &a) { return cmd_j(a, settings); };
        } else if (sub == eis) {
            inputs["k"] = k;
            compute = [&](const ComplexArgs &a) { return cmd_eisenstein(a, k, settings); };
        } else if (sub == kh) {
            compute = [&](const ComplexArgs &a) { return cmd_cubic_family(a, settings); };
        } else if (sub == mono) {
            if (cargs.count("t2") == 0) {
                cargs["t2"] = base_point_t.t2;
            }
            inputs["radius"] = radius;
            inputs["turns"] = turns;
            compute = [&](const ComplexArgs &a) { return cmd_monodromy(a, radius, turns, settings); };
        } else if (sub == poinc) {
            inputs["functional"] = popt.functional;
            inputs["height"] = popt.height;
            if (!popt.model.empty()) {
                inputs["model"] = popt.model;
            }
            if (popt.functional == "uhp") {
                inputs["weight"] = popt.weight;
            }
            compute = [&](const ComplexArgs &a) { return cmd_poincare(a, popt, settings); };
        }

        if (!sweeps.empty() && !compute) {
            invalid("--sweep is not available for " + name);
        }

        std::ofstream file;
        if (!output_path.empty()) {
            file.open(output_path);
            if (!file) {
                invalid("cannot write " + output_path);
            }
        }
        std::ostream &sink = output_path.empty() ? out : file;

        if (!sweeps.empty()) {
            std::vector<SweepAxis> axes;
            for (const std::string &s : sweeps) {
                axes.push_back(parse_sweep(s, sweepable[name]));
                for (std::size_t i = 0; i + 1 < axes.size(); ++i) {
                    if (axes[i].key == axes.back().key) {
                        invalid("'" + axes.back().key + "' is swept twice");
                    }
                }
            }
            return run_sweep(compute, cargs, axes, threads, sink);
        }

        json values;
        if (compute) {
            values = compute(cargs);
        } else if (sub == transport_cmd) {
            inputs["path_file"] = path_file;
            values = cmd_pf_transport(path_file, settings);
        } else if (sub == hodge) {
            inputs["point_file"] = point_file;
            values = cmd_hodge_check(point_file, inputs, settings);
        } else if (sub == dims) {
            inputs["weight"] = weight;
            inputs["hodge_numbers"] = hodge_numbers;
            values = cmd_domain_dims(weight, hodge_numbers);
        } else if (sub == ks) {
            inputs["n"] = ks_n;
            inputs["d"] = ks_d;
            values = {{"m", kodaira_spencer_count(ks_n, ks_d)}};
        } else if (sub == jq) {
            inputs["terms"] = terms;
            const QSeries j = j_q_expansion(terms);
            json coeffs = json::array();
            for (int n = j.valuation(); n < j.valuation() + terms; ++n) {
                coeffs.push_back(j.coefficient(n).real());
            }
            values = {{"valuation", j.valuation()}, {"coefficients", coeffs}};
        }

        json doc{{"command", name}};
        for (const auto &[key, z] : cargs) {
            inputs[key] = to_json(z);
        }
        doc["inputs"] = inputs;
        doc["tolerance"] = settings.tol;
        if (settings.normalize) {
            doc["normalized"] = true;
        }
        for (const auto &[key, v] : values.items()) {
            doc[key] = v;
        }
        sink << doc.dump(2) << '\n';
        return exit_ok;
    } catch (const Error &e) {
        const int code = exit_code_of(e);
        err << json{{"error", std::string(error_name(e.code()))}, {"message", e.what()}, {"exit_code", code}}.dump()
            << '\n';
        return code;
    } catch (const json::exception &e) {
        err << json{{"error", "InvalidArgument"}, {"message", e.what()}, {"exit_code", exit_validation}}.dump() << '\n';
        return exit_validation;
    }
}

} // namespace periodlab::cli
