#include "natspline/natspline.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kInput = 2, kNoSolution = 3, kNumerical = 4 };

struct CliError {
    int exit_code;
    std::string message;
};

int exit_for(int status) {
    switch (status) {
        case NS_SINGULAR_SYSTEM:
        case NS_SINGULAR_CORNER:
        case NS_EMPTY_NULLSPACE:
        case NS_BRACKET_TOO_NARROW:
        case NS_SINGULAR_GLS:
        case NS_OVERLAPPING_NULLSPACES:
        case NS_INTERNAL: return kNumerical;
        default: return kInput;
    }
}

void check(int status) {
    if (status != NS_OK)
        throw CliError{exit_for(status), ns_last_error()};
}

std::string fmt(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct GridDeleter {
    void operator()(ns_grid* g) const { ns_grid_free(g); }
};
struct PenaltyDeleter {
    void operator()(ns_penalty* p) const { ns_penalty_free(p); }
};
struct FitDeleter {
    void operator()(ns_fit* f) const { ns_fit_free(f); }
};
struct BlupDeleter {
    void operator()(ns_blup* b) const { ns_blup_free(b); }
};
using GridPtr = std::unique_ptr<ns_grid, GridDeleter>;
using PenaltyPtr = std::unique_ptr<ns_penalty, PenaltyDeleter>;
using FitPtr = std::unique_ptr<ns_fit, FitDeleter>;
using BlupPtr = std::unique_ptr<ns_blup, BlupDeleter>;

GridPtr make_grid(const std::vector<double>& t) {
    ns_grid* g = nullptr;
    check(ns_grid_create(t.data(), t.size(), &g));
    return GridPtr(g);
}

GridPtr make_uniform(int n) {
    ns_grid* g = nullptr;
    check(ns_grid_uniform(n, &g));
    return GridPtr(g);
}

// ---- input

struct Dataset {
    std::vector<double> t;
    std::vector<double> y;
};

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& field, const std::string& path, int line) {
    const std::string s = trim(field);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
        throw CliError{kInput, path + ":" + std::to_string(line) + ": not a finite number: '" +
                                   s + "'"};
    return v;
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError{kInput, path + ": cannot open input"};
    std::string line;
    if (!std::getline(in, line)) throw CliError{kInput, path + ":1: empty file"};
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    std::string header = trim(line);
    header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
    if (header != "t,y") throw CliError{kInput, path + ":1: expected header 't,y'"};

    std::vector<std::pair<double, double>> rows;
    int number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw CliError{kInput, path + ":" + std::to_string(number) + ": expected two columns"};
        rows.emplace_back(parse_number(line.substr(0, comma), path, number),
                          parse_number(line.substr(comma + 1), path, number));
    }
    if (!std::is_sorted(rows.begin(), rows.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; })) {
        std::cerr << "warning: rows of " << path << " are not sorted by t; sorting\n";
        std::stable_sort(rows.begin(), rows.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    Dataset d;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].first == rows[i - 1].first)
            throw CliError{kInput, path + ": duplicate t value " + fmt(rows[i].first)};
        d.t.push_back(rows[i].first);
        d.y.push_back(rows[i].second);
    }
    if (d.t.size() < 3) throw CliError{kInput, path + ": need at least 3 data rows"};
    return d;
}

fs::path output_dir(const std::string& flag) {
    const char* env = std::getenv("NATSPLINE_OUT");
    fs::path dir = env != nullptr && *env != '\0' ? fs::path(env) : fs::path(flag);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw CliError{kInput, "cannot create output directory " + dir.string()};
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError{kInput, "cannot write " + path.string()};
    return out;
}

std::vector<double> parse_coefficients(const std::string& text) {
    std::vector<double> a;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) a.push_back(parse_number(item, "--a", 0));
    if (a.size() != 3) throw CliError{kInput, "--a expects three values a0,a1,a2"};
    return a;
}

std::pair<double, double> parse_bracket(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw CliError{kInput, "--bracket expects lo,hi (log10 lambda)"};
    return {parse_number(text.substr(0, comma), "--bracket", 0),
            parse_number(text.substr(comma + 1), "--bracket", 0)};
}

std::vector<double> linspace(double a, double b, int count) {
    std::vector<double> x(count);
    for (int k = 0; k < count; ++k)
        x[k] = k == count - 1 ? b : a + (b - a) * k / (count - 1);
    return x;
}

// ---- selection shared by fit and select

struct RunConfig {
    std::string input_path;
    std::string output_dir = ".";
    std::optional<double> lambda;
    std::string selector = "fixed";
    std::optional<double> sigma2;
    std::optional<double> w_norm2;
    double epsilon = 0.2;
    std::string bracket = "-10,10";
    std::string penalty = "curvature";
    std::string coefficients = "1,1,1";
    int eval_points = 200;
};

json selection_json(const ns_selection& s) {
    json j;
    j["found"] = s.found != 0;
    j["lambda"] = s.found ? num(s.lambda) : json(nullptr);
    j["criterion"] = num(s.criterion);
    j["bracket_log10"] = {num(s.log10_lo), num(s.log10_hi)};
    return j;
}

struct Selected {
    std::optional<double> lambda;
    json diagnostics;
    std::string failure;
};

Selected run_selector(const ns_grid* grid, const Dataset& d, const RunConfig& cfg) {
    Selected out;
    ns_selection_config sc;
    ns_selection_config_default(&sc);
    sc.sigma2 = cfg.sigma2.value_or(0.0);
    sc.epsilon = cfg.epsilon;
    std::tie(sc.log10_lo, sc.log10_hi) = parse_bracket(cfg.bracket);

    double sup = 0.0;
    check(ns_detrended_norm2(grid, d.y.data(), &sup));
    out.diagnostics["detrended_norm2"] = num(sup);
    out.diagnostics["sigma2"] = num(sc.sigma2);

    const double m = static_cast<double>(d.y.size());
    if (cfg.selector == "noise_match") {
        const double w2 = cfg.w_norm2.value_or(m * sc.sigma2);
        ns_selection s{};
        check(ns_select_noise_match(grid, d.y.data(), w2, &sc, &s));
        out.diagnostics["w_norm2"] = num(w2);
        out.diagnostics["noise_match"] = selection_json(s);
        if (s.found)
            out.lambda = s.lambda;
        else
            out.failure = "no lambda solves |y - H(lambda) y|^2 = |w|^2: the condition "
                          "|y - Lreg y|^2 > |w|^2 fails (" + fmt(sup) + " <= " + fmt(w2) + ")";
    } else if (cfg.selector == "band") {
        ns_selection lower{}, upper{};
        check(ns_select_band(grid, d.y.data(), &sc, &lower, &upper));
        out.diagnostics["epsilon"] = num(sc.epsilon);
        out.diagnostics["band_lower"] = selection_json(lower);
        out.diagnostics["band_upper"] = selection_json(upper);
        if (lower.found && upper.found) {
            out.lambda = lower.lambda == 0.0 || upper.lambda == 0.0
                             ? 0.0
                             : std::sqrt(lower.lambda * upper.lambda);
        } else if (lower.found) {
            out.lambda = lower.lambda;
        } else {
            out.failure = "no lambda in the band: the condition |y - Lreg y|^2 > (n+1)(1 - "
                          "epsilon) sigma2 fails (" + fmt(sup) + " <= " +
                          fmt(m * (1.0 - sc.epsilon) * sc.sigma2) + ")";
        }
    } else if (cfg.selector == "sure") {
        ns_selection s{};
        check(ns_select_sure(grid, d.y.data(), &sc, &s));
        out.diagnostics["sure"] = selection_json(s);
        out.lambda = s.lambda;
    } else {
        out.lambda = cfg.lambda;
    }
    return out;
}

void validate(const RunConfig& cfg) {
    if (cfg.selector == "fixed") {
        if (!cfg.lambda) throw CliError{kInput, "--selector fixed needs --lambda"};
        return;
    }
    if (cfg.lambda)
        throw CliError{kInput, "--lambda and --selector " + cfg.selector + " are exclusive"};
    if (!cfg.sigma2 && !(cfg.selector == "noise_match" && cfg.w_norm2))
        throw CliError{kInput, "--selector " + cfg.selector + " needs --sigma2"};
    if (cfg.penalty != "curvature")
        throw CliError{kInput, "selectors are defined for the curvature penalty only"};
}

PenaltyPtr make_penalty(const ns_grid* grid, const RunConfig& cfg) {
    if (cfg.penalty == "curvature") return nullptr;
    const auto a = parse_coefficients(cfg.coefficients);
    ns_penalty* p = nullptr;
    check(ns_penalty_combined(grid, a[0], a[1], a[2], &p));
    return PenaltyPtr(p);
}

json penalty_json(const RunConfig& cfg) {
    if (cfg.penalty == "curvature") return "curvature";
    const auto a = parse_coefficients(cfg.coefficients);
    return json{{"combined", {a[0], a[1], a[2]}}};
}

// ---- subcommands

int cmd_fit(const RunConfig& cfg) {
    validate(cfg);
    if (cfg.eval_points < 2) throw CliError{kInput, "--eval-points must be at least 2"};
    const Dataset d = read_dataset(cfg.input_path);
    const GridPtr grid = make_grid(d.t);
    const PenaltyPtr penalty = make_penalty(grid.get(), cfg);
    const Selected sel = run_selector(grid.get(), d, cfg);
    if (!sel.lambda) {
        std::cerr << "error: " << sel.failure << "\n";
        return kNoSolution;
    }

    ns_fit* raw = nullptr;
    check(ns_fit_create(grid.get(), penalty.get(), d.y.data(), *sel.lambda, &raw));
    const FitPtr fit(raw);
    std::vector<double> coords(d.y.size() + 2);
    check(ns_fit_coords(fit.get(), coords.data(), coords.size()));

    const fs::path dir = output_dir(cfg.output_dir);
    {
        auto out = open_output(dir / "fit.csv");
        out << "t,y,p_hat,residual\n";
        for (std::size_t i = 0; i < d.t.size(); ++i) {
            const double p = coords[i + 1];
            out << fmt(d.t[i]) << ',' << fmt(d.y[i]) << ',' << fmt(p) << ',' << fmt(d.y[i] - p)
                << '\n';
        }
    }
    {
        auto out = open_output(dir / "spline.csv");
        out << "t,s,s1,s2,s3\n";
        for (double t : linspace(d.t.front(), d.t.back(), cfg.eval_points)) {
            out << fmt(t);
            for (int order = 0; order <= 3; ++order) {
                double v = 0.0;
                check(ns_fit_eval(fit.get(), t, order, &v));
                out << ',' << fmt(v);
            }
            out << '\n';
        }
    }

    json summary;
    summary["n"] = static_cast<int>(d.t.size()) - 1;
    summary["penalty"] = penalty_json(cfg);
    summary["selector"] = cfg.selector;
    summary["lambda"] = num(ns_fit_lambda(fit.get()));
    summary["rss"] = num(ns_fit_rss(fit.get()));
    summary["trace_h"] = num(ns_fit_trace(fit.get()));
    summary["u_first"] = num(coords.front());
    summary["u_last"] = num(coords.back());
    json diagnostics = sel.diagnostics;
    double sigma2_hat = 0.0;
    check(ns_estimate_sigma2(grid.get(), d.y.data(), &sigma2_hat));
    diagnostics["sigma2_estimate"] = num(sigma2_hat);
    summary["diagnostics"] = diagnostics;
    auto out = open_output(dir / "summary.json");
    out << summary.dump(2) << '\n';
    return kOk;
}

int cmd_select(const RunConfig& cfg) {
    if (cfg.selector == "fixed") throw CliError{kInput, "select needs a selector other than fixed"};
    validate(cfg);
    const Dataset d = read_dataset(cfg.input_path);
    const GridPtr grid = make_grid(d.t);
    const Selected sel = run_selector(grid.get(), d, cfg);
    json j;
    j["selector"] = cfg.selector;
    j["lambda"] = sel.lambda ? num(*sel.lambda) : json(nullptr);
    j["diagnostics"] = sel.diagnostics;
    std::cout << j.dump(2) << '\n';
    if (!sel.lambda) {
        std::cerr << "error: " << sel.failure << "\n";
        return kNoSolution;
    }
    return kOk;
}

int cmd_blup(const RunConfig& cfg, double sigma_w2, double sigma_s2) {
    const Dataset d = read_dataset(cfg.input_path);
    const GridPtr grid = make_grid(d.t);
    PenaltyPtr penalty = make_penalty(grid.get(), cfg);
    if (!penalty) {
        ns_penalty* p = nullptr;
        check(ns_penalty_curvature(grid.get(), &p));
        penalty.reset(p);
    }
    ns_blup* raw = nullptr;
    check(ns_blup_create(grid.get(), penalty.get(), d.y.data(), sigma_w2, sigma_s2, &raw));
    const BlupPtr blup(raw);

    auto read = [&](auto getter, size_t size, int route) {
        std::vector<double> v(size);
        if (size > 0) check(getter(blup.get(), route, v.data(), v.size()));
        return v;
    };
    const size_t d0 = ns_blup_fixed_dim(blup.get());
    const size_t d1 = ns_blup_random_dim(blup.get());
    std::vector<double> coords(d.y.size() + 2);
    check(ns_blup_coords(blup.get(), coords.data(), coords.size()));

    json j;
    j["penalty"] = penalty_json(cfg);
    j["sigma_w2"] = num(sigma_w2);
    j["sigma_s2"] = num(sigma_s2);
    j["lambda"] = num(sigma_w2 / sigma_s2);
    j["nullspace_dim"] = d0;
    const auto beta = read(ns_blup_beta, d0, 0);
    const auto eta = read(ns_blup_eta, d1, 0);
    j["beta"] = beta;
    j["eta"] = eta;
    j["coords"] = coords;
    if (ns_blup_has_closed_form(blup.get())) {
        const auto beta_cf = read(ns_blup_beta, d0, 1);
        const auto eta_cf = read(ns_blup_eta, d1, 1);
        double gap = 0.0;
        for (size_t k = 0; k < d0; ++k) gap = std::max(gap, std::abs(beta[k] - beta_cf[k]));
        for (size_t k = 0; k < d1; ++k) gap = std::max(gap, std::abs(eta[k] - eta_cf[k]));
        j["closed_form"] = {{"beta", beta_cf}, {"eta", eta_cf}, {"max_abs_difference", gap}};
    } else {
        j["closed_form"] = nullptr;
    }
    std::cout << j.dump(2) << '\n';
    return kOk;
}

int cmd_matrices(int n, const std::string& which, const std::string& coefficients) {
    const GridPtr grid = make_uniform(n);
    ns_matrix_kind kind = NS_MATRIX_C;
    if (which == "C") kind = NS_MATRIX_C;
    else if (which == "Ppen") kind = NS_MATRIX_PPEN;
    else if (which == "U") kind = NS_MATRIX_U;
    else if (which == "Q") kind = NS_MATRIX_Q;
    else if (which == "V") kind = NS_MATRIX_V;
    else throw CliError{kInput, "unknown matrix '" + which + "' (C, Ppen, U, Q, V)"};

    const auto a = parse_coefficients(coefficients);
    size_t rows = 0, cols = 0;
    check(ns_matrix(grid.get(), kind, a.data(), nullptr, 0, &rows, &cols));
    std::vector<double> m(rows * cols);
    check(ns_matrix(grid.get(), kind, a.data(), m.data(), m.size(), &rows, &cols));
    std::string text;
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) {
            if (c > 0) text += ',';
            text += fmt(m[r * cols + c]);
        }
        text += '\n';
    }
    std::cout << text;
    return kOk;
}

void write_long(const fs::path& path, const std::vector<std::string>& series,
                const std::vector<double>& x, const std::vector<double>& value) {
    auto out = open_output(path);
    out << "series,x,value\n";
    for (std::size_t k = 0; k < x.size(); ++k)
        out << series[k] << ',' << fmt(x[k]) << ',' << fmt(value[k]) << '\n';
}

struct LongTable {
    std::vector<std::string> series;
    std::vector<double> x;
    std::vector<double> value;

    void add(const std::string& s, double xv, double v) {
        series.push_back(s);
        x.push_back(xv);
        value.push_back(v);
    }
};

int cmd_figures(int n, const std::string& out_flag) {
    constexpr int kSamples = 200;
    const GridPtr grid = make_uniform(n);
    const fs::path dir = output_dir(out_flag);
    const int m = n + 1;
    std::vector<double> knots(m);
    check(ns_grid_knots(grid.get(), knots.data(), knots.size()));

    // basis curves: the sample grid plus the knots themselves
    std::vector<double> ts = linspace(knots.front(), knots.back(), kSamples);
    ts.insert(ts.end(), knots.begin(), knots.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    for (int order = 0; order <= 2; ++order) {
        LongTable table;
        for (int j = 0; j < n + 3; ++j)
            for (double t : ts) {
                double v = 0.0;
                check(ns_eval_basis(grid.get(), j, t, order, &v));
                table.add("phi" + std::to_string(j), t, v);
            }
        write_long(dir / ("fig" + std::to_string(order + 1) + ".csv"), table.series, table.x,
                   table.value);
    }

    // lambda axis: 0 followed by log-spaced 1e-6 .. 1e10
    std::vector<double> lambdas{0.0};
    for (double e : linspace(-6.0, 10.0, kSamples - 1)) lambdas.push_back(std::pow(10.0, e));

    {
        LongTable table;
        for (int i = 0; i < m; ++i)
            for (double lambda : lambdas) {
                double v = 0.0;
                check(ns_nsr_column(grid.get(), i, lambda, &v));
                table.add("e" + std::to_string(i), lambda, v);
            }
        write_long(dir / "fig4.csv", table.series, table.x, table.value);
    }
    {
        LongTable table;
        const auto tt = linspace(knots.front(), knots.back(), kSamples);
        for (int i = 0; i < m; ++i) {
            double a = 0.0, b = 0.0;
            check(ns_trend_line(grid.get(), i, &a, &b));
            for (double t : tt) table.add("e" + std::to_string(i), t, a + b * t);
        }
        write_long(dir / "fig9.csv", table.series, table.x, table.value);
    }
    {
        LongTable table;
        std::vector<double> h(static_cast<size_t>(m) * m);
        for (double lambda : {0.1, 0.5, 1.0}) {
            check(ns_hat(grid.get(), lambda, h.data(), h.size()));
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    table.add("i" + std::to_string(i) + "_lambda" + fmt(lambda), j,
                              h[static_cast<size_t>(i) * m + j]);
        }
        write_long(dir / "fig10.csv", table.series, table.x, table.value);
    }
    {
        LongTable table;
        for (double lambda : lambdas) {
            double v = 0.0;
            check(ns_hat_trace(grid.get(), lambda, &v));
            table.add("trace", lambda, v);
        }
        write_long(dir / "fig11.csv", table.series, table.x, table.value);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"natspline: penalized cubic splines in the natural basis"};
    app.require_subcommand(1);

    RunConfig cfg;
    double lambda_flag = 0.0;
    double sigma2_flag = 0.0;
    double w_norm2_flag = 0.0;

    auto add_data_flags = [&](CLI::App* sub) {
        sub->add_option("--input,-i", cfg.input_path, "CSV with header t,y")->required();
        sub->add_option("--sigma2", sigma2_flag, "noise variance");
        sub->add_option("--epsilon", cfg.epsilon, "band half-width (default 0.2)");
        sub->add_option("--bracket", cfg.bracket, "log10 lambda search interval lo,hi")
            ->default_str("-10,10");
    };

    auto* fit = app.add_subcommand("fit", "fit a penalized spline to t,y data");
    add_data_flags(fit);
    fit->add_option("--output-dir,-o", cfg.output_dir, "output directory (NATSPLINE_OUT wins)");
    fit->add_option("--lambda", lambda_flag, "fixed smoothing parameter");
    fit->add_option("--selector", cfg.selector, "fixed, noise_match, band or sure")
        ->check(CLI::IsMember({"fixed", "noise_match", "band", "sure"}));
    fit->add_option("--w-norm2", w_norm2_flag, "noise_match target (default (n+1) sigma2)");
    fit->add_option("--penalty", cfg.penalty, "curvature or combined")
        ->check(CLI::IsMember({"curvature", "combined"}));
    fit->add_option("--a", cfg.coefficients, "combined penalty coefficients a0,a1,a2");
    fit->add_option("--eval-points", cfg.eval_points, "dense evaluation points (default 200)");

    auto* select = app.add_subcommand("select", "choose lambda and print JSON");
    add_data_flags(select);
    select->add_option("--selector", cfg.selector, "noise_match, band or sure")
        ->required()
        ->check(CLI::IsMember({"noise_match", "band", "sure"}));
    select->add_option("--w-norm2", w_norm2_flag, "noise_match target (default (n+1) sigma2)");

    int n = 7;
    std::string out_flag = ".";
    auto* figures = app.add_subcommand("figures", "write figure data as CSV");
    figures->add_option("--n", n, "number of intervals (default 7)");
    figures->add_option("--out-dir,-o", out_flag, "output directory (NATSPLINE_OUT wins)");

    std::string which;
    auto* matrices = app.add_subcommand("matrices", "print a matrix as CSV");
    matrices->add_option("--n", n, "number of intervals (default 7)");
    matrices->add_option("--which", which, "C, Ppen, U, Q or V")->required();
    matrices->add_option("--a", cfg.coefficients, "P_pen coefficients a0,a1,a2 (default 1,1,1)");

    double sigma_w2 = 1.0;
    double sigma_s2 = 1.0;
    auto* blup = app.add_subcommand("blup", "BLUE/BLUP decomposition of a penalized fit");
    blup->add_option("--input,-i", cfg.input_path, "CSV with header t,y")->required();
    blup->add_option("--sigma-w2", sigma_w2, "noise variance");
    blup->add_option("--sigma-s2", sigma_s2, "random-effect variance");
    blup->add_option("--penalty", cfg.penalty, "curvature or combined")
        ->check(CLI::IsMember({"curvature", "combined"}));
    blup->add_option("--a", cfg.coefficients, "combined penalty coefficients a0,a1,a2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInput;
    }

    auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
    try {
        if (*fit) {
            if (given(fit, "--lambda")) cfg.lambda = lambda_flag;
            if (given(fit, "--sigma2")) cfg.sigma2 = sigma2_flag;
            if (given(fit, "--w-norm2")) cfg.w_norm2 = w_norm2_flag;
            if (given(fit, "--lambda") && !given(fit, "--selector")) cfg.selector = "fixed";
            return cmd_fit(cfg);
        }
        if (*select) {
            if (given(select, "--sigma2")) cfg.sigma2 = sigma2_flag;
            if (given(select, "--w-norm2")) cfg.w_norm2 = w_norm2_flag;
            return cmd_select(cfg);
        }
        if (*figures) return cmd_figures(n, out_flag);
        if (*matrices) return cmd_matrices(n, which, cfg.coefficients);
        if (*blup) return cmd_blup(cfg, sigma_w2, sigma_s2);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.exit_code;
    }
    return kInput;
}
