#include "driftnoise/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "driftnoise/brownian.hpp"
#include "driftnoise/density.hpp"
#include "driftnoise/errors.hpp"
#include "driftnoise/extensions.hpp"
#include "driftnoise/noise.hpp"
#include "driftnoise/signs.hpp"
#include "driftnoise/stats.hpp"

namespace driftnoise::cli {

const std::vector<std::string> kExperiments = {"density-check", "goodness-scan",  "correlation",  "drift-obstruction",
                                               "compose-check", "drift-diagram", "cocycle-demo", "girsanov-check"};

void ExperimentConfig::validate() const {
    if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
        throw ConfigError("unknown experiment '" + experiment + "'");
    if (replicas < 1) throw ConfigError("replicas must be >= 1");
    if (depth < 1 || depth > 16) throw ConfigError("depth must be in [1,16]");
    if (n_lo < 1 || n_hi < n_lo) throw ConfigError("n_range must satisfy 1 <= lo <= hi");
    if (workers < 1 || workers > 64) throw ConfigError("workers must be in [1,64]");
    const bool brownian_exp = experiment == "drift-obstruction" || experiment == "drift-diagram";
    if (brownian_exp && depth < n_hi + 2) throw ConfigError("depth must be >= max(n_range)+2 for Brownian experiments");
    if (c_list.empty()) throw ConfigError("c_list must not be empty");
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += fmt(vs[i]);
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::vector<std::string> unknown;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    auto fail_type = [&](const std::string& key) {
        throw ConfigError("config line " + std::to_string(line_no) + ": bad value for key '" + key + "'");
    };
    while (std::getline(stream, line)) {
        ++line_no;
        std::string body = line.substr(0, line.find('#'));
        body = trim(body);
        if (body.empty()) continue;
        std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        try {
            if (key == "experiment") {
                config.experiment = value;
            } else if (key == "seed") {
                config.seed = std::stoull(value);
            } else if (key == "replicas") {
                config.replicas = std::stoll(value);
            } else if (key == "depth") {
                config.depth = std::stoi(value);
            } else if (key == "n_range") {
                std::size_t dots = value.find("..");
                if (dots == std::string::npos) fail_type(key);
                config.n_lo = std::stoi(trim(value.substr(0, dots)));
                config.n_hi = std::stoi(trim(value.substr(dots + 2)));
            } else if (key == "c_list") {
                config.c_list.clear();
                std::istringstream vs(value);
                std::string item;
                while (std::getline(vs, item, ',')) {
                    item = trim(item);
                    if (item.empty()) fail_type(key);
                    std::size_t used = 0;
                    config.c_list.push_back(std::stod(item, &used));
                    if (used != item.size()) fail_type(key);
                }
                if (config.c_list.empty()) fail_type(key);
            } else if (key == "lambda") {
                std::size_t used = 0;
                config.lambda = std::stod(value, &used);
                if (used != value.size()) fail_type(key);
            } else if (key == "output_dir") {
                config.output_dir = value;
            } else if (key == "workers") {
                config.workers = std::stoi(value);
            } else {
                unknown.push_back(key);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail_type(key);
        }
    }
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += " '" + k + "'";
        throw ConfigError(msg);
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

std::string config_echo(const ExperimentConfig& config) {
    std::ostringstream out;
    out << "experiment = " << config.experiment << "\n";
    out << "seed = " << config.seed << "\n";
    out << "replicas = " << config.replicas << "\n";
    out << "depth = " << config.depth << "\n";
    out << "n_range = " << config.n_lo << ".." << config.n_hi << "\n";
    out << "c_list = " << fmt_list(config.c_list) << "\n";
    out << "lambda = " << fmt(config.lambda) << "\n";
    out << "output_dir = " << config.output_dir << "\n";
    out << "workers = " << config.workers << "\n";
    return out.str();
}

namespace {

struct Series {
    std::string label;
    std::vector<double> xs, ys;
};

struct CsvSink {
    std::vector<std::string> rows;
    std::string svg_title;
    std::vector<Series> svg_series;

    void line(const std::string& s) { rows.push_back(s); }
};

// Minimal self-contained polyline chart; derived artifact, never golden-compared.
void write_svg_chart(const std::string& path, const std::string& title, const std::vector<Series>& series) {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    bool first = true;
    for (const Series& s : series) {
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
            if (first) {
                x_lo = x_hi = s.xs[i];
                y_lo = y_hi = s.ys[i];
                first = false;
            }
            x_lo = std::min(x_lo, s.xs[i]);
            x_hi = std::max(x_hi, s.xs[i]);
            y_lo = std::min(y_lo, s.ys[i]);
            y_hi = std::max(y_hi, s.ys[i]);
        }
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    const double w = 640.0, h = 400.0, margin = 50.0;
    auto sx = [&](double x) { return margin + (x - x_lo) / (x_hi - x_lo) * (w - 2.0 * margin); };
    auto sy = [&](double y) { return h - margin - (y - y_lo) / (y_hi - y_lo) * (h - 2.0 * margin); };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ofstream out(path, std::ios::binary);
    if (!out) return;  // plots are best-effort
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\">"
        << title << "</text>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << w - margin << "\" y2=\"" << h - margin
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << h - margin
        << "\" stroke=\"black\"/>\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"11\">%.4g</text>", margin,
                  h - margin + 16.0, x_lo);
    out << buf << "\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">%.4g</text>",
                  w - margin, h - margin + 16.0, x_hi);
    out << buf << "\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">%.4g</text>",
                  margin - 6.0, h - margin, y_lo);
    out << buf << "\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">%.4g</text>",
                  margin - 6.0, margin + 4.0, y_hi);
    out << buf << "\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const char* color = palette[si % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (!std::isfinite(s.ys[i])) continue;
            std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", sx(s.xs[i]), sy(s.ys[i]));
            out << buf;
        }
        out << "\"/>\n";
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"11\" fill=\"%s\">%s</text>",
                      w - margin + 4.0, margin + 14.0 * static_cast<double>(si), color, s.label.c_str());
        out << buf << "\n";
    }
    out << "</svg>\n";
}

void run_density_check(const ExperimentConfig&, CsvSink& csv, int& exit_code) {
    csv.line("# driftnoise csv density-check v1");
    csv.line("a,b,epsilon,integral,abs_err");
    const double grid[] = {0.1, 0.5, 1.0, 2.0, 5.0};
    const double eps_list[] = {1.0, 1.0 / 3.0, 1.0 / 9.0};
    for (double a : grid) {
        for (double b : grid) {
            for (double eps : eps_list) {
                density::DensityParams params{a, b, eps};
                try {
                    double integral = density::normalize_check(params, 1e-6);
                    csv.line(fmt(a) + "," + fmt(b) + "," + fmt(eps) + "," + fmt(integral) + "," +
                             fmt(std::abs(integral - 1.0)));
                } catch (const std::exception&) {
                    csv.line(fmt(a) + "," + fmt(b) + "," + fmt(eps) + ",nan,nan");
                    exit_code = 3;
                }
            }
        }
    }
}

void run_goodness_scan(const ExperimentConfig&, CsvSink& csv, int&) {
    csv.line("# driftnoise csv goodness-scan v1");
    csv.line("a,b,margin");
    std::vector<double> grid;
    for (int k = -3; k <= 3; ++k) grid.push_back(std::pow(10.0, k));
    auto rows = density::goodness_scan_table(grid, grid);
    for (const auto& row : rows) csv.line(fmt(row.a) + "," + fmt(row.b) + "," + fmt(row.margin));
}

void run_correlation(const ExperimentConfig&, CsvSink& csv, int&) {
    csv.line("# driftnoise csv correlation v1");
    csv.line("a,R_closed,R_numeric,abs_err");
    Series closed_series{"R_closed", {}, {}};
    for (int k = 0; k <= 40; ++k) {
        double a = static_cast<double>(k) / 20.0;
        double closed = signs::autocorrelation(a);
        double numeric = signs::autocorrelation_numeric(a);
        csv.line(fmt(a) + "," + fmt(closed) + "," + fmt(numeric) + "," + fmt(std::abs(closed - numeric)));
        closed_series.xs.push_back(a);
        closed_series.ys.push_back(closed);
    }
    csv.svg_title = "square-wave autocorrelation R(a)";
    csv.svg_series.push_back(std::move(closed_series));
}

void run_girsanov_check(const ExperimentConfig& config, CsvSink& csv, int& exit_code) {
    csv.line("# driftnoise csv girsanov-check v1");
    csv.line("functional,lambda,lhs,rhs,stderr_lhs,stderr_rhs,stderr_diff");
    const TimeGrid grid = TimeGrid::unit(config.depth);
    const RngFamily rng{config.seed};
    struct Case {
        const char* name;
        double lambda;
        std::function<double(const brownian::DiscretePath&)> functional;
    };
    const Case cases[] = {
        {"const_one", config.lambda, [](const brownian::DiscretePath&) { return 1.0; }},
        {"terminal_value", 0.25, [](const brownian::DiscretePath& p) { return p.terminal(); }},
        {"indicator_terminal_negative", 0.5,
         [](const brownian::DiscretePath& p) { return p.terminal() < 0.0 ? 1.0 : 0.0; }},
    };
    for (const Case& c : cases) {
        try {
            auto rep = brownian::girsanov_pushforward_check(c.functional, c.lambda, config.replicas, grid, rng);
            csv.line(std::string(c.name) + "," + fmt(c.lambda) + "," + fmt(rep.lhs) + "," + fmt(rep.rhs) + "," +
                     fmt(rep.stderr_lhs) + "," + fmt(rep.stderr_rhs) + "," + fmt(rep.stderr_diff));
        } catch (const std::exception&) {
            csv.line(std::string(c.name) + "," + fmt(c.lambda) + ",nan,nan,nan,nan,nan");
            exit_code = 3;
        }
    }
}

void run_drift_obstruction(const ExperimentConfig& config, CsvSink& csv, int& exit_code) {
    csv.line("# driftnoise csv drift-obstruction v1");
    csv.line("n,parity,c,replicas,acceptance_rate,D_hat,stderr");
    const signs::SignRule f = signs::build_drift_sensitive_rule(config.n_hi);
    const RngFamily rng{config.seed};
    for (double c : config.c_list) csv.svg_series.push_back(Series{"c=" + fmt(c), {}, {}});
    for (int n = config.n_lo; n <= config.n_hi; ++n) {
        for (std::size_t ci = 0; ci < config.c_list.size(); ++ci) {
            const double c = config.c_list[ci];
            const signs::SignRule g = signs::shift_rule(f, signs::shift_offsets_scale(config.n_hi, c));
            const char* parity = n % 2 == 1 ? "odd" : "even";
            try {
                auto rep = extensions::obstruction_distance_brownian(f, g, n, config.depth, config.replicas, rng,
                                                                     {.abs_tol = 1e-7, .max_depth = 48},
                                                                     config.workers);
                csv.line(std::to_string(n) + "," + parity + "," + fmt(c) + "," + std::to_string(rep.replicas) + "," +
                         fmt(rep.acceptance_rate) + "," + fmt(rep.d_hat) + "," + fmt(rep.stderr_d));
                csv.svg_series[ci].xs.push_back(n);
                csv.svg_series[ci].ys.push_back(rep.d_hat);
            } catch (const std::exception&) {
                csv.line(std::to_string(n) + "," + parity + "," + fmt(c) + "," + std::to_string(config.replicas) +
                         ",nan,nan,nan");
                exit_code = 3;
            }
        }
    }
    csv.svg_title = "obstruction distance estimate by level";
}

void run_compose_check(const ExperimentConfig& config, CsvSink& csv, int&) {
    csv.line("# driftnoise csv compose-check v1");
    csv.line("trial,signs_exact,max_path_dev");
    const std::int64_t trials = std::min<std::int64_t>(config.replicas, 200);
    const int depth = config.depth;
    const std::int64_t third = TimeGrid::pow3(depth) / 3;
    const signs::SignRule rule = signs::build_drift_sensitive_rule(std::min(depth - 1, 6));
    const RngFamily rng{config.seed};
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        RngStream stream = rng.stream(static_cast<std::uint64_t>(trial));
        const TimeGrid grid(depth, third);
        noise::NoiseElement a = noise::sample_noise(grid, rule, 3, stream);
        noise::NoiseElement b = noise::sample_noise(grid, rule, 3, stream);
        noise::NoiseElement c = noise::sample_noise(grid, rule, 3, stream);
        noise::NoiseElement left = noise::compose(noise::compose(a, b, rule), c, rule);
        noise::NoiseElement right = noise::compose(a, noise::compose(b, c, rule), rule);
        bool signs_equal = left.signs == right.signs;
        double dev = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < left.path.values.size(); ++i) {
            dev = std::max(dev, std::abs(left.path.values[i] - right.path.values[i]));
            scale = std::max(scale, std::abs(left.path.values[i]));
        }
        csv.line(std::to_string(trial) + "," + (signs_equal ? "1" : "0") + "," + fmt(dev / scale));
    }
}

void run_drift_diagram(const ExperimentConfig& config, CsvSink& csv, int&) {
    csv.line("# driftnoise csv drift-diagram v1");
    csv.line("lambda,depth,s_cells,t_cells,replicas,skipped,passed,max_path_dev");
    const std::int64_t half = TimeGrid::pow3(config.depth) / 2;  // nearest grid multiple below 1/2
    const signs::SignRule rule = signs::build_drift_sensitive_rule(std::min(config.depth - 1, 6));
    const RngFamily rng{config.seed};
    auto rep = noise::check_drift_diagram(half, half, config.depth, config.lambda, rule, config.replicas, rng);
    csv.line(fmt(config.lambda) + "," + std::to_string(config.depth) + "," + std::to_string(half) + "," +
             std::to_string(half) + "," + std::to_string(rep.replicas) + "," + std::to_string(rep.skipped) + "," +
             std::to_string(rep.passed) + "," + fmt(rep.max_path_dev));
}

void run_cocycle_demo(const ExperimentConfig& config, CsvSink& csv, int&) {
    csv.line("# driftnoise csv cocycle-demo v1");
    csv.line("instance,alphabet,depth,window,status");
    RngStream stream(config.seed, 0);
    auto status_name = [](extensions::CocycleStatus s) {
        switch (s) {
            case extensions::CocycleStatus::found: return "found";
            case extensions::CocycleStatus::absent: return "absent";
            case extensions::CocycleStatus::inconclusive: return "inconclusive";
        }
        return "?";
    };
    auto random_signs = [&](int a) {
        std::vector<signed char> row(static_cast<std::size_t>(a));
        for (auto& v : row) v = stream.next_uniform() < 0.5 ? 1 : -1;
        return row;
    };
    auto emit = [&](const std::string& name, const extensions::CocycleProblem& problem) {
        auto sol = extensions::cocycle_solve(problem);
        csv.line(name + "," + std::to_string(problem.alphabet) + "," + std::to_string(problem.depth) + "," +
                 std::to_string(problem.window) + "," + status_name(sol.status));
    };
    {
        extensions::CocycleProblem p{2, 4, 2, {}, {}};
        for (int n = 0; n < p.depth; ++n) {
            auto row = random_signs(p.alphabet);
            p.x.push_back(row);
            p.y.push_back(row);
        }
        emit("identity", p);
    }
    {
        extensions::CocycleProblem p{2, 4, 2, {}, {}};
        for (int n = 0; n < p.depth; ++n) {
            auto row = random_signs(p.alphabet);
            p.x.push_back(row);
            auto neg = row;
            for (auto& v : neg) v = static_cast<signed char>(-v);
            p.y.push_back(neg);
        }
        emit("antipodal", p);
    }
    for (int i = 0; i < 4; ++i) {
        extensions::CocycleProblem p{3, 4, 2, {}, {}};
        for (int n = 0; n < p.depth; ++n) {
            p.x.push_back(random_signs(p.alphabet));
            p.y.push_back(random_signs(p.alphabet));
        }
        emit("random" + std::to_string(i), p);
    }
}

}  // namespace

RunReport run(const ExperimentConfig& config) {
    config.validate();
    RunReport report;
    report.experiment = config.experiment;
    report.config_echo = config_echo(config);
    const auto start = std::chrono::steady_clock::now();

    CsvSink csv;
    int exit_code = 0;
    if (config.experiment == "density-check") {
        run_density_check(config, csv, exit_code);
    } else if (config.experiment == "goodness-scan") {
        run_goodness_scan(config, csv, exit_code);
    } else if (config.experiment == "correlation") {
        run_correlation(config, csv, exit_code);
    } else if (config.experiment == "girsanov-check") {
        run_girsanov_check(config, csv, exit_code);
    } else if (config.experiment == "drift-obstruction") {
        run_drift_obstruction(config, csv, exit_code);
    } else if (config.experiment == "compose-check") {
        run_compose_check(config, csv, exit_code);
    } else if (config.experiment == "drift-diagram") {
        run_drift_diagram(config, csv, exit_code);
    } else if (config.experiment == "cocycle-demo") {
        run_cocycle_demo(config, csv, exit_code);
    }

    std::filesystem::create_directories(config.output_dir);
    report.csv_path = (std::filesystem::path(config.output_dir) / (config.experiment + ".csv")).string();
    std::ofstream out(report.csv_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write CSV to '" + report.csv_path + "'");
    for (const auto& row : csv.rows) out << row << "\n";
    out.close();
    if (!csv.svg_series.empty()) {
        const auto svg_path = std::filesystem::path(config.output_dir) / (config.experiment + ".svg");
        write_svg_chart(svg_path.string(), csv.svg_title, csv.svg_series);
    }

    report.rows = std::move(csv.rows);
    report.exit_code = exit_code;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

bool compare_csv_files(const std::string& produced, const std::string& golden, double tol) {
    std::ifstream a(produced), b(golden);
    if (!a || !b) return false;
    std::string la, lb;
    for (;;) {
        bool ga = static_cast<bool>(std::getline(a, la));
        bool gb = static_cast<bool>(std::getline(b, lb));
        if (ga != gb) return false;
        if (!ga) return true;
        if (la == lb) continue;
        if (tol <= 0.0) return false;
        // field-wise numeric comparison within tol
        std::istringstream sa(la), sb(lb);
        std::string fa, fb;
        for (;;) {
            bool ha = static_cast<bool>(std::getline(sa, fa, ','));
            bool hb = static_cast<bool>(std::getline(sb, fb, ','));
            if (ha != hb) return false;
            if (!ha) break;
            if (fa == fb) continue;
            try {
                std::size_t ua = 0, ub = 0;
                double va = std::stod(fa, &ua);
                double vb = std::stod(fb, &ub);
                if (ua != fa.size() || ub != fb.size()) return false;
                if (std::abs(va - vb) > tol) return false;
            } catch (const std::exception&) {
                return false;
            }
        }
    }
}

}  // namespace driftnoise::cli
