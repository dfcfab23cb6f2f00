#include "output.hpp"

#include "ccwb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

namespace ccwb::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file \"" + path.string() + "\"");
    return out;
}

} // namespace

std::string utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt_double(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return out;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    nlohmann::json doc;
    doc["command"] = m.command;
    doc["argv"] = m.argv;
    doc["seed"] = m.seed;
    doc["version"] = m.version;
    doc["started_utc"] = m.started_utc;
    doc["finished_utc"] = m.finished_utc;
    doc["config"] = m.config;
    if (!m.extra.is_null()) doc["run"] = m.extra;
    auto out = open_out(path);
    out << doc.dump(2) << "\n";
}

void write_sweep_csv(const std::filesystem::path& path, const std::string& manifest_name,
                     const std::vector<SweepPoint>& points, int K) {
    auto out = open_out(path);
    out << "# manifest: " << manifest_name << "\n";
    out << "snr_db,alpha2,bound_t1,grmse_t1,grmse_t1_stderr";
    for (int j = 1; j <= K + 1; ++j) {
        out << ",bound_lambda" << j << ",grmse_lambda" << j;
    }
    out << ",status\n";
    for (const auto& p : points) {
        out << fmt_double(p.snr_db) << ',' << fmt_double(p.alpha2) << ','
            << fmt_double(p.bound_t1) << ',' << fmt_double(p.grmse_t1) << ','
            << fmt_double(p.grmse_t1_stderr);
        for (int j = 0; j <= K; ++j) {
            double b = j < static_cast<int>(p.bound_lambda.size())
                           ? p.bound_lambda[j]
                           : std::numeric_limits<double>::quiet_NaN();
            double g = j < static_cast<int>(p.grmse_lambda.size())
                           ? p.grmse_lambda[j]
                           : std::numeric_limits<double>::quiet_NaN();
            out << ',' << fmt_double(b) << ',' << fmt_double(g);
        }
        out << ',' << csv_sanitize(p.status) << "\n";
    }
}

namespace {

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

void write_sweep_svg(const std::filesystem::path& path, const std::vector<SweepPoint>& points) {
    const double width = 720, height = 480;
    const double ml = 70, mr = 20, mt = 20, mb = 50;

    double xmin = 0, xmax = 0, vmin = 0, vmax = 0;
    bool any = false;
    for (const auto& p : points) {
        if (!std::isfinite(p.snr_db)) continue;
        if (!any) {
            xmin = xmax = p.snr_db;
            any = true;
        }
        xmin = std::min(xmin, p.snr_db);
        xmax = std::max(xmax, p.snr_db);
    }
    bool anyv = false;
    auto eat = [&](double v) {
        if (!(v > 0.0) || !std::isfinite(v)) return;
        if (!anyv) {
            vmin = vmax = v;
            anyv = true;
            return;
        }
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    };
    for (const auto& p : points) {
        if (!p.ok) continue;
        eat(p.bound_t1);
        eat(p.grmse_t1);
    }
    if (!any || !anyv) {
        // nothing plottable; emit an empty frame so the file is still valid
        auto out = open_out(path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\">"
            << "<text x=\"20\" y=\"40\">no plottable points</text></svg>\n";
        return;
    }
    if (xmax == xmin) {
        xmin -= 1;
        xmax += 1;
    }
    double ylo = std::floor(std::log10(vmin));
    double yhi = std::ceil(std::log10(vmax));
    if (yhi <= ylo) yhi = ylo + 1;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double v) {
        double l = std::log10(v);
        return height - mb - (l - ylo) / (yhi - ylo) * (height - mt - mb);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    for (int d = static_cast<int>(ylo); d <= static_cast<int>(yhi); ++d) {
        double y = py(std::pow(10.0, d));
        svg << "<line x1=\"" << coord(ml) << "\" y1=\"" << coord(y) << "\" x2=\""
            << coord(width - mr) << "\" y2=\"" << coord(y)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << coord(ml - 8) << "\" y=\"" << coord(y + 4)
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">1e" << d
            << "</text>\n";
    }
    double xtick = 5.0;
    double x0 = std::ceil(xmin / xtick) * xtick;
    for (double x = x0; x <= xmax + 1e-9; x += xtick) {
        double xp = px(x);
        svg << "<line x1=\"" << coord(xp) << "\" y1=\"" << coord(height - mb) << "\" x2=\""
            << coord(xp) << "\" y2=\"" << coord(height - mb + 5)
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << coord(xp) << "\" y=\"" << coord(height - mb + 20)
            << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
            << fmt_double(x) << "</text>\n";
    }
    svg << "<line x1=\"" << coord(ml) << "\" y1=\"" << coord(mt) << "\" x2=\"" << coord(ml)
        << "\" y2=\"" << coord(height - mb) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << coord(ml) << "\" y1=\"" << coord(height - mb) << "\" x2=\""
        << coord(width - mr) << "\" y2=\"" << coord(height - mb)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << coord((ml + width - mr) / 2) << "\" y=\"" << coord(height - 12)
        << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">SNR (dB)</text>\n";
    svg << "<text x=\"16\" y=\"" << coord((mt + height - mb) / 2)
        << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" transform=\"rotate(-90 16 "
        << coord((mt + height - mb) / 2) << ")\">RMSE (samples)</text>\n";

    auto series_path = [&](bool bound) {
        std::string d;
        bool pen_down = false;
        for (const auto& p : points) {
            double v = bound ? p.bound_t1 : p.grmse_t1;
            if (!p.ok || !(v > 0.0) || !std::isfinite(v)) {
                pen_down = false;
                continue;
            }
            d += pen_down ? " L " : " M ";
            d += coord(px(p.snr_db)) + " " + coord(py(v));
            pen_down = true;
        }
        return d;
    };
    svg << "<path d=\"" << series_path(true)
        << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    svg << "<path d=\"" << series_path(false)
        << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    for (const auto& p : points) {
        if (!p.ok || !(p.grmse_t1 > 0.0) || !std::isfinite(p.grmse_t1)) continue;
        if (std::isfinite(p.grmse_t1_stderr) && p.grmse_t1_stderr > 0.0) {
            double lo = p.grmse_t1 - 2.0 * p.grmse_t1_stderr;
            double hi = p.grmse_t1 + 2.0 * p.grmse_t1_stderr;
            if (lo > 0.0) {
                svg << "<line x1=\"" << coord(px(p.snr_db)) << "\" y1=\"" << coord(py(lo))
                    << "\" x2=\"" << coord(px(p.snr_db)) << "\" y2=\"" << coord(py(hi))
                    << "\" stroke=\"#d62728\" stroke-width=\"1\"/>\n";
            }
        }
        svg << "<circle cx=\"" << coord(px(p.snr_db)) << "\" cy=\"" << coord(py(p.grmse_t1))
            << "\" r=\"2.5\" fill=\"#d62728\"/>\n";
    }

    double lx = width - mr - 190, ly = mt + 14;
    svg << "<line x1=\"" << coord(lx) << "\" y1=\"" << coord(ly) << "\" x2=\"" << coord(lx + 28)
        << "\" y2=\"" << coord(ly) << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << coord(lx + 34) << "\" y=\"" << coord(ly + 4)
        << "\" font-size=\"12\" font-family=\"sans-serif\">lower bound (t1)</text>\n";
    svg << "<line x1=\"" << coord(lx) << "\" y1=\"" << coord(ly + 18) << "\" x2=\""
        << coord(lx + 28) << "\" y2=\"" << coord(ly + 18)
        << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << coord(lx + 34) << "\" y=\"" << coord(ly + 22)
        << "\" font-size=\"12\" font-family=\"sans-serif\">Monte Carlo GRMSE (t1)</text>\n";
    svg << "</svg>\n";

    auto out = open_out(path);
    out << svg.str();
}

void write_bound_csv(const std::filesystem::path& path, const std::string& manifest_name,
                     const TightestBoundResult& result, int K) {
    const int n = 2 * K + 1;
    auto out = open_out(path);
    out << "# manifest: " << manifest_name << "\n";
    out << "record,row";
    for (int k = 1; k <= K; ++k) out << ",h_" << k;
    out << ",condition_P";
    for (int j = 1; j <= n; ++j) out << ",v_" << j;
    out << "\n";
    // offset rows carry diag(R); bstar rows carry one row of B* each
    for (const auto& b : result.per_h) {
        out << "offset,";
        for (int k = 0; k < K; ++k) out << ',' << b.h.h[k];
        out << ',' << fmt_double(b.condition_P);
        for (int j = 0; j < n; ++j) out << ',' << fmt_double(b.R(j, j));
        out << "\n";
    }
    for (int i = 0; i < n; ++i) {
        out << "bstar," << (i + 1);
        for (int k = 0; k < K; ++k) out << ',';
        out << ',';
        for (int j = 0; j < n; ++j) out << ',' << fmt_double(result.sup.B_star(i, j));
        out << "\n";
    }
}

void write_dataset_csv(const std::filesystem::path& path, const std::string& manifest_name,
                       const Dataset& data) {
    auto out = open_out(path);
    out << "# manifest: " << manifest_name << "\n";
    out << "t,count\n";
    for (std::size_t t = 0; t < data.counts.size(); ++t) {
        out << (t + 1) << ',' << data.counts[t] << "\n";
    }
}

Dataset read_dataset_csv(const std::filesystem::path& path, int expected_T) {
    std::ifstream in(path);
    if (!in) throw ConfigError("dataset: cannot open \"" + path.string() + "\"");
    Dataset data;
    std::string line;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // "t,count"
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError("dataset: " + path.string() + ":" + std::to_string(line_no) +
                              ": expected \"t,count\"");
        }
        try {
            data.counts.push_back(std::stoll(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ConfigError("dataset: " + path.string() + ":" + std::to_string(line_no) +
                              ": count is not an integer");
        }
    }
    if (static_cast<int>(data.counts.size()) != expected_T) {
        throw ConfigError("dataset: expected " + std::to_string(expected_T) + " rows, found " +
                          std::to_string(data.counts.size()));
    }
    return data;
}

void write_estimate_csv(const std::filesystem::path& path, const std::string& manifest_name,
                        const MapEstimate& est) {
    auto out = open_out(path);
    out << "# manifest: " << manifest_name << "\n";
    for (std::size_t k = 1; k <= est.locations.size(); ++k) {
        out << (k > 1 ? "," : "") << "t_hat_" << k;
    }
    for (std::size_t j = 1; j <= est.lambdas.size(); ++j) {
        out << ",lambda_hat_" << j;
    }
    out << ",log_posterior,candidates_evaluated\n";
    for (std::size_t k = 0; k < est.locations.size(); ++k) {
        out << (k > 0 ? "," : "") << est.locations[k];
    }
    for (double l : est.lambdas) out << ',' << fmt_double(l);
    out << ',' << fmt_double(est.log_posterior) << ',' << est.candidates_evaluated << "\n";
}

} // namespace ccwb::cli
