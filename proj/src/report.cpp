#include "causalflow/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "causalflow/errors.hpp"

namespace causalflow {

namespace {

constexpr const char* kColumns[] = {"tau", "i_lag", "te", "i_tot",
                                    "i_xy", "r_linear", "r_wb", "u_x",
                                    "u_y", "s", "c"};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_float(std::string_view text) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size()) {
        throw UsageError("bad float in curve CSV: '" + std::string(text) +
                         "'");
    }
    return v;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t next = line.find(',', pos);
        if (next == std::string::npos) {
            next = line.size();
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
        if (next == line.size()) {
            break;
        }
    }
    return out;
}

}  // namespace

void write_curve_csv(std::ostream& out, const DecompositionCurve& curve,
                     const std::vector<double>* effective_n) {
    std::string header;
    for (const char* col : kColumns) {
        if (!header.empty()) {
            header += ',';
        }
        header += col;
    }
    if (effective_n != nullptr) {
        header += ",effective_n";
    }
    out << header << '\n';
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const DecompositionPoint& p = curve.points[i];
        out << fmt17(p.tau) << ',' << fmt17(p.i_lag) << ',' << fmt17(p.te)
            << ',' << fmt17(p.i_tot) << ',' << fmt17(p.i_xy) << ','
            << fmt17(p.r_linear) << ',' << fmt17(p.r_wb) << ','
            << fmt17(p.u_x) << ',' << fmt17(p.u_y) << ',' << fmt17(p.s)
            << ',' << fmt17(p.c);
        if (effective_n != nullptr) {
            out << ',' << fmt17((*effective_n)[i]);
        }
        out << '\n';
    }
    out << "# tau_opt=" << fmt17(curve.tau_opt) << '\n';
    out << "# tau_res=" << fmt17(curve.tau_res) << '\n';
    out << "# source=" << curve.source << " target=" << curve.target;
    if (!curve.conditioned_on.empty()) {
        out << " conditioned_on=";
        for (std::size_t i = 0; i < curve.conditioned_on.members.size(); ++i) {
            if (i > 0) {
                out << '+';
            }
            out << curve.conditioned_on.members[i];
        }
    }
    out << '\n';
    if (!curve.conditioned_on.empty()) {
        // the min-information baseline r_wb is conditioned on the same
        // parent set as everything else; that goes beyond its usual
        // unconditioned definition
        out << "# note=r_wb parent-conditioned (extension)\n";
    }
}

ParsedCurve read_curve_csv(std::istream& in) {
    ParsedCurve parsed;
    std::string line;
    if (!std::getline(in, line)) {
        throw UsageError("empty curve CSV");
    }
    const std::vector<std::string> cols = split_commas(line);
    bool has_effective = false;
    if (cols.size() == 12 && cols.back() == "effective_n") {
        has_effective = true;
    } else if (cols.size() != 11) {
        throw UsageError("curve CSV has unexpected column count");
    }
    for (std::size_t i = 0; i < 11; ++i) {
        if (cols[i] != kColumns[i]) {
            throw UsageError("curve CSV column '" + cols[i] +
                             "' does not match schema");
        }
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const auto eat = [&line](std::string_view key) -> std::string {
                const std::size_t at = line.find(key);
                if (at == std::string::npos) {
                    return {};
                }
                std::size_t start = at + key.size();
                std::size_t end = line.find(' ', start);
                if (end == std::string::npos) {
                    end = line.size();
                }
                return line.substr(start, end - start);
            };
            if (std::string v = eat("tau_opt="); !v.empty()) {
                parsed.curve.tau_opt = parse_float(v);
            } else if (std::string w = eat("tau_res="); !w.empty()) {
                parsed.curve.tau_res = parse_float(w);
            } else if (line.find("source=") != std::string::npos) {
                parsed.curve.source = eat("source=");
                parsed.curve.target = eat("target=");
                std::string cond = eat("conditioned_on=");
                std::size_t pos = 0;
                while (!cond.empty() && pos <= cond.size()) {
                    std::size_t next = cond.find('+', pos);
                    if (next == std::string::npos) {
                        next = cond.size();
                    }
                    parsed.curve.conditioned_on.members.push_back(
                        cond.substr(pos, next - pos));
                    pos = next + 1;
                    if (next == cond.size()) {
                        break;
                    }
                }
            }
            continue;
        }
        const std::vector<std::string> fields = split_commas(line);
        if (fields.size() != (has_effective ? 12u : 11u)) {
            throw UsageError("curve CSV row has wrong column count");
        }
        DecompositionPoint p;
        p.tau = parse_float(fields[0]);
        p.i_lag = parse_float(fields[1]);
        p.te = parse_float(fields[2]);
        p.i_tot = parse_float(fields[3]);
        p.i_xy = parse_float(fields[4]);
        p.r_linear = parse_float(fields[5]);
        p.r_wb = parse_float(fields[6]);
        p.u_x = parse_float(fields[7]);
        p.u_y = parse_float(fields[8]);
        p.s = parse_float(fields[9]);
        p.c = parse_float(fields[10]);
        parsed.curve.points.push_back(p);
        if (has_effective) {
            parsed.effective_n.push_back(parse_float(fields[11]));
        }
    }
    for (const DecompositionPoint& p : parsed.curve.points) {
        if (p.tau == parsed.curve.tau_opt) {
            parsed.curve.peak_i = p.i_lag;
        }
        if (p.tau == parsed.curve.tau_res) {
            parsed.curve.peak_c = p.c;
        }
    }
    return parsed;
}

namespace {

struct Series {
    const char* name;
    const char* color;
    double DecompositionPoint::* field;
};

constexpr Series kSeries[] = {
    {"i_lag", "#1f77b4", &DecompositionPoint::i_lag},
    {"te", "#ff7f0e", &DecompositionPoint::te},
    {"i_tot", "#2ca02c", &DecompositionPoint::i_tot},
    {"i_xy", "#d62728", &DecompositionPoint::i_xy},
    {"r_linear", "#9467bd", &DecompositionPoint::r_linear},
    {"r_wb", "#8c564b", &DecompositionPoint::r_wb},
    {"u_x", "#e377c2", &DecompositionPoint::u_x},
    {"u_y", "#7f7f7f", &DecompositionPoint::u_y},
    {"s", "#bcbd22", &DecompositionPoint::s},
    {"c", "#000000", &DecompositionPoint::c},
};

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

void write_curve_svg(std::ostream& out, const DecompositionCurve& curve,
                     bool log_tau_axis) {
    const double width = 880, height = 560;
    const double left = 70, right = width - 170, top = 24, bottom = height - 56;

    double x_lo = curve.points.front().tau, x_hi = curve.points.back().tau;
    if (log_tau_axis) {
        x_lo = std::log10(std::max(x_lo, 1e-300));
        x_hi = std::log10(std::max(x_hi, 1e-300));
    }
    if (x_hi <= x_lo) {
        x_hi = x_lo + 1.0;
    }
    double y_lo = 0.0, y_hi = 0.0;
    for (const DecompositionPoint& p : curve.points) {
        for (const Series& s : kSeries) {
            const double v = p.*(s.field);
            if (std::isfinite(v)) {
                y_lo = std::min(y_lo, v);
                y_hi = std::max(y_hi, v);
            }
        }
    }
    if (y_hi <= y_lo) {
        y_hi = y_lo + 1.0;
    }
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    auto x_of = [&](double tau) {
        double t = log_tau_axis ? std::log10(std::max(tau, 1e-300)) : tau;
        return left + (right - left) * (t - x_lo) / (x_hi - x_lo);
    };
    auto y_of = [&](double v) {
        return bottom - (bottom - top) * (v - y_lo) / (y_hi - y_lo);
    };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n";
    out << "  <rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    // axes
    out << "  <line x1=\"" << fmt3(left) << "\" y1=\"" << fmt3(bottom)
        << "\" x2=\"" << fmt3(right) << "\" y2=\"" << fmt3(bottom)
        << "\" stroke=\"black\"/>\n";
    out << "  <line x1=\"" << fmt3(left) << "\" y1=\"" << fmt3(top)
        << "\" x2=\"" << fmt3(left) << "\" y2=\"" << fmt3(bottom)
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = x_lo + (x_hi - x_lo) * i / 5.0;
        const double tau = log_tau_axis ? std::pow(10.0, fx) : fx;
        const double px = left + (right - left) * i / 5.0;
        out << "  <line x1=\"" << fmt3(px) << "\" y1=\"" << fmt3(bottom)
            << "\" x2=\"" << fmt3(px) << "\" y2=\"" << fmt3(bottom + 5)
            << "\" stroke=\"black\"/>\n";
        out << "  <text x=\"" << fmt3(px) << "\" y=\"" << fmt3(bottom + 20)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt_tick(tau)
            << "</text>\n";
        const double fy = y_lo + (y_hi - y_lo) * i / 5.0;
        const double py = y_of(fy);
        out << "  <line x1=\"" << fmt3(left - 5) << "\" y1=\"" << fmt3(py)
            << "\" x2=\"" << fmt3(left) << "\" y2=\"" << fmt3(py)
            << "\" stroke=\"black\"/>\n";
        out << "  <text x=\"" << fmt3(left - 8) << "\" y=\"" << fmt3(py + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmt_tick(fy)
            << "</text>\n";
    }
    out << "  <text x=\"" << fmt3((left + right) / 2) << "\" y=\""
        << fmt3(height - 12) << "\" font-size=\"14\" "
        << "text-anchor=\"middle\">tau</text>\n";
    out << "  <text x=\"18\" y=\"" << fmt3((top + bottom) / 2)
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 "
        << "18 " << fmt3((top + bottom) / 2) << ")\">nats</text>\n";

    int legend_row = 0;
    for (const Series& s : kSeries) {
        out << "  <polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const DecompositionPoint& p : curve.points) {
            const double v = p.*(s.field);
            if (!std::isfinite(v)) {
                continue;
            }
            if (!first) {
                out << ' ';
            }
            out << fmt3(x_of(p.tau)) << ',' << fmt3(y_of(v));
            first = false;
        }
        out << "\"/>\n";
        const double ly = top + 18 + 20 * legend_row;
        out << "  <line x1=\"" << fmt3(right + 14) << "\" y1=\"" << fmt3(ly)
            << "\" x2=\"" << fmt3(right + 40) << "\" y2=\"" << fmt3(ly)
            << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        out << "  <text x=\"" << fmt3(right + 46) << "\" y=\"" << fmt3(ly + 4)
            << "\" font-size=\"12\">" << s.name << "</text>\n";
        ++legend_row;
    }
    out << "</svg>\n";
}

void atomic_write_file(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw UsageError("cannot write to '" + tmp.string() + "'");
        }
        out << contents;
        if (!out.good()) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw UsageError("short write to '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw UsageError("cannot rename temporary onto '" + path + "'");
    }
}

}  // namespace causalflow
