#include "advtrain/io.hpp"

#include <cmath>
#include <fstream>

#include "advtrain/format.hpp"

namespace advtrain {

static const char* kTraceHeader = "t,empirical_risk,robust_risk,margin,truncated_margin,weight_norm";

void write_trace_csv(const std::vector<TraceRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << kTraceHeader << "\n";
    for (const auto& r : rows) {
        out << r.t << "," << fmt_g17(r.empirical_risk) << "," << fmt_g17(r.robust_risk) << ","
            << fmt_g17(r.margin) << "," << fmt_g17(r.truncated_margin) << ","
            << fmt_g17(r.weight_norm) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

static std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || split(line, ',') != split(kTraceHeader, ','))
        throw std::runtime_error(path + ": unexpected trace header");
    std::vector<TraceRow> rows;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 6)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 6 fields");
        const std::string ctx = path + ":" + std::to_string(lineno);
        TraceRow r;
        r.t = static_cast<std::size_t>(parse_double(f[0], ctx));
        r.empirical_risk = parse_double(f[1], ctx);
        r.robust_risk = parse_double(f[2], ctx);
        r.margin = parse_double(f[3], ctx);
        r.truncated_margin = parse_double(f[4], ctx);
        r.weight_norm = parse_double(f[5], ctx);
        rows.push_back(r);
    }
    return rows;
}

void write_aggregate_csv(const std::vector<std::vector<TraceRow>>& trials,
                         const std::string& path) {
    if (trials.empty()) throw std::invalid_argument("no trials to aggregate");
    const std::size_t rows = trials[0].size();
    for (const auto& tr : trials)
        if (tr.size() != rows)
            throw std::invalid_argument("trials have mismatched trace lengths");

    static const TraceField kFields[] = {TraceField::EmpiricalRisk, TraceField::RobustRisk,
                                         TraceField::Margin, TraceField::TruncatedMargin,
                                         TraceField::WeightNorm};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t";
    for (TraceField f : kFields)
        out << ",mean_" << trace_field_name(f) << ",std_" << trace_field_name(f);
    out << "\n";

    const double k = static_cast<double>(trials.size());
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = trials[0][r].t;
        for (const auto& tr : trials)
            if (tr[r].t != t) throw std::invalid_argument("trials have mismatched iteration grids");
        out << t;
        for (TraceField f : kFields) {
            bool all_same = true;
            const double first = trace_field(trials[0][r], f);
            double sum = 0.0;
            for (const auto& tr : trials) {
                const double v = trace_field(tr[r], f);
                if (v != first) all_same = false;
                sum += v;
            }
            double mean, sd;
            if (all_same) {  // keeps rows with identical non-finite values (e.g. -inf margins) exact
                mean = first;
                sd = 0.0;
            } else {
                mean = sum / k;
                double sq = 0.0;
                for (const auto& tr : trials) {
                    const double dv = trace_field(tr[r], f) - mean;
                    sq += dv * dv;
                }
                sd = std::sqrt(sq / k);
            }
            out << "," << fmt_g17(mean) << "," << fmt_g17(sd);
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

struct ChartTransform {
    bool log_log = false;
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;  // data range (transformed)
    double px0 = 0.0, px1 = 1.0, py0 = 0.0, py1 = 1.0;  // pixel box (py0 = top)

    double tx(double x) const { return log_log ? std::log10(x) : x; }
    double ty(double y) const { return log_log ? std::log10(y) : y; }
    double px(double xt) const { return px0 + (xt - x0) / (x1 - x0) * (px1 - px0); }
    double py(double yt) const { return py1 - (yt - y0) / (y1 - y0) * (py1 - py0); }
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt_px(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void emit_svg_chart(const std::vector<ChartSeries>& series, bool log_log, const std::string& path,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label) {
    if (series.empty()) throw std::invalid_argument("chart needs at least one series");
    for (const auto& s : series)
        if (s.points.empty()) throw std::invalid_argument("chart series '" + s.name + "' is empty");

    ChartTransform tr;
    tr.log_log = log_log;
    bool first = true;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (log_log && (!(x > 0.0) || !(y > 0.0)))
                throw std::domain_error("log-log chart requires positive values (series '" +
                                        s.name + "')");
            const double xt = tr.tx(x), yt = tr.ty(y);
            if (first) {
                tr.x0 = tr.x1 = xt;
                tr.y0 = tr.y1 = yt;
                first = false;
            } else {
                tr.x0 = std::min(tr.x0, xt);
                tr.x1 = std::max(tr.x1, xt);
                tr.y0 = std::min(tr.y0, yt);
                tr.y1 = std::max(tr.y1, yt);
            }
        }
    if (tr.x0 == tr.x1) {
        tr.x0 -= 0.5;
        tr.x1 += 0.5;
    }
    if (tr.y0 == tr.y1) {
        tr.y0 -= 0.5;
        tr.y1 += 0.5;
    }

    const double width = 860, height = 540;
    tr.px0 = 70;
    tr.px1 = width - 190;
    tr.py0 = 40;
    tr.py1 = height - 55;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "<rect x=\"" << fmt_px(tr.px0) << "\" y=\"" << fmt_px(tr.py0) << "\" width=\""
        << fmt_px(tr.px1 - tr.px0) << "\" height=\"" << fmt_px(tr.py1 - tr.py0)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (!title.empty())
        out << "<text x=\"" << fmt_px((tr.px0 + tr.px1) / 2) << "\" y=\"24\" font-size=\"16\""
            << " text-anchor=\"middle\" font-family=\"sans-serif\">" << xml_escape(title)
            << "</text>\n";

    // ticks: 5 per axis, labels in data units (inverse-transformed when log-log)
    for (int i = 0; i <= 4; ++i) {
        const double fx = tr.x0 + (tr.x1 - tr.x0) * i / 4.0;
        const double fy = tr.y0 + (tr.y1 - tr.y0) * i / 4.0;
        const double xpx = tr.px(fx), ypx = tr.py(fy);
        const double xval = log_log ? std::pow(10.0, fx) : fx;
        const double yval = log_log ? std::pow(10.0, fy) : fy;
        out << "<line x1=\"" << fmt_px(xpx) << "\" y1=\"" << fmt_px(tr.py1) << "\" x2=\""
            << fmt_px(xpx) << "\" y2=\"" << fmt_px(tr.py1 + 5) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt_px(xpx) << "\" y=\"" << fmt_px(tr.py1 + 18)
            << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">"
            << fmt_tick(xval) << "</text>\n";
        out << "<line x1=\"" << fmt_px(tr.px0 - 5) << "\" y1=\"" << fmt_px(ypx) << "\" x2=\""
            << fmt_px(tr.px0) << "\" y2=\"" << fmt_px(ypx) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt_px(tr.px0 - 8) << "\" y=\"" << fmt_px(ypx + 4)
            << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">"
            << fmt_tick(yval) << "</text>\n";
    }
    out << "<text x=\"" << fmt_px((tr.px0 + tr.px1) / 2) << "\" y=\"" << fmt_px(height - 14)
        << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">"
        << xml_escape(x_label) << (log_log ? " (log)" : "") << "</text>\n";
    out << "<text x=\"18\" y=\"" << fmt_px((tr.py0 + tr.py1) / 2)
        << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " transform=\"rotate(-90 18 " << fmt_px((tr.py0 + tr.py1) / 2) << ")\">"
        << xml_escape(y_label) << (log_log ? " (log)" : "") << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool sep = false;
        for (const auto& [x, y] : series[s].points) {
            if (sep) out << " ";
            out << fmt_px(tr.px(tr.tx(x))) << "," << fmt_px(tr.py(tr.ty(y)));
            sep = true;
        }
        out << "\"/>\n";
        const double ly = tr.py0 + 14 + 20.0 * static_cast<double>(s);
        out << "<line x1=\"" << fmt_px(tr.px1 + 12) << "\" y1=\"" << fmt_px(ly - 4) << "\" x2=\""
            << fmt_px(tr.px1 + 36) << "\" y2=\"" << fmt_px(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt_px(tr.px1 + 42) << "\" y=\"" << fmt_px(ly)
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << xml_escape(series[s].name)
            << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace advtrain
