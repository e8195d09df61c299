#include "gnrpg/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace gnrpg {

std::string fmt_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsReport>& reports,
                       unsigned seed) {
    os << "# gnrpg metrics report\n";
    os << "# seed: " << seed << "\n";
    if (!reports.empty()) os << "# config: " << reports.front().fingerprint << "\n";
    os << "benchmark,structure,leakage_w,delay_s,wakeup_s,active_power_w,pdp_j,vgnr_sleep_v,"
          "error\n";
    for (const auto& r : reports) {
        os << r.benchmark << "," << r.structure << "," << fmt_sci(r.leakage_w) << ","
           << fmt_sci(r.delay_s) << "," << fmt_sci(r.wakeup_s) << ","
           << fmt_sci(r.active_power_w) << "," << fmt_sci(r.pdp_j) << ","
           << fmt_sci(r.vgnr_sleep_v) << "," << r.error << "\n";
    }
}

void write_normalized_csv(std::ostream& os, const std::vector<MetricsReport>& reports,
                          const std::string& baseline, unsigned seed) {
    std::vector<std::string> benches;
    std::set<std::string> seen;
    std::set<std::string> structures;
    std::map<std::pair<std::string, std::string>, const MetricsReport*> cell;
    for (const auto& r : reports) {
        if (seen.insert(r.benchmark).second) benches.push_back(r.benchmark);
        structures.insert(r.structure);
        cell[{r.benchmark, r.structure}] = &r;
    }

    os << "# gnrpg normalized report (reduction vs " << baseline << ")\n";
    os << "# seed: " << seed << "\n";
    if (!reports.empty()) os << "# config: " << reports.front().fingerprint << "\n";

    struct Metric {
        const char* name;
        double MetricsReport::*field;
    };
    const Metric metrics[] = {{"leakage_w", &MetricsReport::leakage_w},
                              {"delay_s", &MetricsReport::delay_s},
                              {"wakeup_s", &MetricsReport::wakeup_s}};

    for (const auto& s : structures) {
        if (s == baseline) continue;
        os << "structure," << s << "\n";
        os << "benchmark";
        for (const auto& m : metrics)
            os << "," << baseline << "_" << m.name << "," << s << "_" << m.name
               << ",normalized_value";
        os << "\n";
        std::vector<double> sums(std::size(metrics), 0.0);
        std::vector<int> counts(std::size(metrics), 0);
        for (const auto& b : benches) {
            const auto bi = cell.find({b, baseline});
            const auto si = cell.find({b, s});
            if (bi == cell.end() || si == cell.end()) continue;
            os << b;
            for (size_t mi = 0; mi < std::size(metrics); ++mi) {
                const double bv = bi->second->*(metrics[mi].field);
                const double sv = si->second->*(metrics[mi].field);
                const double red = bv != 0.0 ? (bv - sv) / bv : 0.0;
                sums[mi] += red;
                counts[mi] += 1;
                os << "," << fmt_sci(bv) << "," << fmt_sci(sv) << "," << fmt_short(100.0 * red)
                   << "%";
            }
            os << "\n";
        }
        os << "Average";
        for (size_t mi = 0; mi < std::size(metrics); ++mi) {
            os << ",,," << fmt_short(counts[mi] ? 100.0 * sums[mi] / counts[mi] : 0.0) << "%";
        }
        os << "\n";
    }
}

void write_sweep_csv(std::ostream& os, const std::string& param, const std::vector<SweepRow>& rows,
                     const std::string& fingerprint, unsigned seed) {
    os << "# gnrpg parameter sweep: " << param << "\n";
    os << "# seed: " << seed << "\n";
    os << "# config: " << fingerprint << "\n";
    os << param << ",delay_s,leakage_w,note\n";
    for (const auto& r : rows) {
        os << fmt_short(r.value) << ",";
        os << (r.delay_s ? fmt_sci(*r.delay_s) : "") << ",";
        os << (r.leakage_w ? fmt_sci(*r.leakage_w) : "") << ",";
        os << r.note << "\n";
    }
}

void write_iv_csv(std::ostream& os, const std::vector<IvPoint>& grid,
                  const std::string& fingerprint, unsigned seed) {
    os << "# gnrpg iv sweep\n";
    os << "# seed: " << seed << "\n";
    os << "# config: " << fingerprint << "\n";
    os << "family,v_gs,v_ds,i_ds_a\n";
    for (const auto& p : grid)
        os << p.family << "," << fmt_short(p.v_gs) << "," << fmt_short(p.v_ds) << ","
           << fmt_sci(p.i_ds) << "\n";
}

namespace {

constexpr double kW = 640.0, kH = 420.0;
constexpr double kMarginL = 70.0, kMarginR = 20.0, kMarginT = 40.0, kMarginB = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Scale {
    double lo = 0.0, hi = 1.0;
    bool log = false;
    double map(double v, double out_lo, double out_hi) const {
        double x = log ? std::log10(std::max(v, 1e-30)) : v;
        double l = log ? std::log10(std::max(lo, 1e-30)) : lo;
        double h = log ? std::log10(std::max(hi, 1e-30)) : hi;
        if (h == l) h = l + 1.0;
        return out_lo + (x - l) / (h - l) * (out_hi - out_lo);
    }
};

void svg_header(std::ostringstream& os, const std::string& title, const std::string& meta) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    if (!meta.empty()) os << "<!-- " << meta << " -->\n";
    os << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
          "font-family=\"sans-serif\">" << title << "</text>\n";
}

void svg_axes(std::ostringstream& os, const std::string& x_label, const std::string& y_label) {
    os << "<line x1=\"" << kMarginL << "\" y1=\"" << kH - kMarginB << "\" x2=\"" << kW - kMarginR
       << "\" y2=\"" << kH - kMarginB << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << kMarginL << "\" y1=\"" << kMarginT << "\" x2=\"" << kMarginL
       << "\" y2=\"" << kH - kMarginB << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (kMarginL + kW - kMarginR) / 2 << "\" y=\"" << kH - 12
       << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << x_label
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << (kMarginT + kH - kMarginB) / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
          "transform=\"rotate(-90 16 " << (kMarginT + kH - kMarginB) / 2 << ")\">" << y_label
       << "</text>\n";
}

}  // namespace

std::string svg_line_chart(const std::vector<Series>& series, const std::string& title,
                           const std::string& x_label, const std::string& y_label, bool log_y,
                           const std::string& meta) {
    std::ostringstream os;
    svg_header(os, title, meta);
    svg_axes(os, x_label, y_label);

    Scale sx, sy;
    sy.log = log_y;
    bool first = true;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (first) { sx.lo = sx.hi = x; sy.lo = sy.hi = y; first = false; }
            sx.lo = std::min(sx.lo, x); sx.hi = std::max(sx.hi, x);
            sy.lo = std::min(sy.lo, y); sy.hi = std::max(sy.hi, y);
        }

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        os << "<polyline fill=\"none\" stroke=\"" << kPalette[si % 6]
           << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : s.points) {
            os << fmt_short(sx.map(x, kMarginL, kW - kMarginR)) << ","
               << fmt_short(sy.map(y, kH - kMarginB, kMarginT)) << " ";
        }
        os << "\"/>\n";
        os << "<text x=\"" << kW - kMarginR - 6 << "\" y=\"" << kMarginT + 16.0 * (si + 1)
           << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\" fill=\""
           << kPalette[si % 6] << "\">" << s.name << "</text>\n";
    }
    // axis extremes
    os << "<text x=\"" << kMarginL << "\" y=\"" << kH - kMarginB + 16
       << "\" font-size=\"10\" font-family=\"sans-serif\">" << fmt_short(sx.lo) << "</text>\n";
    os << "<text x=\"" << kW - kMarginR << "\" y=\"" << kH - kMarginB + 16
       << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
       << fmt_short(sx.hi) << "</text>\n";
    os << "<text x=\"" << kMarginL - 6 << "\" y=\"" << kH - kMarginB
       << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
       << fmt_short(sy.lo) << "</text>\n";
    os << "<text x=\"" << kMarginL - 6 << "\" y=\"" << kMarginT + 4
       << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
       << fmt_short(sy.hi) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string svg_bar_chart(const std::vector<std::string>& labels,
                          const std::vector<Series>& series, const std::string& title,
                          const std::string& y_label, bool log_y, const std::string& meta) {
    std::ostringstream os;
    svg_header(os, title, meta);
    svg_axes(os, "", y_label);

    double hi = 0.0, lo = log_y ? 1e30 : 0.0;
    for (const auto& s : series)
        for (const auto& [_, y] : s.points) {
            hi = std::max(hi, y);
            if (log_y) lo = std::min(lo, std::max(y, 1e-30));
        }
    Scale sy{lo, hi <= lo ? lo + 1 : hi, log_y};

    const size_t n_groups = labels.size();
    const size_t n_series = std::max<size_t>(1, series.size());
    const double group_w = (kW - kMarginL - kMarginR) / std::max<size_t>(1, n_groups);
    const double bar_w = 0.8 * group_w / n_series;

    for (size_t si = 0; si < series.size(); ++si) {
        for (size_t gi = 0; gi < series[si].points.size() && gi < n_groups; ++gi) {
            const double y = series[si].points[gi].second;
            const double x = kMarginL + gi * group_w + 0.1 * group_w + si * bar_w;
            const double y_px = sy.map(y, kH - kMarginB, kMarginT);
            os << "<rect x=\"" << fmt_short(x) << "\" y=\"" << fmt_short(y_px) << "\" width=\""
               << fmt_short(bar_w) << "\" height=\"" << fmt_short(kH - kMarginB - y_px)
               << "\" fill=\"" << kPalette[si % 6] << "\"/>\n";
        }
        os << "<text x=\"" << kW - kMarginR - 6 << "\" y=\"" << kMarginT + 16.0 * (si + 1)
           << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\" fill=\""
           << kPalette[si % 6] << "\">" << series[si].name << "</text>\n";
    }
    for (size_t gi = 0; gi < n_groups; ++gi) {
        os << "<text x=\"" << fmt_short(kMarginL + (gi + 0.5) * group_w) << "\" y=\""
           << kH - kMarginB + 16 << "\" text-anchor=\"middle\" font-size=\"10\" "
              "font-family=\"sans-serif\">" << labels[gi] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace gnrpg
