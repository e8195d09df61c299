#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gnrpg/power_gating.hpp"

namespace gnrpg {

// One (x, y) series for plotting
struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

// Deterministic fixed-precision number formatting used by every emitter.
std::string fmt_sci(double v);   // %.9e
std::string fmt_short(double v); // %.6g

// metrics.csv: one row per MetricsReport, preceded by `# key: value`
// reproducibility comments (fingerprint, seed).
void write_metrics_csv(std::ostream& os, const std::vector<MetricsReport>& reports,
                       unsigned seed);

// Tables 4-5 style layout: per benchmark, baseline (mospg) value, structure
// value and the normalized reduction per metric; Average row appended.
void write_normalized_csv(std::ostream& os, const std::vector<MetricsReport>& reports,
                          const std::string& baseline, unsigned seed);

void write_sweep_csv(std::ostream& os, const std::string& param, const std::vector<SweepRow>& rows,
                     const std::string& fingerprint, unsigned seed);

struct IvPoint {
    std::string family;  // "gnr" | "mos"
    double v_gs, v_ds, i_ds;
};
void write_iv_csv(std::ostream& os, const std::vector<IvPoint>& grid,
                  const std::string& fingerprint, unsigned seed);

// Hand-emitted SVG: axes plus one polyline per series. Pure functions of
// their arguments; `meta` (fingerprint/seed) is embedded as an XML comment.
std::string svg_line_chart(const std::vector<Series>& series, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           bool log_y = false, const std::string& meta = "");
std::string svg_bar_chart(const std::vector<std::string>& labels,
                          const std::vector<Series>& series, const std::string& title,
                          const std::string& y_label, bool log_y = false,
                          const std::string& meta = "");

}  // namespace gnrpg
