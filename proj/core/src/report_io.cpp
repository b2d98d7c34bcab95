#include "wavegrad/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace wavegrad {

namespace {

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string metric_color(MetricKind kind) {
    switch (kind) {
        case MetricKind::wasserstein: return "#1f77b4";
        case MetricKind::fisher_rao: return "#2ca02c";
        case MetricKind::mahalanobis: return "#9467bd";
        case MetricKind::combined: return "#d62728";
    }
    return "#000000";
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ReportIoError("cannot open file for writing", path);
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_history_csv(const DescentHistory& history, std::ostream& out) {
    out << kHistoryCsvHeader << '\n';
    for (const auto& r : history.records) {
        out << r.iteration << ',' << format_double(r.loss) << ',' << format_double(r.gap) << ','
            << format_double(r.eta) << ',' << r.halvings << ',' << format_double(r.mass) << ','
            << format_double(r.min_p) << '\n';
    }
}

std::vector<std::filesystem::path> write_csv(const RunReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ReportIoError("cannot create output directory (" + ec.message() + ")", dir);

    std::vector<std::filesystem::path> written;
    for (const auto& run : report.runs) {
        if (!run.history) continue;
        const auto path = dir / (report.preset_id + "_" + std::string(metric_name(run.metric)) + ".csv");
        auto out = open_for_write(path);
        write_history_csv(*run.history, out);
        out.flush();
        if (!out) throw ReportIoError("write failed", path);
        written.push_back(path);
    }
    return written;
}

void write_svg(const RunReport& report, std::ostream& out) {
    constexpr double width = 720.0;
    constexpr double height = 480.0;
    constexpr double left = 80.0;
    constexpr double right = 180.0;
    constexpr double top = 40.0;
    constexpr double bottom = 60.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    // Log10 range over all positive gaps; nonpositive gaps are pinned to the floor.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t max_iter = 1;
    for (const auto& run : report.runs) {
        if (!run.history) continue;
        max_iter = std::max(max_iter, run.history->iterations());
        for (const auto& r : run.history->records) {
            if (r.gap > 0.0 && std::isfinite(r.gap)) {
                lo = std::min(lo, std::log10(r.gap));
                hi = std::max(hi, std::log10(r.gap));
            }
        }
    }
    if (!std::isfinite(lo)) {
        lo = -1.0;
        hi = 0.0;
    }
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi <= lo) hi = lo + 1.0;

    auto x_of = [&](double k) { return left + plot_w * k / static_cast<double>(max_iter); };
    auto y_of = [&](double gap) {
        const double e = (gap > 0.0 && std::isfinite(gap)) ? std::log10(gap) : lo;
        return top + plot_h * (hi - std::clamp(e, lo, hi)) / (hi - lo);
    };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\""
        << fixed(height, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << fixed(width, 0) << "\" height=\"" << fixed(height, 0)
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << fixed(left) << "\" y=\"24\" font-size=\"14\">" << report.preset_id
        << ": loss gap vs iteration</text>\n";
    out << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(plot_w)
        << "\" height=\"" << fixed(plot_h) << "\" fill=\"none\" stroke=\"#444\"/>\n";

    for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); ++e) {
        const double y = top + plot_h * (hi - e) / (hi - lo);
        out << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(left + plot_w)
            << "\" y2=\"" << fixed(y) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(y + 4)
            << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    for (int t = 0; t <= 4; ++t) {
        const double k = static_cast<double>(max_iter) * t / 4.0;
        out << "<text x=\"" << fixed(x_of(k)) << "\" y=\"" << fixed(top + plot_h + 18)
            << "\" text-anchor=\"middle\">" << fixed(k, 0) << "</text>\n";
    }
    out << "<text x=\"" << fixed(left + plot_w / 2) << "\" y=\"" << fixed(height - 16)
        << "\" text-anchor=\"middle\">iteration</text>\n";
    out << "<text x=\"18\" y=\"" << fixed(top + plot_h / 2) << "\" transform=\"rotate(-90 18 "
        << fixed(top + plot_h / 2) << ")\" text-anchor=\"middle\">E(p) - E(mu)</text>\n";

    double legend_y = top + 10;
    for (const auto& run : report.runs) {
        const std::string color = metric_color(run.metric);
        if (run.history) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            bool first = true;
            for (const auto& r : run.history->records) {
                out << (first ? "" : " ") << fixed(x_of(static_cast<double>(r.iteration))) << ','
                    << fixed(y_of(r.gap));
                first = false;
            }
            out << "\"/>\n";
        }
        const double lx = left + plot_w + 16;
        out << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(legend_y) << "\" x2=\"" << fixed(lx + 24)
            << "\" y2=\"" << fixed(legend_y) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fixed(lx + 30) << "\" y=\"" << fixed(legend_y + 4) << "\">"
            << metric_name(run.metric) << (run.history ? "" : " (failed)") << "</text>\n";
        legend_y += 20;
    }
    out << "</svg>\n";
}

void write_svg(const RunReport& report, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw ReportIoError("cannot create output directory (" + ec.message() + ")", path.parent_path());
    }
    auto out = open_for_write(path);
    write_svg(report, out);
    out.flush();
    if (!out) throw ReportIoError("write failed", path);
}

}  // namespace wavegrad
