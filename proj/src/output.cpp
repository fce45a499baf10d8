#include "perieig/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "perieig/error.hpp"

namespace perieig {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void CsvTable::add(std::vector<double> values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_number(v));
    rows.push_back(std::move(row));
}

std::string to_csv(const CsvTable& t) {
    std::string s;
    for (size_t k = 0; k < t.header.size(); ++k) s += (k ? "," : "") + t.header[k];
    s += "\n";
    for (const auto& row : t.rows) {
        for (size_t k = 0; k < row.size(); ++k) s += (k ? "," : "") + row[k];
        s += "\n";
    }
    return s;
}

void write_text(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write '" + path + "'");
    out << text;
    if (!out) fail(ErrorKind::io, "write failed for '" + path + "'");
}

void write_csv(const std::string& path, const CsvTable& t) {
    if (t.rows.empty()) fail(ErrorKind::io, "refusing to write an empty record set to '" + path + "'");
    write_text(path, to_csv(t));
}

// ---------------------------------------------------------------- contours

std::vector<Polyline> contour_lines(const PlaneField& f, double level) {
    const size_t nr = f.rho.size(), no = f.omega.size();
    using Pt = std::pair<double, double>;  // log10 rho, log10 omega
    std::vector<std::pair<Pt, Pt>> segs;
    auto val = [&](size_t io, size_t ir) { return f.values[io * nr + ir] - level; };
    auto lr = [&](size_t ir) { return std::log10(f.rho[ir]); };
    auto lo = [&](size_t io) { return std::log10(f.omega[io]); };
    for (size_t io = 0; io + 1 < no; ++io)
        for (size_t ir = 0; ir + 1 < nr; ++ir) {
            // Corners counter-clockwise from (ir, io).
            const Pt p[4] = {{lr(ir), lo(io)}, {lr(ir + 1), lo(io)}, {lr(ir + 1), lo(io + 1)}, {lr(ir), lo(io + 1)}};
            const double v[4] = {val(io, ir), val(io, ir + 1), val(io + 1, ir + 1), val(io + 1, ir)};
            std::vector<Pt> cuts;
            for (int e = 0; e < 4; ++e) {
                const int a = e, b = (e + 1) % 4;
                if ((v[a] < 0) != (v[b] < 0)) {
                    const double s = v[a] / (v[a] - v[b]);
                    cuts.push_back({p[a].first + s * (p[b].first - p[a].first),
                                    p[a].second + s * (p[b].second - p[a].second)});
                }
            }
            if (cuts.size() == 2) segs.push_back({cuts[0], cuts[1]});
            else if (cuts.size() == 4) {
                segs.push_back({cuts[0], cuts[1]});
                segs.push_back({cuts[2], cuts[3]});
            }
        }
    // Chain segments that share endpoints.
    std::vector<Polyline> lines;
    std::vector<bool> used(segs.size(), false);
    auto close = [](const Pt& a, const Pt& b) { return std::abs(a.first - b.first) + std::abs(a.second - b.second) < 1e-12; };
    for (size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        used[s] = true;
        std::vector<Pt> chain{segs[s].first, segs[s].second};
        for (bool grew = true; grew;) {
            grew = false;
            for (size_t q = 0; q < segs.size(); ++q) {
                if (used[q]) continue;
                const auto& [a, b] = segs[q];
                if (close(chain.back(), a)) chain.push_back(b);
                else if (close(chain.back(), b)) chain.push_back(a);
                else if (close(chain.front(), b)) chain.insert(chain.begin(), a);
                else if (close(chain.front(), a)) chain.insert(chain.begin(), b);
                else continue;
                used[q] = true;
                grew = true;
            }
        }
        Polyline pl;
        pl.label = "lambda = " + format_number(level);
        for (const auto& [x, y] : chain) pl.points.emplace_back(std::pow(10.0, x), std::pow(10.0, y));
        lines.push_back(std::move(pl));
    }
    return lines;
}

// ---------------------------------------------------------------- SVG

namespace {

std::string color_for(double s) {
    // Blue to yellow ramp.
    s = std::clamp(s, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(40 + 215 * s));
    const int g = static_cast<int>(std::lround(60 + 170 * s));
    const int b = static_cast<int>(std::lround(160 - 120 * s));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

const char* kPalette[] = {"#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

}  // namespace

std::string plane_svg(const std::string& title, const PlaneField* field, const std::vector<double>& levels,
                      const std::vector<Polyline>& curves) {
    // Data window in log10 coordinates.
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto extend = [&](double r, double w) {
        if (!(r > 0 && w > 0)) return;
        x0 = std::min(x0, std::log10(r));
        x1 = std::max(x1, std::log10(r));
        y0 = std::min(y0, std::log10(w));
        y1 = std::max(y1, std::log10(w));
    };
    if (field)
        for (double r : field->rho)
            for (double w : field->omega) extend(r, w);
    for (const auto& c : curves)
        for (const auto& [r, w] : c.points) extend(r, w);
    if (!std::isfinite(x0)) fail(ErrorKind::io, "nothing to plot");
    x0 = std::floor(x0), x1 = std::max(std::ceil(x1), x0 + 1);
    y0 = std::floor(y0), y1 = std::max(std::ceil(y1), y0 + 1);

    const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 60;
    auto px = [&](double r) { return ml + (std::log10(r) - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double w) { return H - mb - (std::log10(w) - y0) / (y1 - y0) * (H - mt - mb); };

    std::ostringstream s;
    s.precision(6);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";

    if (field && !field->values.empty()) {
        const auto [mn, mx] = std::minmax_element(field->values.begin(), field->values.end());
        const double span = *mx - *mn > 0 ? *mx - *mn : 1.0;
        const size_t nr = field->rho.size(), no = field->omega.size();
        // Cells centred on samples, edges at geometric midpoints.
        auto edge = [](const std::vector<double>& v, size_t k, bool upper) {
            if (upper) return k + 1 < v.size() ? std::sqrt(v[k] * v[k + 1]) : v[k] * std::sqrt(v[k] / v[k - 1]);
            return k > 0 ? std::sqrt(v[k] * v[k - 1]) : v[k] / std::sqrt(v[k + 1] / v[k]);
        };
        s << "<g id=\"heat\">\n";
        for (size_t io = 0; io < no && nr > 1 && no > 1; ++io)
            for (size_t ir = 0; ir < nr; ++ir) {
                const double xa = px(edge(field->rho, ir, false)), xb = px(edge(field->rho, ir, true));
                const double ya = py(edge(field->omega, io, true)), yb = py(edge(field->omega, io, false));
                s << "<rect x=\"" << xa << "\" y=\"" << ya << "\" width=\"" << xb - xa << "\" height=\"" << yb - ya
                  << "\" fill=\"" << color_for((field->values[io * nr + ir] - *mn) / span) << "\"/>\n";
            }
        s << "</g>\n";
        s << "<g id=\"contours\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\">\n";
        for (double level : levels)
            for (const auto& line : contour_lines(*field, level)) {
                s << "<polyline data-level=\"" << format_number(level) << "\" points=\"";
                for (const auto& [r, w] : line.points) s << px(r) << ',' << py(w) << ' ';
                s << "\"/>\n";
            }
        s << "</g>\n";
    }

    s << "<g id=\"curves\" fill=\"none\" stroke-width=\"2\">\n";
    for (size_t k = 0; k < curves.size(); ++k) {
        s << "<polyline stroke=\"" << kPalette[k % 7] << "\" data-label=\"" << curves[k].label << "\" points=\"";
        for (const auto& [r, w] : curves[k].points) s << px(r) << ',' << py(w) << ' ';
        s << "\"/>\n";
    }
    s << "</g>\n";

    // Axes with decade ticks.
    s << "<g id=\"axes\" stroke=\"black\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb << "\"/>\n";
    s << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\"/>\n";
    for (int e = static_cast<int>(x0); e <= static_cast<int>(x1); ++e) {
        const double x = px(std::pow(10.0, e));
        s << "<line x1=\"" << x << "\" y1=\"" << H - mb << "\" x2=\"" << x << "\" y2=\"" << H - mb + 5 << "\"/>"
          << "<text stroke=\"none\" x=\"" << x << "\" y=\"" << H - mb + 20 << "\" text-anchor=\"middle\">1e" << e
          << "</text>\n";
    }
    for (int e = static_cast<int>(y0); e <= static_cast<int>(y1); ++e) {
        const double y = py(std::pow(10.0, e));
        s << "<line x1=\"" << ml - 5 << "\" y1=\"" << y << "\" x2=\"" << ml << "\" y2=\"" << y << "\"/>"
          << "<text stroke=\"none\" x=\"" << ml - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e
          << "</text>\n";
    }
    s << "<text stroke=\"none\" x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\" font-size=\"14\">ρ (log scale)</text>\n";
    s << "<text stroke=\"none\" x=\"18\" y=\"" << (mt + H - mb) / 2 << "\" text-anchor=\"middle\" font-size=\"14\" "
      << "transform=\"rotate(-90 18 " << (mt + H - mb) / 2 << ")\">ω (log scale)</text>\n";
    s << "</g>\n</svg>\n";
    return s.str();
}

// ---------------------------------------------------------------- record

RunRecord::RunRecord(std::string config_hash, std::string version) {
    doc_["config_hash"] = std::move(config_hash);
    doc_["version"] = std::move(version);
    doc_["operations"] = nlohmann::json::array();
}

void RunRecord::add(const std::string& operation, const std::string& status, double seconds, nlohmann::json results) {
    doc_["operations"].push_back(
        {{"operation", operation}, {"status", status}, {"wall_time_s", seconds}, {"results", std::move(results)}});
}

}  // namespace perieig
