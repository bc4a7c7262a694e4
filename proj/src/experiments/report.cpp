#include "equiloc/experiments/report.hpp"

#include "equiloc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace equiloc::experiments {

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_num(const std::string& s, std::size_t line) {
    if (s == "nan") return std::nan("");
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DomainError("records CSV line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s, std::size_t line) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw DomainError("records CSV line " + std::to_string(line) + ": bad boolean '" + s + "'");
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Plot geometry.
constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 64, kRight = 20, kTop = 36, kBottom = 52;

struct Frame {
    double x0, x1, y0, y1;
    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string axis_label(bounds::Vary v) {
    switch (v) {
        case bounds::Vary::EncoderRF: return "encoder RF size s_psi (px)";
        case bounds::Vary::DecoderRF: return "decoder RF size s_phi (px)";
        case bounds::Vary::ObjectSize: return "object size s_o (px)";
        case bounds::Vary::GaussianSD: return "Gaussian s.d. sigma_G (px)";
    }
    return "";
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

}  // namespace

std::string records_to_csv(const std::vector<SweepRecord>& records) {
    std::string out = std::string(kRecordsHeader) + "\n";
    for (const auto& r : records) {
        out += bounds::to_string(r.vary) + ',' + num(r.value) + ',' + std::to_string(r.seed) + ',' + num(r.delta_px) +
               ',' + (r.success ? "true" : "false") + ',' + num(r.enc_term) + ',' + num(r.dec_mean) + ',' +
               num(r.band) + ',' + (r.within_bound ? "true" : "false") + '\n';
    }
    return out;
}

std::vector<SweepRecord> records_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kRecordsHeader)
        throw DomainError("records CSV: missing or unexpected header");
    std::vector<SweepRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 9) throw DomainError("records CSV line " + std::to_string(lineno) + ": expected 9 fields");
        SweepRecord r;
        r.vary = bounds::parse_vary(f[0]);
        r.value = parse_num(f[1], lineno);
        r.seed = static_cast<int>(parse_num(f[2], lineno));
        r.delta_px = parse_num(f[3], lineno);
        r.success = parse_bool(f[4], lineno);
        r.enc_term = parse_num(f[5], lineno);
        r.dec_mean = parse_num(f[6], lineno);
        r.band = parse_num(f[7], lineno);
        r.within_bound = parse_bool(f[8], lineno);
        records.push_back(r);
    }
    return records;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << text;
    if (!out) throw IoError(path, "write failed");
}

void write_records_csv(const std::string& path, const std::vector<SweepRecord>& records) {
    write_text(path, records_to_csv(records));
}

std::vector<SweepRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open records CSV");
    std::ostringstream ss;
    ss << in.rdbuf();
    return records_from_csv(ss.str());
}

std::string curve_to_csv(const bounds::BoundCurve& curve) {
    std::string out = "vary,value,mean,side";
    for (int k = 1; k <= curve.bands; ++k) out += ",band" + std::to_string(k);
    out += '\n';
    for (const auto& p : curve.points) {
        out += bounds::to_string(curve.vary) + ',' + num(p.value) + ',' + num(p.mean.value()) + ',' +
               bounds::to_string(p.active_side);
        for (double b : p.band_upper) out += ',' + num(b);
        out += '\n';
    }
    return out;
}

std::string render_svg(const std::vector<SweepRecord>& records, const bounds::BoundCurve& curve,
                       const std::string& title) {
    if (curve.points.empty()) throw DomainError("render_svg: empty curve");
    for (const auto& r : records)
        if (r.vary != curve.vary) throw DomainError("render_svg: records and curve vary different quantities");

    Frame f{curve.points.front().value, curve.points.back().value, 0.0, 0.0};
    for (const auto& p : curve.points) {
        f.y1 = std::max(f.y1, p.mean.value());
        for (double b : p.band_upper) f.y1 = std::max(f.y1, b);
    }
    for (const auto& r : records) {
        if (r.success && std::isfinite(r.delta_px)) {
            f.y1 = std::max(f.y1, r.delta_px);
            f.x0 = std::min(f.x0, r.value);
            f.x1 = std::max(f.x1, r.value);
        }
    }
    if (f.x1 == f.x0) {
        f.x0 -= 1;
        f.x1 += 1;
    }
    const double xpad = (f.x1 - f.x0) * 0.04;
    f.x0 -= xpad;
    f.x1 += xpad;
    f.y1 = f.y1 > 0 ? f.y1 * 1.1 : 1.0;

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    if (!title.empty())
        s << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
          << "</text>\n";

    // Bands, lightest (outermost) first.
    for (int k = curve.bands; k >= 1; --k) {
        const double opacity = 0.45 - 0.09 * (k - 1);
        s << "<polygon class=\"band\" data-sigma=\"" << k << "\" fill=\"#3b6fd1\" fill-opacity=\"" << fmt(opacity)
          << "\" stroke=\"none\" points=\"";
        for (const auto& p : curve.points)
            s << fmt(f.px(p.value)) << ',' << fmt(f.py(p.band_upper.at(static_cast<std::size_t>(k - 1)))) << ' ';
        for (auto it = curve.points.rbegin(); it != curve.points.rend(); ++it) {
            const double lower = k == 1 ? it->mean.value() : it->band_upper.at(static_cast<std::size_t>(k - 2));
            s << fmt(f.px(it->value)) << ',' << fmt(f.py(lower)) << ' ';
        }
        s << "\"/>\n";
    }

    s << "<polyline class=\"theory\" fill=\"none\" stroke=\"#1f3f99\" stroke-width=\"2\" points=\"";
    for (const auto& p : curve.points) s << fmt(f.px(p.value)) << ',' << fmt(f.py(p.mean.value())) << ' ';
    s << "\"/>\n";

    for (double bp : curve.breakpoints) {
        s << "<line class=\"breakpoint\" x1=\"" << fmt(f.px(bp)) << "\" y1=\"" << fmt(f.py(f.y0)) << "\" x2=\""
          << fmt(f.px(bp)) << "\" y2=\"" << fmt(f.py(f.y1)) << "\" stroke=\"#555555\" stroke-dasharray=\"6,4\"/>\n";
    }

    for (const auto& r : records) {
        if (!r.success || !std::isfinite(r.delta_px)) continue;
        s << "<circle class=\"run\" cx=\"" << fmt(f.px(r.value)) << "\" cy=\"" << fmt(f.py(r.delta_px))
          << "\" r=\"3\" fill=\"#d62728\" fill-opacity=\"0.8\"/>\n";
    }

    // Axes with ticks at every curve point on x and 5 steps on y.
    const double xa = f.py(f.y0), ya = f.px(f.x0);
    s << "<g class=\"axes\" stroke=\"black\" font-size=\"11\">\n"
      << "<line x1=\"" << fmt(ya) << "\" y1=\"" << fmt(xa) << "\" x2=\"" << fmt(kWidth - kRight) << "\" y2=\""
      << fmt(xa) << "\"/>\n"
      << "<line x1=\"" << fmt(ya) << "\" y1=\"" << fmt(xa) << "\" x2=\"" << fmt(ya) << "\" y2=\"" << fmt(kTop)
      << "\"/>\n";
    for (const auto& p : curve.points) {
        const double x = f.px(p.value);
        s << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(xa) << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(xa + 4)
          << "\"/><text x=\"" << fmt(x) << "\" y=\"" << fmt(xa + 16) << "\" text-anchor=\"middle\" stroke=\"none\">"
          << fmt(p.value) << "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double v = f.y0 + (f.y1 - f.y0) * i / 5.0;
        const double y = f.py(v);
        s << "<line x1=\"" << fmt(ya - 4) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(ya) << "\" y2=\"" << fmt(y)
          << "\"/><text x=\"" << fmt(ya - 6) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\" stroke=\"none\">"
          << fmt(std::round(v * 100) / 100) << "</text>\n";
    }
    s << "</g>\n"
      << "<text x=\"" << fmt((kLeft + kWidth - kRight) / 2) << "\" y=\"" << fmt(kHeight - 12)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(axis_label(curve.vary)) << "</text>\n"
      << "<text x=\"16\" y=\"" << fmt((kTop + kHeight - kBottom) / 2) << "\" text-anchor=\"middle\" font-size=\"12\""
      << " transform=\"rotate(-90 16 " << fmt((kTop + kHeight - kBottom) / 2) << ")\">position error (px)</text>\n"
      << "</svg>\n";
    return s.str();
}

}  // namespace equiloc::experiments
