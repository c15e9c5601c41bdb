// SPDX-License-Identifier: Apache-2.0
#pragma once

// Byte-stable CSV and SVG emission with write-then-rename semantics.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "iop/core.hpp"

namespace iop::cli {

// Shortest representation that round-trips.
inline std::string fmt_num(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{})
        return "nan";
    return std::string(buf, end);
}

inline std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + '"';
}

inline std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4)
        s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    return s;
}

class CsvWriter {
public:
    CsvWriter(std::string comment_header, std::vector<std::string> columns)
    {
        out_ << comment_header << "\r\n";
        row_strings(columns);
    }

    void row_strings(const std::vector<std::string>& fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i)
            out_ << (i ? "," : "") << csv_field(fields[i]);
        out_ << "\r\n";
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

// Writes `<path>.tmp` and renames over `path`; no partial file is left behind.
inline void write_atomically(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw ConfigError("cannot write '" + tmp.string() + "'");
        f << content;
        f.flush();
        if (!f) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw ConfigError("write failed for '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

// Minimal line plot; no axes beyond a frame and min/max tick labels.
inline std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                            const std::vector<Series>& series, bool log_y = false)
{
    double x0 = HUGE_VAL, x1 = -HUGE_VAL, y0 = HUGE_VAL, y1 = -HUGE_VAL;
    auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, ty(y));
            y1 = std::max(y1, ty(y));
        }
    if (!(x1 > x0))
        x1 = x0 + 1.0;
    if (!(y1 > y0))
        y1 = y0 + 1.0;
    constexpr double W = 640, H = 420, L = 70, R = 170, T = 40, B = 50;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };
    static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                             "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << L << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
    o << "<text x=\"" << L << "\" y=\"" << H - 12 << "\" font-size=\"12\">" << x_label << " [" << fmt_num(x0)
      << " .. " << fmt_num(x1) << "]</text>\n";
    o << "<text x=\"4\" y=\"" << T - 6 << "\" font-size=\"12\">" << y_label << (log_y ? " (log10)" : "") << " ["
      << fmt_num(y0) << " .. " << fmt_num(y1) << "]</text>\n";
    std::size_t ci = 0;
    for (const auto& s : series) {
        const char* color = colors[ci % std::size(colors)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (auto [x, y] : s.points)
            o << fmt_num(px(x)) << ',' << fmt_num(py(y)) << ' ';
        o << "\"/>\n";
        o << "<text x=\"" << W - R + 8 << "\" y=\"" << T + 14 + 16 * ci << "\" font-size=\"11\" fill=\"" << color
          << "\">" << s.label << "</text>\n";
        ++ci;
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace iop::cli
