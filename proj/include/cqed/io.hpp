#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqed/errors.hpp"

namespace cqed {

using json = nlohmann::json;

/// A rectangular table destined for a CSV file: one header row, numeric
/// columns, LF endings, '.' decimal separator, shortest round-trip doubles.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::initializer_list<double> vals) {
        rows.emplace_back(vals);
    }
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Writes content to path atomically: temp file in the same directory, then
/// rename. Never leaves a partial file behind on failure.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), errc::io_error, "cannot open " + tmp.string());
        out << content;
        out.flush();
        require(out.good(), errc::io_error, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        fail(errc::io_error, "rename failed for " + path.string() + ": " + ec.message());
    }
}

inline void write_csv(const std::filesystem::path& path, const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        require(row.size() == table.columns.size(), errc::io_error,
                "CSV row width mismatch");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

inline void write_json(const std::filesystem::path& path, const json& doc) {
    write_file_atomic(path, doc.dump(2) + "\n");
}

/// Minimal line-plot SVG for quick inspection; purely decorative output,
/// every check consumes the CSV.
inline void write_svg_plot(const std::filesystem::path& path, const Table& table,
                           std::size_t x_col, std::size_t y_col, bool log_y) {
    require(x_col < table.columns.size() && y_col < table.columns.size(),
            errc::io_error, "SVG column out of range");
    const int w = 720, h = 480, m = 56;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto yval = [&](double v) { return log_y ? std::log10(std::max(v, 1e-12)) : v; };
    for (const auto& row : table.rows) {
        xmin = std::min(xmin, row[x_col]);
        xmax = std::max(xmax, row[x_col]);
        ymin = std::min(ymin, yval(row[y_col]));
        ymax = std::max(ymax, yval(row[y_col]));
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    std::string svg =
        "<svg xmlns='http://www.w3.org/2000/svg' width='" + std::to_string(w) +
        "' height='" + std::to_string(h) + "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    svg += "<polyline fill='none' stroke='#1f77b4' stroke-width='1.5' points='";
    for (const auto& row : table.rows) {
        const double px = m + (row[x_col] - xmin) / (xmax - xmin) * (w - 2 * m);
        const double py = h - m - (yval(row[y_col]) - ymin) / (ymax - ymin) * (h - 2 * m);
        svg += format_double(px) + "," + format_double(py) + " ";
    }
    svg += "'/>\n";
    svg += "<text x='" + std::to_string(w / 2) + "' y='" + std::to_string(h - 12) +
           "' text-anchor='middle' font-size='13'>" + table.columns[x_col] + "</text>\n";
    svg += "<text x='16' y='" + std::to_string(h / 2) +
           "' font-size='13' transform='rotate(-90 16 " + std::to_string(h / 2) +
           ")' text-anchor='middle'>" + table.columns[y_col] +
           (log_y ? " (log10)" : "") + "</text>\n</svg>\n";
    write_file_atomic(path, svg);
}

/// Exclusive ownership of an output directory for the lifetime of the
/// object, via an O_EXCL-style lock file.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& dir)
        : lock_path_(dir / ".cqedsim.lock") {
        std::filesystem::create_directories(dir);
        std::FILE* f = std::fopen(lock_path_.c_str(), "wx");
        require(f != nullptr, errc::io_error,
                "output directory is locked by another run (" +
                    lock_path_.string() + " exists)");
        std::fclose(f);
    }
    ~DirectoryLock() {
        std::error_code ec;
        std::filesystem::remove(lock_path_, ec);
    }
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    std::filesystem::path lock_path_;
};

} // namespace cqed
