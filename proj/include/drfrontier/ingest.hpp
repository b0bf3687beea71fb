/**
 * @file ingest.hpp
 * @brief CSV price/return panels and their annualization.
 *
 * Input: header `date,<asset>,...`, ISO-8601 dates, decimal cells. Empty,
 * `NA` and `NaN` cells are missing; rows with any missing cell are dropped.
 *
 * Annualization: with N calendar days between the first and last observation
 * and n_obs returns, delta = N / (365 n_obs); mu = mean / delta and
 * V = sample covariance (denominator n_obs - 1) / delta.
 */
#pragma once

#include "drfrontier/universe.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace drfrontier {

enum class PanelFormat { Prices, Returns };

struct ReturnPanel {
    std::vector<std::chrono::sys_days> dates; ///< one per return row
    std::vector<std::string> assets;
    MatrixXd returns;                         ///< n_obs x n simple (or log) returns
    long calendar_days = 0;                   ///< N
    long periods = 0;                         ///< n_obs
    std::size_t dropped_rows = 0;
};

namespace detail {

inline std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::string where(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

inline std::chrono::sys_days parse_iso_date(const std::string& s, std::size_t row) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char dash1 = 0;
    char dash2 = 0;
    std::istringstream in(s);
    if (s.size() != 10 || !(in >> y >> dash1 >> m >> dash2 >> d) || dash1 != '-' || dash2 != '-') {
        throw Error(ErrorCode::ParseError, where(row, 1) + ": bad date '" + s + "'");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) throw Error(ErrorCode::ParseError, where(row, 1) + ": invalid date '" + s + "'");
    return std::chrono::sys_days{ymd};
}

inline bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "null";
}

}  // namespace detail

inline ReturnPanel parse_panel(std::istream& in, PanelFormat format, bool log_returns = false) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::TooFewRows, "empty input");
    const auto header = detail::split_csv_line(line);
    if (header.size() < 2 || header[0] != "date") {
        throw Error(ErrorCode::ParseError, "header must be `date,<asset>,...`");
    }
    const std::size_t n = header.size() - 1;

    struct RawRow {
        std::chrono::sys_days date;
        std::vector<double> values;
        bool complete = true;
    };
    std::vector<RawRow> raw;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != n + 1) {
            throw Error(ErrorCode::ParseError, "row " + std::to_string(row_no) + ": expected " +
                                                   std::to_string(n + 1) + " cells, found " +
                                                   std::to_string(cells.size()));
        }
        RawRow r;
        r.date = detail::parse_iso_date(cells[0], row_no);
        r.values.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const std::string& c = cells[j + 1];
            if (detail::is_missing(c)) {
                r.complete = false;
                continue;
            }
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (end != c.c_str() + c.size() || !std::isfinite(v)) {
                throw Error(ErrorCode::ParseError,
                            detail::where(row_no, j + 2) + ": not a number '" + c + "'");
            }
            if (format == PanelFormat::Prices && !(v > 0.0)) {
                throw Error(ErrorCode::ParseError,
                            detail::where(row_no, j + 2) + ": prices must be positive");
            }
            r.values[j] = v;
        }
        if (!raw.empty() && !(r.date > raw.back().date)) {
            throw Error(ErrorCode::NonMonotoneDates,
                        "row " + std::to_string(row_no) + ": dates must be strictly increasing");
        }
        raw.push_back(std::move(r));
    }

    ReturnPanel p;
    p.assets.assign(header.begin() + 1, header.end());
    std::vector<const RawRow*> kept;
    for (const auto& r : raw) {
        if (r.complete) kept.push_back(&r);
        else ++p.dropped_rows;
    }

    const std::size_t first = format == PanelFormat::Prices ? 1 : 0;
    if (kept.size() < first + 2) {
        throw Error(ErrorCode::TooFewRows, "need at least 2 return observations after cleaning");
    }
    const std::size_t t_count = kept.size() - first;
    p.returns.resize(static_cast<Index>(t_count), static_cast<Index>(n));
    for (std::size_t t = 0; t < t_count; ++t) {
        const RawRow& cur = *kept[t + first];
        p.dates.push_back(cur.date);
        for (std::size_t j = 0; j < n; ++j) {
            double r = 0.0;
            if (format == PanelFormat::Prices) {
                const double ratio = cur.values[j] / kept[t]->values[j];
                r = log_returns ? std::log(ratio) : ratio - 1.0;
            } else {
                r = log_returns ? std::log1p(cur.values[j]) : cur.values[j];
            }
            p.returns(static_cast<Index>(t), static_cast<Index>(j)) = r;
        }
    }
    p.calendar_days = (kept.back()->date - kept.front()->date).count();
    p.periods = static_cast<long>(t_count);
    return p;
}

inline ReturnPanel load_panel(const std::string& path, PanelFormat format,
                              bool log_returns = false) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    return parse_panel(in, format, log_returns);
}

struct AnnualizedUniverse {
    AssetUniverse universe;
    double delta = 0.0;
    long calendar_days = 0;
    long periods = 0;
    /// Sample covariance has rank < n; the universe is then flagged singular.
    bool rank_deficient = false;
};

inline AnnualizedUniverse annualize(const ReturnPanel& panel) {
    if (panel.periods < 2) throw Error(ErrorCode::TooFewRows, "need at least 2 observations");
    if (panel.calendar_days <= 0) {
        throw Error(ErrorCode::TooFewRows, "observations span zero calendar days");
    }
    const double delta = double(panel.calendar_days) / (365.0 * double(panel.periods));
    const VectorXd mean = panel.returns.colwise().mean().transpose();
    const MatrixXd centered = panel.returns.rowwise() - mean.transpose();
    MatrixXd cov = (centered.transpose() * centered) / double(panel.periods - 1);
    cov = 0.5 * (cov + cov.transpose()).eval();

    AnnualizedUniverse out{validate_universe(cov / delta, VectorXd(mean / delta), std::nullopt,
                                             panel.assets),
                           delta, panel.calendar_days, panel.periods, false};
    out.rank_deficient = !out.universe.nonsingular();
    return out;
}

/// FNV-1a fingerprint of a file's bytes, as 16 hex digits.
inline std::string file_fingerprint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(bytes.data(), bytes.size())));
    return buf;
}

}  // namespace drfrontier
