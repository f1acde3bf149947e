#include "fperiod/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fperiod/bspline.hpp"

namespace fperiod {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::optional<double> parse_cell(const std::string& raw, const std::string& where) {
    std::string s = raw;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty() || s == "NA" || s == "na" || s == "nan" || s == "NaN") return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::invalid_argument("ingest: unparseable number '" + raw + "' at " + where);
    return v;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Fill gaps in one day by linear interpolation; leading/trailing gaps carry
// the nearest observed value.  Returns the number of imputed slots.
long impute_day(std::vector<std::optional<double>>& day) {
    const long S = static_cast<long>(day.size());
    long imputed = 0;
    long first = -1, last = -1;
    for (long j = 0; j < S; ++j)
        if (day[j]) {
            if (first < 0) first = j;
            last = j;
        }
    for (long j = 0; j < first; ++j) {
        day[j] = *day[first];
        ++imputed;
    }
    for (long j = last + 1; j < S; ++j) {
        day[j] = *day[last];
        ++imputed;
    }
    long prev = first;
    for (long j = first + 1; j <= last; ++j) {
        if (!day[j]) continue;
        for (long k = prev + 1; k < j; ++k) {
            const double t = static_cast<double>(k - prev) / (j - prev);
            day[k] = (1.0 - t) * *day[prev] + t * *day[j];
            ++imputed;
        }
        prev = j;
    }
    return imputed;
}

}  // namespace

IngestResult ingest_rows(const std::vector<std::string>& day_labels,
                         const std::vector<std::vector<std::optional<double>>>& rows,
                         const IngestConfig& cfg) {
    if (cfg.period_d < 2) throw std::invalid_argument("ingest: period must be > 1");
    if (rows.empty()) throw std::invalid_argument("ingest: no data rows");
    const std::size_t S = rows.front().size();
    if (S < 2) throw std::invalid_argument("ingest: need at least 2 slots per day");

    IngestResult out;
    out.report.days_read = static_cast<long>(rows.size());

    std::vector<std::vector<double>> kept;
    std::vector<std::string> kept_labels;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != S)
            throw std::invalid_argument("ingest: day " + day_labels[r] + " has " +
                                        std::to_string(rows[r].size()) + " slots, expected " +
                                        std::to_string(S));
        std::vector<std::optional<double>> day = rows[r];
        const long missing =
            static_cast<long>(std::count_if(day.begin(), day.end(),
                                            [](const auto& v) { return !v.has_value(); }));
        if (missing == static_cast<long>(S) ||
            static_cast<double>(missing) > cfg.max_missing_fraction * S) {
            out.report.rejected_days.push_back(day_labels[r]);
            continue;
        }
        out.report.values_imputed += impute_day(day);
        std::vector<double> filled(S);
        for (std::size_t j = 0; j < S; ++j) filled[j] = *day[j];
        kept.push_back(std::move(filled));
        kept_labels.push_back(day_labels[r]);
    }
    if (!out.report.rejected_days.empty())
        out.report.warnings.push_back(std::to_string(out.report.rejected_days.size()) +
                                      " day(s) rejected for exceeding the missing-value cap");

    const long n_days = static_cast<long>(kept.size());
    const long keep = n_days - (n_days % cfg.period_d);
    out.report.days_trimmed = n_days - keep;
    if (out.report.days_trimmed > 0)
        out.report.warnings.push_back("trimmed " + std::to_string(out.report.days_trimmed) +
                                      " trailing day(s) to make the day count a multiple of " +
                                      std::to_string(cfg.period_d));
    if (keep < 2L * cfg.period_d)
        throw std::invalid_argument("ingest: only " + std::to_string(keep) +
                                    " usable day(s); need at least " +
                                    std::to_string(2 * cfg.period_d));
    out.report.days_kept = keep;

    Eigen::MatrixXd values(keep, static_cast<Eigen::Index>(S));
    for (long r = 0; r < keep; ++r)
        for (std::size_t j = 0; j < S; ++j) {
            double v = kept[r][j];
            if (cfg.sqrt_transform) {
                if (v < 0)
                    throw std::invalid_argument("ingest: negative value " + std::to_string(v) +
                                                " under sqrt transform on day " + kept_labels[r] +
                                                ", slot " + std::to_string(j));
                v = std::sqrt(v);
            }
            values(r, static_cast<Eigen::Index>(j)) = v;
        }

    const Eigen::VectorXd grid =
        Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(S), 0.0, 1.0);
    if (cfg.smoothing)
        values = bspline_smooth(values, grid, cfg.smoothing->num_basis, cfg.smoothing->order);
    out.sample = make_sample(values, grid);
    return out;
}

IngestResult ingest_csv(const std::string& path, const IngestConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("ingest: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("ingest: empty file '" + path + "'");
    const auto header = split_csv_line(line);
    if (header.size() < 2)
        throw std::invalid_argument("ingest: header row needs at least 2 columns");
    const bool long_form = header.size() == 3 && lower(header[1]) == "slot";

    std::vector<std::string> labels;
    std::vector<std::vector<std::optional<double>>> rows;

    if (long_form) {
        // (date, slot, value) triples; days keep their file order.
        std::map<std::string, std::size_t> day_index;
        std::vector<std::map<long, double>> slots;
        long max_slot = -1;
        long lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto f = split_csv_line(line);
            if (f.size() != 3)
                throw std::invalid_argument("ingest: line " + std::to_string(lineno) +
                                            " has " + std::to_string(f.size()) +
                                            " fields, expected 3");
            const auto slot = parse_cell(f[1], "line " + std::to_string(lineno));
            if (!slot) throw std::invalid_argument("ingest: missing slot index at line " +
                                                   std::to_string(lineno));
            const long j = static_cast<long>(*slot);
            if (j < 0 || *slot != j)
                throw std::invalid_argument("ingest: bad slot index at line " +
                                            std::to_string(lineno));
            max_slot = std::max(max_slot, j);
            auto [it, inserted] = day_index.try_emplace(f[0], labels.size());
            if (inserted) {
                labels.push_back(f[0]);
                slots.emplace_back();
            }
            const auto v = parse_cell(f[2], "line " + std::to_string(lineno));
            if (v) slots[it->second][j] = *v;
        }
        if (max_slot < 1) throw std::invalid_argument("ingest: need at least 2 slots per day");
        rows.assign(labels.size(),
                    std::vector<std::optional<double>>(static_cast<std::size_t>(max_slot + 1)));
        for (std::size_t r = 0; r < labels.size(); ++r)
            for (const auto& [j, v] : slots[r]) rows[r][static_cast<std::size_t>(j)] = v;
    } else {
        const std::size_t S = header.size() - 1;
        long lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto f = split_csv_line(line);
            if (f.size() != S + 1)
                throw std::invalid_argument("ingest: line " + std::to_string(lineno) + " has " +
                                            std::to_string(f.size()) + " fields, expected " +
                                            std::to_string(S + 1));
            labels.push_back(f[0]);
            std::vector<std::optional<double>> day(S);
            for (std::size_t j = 0; j < S; ++j)
                day[j] = parse_cell(f[j + 1], "line " + std::to_string(lineno) + ", column " +
                                                  std::to_string(j + 2));
            rows.push_back(std::move(day));
        }
    }
    return ingest_rows(labels, rows, cfg);
}

void emit_wide_csv(const std::string& path, const FunctionalSample& sample) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("emit: cannot open '" + path + "' for writing");
    out << "date";
    for (Eigen::Index j = 0; j < sample.n_grid(); ++j) out << ",v" << j;
    out << "\n";
    char buf[40];
    for (Eigen::Index t = 0; t < sample.n_curves(); ++t) {
        out << "day" << t;
        for (Eigen::Index j = 0; j < sample.n_grid(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", sample.values(t, j));
            out << ',' << buf;
        }
        out << "\n";
    }
}

}  // namespace fperiod
