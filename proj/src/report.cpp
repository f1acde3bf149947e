#include "fperiod/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fperiod {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("report: cannot open '" + path + "' for writing");
    return out;
}

const char* kTableColumns[] = {"MEV1", "MTR1", "MEV2", "MTR2", "FTR1", "FTR2"};

}  // namespace

void write_pvalue_table(const std::string& path, const std::vector<SuiteRow>& rows) {
    auto out = open_out(path);
    out << "row";
    for (const char* c : kTableColumns) out << ',' << c;
    out << ",explained_variance\n";
    for (const auto& row : rows) {
        out << row.label;
        for (const char* c : kTableColumns) {
            const auto it = row.results.find(c);
            out << ',' << (it != row.results.end() ? format_number(it->second.p_value) : "NA");
        }
        out << ',' << format_number(row.explained_variance) << "\n";
    }
}

void Diagnostics::put(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}
void Diagnostics::put(const std::string& key, double value) {
    entries_.emplace_back(key, format_number(value));
}
void Diagnostics::put(const std::string& key, long value) {
    entries_.emplace_back(key, std::to_string(value));
}

void Diagnostics::write(const std::string& path) const {
    auto out = open_out(path);
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
}

void describe_suite(Diagnostics& diag, const std::vector<SuiteRow>& rows) {
    for (const auto& row : rows) {
        const std::string prefix = "suite." + row.label;
        if (!row.ok) diag.put(prefix + ".error", row.error);
        diag.put(prefix + ".explained_variance", row.explained_variance);
        for (const auto& [id, r] : row.results) {
            const std::string key = prefix + "." + id;
            diag.put(key + ".statistic", r.statistic);
            diag.put(key + ".critical_value", r.critical_value);
            diag.put(key + ".p_value", r.p_value);
            if (r.mc_se > 0) diag.put(key + ".mc_se", r.mc_se);
            if (r.dof_used > 0) diag.put(key + ".dof", r.dof_used);
            if (r.floored_modes > 0)
                diag.put(key + ".floored_modes", static_cast<long>(r.floored_modes));
            if (!r.rates_used.empty()) {
                std::string rates;
                for (double l : r.rates_used) {
                    if (!rates.empty()) rates += ' ';
                    rates += format_number(l);
                }
                diag.put(key + ".rates", rates);
            }
        }
    }
}

void write_weekday_means(const std::string& path, const GroupMeans& means,
                         const Eigen::VectorXd& grid) {
    auto out = open_out(path);
    out << "u,grand_mean";
    for (Eigen::Index k = 0; k < means.wk_means.rows(); ++k) out << ",w" << (k + 1);
    out << "\n";
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        out << format_number(grid[g]) << ',' << format_number(means.grand_mean[g]);
        for (Eigen::Index k = 0; k < means.wk_means.rows(); ++k)
            out << ',' << format_number(means.wk_means(k, g));
        out << "\n";
    }
}

void write_rates(const std::string& path, const std::vector<std::string>& labels,
                 const std::vector<RateEstimate>& rates, long reps) {
    if (labels.size() != rates.size())
        throw std::invalid_argument("write_rates: label/rate count mismatch");
    auto out = open_out(path);
    out << "test,rate,std_error,failures,reps\n";
    for (std::size_t i = 0; i < rates.size(); ++i)
        out << labels[i] << ',' << format_number(rates[i].rate) << ','
            << format_number(rates[i].std_error) << ',' << rates[i].failures << ',' << reps
            << "\n";
}

void write_power_curve(const std::string& path, const PowerCurve& curve) {
    auto out = open_out(path);
    out << "x";
    for (const auto& t : curve.tests) out << ',' << t.name();
    out << "\n";
    for (std::size_t xi = 0; xi < curve.xs.size(); ++xi) {
        out << format_number(curve.xs[xi]);
        for (std::size_t j = 0; j < curve.tests.size(); ++j)
            out << ',' << format_number(curve.rates[j][xi]);
        out << "\n";
    }
}

}  // namespace fperiod
