#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fperiod/ptest.hpp"
#include "fperiod/sim.hpp"

namespace fperiod {

// Deterministic number formatting shared by every writer, so identical runs
// produce byte-identical files.
std::string format_number(double v);

// p-value table: one row per suite entry (FF, then the projection levels),
// fixed column order MEV1,MTR1,MEV2,MTR2,FTR1,FTR2 plus explained variance.
// Cells without a result are NA; reasons go to the diagnostics file.
void write_pvalue_table(const std::string& path, const std::vector<SuiteRow>& rows);

// Flat key-value diagnostics ("key = value" lines, insertion order kept).
class Diagnostics {
  public:
    void put(const std::string& key, const std::string& value);
    void put(const std::string& key, double value);
    void put(const std::string& key, long value);
    void write(const std::string& path) const;

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// Diagnostics entries for one suite: per-test errors, rates, MC s.e., dof.
void describe_suite(Diagnostics& diag, const std::vector<SuiteRow>& rows);

// Plot data: weekday mean curves, one row per grid point.
void write_weekday_means(const std::string& path, const GroupMeans& means,
                         const Eigen::VectorXd& grid);

// Size/power table: one row per test with rate, s.e. and failure count.
void write_rates(const std::string& path, const std::vector<std::string>& labels,
                 const std::vector<RateEstimate>& rates, long reps);

// Local-power curves: one row per x, one column per test.
void write_power_curve(const std::string& path, const PowerCurve& curve);

}  // namespace fperiod
