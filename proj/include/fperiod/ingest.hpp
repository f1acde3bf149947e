#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fperiod/fdata.hpp"

namespace fperiod {

struct SmoothingSpec {
    int num_basis = 9;
    int order = 4;
};

struct IngestConfig {
    int period_d = 7;
    bool sqrt_transform = false;
    std::optional<SmoothingSpec> smoothing;
    double max_missing_fraction = 0.2;  // per day, before rejection
};

struct IngestReport {
    long days_read = 0;
    long days_kept = 0;
    long days_trimmed = 0;      // trailing days dropped to make N a multiple of d
    long values_imputed = 0;
    std::vector<std::string> rejected_days;  // labels of days over the missing cap
    std::vector<std::string> warnings;
};

struct IngestResult {
    FunctionalSample sample;
    IngestReport report;
};

// Read a CSV of daily curves.  Two layouts are accepted, both with a header
// row, '.' decimals and UTF-8:
//   long: date,slot,value with slot in 0..S-1 (detected by a 3-column header
//         whose second field is "slot");
//   wide: date,v0,v1,...,v{S-1} with one row per day.
// Empty cells, "NA" and "nan" mark missing values; gaps are linearly
// interpolated within the day (endpoints carried).  Days missing more than
// max_missing_fraction of their slots are rejected and reported.  Trailing
// days are dropped until the day count is a multiple of period_d.  Slots map
// onto the grid LinSpaced(S, 0, 1).
IngestResult ingest_csv(const std::string& path, const IngestConfig& cfg);

// Same pipeline starting from parsed rows (day label, S optional values).
IngestResult ingest_rows(const std::vector<std::string>& day_labels,
                         const std::vector<std::vector<std::optional<double>>>& rows,
                         const IngestConfig& cfg);

// Wide-format emitter; ingest(emit(sample)) round-trips bit-exactly when no
// transform or smoothing is configured.
void emit_wide_csv(const std::string& path, const FunctionalSample& sample);

}  // namespace fperiod
