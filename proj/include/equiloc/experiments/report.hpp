#pragma once

#include "equiloc/bounds/bounds.hpp"
#include "equiloc/experiments/sweep.hpp"

#include <string>
#include <vector>

namespace equiloc::experiments {

inline constexpr const char* kRecordsHeader = "vary,value,seed,delta_px,success,enc_term,dec_mean,band,within_bound";

/// Doubles are written in shortest round-trip form, so parse(emit(r)) == r.
std::string records_to_csv(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> records_from_csv(const std::string& text);
void write_records_csv(const std::string& path, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_records_csv(const std::string& path);

/// vary,value,mean,side,band1..bandN
std::string curve_to_csv(const bounds::BoundCurve& curve);

/// Scatter of successful runs over the theory line, one dashed line per
/// breakpoint and one shaded polygon per sigma band. SVG 1.1.
std::string render_svg(const std::vector<SweepRecord>& records, const bounds::BoundCurve& curve,
                       const std::string& title = {});

void write_text(const std::string& path, const std::string& text);

}  // namespace equiloc::experiments
