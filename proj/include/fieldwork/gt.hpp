#pragma once

#include <string>
#include <vector>

#include "fieldwork/date.hpp"

namespace fieldwork {

// One fixed-window trend-index sample of W consecutive daily scores, each
// sample internally rescaled to [0, 100] and starting one day after the
// previous one.
struct GtSample {
    int sample_index = 0;  // 1-based
    Date start_date;
    std::vector<double> scores;  // length W
};

struct CalibrationChain {
    std::vector<double> factors;  // C_1 = 1
    std::vector<double> weights;  // w_s = prod_{k<=s} C_k
};

struct CalibratedSeries {
    std::vector<Date> dates;
    std::vector<double> values;
    std::vector<int> coverage;  // number of samples contributing to each date
};

void validate_samples(const std::vector<GtSample>& samples, int window);

// Ratio of overlap sums: sum of prev scores over days 2..W divided by the
// sum of cur scores over days 1..W-1. Both sums zero -> 1.0 (dead term);
// zero denominator alone is an error.
double calibration_factor(const GtSample& prev, const GtSample& cur);

CalibrationChain build_chain(const std::vector<GtSample>& samples);

enum class AverageMode { Strict, Partial };

// Strict mode: only dates covered by all W offsets, divisor W.
// Partial mode: every covered date, divisor = coverage count.
CalibratedSeries averaged_series(const std::vector<GtSample>& samples,
                                 const CalibrationChain& chain,
                                 AverageMode mode = AverageMode::Strict);

// Long form: sample_index,start_date,day_offset,score (day_offset 1-based), or
// wide form: sample_index,start_date,score_1..score_W. Detected by header.
std::vector<GtSample> load_gt_samples_csv(const std::string& path, int window);
void write_series_csv(const CalibratedSeries& series, const std::string& path);

}  // namespace fieldwork
