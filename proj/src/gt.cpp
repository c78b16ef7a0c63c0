#include "fieldwork/gt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fieldwork/csv.hpp"
#include "fieldwork/error.hpp"

namespace fieldwork {

void validate_samples(const std::vector<GtSample>& samples, int window) {
    if (samples.empty()) throw ValidationError("no trend samples");
    if (window < 2) throw ValidationError("window must be at least 2 days");
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& g = samples[s];
        if (g.sample_index != static_cast<int>(s) + 1) {
            throw ValidationError("sample indices must be consecutive from 1; got " +
                                  std::to_string(g.sample_index) + " at position " +
                                  std::to_string(s + 1));
        }
        if (g.scores.size() != static_cast<std::size_t>(window)) {
            throw ValidationError("sample " + std::to_string(g.sample_index) + " has " +
                                  std::to_string(g.scores.size()) + " scores, expected " +
                                  std::to_string(window));
        }
        for (double v : g.scores) {
            if (!(v >= 0.0 && v <= 100.0)) {
                throw ValidationError("sample " + std::to_string(g.sample_index) +
                                      " has score outside [0,100]: " + format_double(v));
            }
        }
        if (s > 0 && g.start_date - samples[s - 1].start_date != 1) {
            throw ValidationError("sample " + std::to_string(g.sample_index) +
                                  " does not start one day after its predecessor");
        }
    }
}

double calibration_factor(const GtSample& prev, const GtSample& cur) {
    if (prev.scores.size() != cur.scores.size()) {
        throw ValidationError("window mismatch between samples " +
                              std::to_string(prev.sample_index) + " and " +
                              std::to_string(cur.sample_index));
    }
    std::size_t w = prev.scores.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < w; ++i) num += prev.scores[i];       // prev days 2..W
    for (std::size_t j = 0; j + 1 < w; ++j) den += cur.scores[j];    // cur days 1..W-1
    if (den == 0.0) {
        if (num == 0.0) return 1.0;  // dead search term on the whole overlap
        throw ValidationError("sample " + std::to_string(cur.sample_index) +
                              " has an all-zero overlap against a nonzero predecessor");
    }
    return num / den;
}

CalibrationChain build_chain(const std::vector<GtSample>& samples) {
    CalibrationChain chain;
    chain.factors.reserve(samples.size());
    chain.weights.reserve(samples.size());
    double w = 1.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        double c = s == 0 ? 1.0 : calibration_factor(samples[s - 1], samples[s]);
        if (!std::isfinite(c) || c <= 0.0) {
            throw NumericError("calibration factor for sample " + std::to_string(s + 1) +
                               " must be positive and finite, got " + format_double(c));
        }
        chain.factors.push_back(c);
        w *= c;
        chain.weights.push_back(w);
    }
    return chain;
}

CalibratedSeries averaged_series(const std::vector<GtSample>& samples,
                                 const CalibrationChain& chain, AverageMode mode) {
    if (chain.weights.size() != samples.size()) {
        throw ValidationError("calibration chain does not match sample count");
    }
    if (samples.empty()) return {};
    std::size_t w = samples[0].scores.size();
    std::size_t n_dates = samples.size() + w - 1;  // date index n = s + i - 1
    std::vector<double> sum(n_dates, 0.0);
    std::vector<int> count(n_dates, 0);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        double ws = chain.weights[s];
        for (std::size_t i = 0; i < w; ++i) {
            std::size_t n = s + i;
            sum[n] += samples[s].scores[i] * ws;
            count[n] += 1;
        }
    }
    CalibratedSeries out;
    Date t1 = samples[0].start_date;
    for (std::size_t n = 0; n < n_dates; ++n) {
        if (mode == AverageMode::Strict && count[n] != static_cast<int>(w)) continue;
        out.dates.push_back(t1 + static_cast<int>(n));
        out.values.push_back(sum[n] / (mode == AverageMode::Strict ? static_cast<double>(w)
                                                                   : static_cast<double>(count[n])));
        out.coverage.push_back(count[n]);
    }
    return out;
}

std::vector<GtSample> load_gt_samples_csv(const std::string& path, int window) {
    CsvTable t = read_csv(path);
    std::vector<GtSample> samples;

    bool wide = true;
    for (const auto& h : t.header) {
        if (h == "day_offset") wide = false;
    }

    auto parse_date = [&](std::size_t row, std::size_t col) {
        auto d = Date::parse(t.rows[row][col]);
        if (!d) {
            throw ValidationError(path + ":" + std::to_string(t.line_of(row)) +
                                  ": bad ISO date '" + t.rows[row][col] + "'");
        }
        return *d;
    };
    auto parse_score = [&](std::size_t row, const std::string& field) {
        try {
            return std::stod(field);
        } catch (const std::exception&) {
            throw ValidationError(path + ":" + std::to_string(t.line_of(row)) +
                                  ": bad score '" + field + "'");
        }
    };

    if (wide) {
        // sample_index,start_date,score_1..score_W
        auto c_idx = t.column("sample_index");
        auto c_start = t.column("start_date");
        if (t.header.size() != static_cast<std::size_t>(window) + 2) {
            throw ValidationError(path + ": wide form needs " + std::to_string(window) +
                                  " score columns, found " + std::to_string(t.header.size() - 2));
        }
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            GtSample g;
            g.sample_index = std::stoi(t.rows[r][c_idx]);
            g.start_date = parse_date(r, c_start);
            for (std::size_t c = 0; c < static_cast<std::size_t>(window); ++c) {
                g.scores.push_back(parse_score(r, t.rows[r][c + 2]));
            }
            samples.push_back(std::move(g));
        }
    } else {
        auto c_idx = t.column("sample_index");
        auto c_start = t.column("start_date");
        auto c_off = t.column("day_offset");
        auto c_score = t.column("score");
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            int idx = std::stoi(t.rows[r][c_idx]);
            int off = std::stoi(t.rows[r][c_off]);
            if (off < 1 || off > window) {
                throw ValidationError(path + ":" + std::to_string(t.line_of(r)) +
                                      ": day_offset outside [1," + std::to_string(window) + "]");
            }
            if (idx < 1) {
                throw ValidationError(path + ":" + std::to_string(t.line_of(r)) +
                                      ": sample_index must be >= 1");
            }
            if (static_cast<std::size_t>(idx) > samples.size()) {
                samples.resize(static_cast<std::size_t>(idx));
            }
            GtSample& g = samples[static_cast<std::size_t>(idx - 1)];
            if (g.scores.empty()) {
                g.sample_index = idx;
                g.start_date = parse_date(r, c_start);
                g.scores.assign(static_cast<std::size_t>(window),
                                std::numeric_limits<double>::quiet_NaN());
            }
            g.scores[static_cast<std::size_t>(off - 1)] = parse_score(r, t.rows[r][c_score]);
        }
        for (const auto& g : samples) {
            if (g.scores.empty()) {
                throw ValidationError(path + ": missing sample in consecutive index range");
            }
            for (double v : g.scores) {
                if (std::isnan(v)) {
                    throw ValidationError(path + ": sample " + std::to_string(g.sample_index) +
                                          " is missing day offsets");
                }
            }
        }
    }
    std::sort(samples.begin(), samples.end(),
              [](const GtSample& a, const GtSample& b) { return a.sample_index < b.sample_index; });
    validate_samples(samples, window);
    return samples;
}

void write_series_csv(const CalibratedSeries& series, const std::string& path) {
    CsvWriter w(path);
    w.row({"date", "value", "coverage"});
    for (std::size_t i = 0; i < series.dates.size(); ++i) {
        w.row({series.dates[i].to_string(), format_double(series.values[i]),
               std::to_string(series.coverage[i])});
    }
}

}  // namespace fieldwork
