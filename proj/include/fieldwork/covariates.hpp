#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fieldwork/design.hpp"
#include "fieldwork/survival.hpp"

namespace fieldwork {

inline constexpr std::size_t kWeatherMeasureCount = 20;

// Station CSV columns (KNMI daily mnemonics) and the matching predictor names,
// in catalog order: temperature max/min/avg, sunshine duration and percentage,
// precipitation volume / max hourly / duration, wind max/min/avg hourly,
// cloudiness, visibility min/max, humidity max/min/avg, pressure max/min/avg.
const std::array<const char*, kWeatherMeasureCount>& weather_csv_columns();
const std::array<const char*, kWeatherMeasureCount>& weather_measure_names();

struct WeatherRecord {
    std::string station_id;
    Date date;
    std::array<std::optional<double>, kWeatherMeasureCount> values;
};

enum class CovariateBlock { Weather, Calendar, Month, Season, Trends };
const char* block_name(CovariateBlock b);
std::optional<CovariateBlock> block_from_name(const std::string& s);

// Date-indexed contextual covariates. One row per date; column block tags
// drive design selection.
struct CovariateTable {
    std::vector<std::string> names;
    std::vector<CovariateBlock> blocks;
    std::vector<Date> dates;                  // sorted, unique
    std::vector<std::vector<double>> values;  // values[col][date_index]

    std::size_t n_columns() const { return names.size(); }
    int date_index(Date d) const;  // -1 if absent
    void merge(const CovariateTable& other);
};

std::vector<WeatherRecord> load_weather_csv(const std::string& path);

// Unweighted mean per measure across stations reporting that date; missing
// measures are excluded from their own mean.
CovariateTable average_weather_stations(const std::vector<WeatherRecord>& records);

std::vector<Date> load_holidays(const std::string& path);

// Day-of-week dummies (Monday reference), holiday dummy, plus month (January
// reference) and meteorological-season (winter reference) blocks.
CovariateTable derive_calendar(const std::vector<Date>& dates, const std::vector<Date>& holidays);

// Wide form: date,<name>,... — every non-date column becomes one trend series.
CovariateTable load_trends_csv(const std::string& path);
// Single calibrated series (date,value,coverage) registered under `name`.
CovariateTable load_trend_series_csv(const std::string& path, const std::string& name);

// Design assembly: baseline block (days, reminder dummies) plus the selected
// covariate blocks joined by calendar date. A fieldwork date missing from the
// covariate table is a hard error listing the gaps.
DesignTable build_design(const PeriodLevelTable& pl, const CovariateTable& cov,
                         const std::vector<CovariateBlock>& blocks);

// Cohorts ordered by first invitation (earliest fieldwork) date; the first
// n_train go to training, the next n_test to test.
std::pair<std::vector<std::string>, std::vector<std::string>> split_train_test(
    const std::vector<SurveyCase>& cases, int n_train, int n_test);
std::pair<std::vector<std::string>, std::vector<std::string>> split_train_test(
    const PeriodLevelTable& pl, int n_train, int n_test);

PeriodLevelTable filter_cohorts(const PeriodLevelTable& pl, const std::vector<std::string>& keep);

}  // namespace fieldwork
