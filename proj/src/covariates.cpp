#include "fieldwork/covariates.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fieldwork/csv.hpp"
#include "fieldwork/error.hpp"

namespace fieldwork {

const std::array<const char*, kWeatherMeasureCount>& weather_csv_columns() {
    static const std::array<const char*, kWeatherMeasureCount> cols = {
        "TX", "TN", "TG", "SQ", "SP", "RH", "RHX", "DR", "FHX", "FHN",
        "FG", "NG", "VVN", "VVX", "UX", "UN", "UG", "PX", "PN", "PG"};
    return cols;
}

const std::array<const char*, kWeatherMeasureCount>& weather_measure_names() {
    static const std::array<const char*, kWeatherMeasureCount> names = {
        "temp_max",        "temp_min",       "temp_avg",       "sun_hours",
        "sun_pct",         "precip_mm",      "precip_max_hourly_mm", "precip_hours",
        "wind_max",        "wind_min",       "wind_avg",       "cloudiness",
        "visibility_min",  "visibility_max", "humidity_max",   "humidity_min",
        "humidity_avg",    "pressure_max",   "pressure_min",   "pressure_avg"};
    return names;
}

const char* block_name(CovariateBlock b) {
    switch (b) {
        case CovariateBlock::Weather: return "weather";
        case CovariateBlock::Calendar: return "calendar";
        case CovariateBlock::Month: return "month";
        case CovariateBlock::Season: return "season";
        case CovariateBlock::Trends: return "trends";
    }
    return "?";
}

std::optional<CovariateBlock> block_from_name(const std::string& s) {
    if (s == "weather") return CovariateBlock::Weather;
    if (s == "calendar") return CovariateBlock::Calendar;
    if (s == "month") return CovariateBlock::Month;
    if (s == "season") return CovariateBlock::Season;
    if (s == "trends") return CovariateBlock::Trends;
    return std::nullopt;
}

int CovariateTable::date_index(Date d) const {
    auto it = std::lower_bound(dates.begin(), dates.end(), d);
    if (it == dates.end() || *it != d) return -1;
    return static_cast<int>(it - dates.begin());
}

void CovariateTable::merge(const CovariateTable& other) {
    if (other.names.empty()) return;
    if (names.empty()) {
        *this = other;
        return;
    }
    for (const auto& n : other.names) {
        if (std::find(names.begin(), names.end(), n) != names.end()) {
            throw ValidationError("covariate '" + n + "' appears in more than one feed");
        }
    }
    // Merged table covers the date intersection: every column must be
    // observable on every remaining date.
    std::vector<Date> common;
    std::set_intersection(dates.begin(), dates.end(), other.dates.begin(), other.dates.end(),
                          std::back_inserter(common));
    std::vector<std::vector<double>> new_values(names.size() + other.names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
        new_values[c].reserve(common.size());
        for (Date d : common) new_values[c].push_back(values[c][static_cast<std::size_t>(date_index(d))]);
    }
    for (std::size_t c = 0; c < other.names.size(); ++c) {
        auto& dst = new_values[names.size() + c];
        dst.reserve(common.size());
        for (Date d : common) {
            dst.push_back(other.values[c][static_cast<std::size_t>(other.date_index(d))]);
        }
    }
    names.insert(names.end(), other.names.begin(), other.names.end());
    blocks.insert(blocks.end(), other.blocks.begin(), other.blocks.end());
    dates = std::move(common);
    values = std::move(new_values);
}

std::vector<WeatherRecord> load_weather_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    auto c_station = t.column("station_id");
    auto c_date = t.column("date");
    std::array<std::size_t, kWeatherMeasureCount> cols{};
    for (std::size_t m = 0; m < kWeatherMeasureCount; ++m) {
        cols[m] = t.column(weather_csv_columns()[m]);
    }
    std::set<std::pair<std::string, int>> seen;
    std::vector<WeatherRecord> records;
    records.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        auto bad = [&](const std::string& what) {
            throw ValidationError(path + ":" + std::to_string(t.line_of(r)) + ": " + what);
        };
        WeatherRecord rec;
        rec.station_id = t.rows[r][c_station];
        auto d = Date::parse(t.rows[r][c_date]);
        if (!d) bad("bad ISO date '" + t.rows[r][c_date] + "'");
        rec.date = *d;
        if (!seen.insert({rec.station_id, rec.date.serial()}).second) {
            bad("duplicate record for station '" + rec.station_id + "' on " +
                rec.date.to_string());
        }
        for (std::size_t m = 0; m < kWeatherMeasureCount; ++m) {
            const std::string& f = t.rows[r][cols[m]];
            if (f.empty() || f == "NA") continue;  // missing measure
            try {
                rec.values[m] = std::stod(f);
            } catch (const std::exception&) {
                bad(std::string("bad value for ") + weather_csv_columns()[m] + ": '" + f + "'");
            }
        }
        // Family sanity: min <= avg <= max, percentages, cloudiness range.
        auto family = [&](std::size_t max_i, std::size_t min_i, std::size_t avg_i,
                          const char* label) {
            const auto& v = rec.values;
            if (v[max_i] && v[min_i] && *v[min_i] > *v[max_i]) {
                bad(std::string(label) + ": min exceeds max");
            }
            if (v[avg_i]) {
                if (v[max_i] && *v[avg_i] > *v[max_i]) bad(std::string(label) + ": avg exceeds max");
                if (v[min_i] && *v[avg_i] < *v[min_i]) bad(std::string(label) + ": avg below min");
            }
        };
        family(0, 1, 2, "temperature");
        family(8, 9, 10, "wind speed");
        family(14, 15, 16, "humidity");
        family(17, 18, 19, "air pressure");
        if (rec.values[12] && rec.values[13] && *rec.values[12] > *rec.values[13]) {
            bad("visibility: min exceeds max");
        }
        for (std::size_t m : {std::size_t{4}, std::size_t{14}, std::size_t{15}, std::size_t{16}}) {
            if (rec.values[m] && (*rec.values[m] < 0.0 || *rec.values[m] > 100.0)) {
                bad(std::string(weather_csv_columns()[m]) + " outside [0,100]");
            }
        }
        if (rec.values[11] && (*rec.values[11] < 1.0 || *rec.values[11] > 9.0)) {
            bad("cloudiness outside [1,9]");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

CovariateTable average_weather_stations(const std::vector<WeatherRecord>& records) {
    std::map<int, std::pair<std::array<double, kWeatherMeasureCount>,
                            std::array<int, kWeatherMeasureCount>>>
        acc;
    for (const auto& rec : records) {
        auto& [sums, counts] = acc[rec.date.serial()];
        for (std::size_t m = 0; m < kWeatherMeasureCount; ++m) {
            if (rec.values[m]) {
                sums[m] += *rec.values[m];
                counts[m] += 1;
            }
        }
    }
    CovariateTable table;
    for (std::size_t m = 0; m < kWeatherMeasureCount; ++m) {
        table.names.push_back(weather_measure_names()[m]);
        table.blocks.push_back(CovariateBlock::Weather);
    }
    table.values.resize(kWeatherMeasureCount);
    for (const auto& [serial, sc] : acc) {
        const auto& [sums, counts] = sc;
        for (std::size_t m = 0; m < kWeatherMeasureCount; ++m) {
            if (counts[m] == 0) {
                throw ValidationError("no station reported " +
                                      std::string(weather_measure_names()[m]) + " on " +
                                      Date(serial).to_string());
            }
        }
        table.dates.push_back(Date(serial));
        for (std::size_t m = 0; m < kWeatherMeasureCount; ++m) {
            table.values[m].push_back(sums[m] / counts[m]);
        }
    }
    return table;
}

std::vector<Date> load_holidays(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open holiday file: " + path);
    std::vector<Date> holidays;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto d = Date::parse(line);
        if (!d) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": bad ISO date '" +
                                  line + "'");
        }
        holidays.push_back(*d);
    }
    std::sort(holidays.begin(), holidays.end());
    return holidays;
}

CovariateTable derive_calendar(const std::vector<Date>& dates, const std::vector<Date>& holidays) {
    static const char* dow_names[6] = {"tuesday", "wednesday", "thursday",
                                       "friday",  "saturday",  "sunday"};
    static const char* month_names[11] = {"month_feb", "month_mar", "month_apr", "month_may",
                                          "month_jun", "month_jul", "month_aug", "month_sep",
                                          "month_oct", "month_nov", "month_dec"};
    static const char* season_names[3] = {"season_spring", "season_summer", "season_autumn"};

    std::vector<Date> sorted = dates;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    CovariateTable table;
    table.dates = sorted;
    auto add = [&](const char* name, CovariateBlock block) {
        table.names.push_back(name);
        table.blocks.push_back(block);
        table.values.emplace_back(sorted.size(), 0.0);
        return table.values.size() - 1;
    };
    std::size_t dow0 = add(dow_names[0], CovariateBlock::Calendar);
    for (int i = 1; i < 6; ++i) add(dow_names[i], CovariateBlock::Calendar);
    std::size_t hol = add("holiday", CovariateBlock::Calendar);
    std::size_t mon0 = add(month_names[0], CovariateBlock::Month);
    for (int i = 1; i < 11; ++i) add(month_names[i], CovariateBlock::Month);
    std::size_t sea0 = add(season_names[0], CovariateBlock::Season);
    for (int i = 1; i < 3; ++i) add(season_names[i], CovariateBlock::Season);

    for (std::size_t i = 0; i < sorted.size(); ++i) {
        Date d = sorted[i];
        int w = d.weekday();  // 0 = Monday (reference)
        if (w >= 1) table.values[dow0 + static_cast<std::size_t>(w - 1)][i] = 1.0;
        if (std::binary_search(holidays.begin(), holidays.end(), d)) table.values[hol][i] = 1.0;
        int m = d.month();  // 1 = January (reference)
        if (m >= 2) table.values[mon0 + static_cast<std::size_t>(m - 2)][i] = 1.0;
        // Meteorological seasons; winter (Dec-Feb) is the reference.
        int season = (m == 12 || m <= 2) ? 0 : (m <= 5 ? 1 : (m <= 8 ? 2 : 3));
        if (season >= 1) table.values[sea0 + static_cast<std::size_t>(season - 1)][i] = 1.0;
    }
    return table;
}

CovariateTable load_trends_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    auto c_date = t.column("date");
    CovariateTable table;
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (c == c_date) continue;
        table.names.push_back(t.header[c]);
        table.blocks.push_back(CovariateBlock::Trends);
        cols.push_back(c);
    }
    if (cols.empty()) throw ValidationError(path + ": no trend columns after 'date'");
    table.values.resize(cols.size());

    std::vector<std::pair<Date, std::size_t>> order;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        auto d = Date::parse(t.rows[r][c_date]);
        if (!d) {
            throw ValidationError(path + ":" + std::to_string(t.line_of(r)) + ": bad ISO date '" +
                                  t.rows[r][c_date] + "'");
        }
        order.emplace_back(*d, r);
    }
    std::sort(order.begin(), order.end());
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (order[i].first == order[i - 1].first) {
            throw ValidationError(path + ": duplicate date " + order[i].first.to_string());
        }
    }
    for (const auto& [d, r] : order) {
        table.dates.push_back(d);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const std::string& f = t.rows[r][cols[c]];
            try {
                table.values[c].push_back(std::stod(f));
            } catch (const std::exception&) {
                throw ValidationError(path + ":" + std::to_string(t.line_of(r)) +
                                      ": bad value '" + f + "'");
            }
        }
    }
    return table;
}

CovariateTable load_trend_series_csv(const std::string& path, const std::string& name) {
    CsvTable t = read_csv(path);
    auto c_date = t.column("date");
    auto c_value = t.column("value");
    CovariateTable table;
    table.names.push_back(name);
    table.blocks.push_back(CovariateBlock::Trends);
    table.values.resize(1);
    std::vector<std::pair<Date, double>> rows;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        auto d = Date::parse(t.rows[r][c_date]);
        if (!d) {
            throw ValidationError(path + ":" + std::to_string(t.line_of(r)) + ": bad ISO date '" +
                                  t.rows[r][c_date] + "'");
        }
        rows.emplace_back(*d, std::stod(t.rows[r][c_value]));
    }
    std::sort(rows.begin(), rows.end());
    for (const auto& [d, v] : rows) {
        table.dates.push_back(d);
        table.values[0].push_back(v);
    }
    return table;
}

DesignTable build_design(const PeriodLevelTable& pl, const CovariateTable& cov,
                         const std::vector<CovariateBlock>& blocks) {
    DesignTable design = baseline_design(pl);
    if (blocks.empty()) return design;

    std::vector<std::size_t> selected;
    for (std::size_t c = 0; c < cov.n_columns(); ++c) {
        if (std::find(blocks.begin(), blocks.end(), cov.blocks[c]) != blocks.end()) {
            selected.push_back(c);
        }
    }
    if (selected.empty()) {
        std::string wanted;
        for (auto b : blocks) wanted += std::string(wanted.empty() ? "" : ",") + block_name(b);
        throw ValidationError("covariate table has no columns in blocks: " + wanted);
    }

    // Join by calendar date; report every gap, not just the first.
    std::vector<int> row_date_index(design.rows());
    std::set<std::string> gaps;
    for (std::size_t i = 0; i < design.rows(); ++i) {
        int di = cov.date_index(design.date[i]);
        row_date_index[i] = di;
        if (di < 0) gaps.insert(design.date[i].to_string());
    }
    if (!gaps.empty()) {
        std::ostringstream msg;
        msg << "covariates missing for " << gaps.size() << " fieldwork date(s):";
        std::size_t shown = 0;
        for (const auto& g : gaps) {
            if (shown++ == 10) {
                msg << " ...";
                break;
            }
            msg << " " << g;
        }
        throw ValidationError(msg.str());
    }

    for (std::size_t c : selected) {
        std::vector<double> col(design.rows());
        for (std::size_t i = 0; i < design.rows(); ++i) {
            col[i] = cov.values[c][static_cast<std::size_t>(row_date_index[i])];
        }
        design.add_column(cov.names[c], std::move(col));
    }
    return design;
}

namespace {

std::pair<std::vector<std::string>, std::vector<std::string>> split_ordered(
    std::vector<std::pair<int, std::string>> first_date, int n_train, int n_test) {
    std::sort(first_date.begin(), first_date.end());
    if (n_train < 1 || n_test < 0) throw ValidationError("invalid train/test split sizes");
    if (first_date.size() < static_cast<std::size_t>(n_train + n_test)) {
        throw ValidationError("split needs " + std::to_string(n_train + n_test) +
                              " cohorts, only " + std::to_string(first_date.size()) +
                              " available");
    }
    std::pair<std::vector<std::string>, std::vector<std::string>> out;
    for (int i = 0; i < n_train; ++i) out.first.push_back(first_date[static_cast<std::size_t>(i)].second);
    for (int i = 0; i < n_test; ++i) {
        out.second.push_back(first_date[static_cast<std::size_t>(n_train + i)].second);
    }
    return out;
}

}  // namespace

std::pair<std::vector<std::string>, std::vector<std::string>> split_train_test(
    const std::vector<SurveyCase>& cases, int n_train, int n_test) {
    std::map<std::string, int> first;
    for (const auto& c : cases) {
        auto [it, inserted] = first.try_emplace(c.cohort_id, c.invitation_date.serial());
        if (!inserted) it->second = std::min(it->second, c.invitation_date.serial());
    }
    std::vector<std::pair<int, std::string>> fd;
    for (const auto& [cohort, serial] : first) fd.emplace_back(serial, cohort);
    return split_ordered(std::move(fd), n_train, n_test);
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_train_test(
    const PeriodLevelTable& pl, int n_train, int n_test) {
    std::map<std::string, int> first;
    for (const auto& r : pl) {
        auto [it, inserted] = first.try_emplace(r.cohort_id, r.calendar_date.serial());
        if (!inserted) it->second = std::min(it->second, r.calendar_date.serial());
    }
    std::vector<std::pair<int, std::string>> fd;
    for (const auto& [cohort, serial] : first) fd.emplace_back(serial, cohort);
    return split_ordered(std::move(fd), n_train, n_test);
}

PeriodLevelTable filter_cohorts(const PeriodLevelTable& pl, const std::vector<std::string>& keep) {
    std::set<std::string> wanted(keep.begin(), keep.end());
    PeriodLevelTable out;
    for (const auto& r : pl) {
        if (wanted.count(r.cohort_id)) out.push_back(r);
    }
    return out;
}

}  // namespace fieldwork
