#include "fieldwork/survival.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "fieldwork/csv.hpp"
#include "fieldwork/error.hpp"

namespace fieldwork {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Invitation: return "invitation";
        case Phase::Reminder1: return "reminder1";
        case Phase::Reminder2: return "reminder2";
    }
    return "?";
}

std::optional<Phase> phase_from_name(const std::string& s) {
    if (s == "invitation") return Phase::Invitation;
    if (s == "reminder1") return Phase::Reminder1;
    if (s == "reminder2") return Phase::Reminder2;
    return std::nullopt;
}

void validate_case(const SurveyCase& c, const ExpandOptions& opts) {
    auto fail = [&](const std::string& what) {
        throw ValidationError("case '" + c.case_id + "': " + what);
    };
    if (c.case_id.empty()) throw ValidationError("case with empty case_id");
    if (c.cohort_id.empty()) fail("empty cohort_id");
    if (c.end_date < c.invitation_date) fail("end_date precedes invitation_date");
    Date prev = c.invitation_date;
    if (c.reminder1_date) {
        if (*c.reminder1_date < prev) fail("reminder1_date precedes invitation_date");
        prev = *c.reminder1_date;
    }
    if (c.reminder2_date) {
        if (!c.reminder1_date) fail("reminder2_date present without reminder1_date");
        if (*c.reminder2_date < prev) fail("reminder2_date precedes reminder1_date");
        prev = *c.reminder2_date;
    }
    if (prev > c.end_date) fail("letter date after end_date");
    if (c.response_date) {
        if (*c.response_date < c.invitation_date && !opts.clamp_early_response) {
            fail("response_date precedes invitation_date (" + c.response_date->to_string() +
                 " < " + c.invitation_date.to_string() + ")");
        }
        if (*c.response_date > c.end_date) fail("response_date after end_date");
    }
}

PersonPeriodTable expand_person_period(const std::vector<SurveyCase>& cases,
                                       const ExpandOptions& opts) {
    std::set<std::string> seen;
    PersonPeriodTable out;
    for (const auto& c : cases) {
        validate_case(c, opts);
        if (!seen.insert(c.case_id).second) {
            throw ValidationError("duplicate case_id '" + c.case_id + "'");
        }
        Date response = c.response_date.value_or(c.end_date);
        if (c.response_date && *c.response_date < c.invitation_date) {
            response = c.invitation_date;  // clamp-to-day-1 mode
        }
        Date last = c.response_date ? std::min(response, c.end_date) : c.end_date;

        Phase phase = Phase::Invitation;
        Date phase_start = c.invitation_date;
        for (Date d = c.invitation_date; d <= last; ++d) {
            // A letter expected today moves the case into the new phase and
            // restarts the period clock at 1.
            if (c.reminder2_date && d >= *c.reminder2_date && phase != Phase::Reminder2) {
                phase = Phase::Reminder2;
                phase_start = *c.reminder2_date;
            } else if (c.reminder1_date && d >= *c.reminder1_date &&
                       phase == Phase::Invitation) {
                phase = Phase::Reminder1;
                phase_start = *c.reminder1_date;
            }
            PersonPeriodRow row;
            row.case_id = c.case_id;
            row.cohort_id = c.cohort_id;
            row.calendar_date = d;
            row.phase = phase;
            row.s = d - phase_start + 1;
            row.days = static_cast<double>(row.s);
            row.event = (c.response_date && d == last) ? 1 : 0;
            out.push_back(std::move(row));
        }
    }
    return out;
}

PeriodLevelTable collapse_period_level(const PersonPeriodTable& pp) {
    using Key = std::tuple<std::string, int, double, int>;  // cohort, date, days, phase
    std::map<Key, std::pair<long, long>> groups;            // -> (events, at_risk)
    for (const auto& row : pp) {
        Key k{row.cohort_id, row.calendar_date.serial(), row.days, static_cast<int>(row.phase)};
        auto& g = groups[k];
        g.first += row.event;
        g.second += 1;
    }
    PeriodLevelTable out;
    out.reserve(groups.size());
    for (const auto& [k, g] : groups) {
        PeriodLevelRow r;
        r.cohort_id = std::get<0>(k);
        r.calendar_date = Date(std::get<1>(k));
        r.days = std::get<2>(k);
        r.phase = static_cast<Phase>(std::get<3>(k));
        r.events = g.first;
        r.at_risk = g.second;
        out.push_back(std::move(r));
    }
    return out;
}

double hazard_from_eta(double eta) {
    if (eta >= 0.0) {
        return 1.0 / (1.0 + std::exp(-eta));
    }
    double e = std::exp(eta);
    return e / (1.0 + e);
}

const double* Coefficients::find(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return &values[i];
    }
    return nullptr;
}

void Coefficients::set(const std::string& name, double value) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            values[i] = value;
            return;
        }
    }
    names.push_back(name);
    values.push_back(value);
}

std::vector<SurveyCase> load_cases_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    auto c_case = t.column("case_id");
    auto c_cohort = t.column("cohort_id");
    auto c_inv = t.column("invitation_date");
    auto c_r1 = t.column("reminder1_date");
    auto c_r2 = t.column("reminder2_date");
    auto c_end = t.column("end_date");
    auto c_resp = t.column("response_date");

    auto date_at = [&](std::size_t row, std::size_t col, bool required) -> std::optional<Date> {
        const std::string& f = t.rows[row][col];
        if (f.empty()) {
            if (required) {
                throw ValidationError(path + ":" + std::to_string(t.line_of(row)) +
                                      ": missing required date in column '" + t.header[col] + "'");
            }
            return std::nullopt;
        }
        auto d = Date::parse(f);
        if (!d) {
            throw ValidationError(path + ":" + std::to_string(t.line_of(row)) +
                                  ": bad ISO date '" + f + "'");
        }
        return d;
    };

    std::vector<SurveyCase> cases;
    cases.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        SurveyCase c;
        c.case_id = t.rows[i][c_case];
        c.cohort_id = t.rows[i][c_cohort];
        c.invitation_date = *date_at(i, c_inv, true);
        c.reminder1_date = date_at(i, c_r1, false);
        c.reminder2_date = date_at(i, c_r2, false);
        c.end_date = *date_at(i, c_end, true);
        c.response_date = date_at(i, c_resp, false);
        cases.push_back(std::move(c));
    }
    return cases;
}

void write_person_period_csv(const PersonPeriodTable& pp, const std::string& path) {
    CsvWriter w(path);
    w.row({"case_id", "cohort_id", "calendar_date", "phase", "s", "days", "event"});
    for (const auto& r : pp) {
        w.row({r.case_id, r.cohort_id, r.calendar_date.to_string(), phase_name(r.phase),
               std::to_string(r.s), format_double(r.days), std::to_string(r.event)});
    }
}

void write_period_level_csv(const PeriodLevelTable& pl, const std::string& path) {
    CsvWriter w(path);
    w.row({"cohort_id", "calendar_date", "phase", "days", "events", "at_risk"});
    for (const auto& r : pl) {
        w.row({r.cohort_id, r.calendar_date.to_string(), phase_name(r.phase),
               format_double(r.days), std::to_string(r.events), std::to_string(r.at_risk)});
    }
}

PeriodLevelTable load_period_level_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    auto c_cohort = t.column("cohort_id");
    auto c_date = t.column("calendar_date");
    auto c_phase = t.column("phase");
    auto c_days = t.column("days");
    auto c_events = t.column("events");
    auto c_risk = t.column("at_risk");
    PeriodLevelTable out;
    out.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        auto bad = [&](const std::string& what) {
            throw ValidationError(path + ":" + std::to_string(t.line_of(i)) + ": " + what);
        };
        PeriodLevelRow r;
        r.cohort_id = t.rows[i][c_cohort];
        auto d = Date::parse(t.rows[i][c_date]);
        if (!d) bad("bad ISO date '" + t.rows[i][c_date] + "'");
        r.calendar_date = *d;
        auto ph = phase_from_name(t.rows[i][c_phase]);
        if (!ph) bad("unknown phase '" + t.rows[i][c_phase] + "'");
        r.phase = *ph;
        try {
            r.days = std::stod(t.rows[i][c_days]);
            r.events = std::stol(t.rows[i][c_events]);
            r.at_risk = std::stol(t.rows[i][c_risk]);
        } catch (const std::exception&) {
            bad("malformed numeric field");
        }
        if (r.at_risk <= 0) bad("at_risk must be positive");
        if (r.events < 0 || r.events > r.at_risk) bad("events outside [0, at_risk]");
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace fieldwork
