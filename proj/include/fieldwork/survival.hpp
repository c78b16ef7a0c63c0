#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fieldwork/date.hpp"

namespace fieldwork {

enum class Phase { Invitation = 0, Reminder1 = 1, Reminder2 = 2 };

const char* phase_name(Phase p);
std::optional<Phase> phase_from_name(const std::string& s);

// One sampled person in one data collection period. A case becomes at risk
// on the expected delivery date of the invitation letter and leaves the risk
// set on its response date, or is censored at end_date (inclusive).
struct SurveyCase {
    std::string case_id;
    std::string cohort_id;
    Date invitation_date;
    std::optional<Date> reminder1_date;
    std::optional<Date> reminder2_date;
    Date end_date;
    std::optional<Date> response_date;
};

struct PersonPeriodRow {
    std::string case_id;
    std::string cohort_id;
    Date calendar_date;
    Phase phase = Phase::Invitation;
    int s = 1;           // period index within the current phase, restarts at 1
    double days = 1.0;   // days since the previous letter; equals s
    int event = 0;
};
using PersonPeriodTable = std::vector<PersonPeriodRow>;

struct PeriodLevelRow {
    std::string cohort_id;
    Date calendar_date;
    Phase phase = Phase::Invitation;
    double days = 1.0;
    long events = 0;
    long at_risk = 0;
};
using PeriodLevelTable = std::vector<PeriodLevelRow>;

struct ExpandOptions {
    // Responses dated before the invitation are validation errors unless this
    // is set, in which case they are clamped to day 1 of the invitation phase.
    bool clamp_early_response = false;
};

void validate_case(const SurveyCase& c, const ExpandOptions& opts = {});
PersonPeriodTable expand_person_period(const std::vector<SurveyCase>& cases,
                                       const ExpandOptions& opts = {});

// Groups by (cohort, date, days, phase). Output sorted by that key.
PeriodLevelTable collapse_period_level(const PersonPeriodTable& pp);

// Logistic link, overflow-safe; result is strictly inside (0, 1).
double hazard_from_eta(double eta);

// Named coefficient vector over design predictors plus an intercept.
struct Coefficients {
    double intercept = 0.0;
    std::vector<std::string> names;
    std::vector<double> values;

    std::size_t size() const { return names.size(); }
    const double* find(const std::string& name) const;
    void set(const std::string& name, double value);
};

// Case CSV schema: case_id,cohort_id,invitation_date,reminder1_date,
// reminder2_date,end_date,response_date. ISO dates, empty field = absent.
std::vector<SurveyCase> load_cases_csv(const std::string& path);
void write_person_period_csv(const PersonPeriodTable& pp, const std::string& path);
void write_period_level_csv(const PeriodLevelTable& pl, const std::string& path);
PeriodLevelTable load_period_level_csv(const std::string& path);

}  // namespace fieldwork
