#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fieldwork/survival.hpp"

namespace fieldwork {

// Column-major design over period-level rows. Predictor names are unique;
// the invitation phase and Monday are reference categories and never appear
// as columns. Row annotations travel along for evaluation and reporting.
struct DesignTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;  // cols[j][row]
    std::vector<double> events;
    std::vector<double> at_risk;

    std::vector<std::string> cohort;
    std::vector<Date> date;
    std::vector<Phase> phase;
    std::vector<double> days;

    std::size_t rows() const { return events.size(); }
    std::size_t n_predictors() const { return names.size(); }
    int col_index(const std::string& name) const;
    void add_column(std::string name, std::vector<double> values);
    DesignTable select_rows(const std::vector<std::size_t>& idx) const;
};

// Baseline block only: days plus reminder phase dummies.
DesignTable baseline_design(const PeriodLevelTable& pl);

// eta = intercept + sum over coefficient names; every named coefficient must
// resolve to a design column.
double linear_predictor(const Coefficients& coefs, const DesignTable& design, std::size_t row);

// DesignRow form used for spot checks: explicit (name, value) pairs.
double linear_predictor(const Coefficients& coefs,
                        const std::vector<std::pair<std::string, double>>& row);

// Binomial negative log-likelihood, sum over rows of
// -[events*log(h) + (at_risk - events)*log(1-h)], logs clamped at 1e-12.
double negative_log_likelihood(const Coefficients& coefs, const DesignTable& design);

// Same quantity from per-row hazards (shared by solver and tests).
double nll_from_hazards(const std::vector<double>& hazards, const DesignTable& design);

std::vector<double> hazards_for(const Coefficients& coefs, const DesignTable& design);

inline constexpr double kLogClampEps = 1e-12;

}  // namespace fieldwork
