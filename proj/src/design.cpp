#include "fieldwork/design.hpp"

#include <cmath>

#include "fieldwork/error.hpp"

namespace fieldwork {

int DesignTable::col_index(const std::string& name) const {
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j] == name) return static_cast<int>(j);
    }
    return -1;
}

void DesignTable::add_column(std::string name, std::vector<double> values) {
    if (col_index(name) >= 0) throw ValidationError("duplicate predictor name '" + name + "'");
    if (values.size() != rows()) {
        throw ValidationError("column '" + name + "' has " + std::to_string(values.size()) +
                              " rows, table has " + std::to_string(rows()));
    }
    names.push_back(std::move(name));
    cols.push_back(std::move(values));
}

DesignTable DesignTable::select_rows(const std::vector<std::size_t>& idx) const {
    DesignTable out;
    out.names = names;
    out.cols.resize(cols.size());
    auto pick = [&](const auto& src, auto& dst) {
        dst.reserve(idx.size());
        for (auto i : idx) dst.push_back(src[i]);
    };
    for (std::size_t j = 0; j < cols.size(); ++j) pick(cols[j], out.cols[j]);
    pick(events, out.events);
    pick(at_risk, out.at_risk);
    pick(cohort, out.cohort);
    pick(date, out.date);
    pick(phase, out.phase);
    pick(days, out.days);
    return out;
}

DesignTable baseline_design(const PeriodLevelTable& pl) {
    DesignTable d;
    std::size_t n = pl.size();
    std::vector<double> days_col(n), r1(n), r2(n);
    d.events.resize(n);
    d.at_risk.resize(n);
    d.cohort.resize(n);
    d.date.resize(n);
    d.phase.resize(n);
    d.days.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = pl[i];
        days_col[i] = r.days;
        r1[i] = r.phase == Phase::Reminder1 ? 1.0 : 0.0;
        r2[i] = r.phase == Phase::Reminder2 ? 1.0 : 0.0;
        d.events[i] = static_cast<double>(r.events);
        d.at_risk[i] = static_cast<double>(r.at_risk);
        d.cohort[i] = r.cohort_id;
        d.date[i] = r.calendar_date;
        d.phase[i] = r.phase;
        d.days[i] = r.days;
    }
    d.add_column("days", std::move(days_col));
    d.add_column("reminder1", std::move(r1));
    d.add_column("reminder2", std::move(r2));
    return d;
}

double linear_predictor(const Coefficients& coefs, const DesignTable& design, std::size_t row) {
    double eta = coefs.intercept;
    for (std::size_t k = 0; k < coefs.names.size(); ++k) {
        int j = design.col_index(coefs.names[k]);
        if (j < 0) {
            throw ValidationError("coefficient '" + coefs.names[k] +
                                  "' has no matching design column");
        }
        eta += coefs.values[k] * design.cols[static_cast<std::size_t>(j)][row];
    }
    return eta;
}

double linear_predictor(const Coefficients& coefs,
                        const std::vector<std::pair<std::string, double>>& row) {
    double eta = coefs.intercept;
    for (std::size_t k = 0; k < coefs.names.size(); ++k) {
        bool found = false;
        for (const auto& [name, value] : row) {
            if (name == coefs.names[k]) {
                eta += coefs.values[k] * value;
                found = true;
                break;
            }
        }
        if (!found) {
            throw ValidationError("coefficient '" + coefs.names[k] +
                                  "' has no matching predictor in row");
        }
    }
    return eta;
}

std::vector<double> hazards_for(const Coefficients& coefs, const DesignTable& design) {
    // Resolve columns once; per-row name lookup would dominate otherwise.
    std::vector<const std::vector<double>*> columns(coefs.names.size());
    for (std::size_t k = 0; k < coefs.names.size(); ++k) {
        int j = design.col_index(coefs.names[k]);
        if (j < 0) {
            throw ValidationError("coefficient '" + coefs.names[k] +
                                  "' has no matching design column");
        }
        columns[k] = &design.cols[static_cast<std::size_t>(j)];
    }
    std::vector<double> h(design.rows());
    for (std::size_t i = 0; i < design.rows(); ++i) {
        double eta = coefs.intercept;
        for (std::size_t k = 0; k < columns.size(); ++k) {
            eta += coefs.values[k] * (*columns[k])[i];
        }
        h[i] = hazard_from_eta(eta);
    }
    return h;
}

double nll_from_hazards(const std::vector<double>& hazards, const DesignTable& design) {
    double nll = 0.0;
    for (std::size_t i = 0; i < design.rows(); ++i) {
        double h = hazards[i];
        double logh = std::log(std::max(h, kLogClampEps));
        double log1mh = std::log(std::max(1.0 - h, kLogClampEps));
        nll -= design.events[i] * logh + (design.at_risk[i] - design.events[i]) * log1mh;
    }
    return nll;
}

double negative_log_likelihood(const Coefficients& coefs, const DesignTable& design) {
    return nll_from_hazards(hazards_for(coefs, design), design);
}

}  // namespace fieldwork
