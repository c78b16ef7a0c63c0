#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fieldwork/design.hpp"

namespace fieldwork {

// Per-predictor location/scale computed on training data, weighted by at_risk
// counts so the statistics match the person-period expansion. Dummies are
// standardized like continuous predictors.
struct StandardizationParams {
    std::vector<std::string> names;
    std::vector<double> mean;
    std::vector<double> sd;
    std::vector<std::string> dropped;  // constant columns, recorded not kept

    int index_of(const std::string& name) const;
};

std::pair<DesignTable, StandardizationParams> standardize(const DesignTable& design);
DesignTable apply_standardization(const DesignTable& design, const StandardizationParams& params);
// Maps standardized-scale coefficients back to the raw predictor scale.
Coefficients destandardize(const Coefficients& coefs, const StandardizationParams& params);

enum class PenaltyKind { None, Ridge, Lasso, AdaptiveLasso };
const char* penalty_name(PenaltyKind k);
std::optional<PenaltyKind> penalty_from_name(const std::string& s);

struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::Lasso;
    double lambda = 0.0;
    // Per-predictor weights aligned with the design; empty means all 1.
    // The intercept is never penalized.
    std::vector<double> weights;

    double weight(std::size_t j) const { return weights.empty() ? 1.0 : weights[j]; }
};

inline constexpr double kAdaptiveWeightCap = 1e8;

struct FitOptions {
    double kkt_tol = 1e-7;
    int max_outer = 500;
    int max_inner = 5000;
    // Box bound on standardized coefficients; keeps separated fits finite.
    double coef_bound = 40.0;
};

struct PathPoint {
    double lambda = 0.0;
    Coefficients coefs;
    double nll = 0.0;
    double objective = 0.0;     // nll + penalty term
    double kkt_residual = 0.0;  // max stationarity violation at the solution
    int outer_iterations = 0;
};

// NLL + lambda * sum_j w_j |g_j| (lasso/adaptive), NLL + lambda * sum g_j^2
// (ridge), or plain NLL (none). NLL is the clamped-log binomial form.
double penalized_objective(const DesignTable& design, const Coefficients& coefs,
                           const PenaltySpec& penalty, double lambda);

// Smallest lambda with empty support: max_j |score_j| / w_j at the
// intercept-only fit.
double lasso_lambda_max(const DesignTable& std_design, const PenaltySpec& penalty);
std::vector<double> log_spaced_path(double lambda_max, int count, double min_ratio);

// Cyclic coordinate descent on the IRLS quadratic, warm-started along a
// descending lambda path. Throws NumericError on non-convergence.
std::vector<PathPoint> fit_penalized(const DesignTable& std_design, const PenaltySpec& penalty,
                                     const std::vector<double>& lambda_path,
                                     const FitOptions& opts = {});

struct CvResult {
    std::vector<double> lambdas;                     // strictly decreasing
    std::vector<double> mean_deviance;               // per lambda
    std::vector<std::vector<double>> fold_deviance;  // [lambda][fold]
    std::size_t chosen_index = 0;
    double chosen_lambda = 0.0;
    int k = 0;
    std::uint64_t seed = 0;

    bool empty() const { return lambdas.empty(); }
};

// Held-out binomial deviance per lambda, rows partitioned into k near-equal
// random folds by seed. Ties break toward larger lambda.
CvResult cross_validate(const DesignTable& std_design, const PenaltySpec& penalty,
                        const std::vector<double>& lambda_path, int k, std::uint64_t seed,
                        int threads = 0, const FitOptions& opts = {});

// w_j = 1/|ridge_j| capped at kAdaptiveWeightCap, aligned with design order.
std::vector<double> adaptive_weights(const Coefficients& ridge_coefs,
                                     const std::vector<std::string>& design_names);

// Interaction block: products of baseline predictors (days, reminder1,
// reminder2) with every contextual predictor, computed on the standardized
// design and re-standardized. Constant products are dropped.
struct InteractionExpansion {
    std::vector<std::pair<std::string, std::string>> pairs;  // (base, contextual)
    StandardizationParams params;

    bool empty() const { return pairs.empty(); }
};
DesignTable build_interactions(const DesignTable& std_design, InteractionExpansion& info);
DesignTable apply_interactions(const DesignTable& std_design, const InteractionExpansion& info);

struct FitConfig {
    PenaltyKind penalty = PenaltyKind::AdaptiveLasso;
    int k_folds = 10;
    std::uint64_t seed = 1;
    int lambda_count = 100;
    double lambda_min_ratio = 1e-4;
    bool interactions = false;
    int threads = 0;
    std::optional<double> fixed_lambda;  // skip CV for the final stage
    FitOptions solver;
};

struct FittedModel {
    std::string kind = "custom";  // reporting label: baseline/full/interaction/custom
    StandardizationParams standardization;
    InteractionExpansion interactions;
    PenaltySpec penalty;          // resolved lambda and weights
    Coefficients coefficients;    // standardized scale, final design order
    CvResult cv;                  // final-stage trace (empty when lambda fixed / none)
    CvResult ridge_cv;            // adaptive pre-fit trace
    std::vector<std::string> training_cohorts;
    std::uint64_t seed = 0;

    std::size_t nonzero_count() const;
};

// Standardizes, optionally expands interactions, runs the requested penalty
// pipeline (adaptive: ridge CV -> weights -> weighted-lasso CV -> refit on
// all rows at the chosen lambda).
FittedModel fit_model(const DesignTable& raw_train, const FitConfig& cfg);

// Hazards for raw (unstandardized) rows using the model's stored parameters.
std::vector<double> predict_hazards(const FittedModel& model, const DesignTable& raw);

struct CoefficientReport {
    struct Entry {
        std::string name;
        double coefficient;      // standardized scale
        double exp_coefficient;  // multiplicative change in conditional odds per 1 SD
    };
    std::vector<Entry> retained;
    std::vector<std::string> zeroed;
};
CoefficientReport report_exp_std_estimates(const FittedModel& model);

// Asymptotic standard errors from the inverse Fisher information at the fit;
// index 0 is the intercept, then design order.
std::vector<double> fisher_standard_errors(const DesignTable& std_design,
                                           const Coefficients& coefs);

}  // namespace fieldwork
