#include "fieldwork/glm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fieldwork/error.hpp"
#include "fieldwork/rng.hpp"
#include "fieldwork/threads.hpp"

namespace fieldwork {

namespace {

constexpr double kWeightFloor = 1e-10;  // IRLS weight floor
constexpr double kSdDropTol = 1e-10;    // relative sd below which a column is constant

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

int StandardizationParams::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::pair<DesignTable, StandardizationParams> standardize(const DesignTable& design) {
    if (design.rows() == 0) throw ValidationError("cannot standardize an empty design");
    double total = std::accumulate(design.at_risk.begin(), design.at_risk.end(), 0.0);
    if (total <= 0) throw ValidationError("design has zero total at-risk weight");

    StandardizationParams params;
    DesignTable out;
    out.events = design.events;
    out.at_risk = design.at_risk;
    out.cohort = design.cohort;
    out.date = design.date;
    out.phase = design.phase;
    out.days = design.days;

    for (std::size_t j = 0; j < design.n_predictors(); ++j) {
        const auto& col = design.cols[j];
        double mean = 0.0;
        for (std::size_t i = 0; i < col.size(); ++i) mean += design.at_risk[i] * col[i];
        mean /= total;
        double var = 0.0;
        for (std::size_t i = 0; i < col.size(); ++i) {
            double d = col[i] - mean;
            var += design.at_risk[i] * d * d;
        }
        var /= total;
        double sd = std::sqrt(var);
        if (sd <= kSdDropTol * std::max(1.0, std::fabs(mean))) {
            params.dropped.push_back(design.names[j]);
            continue;
        }
        std::vector<double> z(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) z[i] = (col[i] - mean) / sd;
        out.add_column(design.names[j], std::move(z));
        params.names.push_back(design.names[j]);
        params.mean.push_back(mean);
        params.sd.push_back(sd);
    }
    return {std::move(out), std::move(params)};
}

DesignTable apply_standardization(const DesignTable& design, const StandardizationParams& params) {
    DesignTable out;
    out.events = design.events;
    out.at_risk = design.at_risk;
    out.cohort = design.cohort;
    out.date = design.date;
    out.phase = design.phase;
    out.days = design.days;
    for (std::size_t k = 0; k < params.names.size(); ++k) {
        int j = design.col_index(params.names[k]);
        if (j < 0) {
            throw ValidationError("design is missing predictor '" + params.names[k] +
                                  "' required by the model");
        }
        const auto& col = design.cols[static_cast<std::size_t>(j)];
        std::vector<double> z(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) z[i] = (col[i] - params.mean[k]) / params.sd[k];
        out.add_column(params.names[k], std::move(z));
    }
    return out;
}

Coefficients destandardize(const Coefficients& coefs, const StandardizationParams& params) {
    Coefficients raw;
    raw.intercept = coefs.intercept;
    for (std::size_t k = 0; k < coefs.names.size(); ++k) {
        int i = params.index_of(coefs.names[k]);
        if (i < 0) throw ValidationError("no standardization entry for '" + coefs.names[k] + "'");
        double b = coefs.values[k] / params.sd[static_cast<std::size_t>(i)];
        raw.names.push_back(coefs.names[k]);
        raw.values.push_back(b);
        raw.intercept -= b * params.mean[static_cast<std::size_t>(i)];
    }
    return raw;
}

const char* penalty_name(PenaltyKind k) {
    switch (k) {
        case PenaltyKind::None: return "none";
        case PenaltyKind::Ridge: return "ridge";
        case PenaltyKind::Lasso: return "lasso";
        case PenaltyKind::AdaptiveLasso: return "adaptive";
    }
    return "?";
}

std::optional<PenaltyKind> penalty_from_name(const std::string& s) {
    if (s == "none") return PenaltyKind::None;
    if (s == "ridge") return PenaltyKind::Ridge;
    if (s == "lasso") return PenaltyKind::Lasso;
    if (s == "adaptive" || s == "adaptive-lasso") return PenaltyKind::AdaptiveLasso;
    return std::nullopt;
}

double penalized_objective(const DesignTable& design, const Coefficients& coefs,
                           const PenaltySpec& penalty, double lambda) {
    double obj = negative_log_likelihood(coefs, design);
    if (penalty.kind == PenaltyKind::Ridge) {
        for (double v : coefs.values) obj += lambda * v * v;
    } else if (penalty.kind != PenaltyKind::None) {
        for (std::size_t j = 0; j < coefs.values.size(); ++j) {
            obj += lambda * penalty.weight(j) * std::fabs(coefs.values[j]);
        }
    }
    return obj;
}

double lasso_lambda_max(const DesignTable& d, const PenaltySpec& penalty) {
    double total_events = std::accumulate(d.events.begin(), d.events.end(), 0.0);
    double total_risk = std::accumulate(d.at_risk.begin(), d.at_risk.end(), 0.0);
    double rate = std::min(std::max(total_events / total_risk, kLogClampEps), 1.0 - kLogClampEps);
    double best = 0.0;
    for (std::size_t j = 0; j < d.n_predictors(); ++j) {
        double score = 0.0;
        for (std::size_t i = 0; i < d.rows(); ++i) {
            score += d.cols[j][i] * (d.at_risk[i] * rate - d.events[i]);
        }
        best = std::max(best, std::fabs(score) / penalty.weight(j));
    }
    return best;
}

std::vector<double> log_spaced_path(double lambda_max, int count, double min_ratio) {
    if (count < 1) throw ValidationError("lambda path needs at least one point");
    if (lambda_max <= 0) return std::vector<double>(static_cast<std::size_t>(count), 0.0);
    std::vector<double> path(static_cast<std::size_t>(count));
    if (count == 1) {
        path[0] = lambda_max;
        return path;
    }
    double log_max = std::log(lambda_max);
    double log_min = std::log(lambda_max * min_ratio);
    for (int i = 0; i < count; ++i) {
        path[static_cast<std::size_t>(i)] =
            std::exp(log_max + (log_min - log_max) * static_cast<double>(i) / (count - 1));
    }
    return path;
}

namespace {

// Shared per-fit state for the coordinate-descent solver.
struct Solver {
    const DesignTable& d;
    const PenaltySpec& penalty;
    const FitOptions& opts;
    std::size_t n, p;

    std::vector<double> beta;  // predictors
    double beta0 = 0.0;
    std::vector<double> eta;

    Solver(const DesignTable& design, const PenaltySpec& pen, const FitOptions& o)
        : d(design), penalty(pen), opts(o), n(design.rows()), p(design.n_predictors()),
          beta(design.n_predictors(), 0.0), eta(design.rows(), 0.0) {
        double te = std::accumulate(d.events.begin(), d.events.end(), 0.0);
        double tr = std::accumulate(d.at_risk.begin(), d.at_risk.end(), 0.0);
        double rate = std::min(std::max(te / tr, kLogClampEps), 1.0 - kLogClampEps);
        beta0 = logit(rate);
        std::fill(eta.begin(), eta.end(), beta0);
    }

    void recompute_eta() {
        std::fill(eta.begin(), eta.end(), beta0);
        for (std::size_t j = 0; j < p; ++j) {
            if (beta[j] == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i) eta[i] += beta[j] * d.cols[j][i];
        }
    }

    // Gradient of the exact NLL at the current eta.
    void gradient(std::vector<double>& g, double& g0) const {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = d.at_risk[i] * hazard_from_eta(eta[i]) - d.events[i];
        }
        g0 = std::accumulate(u.begin(), u.end(), 0.0);
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += d.cols[j][i] * u[i];
            g[j] = s;
        }
    }

    // Max stationarity violation; coordinates pinned at the box bound with an
    // outward-pointing gradient count as satisfied.
    double kkt_residual(double lambda, const std::vector<double>& g, double g0) const {
        double bound = opts.coef_bound;
        auto bounded_ok = [&](double b, double dir) {
            return (b >= bound && dir < 0) || (b <= -bound && dir > 0);
        };
        double worst = bounded_ok(beta0, g0) ? 0.0 : std::fabs(g0);
        for (std::size_t j = 0; j < p; ++j) {
            double r;
            if (penalty.kind == PenaltyKind::Ridge) {
                r = std::fabs(g[j] + 2.0 * lambda * beta[j]);
            } else if (penalty.kind == PenaltyKind::None || lambda == 0.0) {
                r = std::fabs(g[j]);
                if (bounded_ok(beta[j], g[j])) r = 0.0;
            } else {
                double lw = lambda * penalty.weight(j);
                if (beta[j] == 0.0) {
                    r = std::max(0.0, std::fabs(g[j]) - lw);
                } else {
                    double dir = g[j] + lw * (beta[j] > 0 ? 1.0 : -1.0);
                    r = std::fabs(dir);
                    if (bounded_ok(beta[j], dir)) r = 0.0;
                }
            }
            worst = std::max(worst, r);
        }
        return worst;
    }

    Coefficients coefficients() const {
        Coefficients c;
        c.intercept = beta0;
        c.names = d.names;
        c.values = beta;
        return c;
    }

    double objective(double lambda) const {
        double obj = nll_from_hazards(current_hazards(), d);
        if (penalty.kind == PenaltyKind::Ridge) {
            for (double v : beta) obj += lambda * v * v;
        } else if (penalty.kind != PenaltyKind::None) {
            for (std::size_t j = 0; j < p; ++j) obj += lambda * penalty.weight(j) * std::fabs(beta[j]);
        }
        return obj;
    }

    std::vector<double> current_hazards() const {
        std::vector<double> h(n);
        for (std::size_t i = 0; i < n; ++i) h[i] = hazard_from_eta(eta[i]);
        return h;
    }

    // One IRLS outer step: build the quadratic at the current eta and run
    // cyclic coordinate descent on it to convergence.
    void irls_step(double lambda) {
        std::vector<double> w(n), res(n), denom(p);
        for (std::size_t i = 0; i < n; ++i) {
            double h = hazard_from_eta(eta[i]);
            double wi = d.at_risk[i] * h * (1.0 - h);
            w[i] = std::max(wi, kWeightFloor);
            res[i] = (d.events[i] - d.at_risk[i] * h) / w[i];  // working residual z* - eta
        }
        double wsum = std::accumulate(w.begin(), w.end(), 0.0);
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += w[i] * d.cols[j][i] * d.cols[j][i];
            denom[j] = s;
        }

        double bound = opts.coef_bound;
        for (int pass = 0; pass < opts.max_inner; ++pass) {
            double max_step = 0.0;

            double num0 = 0.0;
            for (std::size_t i = 0; i < n; ++i) num0 += w[i] * res[i];
            double new0 = std::clamp(beta0 + num0 / wsum, -bound, bound);
            double delta0 = new0 - beta0;
            if (delta0 != 0.0) {
                beta0 = new0;
                for (std::size_t i = 0; i < n; ++i) {
                    res[i] -= delta0;
                    eta[i] += delta0;
                }
                max_step = std::fabs(delta0);
            }

            for (std::size_t j = 0; j < p; ++j) {
                if (denom[j] <= 0.0) continue;
                double num = 0.0;
                const auto& col = d.cols[j];
                for (std::size_t i = 0; i < n; ++i) num += w[i] * col[i] * res[i];
                num += denom[j] * beta[j];
                double nb;
                if (penalty.kind == PenaltyKind::Ridge) {
                    nb = num / (denom[j] + 2.0 * lambda);
                } else if (penalty.kind == PenaltyKind::None || lambda == 0.0) {
                    nb = num / denom[j];
                } else {
                    nb = soft_threshold(num, lambda * penalty.weight(j)) / denom[j];
                }
                nb = std::clamp(nb, -bound, bound);
                double delta = nb - beta[j];
                if (delta != 0.0) {
                    beta[j] = nb;
                    for (std::size_t i = 0; i < n; ++i) {
                        res[i] -= col[i] * delta;
                        eta[i] += col[i] * delta;
                    }
                    max_step = std::max(max_step, std::fabs(delta));
                }
            }
            if (max_step < 1e-11) break;
        }
    }

    PathPoint solve(double lambda) {
        std::vector<double> g(p);
        double g0 = 0.0;
        double prev_obj = objective(lambda);
        int outer = 0;
        for (; outer < opts.max_outer; ++outer) {
            gradient(g, g0);
            double kkt = kkt_residual(lambda, g, g0);
            if (kkt <= opts.kkt_tol) break;

            std::vector<double> beta_save = beta;
            double beta0_save = beta0;
            irls_step(lambda);

            // Step-halving safeguard: the quadratic model can overshoot when
            // hazards saturate.
            double obj = objective(lambda);
            int halvings = 0;
            while (obj > prev_obj + 1e-10 * (1.0 + std::fabs(prev_obj)) && halvings < 40) {
                for (std::size_t j = 0; j < p; ++j) beta[j] = 0.5 * (beta[j] + beta_save[j]);
                beta0 = 0.5 * (beta0 + beta0_save);
                recompute_eta();
                obj = objective(lambda);
                ++halvings;
            }
            if (halvings == 40) {
                // No descent direction left at this scale; accept and re-test KKT.
                beta = beta_save;
                beta0 = beta0_save;
                recompute_eta();
                gradient(g, g0);
                if (kkt_residual(lambda, g, g0) <= opts.kkt_tol) break;
                throw NumericError("solver stalled at lambda=" + std::to_string(lambda) +
                                   " (kkt=" + std::to_string(kkt_residual(lambda, g, g0)) + ")");
            }
            prev_obj = obj;
        }
        gradient(g, g0);
        double kkt = kkt_residual(lambda, g, g0);
        if (kkt > opts.kkt_tol) {
            throw NumericError("solver did not converge at lambda=" + std::to_string(lambda) +
                               " after " + std::to_string(outer) + " iterations (kkt=" +
                               std::to_string(kkt) + ", nll=" +
                               std::to_string(nll_from_hazards(current_hazards(), d)) + ")");
        }
        PathPoint pt;
        pt.lambda = lambda;
        pt.coefs = coefficients();
        pt.nll = nll_from_hazards(current_hazards(), d);
        pt.objective = objective(lambda);
        pt.kkt_residual = kkt;
        pt.outer_iterations = outer;
        return pt;
    }
};

}  // namespace

std::vector<PathPoint> fit_penalized(const DesignTable& std_design, const PenaltySpec& penalty,
                                     const std::vector<double>& lambda_path,
                                     const FitOptions& opts) {
    if (std_design.rows() == 0) throw ValidationError("cannot fit an empty design");
    if (!penalty.weights.empty() && penalty.weights.size() != std_design.n_predictors()) {
        throw ValidationError("penalty weights do not match design width");
    }
    for (std::size_t i = 1; i < lambda_path.size(); ++i) {
        if (!(lambda_path[i] < lambda_path[i - 1]) && !(lambda_path[i] == 0.0 && lambda_path[i - 1] == 0.0)) {
            throw ValidationError("lambda path must be descending");
        }
    }
    Solver solver(std_design, penalty, opts);
    std::vector<PathPoint> path;
    path.reserve(lambda_path.size());
    for (double lambda : lambda_path) {
        path.push_back(solver.solve(lambda));  // warm start: solver state carries over
    }
    return path;
}

namespace {

double binomial_deviance_row(double e, double nrow, double h) {
    h = std::min(std::max(h, kLogClampEps), 1.0 - kLogClampEps);
    double dev = 0.0;
    if (e > 0.0) dev += e * std::log(e / (nrow * h));
    if (e < nrow) dev += (nrow - e) * std::log((nrow - e) / (nrow * (1.0 - h)));
    return 2.0 * dev;
}

}  // namespace

CvResult cross_validate(const DesignTable& std_design, const PenaltySpec& penalty,
                        const std::vector<double>& lambda_path, int k, std::uint64_t seed,
                        int threads, const FitOptions& opts) {
    std::size_t n = std_design.rows();
    if (k < 2) throw ValidationError("k-fold CV needs k >= 2");
    if (static_cast<std::size_t>(k) > n) {
        throw ValidationError("k-fold CV needs at least k rows (k=" + std::to_string(k) +
                              ", rows=" + std::to_string(n) + ")");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    std::size_t base = n / static_cast<std::size_t>(k), extra = n % static_cast<std::size_t>(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < static_cast<std::size_t>(k); ++f) {
        std::size_t len = base + (f < extra ? 1 : 0);
        folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                        order.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    }

    std::vector<std::vector<double>> dev(lambda_path.size(),
                                         std::vector<double>(static_cast<std::size_t>(k), 0.0));
    parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t f) {
        std::vector<char> held(n, 0);
        for (auto i : folds[f]) held[i] = 1;
        std::vector<std::size_t> train_idx;
        train_idx.reserve(n - folds[f].size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!held[i]) train_idx.push_back(i);
        }
        DesignTable train = std_design.select_rows(train_idx);
        DesignTable test = std_design.select_rows(folds[f]);
        auto path = fit_penalized(train, penalty, lambda_path, opts);
        for (std::size_t li = 0; li < path.size(); ++li) {
            auto h = hazards_for(path[li].coefs, test);
            double total = 0.0;
            for (std::size_t i = 0; i < test.rows(); ++i) {
                total += binomial_deviance_row(test.events[i], test.at_risk[i], h[i]);
            }
            dev[li][f] = total;
        }
    });

    CvResult cv;
    cv.lambdas = lambda_path;
    cv.fold_deviance = std::move(dev);
    cv.mean_deviance.resize(lambda_path.size());
    for (std::size_t li = 0; li < lambda_path.size(); ++li) {
        double s = std::accumulate(cv.fold_deviance[li].begin(), cv.fold_deviance[li].end(), 0.0);
        cv.mean_deviance[li] = s / k;
    }
    cv.chosen_index = 0;
    for (std::size_t li = 1; li < cv.mean_deviance.size(); ++li) {
        if (cv.mean_deviance[li] < cv.mean_deviance[cv.chosen_index]) cv.chosen_index = li;
    }
    cv.chosen_lambda = cv.lambdas[cv.chosen_index];
    cv.k = k;
    cv.seed = seed;
    return cv;
}

std::vector<double> adaptive_weights(const Coefficients& ridge_coefs,
                                     const std::vector<std::string>& design_names) {
    std::vector<double> w(design_names.size(), kAdaptiveWeightCap);
    for (std::size_t j = 0; j < design_names.size(); ++j) {
        const double* v = ridge_coefs.find(design_names[j]);
        if (v && std::fabs(*v) > 1.0 / kAdaptiveWeightCap) {
            w[j] = 1.0 / std::fabs(*v);
        }
    }
    return w;
}

DesignTable build_interactions(const DesignTable& std_design, InteractionExpansion& info) {
    static const std::vector<std::string> bases = {"days", "reminder1", "reminder2"};
    DesignTable products;
    products.events = std_design.events;
    products.at_risk = std_design.at_risk;
    products.cohort = std_design.cohort;
    products.date = std_design.date;
    products.phase = std_design.phase;
    products.days = std_design.days;

    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& base : bases) {
        int bj = std_design.col_index(base);
        if (bj < 0) continue;
        for (std::size_t cj = 0; cj < std_design.n_predictors(); ++cj) {
            const std::string& ctx = std_design.names[cj];
            if (std::find(bases.begin(), bases.end(), ctx) != bases.end()) continue;
            std::vector<double> prod(std_design.rows());
            for (std::size_t i = 0; i < std_design.rows(); ++i) {
                prod[i] = std_design.cols[static_cast<std::size_t>(bj)][i] * std_design.cols[cj][i];
            }
            products.add_column(base + ":" + ctx, std::move(prod));
            pairs.emplace_back(base, ctx);
        }
    }

    auto [std_products, prod_params] = standardize(products);
    // Keep only the pairs whose product survived the constant-column drop.
    std::vector<std::pair<std::string, std::string>> kept;
    for (const auto& [base, ctx] : pairs) {
        if (prod_params.index_of(base + ":" + ctx) >= 0) kept.emplace_back(base, ctx);
    }
    info.pairs = std::move(kept);
    info.params = std::move(prod_params);

    DesignTable out = std_design;
    for (std::size_t j = 0; j < std_products.n_predictors(); ++j) {
        out.add_column(std_products.names[j], std_products.cols[j]);
    }
    return out;
}

DesignTable apply_interactions(const DesignTable& std_design, const InteractionExpansion& info) {
    if (info.empty()) return std_design;
    DesignTable out = std_design;
    for (const auto& [base, ctx] : info.pairs) {
        std::string name = base + ":" + ctx;
        int bj = std_design.col_index(base);
        int cj = std_design.col_index(ctx);
        if (bj < 0 || cj < 0) {
            throw ValidationError("interaction '" + name + "' needs missing main effects");
        }
        int pi = info.params.index_of(name);
        if (pi < 0) throw ValidationError("no standardization entry for interaction '" + name + "'");
        double mean = info.params.mean[static_cast<std::size_t>(pi)];
        double sd = info.params.sd[static_cast<std::size_t>(pi)];
        std::vector<double> prod(std_design.rows());
        for (std::size_t i = 0; i < std_design.rows(); ++i) {
            double v = std_design.cols[static_cast<std::size_t>(bj)][i] *
                       std_design.cols[static_cast<std::size_t>(cj)][i];
            prod[i] = (v - mean) / sd;
        }
        out.add_column(name, std::move(prod));
    }
    return out;
}

std::size_t FittedModel::nonzero_count() const {
    std::size_t n = 0;
    for (double v : coefficients.values) {
        if (v != 0.0) ++n;
    }
    return n;
}

namespace {

// Ridge pre-fits have no natural lambda_max; span a wide grid around the
// lasso score scale so CV can find an interior optimum.
std::vector<double> ridge_path(const DesignTable& d, int count) {
    PenaltySpec unit{PenaltyKind::Lasso, 0.0, {}};
    double s = lasso_lambda_max(d, unit);
    if (s <= 0) s = 1.0;
    return log_spaced_path(1000.0 * s, count, 1e-8);
}

struct StageResult {
    Coefficients coefs;
    double lambda = 0.0;
    CvResult cv;
};

StageResult run_stage(const DesignTable& d, PenaltySpec penalty, const FitConfig& cfg,
                      std::uint64_t stage_seed) {
    StageResult out;
    if (penalty.kind == PenaltyKind::None) {
        auto path = fit_penalized(d, penalty, {0.0}, cfg.solver);
        out.coefs = path[0].coefs;
        out.lambda = 0.0;
        return out;
    }
    std::vector<double> grid;
    if (penalty.kind == PenaltyKind::Ridge) {
        grid = ridge_path(d, cfg.lambda_count);
    } else {
        double lmax = lasso_lambda_max(d, penalty);
        if (lmax <= 0) lmax = 1.0;
        grid = log_spaced_path(lmax, cfg.lambda_count, cfg.lambda_min_ratio);
    }
    if (cfg.fixed_lambda) {
        // Warm-started descent down to the requested lambda.
        std::vector<double> partial;
        for (double l : grid) {
            if (l > *cfg.fixed_lambda) partial.push_back(l);
        }
        partial.push_back(*cfg.fixed_lambda);
        auto path = fit_penalized(d, penalty, partial, cfg.solver);
        out.coefs = path.back().coefs;
        out.lambda = *cfg.fixed_lambda;
        return out;
    }
    out.cv = cross_validate(d, penalty, grid, cfg.k_folds, stage_seed, cfg.threads, cfg.solver);
    auto path = fit_penalized(d, penalty, grid, cfg.solver);
    out.coefs = path[out.cv.chosen_index].coefs;
    out.lambda = out.cv.chosen_lambda;
    return out;
}

}  // namespace

FittedModel fit_model(const DesignTable& raw_train, const FitConfig& cfg) {
    auto [std_design, params] = standardize(raw_train);

    FittedModel model;
    model.standardization = std::move(params);
    model.seed = cfg.seed;

    DesignTable final_design = std_design;
    if (cfg.interactions) {
        final_design = build_interactions(std_design, model.interactions);
    }

    // Distinct sub-streams per pipeline stage.
    std::uint64_t ridge_seed = mix_seed(cfg.seed, 1);
    std::uint64_t final_seed = mix_seed(cfg.seed, 2);

    PenaltySpec penalty;
    penalty.kind = cfg.penalty;
    if (cfg.penalty == PenaltyKind::AdaptiveLasso) {
        PenaltySpec ridge{PenaltyKind::Ridge, 0.0, {}};
        StageResult pre = run_stage(final_design, ridge, cfg, ridge_seed);
        model.ridge_cv = pre.cv;
        penalty.weights = adaptive_weights(pre.coefs, final_design.names);
    }

    StageResult fin = run_stage(final_design, penalty, cfg, final_seed);
    penalty.lambda = fin.lambda;
    model.penalty = penalty;
    model.coefficients = fin.coefs;
    model.cv = fin.cv;

    // Training cohorts, first-seen order.
    for (const auto& c : raw_train.cohort) {
        if (std::find(model.training_cohorts.begin(), model.training_cohorts.end(), c) ==
            model.training_cohorts.end()) {
            model.training_cohorts.push_back(c);
        }
    }
    return model;
}

std::vector<double> predict_hazards(const FittedModel& model, const DesignTable& raw) {
    DesignTable z = apply_standardization(raw, model.standardization);
    if (!model.interactions.empty()) z = apply_interactions(z, model.interactions);
    return hazards_for(model.coefficients, z);
}

CoefficientReport report_exp_std_estimates(const FittedModel& model) {
    CoefficientReport report;
    for (std::size_t j = 0; j < model.coefficients.names.size(); ++j) {
        double v = model.coefficients.values[j];
        if (v != 0.0) {
            report.retained.push_back({model.coefficients.names[j], v, std::exp(v)});
        } else {
            report.zeroed.push_back(model.coefficients.names[j]);
        }
    }
    return report;
}

std::vector<double> fisher_standard_errors(const DesignTable& d, const Coefficients& coefs) {
    std::size_t p = d.n_predictors() + 1;  // intercept first
    auto h = hazards_for(coefs, d);
    std::vector<double> a(p * p, 0.0);
    auto x = [&](std::size_t i, std::size_t j) -> double {
        return j == 0 ? 1.0 : d.cols[j - 1][i];
    };
    for (std::size_t i = 0; i < d.rows(); ++i) {
        double w = d.at_risk[i] * h[i] * (1.0 - h[i]);
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t c = r; c < p; ++c) {
                a[r * p + c] += w * x(i, r) * x(i, c);
            }
        }
    }
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < r; ++c) a[r * p + c] = a[c * p + r];
    }
    // Cholesky factorization, then invert via triangular solves.
    std::vector<double> l(p * p, 0.0);
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c <= r; ++c) {
            double s = a[r * p + c];
            for (std::size_t k = 0; k < c; ++k) s -= l[r * p + k] * l[c * p + k];
            if (r == c) {
                if (s <= 0) throw NumericError("Fisher information is not positive definite");
                l[r * p + r] = std::sqrt(s);
            } else {
                l[r * p + c] = s / l[c * p + c];
            }
        }
    }
    std::vector<double> se(p);
    std::vector<double> col(p);
    for (std::size_t j = 0; j < p; ++j) {
        std::fill(col.begin(), col.end(), 0.0);
        // Solve L y = e_j; then (A^-1)_jj = ||y||^2.
        for (std::size_t r = j; r < p; ++r) {
            double s = (r == j) ? 1.0 : 0.0;
            for (std::size_t k = j; k < r; ++k) s -= l[r * p + k] * col[k];
            col[r] = s / l[r * p + r];
        }
        double var = 0.0;
        for (std::size_t r = j; r < p; ++r) var += col[r] * col[r];
        se[j] = std::sqrt(var);
    }
    return se;
}

}  // namespace fieldwork
