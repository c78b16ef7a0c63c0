#include "fieldwork/model_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fieldwork/csv.hpp"
#include "fieldwork/error.hpp"

namespace fieldwork {

namespace {

constexpr const char* kMagic = "fieldwork-model v1";

std::string full_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_std_params(std::ostream& out, const char* section, const StandardizationParams& p) {
    out << "[" << section << "]\n";
    for (std::size_t i = 0; i < p.names.size(); ++i) {
        out << p.names[i] << "," << full_double(p.mean[i]) << "," << full_double(p.sd[i]) << "\n";
    }
    out << "[" << section << ".dropped]\n";
    for (const auto& n : p.dropped) out << n << "\n";
}

void write_cv(std::ostream& out, const char* section, const CvResult& cv) {
    out << "[" << section << "]\n";
    if (cv.empty()) return;
    out << "k," << cv.k << "\n";
    out << "seed," << cv.seed << "\n";
    out << "chosen_index," << cv.chosen_index << "\n";
    for (std::size_t i = 0; i < cv.lambdas.size(); ++i) {
        out << full_double(cv.lambdas[i]) << "," << full_double(cv.mean_deviance[i]);
        for (double d : cv.fold_deviance[i]) out << "," << full_double(d);
        out << "\n";
    }
}

}  // namespace

void save_model(const FittedModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write model file: " + path);
    out << kMagic << "\n";
    out << "kind = " << m.kind << "\n";
    out << "penalty = " << penalty_name(m.penalty.kind) << "\n";
    out << "lambda = " << full_double(m.penalty.lambda) << "\n";
    out << "seed = " << m.seed << "\n";
    out << "cohorts = ";
    for (std::size_t i = 0; i < m.training_cohorts.size(); ++i) {
        if (i) out << ";";
        out << m.training_cohorts[i];
    }
    out << "\n";

    write_std_params(out, "standardization", m.standardization);
    out << "[interactions]\n";
    for (const auto& [base, ctx] : m.interactions.pairs) out << base << "," << ctx << "\n";
    write_std_params(out, "interaction_standardization", m.interactions.params);

    out << "[penalty_weights]\n";
    for (std::size_t j = 0; j < m.penalty.weights.size(); ++j) {
        out << m.coefficients.names[j] << "," << full_double(m.penalty.weights[j]) << "\n";
    }
    out << "[coefficients]\n";
    out << "(intercept)," << full_double(m.coefficients.intercept) << "\n";
    for (std::size_t j = 0; j < m.coefficients.names.size(); ++j) {
        out << m.coefficients.names[j] << "," << full_double(m.coefficients.values[j]) << "\n";
    }
    write_cv(out, "cv", m.cv);
    write_cv(out, "ridge_cv", m.ridge_cv);
    if (!out) throw ValidationError("write failed: " + path);
}

namespace {

struct Section {
    std::string name;
    std::vector<std::string> lines;
};

std::vector<Section> split_sections(std::istream& in, std::string& header, const std::string& path) {
    std::string line;
    if (!std::getline(in, line) || line != kMagic) {
        throw ValidationError(path + ": not a fieldwork model file (bad magic line)");
    }
    std::vector<Section> sections;
    Section* cur = nullptr;
    std::ostringstream head;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            sections.push_back({line.substr(1, line.size() - 2), {}});
            cur = &sections.back();
        } else if (cur) {
            cur->lines.push_back(line);
        } else {
            head << line << "\n";
        }
    }
    header = head.str();
    return sections;
}

const Section* find_section(const std::vector<Section>& ss, const std::string& name) {
    for (const auto& s : ss) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

StandardizationParams read_std_params(const std::vector<Section>& ss, const std::string& name,
                                      const std::string& path) {
    StandardizationParams p;
    const Section* body = find_section(ss, name);
    if (!body) throw ValidationError(path + ": missing section [" + name + "]");
    for (const auto& line : body->lines) {
        auto f = split_csv_line(line);
        if (f.size() != 3) throw ValidationError(path + ": bad line in [" + name + "]: " + line);
        p.names.push_back(f[0]);
        p.mean.push_back(std::stod(f[1]));
        p.sd.push_back(std::stod(f[2]));
    }
    if (const Section* dropped = find_section(ss, name + ".dropped")) {
        for (const auto& line : dropped->lines) p.dropped.push_back(line);
    }
    return p;
}

CvResult read_cv(const std::vector<Section>& ss, const std::string& name, const std::string& path) {
    CvResult cv;
    const Section* body = find_section(ss, name);
    if (!body || body->lines.empty()) return cv;
    for (const auto& line : body->lines) {
        auto f = split_csv_line(line);
        if (f[0] == "k") {
            cv.k = std::stoi(f.at(1));
        } else if (f[0] == "seed") {
            cv.seed = std::stoull(f.at(1));
        } else if (f[0] == "chosen_index") {
            cv.chosen_index = std::stoul(f.at(1));
        } else {
            if (f.size() < 2) throw ValidationError(path + ": bad line in [" + name + "]: " + line);
            cv.lambdas.push_back(std::stod(f[0]));
            cv.mean_deviance.push_back(std::stod(f[1]));
            std::vector<double> folds;
            for (std::size_t i = 2; i < f.size(); ++i) folds.push_back(std::stod(f[i]));
            cv.fold_deviance.push_back(std::move(folds));
        }
    }
    if (!cv.lambdas.empty()) {
        if (cv.chosen_index >= cv.lambdas.size()) {
            throw ValidationError(path + ": chosen_index out of range in [" + name + "]");
        }
        cv.chosen_lambda = cv.lambdas[cv.chosen_index];
    }
    return cv;
}

}  // namespace

FittedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file: " + path);
    std::string header_text;
    auto sections = split_sections(in, header_text, path);

    FittedModel m;
    {
        std::istringstream hs(header_text);
        std::string line;
        while (std::getline(hs, line)) {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(0, eq);
            std::string value = line.substr(eq + 1);
            auto trim = [](std::string s) {
                auto b = s.find_first_not_of(" \t");
                auto e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            key = trim(key);
            value = trim(value);
            if (key == "kind") {
                m.kind = value;
            } else if (key == "penalty") {
                auto k = penalty_from_name(value);
                if (!k) throw ValidationError(path + ": unknown penalty '" + value + "'");
                m.penalty.kind = *k;
            } else if (key == "lambda") {
                m.penalty.lambda = std::stod(value);
            } else if (key == "seed") {
                m.seed = std::stoull(value);
            } else if (key == "cohorts") {
                std::istringstream cs(value);
                std::string c;
                while (std::getline(cs, c, ';')) {
                    if (!c.empty()) m.training_cohorts.push_back(c);
                }
            }
        }
    }

    m.standardization = read_std_params(sections, "standardization", path);
    if (const Section* inter = find_section(sections, "interactions")) {
        for (const auto& line : inter->lines) {
            auto f = split_csv_line(line);
            if (f.size() != 2) throw ValidationError(path + ": bad interaction line: " + line);
            m.interactions.pairs.emplace_back(f[0], f[1]);
        }
    }
    m.interactions.params = read_std_params(sections, "interaction_standardization", path);

    const Section* coefs = find_section(sections, "coefficients");
    if (!coefs || coefs->lines.empty()) {
        throw ValidationError(path + ": missing [coefficients] section");
    }
    for (const auto& line : coefs->lines) {
        auto f = split_csv_line(line);
        if (f.size() != 2) throw ValidationError(path + ": bad coefficient line: " + line);
        if (f[0] == "(intercept)") {
            m.coefficients.intercept = std::stod(f[1]);
        } else {
            m.coefficients.names.push_back(f[0]);
            m.coefficients.values.push_back(std::stod(f[1]));
        }
    }
    if (const Section* w = find_section(sections, "penalty_weights")) {
        if (!w->lines.empty()) {
            m.penalty.weights.assign(m.coefficients.names.size(), 1.0);
            for (const auto& line : w->lines) {
                auto f = split_csv_line(line);
                if (f.size() != 2) throw ValidationError(path + ": bad weight line: " + line);
                for (std::size_t j = 0; j < m.coefficients.names.size(); ++j) {
                    if (m.coefficients.names[j] == f[0]) {
                        m.penalty.weights[j] = std::stod(f[1]);
                        break;
                    }
                }
            }
        }
    }
    m.cv = read_cv(sections, "cv", path);
    m.ridge_cv = read_cv(sections, "ridge_cv", path);
    return m;
}

}  // namespace fieldwork
