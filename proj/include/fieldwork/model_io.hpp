#pragma once

#include <string>

#include "fieldwork/glm.hpp"

namespace fieldwork {

// Model files are a single self-describing text format: a version line,
// key-value header, then bracketed sections with CSV-like bodies covering
// standardization parameters, penalty weights, coefficients and the CV trace.
void save_model(const FittedModel& model, const std::string& path);
FittedModel load_model(const std::string& path);

}  // namespace fieldwork
