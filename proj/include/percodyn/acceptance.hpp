#pragma once

#include <string>
#include <vector>

#include "percodyn/common.hpp"

namespace percodyn::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string summary;  // key numbers, and the first failing check if any
  double seconds = 0.0;
};

inline constexpr int kCriteria = 12;

std::string title(int id);

/// Runs one criterion (1..kCriteria) with its canonical configuration.
CriterionResult run_criterion(int id, Exec exec = Exec::parallel);

/// "[PASS]  3  title  (1.2 s)  summary"
std::string format_line(const CriterionResult& r);

}  // namespace percodyn::acceptance
