#pragma once

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "lag/quadric.hpp"

namespace lag {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double budget = 0.0;  // runtime bound in seconds
  std::string summary;
  nlohmann::json detail;
};

// Rotation, translation |v| <= 1, boost |b| <= 0.2, time shift |s| <= 0.05.
Mat6 random_laguerre(std::mt19937_64& rng);

// Criteria 1..11; `only` restricts to one id when positive.
std::vector<CriterionResult> run_acceptance(unsigned seed, int only = 0);

// "PASS  3  name  summary  (t s / budget s)"
std::string format_line(const CriterionResult& r);

nlohmann::json acceptance_json(const std::vector<CriterionResult>& results, unsigned seed);

}  // namespace lag
