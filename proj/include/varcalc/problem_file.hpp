#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "varcalc/estimators.hpp"
#include "varcalc/growth.hpp"
#include "varcalc/problem.hpp"
#include "varcalc/smooth.hpp"

namespace varcalc {

// Schema violation; `pointer` is the JSON pointer of the offending value.
class SchemaError : public InconsistentInput {
 public:
  SchemaError(std::string pointer, const std::string& msg)
      : InconsistentInput(pointer + ": " + msg), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct ProblemOptions {
  std::uint64_t seed = 7;
  FdSteps fd;
  GridSchedule schedule;
  GrowthBudget budget;
  FalsifyBudget falsify;
  double msqc_radius = 0.1;
  int msqc_samples = 256;
};

struct ProblemFile {
  int n = 0;
  int m = 0;
  nlohmann::ordered_json source;
  ProblemOptions options;
  std::optional<CompositeProblem> problem;
  // ∇f where ∂g(F(x)) is a singleton; EvalError elsewhere.
  GradientProbe gradient() const;
};

// Validates the document, then builds the problem. `seed_override` wins over the file.
ProblemFile parse_problem(const nlohmann::ordered_json& doc, std::optional<std::uint64_t> seed_override = {},
                          std::optional<FdSteps> fd_override = {});
ProblemFile load_problem(const std::string& path, std::optional<std::uint64_t> seed_override = {},
                         std::optional<FdSteps> fd_override = {});

// Same problem with the ψ-level subgradient replaced.
CompositeProblem with_v_bar(const CompositeProblem& p, const Vec& v_bar);

}  // namespace varcalc
