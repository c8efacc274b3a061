/// @file  model.hpp
/// @brief Factored MDP data model: parenthesized-tree model files, per-action
///        transition construction, and model validation.

#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "symdp/diagram.hpp"

namespace symdp {

/// Parse failure with 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column)
      : std::runtime_error(message + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ActionSpec {
  std::string name;
  /// P^a(X'_i = true | X), one diagram per state variable, over unprimed vars.
  std::vector<Dd> cpts;
  /// R^a(X) over unprimed vars.
  Dd reward;

  // Built lazily; see action_transition / action_edges.
  mutable std::optional<Dd> transition;
  mutable std::optional<Dd> edges;
};

struct FactoredMdp {
  std::unique_ptr<DdManager> manager;
  std::vector<std::string> names;  // variable name per index
  double gamma = 0.9;
  StateAssignment start;
  /// Declared zero-reward absorbing state; required when gamma == 1.
  std::optional<StateAssignment> absorbing;
  std::vector<ActionSpec> actions;

  [[nodiscard]] int var_count() const { return static_cast<int>(names.size()); }
  [[nodiscard]] int action_count() const { return static_cast<int>(actions.size()); }
  /// Index of a named action, or -1.
  [[nodiscard]] int action_index(std::string_view name) const;
};

struct ValidationIssue {
  std::string action;
  int variable = -1;  // state-variable index, or -1 for whole-action issues
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  [[nodiscard]] bool ok() const { return issues.empty(); }
  [[nodiscard]] std::string to_string() const;
};

/// Parse a model document; diagrams are built in a fresh manager.
FactoredMdp parse_model(std::string_view text);
/// Convenience file loader; throws std::runtime_error on IO failure.
FactoredMdp parse_model_file(const std::string& path);

/// Render a model document; parse(serialize(m)) is pointwise identical.
std::string serialize_model(const FactoredMdp& m);

/// Complete transition diagram P^a(X, X'), the product over variables of
/// X'_i * cpt_i + (1 - X'_i) * (1 - cpt_i). Cached on the action.
Dd action_transition(const FactoredMdp& m, int action);

/// 0/1 diagram of the positive-probability transition pairs of one action.
Dd action_edges(const FactoredMdp& m, int action);

/// Checks every CPT leaf lies in [0,1], rewards are finite, each row of every
/// P^a sums to 1, and (when gamma == 1) the declared absorbing state is a
/// zero-reward sink that remains reachable from every state reachable from
/// the start. Violations are reported, not thrown.
ValidationReport validate_model(const FactoredMdp& m);

}  // namespace symdp
