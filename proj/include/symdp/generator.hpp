/// @file  generator.hpp
/// @brief Seeded random problem generator modeled on the widget-style
///        benchmark family: every variable is affected by at least one
///        action, and actions carry different random rewards.

#pragma once

#include <cstdint>

#include "symdp/model.hpp"

namespace symdp {

/// Deterministically generate a factored MDP.
///
/// Each action affects a small random nonempty subset of the variables;
/// unaffected variables keep identity dynamics (X'_i = X_i). Affected
/// variables get a random decision-tree CPT over at most `max_parents`
/// parents with leaves from {0.1, ..., 0.9}; rewards are shallow random
/// trees with leaves uniform in [0,1]. A post-pass guarantees every
/// variable is affected by at least one action. Discount is 0.9.
///
/// The same seed always produces a byte-identical serialized model.
FactoredMdp generate_problem(std::uint64_t seed, int n_vars, int n_actions,
                             int max_parents);

}  // namespace symdp
