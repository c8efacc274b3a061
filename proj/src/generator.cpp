#include "symdp/generator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "symdp/rng.hpp"

namespace symdp {
namespace {

// Shape knobs for the generated family. Affected subsets stay small so the
// transition relation keeps a low branching factor and the diagrams stay
// regular at 20 variables.
constexpr int kMaxAffected = 3;
constexpr int kMaxRewardDepth = 2;
constexpr double kGamma = 0.9;

std::vector<int> pick_distinct(Rng& rng, int count, int bound) {
  std::vector<int> pool(static_cast<std::size_t>(bound));
  for (int i = 0; i < bound; ++i) pool[static_cast<std::size_t>(i)] = i;
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto j = rng.below(static_cast<std::uint32_t>(bound - i));
    out.push_back(pool[j]);
    pool[j] = pool[static_cast<std::size_t>(bound - 1 - i)];
  }
  return out;
}

// Complete decision tree over `parents[depth:]`; leaves via `leaf(rng)`.
template <typename LeafFn>
Dd random_tree(DdManager& mgr, Rng& rng, const std::vector<int>& parents,
               std::size_t depth, LeafFn&& leaf) {
  if (depth == parents.size()) return mgr.constant(leaf(rng));
  Dd hi = random_tree(mgr, rng, parents, depth + 1, leaf);
  Dd lo = random_tree(mgr, rng, parents, depth + 1, leaf);
  Dd lit = mgr.literal(state_var(parents[depth]));
  return lit * hi + mgr.bdd_not(lit) * lo;
}

Dd random_cpt(DdManager& mgr, Rng& rng, int n_vars, int max_parents) {
  const int n_parents = static_cast<int>(rng.below(static_cast<std::uint32_t>(max_parents) + 1));
  std::vector<int> parents = pick_distinct(rng, n_parents, n_vars);
  return random_tree(mgr, rng, parents, 0, [](Rng& r) {
    return static_cast<double>(1 + r.below(9)) / 10.0;  // {0.1, ..., 0.9}
  });
}

}  // namespace

FactoredMdp generate_problem(std::uint64_t seed, int n_vars, int n_actions,
                             int max_parents) {
  if (n_vars < 1 || n_actions < 1 || max_parents < 0 || max_parents > n_vars)
    throw std::invalid_argument("generate_problem: infeasible parameters");

  Rng rng(seed);
  FactoredMdp m;
  for (int i = 0; i < n_vars; ++i) m.names.push_back("x" + std::to_string(i + 1));
  m.manager = std::make_unique<DdManager>(n_vars);
  DdManager& mgr = *m.manager;
  m.gamma = kGamma;

  m.start = StateAssignment(n_vars);
  for (int i = 0; i < n_vars; ++i) m.start.set_bit(i, rng.bernoulli(0.5));

  std::vector<bool> affected_anywhere(static_cast<std::size_t>(n_vars), false);
  for (int ai = 0; ai < n_actions; ++ai) {
    ActionSpec action;
    action.name = "act" + std::to_string(ai);
    action.cpts.assign(static_cast<std::size_t>(n_vars), Dd());

    const int k = 1 + static_cast<int>(rng.below(
                          static_cast<std::uint32_t>(std::min(kMaxAffected, n_vars))));
    std::vector<int> affected = pick_distinct(rng, k, n_vars);
    std::sort(affected.begin(), affected.end());
    for (int v : affected) affected_anywhere[static_cast<std::size_t>(v)] = true;

    for (int v = 0; v < n_vars; ++v) {
      const bool is_affected =
          std::binary_search(affected.begin(), affected.end(), v);
      action.cpts[static_cast<std::size_t>(v)] =
          is_affected ? random_cpt(mgr, rng, n_vars, max_parents)
                      : mgr.literal(state_var(v));  // identity: X'_v = X_v
    }

    const int depth =
        1 + static_cast<int>(rng.below(static_cast<std::uint32_t>(
                std::min(kMaxRewardDepth, n_vars))));
    std::vector<int> reward_vars = pick_distinct(rng, depth, n_vars);
    action.reward =
        random_tree(mgr, rng, reward_vars, 0, [](Rng& r) { return r.unit(); });
    m.actions.push_back(std::move(action));
  }

  // Every variable must be affected by at least one action.
  for (int v = 0; v < n_vars; ++v) {
    if (affected_anywhere[static_cast<std::size_t>(v)]) continue;
    const auto ai = rng.below(static_cast<std::uint32_t>(n_actions));
    m.actions[ai].cpts[static_cast<std::size_t>(v)] =
        random_cpt(mgr, rng, n_vars, max_parents);
    m.actions[ai].transition.reset();
    m.actions[ai].edges.reset();
  }
  return m;
}

}  // namespace symdp
