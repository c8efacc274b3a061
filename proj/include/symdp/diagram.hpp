/// @file  diagram.hpp
/// @brief Canonical reduced ordered decision diagrams (ADD/BDD) with a
///        hash-consing node manager and memoized recursive operators.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symdp {

class DdManager;

/// Index of a decision variable in the global interleaved order
/// X_1, X'_1, X_2, X'_2, ...  Even indices are current-state variables,
/// odd indices their primed (next-state) partners.
struct VarId {
  std::uint32_t index = 0;

  [[nodiscard]] bool is_primed() const { return (index & 1u) != 0; }
  /// X_i -> X'_i (valid on unprimed ids only).
  [[nodiscard]] VarId primed() const { return {index + 1}; }
  /// X'_i -> X_i (valid on primed ids only).
  [[nodiscard]] VarId unprimed() const { return {index - 1}; }
  /// The other member of this variable's (X_i, X'_i) pair.
  [[nodiscard]] VarId partner() const { return {index ^ 1u}; }
  /// Position of the underlying state variable (0-based).
  [[nodiscard]] int state_index() const { return static_cast<int>(index / 2); }

  friend auto operator<=>(VarId, VarId) = default;
};

/// Unprimed variable id for state variable i (0-based).
inline VarId state_var(int i) { return {2u * static_cast<std::uint32_t>(i)}; }
/// Primed variable id for state variable i (0-based).
inline VarId primed_var(int i) { return {2u * static_cast<std::uint32_t>(i) + 1}; }

/// Total truth assignment to the n state variables; rendered as the
/// bit-string b_1...b_n with b_1 first.
class StateAssignment {
 public:
  StateAssignment() = default;
  explicit StateAssignment(int n) : bits_(static_cast<std::size_t>(n), 0) {}

  /// Parse "0110"-style strings. Throws std::invalid_argument on other input.
  static StateAssignment from_string(std::string_view text);
  /// Decode an index into n bits, b_1 most significant.
  static StateAssignment from_index(std::uint64_t index, int n);

  [[nodiscard]] int size() const { return static_cast<int>(bits_.size()); }
  [[nodiscard]] bool bit(int i) const { return bits_[static_cast<std::size_t>(i)] != 0; }
  void set_bit(int i, bool value) { bits_[static_cast<std::size_t>(i)] = value ? 1 : 0; }

  [[nodiscard]] std::uint64_t to_index() const;
  [[nodiscard]] std::string to_string() const;

  friend auto operator<=>(const StateAssignment&, const StateAssignment&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Pointwise operators for DdManager::apply. And/Or/Diff require 0/1-valued
/// operands; Diff(f,g) computes the set difference f AND NOT g.
enum class ApplyOp : std::uint8_t { Add, Sub, Mul, Max, Min, And, Or, Diff };

/// Handle to a diagram node. Cheap to copy; valid for the lifetime of its
/// manager. Canonicity makes operator== a semantic function-equality test.
class Dd {
 public:
  Dd() = default;

  [[nodiscard]] DdManager* manager() const { return mgr_; }
  [[nodiscard]] std::uint32_t id() const { return id_; }
  [[nodiscard]] explicit operator bool() const { return mgr_ != nullptr; }

  [[nodiscard]] bool is_leaf() const;
  /// Value of a terminal node; throws if this is an internal node.
  [[nodiscard]] double leaf_value() const;
  /// Top variable of an internal node; throws on terminals.
  [[nodiscard]] VarId top_var() const;

  friend bool operator==(Dd a, Dd b) { return a.mgr_ == b.mgr_ && a.id_ == b.id_; }

 private:
  friend class DdManager;
  Dd(DdManager* mgr, std::uint32_t id) : mgr_(mgr), id_(id) {}

  DdManager* mgr_ = nullptr;
  std::uint32_t id_ = 0;
};

/// Node manager: unique tables for terminals and internal nodes plus a
/// memo cache for the recursive operators. One manager per model/experiment;
/// all diagrams combined by an operation must come from the same manager.
/// Single-threaded: diagrams of one manager must be used from one thread
/// at a time. Nodes are never freed (no garbage collection).
class DdManager {
 public:
  explicit DdManager(int state_var_count);
  ~DdManager();

  DdManager(const DdManager&) = delete;
  DdManager& operator=(const DdManager&) = delete;

  /// Number n of state variables (the manager handles 2n decision variables).
  [[nodiscard]] int state_var_count() const { return n_; }
  [[nodiscard]] int var_count() const { return 2 * n_; }

  // --- construction ---------------------------------------------------

  /// Unique terminal for `value`. Finite values only; -0.0 is normalized
  /// to +0.0 so the zero terminal has a single identity.
  Dd constant(double value);
  [[nodiscard]] Dd zero() const { return Dd(const_cast<DdManager*>(this), 0); }
  [[nodiscard]] Dd one() const { return Dd(const_cast<DdManager*>(this), 1); }

  /// Diagram mapping v=true to 1 and v=false to 0.
  Dd literal(VarId v);

  /// Unique internal node (v, hi, lo) with redundant-test elimination.
  /// v must precede every variable in hi and lo in the global order.
  Dd ite(VarId v, Dd hi, Dd lo);

  // --- operators --------------------------------------------------------

  /// Pointwise combination of f and g, memoized on (op, f, g).
  Dd apply(ApplyOp op, Dd f, Dd g);

  /// Pointwise 1-f on a 0/1-valued diagram.
  Dd bdd_not(Dd f);

  /// Sum over all assignments to `vars`; the result mentions none of them.
  Dd sum_abstract(Dd f, std::span<const VarId> vars);
  /// Boolean or-abstraction over `vars` (f must be 0/1-valued).
  Dd or_abstract(Dd f, std::span<const VarId> vars);
  /// sum_abstract over all primed variables.
  Dd sum_abstract_primed(Dd f);
  /// or_abstract over all primed variables.
  Dd or_abstract_primed(Dd f);

  /// Rename every variable to its partner. The support must be entirely
  /// unprimed or entirely primed; mixed support is rejected.
  Dd swap_prime(Dd f);

  /// Cofactor f|_{v=value}; v is absent from the result.
  Dd cofactor(Dd f, VarId v, bool value);

  /// 0/1 diagram of the predicate lo <= f(s) <= hi (closed interval).
  Dd threshold(Dd f, double lo, double hi);

  // --- queries ---------------------------------------------------------

  /// Leaf value reached by following `s` (unprimed variables only).
  [[nodiscard]] double eval(Dd f, const StateAssignment& s) const;
  /// Leaf value for a transition pair: unprimed vars read `s`, primed `next`.
  [[nodiscard]] double eval(Dd f, const StateAssignment& s,
                            const StateAssignment& next) const;

  /// All assignments where a 0/1 diagram over unprimed variables is 1,
  /// don't-cares expanded, in lexicographic bit-string order.
  [[nodiscard]] std::vector<StateAssignment> enumerate_states(Dd f) const;

  /// True iff every terminal of f is exactly 0.0 or 1.0.
  bool is_boolean(Dd f);

  [[nodiscard]] double min_leaf(Dd f) const;
  [[nodiscard]] double max_leaf(Dd f) const;
  /// max |leaf| — the sup-norm when f is a difference diagram.
  [[nodiscard]] double max_abs_leaf(Dd f) const;

  /// Variables mentioned by f, ascending.
  [[nodiscard]] std::vector<VarId> support(Dd f) const;
  /// Distinct nodes reachable from f, terminals included.
  [[nodiscard]] std::size_t node_count(Dd f) const;

  /// Structural audit: verifies ordering, no redundant tests, and unique
  /// (var,hi,lo)/leaf-value occupancy. Throws std::logic_error on violation.
  void check_structure(Dd f) const;

  /// Deterministic textual DAG dump (preorder ids) for golden-file tests.
  void dump(Dd f, std::ostream& os) const;
  [[nodiscard]] std::string dump_to_string(Dd f) const;

  /// Total nodes allocated by this manager (terminals included).
  [[nodiscard]] std::size_t total_nodes() const;

  /// Drop all memo-cache entries. Unique tables are untouched.
  void clear_caches();

 private:
  friend class Dd;
  struct Impl;
  Impl* impl_;
  int n_;
};

// Arithmetic sugar used throughout the planners; all route through apply().
inline Dd operator+(Dd f, Dd g) { return f.manager()->apply(ApplyOp::Add, f, g); }
inline Dd operator-(Dd f, Dd g) { return f.manager()->apply(ApplyOp::Sub, f, g); }
inline Dd operator*(Dd f, Dd g) { return f.manager()->apply(ApplyOp::Mul, f, g); }
inline Dd operator*(double c, Dd f) {
  return f.manager()->apply(ApplyOp::Mul, f.manager()->constant(c), f);
}
inline Dd max(Dd f, Dd g) { return f.manager()->apply(ApplyOp::Max, f, g); }
inline Dd min(Dd f, Dd g) { return f.manager()->apply(ApplyOp::Min, f, g); }

}  // namespace symdp
