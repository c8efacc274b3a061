#include "symdp/diagram.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace symdp {
namespace {

constexpr std::uint32_t kLeafVar = 0xFFFFFFFFu;
constexpr std::uint32_t kMaxNodes = 1u << 24;  // unique-table key packs ids into 24 bits

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

// Open-addressing map from packed 64-bit keys to node ids. All keys used by
// the manager leave at least one var/op bit clear, so ~0 can be the empty slot.
class FlatMap64 {
 public:
  FlatMap64() { slots_.assign(kInitialCap, Slot{kEmptyKey, 0}); }

  bool lookup(std::uint64_t key, std::uint32_t& out) const {
    std::size_t i = mix64(key) & mask_;
    while (true) {
      const Slot& s = slots_[i];
      if (s.key == kEmptyKey) return false;
      if (s.key == key) {
        out = s.val;
        return true;
      }
      i = (i + 1) & mask_;
    }
  }

  void store(std::uint64_t key, std::uint32_t val) {
    if ((count_ + 1) * 10 >= slots_.size() * 7) grow();
    insert_unchecked(key, val);
  }

  void clear() {
    for (auto& s : slots_) s.key = kEmptyKey;
    count_ = 0;
  }

 private:
  struct Slot {
    std::uint64_t key;
    std::uint32_t val;
  };
  static constexpr std::uint64_t kEmptyKey = ~0ULL;
  static constexpr std::size_t kInitialCap = 1024;

  void insert_unchecked(std::uint64_t key, std::uint32_t val) {
    std::size_t i = mix64(key) & mask_;
    while (true) {
      Slot& s = slots_[i];
      if (s.key == kEmptyKey) {
        s = {key, val};
        ++count_;
        return;
      }
      if (s.key == key) {
        s.val = val;
        return;
      }
      i = (i + 1) & mask_;
    }
  }

  void grow() {
    std::vector<Slot> old = std::move(slots_);
    slots_.assign(old.size() * 2, Slot{kEmptyKey, 0});
    mask_ = slots_.size() - 1;
    count_ = 0;
    for (const Slot& s : old)
      if (s.key != kEmptyKey) insert_unchecked(s.key, s.val);
  }

  std::vector<Slot> slots_;
  std::size_t mask_ = kInitialCap - 1;
  std::size_t count_ = 0;
};

// Memo opcodes beyond the pointwise ApplyOp range.
enum MemoOp : std::uint8_t {
  kMemoApplyBase = 0,  // 0..7 taken by ApplyOp
  kMemoSwap = 8,
  kMemoCofactor = 9,
  kMemoSumAbs = 10,
  kMemoOrAbs = 11,
};

inline std::uint64_t pack_memo(std::uint8_t op, std::uint32_t a, std::uint32_t b) {
  return (std::uint64_t{op} << 56) | (std::uint64_t{a} << 28) | std::uint64_t{b};
}

inline bool commutative(ApplyOp op) {
  switch (op) {
    case ApplyOp::Add:
    case ApplyOp::Mul:
    case ApplyOp::Max:
    case ApplyOp::Min:
    case ApplyOp::And:
    case ApplyOp::Or:
      return true;
    default:
      return false;
  }
}

inline double fold_scalar(ApplyOp op, double a, double b) {
  switch (op) {
    case ApplyOp::Add: return a + b;
    case ApplyOp::Sub: return a - b;
    case ApplyOp::Mul: return a * b;
    case ApplyOp::Max: return a > b ? a : b;
    case ApplyOp::Min: return a < b ? a : b;
    case ApplyOp::And: return (a == 1.0 && b == 1.0) ? 1.0 : 0.0;
    case ApplyOp::Or: return (a == 1.0 || b == 1.0) ? 1.0 : 0.0;
    case ApplyOp::Diff: return (a == 1.0 && b == 0.0) ? 1.0 : 0.0;
  }
  return 0.0;
}

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace

struct Node {
  std::uint32_t var;  // kLeafVar for terminals
  std::uint32_t hi;   // for terminals: index into leaf_values
  std::uint32_t lo;
};

struct DdManager::Impl {
  int n;
  std::vector<Node> nodes;
  std::vector<double> leaf_values;
  FlatMap64 leaf_unique;
  FlatMap64 node_unique;
  FlatMap64 memo;
  std::unordered_set<std::uint32_t> bool_known;
  std::uint32_t primed_cube = 0;    // cube over all X'_i
  std::uint32_t unprimed_cube = 0;  // cube over all X_i

  explicit Impl(int nvars) : n(nvars) {
    nodes.reserve(4096);
    mk_leaf(0.0);  // id 0
    mk_leaf(1.0);  // id 1
    std::uint32_t pc = 1, uc = 1;
    for (int i = n - 1; i >= 0; --i) {
      pc = mk_node(primed_var(i).index, pc, 0);
      uc = mk_node(state_var(i).index, uc, 0);
    }
    primed_cube = pc;
    unprimed_cube = uc;
  }

  [[nodiscard]] bool is_leaf(std::uint32_t id) const { return nodes[id].var == kLeafVar; }
  [[nodiscard]] double leaf_val(std::uint32_t id) const { return leaf_values[nodes[id].hi]; }
  [[nodiscard]] std::uint32_t var_of(std::uint32_t id) const { return nodes[id].var; }
  [[nodiscard]] std::uint32_t hi_of(std::uint32_t id) const { return nodes[id].hi; }
  [[nodiscard]] std::uint32_t lo_of(std::uint32_t id) const { return nodes[id].lo; }

  std::uint32_t mk_leaf(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("diagram leaf must be finite");
    if (value == 0.0) value = 0.0;  // collapse -0.0 into the zero terminal
    const std::uint64_t key = std::bit_cast<std::uint64_t>(value);
    std::uint32_t id;
    if (leaf_unique.lookup(key, id)) return id;
    if (nodes.size() >= kMaxNodes) throw std::runtime_error("diagram node table full");
    id = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back({kLeafVar, static_cast<std::uint32_t>(leaf_values.size()), 0});
    leaf_values.push_back(value);
    leaf_unique.store(key, id);
    return id;
  }

  std::uint32_t mk_node(std::uint32_t var, std::uint32_t hi, std::uint32_t lo) {
    if (hi == lo) return hi;
    assert(var < var_of(hi) && var < var_of(lo));
    const std::uint64_t key =
        (std::uint64_t{var} << 48) | (std::uint64_t{hi} << 24) | std::uint64_t{lo};
    std::uint32_t id;
    if (node_unique.lookup(key, id)) return id;
    if (nodes.size() >= kMaxNodes) throw std::runtime_error("diagram node table full");
    id = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back({var, hi, lo});
    node_unique.store(key, id);
    return id;
  }

  std::uint32_t apply_rec(ApplyOp op, std::uint32_t a, std::uint32_t b) {
    const bool la = is_leaf(a), lb = is_leaf(b);
    if (la && lb) return mk_leaf(fold_scalar(op, leaf_val(a), leaf_val(b)));
    switch (op) {
      case ApplyOp::Add:
        if (a == 0) return b;
        if (b == 0) return a;
        break;
      case ApplyOp::Sub:
        if (b == 0) return a;
        if (a == b) return 0;
        break;
      case ApplyOp::Mul:
        if (a == 0 || b == 0) return 0;
        if (a == 1) return b;
        if (b == 1) return a;
        break;
      case ApplyOp::Max:
      case ApplyOp::Min:
        if (a == b) return a;
        break;
      case ApplyOp::And:
        if (a == 0 || b == 0) return 0;
        if (a == 1) return b;
        if (b == 1) return a;
        if (a == b) return a;
        break;
      case ApplyOp::Or:
        if (a == 1 || b == 1) return 1;
        if (a == 0) return b;
        if (b == 0) return a;
        if (a == b) return a;
        break;
      case ApplyOp::Diff:
        if (a == 0 || b == 1) return 0;
        if (b == 0) return a;
        if (a == b) return 0;
        break;
    }
    std::uint32_t x = a, y = b;
    if (commutative(op) && x > y) std::swap(x, y);
    const std::uint64_t key = pack_memo(static_cast<std::uint8_t>(op), x, y);
    std::uint32_t cached;
    if (memo.lookup(key, cached)) return cached;

    const std::uint32_t va = var_of(x), vb = var_of(y);
    const std::uint32_t top = va < vb ? va : vb;
    const std::uint32_t xh = va == top ? hi_of(x) : x;
    const std::uint32_t xl = va == top ? lo_of(x) : x;
    const std::uint32_t yh = vb == top ? hi_of(y) : y;
    const std::uint32_t yl = vb == top ? lo_of(y) : y;
    const std::uint32_t r =
        mk_node(top, apply_rec(op, xh, yh), apply_rec(op, xl, yl));
    memo.store(key, r);
    return r;
  }

  std::uint32_t cofactor_rec(std::uint32_t f, std::uint32_t v, bool value) {
    if (is_leaf(f) || var_of(f) > v) return f;
    if (var_of(f) == v) return value ? hi_of(f) : lo_of(f);
    const std::uint64_t key =
        pack_memo(kMemoCofactor, f, (v << 1) | (value ? 1u : 0u));
    std::uint32_t cached;
    if (memo.lookup(key, cached)) return cached;
    const std::uint32_t r = mk_node(var_of(f), cofactor_rec(hi_of(f), v, value),
                                    cofactor_rec(lo_of(f), v, value));
    memo.store(key, r);
    return r;
  }

  int cube_length(std::uint32_t cube) const {
    int k = 0;
    while (cube != 1) {
      ++k;
      cube = hi_of(cube);
    }
    return k;
  }

  std::uint32_t sum_abs_rec(std::uint32_t f, std::uint32_t cube) {
    if (cube == 1) return f;
    if (is_leaf(f)) return mk_leaf(std::ldexp(leaf_val(f), cube_length(cube)));
    const std::uint64_t key = pack_memo(kMemoSumAbs, f, cube);
    std::uint32_t cached;
    if (memo.lookup(key, cached)) return cached;
    const std::uint32_t fv = var_of(f), cv = var_of(cube);
    std::uint32_t r;
    if (cv < fv) {
      const std::uint32_t sub = sum_abs_rec(f, hi_of(cube));
      r = apply_rec(ApplyOp::Add, sub, sub);
    } else if (fv < cv) {
      r = mk_node(fv, sum_abs_rec(hi_of(f), cube), sum_abs_rec(lo_of(f), cube));
    } else {
      r = apply_rec(ApplyOp::Add, sum_abs_rec(hi_of(f), hi_of(cube)),
                    sum_abs_rec(lo_of(f), hi_of(cube)));
    }
    memo.store(key, r);
    return r;
  }

  std::uint32_t or_abs_rec(std::uint32_t f, std::uint32_t cube) {
    if (cube == 1 || is_leaf(f)) return f;
    const std::uint64_t key = pack_memo(kMemoOrAbs, f, cube);
    std::uint32_t cached;
    if (memo.lookup(key, cached)) return cached;
    const std::uint32_t fv = var_of(f), cv = var_of(cube);
    std::uint32_t r;
    if (cv < fv) {
      r = or_abs_rec(f, hi_of(cube));
    } else if (fv < cv) {
      r = mk_node(fv, or_abs_rec(hi_of(f), cube), or_abs_rec(lo_of(f), cube));
    } else {
      r = apply_rec(ApplyOp::Or, or_abs_rec(hi_of(f), hi_of(cube)),
                    or_abs_rec(lo_of(f), hi_of(cube)));
    }
    memo.store(key, r);
    return r;
  }

  std::uint32_t swap_rec(std::uint32_t f) {
    if (is_leaf(f)) return f;
    const std::uint64_t key = pack_memo(kMemoSwap, f, 0);
    std::uint32_t cached;
    if (memo.lookup(key, cached)) return cached;
    const std::uint32_t r =
        mk_node(var_of(f) ^ 1u, swap_rec(hi_of(f)), swap_rec(lo_of(f)));
    memo.store(key, r);
    return r;
  }

  bool is_boolean(std::uint32_t f) {
    if (bool_known.count(f)) return true;
    std::vector<std::uint32_t> stack{f};
    std::unordered_set<std::uint32_t> seen;
    while (!stack.empty()) {
      const std::uint32_t id = stack.back();
      stack.pop_back();
      if (!seen.insert(id).second || bool_known.count(id)) continue;
      if (is_leaf(id)) {
        const double v = leaf_val(id);
        if (v != 0.0 && v != 1.0) return false;
      } else {
        stack.push_back(hi_of(id));
        stack.push_back(lo_of(id));
      }
    }
    bool_known.insert(seen.begin(), seen.end());
    return true;
  }

  void visit(std::uint32_t f, std::unordered_set<std::uint32_t>& seen) const {
    std::vector<std::uint32_t> stack{f};
    while (!stack.empty()) {
      const std::uint32_t id = stack.back();
      stack.pop_back();
      if (!seen.insert(id).second) continue;
      if (!is_leaf(id)) {
        stack.push_back(hi_of(id));
        stack.push_back(lo_of(id));
      }
    }
  }

  std::uint32_t make_cube(std::span<const VarId> vars) {
    std::vector<std::uint32_t> sorted;
    sorted.reserve(vars.size());
    for (VarId v : vars) {
      if (v.index >= static_cast<std::uint32_t>(2 * n))
        throw std::invalid_argument("variable index out of range");
      sorted.push_back(v.index);
    }
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("abstraction variables must be distinct");
    std::uint32_t cube = 1;
    for (auto it = sorted.rbegin(); it != sorted.rend(); ++it)
      cube = mk_node(*it, cube, 0);
    return cube;
  }
};

// --- StateAssignment ------------------------------------------------------

StateAssignment StateAssignment::from_string(std::string_view text) {
  StateAssignment s(static_cast<int>(text.size()));
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1')
      s.bits_[i] = 1;
    else if (text[i] != '0')
      throw std::invalid_argument("state bit-string must contain only 0/1");
  }
  return s;
}

StateAssignment StateAssignment::from_index(std::uint64_t index, int n) {
  StateAssignment s(n);
  for (int i = 0; i < n; ++i)
    s.bits_[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>((index >> (n - 1 - i)) & 1u);
  return s;
}

std::uint64_t StateAssignment::to_index() const {
  std::uint64_t idx = 0;
  for (std::uint8_t b : bits_) idx = (idx << 1) | b;
  return idx;
}

std::string StateAssignment::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) s[i] = '1';
  return s;
}

// --- Dd ---------------------------------------------------------------------

bool Dd::is_leaf() const { return mgr_->impl_->is_leaf(id_); }

double Dd::leaf_value() const {
  if (!is_leaf()) throw std::logic_error("leaf_value on internal node");
  return mgr_->impl_->leaf_val(id_);
}

VarId Dd::top_var() const {
  if (is_leaf()) throw std::logic_error("top_var on terminal node");
  return {mgr_->impl_->var_of(id_)};
}

// --- DdManager -------------------------------------------------------------

DdManager::DdManager(int state_var_count) : n_(state_var_count) {
  if (state_var_count < 1 || state_var_count > 30000)
    throw std::invalid_argument("state variable count out of range");
  impl_ = new Impl(state_var_count);
}

DdManager::~DdManager() { delete impl_; }

Dd DdManager::constant(double value) { return Dd(this, impl_->mk_leaf(value)); }

Dd DdManager::literal(VarId v) {
  if (v.index >= static_cast<std::uint32_t>(var_count()))
    throw std::invalid_argument("variable index out of range");
  return Dd(this, impl_->mk_node(v.index, 1, 0));
}

Dd DdManager::ite(VarId v, Dd hi, Dd lo) {
  if (hi.manager() != this || lo.manager() != this)
    throw std::invalid_argument("ite: operands from a different manager");
  if (v.index >= static_cast<std::uint32_t>(var_count()))
    throw std::invalid_argument("variable index out of range");
  if (v.index >= impl_->var_of(hi.id()) || v.index >= impl_->var_of(lo.id()))
    throw std::invalid_argument("ite: variable must precede both branches");
  return Dd(this, impl_->mk_node(v.index, hi.id(), lo.id()));
}

Dd DdManager::apply(ApplyOp op, Dd f, Dd g) {
  if (f.manager() != this || g.manager() != this)
    throw std::invalid_argument("apply: operands from a different manager");
  if (op == ApplyOp::And || op == ApplyOp::Or || op == ApplyOp::Diff) {
    if (!impl_->is_boolean(f.id()) || !impl_->is_boolean(g.id()))
      throw std::invalid_argument("boolean apply on non-0/1 diagram");
  }
  return Dd(this, impl_->apply_rec(op, f.id(), g.id()));
}

Dd DdManager::bdd_not(Dd f) {
  if (f.manager() != this)
    throw std::invalid_argument("bdd_not: operand from a different manager");
  if (!impl_->is_boolean(f.id()))
    throw std::invalid_argument("bdd_not on non-0/1 diagram");
  return Dd(this, impl_->apply_rec(ApplyOp::Sub, 1, f.id()));
}

Dd DdManager::sum_abstract(Dd f, std::span<const VarId> vars) {
  if (f.manager() != this)
    throw std::invalid_argument("sum_abstract: operand from a different manager");
  return Dd(this, impl_->sum_abs_rec(f.id(), impl_->make_cube(vars)));
}

Dd DdManager::or_abstract(Dd f, std::span<const VarId> vars) {
  if (f.manager() != this)
    throw std::invalid_argument("or_abstract: operand from a different manager");
  if (!impl_->is_boolean(f.id()))
    throw std::invalid_argument("or_abstract on non-0/1 diagram");
  return Dd(this, impl_->or_abs_rec(f.id(), impl_->make_cube(vars)));
}

Dd DdManager::sum_abstract_primed(Dd f) {
  if (f.manager() != this)
    throw std::invalid_argument("sum_abstract: operand from a different manager");
  return Dd(this, impl_->sum_abs_rec(f.id(), impl_->primed_cube));
}

Dd DdManager::or_abstract_primed(Dd f) {
  if (f.manager() != this)
    throw std::invalid_argument("or_abstract: operand from a different manager");
  if (!impl_->is_boolean(f.id()))
    throw std::invalid_argument("or_abstract on non-0/1 diagram");
  return Dd(this, impl_->or_abs_rec(f.id(), impl_->primed_cube));
}

Dd DdManager::swap_prime(Dd f) {
  if (f.manager() != this)
    throw std::invalid_argument("swap_prime: operand from a different manager");
  bool any_primed = false, any_unprimed = false;
  for (VarId v : support(f)) (v.is_primed() ? any_primed : any_unprimed) = true;
  if (any_primed && any_unprimed)
    throw std::invalid_argument("swap_prime on mixed-support diagram");
  return Dd(this, impl_->swap_rec(f.id()));
}

Dd DdManager::cofactor(Dd f, VarId v, bool value) {
  if (f.manager() != this)
    throw std::invalid_argument("cofactor: operand from a different manager");
  if (v.index >= static_cast<std::uint32_t>(var_count()))
    throw std::invalid_argument("variable index out of range");
  return Dd(this, impl_->cofactor_rec(f.id(), v.index, value));
}

Dd DdManager::threshold(Dd f, double lo, double hi) {
  if (f.manager() != this)
    throw std::invalid_argument("threshold: operand from a different manager");
  if (!(lo <= hi)) throw std::invalid_argument("threshold: requires lo <= hi");
  std::unordered_map<std::uint32_t, std::uint32_t> local;
  auto rec = [&](auto&& self, std::uint32_t id) -> std::uint32_t {
    if (impl_->is_leaf(id)) {
      const double w = impl_->leaf_val(id);
      return (lo <= w && w <= hi) ? 1u : 0u;
    }
    auto it = local.find(id);
    if (it != local.end()) return it->second;
    const std::uint32_t r = impl_->mk_node(
        impl_->var_of(id), self(self, impl_->hi_of(id)), self(self, impl_->lo_of(id)));
    local.emplace(id, r);
    return r;
  };
  return Dd(this, rec(rec, f.id()));
}

double DdManager::eval(Dd f, const StateAssignment& s) const {
  if (s.size() != n_) throw std::invalid_argument("eval: assignment size mismatch");
  std::uint32_t id = f.id();
  while (!impl_->is_leaf(id)) {
    const VarId v{impl_->var_of(id)};
    if (v.is_primed())
      throw std::invalid_argument("eval: primed variable in single-state evaluation");
    id = s.bit(v.state_index()) ? impl_->hi_of(id) : impl_->lo_of(id);
  }
  return impl_->leaf_val(id);
}

double DdManager::eval(Dd f, const StateAssignment& s, const StateAssignment& next) const {
  if (s.size() != n_ || next.size() != n_)
    throw std::invalid_argument("eval: assignment size mismatch");
  std::uint32_t id = f.id();
  while (!impl_->is_leaf(id)) {
    const VarId v{impl_->var_of(id)};
    const bool bit = v.is_primed() ? next.bit(v.state_index()) : s.bit(v.state_index());
    id = bit ? impl_->hi_of(id) : impl_->lo_of(id);
  }
  return impl_->leaf_val(id);
}

std::vector<StateAssignment> DdManager::enumerate_states(Dd f) const {
  if (!const_cast<DdManager*>(this)->is_boolean(f))
    throw std::invalid_argument("enumerate_states on non-0/1 diagram");
  for (VarId v : support(f))
    if (v.is_primed())
      throw std::invalid_argument("enumerate_states: primed variable in support");
  std::vector<StateAssignment> out;
  StateAssignment cur(n_);
  auto rec = [&](auto&& self, std::uint32_t id, int i) -> void {
    if (id == 0) return;
    if (i == n_) {
      out.push_back(cur);
      return;
    }
    const std::uint32_t v = impl_->var_of(id);
    if (!impl_->is_leaf(id) && v == state_var(i).index) {
      cur.set_bit(i, false);
      self(self, impl_->lo_of(id), i + 1);
      cur.set_bit(i, true);
      self(self, impl_->hi_of(id), i + 1);
    } else {
      cur.set_bit(i, false);
      self(self, id, i + 1);
      cur.set_bit(i, true);
      self(self, id, i + 1);
    }
  };
  rec(rec, f.id(), 0);
  std::sort(out.begin(), out.end());
  return out;
}

bool DdManager::is_boolean(Dd f) { return impl_->is_boolean(f.id()); }

double DdManager::min_leaf(Dd f) const {
  std::unordered_set<std::uint32_t> seen;
  impl_->visit(f.id(), seen);
  double m = std::numeric_limits<double>::infinity();
  for (std::uint32_t id : seen)
    if (impl_->is_leaf(id)) m = std::min(m, impl_->leaf_val(id));
  return m;
}

double DdManager::max_leaf(Dd f) const {
  std::unordered_set<std::uint32_t> seen;
  impl_->visit(f.id(), seen);
  double m = -std::numeric_limits<double>::infinity();
  for (std::uint32_t id : seen)
    if (impl_->is_leaf(id)) m = std::max(m, impl_->leaf_val(id));
  return m;
}

double DdManager::max_abs_leaf(Dd f) const {
  std::unordered_set<std::uint32_t> seen;
  impl_->visit(f.id(), seen);
  double m = 0.0;
  for (std::uint32_t id : seen)
    if (impl_->is_leaf(id)) m = std::max(m, std::abs(impl_->leaf_val(id)));
  return m;
}

std::vector<VarId> DdManager::support(Dd f) const {
  std::unordered_set<std::uint32_t> seen;
  impl_->visit(f.id(), seen);
  std::vector<VarId> vars;
  for (std::uint32_t id : seen)
    if (!impl_->is_leaf(id)) vars.push_back({impl_->var_of(id)});
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

std::size_t DdManager::node_count(Dd f) const {
  std::unordered_set<std::uint32_t> seen;
  impl_->visit(f.id(), seen);
  return seen.size();
}

void DdManager::check_structure(Dd f) const {
  std::unordered_set<std::uint32_t> seen;
  impl_->visit(f.id(), seen);
  std::unordered_set<std::uint64_t> triples;
  std::unordered_set<std::uint64_t> leaf_bits;
  for (std::uint32_t id : seen) {
    if (impl_->is_leaf(id)) {
      const double v = impl_->leaf_val(id);
      if (!std::isfinite(v)) throw std::logic_error("audit: non-finite leaf");
      if (!leaf_bits.insert(std::bit_cast<std::uint64_t>(v)).second)
        throw std::logic_error("audit: duplicate leaf value");
      continue;
    }
    const std::uint32_t var = impl_->var_of(id);
    const std::uint32_t hi = impl_->hi_of(id), lo = impl_->lo_of(id);
    if (var >= static_cast<std::uint32_t>(var_count()))
      throw std::logic_error("audit: variable index out of range");
    if (hi == lo) throw std::logic_error("audit: redundant test not eliminated");
    if (var >= impl_->var_of(hi) || var >= impl_->var_of(lo))
      throw std::logic_error("audit: variable order violated");
    const std::uint64_t key =
        (std::uint64_t{var} << 48) | (std::uint64_t{hi} << 24) | std::uint64_t{lo};
    if (!triples.insert(key).second)
      throw std::logic_error("audit: duplicate (var,hi,lo) triple");
  }
}

void DdManager::dump(Dd f, std::ostream& os) const {
  std::unordered_map<std::uint32_t, std::size_t> ids;
  std::vector<std::uint32_t> order;
  auto number = [&](auto&& self, std::uint32_t id) -> void {
    if (ids.count(id)) return;
    ids.emplace(id, order.size());
    order.push_back(id);
    if (!impl_->is_leaf(id)) {
      self(self, impl_->hi_of(id));
      self(self, impl_->lo_of(id));
    }
  };
  number(number, f.id());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::uint32_t id = order[i];
    if (impl_->is_leaf(id)) {
      os << i << ": leaf " << format_double(impl_->leaf_val(id)) << "\n";
    } else {
      os << i << ": x" << impl_->var_of(id) << " hi=" << ids[impl_->hi_of(id)]
         << " lo=" << ids[impl_->lo_of(id)] << "\n";
    }
  }
}

std::string DdManager::dump_to_string(Dd f) const {
  std::ostringstream os;
  dump(f, os);
  return os.str();
}

std::size_t DdManager::total_nodes() const { return impl_->nodes.size(); }

void DdManager::clear_caches() { impl_->memo.clear(); }

}  // namespace symdp
