#include "symdp/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace symdp {
namespace {

constexpr double kRowSumSlack = 0x1.0p-48;  // a few ulps of product/sum rounding

// --- s-expression reader ----------------------------------------------------

struct SExpr {
  bool is_atom = false;
  std::string text;          // atom payload
  std::vector<SExpr> items;  // list payload
  int line = 0, col = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  struct Token {
    enum Kind { LParen, RParen, Atom, End } kind;
    std::string text;
    int line, col;
  };

  Token next() {
    skip_space();
    const int line = line_, col = col_;
    if (pos_ >= text_.size()) return {Token::End, "", line, col};
    const char c = text_[pos_];
    if (c == '(') {
      advance();
      return {Token::LParen, "(", line, col};
    }
    if (c == ')') {
      advance();
      return {Token::RParen, ")", line, col};
    }
    std::string atom;
    while (pos_ < text_.size()) {
      const char a = text_[pos_];
      if (a == '(' || a == ')' || a == ';' || std::isspace(static_cast<unsigned char>(a))) break;
      atom.push_back(a);
      advance();
    }
    return {Token::Atom, std::move(atom), line, col};
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : lexer_(text) { tok_ = lexer_.next(); }

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    while (tok_.kind != Lexer::Token::End) out.push_back(read());
    return out;
  }

 private:
  SExpr read() {
    if (tok_.kind == Lexer::Token::Atom) {
      SExpr e{true, tok_.text, {}, tok_.line, tok_.col};
      tok_ = lexer_.next();
      return e;
    }
    if (tok_.kind == Lexer::Token::LParen) {
      SExpr e{false, "", {}, tok_.line, tok_.col};
      tok_ = lexer_.next();
      while (tok_.kind != Lexer::Token::RParen) {
        if (tok_.kind == Lexer::Token::End)
          throw ParseError("unexpected end of input, missing ')'", tok_.line, tok_.col);
        e.items.push_back(read());
      }
      tok_ = lexer_.next();
      return e;
    }
    throw ParseError("unexpected ')'", tok_.line, tok_.col);
  }

  Lexer lexer_;
  Lexer::Token tok_;
};

// --- parsing helpers --------------------------------------------------------

bool parse_number(std::string_view text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

[[noreturn]] void fail(const SExpr& at, const std::string& message) {
  throw ParseError(message, at.line, at.col);
}

const SExpr& expect_list(const SExpr& e, const char* what) {
  if (e.is_atom) fail(e, std::string("expected ") + what + ", found atom '" + e.text + "'");
  return e;
}

const std::string& expect_atom(const SExpr& e, const char* what) {
  if (!e.is_atom) fail(e, std::string("expected ") + what);
  return e.text;
}

const std::string& head(const SExpr& e) {
  if (e.is_atom || e.items.empty() || !e.items[0].is_atom)
    fail(e, "expected a named clause");
  return e.items[0].text;
}

// Decision tree over the unprimed variables: (v T F) | real. Built through
// apply so repeated or out-of-order variable tests are still well-formed.
Dd parse_tree(const SExpr& e, DdManager& mgr,
              const std::unordered_map<std::string, int>& var_index, bool probability) {
  if (e.is_atom) {
    double value;
    if (!parse_number(e.text, value)) fail(e, "expected a number or (var T F) tree, found '" + e.text + "'");
    if (!std::isfinite(value)) fail(e, "leaf value must be finite");
    if (probability && (value < 0.0 || value > 1.0))
      fail(e, "probability leaf " + e.text + " outside [0,1]");
    return mgr.constant(value);
  }
  if (e.items.size() != 3) fail(e, "tree node needs exactly (var T-branch F-branch)");
  const std::string& name = expect_atom(e.items[0], "variable name");
  auto it = var_index.find(name);
  if (it == var_index.end()) fail(e.items[0], "unknown variable name '" + name + "'");
  Dd t = parse_tree(e.items[1], mgr, var_index, probability);
  Dd f = parse_tree(e.items[2], mgr, var_index, probability);
  Dd lit = mgr.literal(state_var(it->second));
  return lit * t + mgr.bdd_not(lit) * f;
}

StateAssignment parse_assignment(const SExpr& e, const std::vector<std::string>& names,
                                 const std::unordered_map<std::string, int>& var_index,
                                 const char* clause) {
  StateAssignment s(static_cast<int>(names.size()));
  std::vector<bool> seen(names.size(), false);
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    const SExpr& pair = expect_list(e.items[i], "(name bit)");
    if (pair.items.size() != 2) fail(pair, std::string(clause) + " entry needs (name bit)");
    const std::string& name = expect_atom(pair.items[0], "variable name");
    auto it = var_index.find(name);
    if (it == var_index.end()) fail(pair.items[0], "unknown variable name '" + name + "'");
    if (seen[static_cast<std::size_t>(it->second)])
      fail(pair.items[0], "variable '" + name + "' assigned twice in " + clause);
    seen[static_cast<std::size_t>(it->second)] = true;
    const std::string& bit = expect_atom(pair.items[1], "bit");
    if (bit != "0" && bit != "1") fail(pair.items[1], "bit must be 0 or 1");
    s.set_bit(it->second, bit == "1");
  }
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!seen[i]) fail(e, std::string(clause) + " is missing variable '" + names[i] + "'");
  return s;
}

// --- serialization helpers ---------------------------------------------------

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

void write_tree(const FactoredMdp& m, Dd d, std::string& out) {
  if (d.is_leaf()) {
    out += format_double(d.leaf_value());
    return;
  }
  DdManager& mgr = *m.manager;
  const VarId v = d.top_var();
  out += '(';
  out += m.names[static_cast<std::size_t>(v.state_index())];
  out += ' ';
  write_tree(m, mgr.cofactor(d, v, true), out);
  out += ' ';
  write_tree(m, mgr.cofactor(d, v, false), out);
  out += ')';
}

void write_assignment(const FactoredMdp& m, const StateAssignment& s, std::string& out) {
  for (int i = 0; i < m.var_count(); ++i) {
    if (i) out += ' ';
    out += '(';
    out += m.names[static_cast<std::size_t>(i)];
    out += s.bit(i) ? " 1)" : " 0)";
  }
}

}  // namespace

int FactoredMdp::action_index(std::string_view name) const {
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i].name == name) return static_cast<int>(i);
  return -1;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& issue : issues) {
    os << "action '" << issue.action << "'";
    if (issue.variable >= 0) os << ", variable " << issue.variable;
    os << ": " << issue.message << "\n";
  }
  return os.str();
}

FactoredMdp parse_model(std::string_view text) {
  Reader reader(text);
  std::vector<SExpr> clauses = reader.read_all();
  if (clauses.empty()) throw ParseError("empty model document", 1, 1);

  // (variables name+)
  const SExpr& vars_clause = expect_list(clauses[0], "(variables ...)");
  if (head(vars_clause) != "variables") fail(vars_clause, "model must start with (variables ...)");
  if (vars_clause.items.size() < 2) fail(vars_clause, "at least one variable required");

  FactoredMdp m;
  std::unordered_map<std::string, int> var_index;
  for (std::size_t i = 1; i < vars_clause.items.size(); ++i) {
    const std::string& name = expect_atom(vars_clause.items[i], "variable name");
    double dummy;
    if (parse_number(name, dummy)) fail(vars_clause.items[i], "variable name may not be a number");
    if (!var_index.emplace(name, static_cast<int>(m.names.size())).second)
      fail(vars_clause.items[i], "duplicate variable name '" + name + "'");
    m.names.push_back(name);
  }
  m.manager = std::make_unique<DdManager>(m.var_count());
  DdManager& mgr = *m.manager;

  bool have_discount = false, have_start = false;
  for (std::size_t ci = 1; ci < clauses.size(); ++ci) {
    const SExpr& clause = expect_list(clauses[ci], "a model clause");
    const std::string& kind = head(clause);
    if (kind == "discount") {
      if (have_discount) fail(clause, "duplicate (discount ...)");
      if (clause.items.size() != 2) fail(clause, "(discount real) takes one value");
      double g;
      if (!parse_number(expect_atom(clause.items[1], "discount value"), g))
        fail(clause.items[1], "discount must be a number");
      if (!(g >= 0.0 && g <= 1.0)) fail(clause.items[1], "discount must lie in [0,1]");
      m.gamma = g;
      have_discount = true;
    } else if (kind == "start") {
      if (have_start) fail(clause, "duplicate (start ...)");
      m.start = parse_assignment(clause, m.names, var_index, "start");
      have_start = true;
    } else if (kind == "absorbing") {
      if (m.absorbing) fail(clause, "duplicate (absorbing ...)");
      m.absorbing = parse_assignment(clause, m.names, var_index, "absorbing");
    } else if (kind == "action") {
      if (clause.items.size() < 2) fail(clause, "action needs a name");
      ActionSpec action;
      action.name = expect_atom(clause.items[1], "action name");
      if (m.action_index(action.name) >= 0)
        fail(clause.items[1], "duplicate action name '" + action.name + "'");
      if (clause.items.size() == 2)
        fail(clause, "empty body in action '" + action.name + "'");
      action.cpts.assign(static_cast<std::size_t>(m.var_count()), Dd());
      std::vector<bool> have_cpt(static_cast<std::size_t>(m.var_count()), false);
      bool have_reward = false;
      for (std::size_t i = 2; i < clause.items.size(); ++i) {
        const SExpr& entry = expect_list(clause.items[i], "(var tree) or (reward tree)");
        if (entry.items.size() != 2) fail(entry, "expected (name tree)");
        const std::string& name = expect_atom(entry.items[0], "cpt or reward label");
        if (name == "reward") {
          if (have_reward) fail(entry, "duplicate reward in action '" + action.name + "'");
          action.reward = parse_tree(entry.items[1], mgr, var_index, false);
          have_reward = true;
          continue;
        }
        auto it = var_index.find(name);
        if (it == var_index.end()) fail(entry.items[0], "unknown variable name '" + name + "'");
        const auto v = static_cast<std::size_t>(it->second);
        if (have_cpt[v])
          fail(entry.items[0], "duplicate cpt for '" + name + "' in action '" + action.name + "'");
        action.cpts[v] = parse_tree(entry.items[1], mgr, var_index, true);
        have_cpt[v] = true;
      }
      for (int v = 0; v < m.var_count(); ++v)
        if (!have_cpt[static_cast<std::size_t>(v)])
          fail(clause, "action '" + action.name + "' is missing a cpt for '" +
                            m.names[static_cast<std::size_t>(v)] + "'");
      if (!have_reward) fail(clause, "action '" + action.name + "' is missing (reward tree)");
      m.actions.push_back(std::move(action));
    } else {
      fail(clause, "unknown clause '" + kind + "'");
    }
  }
  if (!have_discount) fail(clauses[0], "missing (discount ...) clause");
  if (!have_start) fail(clauses[0], "missing (start ...) clause");
  if (m.actions.empty()) fail(clauses[0], "model declares no actions");
  if (m.gamma == 1.0 && !m.absorbing)
    fail(clauses[0], "discount 1 requires a declared (absorbing ...) state");
  return m;
}

FactoredMdp parse_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::string serialize_model(const FactoredMdp& m) {
  std::string out = "(variables";
  for (const auto& name : m.names) {
    out += ' ';
    out += name;
  }
  out += ")\n(discount " + format_double(m.gamma) + ")\n(start ";
  write_assignment(m, m.start, out);
  out += ")\n";
  if (m.absorbing) {
    out += "(absorbing ";
    write_assignment(m, *m.absorbing, out);
    out += ")\n";
  }
  for (const auto& action : m.actions) {
    out += "(action " + action.name + "\n";
    for (int i = 0; i < m.var_count(); ++i) {
      out += "  (" + m.names[static_cast<std::size_t>(i)] + " ";
      write_tree(m, action.cpts[static_cast<std::size_t>(i)], out);
      out += ")\n";
    }
    out += "  (reward ";
    write_tree(m, action.reward, out);
    out += "))\n";
  }
  return out;
}

Dd action_transition(const FactoredMdp& m, int action) {
  const ActionSpec& a = m.actions[static_cast<std::size_t>(action)];
  if (a.transition) return *a.transition;
  DdManager& mgr = *m.manager;
  Dd p = mgr.one();
  for (int i = 0; i < m.var_count(); ++i) {
    Dd cpt = a.cpts[static_cast<std::size_t>(i)];
    Dd lit = mgr.literal(primed_var(i));
    Dd term = lit * cpt + mgr.bdd_not(lit) * (mgr.one() - cpt);
    p = p * term;
  }
  a.transition = p;
  return p;
}

Dd action_edges(const FactoredMdp& m, int action) {
  const ActionSpec& a = m.actions[static_cast<std::size_t>(action)];
  if (a.edges) return *a.edges;
  Dd p = action_transition(m, action);
  Dd e = m.manager->threshold(p, std::numeric_limits<double>::denorm_min(),
                              std::numeric_limits<double>::infinity());
  a.edges = e;
  return e;
}

ValidationReport validate_model(const FactoredMdp& m) {
  ValidationReport report;
  DdManager& mgr = *m.manager;
  for (int ai = 0; ai < m.action_count(); ++ai) {
    const ActionSpec& action = m.actions[static_cast<std::size_t>(ai)];
    for (int i = 0; i < m.var_count(); ++i) {
      Dd cpt = action.cpts[static_cast<std::size_t>(i)];
      const double lo = mgr.min_leaf(cpt), hi = mgr.max_leaf(cpt);
      if (lo < 0.0 || hi > 1.0)
        report.issues.push_back(
            {action.name, i, "cpt leaf outside [0,1]: [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "]"});
    }
    if (!std::isfinite(mgr.min_leaf(action.reward)) ||
        !std::isfinite(mgr.max_leaf(action.reward)))
      report.issues.push_back({action.name, -1, "non-finite reward leaf"});

    Dd row_sum = mgr.sum_abstract_primed(action_transition(m, ai));
    const double lo = mgr.min_leaf(row_sum), hi = mgr.max_leaf(row_sum);
    if (std::abs(lo - 1.0) > kRowSumSlack || std::abs(hi - 1.0) > kRowSumSlack)
      report.issues.push_back(
          {action.name, -1, "transition rows do not sum to 1: [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]"});
  }

  if (m.gamma == 1.0) {
    if (!m.absorbing) {
      report.issues.push_back({"", -1, "discount 1 without a declared absorbing state"});
      return report;
    }
    const StateAssignment& goal = *m.absorbing;
    for (int ai = 0; ai < m.action_count(); ++ai) {
      const ActionSpec& action = m.actions[static_cast<std::size_t>(ai)];
      if (mgr.eval(action_transition(m, ai), goal, goal) != 1.0)
        report.issues.push_back({action.name, -1, "declared absorbing state is not a sink"});
      if (mgr.eval(action.reward, goal) != 0.0)
        report.issues.push_back({action.name, -1, "absorbing state has nonzero reward"});
    }
    // Every state reachable from the start must still be able to reach the goal.
    Dd edges = mgr.zero();
    for (int ai = 0; ai < m.action_count(); ++ai)
      edges = mgr.apply(ApplyOp::Or, edges, action_edges(m, ai));
    auto minterm = [&](const StateAssignment& s) {
      Dd chi = mgr.one();
      for (int i = 0; i < m.var_count(); ++i) {
        Dd lit = mgr.literal(state_var(i));
        chi = mgr.apply(ApplyOp::And, chi, s.bit(i) ? lit : mgr.bdd_not(lit));
      }
      return chi;
    };
    Dd forward = minterm(m.start);
    while (true) {
      Dd next = mgr.swap_prime(
          mgr.or_abstract(mgr.apply(ApplyOp::And, forward, edges),
                          [&] {
                            std::vector<VarId> vs;
                            for (int i = 0; i < m.var_count(); ++i) vs.push_back(state_var(i));
                            return vs;
                          }()));
      Dd grown = mgr.apply(ApplyOp::Or, forward, next);
      if (grown == forward) break;
      forward = grown;
    }
    Dd backward = minterm(goal);
    while (true) {
      Dd pre = mgr.or_abstract_primed(
          mgr.apply(ApplyOp::And, edges, mgr.swap_prime(backward)));
      Dd grown = mgr.apply(ApplyOp::Or, backward, pre);
      if (grown == backward) break;
      backward = grown;
    }
    if (!(mgr.apply(ApplyOp::Diff, forward, backward) == mgr.zero()))
      report.issues.push_back(
          {"", -1, "a state reachable from the start cannot reach the absorbing state"});
  }
  return report;
}

}  // namespace symdp
