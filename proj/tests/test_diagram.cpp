#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "symdp/diagram.hpp"
#include "test_util.hpp"

using namespace symdp;
using testutil::TestRng;

namespace {

double scalar_op(ApplyOp op, double a, double b) {
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

}  // namespace

TEST_CASE("constants are hash-consed") {
  DdManager mgr(2);
  Dd a = mgr.constant(0.0);
  Dd b = mgr.constant(0.0);
  CHECK(a == b);
  CHECK(a == mgr.zero());
  CHECK(a.id() == b.id());
  CHECK(mgr.constant(0.9).leaf_value() == 0.9);
  CHECK(mgr.constant(1.0) == mgr.one());
  // -0.0 folds into the zero terminal
  CHECK(mgr.constant(-0.0) == mgr.zero());
}

TEST_CASE("non-finite constants rejected") {
  DdManager mgr(1);
  CHECK_THROWS_AS(mgr.constant(std::numeric_limits<double>::infinity()), std::invalid_argument);
  CHECK_THROWS_AS(mgr.constant(std::nan("")), std::invalid_argument);
}

TEST_CASE("literal evaluates to indicator") {
  DdManager mgr(2);
  Dd x1 = mgr.literal(state_var(0));
  CHECK(mgr.eval(x1, StateAssignment::from_string("10")) == 1.0);
  CHECK(mgr.eval(x1, StateAssignment::from_string("01")) == 0.0);
  CHECK(mgr.apply(ApplyOp::Mul, x1, mgr.constant(0.0)) == mgr.zero());
  CHECK_THROWS_AS(mgr.literal(VarId{4}), std::invalid_argument);
}

TEST_CASE("ite eliminates redundant tests and is canonical") {
  DdManager mgr(2);
  Dd five = mgr.constant(5.0);
  CHECK(mgr.ite(state_var(0), five, five) == five);
  CHECK(mgr.ite(state_var(0), mgr.one(), mgr.zero()) == mgr.literal(state_var(0)));

  // (x1 ? (x2 ? 1 : 0) : 0) built twice yields the identical root
  Dd inner = mgr.ite(state_var(1), mgr.one(), mgr.zero());
  Dd f1 = mgr.ite(state_var(0), inner, mgr.zero());
  Dd f2 = mgr.ite(state_var(0), mgr.ite(state_var(1), mgr.one(), mgr.zero()), mgr.zero());
  CHECK(f1 == f2);

  // ordering violation is a contract error
  Dd x2first = mgr.ite(state_var(1), mgr.one(), mgr.zero());
  CHECK_THROWS_AS(mgr.ite(state_var(1), x2first, mgr.zero()), std::invalid_argument);
}

TEST_CASE("apply on terminals and idempotence") {
  DdManager mgr(2);
  CHECK(mgr.apply(ApplyOp::Add, mgr.constant(2.0), mgr.constant(3.0)).leaf_value() == 5.0);
  TestRng rng(21);
  for (int i = 0; i < 20; ++i) {
    Dd f = testutil::random_add(mgr, rng, 2, 3);
    CHECK(mgr.apply(ApplyOp::Max, f, f) == f);
    CHECK(mgr.apply(ApplyOp::Min, f, f) == f);
  }
}

TEST_CASE("boolean ops reject non-0/1 operands") {
  DdManager mgr(2);
  Dd notbool = mgr.constant(0.5);
  CHECK_THROWS_AS(mgr.apply(ApplyOp::And, notbool, mgr.one()), std::invalid_argument);
  CHECK_THROWS_AS(mgr.apply(ApplyOp::Or, mgr.one(), notbool), std::invalid_argument);
  CHECK_THROWS_AS(mgr.apply(ApplyOp::Diff, notbool, mgr.zero()), std::invalid_argument);
  CHECK_THROWS_AS(mgr.bdd_not(notbool), std::invalid_argument);
}

TEST_CASE("bdd_not involution and complement semantics") {
  DdManager mgr(2);
  CHECK(mgr.bdd_not(mgr.zero()) == mgr.one());
  TestRng rng(5);
  for (int i = 0; i < 30; ++i) {
    Dd f = testutil::random_bdd(mgr, rng, 2, 3);
    CHECK(mgr.bdd_not(mgr.bdd_not(f)) == f);
  }
  // complement of {00} over two variables is {01,10,11}
  Dd x1 = mgr.literal(state_var(0)), x2 = mgr.literal(state_var(1));
  Dd chi00 = mgr.apply(ApplyOp::And, mgr.bdd_not(x1), mgr.bdd_not(x2));
  auto states = mgr.enumerate_states(mgr.bdd_not(chi00));
  REQUIRE(states.size() == 3);
  CHECK(states[0].to_string() == "01");
  CHECK(states[1].to_string() == "10");
  CHECK(states[2].to_string() == "11");
}

TEST_CASE("pointwise soundness of apply on random diagrams") {
  DdManager mgr(6);
  TestRng rng(99);
  const ApplyOp arith[] = {ApplyOp::Add, ApplyOp::Sub, ApplyOp::Mul, ApplyOp::Max, ApplyOp::Min};
  const auto states = testutil::all_states(6);
  for (int i = 0; i < 300; ++i) {
    Dd f = testutil::random_add(mgr, rng, 6, 4);
    Dd g = testutil::random_add(mgr, rng, 6, 4);
    ApplyOp op = arith[rng.below(5)];
    Dd h = mgr.apply(op, f, g);
    mgr.check_structure(h);
    for (const auto& s : states)
      CHECK(mgr.eval(h, s) == scalar_op(op, mgr.eval(f, s), mgr.eval(g, s)));
  }
  const ApplyOp boolean[] = {ApplyOp::And, ApplyOp::Or, ApplyOp::Diff};
  for (int i = 0; i < 200; ++i) {
    Dd f = testutil::random_bdd(mgr, rng, 6, 4);
    Dd g = testutil::random_bdd(mgr, rng, 6, 4);
    ApplyOp op = boolean[rng.below(3)];
    Dd h = mgr.apply(op, f, g);
    mgr.check_structure(h);
    for (const auto& s : states)
      CHECK(mgr.eval(h, s) == scalar_op(op, mgr.eval(f, s), mgr.eval(g, s)));
  }
}

TEST_CASE("canonicity: same function built different ways yields same root") {
  DdManager mgr(8);
  TestRng rng(1234);
  for (int i = 0; i < 200; ++i) {
    const int nv = 2 + static_cast<int>(rng.below(7));  // up to 8 variables
    Dd f = testutil::random_bdd(mgr, rng, nv, 4);
    // rebuild as a disjunction of minterms, a completely different op order
    Dd g = mgr.zero();
    for (const auto& s : mgr.enumerate_states(f)) {
      Dd minterm = mgr.one();
      for (int v = 0; v < mgr.state_var_count(); ++v) {
        Dd lit = mgr.literal(state_var(v));
        minterm = mgr.apply(ApplyOp::And, minterm, s.bit(v) ? lit : mgr.bdd_not(lit));
      }
      g = mgr.apply(ApplyOp::Or, g, minterm);
    }
    // f may be over fewer than n vars; expand comparison over all of them
    CHECK(f == g);
  }
}

TEST_CASE("sum and or abstraction on constants") {
  DdManager mgr(3);
  std::vector<VarId> one_var{state_var(1)};
  Dd c = mgr.constant(3.25);
  CHECK(mgr.sum_abstract(c, one_var).leaf_value() == 6.5);
  CHECK(mgr.or_abstract(mgr.one(), one_var) == mgr.one());
  CHECK(mgr.sum_abstract(mgr.literal(state_var(1)), one_var) == mgr.one());
  // distinct-variable precondition
  std::vector<VarId> dup{state_var(1), state_var(1)};
  CHECK_THROWS_AS(mgr.sum_abstract(c, dup), std::invalid_argument);
}

TEST_CASE("sum_abstract equals exhaustive summation") {
  DdManager mgr(6);
  TestRng rng(77);
  for (int i = 0; i < 150; ++i) {
    Dd f = testutil::random_add(mgr, rng, 6, 4);
    // abstract a random subset of variables
    std::vector<VarId> vars;
    for (int v = 0; v < 6; ++v)
      if (rng.flip()) vars.push_back(state_var(v));
    Dd g = mgr.sum_abstract(f, vars);
    mgr.check_structure(g);
    for (const auto& s : testutil::all_states(6)) {
      // exhaustive: sum f over all assignments to `vars`, others fixed by s
      double want = 0.0;
      const int k = static_cast<int>(vars.size());
      for (std::uint64_t m = 0; m < (1ULL << k); ++m) {
        StateAssignment t = s;
        for (int j = 0; j < k; ++j) t.set_bit(vars[j].state_index(), (m >> j) & 1);
        want += mgr.eval(f, t);
      }
      CHECK(mgr.eval(g, s) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("or_abstract matches existential truth") {
  DdManager mgr(5);
  TestRng rng(31);
  for (int i = 0; i < 100; ++i) {
    Dd f = testutil::random_bdd(mgr, rng, 5, 4);
    std::vector<VarId> vars;
    for (int v = 0; v < 5; ++v)
      if (rng.flip()) vars.push_back(state_var(v));
    Dd g = mgr.or_abstract(f, vars);
    for (const auto& s : testutil::all_states(5)) {
      bool want = false;
      const int k = static_cast<int>(vars.size());
      for (std::uint64_t m = 0; m < (1ULL << k) && !want; ++m) {
        StateAssignment t = s;
        for (int j = 0; j < k; ++j) t.set_bit(vars[j].state_index(), (m >> j) & 1);
        want = mgr.eval(f, t) == 1.0;
      }
      CHECK(mgr.eval(g, s) == (want ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("swap_prime renames support and round-trips") {
  DdManager mgr(3);
  CHECK(mgr.swap_prime(mgr.constant(7.0)).leaf_value() == 7.0);
  CHECK(mgr.swap_prime(mgr.literal(state_var(1))) == mgr.literal(primed_var(1)));
  TestRng rng(8);
  for (int i = 0; i < 50; ++i) {
    Dd f = testutil::random_add(mgr, rng, 3, 4);
    Dd g = mgr.swap_prime(f);
    CHECK(mgr.swap_prime(g) == f);
    for (VarId v : mgr.support(g)) CHECK(v.is_primed());
  }
  // mixed support rejected
  Dd mixed = mgr.literal(state_var(0)) + mgr.literal(primed_var(1));
  CHECK_THROWS_AS(mgr.swap_prime(mixed), std::invalid_argument);
}

TEST_CASE("cofactor removes the variable") {
  DdManager mgr(2);
  CHECK(mgr.cofactor(mgr.literal(state_var(0)), state_var(0), true) == mgr.one());
  CHECK(mgr.cofactor(mgr.constant(2.5), state_var(1), false).leaf_value() == 2.5);
  TestRng rng(13);
  for (int i = 0; i < 50; ++i) {
    Dd f = testutil::random_add(mgr, rng, 2, 3);
    Dd g = mgr.cofactor(f, state_var(0), true);
    for (VarId v : mgr.support(g)) CHECK(v != state_var(0));
    for (const auto& s : testutil::all_states(2)) {
      StateAssignment t = s;
      t.set_bit(0, true);
      CHECK(mgr.eval(g, s) == mgr.eval(f, t));
    }
  }
}

TEST_CASE("threshold_to_bdd basics") {
  DdManager mgr(2);
  CHECK(mgr.threshold(mgr.constant(5.0), 4.0, 6.0) == mgr.one());
  const double inf = std::numeric_limits<double>::infinity();
  TestRng rng(3);
  Dd v = testutil::random_add(mgr, rng, 2, 3);
  CHECK(mgr.threshold(v, -inf, inf) == mgr.one());
  CHECK_THROWS_AS(mgr.threshold(v, 2.0, 1.0), std::invalid_argument);

  // two-leaf value function: the states in the low leaf's class
  Dd x1 = mgr.literal(state_var(0));
  Dd vf = mgr.apply(ApplyOp::Mul, x1, mgr.constant(10.0));  // 10 when x1, 0 otherwise
  Dd band = mgr.threshold(vf, 0.0 - 1.0, 0.0 + 1.0);
  auto states = mgr.enumerate_states(band);
  REQUIRE(states.size() == 2);
  CHECK(states[0].to_string() == "00");
  CHECK(states[1].to_string() == "01");
}

TEST_CASE("threshold agrees pointwise with the interval predicate") {
  DdManager mgr(6);
  TestRng rng(47);
  for (int i = 0; i < 150; ++i) {
    Dd f = testutil::random_add(mgr, rng, 6, 4);
    double lo = -3.0 + 6.0 * rng.unit();
    double hi = lo + 6.0 * rng.unit();
    Dd b = mgr.threshold(f, lo, hi);
    mgr.check_structure(b);
    for (const auto& s : testutil::all_states(6)) {
      const double w = mgr.eval(f, s);
      CHECK(mgr.eval(b, s) == ((lo <= w && w <= hi) ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("eval requires a full assignment and rejects primed lookups") {
  DdManager mgr(2);
  CHECK(mgr.eval(mgr.constant(4.0), StateAssignment::from_string("01")) == 4.0);
  CHECK_THROWS_AS(mgr.eval(mgr.one(), StateAssignment::from_string("0")),
                  std::invalid_argument);
  Dd primed = mgr.literal(primed_var(0));
  CHECK_THROWS_AS(mgr.eval(primed, StateAssignment::from_string("00")),
                  std::invalid_argument);
  CHECK(mgr.eval(primed, StateAssignment::from_string("00"),
                 StateAssignment::from_string("10")) == 1.0);
}

TEST_CASE("enumerate_states basics") {
  DdManager mgr(2);
  CHECK(mgr.enumerate_states(mgr.zero()).empty());
  auto all = mgr.enumerate_states(mgr.one());
  REQUIRE(all.size() == 4);
  CHECK(all[0].to_string() == "00");
  CHECK(all[1].to_string() == "01");
  CHECK(all[2].to_string() == "10");
  CHECK(all[3].to_string() == "11");
  CHECK_THROWS_AS(mgr.enumerate_states(mgr.constant(0.5)), std::invalid_argument);
  CHECK_THROWS_AS(mgr.enumerate_states(mgr.literal(primed_var(0))), std::invalid_argument);
}

TEST_CASE("structural audit passes for operation results") {
  DdManager mgr(6);
  TestRng rng(2024);
  for (int i = 0; i < 100; ++i) {
    Dd f = testutil::random_add(mgr, rng, 6, 4);
    Dd g = testutil::random_add(mgr, rng, 6, 4);
    mgr.check_structure(f + g);
    mgr.check_structure(f * g);
    mgr.check_structure(max(f, g));
    mgr.check_structure(mgr.sum_abstract_primed(f));
  }
}

TEST_CASE("deterministic dump for golden comparisons") {
  DdManager mgr(2);
  Dd x1 = mgr.literal(state_var(0));
  Dd f = mgr.apply(ApplyOp::Mul, x1, mgr.constant(0.5));
  CHECK(mgr.dump_to_string(f) ==
        "0: x0 hi=1 lo=2\n"
        "1: leaf 0.5\n"
        "2: leaf 0\n");
  // same diagram, same dump
  CHECK(mgr.dump_to_string(f) == mgr.dump_to_string(mgr.apply(ApplyOp::Mul, x1, mgr.constant(0.5))));
}

TEST_CASE("state assignment index round-trip") {
  for (std::uint64_t i = 0; i < 16; ++i) {
    auto s = StateAssignment::from_index(i, 4);
    CHECK(s.to_index() == i);
    CHECK(StateAssignment::from_string(s.to_string()) == s);
  }
  CHECK(StateAssignment::from_index(2, 2).to_string() == "10");
  CHECK_THROWS_AS(StateAssignment::from_string("0x1"), std::invalid_argument);
}

TEST_CASE("clear_caches keeps canonicity") {
  DdManager mgr(3);
  TestRng rng(55);
  Dd f = testutil::random_add(mgr, rng, 3, 3);
  Dd g = testutil::random_add(mgr, rng, 3, 3);
  Dd before = f + g;
  mgr.clear_caches();
  CHECK(f + g == before);
}
