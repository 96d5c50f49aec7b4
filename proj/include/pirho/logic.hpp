// Copyright 2026 the pirho authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PIRHO_LOGIC_HPP_
#define PIRHO_LOGIC_HPP_

// Ownership assertions over resources, assertion-qualified refinement
// between processes, and sampled soundness checks for the proof rules of
// the refinement system.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pirho/generate.hpp"
#include "pirho/resources.hpp"
#include "pirho/safety.hpp"
#include "pirho/syntax.hpp"

namespace pirho {

// ---------------------------------------------------------------------------
// Assertion syntax.
//
//   p ::= true | false | p /\ q | p \/ q | p * q
//       | x@pub | x@pri | x=y | x!=y
//
// `*` is separating conjunction: the resource splits into two
// disjoint-domain parts, one satisfying each side.  `x@known` is accepted
// by the parser as sugar for `x@pub \/ x@pri`.

struct Assertion;
using AssertPtr = std::shared_ptr<const Assertion>;

struct TrueA {};
struct FalseA {};
struct AndA {
  AssertPtr left, right;
};
struct OrA {
  AssertPtr left, right;
};
struct StarA {
  AssertPtr left, right;
};
struct PubA {
  std::string var;
};
struct PriA {
  std::string var;
};
struct EqA {
  std::string left, right;
};
struct NeqA {
  std::string left, right;
};

struct Assertion {
  std::variant<TrueA, FalseA, AndA, OrA, StarA, PubA, PriA, EqA, NeqA> node;
};

inline AssertPtr assert_true() {
  return std::make_shared<Assertion>(Assertion{TrueA{}});
}
inline AssertPtr assert_false() {
  return std::make_shared<Assertion>(Assertion{FalseA{}});
}
inline AssertPtr assert_and(AssertPtr l, AssertPtr r) {
  return std::make_shared<Assertion>(
      Assertion{AndA{std::move(l), std::move(r)}});
}
inline AssertPtr assert_or(AssertPtr l, AssertPtr r) {
  return std::make_shared<Assertion>(
      Assertion{OrA{std::move(l), std::move(r)}});
}
inline AssertPtr assert_star(AssertPtr l, AssertPtr r) {
  return std::make_shared<Assertion>(
      Assertion{StarA{std::move(l), std::move(r)}});
}
inline AssertPtr assert_pub(std::string var) {
  return std::make_shared<Assertion>(Assertion{PubA{std::move(var)}});
}
inline AssertPtr assert_pri(std::string var) {
  return std::make_shared<Assertion>(Assertion{PriA{std::move(var)}});
}
inline AssertPtr assert_eq(std::string l, std::string r) {
  return std::make_shared<Assertion>(
      Assertion{EqA{std::move(l), std::move(r)}});
}
inline AssertPtr assert_neq(std::string l, std::string r) {
  return std::make_shared<Assertion>(
      Assertion{NeqA{std::move(l), std::move(r)}});
}
/// The "ownership is recorded, either way" disjunction.
inline AssertPtr assert_known(const std::string& var) {
  return assert_or(assert_pub(var), assert_pri(var));
}

inline bool assertion_equal(const AssertPtr& a, const AssertPtr& b) {
  struct V {
    const AssertPtr& b;
    bool operator()(const TrueA&) const {
      return std::holds_alternative<TrueA>(b->node);
    }
    bool operator()(const FalseA&) const {
      return std::holds_alternative<FalseA>(b->node);
    }
    bool operator()(const AndA& n) const {
      const auto* o = std::get_if<AndA>(&b->node);
      return o && assertion_equal(n.left, o->left) &&
             assertion_equal(n.right, o->right);
    }
    bool operator()(const OrA& n) const {
      const auto* o = std::get_if<OrA>(&b->node);
      return o && assertion_equal(n.left, o->left) &&
             assertion_equal(n.right, o->right);
    }
    bool operator()(const StarA& n) const {
      const auto* o = std::get_if<StarA>(&b->node);
      return o && assertion_equal(n.left, o->left) &&
             assertion_equal(n.right, o->right);
    }
    bool operator()(const PubA& n) const {
      const auto* o = std::get_if<PubA>(&b->node);
      return o && o->var == n.var;
    }
    bool operator()(const PriA& n) const {
      const auto* o = std::get_if<PriA>(&b->node);
      return o && o->var == n.var;
    }
    bool operator()(const EqA& n) const {
      const auto* o = std::get_if<EqA>(&b->node);
      return o && o->left == n.left && o->right == n.right;
    }
    bool operator()(const NeqA& n) const {
      const auto* o = std::get_if<NeqA>(&b->node);
      return o && o->left == n.left && o->right == n.right;
    }
  };
  return std::visit(V{b}, a->node);
}

// Precedence for rendering/parsing: \/ binds loosest, then /\, then *.
inline std::string render_assertion(const AssertPtr& a, int level = 0) {
  struct V {
    int level;
    std::string wrap(const std::string& s, bool need) const {
      return need ? "(" + s + ")" : s;
    }
    std::string operator()(const TrueA&) const { return "true"; }
    std::string operator()(const FalseA&) const { return "false"; }
    std::string operator()(const OrA& n) const {
      return wrap(render_assertion(n.left, 0) + " \\/ " +
                      render_assertion(n.right, 1),
                  level > 0);
    }
    std::string operator()(const AndA& n) const {
      return wrap(render_assertion(n.left, 1) + " /\\ " +
                      render_assertion(n.right, 2),
                  level > 1);
    }
    std::string operator()(const StarA& n) const {
      return wrap(render_assertion(n.left, 2) + " * " +
                      render_assertion(n.right, 3),
                  level > 2);
    }
    std::string operator()(const PubA& n) const { return n.var + "@pub"; }
    std::string operator()(const PriA& n) const { return n.var + "@pri"; }
    std::string operator()(const EqA& n) const {
      return n.left + "=" + n.right;
    }
    std::string operator()(const NeqA& n) const {
      return n.left + "!=" + n.right;
    }
  };
  return std::visit(V{level}, a->node);
}

inline void assertion_vars_into(const AssertPtr& a,
                                std::set<std::string>& out) {
  struct V {
    std::set<std::string>& out;
    void operator()(const TrueA&) const {}
    void operator()(const FalseA&) const {}
    void operator()(const AndA& n) const {
      assertion_vars_into(n.left, out);
      assertion_vars_into(n.right, out);
    }
    void operator()(const OrA& n) const {
      assertion_vars_into(n.left, out);
      assertion_vars_into(n.right, out);
    }
    void operator()(const StarA& n) const {
      assertion_vars_into(n.left, out);
      assertion_vars_into(n.right, out);
    }
    void operator()(const PubA& n) const { out.insert(n.var); }
    void operator()(const PriA& n) const { out.insert(n.var); }
    void operator()(const EqA& n) const {
      out.insert(n.left);
      out.insert(n.right);
    }
    void operator()(const NeqA& n) const {
      out.insert(n.left);
      out.insert(n.right);
    }
  };
  std::visit(V{out}, a->node);
}

inline std::set<std::string> assertion_vars(const AssertPtr& a) {
  std::set<std::string> out;
  assertion_vars_into(a, out);
  return out;
}

/// Weakens every privacy claim to mere publicity; used when handing an
/// assumption to the components of a parallel composition, which cannot
/// rely on exclusive ownership their sibling might share.
inline AssertPtr lift_assertion(const AssertPtr& a) {
  struct V {
    AssertPtr operator()(const TrueA&) const { return assert_true(); }
    AssertPtr operator()(const FalseA&) const { return assert_false(); }
    AssertPtr operator()(const AndA& n) const {
      return assert_and(lift_assertion(n.left), lift_assertion(n.right));
    }
    AssertPtr operator()(const OrA& n) const {
      return assert_or(lift_assertion(n.left), lift_assertion(n.right));
    }
    AssertPtr operator()(const StarA& n) const {
      return assert_star(lift_assertion(n.left), lift_assertion(n.right));
    }
    AssertPtr operator()(const PubA& n) const { return assert_pub(n.var); }
    AssertPtr operator()(const PriA& n) const { return assert_pub(n.var); }
    AssertPtr operator()(const EqA& n) const {
      return assert_eq(n.left, n.right);
    }
    AssertPtr operator()(const NeqA& n) const {
      return assert_neq(n.left, n.right);
    }
  };
  return std::visit(V{}, a->node);
}

// ---------------------------------------------------------------------------
// Assertion parser.

namespace detail {

struct ATok {
  enum Kind {
    ATrueK,
    AFalseK,
    AAndK,
    AOrK,
    AStarK,
    ALParK,
    ARParK,
    AIdentK,
    ATagK,  // @pub / @pri / @known, tag word in text
    AEqK,
    ANeqK,
    AEndK
  } kind;
  std::string text;
  int col = 1;
};

inline std::vector<ATok> lex_assertion(const std::string& src) {
  std::vector<ATok> out;
  std::size_t i = 0;
  auto col = [&] { return static_cast<int>(i) + 1; };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    const int at = col();
    if (c == '/') {
      if (i + 1 < src.size() && src[i + 1] == '\\') {
        out.push_back({ATok::AAndK, "/\\", at});
        i += 2;
        continue;
      }
      throw ParseError("expected '/\\'", 1, at);
    }
    if (c == '\\') {
      if (i + 1 < src.size() && src[i + 1] == '/') {
        out.push_back({ATok::AOrK, "\\/", at});
        i += 2;
        continue;
      }
      throw ParseError("expected '\\/'", 1, at);
    }
    if (c == '*') {
      out.push_back({ATok::AStarK, "*", at});
      ++i;
      continue;
    }
    if (c == '(') {
      out.push_back({ATok::ALParK, "(", at});
      ++i;
      continue;
    }
    if (c == ')') {
      out.push_back({ATok::ARParK, ")", at});
      ++i;
      continue;
    }
    if (c == '=') {
      out.push_back({ATok::AEqK, "=", at});
      ++i;
      continue;
    }
    if (c == '!') {
      if (i + 1 < src.size() && src[i + 1] == '=') {
        out.push_back({ATok::ANeqK, "!=", at});
        i += 2;
        continue;
      }
      throw ParseError("expected '!='", 1, at);
    }
    if (c == '@') {
      ++i;
      std::string word;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) != 0))
        word += src[i++];
      if (word != "pub" && word != "pri" && word != "known")
        throw ParseError("expected @pub, @pri, or @known", 1, at);
      out.push_back({ATok::ATagK, word, at});
      continue;
    }
    if (std::islower(static_cast<unsigned char>(c)) != 0) {
      std::string word;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) != 0 ||
              src[i] == '_' || src[i] == '\''))
        word += src[i++];
      if (word == "true") {
        out.push_back({ATok::ATrueK, word, at});
      } else if (word == "false") {
        out.push_back({ATok::AFalseK, word, at});
      } else {
        out.push_back({ATok::AIdentK, word, at});
      }
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c +
                         "' in assertion",
                     1, at);
  }
  out.push_back({ATok::AEndK, "", col()});
  return out;
}

class AssertParser {
 public:
  explicit AssertParser(std::vector<ATok> toks) : toks_(std::move(toks)) {}

  AssertPtr parse() {
    AssertPtr a = parse_or();
    expect(ATok::AEndK, "end of assertion");
    return a;
  }

 private:
  const ATok& peek() const { return toks_[pos_]; }
  ATok take() { return toks_[pos_++]; }
  void expect(ATok::Kind k, const std::string& what) {
    if (peek().kind != k)
      throw ParseError("expected " + what, 1, peek().col);
    ++pos_;
  }

  AssertPtr parse_or() {
    AssertPtr a = parse_and();
    while (peek().kind == ATok::AOrK) {
      ++pos_;
      a = assert_or(std::move(a), parse_and());
    }
    return a;
  }

  AssertPtr parse_and() {
    AssertPtr a = parse_star();
    while (peek().kind == ATok::AAndK) {
      ++pos_;
      a = assert_and(std::move(a), parse_star());
    }
    return a;
  }

  AssertPtr parse_star() {
    AssertPtr a = parse_atom();
    while (peek().kind == ATok::AStarK) {
      ++pos_;
      a = assert_star(std::move(a), parse_atom());
    }
    return a;
  }

  AssertPtr parse_atom() {
    const ATok t = take();
    switch (t.kind) {
      case ATok::ATrueK:
        return assert_true();
      case ATok::AFalseK:
        return assert_false();
      case ATok::ALParK: {
        AssertPtr a = parse_or();
        expect(ATok::ARParK, "')'");
        return a;
      }
      case ATok::AIdentK: {
        const ATok next = take();
        if (next.kind == ATok::ATagK) {
          if (next.text == "pub") return assert_pub(t.text);
          if (next.text == "pri") return assert_pri(t.text);
          return assert_known(t.text);
        }
        if (next.kind == ATok::AEqK) {
          const ATok rhs = take();
          if (rhs.kind != ATok::AIdentK)
            throw ParseError("expected variable after '='", 1, rhs.col);
          return assert_eq(t.text, rhs.text);
        }
        if (next.kind == ATok::ANeqK) {
          const ATok rhs = take();
          if (rhs.kind != ATok::AIdentK)
            throw ParseError("expected variable after '!='", 1, rhs.col);
          return assert_neq(t.text, rhs.text);
        }
        throw ParseError(
            "expected @pub, @pri, @known, '=', or '!=' after variable '" +
                t.text + "'",
            1, next.col);
      }
      default:
        throw ParseError("expected an assertion", 1, t.col);
    }
  }

  std::vector<ATok> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline AssertPtr parse_assertion(const std::string& text) {
  return detail::AssertParser(detail::lex_assertion(text)).parse();
}

// ---------------------------------------------------------------------------
// Satisfaction.

namespace detail {
inline Chan lookup_var(const std::map<std::string, Chan>& rho,
                       const std::string& var) {
  auto it = rho.find(var);
  if (it == rho.end())
    throw SemanticError("unbound assertion variable '" + var + "'");
  return it->second;
}
}  // namespace detail

/// rho, sigma |= a.  Ownership claims are intuitionistic (they inspect the
/// recorded owner); separation splits the resource's domain in two.
inline bool eval_assertion(const std::map<std::string, Chan>& rho,
                           const Resource& sigma, const AssertPtr& a) {
  struct V {
    const std::map<std::string, Chan>& rho;
    const Resource& sigma;
    bool operator()(const TrueA&) const { return true; }
    bool operator()(const FalseA&) const { return false; }
    bool operator()(const AndA& n) const {
      return eval_assertion(rho, sigma, n.left) &&
             eval_assertion(rho, sigma, n.right);
    }
    bool operator()(const OrA& n) const {
      return eval_assertion(rho, sigma, n.left) ||
             eval_assertion(rho, sigma, n.right);
    }
    bool operator()(const StarA& n) const {
      const std::vector<Chan> dom = sigma.domain();
      const std::size_t bits = dom.size();
      for (std::uint64_t mask = 0; mask < (1ull << bits); ++mask) {
        Resource s1(sigma.width());
        Resource s2(sigma.width());
        for (std::size_t i = 0; i < bits; ++i) {
          const Chan c = dom[i];
          if ((mask >> i) & 1u)
            s1 = s1.with(c, *sigma.own(c));
          else
            s2 = s2.with(c, *sigma.own(c));
        }
        if (eval_assertion(rho, s1, n.left) &&
            eval_assertion(rho, s2, n.right))
          return true;
      }
      return false;
    }
    bool operator()(const PubA& n) const {
      return sigma.is_pub(detail::lookup_var(rho, n.var));
    }
    bool operator()(const PriA& n) const {
      return sigma.is_pri(detail::lookup_var(rho, n.var));
    }
    bool operator()(const EqA& n) const {
      return detail::lookup_var(rho, n.left) ==
             detail::lookup_var(rho, n.right);
    }
    bool operator()(const NeqA& n) const {
      return detail::lookup_var(rho, n.left) !=
             detail::lookup_var(rho, n.right);
    }
  };
  return std::visit(V{rho, sigma}, a->node);
}

namespace detail {
/// All maps from `vars` into the first `nchans` constants.
inline std::vector<std::map<std::string, Chan>> assignments(
    const std::set<std::string>& vars, Chan nchans) {
  std::vector<std::map<std::string, Chan>> out{{}};
  for (const auto& v : vars) {
    std::vector<std::map<std::string, Chan>> next;
    next.reserve(out.size() * static_cast<std::size_t>(nchans));
    for (const auto& m : out)
      for (Chan c = 0; c < nchans; ++c) {
        auto m2 = m;
        m2[v] = c;
        next.push_back(std::move(m2));
      }
    out = std::move(next);
  }
  return out;
}
}  // namespace detail

/// Semantic entailment over the finite universe: every assignment of the
/// free variables and every resource satisfying `p` also satisfies `q`.
inline bool entails(const AssertPtr& p, const AssertPtr& q,
                    const Universe& u) {
  std::set<std::string> vars = assertion_vars(p);
  assertion_vars_into(q, vars);
  for (const auto& rho : detail::assignments(vars, u.size()))
    for (const auto& sigma : all_resources(u.size()))
      if (eval_assertion(rho, sigma, p) && !eval_assertion(rho, sigma, q))
        return false;
  return true;
}

/// Exhaustive family of small assertions over the given variables; depth 0
/// is the atoms, each further level closes under the three connectives.
inline std::vector<AssertPtr> enum_assertions(
    const std::vector<std::string>& vars, int depth) {
  std::vector<AssertPtr> cur;
  cur.push_back(assert_true());
  cur.push_back(assert_false());
  for (const auto& v : vars) {
    cur.push_back(assert_pub(v));
    cur.push_back(assert_pri(v));
  }
  for (const auto& v : vars)
    for (const auto& w : vars)
      if (v != w) {
        cur.push_back(assert_eq(v, w));
        cur.push_back(assert_neq(v, w));
      }
  for (int d = 0; d < depth; ++d) {
    std::vector<AssertPtr> next = cur;
    for (const auto& l : cur)
      for (const auto& r : cur) {
        next.push_back(assert_and(l, r));
        next.push_back(assert_or(l, r));
        next.push_back(assert_star(l, r));
      }
    cur = std::move(next);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Assertion-qualified refinement.

/// A hypothesis: under resources satisfying `guard`, the process variable
/// `var` stays below `bound`.
struct ContextEntry {
  AssertPtr guard;
  std::string var;
  ProcPtr bound;
};
using Context = std::vector<ContextEntry>;

struct Counterexample {
  std::map<std::string, Chan> rho;
  Resource sigma{0};
  Trace witness;  ///< trace of the left side missing on the right
};

struct RefinementVerdict {
  bool holds = true;
  bool complete = true;  ///< false when the assignment cap was reached
  std::optional<Counterexample> cex;
};

inline std::string render_rho(const std::map<std::string, Chan>& rho,
                              const Universe& u) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, c] : rho) {
    if (!first) out += ", ";
    first = false;
    out += v + ": " + u.name(c);
  }
  return out + "}";
}

/// Checks Gamma |- p > lhs <= rhs by enumerating every assignment of the
/// free channel variables and every resource satisfying p, comparing the
/// safety trace tables pointwise.  Hypothesis variables are instantiated
/// by the table of their own bound — the one instantiation that satisfies
/// the context by reflexivity — so a reported failure is definite while a
/// pass does not search stronger instantiations.
inline RefinementVerdict check_refinement(const Context& gamma,
                                          const AssertPtr& p,
                                          const ProcPtr& lhs,
                                          const ProcPtr& rhs,
                                          const Universe& u, int k,
                                          std::size_t max_rho = 4096) {
  std::set<std::string> vars = assertion_vars(p);
  for (const auto& v : free_chan_vars(lhs)) vars.insert(v);
  for (const auto& v : free_chan_vars(rhs)) vars.insert(v);
  std::set<std::string> bound_pvars;
  for (const auto& e : gamma) {
    assertion_vars_into(e.guard, vars);
    for (const auto& v : free_chan_vars(e.bound)) vars.insert(v);
    bound_pvars.insert(e.var);
  }
  for (const auto& side : {lhs, rhs})
    for (const auto& x : free_proc_vars(side))
      if (!bound_pvars.count(x))
        throw SemanticError("process variable '" + x +
                            "' is not bound by the context");

  SafetyCtx ctx(u, k);
  RefinementVerdict out;
  const std::vector<std::string> vlist(vars.begin(), vars.end());
  std::vector<Chan> digits(vlist.size(), 0);
  std::size_t count = 0;
  while (true) {
    if (count >= max_rho) {
      out.complete = false;
      return out;
    }
    ++count;
    std::map<std::string, Chan> rho;
    for (std::size_t i = 0; i < vlist.size(); ++i) rho[vlist[i]] = digits[i];
    Env env;
    env.chan = rho;
    for (const auto& e : gamma) env.proc[e.var] = ctx.denote(e.bound, env);
    const Behavior bl = ctx.denote(lhs, env);
    const Behavior br = ctx.denote(rhs, env);
    for (const auto& sigma : all_resources(u.size())) {
      if (!eval_assertion(rho, sigma, p)) continue;
      const TraceSet& rs = br.at(sigma);
      for (const auto& t : bl.at(sigma)) {
        if (!rs.count(t)) {
          out.holds = false;
          out.cex = Counterexample{rho, sigma, t};
          return out;
        }
      }
    }
    std::size_t i = 0;
    for (; i < digits.size(); ++i) {
      if (++digits[i] < u.size()) break;
      digits[i] = 0;
    }
    if (i == digits.size()) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Derived checks used by the suites.

/// A private handshake collapses to its continuations: under
/// x@pri /\ x@known-payload, "x!y. P | x?(z). Q" and "P | Q{y/z}" refine
/// each other.  Returns the verdicts for the two directions.
inline std::pair<RefinementVerdict, RefinementVerdict> check_expansion(
    const ProcPtr& P, const ProcPtr& Q, const Universe& u, int k) {
  const ProcPtr lhs = make_par(
      make_prefix(Prefix::send(ChanExpr::variable("x"),
                               ChanExpr::variable("y")),
                  P),
      make_prefix(Prefix::recv(ChanExpr::variable("x"), "z"), Q));
  const ProcPtr rhs =
      make_par(P, subst_chan_expr(Q, "z", ChanExpr::variable("y")));
  const AssertPtr guard = assert_and(assert_pri("x"), assert_known("y"));
  return {check_refinement({}, guard, lhs, rhs, u, k),
          check_refinement({}, guard, rhs, lhs, u, k)};
}

struct HoareReport {
  bool ok = true;
  long checked = 0;  ///< satisfying (frame, assignment, resource) triples
  std::string detail;
};

/// The send action as a resource transformer: for every frame r, whenever
/// sigma |= r * (x@pub /\ y@known) the send of y over x is permitted and
/// the result satisfies r * (x@pub /\ y@pub).
inline HoareReport check_hoare_send(const Universe& u,
                                    const std::vector<AssertPtr>& frames) {
  HoareReport rep;
  for (const auto& r : frames) {
    std::set<std::string> vars = assertion_vars(r);
    vars.insert("x");
    vars.insert("y");
    const AssertPtr pre =
        assert_star(r, assert_and(assert_pub("x"), assert_known("y")));
    const AssertPtr post =
        assert_star(r, assert_and(assert_pub("x"), assert_pub("y")));
    for (const auto& rho : detail::assignments(vars, u.size())) {
      for (const auto& sigma : all_resources(u.size())) {
        if (!eval_assertion(rho, sigma, pre)) continue;
        ++rep.checked;
        const Verdict v =
            apply_action(Action::send(rho.at("x"), rho.at("y")), sigma);
        if (!v.is_ok() || !eval_assertion(rho, v.next, post)) {
          rep.ok = false;
          rep.detail = "frame " + render_assertion(r) + ", rho " +
                       render_rho(rho, u) + ", resource " +
                       render_resource(sigma, u);
          return rep;
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Rule soundness.

enum class Rule {
  SendPub,
  SendPri,
  RecvPub,
  RecvPri,
  NewChan,
  ParCong,
  Hyp,
  RecInd,
  Conseq
};

inline const std::vector<std::pair<Rule, std::string>>& all_rules() {
  static const std::vector<std::pair<Rule, std::string>> rules = {
      {Rule::SendPub, "send-pub"}, {Rule::SendPri, "send-pri"},
      {Rule::RecvPub, "recv-pub"}, {Rule::RecvPri, "recv-pri"},
      {Rule::NewChan, "new"},      {Rule::ParCong, "par"},
      {Rule::Hyp, "hyp"},          {Rule::RecInd, "rec"},
      {Rule::Conseq, "conseq"}};
  return rules;
}

inline std::string rule_name(Rule r) {
  for (const auto& [id, name] : all_rules())
    if (id == r) return name;
  return "?";
}

inline std::optional<Rule> rule_from_name(const std::string& name) {
  for (const auto& [id, n] : all_rules())
    if (n == name) return id;
  return std::nullopt;
}

struct RuleReport {
  Rule rule;
  std::string name;
  int samples = 0;
  int premise_held = 0;  ///< samples whose premises all checked out
  int violations = 0;    ///< premises held but the conclusion failed
  std::vector<std::string> details;  ///< first few violations, rendered
};

namespace detail {

class RuleSampler {
 public:
  RuleSampler(const Universe& u, std::uint64_t seed) : u_(u), rng_(seed) {}

  std::uint64_t rnd(std::uint64_t n) { return rng_() % n; }

  const std::string& pick(const std::vector<std::string>& vars) {
    return vars[rnd(vars.size())];
  }

  AssertPtr atom(const std::vector<std::string>& vars) {
    if (vars.empty()) return assert_true();
    switch (rnd(6)) {
      case 0:
        return assert_true();
      case 1:
        return assert_pub(pick(vars));
      case 2:
        return assert_pri(pick(vars));
      case 3:
        return assert_eq(pick(vars), pick(vars));
      case 4:
        return assert_neq(pick(vars), pick(vars));
      default:
        return assert_known(pick(vars));
    }
  }

  AssertPtr assertion(const std::vector<std::string>& vars, int depth) {
    if (depth <= 0 || rnd(3) == 0) return atom(vars);
    AssertPtr l = assertion(vars, depth - 1);
    AssertPtr r = assertion(vars, depth - 1);
    switch (rnd(3)) {
      case 0:
        return assert_and(std::move(l), std::move(r));
      case 1:
        return assert_or(std::move(l), std::move(r));
      default:
        return assert_star(std::move(l), std::move(r));
    }
  }

  ProcPtr proc(std::vector<std::string> fcv, std::vector<std::string> fpv,
               int depth) {
    GenConfig cfg;
    cfg.universe = u_;
    cfg.max_depth = depth;
    cfg.max_sum_width = 2;
    cfg.allow_rec = false;
    cfg.seed = rng_();
    cfg.free_chan_vars = std::move(fcv);
    cfg.free_proc_vars = std::move(fpv);
    return gen_process(cfg);
  }

 private:
  const Universe& u_;
  std::mt19937_64 rng_;
};

inline ProcPtr send_var(const char* subj, const char* pay, ProcPtr cont) {
  return make_prefix(
      Prefix::send(ChanExpr::variable(subj), ChanExpr::variable(pay)),
      std::move(cont));
}
inline ProcPtr recv_var(const char* subj, const char* binder, ProcPtr cont) {
  return make_prefix(Prefix::recv(ChanExpr::variable(subj), binder),
                     std::move(cont));
}

}  // namespace detail

/// Samples instantiations of one proof rule and checks that whenever every
/// premise passes check_refinement, the conclusion does too.
inline RuleReport check_rule_soundness(Rule rule, int samples,
                                       const Universe& u, int k,
                                       std::uint64_t seed) {
  using detail::recv_var;
  using detail::send_var;
  RuleReport rep;
  rep.rule = rule;
  rep.name = rule_name(rule);
  detail::RuleSampler S(u, seed);

  auto record = [&](const AssertPtr& concl_p, const ProcPtr& cl,
                    const ProcPtr& cr, const RefinementVerdict& concl) {
    if (concl.holds) return;
    ++rep.violations;
    if (rep.details.size() < 3) {
      std::string d = "under " + render_assertion(concl_p) + ": " +
                      print(cl, u) + " <= " + print(cr, u) + " fails";
      if (concl.cex) {
        d += " at rho " + render_rho(concl.cex->rho, u) + ", resource " +
             render_resource(concl.cex->sigma, u) + ", trace '" +
             render_trace(concl.cex->witness, u) + "'";
      }
      rep.details.push_back(std::move(d));
    }
  };

  for (int i = 0; i < samples; ++i) {
    ++rep.samples;
    switch (rule) {
      case Rule::SendPub: {
        const AssertPtr p = S.assertion({"x", "y"}, 1);
        const ProcPtr P = S.proc({"x", "y"}, {}, 2);
        const ProcPtr Q = S.proc({"x", "y"}, {}, 2);
        const AssertPtr prem_p =
            assert_star(p, assert_and(assert_pub("x"), assert_pub("y")));
        if (!check_refinement({}, prem_p, P, Q, u, k).holds) break;
        ++rep.premise_held;
        const AssertPtr concl_p =
            assert_star(p, assert_and(assert_pub("x"), assert_known("y")));
        const ProcPtr cl = send_var("x", "y", P);
        const ProcPtr cr = send_var("x", "y", Q);
        record(concl_p, cl, cr,
               check_refinement({}, concl_p, cl, cr, u, k));
        break;
      }
      case Rule::SendPri: {
        const ProcPtr P = S.proc({"x", "y"}, {}, 2);
        const ProcPtr Q = S.proc({"x", "y"}, {}, 2);
        ++rep.premise_held;  // an axiom
        const AssertPtr concl_p =
            assert_and(assert_pri("x"), assert_known("y"));
        const ProcPtr cl = send_var("x", "y", P);
        record(concl_p, cl, Q, check_refinement({}, concl_p, cl, Q, u, k));
        break;
      }
      case Rule::RecvPub: {
        const AssertPtr p = S.assertion({"x"}, 1);  // y not free in p
        const ProcPtr P = S.proc({"x", "y"}, {}, 2);
        const ProcPtr Q = S.proc({"x", "y"}, {}, 2);
        const AssertPtr prem_p =
            assert_and(assert_star(p, assert_pub("x")), assert_pub("y"));
        if (!check_refinement({}, prem_p, P, Q, u, k).holds) break;
        ++rep.premise_held;
        const AssertPtr concl_p = assert_star(p, assert_pub("x"));
        const ProcPtr cl = recv_var("x", "y", P);
        const ProcPtr cr = recv_var("x", "y", Q);
        record(concl_p, cl, cr,
               check_refinement({}, concl_p, cl, cr, u, k));
        break;
      }
      case Rule::RecvPri: {
        const ProcPtr P = S.proc({"x", "y"}, {}, 2);
        const ProcPtr Q = S.proc({"x"}, {}, 2);
        ++rep.premise_held;  // an axiom
        const AssertPtr concl_p = assert_pri("x");
        const ProcPtr cl = recv_var("x", "y", P);
        record(concl_p, cl, Q, check_refinement({}, concl_p, cl, Q, u, k));
        break;
      }
      case Rule::NewChan: {
        const AssertPtr p = S.assertion({"y"}, 1);  // x not free in p
        const ProcPtr P = S.proc({"x", "y"}, {}, 2);
        const ProcPtr Q = S.proc({"x", "y"}, {}, 2);
        const AssertPtr prem_p = assert_star(p, assert_pri("x"));
        if (!check_refinement({}, prem_p, P, Q, u, k).holds) break;
        ++rep.premise_held;
        const ProcPtr cl = make_new("x", P);
        const ProcPtr cr = make_new("x", Q);
        record(p, cl, cr, check_refinement({}, p, cl, cr, u, k));
        break;
      }
      case Rule::ParCong: {
        const AssertPtr p = S.assertion({"x"}, 1);
        const AssertPtr lifted = lift_assertion(p);
        const ProcPtr P1 = S.proc({"x"}, {}, 2);
        const ProcPtr Q1 = S.proc({"x"}, {}, 2);
        const ProcPtr P2 = S.proc({"x"}, {}, 2);
        const ProcPtr Q2 = S.proc({"x"}, {}, 2);
        if (!check_refinement({}, lifted, P1, Q1, u, k).holds) break;
        if (!check_refinement({}, lifted, P2, Q2, u, k).holds) break;
        ++rep.premise_held;
        const ProcPtr cl = make_par(P1, P2);
        const ProcPtr cr = make_par(Q1, Q2);
        record(p, cl, cr, check_refinement({}, p, cl, cr, u, k));
        break;
      }
      case Rule::Hyp: {
        const AssertPtr p = S.assertion({"x"}, 1);
        const ProcPtr B = S.proc({"x"}, {}, 2);
        const Context gamma = {{p, "X", B}};
        ++rep.premise_held;  // membership is the only premise
        record(p, make_pvar("X"), B,
               check_refinement(gamma, p, make_pvar("X"), B, u, k));
        break;
      }
      case Rule::RecInd: {
        const AssertPtr p = S.assertion({"x"}, 1);
        const ProcPtr Q = S.proc({"x"}, {}, 2);
        const ProcPtr P = S.proc({"x"}, {"X"}, 2);
        const Context gamma = {{p, "X", Q}};
        if (!check_refinement(gamma, p, P, Q, u, k).holds) break;
        ++rep.premise_held;
        const ProcPtr cl = make_rec("X", P);
        record(p, cl, Q, check_refinement({}, p, cl, Q, u, k));
        break;
      }
      case Rule::Conseq: {
        const AssertPtr weaker = S.assertion({"x", "y"}, 1);
        const AssertPtr extra = S.assertion({"x", "y"}, 1);
        const AssertPtr p = assert_and(weaker, extra);  // p entails weaker
        const ProcPtr P = S.proc({"x", "y"}, {}, 2);
        const ProcPtr Q = S.proc({"x", "y"}, {}, 2);
        if (!check_refinement({}, weaker, P, Q, u, k).holds) break;
        ++rep.premise_held;
        record(p, P, Q, check_refinement({}, p, P, Q, u, k));
        break;
      }
    }
  }
  return rep;
}

}  // namespace pirho

#endif  // PIRHO_LOGIC_HPP_
