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

#ifndef PIRHO_SYNTAX_HPP_
#define PIRHO_SYNTAX_HPP_

// Abstract syntax, parser, and canonical printer for process terms.
//
// Concrete grammar (precedence from loosest to tightest):
//
//   proc   ::= proc '|' proc                  parallel, left-assoc
//            | proc '(+)' proc                internal choice, left-assoc
//            | term '+' term '+' ...          external choice over prefixed
//                                             terms (bare operands only)
//            | basic
//   basic  ::= '0'                            inert process (empty choice)
//            | X                              process variable (uppercase)
//            | e '!' e' '.' basic             send prefix
//            | e '?' '(' x ')' '.' basic      receive prefix, binds x
//            | 'new' x '.' proc               fresh channel, extends right
//            | 'rec' X '.' proc               recursion, extends right
//            | '(' proc ')'
//   e      ::= '#' name                       channel constant (in universe)
//            | x                              channel variable (lowercase)
//
// '--' starts a comment running to end of line.  'new' and 'rec' are
// reserved.  The printer emits a canonical form that reparses to a
// structurally identical term.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pirho/resources.hpp"

namespace pirho {

/// A channel position in a term: either a universe constant or a variable.
struct ChanExpr {
  bool is_const = false;
  Chan chan = -1;
  std::string var;

  static ChanExpr constant(Chan c) { return {true, c, {}}; }
  static ChanExpr variable(std::string v) { return {false, -1, std::move(v)}; }

  bool operator==(const ChanExpr&) const = default;
};

/// Looks a channel expression up under an environment for channel variables.
inline Chan eval_chan(const ChanExpr& e,
                      const std::map<std::string, Chan>& env) {
  if (e.is_const) return e.chan;
  auto it = env.find(e.var);
  if (it == env.end())
    throw SemanticError("unbound channel variable '" + e.var + "'");
  return it->second;
}

/// A communication prefix: send `subject!payload` or receive
/// `subject?(binder)`.
struct Prefix {
  bool is_send = true;
  ChanExpr subject;
  ChanExpr payload;    ///< send only
  std::string binder;  ///< receive only

  static Prefix send(ChanExpr subj, ChanExpr pay) {
    return {true, std::move(subj), std::move(pay), {}};
  }
  static Prefix recv(ChanExpr subj, std::string binder) {
    return {false, std::move(subj), {}, std::move(binder)};
  }

  bool operator==(const Prefix&) const = default;
};

struct Process;
using ProcPtr = std::shared_ptr<const Process>;

struct Branch {
  Prefix pre;
  ProcPtr cont;
};

/// External choice over prefixed continuations; the empty choice is the
/// inert process 0.
struct SumN {
  std::vector<Branch> branches;
};
/// Internal (uncontrolled) choice between two processes.
struct IChoiceN {
  ProcPtr left, right;
};
/// Fresh-channel binder.
struct NewN {
  std::string var;
  ProcPtr body;
};
/// Parallel composition.
struct ParN {
  ProcPtr left, right;
};
/// Recursion binder.
struct RecN {
  std::string var;
  ProcPtr body;
};
/// Process variable occurrence.
struct PVarN {
  std::string name;
};

struct Process {
  std::variant<SumN, IChoiceN, NewN, ParN, RecN, PVarN> node;
};

inline ProcPtr make_sum(std::vector<Branch> bs) {
  return std::make_shared<const Process>(Process{SumN{std::move(bs)}});
}
inline ProcPtr make_zero() { return make_sum({}); }
inline ProcPtr make_prefix(Prefix p, ProcPtr cont) {
  return make_sum({Branch{std::move(p), std::move(cont)}});
}
inline ProcPtr make_ichoice(ProcPtr l, ProcPtr r) {
  return std::make_shared<const Process>(
      Process{IChoiceN{std::move(l), std::move(r)}});
}
inline ProcPtr make_new(std::string v, ProcPtr body) {
  return std::make_shared<const Process>(
      Process{NewN{std::move(v), std::move(body)}});
}
inline ProcPtr make_par(ProcPtr l, ProcPtr r) {
  return std::make_shared<const Process>(
      Process{ParN{std::move(l), std::move(r)}});
}
inline ProcPtr make_rec(std::string v, ProcPtr body) {
  return std::make_shared<const Process>(
      Process{RecN{std::move(v), std::move(body)}});
}
inline ProcPtr make_pvar(std::string name) {
  return std::make_shared<const Process>(Process{PVarN{std::move(name)}});
}

// ---------------------------------------------------------------------------
// Structural equality.

inline bool proc_equal(const ProcPtr& a, const ProcPtr& b);

namespace detail {
struct EqVisitor {
  const Process& other;

  bool operator()(const SumN& x) const {
    const auto* y = std::get_if<SumN>(&other.node);
    if (!y || x.branches.size() != y->branches.size()) return false;
    for (std::size_t i = 0; i < x.branches.size(); ++i) {
      if (!(x.branches[i].pre == y->branches[i].pre)) return false;
      if (!proc_equal(x.branches[i].cont, y->branches[i].cont)) return false;
    }
    return true;
  }
  bool operator()(const IChoiceN& x) const {
    const auto* y = std::get_if<IChoiceN>(&other.node);
    return y && proc_equal(x.left, y->left) && proc_equal(x.right, y->right);
  }
  bool operator()(const NewN& x) const {
    const auto* y = std::get_if<NewN>(&other.node);
    return y && x.var == y->var && proc_equal(x.body, y->body);
  }
  bool operator()(const ParN& x) const {
    const auto* y = std::get_if<ParN>(&other.node);
    return y && proc_equal(x.left, y->left) && proc_equal(x.right, y->right);
  }
  bool operator()(const RecN& x) const {
    const auto* y = std::get_if<RecN>(&other.node);
    return y && x.var == y->var && proc_equal(x.body, y->body);
  }
  bool operator()(const PVarN& x) const {
    const auto* y = std::get_if<PVarN>(&other.node);
    return y && x.name == y->name;
  }
};
}  // namespace detail

inline bool proc_equal(const ProcPtr& a, const ProcPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  return std::visit(detail::EqVisitor{*b}, a->node);
}

// ---------------------------------------------------------------------------
// Canonical printing.

namespace detail {

inline std::string render_chan_expr(const ChanExpr& e, const Universe& u) {
  return e.is_const ? "#" + u.name(e.chan) : e.var;
}

inline std::string render_prefix(const Prefix& p, const Universe& u) {
  if (p.is_send)
    return render_chan_expr(p.subject, u) + "!" +
           render_chan_expr(p.payload, u);
  return render_chan_expr(p.subject, u) + "?(" + p.binder + ")";
}

std::string print_proc(const Process& p, const Universe& u, int level,
                       bool tail);

inline std::string print_branch(const Branch& b, const Universe& u);

/// A dot continuation stays bare only when it is an atom or another single
/// prefix chain; anything else is parenthesized.
inline std::string print_cont(const ProcPtr& c, const Universe& u) {
  if (const auto* s = std::get_if<SumN>(&c->node)) {
    if (s->branches.empty()) return "0";
    if (s->branches.size() == 1) return print_branch(s->branches[0], u);
  } else if (const auto* v = std::get_if<PVarN>(&c->node)) {
    return v->name;
  }
  return "(" + print_proc(*c, u, 0, true) + ")";
}

inline std::string print_branch(const Branch& b, const Universe& u) {
  return render_prefix(b.pre, u) + "." + print_cont(b.cont, u);
}

inline std::string print_proc(const Process& p, const Universe& u, int level,
                              bool tail) {
  struct V {
    const Universe& u;
    int level;
    bool tail;

    std::string operator()(const SumN& s) const {
      if (s.branches.empty()) return "0";
      if (s.branches.size() == 1) return print_branch(s.branches[0], u);
      std::string out;
      for (std::size_t i = 0; i < s.branches.size(); ++i) {
        if (i) out += " + ";
        out += print_branch(s.branches[i], u);
      }
      return level > 2 ? "(" + out + ")" : out;
    }
    std::string operator()(const IChoiceN& n) const {
      std::string out = print_proc(*n.left, u, 1, false) + " (+) " +
                        print_proc(*n.right, u, 2, tail);
      return level > 1 ? "(" + out + ")" : out;
    }
    std::string operator()(const ParN& n) const {
      std::string out = print_proc(*n.left, u, 0, false) + " | " +
                        print_proc(*n.right, u, 1, tail);
      return level > 0 ? "(" + out + ")" : out;
    }
    std::string operator()(const NewN& n) const {
      std::string out = "new " + n.var + ". " + print_proc(*n.body, u, 0, true);
      return (level == 0 && tail) ? out : "(" + out + ")";
    }
    std::string operator()(const RecN& n) const {
      std::string out = "rec " + n.var + ". " + print_proc(*n.body, u, 0, true);
      return (level == 0 && tail) ? out : "(" + out + ")";
    }
    std::string operator()(const PVarN& n) const { return n.name; }
  };
  return std::visit(V{u, level, tail}, p.node);
}

}  // namespace detail

/// Canonical textual form; `parse(print(p))` is structurally equal to `p`.
inline std::string print(const ProcPtr& p, const Universe& u) {
  return detail::print_proc(*p, u, 0, true);
}

// ---------------------------------------------------------------------------
// Parsing.

namespace detail {

enum class Tok : std::uint8_t {
  End,
  Zero,
  LParen,
  RParen,
  IChoiceOp,
  ParOp,
  PlusOp,
  Dot,
  Bang,
  Query,
  ConstName,
  LowerIdent,
  UpperIdent,
  KwNew,
  KwRec,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_trivia();
    cur_ = Token{Tok::End, "", line_, col_};
    if (i_ >= src_.size()) return;
    const char ch = src_[i_];
    if (ch == '0') {
      cur_.kind = Tok::Zero;
      bump();
      return;
    }
    if (ch == '(') {
      if (i_ + 2 < src_.size() && src_[i_ + 1] == '+' && src_[i_ + 2] == ')') {
        cur_.kind = Tok::IChoiceOp;
        bump();
        bump();
        bump();
        return;
      }
      cur_.kind = Tok::LParen;
      bump();
      return;
    }
    switch (ch) {
      case ')': cur_.kind = Tok::RParen; bump(); return;
      case '|': cur_.kind = Tok::ParOp; bump(); return;
      case '+': cur_.kind = Tok::PlusOp; bump(); return;
      case '.': cur_.kind = Tok::Dot; bump(); return;
      case '!': cur_.kind = Tok::Bang; bump(); return;
      case '?': cur_.kind = Tok::Query; bump(); return;
      default: break;
    }
    if (ch == '#') {
      bump();
      std::string name = lex_ident_chars();
      if (name.empty())
        throw ParseError("expected channel name after '#'", line_, col_);
      cur_.kind = Tok::ConstName;
      cur_.text = name;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string name = lex_ident_chars();
      if (name == "new") {
        cur_.kind = Tok::KwNew;
      } else if (name == "rec") {
        cur_.kind = Tok::KwRec;
      } else if (std::isupper(static_cast<unsigned char>(name[0]))) {
        cur_.kind = Tok::UpperIdent;
        cur_.text = name;
      } else {
        cur_.kind = Tok::LowerIdent;
        cur_.text = name;
      }
      return;
    }
    throw ParseError(std::string("unexpected character '") + ch + "'", line_,
                     col_);
  }

  void skip_trivia() {
    while (i_ < src_.size()) {
      const char ch = src_[i_];
      if (ch == '\n') {
        ++i_;
        ++line_;
        col_ = 1;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        bump();
      } else if (ch == '-' && i_ + 1 < src_.size() && src_[i_ + 1] == '-') {
        while (i_ < src_.size() && src_[i_] != '\n') bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    ++i_;
    ++col_;
  }

  std::string lex_ident_chars() {
    std::string out;
    while (i_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
            src_[i_] == '_' || src_[i_] == '\'')) {
      out.push_back(src_[i_]);
      bump();
    }
    return out;
  }

  const std::string& src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token cur_;
};

class Parser {
 public:
  Parser(const std::string& src, const Universe& u) : lex_(src), u_(u) {}

  ProcPtr run() {
    ProcPtr p = parse_par();
    expect(Tok::End, "end of input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, lex_.peek().line, lex_.peek().col);
  }

  Token expect(Tok kind, const std::string& what) {
    if (lex_.peek().kind != kind) fail("expected " + what);
    return lex_.take();
  }

  ProcPtr parse_par() {
    ProcPtr l = parse_ichoice();
    while (lex_.peek().kind == Tok::ParOp) {
      lex_.take();
      l = make_par(std::move(l), parse_ichoice());
    }
    return l;
  }

  ProcPtr parse_ichoice() {
    ProcPtr l = parse_sum();
    while (lex_.peek().kind == Tok::IChoiceOp) {
      lex_.take();
      l = make_ichoice(std::move(l), parse_sum());
    }
    return l;
  }

  ProcPtr parse_sum() {
    auto [p, was_paren] = parse_basic();
    if (lex_.peek().kind != Tok::PlusOp) return p;
    std::vector<Branch> branches;
    auto add_operand = [&](const ProcPtr& q, bool paren) {
      const auto* s = std::get_if<SumN>(&q->node);
      if (paren || !s || s->branches.size() != 1)
        fail("'+' operands must be bare prefixed terms");
      branches.push_back(s->branches[0]);
    };
    add_operand(p, was_paren);
    while (lex_.peek().kind == Tok::PlusOp) {
      lex_.take();
      auto [q, qparen] = parse_basic();
      add_operand(q, qparen);
    }
    return make_sum(std::move(branches));
  }

  std::pair<ProcPtr, bool> parse_basic() {
    switch (lex_.peek().kind) {
      case Tok::Zero:
        lex_.take();
        return {make_zero(), false};
      case Tok::UpperIdent:
        return {make_pvar(lex_.take().text), false};
      case Tok::LParen: {
        lex_.take();
        ProcPtr p = parse_par();
        expect(Tok::RParen, "')'");
        return {std::move(p), true};
      }
      case Tok::KwNew: {
        lex_.take();
        Token v = expect(Tok::LowerIdent, "channel variable after 'new'");
        expect(Tok::Dot, "'.' after 'new' binder");
        return {make_new(v.text, parse_par()), false};
      }
      case Tok::KwRec: {
        lex_.take();
        Token v = expect(Tok::UpperIdent, "process variable after 'rec'");
        expect(Tok::Dot, "'.' after 'rec' binder");
        return {make_rec(v.text, parse_par()), false};
      }
      case Tok::ConstName:
      case Tok::LowerIdent:
        return {parse_prefixed(), false};
      default:
        fail("expected a process term");
    }
  }

  ProcPtr parse_prefixed() {
    ChanExpr subject = parse_chan_expr();
    if (lex_.peek().kind == Tok::Bang) {
      lex_.take();
      ChanExpr payload = parse_chan_expr();
      expect(Tok::Dot, "'.' after send prefix");
      ProcPtr cont = parse_basic().first;
      return make_prefix(Prefix::send(std::move(subject), std::move(payload)),
                         std::move(cont));
    }
    if (lex_.peek().kind == Tok::Query) {
      lex_.take();
      expect(Tok::LParen, "'(' after '?'");
      Token b = expect(Tok::LowerIdent, "receive binder");
      expect(Tok::RParen, "')' after receive binder");
      expect(Tok::Dot, "'.' after receive prefix");
      ProcPtr cont = parse_basic().first;
      return make_prefix(Prefix::recv(std::move(subject), b.text),
                         std::move(cont));
    }
    fail("expected '!' or '?' after channel expression");
  }

  ChanExpr parse_chan_expr() {
    if (lex_.peek().kind == Tok::ConstName) {
      Token t = lex_.take();
      Chan c = u_.index_of(t.text);
      if (c < 0)
        throw ParseError("unknown channel constant '#" + t.text + "'", t.line,
                         t.col);
      return ChanExpr::constant(c);
    }
    if (lex_.peek().kind == Tok::LowerIdent)
      return ChanExpr::variable(lex_.take().text);
    fail("expected a channel expression");
  }

  Lexer lex_;
  const Universe& u_;
};

}  // namespace detail

/// Parses a process term over the given universe of channel constants.
inline ProcPtr parse(const std::string& text, const Universe& u) {
  return detail::Parser(text, u).run();
}

// ---------------------------------------------------------------------------
// Variable analysis.

namespace detail {
inline void collect_free_chan_vars(const Process& p,
                                   std::set<std::string>& bound,
                                   std::set<std::string>& out) {
  struct V {
    std::set<std::string>& bound;
    std::set<std::string>& out;

    void on_expr(const ChanExpr& e) const {
      if (!e.is_const && !bound.count(e.var)) out.insert(e.var);
    }
    void under(const std::string& binder, const ProcPtr& body) const {
      const bool fresh = bound.insert(binder).second;
      collect_free_chan_vars(*body, bound, out);
      if (fresh) bound.erase(binder);
    }
    void operator()(const SumN& s) const {
      for (const auto& b : s.branches) {
        on_expr(b.pre.subject);
        if (b.pre.is_send) {
          on_expr(b.pre.payload);
          collect_free_chan_vars(*b.cont, bound, out);
        } else {
          under(b.pre.binder, b.cont);
        }
      }
    }
    void operator()(const IChoiceN& n) const {
      collect_free_chan_vars(*n.left, bound, out);
      collect_free_chan_vars(*n.right, bound, out);
    }
    void operator()(const NewN& n) const { under(n.var, n.body); }
    void operator()(const ParN& n) const {
      collect_free_chan_vars(*n.left, bound, out);
      collect_free_chan_vars(*n.right, bound, out);
    }
    void operator()(const RecN& n) const {
      collect_free_chan_vars(*n.body, bound, out);
    }
    void operator()(const PVarN&) const {}
  };
  std::visit(V{bound, out}, p.node);
}

inline void collect_free_proc_vars(const Process& p,
                                   std::set<std::string>& bound,
                                   std::set<std::string>& out) {
  struct V {
    std::set<std::string>& bound;
    std::set<std::string>& out;

    void operator()(const SumN& s) const {
      for (const auto& b : s.branches)
        collect_free_proc_vars(*b.cont, bound, out);
    }
    void operator()(const IChoiceN& n) const {
      collect_free_proc_vars(*n.left, bound, out);
      collect_free_proc_vars(*n.right, bound, out);
    }
    void operator()(const NewN& n) const {
      collect_free_proc_vars(*n.body, bound, out);
    }
    void operator()(const ParN& n) const {
      collect_free_proc_vars(*n.left, bound, out);
      collect_free_proc_vars(*n.right, bound, out);
    }
    void operator()(const RecN& n) const {
      const bool fresh = bound.insert(n.var).second;
      collect_free_proc_vars(*n.body, bound, out);
      if (fresh) bound.erase(n.var);
    }
    void operator()(const PVarN& v) const {
      if (!bound.count(v.name)) out.insert(v.name);
    }
  };
  std::visit(V{bound, out}, p.node);
}
}  // namespace detail

inline std::set<std::string> free_chan_vars(const ProcPtr& p) {
  std::set<std::string> bound, out;
  detail::collect_free_chan_vars(*p, bound, out);
  return out;
}

inline std::set<std::string> free_proc_vars(const ProcPtr& p) {
  std::set<std::string> bound, out;
  detail::collect_free_proc_vars(*p, bound, out);
  return out;
}

/// All channel constants occurring anywhere in the term.
inline void collect_constants(const ProcPtr& p, std::set<Chan>& out) {
  struct V {
    std::set<Chan>& out;
    void on_expr(const ChanExpr& e) const {
      if (e.is_const) out.insert(e.chan);
    }
    void operator()(const SumN& s) const {
      for (const auto& b : s.branches) {
        on_expr(b.pre.subject);
        if (b.pre.is_send) on_expr(b.pre.payload);
        collect_constants(b.cont, out);
      }
    }
    void operator()(const IChoiceN& n) const {
      collect_constants(n.left, out);
      collect_constants(n.right, out);
    }
    void operator()(const NewN& n) const { collect_constants(n.body, out); }
    void operator()(const ParN& n) const {
      collect_constants(n.left, out);
      collect_constants(n.right, out);
    }
    void operator()(const RecN& n) const { collect_constants(n.body, out); }
    void operator()(const PVarN&) const {}
  };
  std::visit(V{out}, p->node);
}

inline std::set<Chan> constants_of(const ProcPtr& p) {
  std::set<Chan> out;
  collect_constants(p, out);
  return out;
}

inline int ast_depth(const ProcPtr& p) {
  struct V {
    int operator()(const SumN& s) const {
      int m = 0;
      for (const auto& b : s.branches) m = std::max(m, ast_depth(b.cont));
      return s.branches.empty() ? 0 : 1 + m;
    }
    int operator()(const IChoiceN& n) const {
      return 1 + std::max(ast_depth(n.left), ast_depth(n.right));
    }
    int operator()(const NewN& n) const { return 1 + ast_depth(n.body); }
    int operator()(const ParN& n) const {
      return 1 + std::max(ast_depth(n.left), ast_depth(n.right));
    }
    int operator()(const RecN& n) const { return 1 + ast_depth(n.body); }
    int operator()(const PVarN&) const { return 0; }
  };
  return std::visit(V{}, p->node);
}

/// Process variables with an occurrence not protected by any prefix.
inline std::set<std::string> unguarded_proc_vars(const ProcPtr& p) {
  struct V {
    std::set<std::string> operator()(const SumN&) const { return {}; }
    std::set<std::string> operator()(const IChoiceN& n) const {
      auto l = unguarded_proc_vars(n.left);
      auto r = unguarded_proc_vars(n.right);
      l.insert(r.begin(), r.end());
      return l;
    }
    std::set<std::string> operator()(const NewN& n) const {
      return unguarded_proc_vars(n.body);
    }
    std::set<std::string> operator()(const ParN& n) const {
      auto l = unguarded_proc_vars(n.left);
      auto r = unguarded_proc_vars(n.right);
      l.insert(r.begin(), r.end());
      return l;
    }
    std::set<std::string> operator()(const RecN& n) const {
      auto s = unguarded_proc_vars(n.body);
      s.erase(n.var);
      return s;
    }
    std::set<std::string> operator()(const PVarN& v) const {
      return {v.name};
    }
  };
  return std::visit(V{}, p->node);
}

/// True when every recursion binder guards its variable behind a prefix,
/// including in nested subterms.
inline bool recs_guarded(const ProcPtr& p) {
  struct V {
    bool operator()(const SumN& s) const {
      for (const auto& b : s.branches)
        if (!recs_guarded(b.cont)) return false;
      return true;
    }
    bool operator()(const IChoiceN& n) const {
      return recs_guarded(n.left) && recs_guarded(n.right);
    }
    bool operator()(const NewN& n) const { return recs_guarded(n.body); }
    bool operator()(const ParN& n) const {
      return recs_guarded(n.left) && recs_guarded(n.right);
    }
    bool operator()(const RecN& n) const {
      if (unguarded_proc_vars(n.body).count(n.var)) return false;
      return recs_guarded(n.body);
    }
    bool operator()(const PVarN&) const { return true; }
  };
  return std::visit(V{}, p->node);
}

/// A term is executable when it has no free variables of either kind.
/// (Unguarded recursion is allowed; it shows up as silent divergence.)
inline bool is_executable(const ProcPtr& p) {
  return free_chan_vars(p).empty() && free_proc_vars(p).empty();
}

inline void require_executable(const ProcPtr& p) {
  if (!free_chan_vars(p).empty())
    throw SemanticError("process has free channel variables");
  if (!free_proc_vars(p).empty())
    throw SemanticError("process has free process variables");
}

/// Free-name summary of a term.
struct NameReport {
  std::set<std::string> chan_vars;
  std::set<std::string> proc_vars;
  std::set<Chan> constants;
};

inline NameReport analyze(const ProcPtr& p) {
  return {free_chan_vars(p), free_proc_vars(p), constants_of(p)};
}

/// True when every channel constant the process mentions is live in the
/// resource; the precondition for fault-free execution.
inline bool safety_check(const Resource& sigma, const ProcPtr& p) {
  require_executable(p);
  for (Chan c : constants_of(p))
    if (!sigma.contains(c)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Substitution.

/// Replaces free occurrences of channel variable `var` with expression
/// `repl`.  Binders shadow as usual; when `repl` is itself a variable the
/// caller must ensure no binder in `p` captures it.
inline ProcPtr subst_chan_expr(const ProcPtr& p, const std::string& var,
                               const ChanExpr& repl) {
  struct V {
    const std::string& var;
    const ChanExpr& repl;

    ChanExpr on_expr(const ChanExpr& e) const {
      if (!e.is_const && e.var == var) return repl;
      return e;
    }
    ProcPtr operator()(const SumN& s) const {
      std::vector<Branch> bs;
      bs.reserve(s.branches.size());
      for (const auto& b : s.branches) {
        Prefix pre = b.pre;
        pre.subject = on_expr(pre.subject);
        if (pre.is_send) {
          pre.payload = on_expr(pre.payload);
          bs.push_back({std::move(pre), subst_chan_expr(b.cont, var, repl)});
        } else if (pre.binder == var) {
          bs.push_back({std::move(pre), b.cont});
        } else {
          bs.push_back({std::move(pre), subst_chan_expr(b.cont, var, repl)});
        }
      }
      return make_sum(std::move(bs));
    }
    ProcPtr operator()(const IChoiceN& n) const {
      return make_ichoice(subst_chan_expr(n.left, var, repl),
                          subst_chan_expr(n.right, var, repl));
    }
    ProcPtr operator()(const NewN& n) const {
      if (n.var == var) return make_new(n.var, n.body);
      return make_new(n.var, subst_chan_expr(n.body, var, repl));
    }
    ProcPtr operator()(const ParN& n) const {
      return make_par(subst_chan_expr(n.left, var, repl),
                      subst_chan_expr(n.right, var, repl));
    }
    ProcPtr operator()(const RecN& n) const {
      return make_rec(n.var, subst_chan_expr(n.body, var, repl));
    }
    ProcPtr operator()(const PVarN& v) const { return make_pvar(v.name); }
  };
  return std::visit(V{var, repl}, p->node);
}

/// Replaces free occurrences of channel variable `var` with constant `c`.
inline ProcPtr subst_chan(const ProcPtr& p, const std::string& var, Chan c) {
  return subst_chan_expr(p, var, ChanExpr::constant(c));
}

namespace detail {
inline std::string fresh_name(const std::string& base,
                              const std::set<std::string>& avoid) {
  std::string name = base;
  while (avoid.count(name)) name += "'";
  return name;
}

inline void collect_all_chan_vars(const ProcPtr& p,
                                  std::set<std::string>& out) {
  struct V {
    std::set<std::string>& out;
    void on_expr(const ChanExpr& e) const {
      if (!e.is_const) out.insert(e.var);
    }
    void operator()(const SumN& s) const {
      for (const auto& b : s.branches) {
        on_expr(b.pre.subject);
        if (b.pre.is_send)
          on_expr(b.pre.payload);
        else
          out.insert(b.pre.binder);
        collect_all_chan_vars(b.cont, out);
      }
    }
    void operator()(const IChoiceN& n) const {
      collect_all_chan_vars(n.left, out);
      collect_all_chan_vars(n.right, out);
    }
    void operator()(const NewN& n) const {
      out.insert(n.var);
      collect_all_chan_vars(n.body, out);
    }
    void operator()(const ParN& n) const {
      collect_all_chan_vars(n.left, out);
      collect_all_chan_vars(n.right, out);
    }
    void operator()(const RecN& n) const { collect_all_chan_vars(n.body, out); }
    void operator()(const PVarN&) const {}
  };
  std::visit(V{out}, p->node);
}

/// Alpha-renames a channel binder so a term can be substituted underneath
/// without capturing its free variables.
inline std::pair<std::string, ProcPtr> freshen_chan_binder(
    const std::string& binder, const ProcPtr& body,
    const std::set<std::string>& avoid) {
  std::set<std::string> used = avoid;
  collect_all_chan_vars(body, used);
  std::string fresh = fresh_name(binder, used);
  // Renaming via a temporary constant would collide with real channels, so
  // rename free occurrences of the binder structurally instead.
  struct Rename {
    const std::string& from;
    const std::string& to;

    ChanExpr on_expr(const ChanExpr& e) const {
      if (!e.is_const && e.var == from) return ChanExpr::variable(to);
      return e;
    }
    ProcPtr run(const ProcPtr& p) const {
      struct V {
        const Rename& r;
        ProcPtr operator()(const SumN& s) const {
          std::vector<Branch> bs;
          for (const auto& b : s.branches) {
            Prefix pre = b.pre;
            pre.subject = r.on_expr(pre.subject);
            if (pre.is_send) {
              pre.payload = r.on_expr(pre.payload);
              bs.push_back({std::move(pre), r.run(b.cont)});
            } else if (pre.binder == r.from) {
              bs.push_back({std::move(pre), b.cont});
            } else {
              bs.push_back({std::move(pre), r.run(b.cont)});
            }
          }
          return make_sum(std::move(bs));
        }
        ProcPtr operator()(const IChoiceN& n) const {
          return make_ichoice(r.run(n.left), r.run(n.right));
        }
        ProcPtr operator()(const NewN& n) const {
          if (n.var == r.from) return make_new(n.var, n.body);
          return make_new(n.var, r.run(n.body));
        }
        ProcPtr operator()(const ParN& n) const {
          return make_par(r.run(n.left), r.run(n.right));
        }
        ProcPtr operator()(const RecN& n) const {
          return make_rec(n.var, r.run(n.body));
        }
        ProcPtr operator()(const PVarN& v) const { return make_pvar(v.name); }
      };
      return std::visit(V{*this}, p->node);
    }
  };
  return {fresh, Rename{binder, fresh}.run(body)};
}
}  // namespace detail

/// Replaces free occurrences of process variable `name` with `q`,
/// alpha-renaming channel binders that would capture free variables of `q`.
inline ProcPtr subst_proc(const ProcPtr& p, const std::string& name,
                          const ProcPtr& q) {
  const std::set<std::string> q_chan_fv = free_chan_vars(q);
  struct V {
    const std::string& name;
    const ProcPtr& q;
    const std::set<std::string>& q_fv;

    ProcPtr run(const ProcPtr& p) const {
      struct Inner {
        const V& v;
        ProcPtr operator()(const SumN& s) const {
          std::vector<Branch> bs;
          for (const auto& b : s.branches) {
            if (!b.pre.is_send && v.q_fv.count(b.pre.binder) &&
                free_proc_vars(b.cont).count(v.name)) {
              auto [fresh, body] =
                  detail::freshen_chan_binder(b.pre.binder, b.cont, v.q_fv);
              Prefix pre = b.pre;
              pre.binder = fresh;
              bs.push_back({std::move(pre), v.run(body)});
            } else {
              bs.push_back({b.pre, v.run(b.cont)});
            }
          }
          return make_sum(std::move(bs));
        }
        ProcPtr operator()(const IChoiceN& n) const {
          return make_ichoice(v.run(n.left), v.run(n.right));
        }
        ProcPtr operator()(const NewN& n) const {
          if (v.q_fv.count(n.var) && free_proc_vars(n.body).count(v.name)) {
            auto [fresh, body] =
                detail::freshen_chan_binder(n.var, n.body, v.q_fv);
            return make_new(fresh, v.run(body));
          }
          return make_new(n.var, v.run(n.body));
        }
        ProcPtr operator()(const ParN& n) const {
          return make_par(v.run(n.left), v.run(n.right));
        }
        ProcPtr operator()(const RecN& n) const {
          if (n.var == v.name) return make_rec(n.var, n.body);
          return make_rec(n.var, v.run(n.body));
        }
        ProcPtr operator()(const PVarN& pv) const {
          return pv.name == v.name ? v.q : make_pvar(pv.name);
        }
      };
      return std::visit(Inner{*this}, p->node);
    }
  };
  return V{name, q, q_chan_fv}.run(p);
}

}  // namespace pirho

#endif  // PIRHO_SYNTAX_HPP_
