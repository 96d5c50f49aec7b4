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

#ifndef PIRHO_LIVENESS_HPP_
#define PIRHO_LIVENESS_HPP_

// Liveness-trace semantics.  A liveness trace records a complete run: a
// finite sequence of observable interactions ending in a terminal —
// Blocked(directions) for a process waiting on its environment, Faulted for
// a fault or for divergence (both are catastrophic and identified), or
// Truncated when the depth bound cut the run short.  Unknown marks runs the
// silent-state budget could not settle; comparisons refuse to treat it as
// an answer.  Sets of liveness traces are not prefix-closed.
//
// Divergence dominates: a set containing Faulted after prefix t stands for
// every extension of t.  Sets are kept in the normal form where such
// extensions are pruned, so equality of normal forms is equality of the
// behaviors they denote.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pirho/opsem.hpp"
#include "pirho/resources.hpp"
#include "pirho/safety.hpp"
#include "pirho/syntax.hpp"

namespace pirho {

enum class LTerm : std::uint8_t { Blocked, Faulted, Truncated, Unknown };

struct LTrace {
  Trace acts;         ///< observable interactions; no Fault/Block inside
  LTerm term = LTerm::Blocked;
  DirSet dirs;        ///< Blocked only

  static LTrace blocked(Trace t, DirSet d) {
    return {std::move(t), LTerm::Blocked, d};
  }
  static LTrace faulted(Trace t = {}) { return {std::move(t), LTerm::Faulted, {}}; }
  static LTrace truncated(Trace t = {}) {
    return {std::move(t), LTerm::Truncated, {}};
  }
  static LTrace unknown(Trace t = {}) { return {std::move(t), LTerm::Unknown, {}}; }

  auto operator<=>(const LTrace&) const = default;
};

using LTraceSet = std::set<LTrace>;

inline std::string render_ltrace(const LTrace& t, const Universe& u) {
  std::string out = render_trace(t.acts, u);
  if (!out.empty()) out += " . ";
  switch (t.term) {
    case LTerm::Blocked: out += "delta" + render_dirset(t.dirs, u); break;
    case LTerm::Faulted: out += "FAULT"; break;
    case LTerm::Truncated: out += "..."; break;
    case LTerm::Unknown: out += "?"; break;
  }
  return out;
}

namespace detail {
inline bool is_act_prefix(const Trace& p, const Trace& t) {
  if (p.size() > t.size()) return false;
  return std::equal(p.begin(), p.end(), t.begin());
}
}  // namespace detail

/// Canonical form for catastrophic domination: keep each minimal Faulted
/// prefix and drop every other trace extending it (a diverging or faulting
/// point admits all extensions, so one marker stands for them all).
inline LTraceSet normalize(const LTraceSet& s) {
  std::vector<Trace> fault_pts;
  for (const auto& t : s)
    if (t.term == LTerm::Faulted) fault_pts.push_back(t.acts);
  std::vector<Trace> minimal;
  for (const auto& f : fault_pts) {
    bool dominated = false;
    for (const auto& g : fault_pts)
      if (g != f && detail::is_act_prefix(g, f)) {
        dominated = true;
        break;
      }
    if (!dominated) minimal.push_back(f);
  }
  LTraceSet out;
  for (const auto& t : s) {
    bool drop = false;
    for (const auto& f : minimal) {
      if (t.term == LTerm::Faulted && t.acts == f) continue;
      if (detail::is_act_prefix(f, t.acts)) {
        drop = true;
        break;
      }
    }
    if (!drop) out.insert(t);
  }
  return out;
}

inline bool has_unknown(const LTraceSet& s) {
  for (const auto& t : s)
    if (t.term == LTerm::Unknown) return true;
  return false;
}

/// Total map from resources to liveness trace sets, entries kept normalized.
class LBehavior {
 public:
  LBehavior() = default;

  static LBehavior empty(int width) {
    LBehavior b;
    b.width_ = width;
    b.table_.assign(resource_count(width), LTraceSet{});
    return b;
  }

  /// The greatest element: immediately catastrophic everywhere.
  static LBehavior top(int width) {
    LBehavior b = empty(width);
    for (auto& e : b.table_) e.insert(LTrace::faulted());
    return b;
  }

  int width() const { return width_; }
  const LTraceSet& at(const Resource& sigma) const {
    return table_[sigma.index()];
  }
  LTraceSet& at(const Resource& sigma) { return table_[sigma.index()]; }

  bool operator==(const LBehavior&) const = default;

 private:
  int width_ = 0;
  std::vector<LTraceSet> table_;
};

inline bool has_unknown(const LBehavior& b) {
  for (const auto& sigma : all_resources(b.width()))
    if (has_unknown(b.at(sigma))) return true;
  return false;
}

/// Takes the longest unit-aligned piece of an action sequence that fits the
/// budget; an allocation and the send it precedes form one indivisible unit.
inline Trace cut_units(const Trace& acts, int budget) {
  std::size_t i = 0;
  int used = 0;
  while (i < acts.size()) {
    const int unit = (acts[i].kind == ActKind::Alloc) ? 2 : 1;
    if (used + unit > budget) break;
    used += unit;
    i += static_cast<std::size_t>(unit);
  }
  return Trace(acts.begin(), acts.begin() + static_cast<std::ptrdiff_t>(i));
}

/// Prepends one observed unit to every trace of a set, within `budget`
/// stored elements.  A unit that cannot fit at all truncates immediately;
/// a continuation that runs past the budget is cut at a unit boundary and
/// marked Truncated.  An empty continuation set stays empty: liveness
/// traces are complete runs, never invented prefixes.
inline LTraceSet lsplice(const Trace& obs, const LTraceSet& s, int budget) {
  const int len = static_cast<int>(obs.size());
  if (len > budget) return {LTrace::truncated()};
  LTraceSet out;
  for (const auto& t : s) {
    Trace full = obs;
    if (len + static_cast<int>(t.acts.size()) <= budget) {
      full.insert(full.end(), t.acts.begin(), t.acts.end());
      out.insert(LTrace{std::move(full), t.term, t.dirs});
    } else {
      const Trace kept = cut_units(t.acts, budget - len);
      full.insert(full.end(), kept.begin(), kept.end());
      out.insert(LTrace::truncated(std::move(full)));
    }
  }
  return normalize(out);
}

/// The direction a prefix offers, with its subject resolved.
inline std::pair<Chan, Polarity> dir_of(const Prefix& pre,
                                        const std::map<std::string, Chan>& env) {
  return {eval_chan(pre.subject, env),
          pre.is_send ? Polarity::SendDir : Polarity::RecvDir};
}

/// Environment for the liveness denotational clauses.
struct LEnv {
  std::map<std::string, Chan> chan;
  std::map<std::string, LBehavior> proc;
};

/// Shared configuration and memo tables for the liveness semantics.
class LivenessCtx {
 public:
  LivenessCtx(Universe u, int k, int state_budget = 2000)
      : u_(std::move(u)), k_(k), state_budget_(state_budget) {}

  const Universe& universe() const { return u_; }
  int depth() const { return k_; }

  /// Executes one action ahead of a behavior: a permitted step splices its
  /// observation, an overstepping one is the catastrophic trace, an
  /// impossible one contributes no complete run at all.  A blocking action
  /// is terminal: permitted execution yields exactly the blocked trace
  /// projected onto publicly shared channels.
  LBehavior lprefix(const Action& a, const LBehavior& b) const {
    LBehavior out = LBehavior::empty(u_.size());
    for (const auto& sigma : all_resources(u_.size())) {
      const Verdict v = apply_action(a, sigma);
      if (v.is_top()) {
        out.at(sigma) = {LTrace::faulted()};
      } else if (v.is_ok()) {
        if (a.kind == ActKind::Block) {
          out.at(sigma) = {
              LTrace::blocked({}, a.dirs.restrict_pub(sigma))};
        } else {
          out.at(sigma) =
              lsplice(observe_action(a, sigma), b.at(v.next), k_);
        }
      }
    }
    return out;
  }

  LBehavior join(const std::vector<LBehavior>& bs) const {
    LBehavior out = LBehavior::empty(u_.size());
    for (const auto& b : bs)
      for (const auto& sigma : all_resources(u_.size()))
        out.at(sigma).insert(b.at(sigma).begin(), b.at(sigma).end());
    for (const auto& sigma : all_resources(u_.size()))
      out.at(sigma) = normalize(out.at(sigma));
    return out;
  }

  /// All complete shuffles of two liveness traces.  A reached Faulted
  /// terminal is catastrophic for the whole composition; a reached Unknown
  /// or Truncated terminal ends the composite run with that marker.  Two
  /// blocked terminals merge into one blocked action — executed against the
  /// resource — provided neither offers what the other's reverse offers
  /// (otherwise they could communicate, so the pair yields no blocked run).
  /// Otherwise head actions advance one side at a time, and dual heads may
  /// additionally cancel silently as an internal communication.
  const LBehavior& linterleave(const LTrace& t, const LTrace& v) {
    const auto key = std::make_pair(t, v);
    auto it = imemo_.find(key);
    if (it != imemo_.end()) return it->second;

    LBehavior result = LBehavior::empty(u_.size());
    const bool t_done = t.acts.empty();
    const bool v_done = v.acts.empty();
    auto fill_all = [&](const LTrace& marker) {
      for (const auto& sigma : all_resources(u_.size()))
        result.at(sigma) = {marker};
    };

    if ((t_done && t.term == LTerm::Faulted) ||
        (v_done && v.term == LTerm::Faulted)) {
      fill_all(LTrace::faulted());
    } else if ((t_done && t.term == LTerm::Unknown) ||
               (v_done && v.term == LTerm::Unknown)) {
      fill_all(LTrace::unknown());
    } else if ((t_done && t.term == LTerm::Truncated) ||
               (v_done && v.term == LTerm::Truncated)) {
      fill_all(LTrace::truncated());
    } else if (t_done && v_done) {
      // Both blocked.
      if (!t.dirs.reversed().intersects(v.dirs)) {
        result = lprefix(Action::block(t.dirs.union_with(v.dirs)),
                         LBehavior::empty(u_.size()));
      }
    } else {
      std::vector<LBehavior> parts;
      if (!t_done) {
        LTrace t2 = t;
        t2.acts.erase(t2.acts.begin());
        parts.push_back(lprefix(t.acts[0], linterleave(t2, v)));
      }
      if (!v_done) {
        LTrace v2 = v;
        v2.acts.erase(v2.acts.begin());
        parts.push_back(lprefix(v.acts[0], linterleave(t, v2)));
      }
      if (!t_done && !v_done) {
        const auto d = dual(t.acts[0]);
        if (d && *d == v.acts[0]) {
          LTrace t2 = t;
          t2.acts.erase(t2.acts.begin());
          LTrace v2 = v;
          v2.acts.erase(v2.acts.begin());
          parts.push_back(linterleave(t2, v2));
        }
      }
      result = join(parts);
    }
    return imemo_.emplace(key, std::move(result)).first->second;
  }

  /// Parallel composition: component runs read at the public lift, every
  /// pairwise shuffle evaluated at the original resource.
  LBehavior lparallel(const LBehavior& b1, const LBehavior& b2) {
    LBehavior out = LBehavior::empty(u_.size());
    for (const auto& sigma : all_resources(u_.size())) {
      const Resource lifted = public_lift(sigma);
      LTraceSet& ts = out.at(sigma);
      for (const auto& t1 : b1.at(lifted)) {
        for (const auto& t2 : b2.at(lifted)) {
          const LTraceSet& mixed = linterleave(t1, t2).at(sigma);
          ts.insert(mixed.begin(), mixed.end());
        }
      }
      ts = normalize(ts);
    }
    return out;
  }

  /// The liveness denotational semantics.  Like the safety semantics, but:
  /// a choice additionally denotes the blocked run carrying every branch's
  /// direction; an allocation binder whose every branch is impossible (the
  /// universe exhausted) denotes the fully deadlocked run; recursion is the
  /// greatest fixpoint, iterated downward from the catastrophic behavior.
  LBehavior ldenote(const ProcPtr& p, const LEnv& rho = {}) {
    struct V {
      LivenessCtx& ctx;
      const LEnv& rho;

      LBehavior operator()(const SumN& s) const {
        std::vector<LBehavior> parts;
        DirSet sum_dirs;
        for (const auto& b : s.branches) {
          const auto [subj, pol] = dir_of(b.pre, rho.chan);
          sum_dirs.add(subj, pol);
          if (b.pre.is_send) {
            const Chan pay = eval_chan(b.pre.payload, rho.chan);
            parts.push_back(ctx.lprefix(Action::send(subj, pay),
                                        ctx.ldenote(b.cont, rho)));
          } else {
            for (Chan d = 0; d < ctx.u_.size(); ++d) {
              LEnv inner = rho;
              inner.chan[b.pre.binder] = d;
              parts.push_back(ctx.lprefix(Action::recv(subj, d),
                                          ctx.ldenote(b.cont, inner)));
            }
          }
        }
        parts.push_back(ctx.lprefix(Action::block(sum_dirs),
                                    LBehavior::empty(ctx.u_.size())));
        return ctx.join(parts);
      }
      LBehavior operator()(const IChoiceN& n) const {
        return ctx.join({ctx.ldenote(n.left, rho), ctx.ldenote(n.right, rho)});
      }
      LBehavior operator()(const NewN& n) const {
        std::vector<LBehavior> parts;
        for (Chan c = 0; c < ctx.u_.size(); ++c) {
          LEnv inner = rho;
          inner.chan[n.var] = c;
          parts.push_back(ctx.lprefix(Action::alloc(c),
                                      ctx.ldenote(n.body, inner)));
        }
        LBehavior out = ctx.join(parts);
        // With every allocation impossible (domain exhausted), the binder
        // can do nothing at all: it denotes the fully deadlocked run.
        for (const auto& sigma : all_resources(ctx.u_.size())) {
          if (sigma.domain_full()) {
            out.at(sigma).insert(LTrace::blocked({}, {}));
            out.at(sigma) = normalize(out.at(sigma));
          }
        }
        return out;
      }
      LBehavior operator()(const ParN& n) const {
        return ctx.lparallel(ctx.ldenote(n.left, rho),
                             ctx.ldenote(n.right, rho));
      }
      LBehavior operator()(const RecN& n) const {
        LBehavior cur = LBehavior::top(ctx.u_.size());
        for (int iter = 0;; ++iter) {
          if (iter > kMaxFixpointIters)
            throw SemanticError("recursion fixpoint failed to stabilize");
          LEnv inner = rho;
          inner.proc[n.var] = cur;
          LBehavior next = ctx.ldenote(n.body, inner);
          if (next == cur) return cur;
          cur = std::move(next);
        }
      }
      LBehavior operator()(const PVarN& v) const {
        auto it = rho.proc.find(v.name);
        if (it == rho.proc.end())
          throw SemanticError("unbound process variable '" + v.name + "'");
        return it->second;
      }
    };
    return std::visit(V{*this, rho}, p->node);
  }

  /// Operational liveness observation, bounded at `k` stored elements.
  /// At each configuration the silent closure is explored first: a silent
  /// cycle is divergence (catastrophic), a closure larger than the state
  /// budget is Unknown.  Every settled closure state then contributes its
  /// fault, blocked, and communication observations.
  LTraceSet lobserve(const ProcPtr& p, const Resource& sigma, int depth) {
    const auto key = std::make_tuple(print(p, u_), sigma.index(), depth);
    auto it = omemo_.find(key);
    if (it != omemo_.end()) return it->second;

    // Silent closure (tau and allocation steps observe as nothing).
    std::vector<Config> closure{{p, sigma}};
    std::map<std::pair<std::string, std::size_t>, std::size_t> seen;
    seen.emplace(std::make_pair(print(p, u_), sigma.index()), 0);
    std::vector<std::vector<std::size_t>> silent_edges(1);
    bool overflow = false;
    for (std::size_t i = 0; i < closure.size() && !overflow; ++i) {
      for (const auto& s : res_steps(closure[i].proc, closure[i].sigma, u_)) {
        if (!observe_action(s.act, closure[i].sigma).empty()) continue;
        const auto skey = std::make_pair(print(s.next, u_), s.sigma.index());
        auto [pos, fresh] = seen.emplace(skey, closure.size());
        if (fresh) {
          closure.push_back({s.next, s.sigma});
          silent_edges.emplace_back();
          if (static_cast<int>(closure.size()) > state_budget_) {
            overflow = true;
            break;
          }
        }
        silent_edges[i].push_back(pos->second);
      }
    }
    // A cycle in the silent subgraph is an infinite run of internal steps:
    // the process can livelock here.  Detected by peeling zero-in-degree
    // states; anything left sits on or behind a cycle.
    bool diverges = false;
    if (!overflow) {
      std::vector<int> indeg(closure.size(), 0);
      for (const auto& outs : silent_edges)
        for (std::size_t j : outs) indeg[j]++;
      std::vector<std::size_t> ready;
      for (std::size_t j = 0; j < closure.size(); ++j)
        if (indeg[j] == 0) ready.push_back(j);
      std::size_t peeled = 0;
      while (!ready.empty()) {
        const std::size_t j = ready.back();
        ready.pop_back();
        ++peeled;
        for (std::size_t m : silent_edges[j])
          if (--indeg[m] == 0) ready.push_back(m);
      }
      diverges = peeled < closure.size();
    }

    LTraceSet out;
    if (diverges) {
      out = {LTrace::faulted()};
    } else if (overflow) {
      out = {LTrace::unknown()};
    } else {
      for (const auto& cfg : closure) {
        const auto steps = res_steps(cfg.proc, cfg.sigma, u_);
        const auto blocked = blocked_set(cfg.proc, cfg.sigma, u_);
        if (blocked)
          out.insert(
              LTrace::blocked({}, blocked->restrict_pub(cfg.sigma)));
        for (const auto& s : steps) {
          if (s.act.kind == ActKind::Fault) {
            out.insert(LTrace::faulted());
            continue;
          }
          if (!s.act.is_comm()) continue;  // silent; already in the closure
          const Trace obs = observe_action(s.act, cfg.sigma);
          const int len = static_cast<int>(obs.size());
          if (len > depth) {
            out.insert(LTrace::truncated());
            continue;
          }
          const LTraceSet sub = lobserve(s.next, s.sigma, depth - len);
          const LTraceSet spliced = lsplice(obs, sub, depth);
          out.insert(spliced.begin(), spliced.end());
        }
      }
      out = normalize(out);
    }
    return omemo_.emplace(key, std::move(out)).first->second;
  }

 private:
  static constexpr int kMaxFixpointIters = 100000;

  Universe u_;
  int k_;
  int state_budget_;
  std::map<std::pair<LTrace, LTrace>, LBehavior> imemo_;
  std::map<std::tuple<std::string, std::size_t, int>, LTraceSet> omemo_;
};

inline LTraceSet lobserve(const ProcPtr& p, const Resource& sigma,
                          const Universe& u, int k, int state_budget = 2000) {
  require_executable(p);
  LivenessCtx ctx(u, k, state_budget);
  return ctx.lobserve(p, sigma, k);
}

inline LBehavior ldenote(const ProcPtr& p, const LEnv& rho, const Universe& u,
                         int k, int state_budget = 2000) {
  LivenessCtx ctx(u, k, state_budget);
  return ctx.ldenote(p, rho);
}

inline LBehavior linterleave(const LTrace& t, const LTrace& v,
                             const Universe& u, int k) {
  LivenessCtx ctx(u, k);
  return ctx.linterleave(t, v);
}

// ---------------------------------------------------------------------------
// Refinement.

/// t refines v when they are identical; or v ends Faulted at a point t's
/// run extends or matches (a catastrophic specification allows anything
/// past it); or both block at the same point and v offers a subset of t's
/// directions (an implementation may offer more external choices, never
/// fewer).  Truncated and Unknown markers compare only to themselves.
inline bool trace_refines(const LTrace& t, const LTrace& v) {
  if (t == v) return true;
  if (v.term == LTerm::Faulted && detail::is_act_prefix(v.acts, t.acts))
    return true;
  if (t.term == LTerm::Blocked && v.term == LTerm::Blocked &&
      t.acts == v.acts && v.dirs.subset_of(t.dirs))
    return true;
  return false;
}

/// Pointwise refinement of complete-run sets: every run of the candidate
/// must be allowed by some run of the specification.
inline bool set_refines(const LTraceSet& t, const LTraceSet& v) {
  if (has_unknown(t) || has_unknown(v))
    throw SemanticError("refinement undecided: Unknown entries present");
  for (const auto& a : t) {
    bool found = false;
    for (const auto& b : v)
      if (trace_refines(a, b)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

}  // namespace pirho

#endif  // PIRHO_LIVENESS_HPP_
