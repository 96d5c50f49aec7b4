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

#ifndef PIRHO_SAFETY_HPP_
#define PIRHO_SAFETY_HPP_

// Safety-trace semantics, in two independently computed forms that the
// congruence oracle compares:
//
//   observe_traces  walks the resource-sensitive transition system and
//                   collects what the environment can see, up to a depth
//                   bound on observable actions;
//   SafetyCtx::denote  computes the same sets compositionally: a behavior
//                   maps every resource over the universe to a prefix-closed
//                   set of observable traces, built by semantic prefixing,
//                   joins, fixpoints, and trace interleaving.
//
// Traces are stored in observable form: internal and allocation steps leave
// no element, and sending a privately held channel is stored as the two-step
// expansion (allocation, then the send).  The depth bound counts stored
// elements, so a bound send costs two.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pirho/opsem.hpp"
#include "pirho/resources.hpp"
#include "pirho/syntax.hpp"

namespace pirho {

using Trace = std::vector<Action>;
using TraceSet = std::set<Trace>;

inline bool is_prefix_closed(const TraceSet& ts) {
  if (!ts.count(Trace{})) return false;
  for (const auto& t : ts) {
    if (t.empty()) continue;
    Trace shorter(t.begin(), t.end() - 1);
    if (!ts.count(shorter)) return false;
  }
  return true;
}

/// Prepends an observed action sequence to every trace of a set, trimming
/// to `depth` stored elements.  Partial prefixes of the observation itself
/// are included, which keeps results prefix-closed and lets a two-element
/// bound-send expansion contribute its allocation half at the bound.
inline TraceSet splice(const Trace& obs, const TraceSet& ts, int depth) {
  TraceSet out;
  const int n = static_cast<int>(obs.size());
  for (int l = 0; l <= n && l <= depth; ++l)
    out.insert(Trace(obs.begin(), obs.begin() + l));
  if (n <= depth) {
    for (const auto& t : ts) {
      if (n + static_cast<int>(t.size()) > depth) continue;
      Trace full = obs;
      full.insert(full.end(), t.begin(), t.end());
      out.insert(std::move(full));
    }
  }
  return out;
}

inline std::string render_trace(const Trace& t, const Universe& u) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += " . ";
    out += render_action(t[i], u);
  }
  return out;
}

/// A total map from resources (domain within the universe) to bounded
/// trace sets, stored densely by resource index.
class Behavior {
 public:
  Behavior() = default;
  explicit Behavior(int width)
      : width_(width), table_(resource_count(width), TraceSet{Trace{}}) {}

  static Behavior bottom(int width) { return Behavior(width); }

  int width() const { return width_; }

  const TraceSet& at(const Resource& sigma) const {
    return table_[sigma.index()];
  }
  TraceSet& at(const Resource& sigma) { return table_[sigma.index()]; }

  bool operator==(const Behavior&) const = default;

 private:
  int width_ = 0;
  std::vector<TraceSet> table_;
};

/// Environment for the denotational clauses: channel variables resolve to
/// constants, process variables to behaviors.
struct Env {
  std::map<std::string, Chan> chan;
  std::map<std::string, Behavior> proc;
};

/// Shared configuration (universe and depth bound) plus the interleaving
/// memo table for the safety denotational semantics.
class SafetyCtx {
 public:
  SafetyCtx(Universe u, int k) : u_(std::move(u)), k_(k) {}

  const Universe& universe() const { return u_; }
  int depth() const { return k_; }

  /// Semantic prefixing: at each resource, run the action; a permitted step
  /// splices its observation before the continuation's traces at the updated
  /// resource, an overstepping action contributes the fault trace, an
  /// impossible one contributes nothing beyond the empty trace.
  Behavior prefix_behavior(const Action& a, const Behavior& b) const {
    Behavior out(u_.size());
    for (const auto& sigma : all_resources(u_.size())) {
      const Verdict v = apply_action(a, sigma);
      TraceSet& ts = out.at(sigma);
      switch (v.kind) {
        case Verdict::Ok:
          ts = splice(observe_action(a, sigma), b.at(v.next), k_);
          break;
        case Verdict::Impermissible:
          ts = splice(Trace{Action::fault()}, TraceSet{Trace{}}, k_);
          break;
        case Verdict::Impossible:
          ts = TraceSet{Trace{}};
          break;
      }
    }
    return out;
  }

  /// Pointwise union; the empty join is the smallest behavior.
  Behavior join(const std::vector<Behavior>& bs) const {
    Behavior out = Behavior::bottom(u_.size());
    for (const auto& b : bs)
      for (const auto& sigma : all_resources(u_.size()))
        out.at(sigma).insert(b.at(sigma).begin(), b.at(sigma).end());
    return out;
  }

  /// All shuffles of two observable traces, as a behavior so that resource
  /// filtering happens where the result is evaluated.  A head action steps
  /// through prefix_behavior; dual heads may also communicate, consuming
  /// both silently with no resource effect.  A stored bound-send expansion
  /// participates as its two primitive elements, so its allocation half
  /// executes (silently, privatizing the channel) before the send can match
  /// a dual receive.
  const Behavior& interleave_traces(const Trace& t, const Trace& v) {
    const auto key = std::make_pair(t, v);
    auto it = imemo_.find(key);
    if (it != imemo_.end()) return it->second;
    std::vector<Behavior> parts;
    if (!t.empty()) {
      parts.push_back(prefix_behavior(
          t[0], interleave_traces(Trace(t.begin() + 1, t.end()), v)));
    }
    if (!v.empty()) {
      parts.push_back(prefix_behavior(
          v[0], interleave_traces(t, Trace(v.begin() + 1, v.end()))));
    }
    if (!t.empty() && !v.empty()) {
      const auto d = dual(t[0]);
      if (d && *d == v[0])
        parts.push_back(interleave_traces(Trace(t.begin() + 1, t.end()),
                                          Trace(v.begin() + 1, v.end())));
    }
    return imemo_.emplace(key, join(parts)).first->second;
  }

  /// Parallel composition: each side's traces are read at the public-lifted
  /// resource (a subprocess cannot assume privacy its sibling might share),
  /// and every pairwise interleaving is evaluated at the original resource.
  Behavior parallel_behaviors(const Behavior& b1, const Behavior& b2) {
    Behavior out = Behavior::bottom(u_.size());
    for (const auto& sigma : all_resources(u_.size())) {
      const Resource lifted = public_lift(sigma);
      TraceSet& ts = out.at(sigma);
      for (const auto& t1 : b1.at(lifted)) {
        for (const auto& t2 : b2.at(lifted)) {
          const TraceSet& mixed = interleave_traces(t1, t2).at(sigma);
          ts.insert(mixed.begin(), mixed.end());
        }
      }
    }
    return out;
  }

  /// The compositional semantics.  Receive and allocation branches join
  /// over every universe constant via the environment; recursion is the
  /// least fixpoint, reached by iterating from the smallest behavior on
  /// the finite lattice of bounded trace sets.
  Behavior denote(const ProcPtr& p, const Env& rho = {}) {
    struct V {
      SafetyCtx& ctx;
      const Env& rho;

      Behavior operator()(const SumN& s) const {
        std::vector<Behavior> parts;
        for (const auto& b : s.branches) {
          const Chan subj = eval_chan(b.pre.subject, rho.chan);
          if (b.pre.is_send) {
            const Chan pay = eval_chan(b.pre.payload, rho.chan);
            parts.push_back(ctx.prefix_behavior(Action::send(subj, pay),
                                                ctx.denote(b.cont, rho)));
          } else {
            for (Chan d = 0; d < ctx.u_.size(); ++d) {
              Env inner = rho;
              inner.chan[b.pre.binder] = d;
              parts.push_back(ctx.prefix_behavior(Action::recv(subj, d),
                                                  ctx.denote(b.cont, inner)));
            }
          }
        }
        return ctx.join(parts);
      }
      Behavior operator()(const IChoiceN& n) const {
        return ctx.join({ctx.denote(n.left, rho), ctx.denote(n.right, rho)});
      }
      Behavior operator()(const NewN& n) const {
        std::vector<Behavior> parts;
        for (Chan c = 0; c < ctx.u_.size(); ++c) {
          Env inner = rho;
          inner.chan[n.var] = c;
          parts.push_back(ctx.prefix_behavior(Action::alloc(c),
                                              ctx.denote(n.body, inner)));
        }
        return ctx.join(parts);
      }
      Behavior operator()(const ParN& n) const {
        return ctx.parallel_behaviors(ctx.denote(n.left, rho),
                                      ctx.denote(n.right, rho));
      }
      Behavior operator()(const RecN& n) const {
        Behavior cur = Behavior::bottom(ctx.u_.size());
        for (int iter = 0;; ++iter) {
          if (iter > kMaxFixpointIters)
            throw SemanticError("recursion fixpoint failed to stabilize");
          Env inner = rho;
          inner.proc[n.var] = cur;
          Behavior next = ctx.denote(n.body, inner);
          if (next == cur) return cur;
          cur = std::move(next);
        }
      }
      Behavior operator()(const PVarN& v) const {
        auto it = rho.proc.find(v.name);
        if (it == rho.proc.end())
          throw SemanticError("unbound process variable '" + v.name + "'");
        return it->second;
      }
    };
    return std::visit(V{*this, rho}, p->node);
  }

 private:
  static constexpr int kMaxFixpointIters = 100000;

  Universe u_;
  int k_;
  std::map<std::pair<Trace, Trace>, Behavior> imemo_;
};

inline Behavior prefix_behavior(const Action& a, const Behavior& b,
                                const Universe& u, int k) {
  return SafetyCtx(u, k).prefix_behavior(a, b);
}

inline Behavior join_behaviors(const std::vector<Behavior>& bs,
                               const Universe& u, int k) {
  return SafetyCtx(u, k).join(bs);
}

inline Behavior interleave_traces(const Trace& t, const Trace& v,
                                  const Universe& u, int k) {
  SafetyCtx ctx(u, k);
  return ctx.interleave_traces(t, v);
}

inline Behavior parallel_behaviors(const Behavior& b1, const Behavior& b2,
                                   const Universe& u, int k) {
  SafetyCtx ctx(u, k);
  return ctx.parallel_behaviors(b1, b2);
}

inline Behavior denote(const ProcPtr& p, const Env& rho, const Universe& u,
                       int k) {
  SafetyCtx ctx(u, k);
  return ctx.denote(p, rho);
}

// ---------------------------------------------------------------------------
// Operational observation.

struct ObserveResult {
  TraceSet traces;
  bool exhausted = false;  ///< a silent run hit the budget before settling
};

inline int default_silent_budget(int k, int universe_size) {
  return 4 * (k < 1 ? 1 : k) * universe_size;
}

namespace detail {
struct ObserveRun {
  using PathKey = std::tuple<std::string, std::size_t, int>;
  using MemoKey = std::tuple<std::string, std::size_t, int, int>;

  const Universe& u;
  int silent_budget;
  long work_budget;
  bool exhausted = false;
  long visited = 0;
  std::set<PathKey> on_path;
  std::map<MemoKey, TraceSet> memo;

  /// `pure` is cleared when the subtree's result depended on context —
  /// a silent cycle back to an open ancestor, or the work cap.  Only
  /// context-free results are memoized; they are exact for their key, so
  /// a later branch reaching the same configuration (same remaining
  /// depth and silent allowance) can reuse them.  This keeps repeated
  /// silent interleavings of independent components from being explored
  /// once per ordering.  Cycle detection deliberately ignores the silent
  /// allowance: revisiting a configuration at the same remaining depth
  /// means the path between the visits was a silent loop.
  TraceSet visit(const ProcPtr& p, const Resource& sigma, int depth,
                 int silent_run, bool& pure) {
    TraceSet out{Trace{}};
    const std::string text = print(p, u);
    const MemoKey mkey =
        std::make_tuple(text, sigma.index(), depth, silent_run);
    if (const auto it = memo.find(mkey); it != memo.end()) return it->second;
    if (++visited > work_budget) {
      // The reachable silent state space is growing without bound; stop
      // expanding and report the exploration as incomplete.
      exhausted = true;
      pure = false;
      return out;
    }
    const PathKey pkey = std::make_tuple(text, sigma.index(), depth);
    if (!on_path.insert(pkey).second) {
      // A silent cycle back to an ancestor: its contribution is already
      // covered by the ancestor's own unfolding (least-fixpoint reading).
      pure = false;
      return out;
    }
    bool sub_pure = true;
    for (const auto& s : res_steps(p, sigma, u)) {
      const Trace obs = observe_action(s.act, sigma);
      if (obs.empty()) {
        if (silent_run >= silent_budget) {
          exhausted = true;
          continue;
        }
        const TraceSet sub =
            visit(s.next, s.sigma, depth, silent_run + 1, sub_pure);
        out.insert(sub.begin(), sub.end());
      } else {
        const int len = static_cast<int>(obs.size());
        TraceSet sub;
        if (len <= depth)
          sub = visit(s.next, s.sigma, depth - len, 0, sub_pure);
        const TraceSet spliced = splice(obs, sub, depth);
        out.insert(spliced.begin(), spliced.end());
      }
    }
    on_path.erase(pkey);
    if (sub_pure) memo.emplace(mkey, out);
    pure = pure && sub_pure;
    return out;
  }
};
}  // namespace detail

/// What the environment can observe of a closed process, by exploring the
/// resource-sensitive transition system.  `k` bounds stored (observable)
/// elements per trace; silent steps are free but each uninterrupted silent
/// run is capped by `silent_budget` (negative selects the default), with
/// exact cycle skipping so the cap only fires on genuinely growing runs.
/// Fully-decided subconfigurations are memoized, so the many orderings of
/// independent silent steps cost one exploration each rather than one per
/// ordering.  `work_budget` caps the total number of expanded
/// configurations so that state spaces growing in breadth also terminate;
/// hitting either cap sets `exhausted` and the returned set is a sound
/// under-approximation.
inline ObserveResult observe_traces(const ProcPtr& p, const Resource& sigma,
                                    const Universe& u, int k,
                                    int silent_budget = -1,
                                    long work_budget = -1) {
  require_executable(p);
  if (silent_budget < 0) silent_budget = default_silent_budget(k, u.size());
  if (work_budget < 0) work_budget = 20000;
  detail::ObserveRun run{u, silent_budget, work_budget, false, 0, {}, {}};
  ObserveResult res;
  bool pure = true;
  res.traces = run.visit(p, sigma, k, 0, pure);
  res.exhausted = run.exhausted;
  return res;
}

}  // namespace pirho

#endif  // PIRHO_SAFETY_HPP_
