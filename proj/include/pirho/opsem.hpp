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

#ifndef PIRHO_OPSEM_HPP_
#define PIRHO_OPSEM_HPP_

// The two operational layers.  Layer one generates every action a process
// could conceivably take, instantiating receive payloads and allocations
// over the finite channel universe.  Layer two filters those steps through
// a resource: permitted steps carry the updated resource, overstepping
// actions collapse to a fault step, impossible ones vanish.  The blocked
// predicate reports when a process can only wait for communication.

#include <optional>
#include <string>
#include <vector>

#include "pirho/resources.hpp"
#include "pirho/syntax.hpp"

namespace pirho {

/// A layer-one step: the action is always Send, Recv, Alloc, or Tau.
struct GenStep {
  Action act;
  ProcPtr next;
};

/// A layer-two step; a Fault step has successor 0 and unchanged resource.
struct ResStep {
  Action act;
  ProcPtr next;
  Resource sigma;
};

namespace detail {
inline Chan need_const(const ChanExpr& e) {
  if (!e.is_const)
    throw SemanticError("free channel variable '" + e.var +
                        "' at an active prefix");
  return e.chan;
}
}  // namespace detail

/// All conceivable steps of a closed process: sends and receives from
/// choice branches (receives once per universe constant), internal-choice
/// and recursion-unfold taus, allocations once per universe constant, and
/// for parallel composition the interleavings plus dual-action
/// communications as tau.
inline std::vector<GenStep> gen_steps(const ProcPtr& p, const Universe& u) {
  struct V {
    const ProcPtr& p;
    const Universe& u;

    std::vector<GenStep> operator()(const SumN& s) const {
      std::vector<GenStep> out;
      for (const auto& b : s.branches) {
        const Chan subj = detail::need_const(b.pre.subject);
        if (b.pre.is_send) {
          out.push_back(
              {Action::send(subj, detail::need_const(b.pre.payload)), b.cont});
        } else {
          for (Chan d = 0; d < u.size(); ++d)
            out.push_back(
                {Action::recv(subj, d), subst_chan(b.cont, b.pre.binder, d)});
        }
      }
      return out;
    }
    std::vector<GenStep> operator()(const IChoiceN& n) const {
      return {{Action::tau(), n.left}, {Action::tau(), n.right}};
    }
    std::vector<GenStep> operator()(const NewN& n) const {
      std::vector<GenStep> out;
      for (Chan c = 0; c < u.size(); ++c)
        out.push_back({Action::alloc(c), subst_chan(n.body, n.var, c)});
      return out;
    }
    std::vector<GenStep> operator()(const ParN& n) const {
      std::vector<GenStep> out;
      const auto ls = gen_steps(n.left, u);
      const auto rs = gen_steps(n.right, u);
      for (const auto& s : ls)
        out.push_back({s.act, make_par(s.next, n.right)});
      for (const auto& s : rs)
        out.push_back({s.act, make_par(n.left, s.next)});
      for (const auto& l : ls) {
        const auto d = dual(l.act);
        if (!d) continue;
        for (const auto& r : rs)
          if (r.act == *d)
            out.push_back({Action::tau(), make_par(l.next, r.next)});
      }
      return out;
    }
    std::vector<GenStep> operator()(const RecN& n) const {
      return {{Action::tau(),
               subst_proc(n.body, n.var, make_rec(n.var, n.body))}};
    }
    std::vector<GenStep> operator()(const PVarN& v) const {
      throw SemanticError("free process variable '" + v.name +
                          "' cannot step");
    }
  };
  std::vector<GenStep> raw = std::visit(V{p, u}, p->node);
  // Set semantics: collapse duplicate (action, successor) pairs, keeping
  // first-occurrence order so output is deterministic.
  std::vector<GenStep> out;
  std::set<std::pair<Action, std::string>> seen;
  for (auto& s : raw)
    if (seen.emplace(s.act, print(s.next, u)).second)
      out.push_back(std::move(s));
  return out;
}

/// Layer two: generated steps filtered through the resource.
inline std::vector<ResStep> res_steps(const ProcPtr& p, const Resource& sigma,
                                      const Universe& u) {
  std::vector<ResStep> out;
  std::set<std::tuple<Action, std::string, std::size_t>> seen;
  auto push = [&](Action act, ProcPtr next, Resource s2) {
    if (seen.emplace(act, print(next, u), s2.index()).second)
      out.push_back({act, std::move(next), std::move(s2)});
  };
  for (const auto& g : gen_steps(p, u)) {
    const Verdict v = apply_action(g.act, sigma);
    switch (v.kind) {
      case Verdict::Ok:
        push(g.act, g.next, v.next);
        break;
      case Verdict::Impermissible:
        push(Action::fault(), make_zero(), sigma);
        break;
      case Verdict::Impossible:
        break;
    }
  }
  return out;
}

/// Directions of the communication prefixes a process offers right now
/// (not under a binder, an internal choice, or a recursion).
inline DirSet top_prefix_dirs(const ProcPtr& p) {
  struct V {
    DirSet operator()(const SumN& s) const {
      DirSet d;
      for (const auto& b : s.branches)
        d.add(detail::need_const(b.pre.subject),
              b.pre.is_send ? Polarity::SendDir : Polarity::RecvDir);
      return d;
    }
    DirSet operator()(const IChoiceN&) const { return {}; }
    DirSet operator()(const NewN&) const { return {}; }
    DirSet operator()(const ParN& n) const {
      return top_prefix_dirs(n.left).union_with(top_prefix_dirs(n.right));
    }
    DirSet operator()(const RecN&) const { return {}; }
    DirSet operator()(const PVarN&) const { return {}; }
  };
  return std::visit(V{}, p->node);
}

/// Present exactly when the process can take no internal, allocation, or
/// fault step under sigma, i.e. it can only communicate (or do nothing).
/// The value is the set of offered directions whose subject is live,
/// including offers the resource makes impossible; restriction to public
/// channels happens at observation time.
inline std::optional<DirSet> blocked_set(const ProcPtr& p,
                                         const Resource& sigma,
                                         const Universe& u) {
  for (const auto& s : res_steps(p, sigma, u))
    if (!s.act.is_comm()) return std::nullopt;
  DirSet dirs;
  for (const auto& [c, pol] : top_prefix_dirs(p).items())
    if (sigma.contains(c)) dirs.add(c, pol);
  return dirs;
}

/// A configuration of the layer-two system.
struct Config {
  ProcPtr proc;
  Resource sigma;
};

/// Breadth-first enumeration of configurations reachable within
/// `max_steps` transitions, including the start; `truncated` reports
/// whether the frontier was still growing at the bound.
struct ReachReport {
  std::vector<Config> configs;
  bool truncated = false;
};

inline ReachReport reachable_configs(const ProcPtr& p, const Resource& sigma,
                                     const Universe& u, int max_steps,
                                     std::size_t max_states = 20000) {
  ReachReport rep;
  std::set<std::pair<std::string, std::size_t>> seen;
  std::vector<Config> frontier{{p, sigma}};
  seen.emplace(print(p, u), sigma.index());
  rep.configs.push_back({p, sigma});
  for (int depth = 0; depth < max_steps && !frontier.empty(); ++depth) {
    std::vector<Config> next;
    for (const auto& cfg : frontier) {
      for (const auto& s : res_steps(cfg.proc, cfg.sigma, u)) {
        if (rep.configs.size() >= max_states) {
          rep.truncated = true;
          return rep;
        }
        if (seen.emplace(print(s.next, u), s.sigma.index()).second) {
          rep.configs.push_back({s.next, s.sigma});
          next.push_back({s.next, s.sigma});
        }
      }
    }
    frontier = std::move(next);
    if (depth == max_steps - 1 && !frontier.empty()) rep.truncated = true;
  }
  return rep;
}

}  // namespace pirho

#endif  // PIRHO_OPSEM_HPP_
