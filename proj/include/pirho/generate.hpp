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

#ifndef PIRHO_GENERATE_HPP_
#define PIRHO_GENERATE_HPP_

// Seeded random generation of desk-scale process terms and resources,
// exhaustive enumeration of small terms, and the two-semantics
// cross-check that drives the test corpus.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pirho/liveness.hpp"
#include "pirho/opsem.hpp"
#include "pirho/resources.hpp"
#include "pirho/safety.hpp"
#include "pirho/syntax.hpp"

namespace pirho {

struct GenConfig {
  Universe universe;
  int max_depth = 4;
  int max_sum_width = 2;
  bool allow_rec = true;
  std::uint64_t seed = 0;
  /// Channel / process variables allowed to occur free (for open terms fed
  /// to the refinement logic); empty for closed generation.
  std::vector<std::string> free_chan_vars;
  std::vector<std::string> free_proc_vars;
};

namespace detail {

class ProcGen {
 public:
  explicit ProcGen(const GenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  ProcPtr run() {
    Scope s;
    s.chan_vars = cfg_.free_chan_vars;
    s.proc_vars = cfg_.free_proc_vars;
    s.needs_guard.insert(cfg_.free_proc_vars.begin(),
                         cfg_.free_proc_vars.end());
    return gen(cfg_.max_depth, s);
  }

 private:
  struct Scope {
    std::vector<std::string> chan_vars;
    std::vector<std::string> proc_vars;
    std::set<std::string> needs_guard;  ///< usable only below a prefix
  };

  // rng_() % n is used instead of a distribution so that output is
  // identical across standard library implementations.
  std::uint64_t rnd(std::uint64_t n) { return rng_() % n; }

  ChanExpr gen_expr(const Scope& s) {
    const std::size_t n =
        static_cast<std::size_t>(cfg_.universe.size()) + s.chan_vars.size();
    const std::size_t i = rnd(n);
    if (i < static_cast<std::size_t>(cfg_.universe.size()))
      return ChanExpr::constant(static_cast<Chan>(i));
    return ChanExpr::variable(
        s.chan_vars[i - static_cast<std::size_t>(cfg_.universe.size())]);
  }

  std::string fresh_chan() { return "v" + std::to_string(vcount_++); }
  std::string fresh_proc() { return "R" + std::to_string(rcount_++); }

  ProcPtr gen_leaf(const Scope& s) {
    std::vector<std::string> usable;
    for (const auto& v : s.proc_vars)
      if (!s.needs_guard.count(v)) usable.push_back(v);
    const std::size_t n = 2 + usable.size();
    const std::size_t i = rnd(n);
    if (i < 2 || usable.empty()) return make_zero();
    return make_pvar(usable[i - 2]);
  }

  Branch gen_branch(int depth, const Scope& s) {
    Scope inner = s;
    inner.needs_guard.clear();  // a prefix guards everything below it
    if (rnd(2) == 0) {
      Prefix pre = Prefix::send(gen_expr(s), gen_expr(s));
      return {std::move(pre), gen(depth - 1, inner)};
    }
    const std::string binder = fresh_chan();
    Prefix pre = Prefix::recv(gen_expr(s), binder);
    inner.chan_vars.push_back(binder);
    return {std::move(pre), gen(depth - 1, inner)};
  }

  ProcPtr gen(int depth, const Scope& s) {
    if (depth <= 0) return gen_leaf(s);
    // Weighted choice of node kind.
    const int w_sum1 = 5, w_sum2 = (cfg_.max_sum_width >= 2 ? 2 : 0),
              w_par = 3, w_icho = 2, w_new = 2,
              w_rec = (cfg_.allow_rec ? 1 : 0), w_leaf = 2;
    const int total =
        w_sum1 + w_sum2 + w_par + w_icho + w_new + w_rec + w_leaf;
    int pick = static_cast<int>(rnd(static_cast<std::uint64_t>(total)));
    if ((pick -= w_sum1) < 0) return make_sum({gen_branch(depth, s)});
    if ((pick -= w_sum2) < 0) {
      std::vector<Branch> bs;
      bs.push_back(gen_branch(depth, s));
      bs.push_back(gen_branch(depth, s));
      return make_sum(std::move(bs));
    }
    if ((pick -= w_par) < 0)
      return make_par(gen(depth - 1, s), gen(depth - 1, s));
    if ((pick -= w_icho) < 0)
      return make_ichoice(gen(depth - 1, s), gen(depth - 1, s));
    if ((pick -= w_new) < 0) {
      Scope inner = s;
      const std::string binder = fresh_chan();
      inner.chan_vars.push_back(binder);
      return make_new(binder, gen(depth - 1, inner));
    }
    if ((pick -= w_rec) < 0) {
      Scope inner = s;
      const std::string binder = fresh_proc();
      inner.proc_vars.push_back(binder);
      inner.needs_guard.insert(binder);  // keep recursion guarded
      return make_rec(binder, gen(depth - 1, inner));
    }
    return gen_leaf(s);
  }

  const GenConfig& cfg_;
  std::mt19937_64 rng_;
  int vcount_ = 0;
  int rcount_ = 0;
};

}  // namespace detail

/// Deterministic-in-seed random process over the configured universe;
/// closed unless free variables are explicitly allowed, with every
/// recursion binder guarded.
inline ProcPtr gen_process(const GenConfig& cfg) {
  return detail::ProcGen(cfg).run();
}

/// A resource for exercising a term: every constant the term mentions is
/// owned (randomly pub or pri), other universe channels are absent, pub,
/// or pri at random.  The pair always passes safety_check.
inline Resource gen_resource(const ProcPtr& p, const Universe& u,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Resource sigma(u.size());
  const std::set<Chan> used = constants_of(p);
  for (Chan c = 0; c < u.size(); ++c) {
    if (used.count(c)) {
      sigma = sigma.with(c, rng() % 2 == 0 ? Own::Pub : Own::Pri);
    } else {
      switch (rng() % 3) {
        case 0: break;
        case 1: sigma = sigma.with(c, Own::Pub); break;
        default: sigma = sigma.with(c, Own::Pri); break;
      }
    }
  }
  return sigma;
}

/// The seeded corpus: instance i is generated from seed base_seed + i,
/// paired with a resource from an offset stream.
inline std::vector<std::pair<ProcPtr, Resource>> make_corpus(
    int count, const GenConfig& base) {
  std::vector<std::pair<ProcPtr, Resource>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    GenConfig cfg = base;
    cfg.seed = base.seed + static_cast<std::uint64_t>(i);
    ProcPtr p = gen_process(cfg);
    Resource sigma =
        gen_resource(p, base.universe, base.seed + 0x9e3779b9u + i);
    out.emplace_back(std::move(p), std::move(sigma));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration of small closed terms.

namespace detail {
inline std::vector<ChanExpr> enum_exprs(const Universe& u, int nchan) {
  std::vector<ChanExpr> out;
  for (Chan c = 0; c < u.size(); ++c) out.push_back(ChanExpr::constant(c));
  for (int i = 1; i <= nchan; ++i)
    out.push_back(ChanExpr::variable("b" + std::to_string(i)));
  return out;
}

// pstate: 0 = no process variable in scope, 1 = in scope but must be
// guarded first, 2 = usable.
inline std::vector<ProcPtr> enum_build(const Universe& u, int depth, int nchan,
                                       int pstate, int max_sum_width) {
  std::vector<ProcPtr> out;
  out.push_back(make_zero());
  if (pstate == 2) out.push_back(make_pvar("X"));
  if (depth <= 0) return out;

  const auto exprs = enum_exprs(u, nchan);
  std::vector<Branch> branches;
  {
    const auto conts =
        enum_build(u, depth - 1, nchan, pstate == 1 ? 2 : pstate,
                   max_sum_width);
    for (const auto& subj : exprs)
      for (const auto& pay : exprs)
        for (const auto& c : conts)
          branches.push_back({Prefix::send(subj, pay), c});
    const std::string binder = "b" + std::to_string(nchan + 1);
    const auto rconts =
        enum_build(u, depth - 1, nchan + 1, pstate == 1 ? 2 : pstate,
                   max_sum_width);
    for (const auto& subj : exprs)
      for (const auto& c : rconts)
        branches.push_back({Prefix::recv(subj, binder), c});
  }
  for (const auto& b : branches) out.push_back(make_sum({b}));
  if (max_sum_width >= 2) {
    for (std::size_t i = 0; i < branches.size(); ++i)
      for (std::size_t j = i + 1; j < branches.size(); ++j)
        out.push_back(make_sum({branches[i], branches[j]}));
  }

  const auto subs = enum_build(u, depth - 1, nchan, pstate, max_sum_width);
  for (const auto& l : subs)
    for (const auto& r : subs) {
      out.push_back(make_par(l, r));
      out.push_back(make_ichoice(l, r));
    }
  {
    const std::string binder = "b" + std::to_string(nchan + 1);
    for (const auto& body :
         enum_build(u, depth - 1, nchan + 1, pstate, max_sum_width))
      out.push_back(make_new(binder, body));
  }
  if (pstate == 0) {
    for (const auto& body :
         enum_build(u, depth - 1, nchan, 1, max_sum_width))
      out.push_back(make_rec("X", body));
  }
  return out;
}
}  // namespace detail

/// Every closed term of AST depth at most `depth` over the universe, with
/// choice width capped; binders use canonical names.
inline std::vector<ProcPtr> enum_processes(const Universe& u, int depth,
                                           int max_sum_width = 2) {
  return detail::enum_build(u, depth, 0, 0, max_sum_width);
}

// ---------------------------------------------------------------------------
// The two-semantics cross-check.

enum class CongMode { Safety, Liveness };

struct CongruenceReport {
  bool equal = false;
  bool skipped = false;      ///< instance could not be decided
  std::string skip_reason;
  std::vector<std::string> only_op;   ///< rendered traces missing from denote
  std::vector<std::string> only_den;  ///< rendered traces missing from observe
};

/// Compares the operational observation with the denotational table entry
/// at one (process, resource) instance.  Contexts are taken by pointer so a
/// caller can share memo tables across a corpus; pass null to use one-shot
/// contexts.
inline CongruenceReport congruence_check(const ProcPtr& p,
                                         const Resource& sigma,
                                         const Universe& u, int k,
                                         CongMode mode,
                                         SafetyCtx* sctx = nullptr,
                                         LivenessCtx* lctx = nullptr) {
  CongruenceReport rep;
  if (mode == CongMode::Safety) {
    SafetyCtx local(u, k);
    SafetyCtx& ctx = sctx ? *sctx : local;
    const ObserveResult op = observe_traces(p, sigma, u, k);
    if (op.exhausted) {
      rep.skipped = true;
      rep.skip_reason = "silent budget exhausted";
      return rep;
    }
    const Behavior den = ctx.denote(p);
    const TraceSet& ds = den.at(sigma);
    for (const auto& t : op.traces)
      if (!ds.count(t)) rep.only_op.push_back(render_trace(t, u));
    for (const auto& t : ds)
      if (!op.traces.count(t)) rep.only_den.push_back(render_trace(t, u));
    rep.equal = rep.only_op.empty() && rep.only_den.empty();
    return rep;
  }
  LivenessCtx local(u, k);
  LivenessCtx& ctx = lctx ? *lctx : local;
  const LTraceSet op = ctx.lobserve(p, sigma, k);
  const LBehavior den = ctx.ldenote(p);
  const LTraceSet& ds = den.at(sigma);
  if (has_unknown(op) || has_unknown(ds)) {
    rep.skipped = true;
    rep.skip_reason = "state budget exhausted (Unknown)";
    return rep;
  }
  for (const auto& t : op)
    if (!ds.count(t)) rep.only_op.push_back(render_ltrace(t, u));
  for (const auto& t : ds)
    if (!op.count(t)) rep.only_den.push_back(render_ltrace(t, u));
  rep.equal = rep.only_op.empty() && rep.only_den.empty();
  return rep;
}

}  // namespace pirho

#endif  // PIRHO_GENERATE_HPP_
