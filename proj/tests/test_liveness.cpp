// Tests for the complete-run layer: normal forms, unit-aware splicing, the
// denotational clauses (including deadlock and divergence), the operational
// observer, and the refinement order on runs.
#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "pirho/generate.hpp"
#include "pirho/liveness.hpp"

using namespace pirho;

namespace {

const Universe kU1 = Universe::parse_csv("#c");
const Universe kU2 = Universe::parse_csv("#c,#d");

Resource res1(std::initializer_list<std::pair<Chan, Own>> items) {
  Resource r(1);
  for (const auto& [c, o] : items) r = r.with(c, o);
  return r;
}

Resource res2(std::initializer_list<std::pair<Chan, Own>> items) {
  Resource r(2);
  for (const auto& [c, o] : items) r = r.with(c, o);
  return r;
}

const Action kSendCC = Action::send(0, 0);
const Action kRecvCC = Action::recv(0, 0);
const Action kSendDD = Action::send(1, 1);
const Action kSendCD = Action::send(0, 1);
const Action kAllocD = Action::alloc(1);

const DirSet kNoDirs;
const DirSet kSendC = DirSet::of({{0, Polarity::SendDir}});
const DirSet kRecvC = DirSet::of({{0, Polarity::RecvDir}});
const DirSet kBothC =
    DirSet::of({{0, Polarity::SendDir}, {0, Polarity::RecvDir}});

LTrace dead(Trace t = {}) { return LTrace::blocked(std::move(t), kNoDirs); }

}  // namespace

TEST_CASE("complete runs render with their terminal marker") {
  CHECK(render_ltrace(dead(), kU1) == "delta{}");
  CHECK(render_ltrace(LTrace::blocked({}, kSendC), kU1) == "delta{#c!}");
  CHECK(render_ltrace(LTrace::blocked({kSendCC}, kRecvC), kU1) ==
        "#c!#c . delta{#c?}");
  CHECK(render_ltrace(LTrace::faulted(), kU1) == "FAULT");
  CHECK(render_ltrace(LTrace::faulted({kSendCC, kSendCC}), kU1) ==
        "#c!#c . #c!#c . FAULT");
  CHECK(render_ltrace(LTrace::truncated({kSendCC}), kU1) == "#c!#c . ...");
  CHECK(render_ltrace(LTrace::unknown(), kU1) == "?");
}

TEST_CASE("normalization keeps minimal catastrophic points only") {
  SECTION("an immediate fault swallows everything") {
    CHECK(normalize({LTrace::faulted(), dead({kSendCC}),
                     LTrace::truncated({kSendCC})}) ==
          LTraceSet{LTrace::faulted()});
  }
  SECTION("a later fault swallows only its own extensions") {
    const LTraceSet out =
        normalize({LTrace::faulted({kSendCC}), dead({kSendCC, kRecvCC}),
                   dead({kRecvCC}), dead({kSendCC})});
    CHECK(out == LTraceSet{LTrace::faulted({kSendCC}), dead({kRecvCC})});
  }
  SECTION("deeper faults collapse into the shallowest one") {
    CHECK(normalize({LTrace::faulted({kSendCC}),
                     LTrace::faulted({kSendCC, kSendCC}), LTrace::faulted()}) ==
          LTraceSet{LTrace::faulted()});
  }
  SECTION("idempotent") {
    const LTraceSet s = {LTrace::faulted({kSendCC}), dead({kRecvCC})};
    CHECK(normalize(s) == s);
    CHECK(normalize(normalize(s)) == normalize(s));
  }
}

TEST_CASE("unit cutting keeps an allocation with its send") {
  CHECK(cut_units({kSendCC, kSendCC}, 1) == Trace{kSendCC});
  CHECK(cut_units({kAllocD, kSendCD}, 1).empty());
  CHECK(cut_units({kAllocD, kSendCD}, 2) == Trace{kAllocD, kSendCD});
  CHECK(cut_units({kSendCC, kAllocD, kSendCD}, 2) == Trace{kSendCC});
  CHECK(cut_units({kSendCC, kAllocD, kSendCD}, 3) ==
        Trace{kSendCC, kAllocD, kSendCD});
}

TEST_CASE("splicing complete runs truncates at unit boundaries") {
  SECTION("prepending within the budget") {
    CHECK(lsplice({kSendCC}, {dead()}, 2) == LTraceSet{dead({kSendCC})});
    CHECK(lsplice({}, {dead({kSendCC})}, 2) == LTraceSet{dead({kSendCC})});
  }
  SECTION("the empty continuation has no complete runs") {
    CHECK(lsplice({kSendCC}, {}, 2).empty());
  }
  SECTION("an overflowing continuation is cut and marked") {
    CHECK(lsplice({kSendCC}, {dead({kSendCC, kSendCC})}, 2) ==
          LTraceSet{LTrace::truncated({kSendCC, kSendCC})});
  }
  SECTION("an allocation never splits from its send") {
    CHECK(lsplice({kAllocD, kSendCD}, {dead()}, 1) ==
          LTraceSet{LTrace::truncated()});
    CHECK(lsplice({kAllocD, kSendCD}, {dead()}, 2) ==
          LTraceSet{dead({kAllocD, kSendCD})});
  }
  SECTION("terminal markers survive splicing") {
    CHECK(lsplice({kSendCC}, {LTrace::faulted()}, 3) ==
          LTraceSet{LTrace::faulted({kSendCC})});
    CHECK(lsplice({kSendCC}, {LTrace::unknown()}, 3) ==
          LTraceSet{LTrace::unknown({kSendCC})});
  }
}

TEST_CASE("single-action execution over all resources") {
  LivenessCtx ctx(kU1, 2);
  const LBehavior cont = ctx.ldenote(parse("0", kU1));

  SECTION("send: permitted, overstepping, impossible") {
    const LBehavior b = ctx.lprefix(kSendCC, cont);
    CHECK(b.at(res1({{0, Own::Pub}})) == LTraceSet{dead({kSendCC})});
    CHECK(b.at(Resource(1)) == LTraceSet{LTrace::faulted()});
    CHECK(b.at(res1({{0, Own::Pri}})).empty());
  }
  SECTION("a blocking action is terminal and publicly projected") {
    const LBehavior b =
        ctx.lprefix(Action::block(kSendC), LBehavior::empty(1));
    CHECK(b.at(res1({{0, Own::Pub}})) ==
          LTraceSet{LTrace::blocked({}, kSendC)});
    CHECK(b.at(res1({{0, Own::Pri}})) == LTraceSet{dead()});
    CHECK(b.at(Resource(1)) == LTraceSet{LTrace::faulted()});
  }
}

TEST_CASE("denotation distinguishes deadlock, refusal, and fault") {
  LivenessCtx ctx1(kU1, 2);

  SECTION("the inert process deadlocks cleanly everywhere") {
    const LBehavior b = ctx1.ldenote(parse("0", kU1));
    for (const auto& sigma : all_resources(1))
      CHECK(b.at(sigma) == LTraceSet{dead()});
  }
  SECTION("a receiver either blocks on its offer or consumes a message") {
    const LBehavior b = ctx1.ldenote(parse("#c?(x).0", kU1));
    CHECK(b.at(res1({{0, Own::Pub}})) ==
          LTraceSet{LTrace::blocked({}, kRecvC), dead({kRecvCC})});
    CHECK(b.at(Resource(1)) == LTraceSet{LTrace::faulted()});
    CHECK(b.at(res1({{0, Own::Pri}})) == LTraceSet{dead()});
  }
  SECTION("a private offer is projected away from the refusal") {
    LivenessCtx ctx2(kU2, 2);
    const LBehavior b = ctx2.ldenote(parse("#c!#c.0 + #d?(x).0", kU2));
    CHECK(b.at(res2({{0, Own::Pub}, {1, Own::Pri}})) ==
          LTraceSet{LTrace::blocked({}, kSendC), dead({kSendCC})});
  }
  SECTION("external and internal choice refuse differently") {
    LivenessCtx ctx2(kU2, 2);
    const Resource both = res2({{0, Own::Pub}, {1, Own::Pub}});
    const LBehavior ext = ctx2.ldenote(parse("#c!#c.0 + #d!#d.0", kU2));
    CHECK(ext.at(both) ==
          LTraceSet{LTrace::blocked(
                        {}, DirSet::of({{0, Polarity::SendDir},
                                        {1, Polarity::SendDir}})),
                    dead({kSendCC}), dead({kSendDD})});
    const LBehavior inte = ctx2.ldenote(parse("#c!#c.0 (+) #d!#d.0", kU2));
    CHECK(inte.at(both) ==
          LTraceSet{LTrace::blocked({}, kSendC),
                    LTrace::blocked({}, DirSet::of({{1, Polarity::SendDir}})),
                    dead({kSendCC}), dead({kSendDD})});
  }
  SECTION("a missing channel faults the whole run") {
    LivenessCtx ctx2(kU2, 2);
    const LBehavior b = ctx2.ldenote(parse("#c!#c.#d!#d.0", kU2));
    CHECK(b.at(res2({{0, Own::Pub}})) ==
          LTraceSet{LTrace::blocked({}, kSendC),
                    LTrace::faulted({kSendCC})});
  }
  SECTION("a fully private loop deadlocks silently") {
    const LBehavior b = ctx1.ldenote(parse("new x. x!x.0", kU1));
    for (const auto& sigma : all_resources(1))
      CHECK(b.at(sigma) == LTraceSet{dead()});
  }
  SECTION("an exhausted universe deadlocks the binder") {
    LivenessCtx ctx2(kU2, 2);
    const LBehavior b = ctx2.ldenote(parse("new x. #c!x.0", kU2));
    // Both constants taken: allocation is impossible, the binder is stuck.
    CHECK(b.at(res2({{0, Own::Pub}, {1, Own::Pub}})) == LTraceSet{dead()});
    // Room to allocate: the fresh channel is exported with its allocation,
    // or the process sits on its pending offer after the silent allocation.
    CHECK(b.at(res2({{0, Own::Pub}})) ==
          LTraceSet{LTrace::blocked({}, kSendC),
                    dead({kAllocD, kSendCD})});
  }
}

TEST_CASE("recursion is the greatest fixpoint") {
  LivenessCtx ctx(kU1, 2);

  SECTION("pure divergence is catastrophic") {
    const LBehavior b = ctx.ldenote(parse("rec X. X", kU1));
    CHECK(b == LBehavior::top(1));
  }
  SECTION("a productive loop runs to the bound and is cut") {
    const LBehavior b = ctx.ldenote(parse("rec X. #c!#c.X", kU1));
    CHECK(b.at(res1({{0, Own::Pub}})) ==
          LTraceSet{LTrace::blocked({}, kSendC),
                    LTrace::blocked({kSendCC}, kSendC),
                    LTrace::blocked({kSendCC, kSendCC}, kSendC),
                    LTrace::truncated({kSendCC, kSendCC})});
    CHECK(b.at(Resource(1)) == LTraceSet{LTrace::faulted()});
    CHECK(b.at(res1({{0, Own::Pri}})) == LTraceSet{dead()});
  }
  SECTION("an idle alternative collapses to divergence") {
    // One branch may always be chosen internally, and it diverges.
    const LBehavior b = ctx.ldenote(parse("rec X. X (+) #c!#c.0", kU1));
    CHECK(b == LBehavior::top(1));
  }
  SECTION("unwinding once does not change the denotation") {
    CHECK(ctx.ldenote(parse("rec X. #c!#c.X", kU1)) ==
          ctx.ldenote(parse("#c!#c.(rec X. #c!#c.X)", kU1)));
  }
}

TEST_CASE("parallel composition merges refusals and cancels duals") {
  LivenessCtx ctx(kU1, 2);
  const Resource cpub = res1({{0, Own::Pub}});

  SECTION("the public handshake, pinned in full") {
    const LBehavior b = ctx.ldenote(parse("#c!#c.0 | #c?(x).0", kU1));
    CHECK(b.at(cpub) ==
          LTraceSet{dead(), LTrace::blocked({kSendCC}, kRecvC),
                    LTrace::blocked({kRecvCC}, kSendC),
                    dead({kSendCC, kRecvCC}), dead({kRecvCC, kSendCC})});
  }
  SECTION("matched offers never refuse together") {
    // Every blocked run after no actions must be the silent handshake's
    // result, never a joint refusal of the two dual offers.
    const LBehavior b = ctx.ldenote(parse("#c!#c.0 | #c?(x).0", kU1));
    for (const auto& t : b.at(cpub))
      if (t.term == LTerm::Blocked && t.acts.empty()) CHECK(t.dirs.empty());
  }
  SECTION("compatible refusals merge") {
    LivenessCtx ctx2(kU2, 2);
    const LBehavior b = ctx2.ldenote(parse("#c!#c.0 | #d!#d.0", kU2));
    const Resource both = res2({{0, Own::Pub}, {1, Own::Pub}});
    const LTraceSet& ts = b.at(both);
    CHECK(ts.count(LTrace::blocked(
              {}, DirSet::of({{0, Polarity::SendDir},
                              {1, Polarity::SendDir}}))) == 1);
    CHECK(ts.count(dead({kSendCC, kSendDD})) == 1);
    CHECK(ts.count(dead({kSendDD, kSendCC})) == 1);
  }
  SECTION("a faulting component is catastrophic for the composition") {
    LivenessCtx ctx2(kU2, 2);
    const LBehavior b = ctx2.ldenote(parse("#c!#c.0 | #d!#d.0", kU2));
    CHECK(b.at(res2({{0, Own::Pub}})) == LTraceSet{LTrace::faulted()});
  }
  SECTION("a diverging component is catastrophic for the composition") {
    const LBehavior b = ctx.ldenote(parse("rec X. X | #c!#c.0", kU1));
    CHECK(b == LBehavior::top(1));
  }
  SECTION("a restricted handshake deadlocks cleanly") {
    const LBehavior b = ctx.ldenote(parse("new x. (x!x.0 | x?(y).0)", kU1));
    for (const auto& sigma : all_resources(1))
      CHECK(b.at(sigma) == LTraceSet{dead()});
  }
  SECTION("truncation in a component ends the composite run") {
    const LBehavior b =
        linterleave(LTrace::truncated(), LTrace::blocked({}, kSendC), kU1, 2);
    for (const auto& sigma : all_resources(1))
      CHECK(b.at(sigma) == LTraceSet{LTrace::truncated()});
  }
  SECTION("an unknown component ends the composite run") {
    const LBehavior b =
        linterleave(LTrace::unknown(), dead(), kU1, 2);
    for (const auto& sigma : all_resources(1))
      CHECK(b.at(sigma) == LTraceSet{LTrace::unknown()});
  }
}

TEST_CASE("the observer explores silent closures") {
  const Resource cpub = res1({{0, Own::Pub}});

  SECTION("a silent cycle is divergence") {
    for (const auto& sigma : all_resources(1))
      CHECK(lobserve(parse("rec X. X", kU1), sigma, kU1, 2) ==
            LTraceSet{LTrace::faulted()});
  }
  SECTION("a closure larger than the state budget is undecided") {
    CHECK(lobserve(parse("rec X. (X | 0)", kU1), Resource(1), kU1, 2, 40) ==
          LTraceSet{LTrace::unknown()});
    CHECK(lobserve(parse("#c!#c.0 | #c?(x).0", kU1), cpub, kU1, 2, 1) ==
          LTraceSet{LTrace::unknown()});
  }
  SECTION("observation matches the denotation on the pinned examples") {
    LivenessCtx ctx(kU1, 2);
    for (const char* src :
         {"0", "#c?(x).0", "#c!#c.0 | #c?(x).0", "new x. x!x.0",
          "rec X. #c!#c.X", "new x. (x!x.0 | x?(y).0)",
          "#c!#c.0 + #c?(x).0"}) {
      INFO("process: " << src);
      const ProcPtr p = parse(src, kU1);
      const LBehavior den = ctx.ldenote(p);
      for (const auto& sigma : all_resources(1)) {
        INFO("resource: " << render_resource(sigma, kU1));
        CHECK(ctx.lobserve(p, sigma, 2) == den.at(sigma));
      }
    }
  }
}

TEST_CASE("the refinement order on complete runs") {
  const std::vector<LTrace> pool = {
      dead(),
      dead({kSendCC}),
      LTrace::blocked({}, kSendC),
      LTrace::blocked({}, kBothC),
      LTrace::blocked({kSendCC}, kRecvC),
      LTrace::faulted(),
      LTrace::faulted({kSendCC}),
      LTrace::truncated({kSendCC}),
      LTrace::unknown(),
  };

  SECTION("reflexive") {
    for (const auto& t : pool) CHECK(trace_refines(t, t));
  }
  SECTION("transitive on the sample pool") {
    for (const auto& a : pool)
      for (const auto& b : pool)
        for (const auto& c : pool)
          if (trace_refines(a, b) && trace_refines(b, c))
            CHECK(trace_refines(a, c));
  }
  SECTION("a catastrophic point licenses any extension") {
    CHECK(trace_refines(dead({kSendCC}), LTrace::faulted()));
    CHECK(trace_refines(LTrace::faulted({kSendCC, kSendCC}),
                        LTrace::faulted({kSendCC})));
    CHECK(trace_refines(LTrace::truncated({kSendCC}), LTrace::faulted()));
    CHECK_FALSE(trace_refines(dead(), LTrace::faulted({kSendCC})));
  }
  SECTION("offering more directions refines offering fewer") {
    CHECK(trace_refines(LTrace::blocked({}, kBothC),
                        LTrace::blocked({}, kSendC)));
    CHECK_FALSE(trace_refines(LTrace::blocked({}, kSendC),
                              LTrace::blocked({}, kBothC)));
    CHECK_FALSE(trace_refines(dead(), LTrace::blocked({}, kSendC)));
  }
  SECTION("markers compare only to themselves or a catastrophe") {
    CHECK_FALSE(trace_refines(LTrace::truncated({kSendCC}),
                              LTrace::truncated()));
    CHECK_FALSE(trace_refines(LTrace::truncated({kSendCC}),
                              dead({kSendCC})));
  }
  SECTION("set refinement is universal-existential") {
    CHECK(set_refines({dead({kSendCC}), LTrace::blocked({}, kBothC)},
                      {LTrace::faulted({kSendCC}),
                       LTrace::blocked({}, kSendC)}));
    CHECK_FALSE(set_refines({dead()}, {LTrace::blocked({}, kSendC)}));
    CHECK(set_refines({dead()}, {LTrace::faulted()}));
    CHECK(set_refines({}, {dead()}));
  }
  SECTION("everything refines the catastrophic set") {
    for (const auto& t : pool)
      if (t.term != LTerm::Unknown)
        CHECK(set_refines({t}, {LTrace::faulted()}));
  }
  SECTION("undecided sets refuse to answer") {
    CHECK_THROWS_AS(set_refines({LTrace::unknown()}, {LTrace::faulted()}),
                    SemanticError);
    CHECK_THROWS_AS(set_refines({dead()}, {LTrace::unknown()}),
                    SemanticError);
  }
}

TEST_CASE("the two liveness layers agree across an enumeration") {
  LivenessCtx ctx(kU1, 2);
  int checked = 0, skipped = 0;
  for (const auto& p : enum_processes(kU1, 2, 2)) {
    const LBehavior den = ctx.ldenote(p);
    for (const auto& sigma : all_resources(1)) {
      const LTraceSet obs = ctx.lobserve(p, sigma, 2);
      if (has_unknown(obs) || has_unknown(den.at(sigma))) {
        ++skipped;
        continue;
      }
      INFO("process: " << print(p, kU1) << " at "
                       << render_resource(sigma, kU1));
      CHECK(obs == den.at(sigma));
      ++checked;
    }
  }
  CHECK(checked > 100);
  CHECK(skipped < checked / 10);
}
