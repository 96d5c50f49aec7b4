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

#include <catch2/catch_amalgamated.hpp>

#include "pirho/generate.hpp"
#include "pirho/opsem.hpp"

using namespace pirho;

namespace {
const Universe kU = Universe::parse_csv("#c,#d");

Resource res(std::initializer_list<std::pair<Chan, Own>> owns) {
  Resource out(kU.size());
  for (const auto& [c, o] : owns) out = out.with(c, o);
  return out;
}

bool has_step(const std::vector<GenStep>& steps, const Action& a,
              const std::string& next) {
  for (const auto& s : steps)
    if (s.act == a && print(s.next, kU) == next) return true;
  return false;
}
}  // namespace

TEST_CASE("generated steps of prefixes") {
  SECTION("a send offers exactly its action") {
    const auto steps = gen_steps(parse("#c!#d.0", kU), kU);
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].act == Action::send(0, 1));
    CHECK(print(steps[0].next, kU) == "0");
  }
  SECTION("a receive branches over every constant, substituting") {
    const auto steps = gen_steps(parse("#c?(x).x!x.0", kU), kU);
    REQUIRE(steps.size() == 2);
    CHECK(has_step(steps, Action::recv(0, 0), "#c!#c.0"));
    CHECK(has_step(steps, Action::recv(0, 1), "#d!#d.0"));
  }
  SECTION("a sum merges its branches' steps") {
    const auto steps = gen_steps(parse("#c!#c.0 + #c?(x).0", kU), kU);
    REQUIRE(steps.size() == 3);
    CHECK(has_step(steps, Action::send(0, 0), "0"));
    CHECK(has_step(steps, Action::recv(0, 0), "0"));
    CHECK(has_step(steps, Action::recv(0, 1), "0"));
  }
}

TEST_CASE("internal choice takes silent steps to either side") {
  const auto steps = gen_steps(parse("#c!#c.0 (+) 0", kU), kU);
  REQUIRE(steps.size() == 2);
  CHECK(has_step(steps, Action::tau(), "#c!#c.0"));
  CHECK(has_step(steps, Action::tau(), "0"));
}

TEST_CASE("restriction allocates any constant") {
  const auto steps = gen_steps(parse("new x. x!x.0", kU), kU);
  REQUIRE(steps.size() == 2);
  CHECK(has_step(steps, Action::alloc(0), "#c!#c.0"));
  CHECK(has_step(steps, Action::alloc(1), "#d!#d.0"));
}

TEST_CASE("recursion unfolds by one silent step") {
  const auto steps = gen_steps(parse("rec X. #c!#c.X", kU), kU);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].act == Action::tau());
  CHECK(print(steps[0].next, kU) == "#c!#c.(rec X. #c!#c.X)");
  // Unguarded loops still step (and simply never get anywhere).
  const auto loop = gen_steps(parse("rec X. X", kU), kU);
  REQUIRE(loop.size() == 1);
  CHECK(print(loop[0].next, kU) == "rec X. X");
}

TEST_CASE("parallel composition interleaves and communicates") {
  const auto steps = gen_steps(parse("#c!#d.0 | #c?(x).x!x.0", kU), kU);
  CHECK(has_step(steps, Action::send(0, 1), "0 | #c?(x).x!x.0"));
  CHECK(has_step(steps, Action::recv(0, 0), "#c!#d.0 | #c!#c.0"));
  CHECK(has_step(steps, Action::recv(0, 1), "#c!#d.0 | #d!#d.0"));
  CHECK(has_step(steps, Action::tau(), "0 | #d!#d.0"));  // the handshake
  CHECK(steps.size() == 4);
}

TEST_CASE("duplicate derivations are reported once") {
  const auto steps = gen_steps(parse("#c!#c.0 + #c!#c.0", kU), kU);
  REQUIRE(steps.size() == 1);
  const auto both = gen_steps(parse("0 (+) 0", kU), kU);
  REQUIRE(both.size() == 1);  // both sides lead to the same configuration
}

TEST_CASE("free process variables cannot step") {
  CHECK_THROWS_AS(gen_steps(parse("X", kU), kU), SemanticError);
}

TEST_CASE("resource filtering of steps") {
  SECTION("a private subject cannot be exercised") {
    CHECK(res_steps(parse("#c!#c.0", kU), res({{0, Own::Pri}}), kU).empty());
  }
  SECTION("overstepping becomes a fault step") {
    const auto steps = res_steps(parse("#c!#c.0", kU), Resource(2), kU);
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].act == Action::fault());
    CHECK(print(steps[0].next, kU) == "0");
    CHECK(steps[0].sigma == Resource(2));
  }
  SECTION("permitted steps carry the updated resource") {
    const auto steps =
        res_steps(parse("#c!#d.0", kU), res({{0, Own::Pub}, {1, Own::Pri}}),
                  kU);
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].act == Action::send(0, 1));
    CHECK(steps[0].sigma == res({{0, Own::Pub}, {1, Own::Pub}}));
  }
  SECTION("receive keeps only permitted payloads") {
    // With #d private, learning #d is impossible; only #c flows.
    const auto steps = res_steps(parse("#c?(x).0", kU),
                                 res({{0, Own::Pub}, {1, Own::Pri}}), kU);
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].act == Action::recv(0, 0));
  }
  SECTION("allocation picks only fresh constants") {
    const auto steps =
        res_steps(parse("new x. x!x.0", kU), res({{0, Own::Pub}}), kU);
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].act == Action::alloc(1));
    CHECK(steps[0].sigma == res({{0, Own::Pub}, {1, Own::Pri}}));
  }
}

TEST_CASE("allocation freshness across small terms") {
  for (const auto& p : enum_processes(Universe::parse_csv("#c"), 2, 1))
    for (const auto& sigma : all_resources(1))
      for (const auto& s : res_steps(p, sigma, Universe::parse_csv("#c")))
        if (s.act.kind == ActKind::Alloc) {
          CHECK_FALSE(sigma.contains(s.act.a));
          CHECK(s.sigma.is_pri(s.act.a));
        }
}

TEST_CASE("top-level direction summary") {
  CHECK(top_prefix_dirs(parse("#c!#c.0 + #d?(x).0", kU)) ==
        DirSet::of({{0, Polarity::SendDir}, {1, Polarity::RecvDir}}));
  CHECK(top_prefix_dirs(parse("#c!#c.0 | #c?(x).0", kU)) ==
        DirSet::of({{0, Polarity::SendDir}, {0, Polarity::RecvDir}}));
  CHECK(top_prefix_dirs(parse("new x. x!x.0", kU)).empty());
  CHECK(top_prefix_dirs(parse("0", kU)).empty());
}

TEST_CASE("blocked summary exists only when every step is communication") {
  const Resource cd = res({{0, Own::Pub}, {1, Own::Pub}});
  SECTION("pure communication offers") {
    const auto bs = blocked_set(parse("#c!#c.0 + #d?(x).0", kU), cd, kU);
    REQUIRE(bs.has_value());
    CHECK(*bs == DirSet::of({{0, Polarity::SendDir},
                             {1, Polarity::RecvDir}}));
  }
  SECTION("inert processes are blocked on nothing") {
    const auto bs = blocked_set(parse("0", kU), cd, kU);
    REQUIRE(bs.has_value());
    CHECK(bs->empty());
  }
  SECTION("silent work disqualifies") {
    CHECK_FALSE(blocked_set(parse("0 (+) 0", kU), cd, kU).has_value());
    // With a spare channel the restriction can still allocate.
    CHECK_FALSE(blocked_set(parse("new x. x!x.0", kU), res({{0, Own::Pub}}),
                            kU)
                    .has_value());
    // Once the universe is exhausted it is stuck with no offers at all.
    {
      const auto bs = blocked_set(parse("new x. x!x.0", kU), cd, kU);
      REQUIRE(bs.has_value());
      CHECK(bs->empty());
    }
    CHECK_FALSE(blocked_set(parse("rec X. #c!#c.X", kU), cd, kU).has_value());
    // A fault step also disqualifies.
    CHECK_FALSE(blocked_set(parse("#c!#c.0", kU), Resource(2), kU)
                    .has_value());
  }
  SECTION("dangling subjects are dropped from the summary") {
    const auto bs =
        blocked_set(parse("#c!#c.0 + #d?(x).0", kU), res({{1, Own::Pub}}),
                    kU);
    // The #c branch faults at this resource, so no summary at all.
    CHECK_FALSE(bs.has_value());
  }
  SECTION("whenever present, every step is a communication") {
    const Universe u1 = Universe::parse_csv("#c");
    for (const auto& p : enum_processes(u1, 2, 2))
      for (const auto& sigma : all_resources(1)) {
        const auto bs = blocked_set(p, sigma, u1);
        if (!bs.has_value()) continue;
        for (const auto& s : res_steps(p, sigma, u1))
          CHECK(s.act.is_comm());
      }
  }
}

TEST_CASE("reachable configurations are bounded and deduplicated") {
  const ReachReport r =
      reachable_configs(parse("rec X. #c!#c.X", kU), res({{0, Own::Pub}}),
                        kU, 3);
  CHECK_FALSE(r.truncated);
  // Unfold and emit alternate; three steps reach both shapes once each.
  CHECK(r.configs.size() == 2);
  const ReachReport deep = reachable_configs(
      parse("rec X. #c!#c.(X | X)", kU), res({{0, Own::Pub}}), kU, 50, 40);
  CHECK(deep.truncated);  // the state space genuinely grows unboundedly
}
