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

#ifndef PIRHO_RESOURCES_HPP_
#define PIRHO_RESOURCES_HPP_

// Channels, ownership maps, actions, and the resource-sensitive action
// transformers.  A resource assigns each live channel one of two ownership
// modes: "pub" (shared with the environment) or "pri" (held exclusively).
// Executing an action against a resource yields one of three verdicts:
//
//   Ok(next)       the action is permitted and produces an updated resource;
//   Impermissible  the action oversteps what the process owns (a fault the
//                  environment can observe);
//   Impossible     the action can never happen under this resource (the step
//                  is silently excluded, not blamed).
//
// Everything here is a small immutable value; all functions are pure.

#include <algorithm>
#include <cassert>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pirho {

/// Index of a channel constant within a Universe.
using Chan = int;

enum class Own : std::uint8_t { Pub = 1, Pri = 2 };

/// Error for malformed textual input (process terms, resource literals,
/// assertion formulas).  Carries a 1-based location when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, int line = 0, int col = 0)
      : std::runtime_error(std::move(msg)), line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

/// Error for violated semantic preconditions (open process where a closed one
/// is required, unbound variables, comparisons on incomplete data).
class SemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    return false;
  for (char ch : s) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
          ch == '\''))
      return false;
  }
  return true;
}
}  // namespace detail

/// The finite set of channel constants every computation ranges over.
/// Names are kept sorted, so channel indices enumerate constants in
/// lexicographic order and all rendered output is canonically ordered.
class Universe {
 public:
  Universe() = default;

  explicit Universe(std::vector<std::string> names) {
    for (const auto& n : names) {
      if (!detail::valid_name(n))
        throw ParseError("invalid channel constant name: '" + n + "'");
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    names_ = std::move(names);
  }

  /// Parses a comma-separated list of '#name' constants, e.g. "#c,#d".
  static Universe parse_csv(const std::string& csv) {
    std::vector<std::string> names;
    std::size_t i = 0;
    auto skip_ws = [&] {
      while (i < csv.size() && std::isspace(static_cast<unsigned char>(csv[i])))
        ++i;
    };
    skip_ws();
    while (i < csv.size()) {
      if (csv[i] != '#')
        throw ParseError("universe entries must start with '#'", 1,
                         static_cast<int>(i + 1));
      ++i;
      std::string name;
      while (i < csv.size() &&
             (std::isalnum(static_cast<unsigned char>(csv[i])) ||
              csv[i] == '_' || csv[i] == '\'')) {
        name.push_back(csv[i]);
        ++i;
      }
      if (!detail::valid_name(name))
        throw ParseError("invalid channel constant name after '#'", 1,
                         static_cast<int>(i + 1));
      names.push_back(name);
      skip_ws();
      if (i < csv.size()) {
        if (csv[i] != ',')
          throw ParseError("expected ',' between universe entries", 1,
                           static_cast<int>(i + 1));
        ++i;
        skip_ws();
      }
    }
    if (names.empty()) throw ParseError("universe must not be empty");
    return Universe(std::move(names));
  }

  int size() const { return static_cast<int>(names_.size()); }

  /// Returns -1 when the name is not a constant of this universe.
  Chan index_of(const std::string& name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) return -1;
    return static_cast<Chan>(it - names_.begin());
  }

  const std::string& name(Chan c) const {
    assert(c >= 0 && c < size());
    return names_[static_cast<std::size_t>(c)];
  }

  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const Universe&) const = default;

 private:
  std::vector<std::string> names_;
};

/// Number of distinct resources over n channels (each channel is absent,
/// pub, or pri).
inline std::size_t resource_count(int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) r *= 3;
  return r;
}

/// A partial map from channels to ownership, fixed to a universe width.
/// Encodable as a base-3 index, which keeps behavior tables dense.
class Resource {
 public:
  Resource() = default;
  explicit Resource(int width)
      : slot_(static_cast<std::size_t>(width), std::uint8_t{0}) {}

  static Resource from_index(std::size_t idx, int width) {
    Resource r(width);
    for (int c = 0; c < width; ++c) {
      r.slot_[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(idx % 3);
      idx /= 3;
    }
    return r;
  }

  std::size_t index() const {
    std::size_t idx = 0;
    for (std::size_t c = slot_.size(); c-- > 0;) idx = idx * 3 + slot_[c];
    return idx;
  }

  int width() const { return static_cast<int>(slot_.size()); }

  bool contains(Chan c) const {
    return c >= 0 && c < width() && slot_[static_cast<std::size_t>(c)] != 0;
  }
  bool is_pub(Chan c) const {
    return contains(c) && slot_[static_cast<std::size_t>(c)] == 1;
  }
  bool is_pri(Chan c) const {
    return contains(c) && slot_[static_cast<std::size_t>(c)] == 2;
  }
  std::optional<Own> own(Chan c) const {
    if (!contains(c)) return std::nullopt;
    return slot_[static_cast<std::size_t>(c)] == 1 ? Own::Pub : Own::Pri;
  }

  Resource with(Chan c, Own o) const {
    assert(c >= 0 && c < width());
    Resource r = *this;
    r.slot_[static_cast<std::size_t>(c)] =
        (o == Own::Pub) ? std::uint8_t{1} : std::uint8_t{2};
    return r;
  }

  Resource without(Chan c) const {
    assert(c >= 0 && c < width());
    Resource r = *this;
    r.slot_[static_cast<std::size_t>(c)] = 0;
    return r;
  }

  std::vector<Chan> domain() const {
    std::vector<Chan> d;
    for (Chan c = 0; c < width(); ++c)
      if (contains(c)) d.push_back(c);
    return d;
  }

  bool domain_full() const {
    for (Chan c = 0; c < width(); ++c)
      if (!contains(c)) return false;
    return true;
  }

  auto operator<=>(const Resource&) const = default;

 private:
  std::vector<std::uint8_t> slot_;
};

inline std::vector<Resource> all_resources(int width) {
  std::vector<Resource> out;
  const std::size_t n = resource_count(width);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(Resource::from_index(i, width));
  return out;
}

/// Forgets privacy: every pri entry becomes pub, the domain is unchanged.
inline Resource public_lift(const Resource& sigma) {
  Resource r = sigma;
  for (Chan c = 0; c < sigma.width(); ++c)
    if (sigma.is_pri(c)) r = r.with(c, Own::Pub);
  return r;
}

enum class Polarity : std::uint8_t { SendDir = 0, RecvDir = 1 };

/// A finite set of communication directions "c!" / "c?", used both for
/// blocking actions and for blocked-state reports.
class DirSet {
 public:
  DirSet() = default;

  static DirSet of(std::initializer_list<std::pair<Chan, Polarity>> items) {
    DirSet d;
    for (const auto& [c, p] : items) d.add(c, p);
    return d;
  }

  DirSet& add(Chan c, Polarity p) {
    bits_ |= bit(c, p);
    return *this;
  }

  bool contains(Chan c, Polarity p) const { return (bits_ & bit(c, p)) != 0; }
  bool empty() const { return bits_ == 0; }

  int count() const {
    int n = 0;
    for (std::uint32_t b = bits_; b; b &= b - 1) ++n;
    return n;
  }

  /// Swaps send and receive on every channel (the environment's view of the
  /// same offers).
  DirSet reversed() const {
    DirSet d;
    std::uint32_t even = bits_ & 0x55555555u;  // send bits
    std::uint32_t odd = bits_ & 0xAAAAAAAAu;   // recv bits
    d.bits_ = (even << 1) | (odd >> 1);
    return d;
  }

  bool intersects(const DirSet& o) const { return (bits_ & o.bits_) != 0; }
  bool subset_of(const DirSet& o) const { return (bits_ & ~o.bits_) == 0; }

  DirSet union_with(const DirSet& o) const {
    DirSet d;
    d.bits_ = bits_ | o.bits_;
    return d;
  }

  /// Keeps only directions whose channel the resource holds publicly.
  DirSet restrict_pub(const Resource& sigma) const {
    DirSet d;
    for (const auto& [c, p] : items())
      if (sigma.is_pub(c)) d.add(c, p);
    return d;
  }

  /// Directions in ascending (channel, send-before-recv) order, which is
  /// lexicographic order of the rendered forms over a sorted universe.
  std::vector<std::pair<Chan, Polarity>> items() const {
    std::vector<std::pair<Chan, Polarity>> out;
    for (int i = 0; i < 32; ++i) {
      if (bits_ & (std::uint32_t{1} << i))
        out.emplace_back(static_cast<Chan>(i / 2),
                         (i % 2 == 0) ? Polarity::SendDir : Polarity::RecvDir);
    }
    return out;
  }

  std::vector<Chan> channels() const {
    std::vector<Chan> out;
    for (const auto& [c, p] : items())
      if (out.empty() || out.back() != c) out.push_back(c);
    return out;
  }

  auto operator<=>(const DirSet&) const = default;

 private:
  static std::uint32_t bit(Chan c, Polarity p) {
    assert(c >= 0 && c < 16);
    return std::uint32_t{1} << (2 * c + (p == Polarity::RecvDir ? 1 : 0));
  }

  std::uint32_t bits_ = 0;
};

enum class ActKind : std::uint8_t { Send, Recv, Alloc, Tau, Fault, Block };

/// One step label: send c!d, receive c?d, allocation nu c, internal tau,
/// fault, or a blocking marker delta over a direction set.
struct Action {
  ActKind kind = ActKind::Tau;
  Chan a = -1;  ///< subject channel (Send/Recv) or allocated channel (Alloc)
  Chan b = -1;  ///< object channel (Send/Recv)
  DirSet dirs;  ///< Block only

  static Action send(Chan c, Chan d) { return {ActKind::Send, c, d, {}}; }
  static Action recv(Chan c, Chan d) { return {ActKind::Recv, c, d, {}}; }
  static Action alloc(Chan c) { return {ActKind::Alloc, c, -1, {}}; }
  static Action tau() { return {ActKind::Tau, -1, -1, {}}; }
  static Action fault() { return {ActKind::Fault, -1, -1, {}}; }
  static Action block(DirSet d) { return {ActKind::Block, -1, -1, d}; }

  bool is_comm() const {
    return kind == ActKind::Send || kind == ActKind::Recv;
  }

  auto operator<=>(const Action&) const = default;
};

/// The dual of a communication action (send <-> receive on the same channels).
/// Undefined for every other action kind.
inline std::optional<Action> dual(const Action& a) {
  switch (a.kind) {
    case ActKind::Send:
      return Action::recv(a.a, a.b);
    case ActKind::Recv:
      return Action::send(a.a, a.b);
    default:
      return std::nullopt;
  }
}

/// Result of running an action against a resource.
struct Verdict {
  enum Kind : std::uint8_t { Ok, Impermissible, Impossible };

  Kind kind = Impossible;
  Resource next;  ///< meaningful only when kind == Ok

  static Verdict ok(Resource r) { return {Ok, std::move(r)}; }
  static Verdict top(int width) { return {Impermissible, Resource(width)}; }
  static Verdict bot(int width) { return {Impossible, Resource(width)}; }

  bool is_ok() const { return kind == Ok; }
  bool is_top() const { return kind == Impermissible; }
  bool is_bot() const { return kind == Impossible; }

  bool operator==(const Verdict&) const = default;
};

/// The resource-sensitive action transformer.
///
///  - send c!d: faults unless both channels are live; requires a public
///    subject; publicizes the object (a private object is being revealed).
///  - recv c?d: faults unless the subject is live; requires a public subject
///    and an object not already held privately (a private object cannot
///    arrive from outside); the object becomes public.
///  - nu c: allocates a fresh private channel; impossible if c is live.
///  - tau: always permitted, resource unchanged.
///  - fault: always impermissible.
///  - delta D: faults if some channel mentioned in D is not live; otherwise
///    permitted with the resource unchanged.
inline Verdict apply_action(const Action& act, const Resource& sigma) {
  const int w = sigma.width();
  switch (act.kind) {
    case ActKind::Send: {
      if (!sigma.contains(act.a) || !sigma.contains(act.b))
        return Verdict::top(w);
      if (sigma.is_pub(act.a)) return Verdict::ok(sigma.with(act.b, Own::Pub));
      return Verdict::bot(w);
    }
    case ActKind::Recv: {
      if (!sigma.contains(act.a)) return Verdict::top(w);
      if (sigma.is_pub(act.a) && !sigma.is_pri(act.b))
        return Verdict::ok(sigma.with(act.b, Own::Pub));
      return Verdict::bot(w);
    }
    case ActKind::Alloc: {
      if (sigma.contains(act.a)) return Verdict::bot(w);
      return Verdict::ok(sigma.with(act.a, Own::Pri));
    }
    case ActKind::Tau:
      return Verdict::ok(sigma);
    case ActKind::Fault:
      return Verdict::top(w);
    case ActKind::Block: {
      for (Chan c : act.dirs.channels())
        if (!sigma.contains(c)) return Verdict::top(w);
      return Verdict::ok(sigma);
    }
  }
  return Verdict::bot(w);
}

/// What the environment sees of an action under a resource.  Internal steps
/// (tau and allocation) are invisible; a send of a privately-held channel is
/// seen as the deferred allocation followed by the send ("nu d . c!d");
/// blocking markers are projected onto publicly-shared channels.
inline std::vector<Action> observe_action(const Action& act,
                                          const Resource& sigma) {
  switch (act.kind) {
    case ActKind::Tau:
    case ActKind::Alloc:
      return {};
    case ActKind::Fault:
      return {Action::fault()};
    case ActKind::Recv:
      return {act};
    case ActKind::Send:
      if (sigma.is_pri(act.b)) return {Action::alloc(act.b), act};
      return {act};
    case ActKind::Block:
      return {Action::block(act.dirs.restrict_pub(sigma))};
  }
  return {};
}

/// Whether sigma is one of the possible combinations of the two sub-views:
/// the domains union, and a privately-held channel on either side must be
/// private in the whole and unknown to the other side.  Publicly-held
/// channels are unconstrained, so this is a relation, not a function.
inline bool check_separation(const Resource& sigma, const Resource& s1,
                             const Resource& s2) {
  if (sigma.width() != s1.width() || sigma.width() != s2.width()) return false;
  for (Chan c = 0; c < sigma.width(); ++c) {
    if (sigma.contains(c) != (s1.contains(c) || s2.contains(c))) return false;
    if (s1.is_pri(c) && !(sigma.is_pri(c) && !s2.contains(c))) return false;
    if (s2.is_pri(c) && !(sigma.is_pri(c) && !s1.contains(c))) return false;
  }
  return true;
}

/// The four-resource invariant tying an interleaving to its sub-views:
/// s_op separates into s1 and s2, and s_den is s_op minus every channel
/// held privately by either sub-view (their pending hidden allocations).
inline bool check_invariant_rel(const Resource& s_op, const Resource& s_den,
                                const Resource& s1, const Resource& s2) {
  if (!check_separation(s_op, s1, s2)) return false;
  Resource expect = s_op;
  for (Chan c = 0; c < s_op.width(); ++c)
    if (s1.is_pri(c) || s2.is_pri(c)) expect = expect.without(c);
  return s_den == expect;
}

/// All pairs (s1, s2) such that sigma separates into s1 and s2, by brute
/// force over every ownership assignment.
inline std::set<std::pair<Resource, Resource>> enumerate_separations(
    const Resource& sigma) {
  std::set<std::pair<Resource, Resource>> out;
  const int w = sigma.width();
  const std::size_t n = resource_count(w);
  for (std::size_t i = 0; i < n; ++i) {
    Resource s1 = Resource::from_index(i, w);
    for (std::size_t j = 0; j < n; ++j) {
      Resource s2 = Resource::from_index(j, w);
      if (check_separation(sigma, s1, s2)) out.emplace(s1, s2);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering and literal parsing.

inline std::string render_dirset(const DirSet& d, const Universe& u) {
  std::string out = "{";
  bool first = true;
  for (const auto& [c, p] : d.items()) {
    if (!first) out += ", ";
    first = false;
    out += "#" + u.name(c) + (p == Polarity::SendDir ? "!" : "?");
  }
  out += "}";
  return out;
}

inline std::string render_action(const Action& a, const Universe& u) {
  switch (a.kind) {
    case ActKind::Send:
      return "#" + u.name(a.a) + "!#" + u.name(a.b);
    case ActKind::Recv:
      return "#" + u.name(a.a) + "?#" + u.name(a.b);
    case ActKind::Alloc:
      return "nu #" + u.name(a.a);
    case ActKind::Tau:
      return "tau";
    case ActKind::Fault:
      return "FAULT";
    case ActKind::Block:
      return "delta" + render_dirset(a.dirs, u);
  }
  return "?";
}

inline std::string render_resource(const Resource& sigma, const Universe& u) {
  std::string out = "{";
  bool first = true;
  for (Chan c = 0; c < sigma.width(); ++c) {
    if (!sigma.contains(c)) continue;
    if (!first) out += ", ";
    first = false;
    out += "#" + u.name(c) + ": " + (sigma.is_pub(c) ? "pub" : "pri");
  }
  out += "}";
  return out;
}

/// Parses a resource literal such as "{}" or "{#c: pub, #d: pri}".
inline Resource parse_resource(const std::string& text, const Universe& u) {
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
  };
  auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError(msg, 1, static_cast<int>(i + 1));
  };
  skip_ws();
  if (i >= text.size() || text[i] != '{') throw fail("expected '{'");
  ++i;
  Resource sigma(u.size());
  skip_ws();
  if (i < text.size() && text[i] == '}') {
    ++i;
  } else {
    while (true) {
      skip_ws();
      if (i >= text.size() || text[i] != '#')
        throw fail("expected '#' before channel name");
      ++i;
      std::string name;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) ||
              text[i] == '_' || text[i] == '\'')) {
        name.push_back(text[i]);
        ++i;
      }
      Chan c = u.index_of(name);
      if (c < 0) throw fail("unknown channel constant '#" + name + "'");
      skip_ws();
      if (i >= text.size() || text[i] != ':') throw fail("expected ':'");
      ++i;
      skip_ws();
      Own o;
      if (text.compare(i, 3, "pub") == 0) {
        o = Own::Pub;
        i += 3;
      } else if (text.compare(i, 3, "pri") == 0) {
        o = Own::Pri;
        i += 3;
      } else {
        throw fail("expected 'pub' or 'pri'");
      }
      if (sigma.contains(c))
        throw fail("duplicate entry for '#" + name + "'");
      sigma = sigma.with(c, o);
      skip_ws();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == '}') {
        ++i;
        break;
      }
      throw fail("expected ',' or '}'");
    }
  }
  skip_ws();
  if (i != text.size()) throw fail("trailing input after resource literal");
  return sigma;
}

}  // namespace pirho

#endif  // PIRHO_RESOURCES_HPP_
