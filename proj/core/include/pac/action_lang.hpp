// Copyright 2026 The PAC Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Front end for domain descriptions written as causal laws.
//
// A domain file declares finite-domain fluents and actions, followed by
// static laws ("head if body") and dynamic laws ("a causes effect if
// conditions"). Laws may be schematic over integer parameters bound by a
// trailing `where V in lo..hi` clause; value expressions are limited to a
// constant, a parameter `V`, or `V+c` / `V-c`.
//
//   fluent loc : 1..3 .
//   action moveleft .
//   action moveright .
//   moveleft causes loc = L-1 if loc = L where L in 1..3 .
//   moveright causes loc = L+1 if loc = L where L in 1..3 .
//
// A query file names the initial and goal conditions:
//
//   init loc = 1 .
//   goal loc = 3 .

#ifndef PAC_ACTION_LANG_HPP_
#define PAC_ACTION_LANG_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pac {

struct SourceLoc {
  int line = 1;
  int column = 1;

  bool operator==(const SourceLoc&) const = default;
};

// A domain value: an integer or a lowercase symbol.
using Value = std::variant<std::int64_t, std::string>;

std::string to_string(const Value& v);

struct FluentDecl {
  std::string name;
  std::vector<Value> domain;
  SourceLoc loc;

  bool operator==(const FluentDecl&) const = default;
};

struct ActionDecl {
  std::string name;
  SourceLoc loc;

  bool operator==(const ActionDecl&) const = default;
};

// `c`, `V`, `V+c` or `V-c`.
struct ValueExpr {
  std::optional<Value> constant;  // set iff this is a constant
  std::string variable;
  std::int64_t offset = 0;

  static ValueExpr of(Value v) { return ValueExpr{std::move(v), {}, 0}; }
  static ValueExpr var(std::string name, std::int64_t offset = 0) {
    return ValueExpr{std::nullopt, std::move(name), offset};
  }
  bool is_constant() const { return constant.has_value(); }

  bool operator==(const ValueExpr&) const = default;
};

std::string to_string(const ValueExpr& e);

struct Atom {
  std::string fluent;
  ValueExpr value;
  SourceLoc loc;

  bool operator==(const Atom&) const = default;
};

struct ParamRange {
  std::string variable;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  SourceLoc loc;

  bool operator==(const ParamRange&) const = default;
};

struct StaticLaw {
  Atom head;
  std::vector<Atom> body;
  std::vector<ParamRange> params;
  SourceLoc loc;

  bool operator==(const StaticLaw&) const = default;
};

struct DynamicLaw {
  std::string action;
  Atom effect;
  std::vector<Atom> conditions;
  std::vector<ParamRange> params;
  SourceLoc loc;

  bool operator==(const DynamicLaw&) const = default;
};

struct ActionDescription {
  std::vector<FluentDecl> fluents;
  std::vector<ActionDecl> actions;
  std::vector<StaticLaw> statics;
  std::vector<DynamicLaw> dynamics;

  const FluentDecl* find_fluent(std::string_view name) const;
  std::optional<std::size_t> fluent_index(std::string_view name) const;
  std::optional<std::size_t> action_index(std::string_view name) const;

  bool operator==(const ActionDescription&) const = default;
};

struct Query {
  std::vector<Atom> initial;
  std::vector<Atom> goal;

  bool operator==(const Query&) const = default;
};

struct Diagnostic {
  SourceLoc loc;
  std::string code;
  std::string message;

  std::string to_string() const;
};

// Thrown by the parsers. Carries every diagnostic found; what() renders the
// first one as "line:col: message".
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
  const SourceLoc& loc() const { return diagnostics_.front().loc; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// Syntax only; no name resolution.
ActionDescription parse_domain_syntax(std::string_view text);

// Parses and validates. Throws ParseError on lexical or syntax errors and on
// any validation diagnostic.
ActionDescription parse_domain(std::string_view text);

// Parses an init/goal query, resolving names against `domain`. Query atoms
// must be ground and in-domain.
Query parse_query(std::string_view text, const ActionDescription& domain);

// One diagnostic per violated invariant; empty iff the description is
// well formed.
std::vector<Diagnostic> validate(const ActionDescription& d);

// Canonical text form; parse_domain(print_domain(d)) is structurally equal
// to d.
std::string print_domain(const ActionDescription& d);
std::string print_query(const Query& q);

// Parameter assignment for one grounding of a schematic law.
using Binding = std::vector<std::pair<std::string, std::int64_t>>;

// Value of `e` under `b`; nullopt if a variable is unbound.
std::optional<Value> evaluate(const ValueExpr& e, const Binding& b);

// Calls fn(binding) for every point of the parameter product, first
// parameter varying slowest. Stops early and returns false once fn returns
// false.
template <typename Fn>
bool for_each_binding(const std::vector<ParamRange>& params, Fn&& fn) {
  Binding b;
  b.reserve(params.size());
  for (const auto& p : params) {
    if (p.lo > p.hi) return true;
    b.emplace_back(p.variable, p.lo);
  }
  while (true) {
    if (!fn(static_cast<const Binding&>(b))) return false;
    std::size_t i = params.size();
    while (i > 0) {
      --i;
      if (b[i].second < params[i].hi) {
        ++b[i].second;
        break;
      }
      b[i].second = params[i].lo;
      if (i == 0) return true;
    }
    if (params.empty()) return true;
  }
}

// Copies with every SourceLoc reset, for structural comparison.
ActionDescription strip_locations(ActionDescription d);
Query strip_locations(Query q);

}  // namespace pac

#endif  // PAC_ACTION_LANG_HPP_
