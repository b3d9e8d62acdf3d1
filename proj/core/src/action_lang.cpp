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

#include "pac/action_lang.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pac {

std::string to_string(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

std::string to_string(const ValueExpr& e) {
  if (e.constant) return to_string(*e.constant);
  if (e.offset > 0) return e.variable + "+" + std::to_string(e.offset);
  if (e.offset < 0) return e.variable + "-" + std::to_string(-e.offset);
  return e.variable;
}

std::optional<Value> evaluate(const ValueExpr& e, const Binding& b) {
  if (e.constant) return *e.constant;
  for (const auto& [name, value] : b) {
    if (name == e.variable) return Value{value + e.offset};
  }
  return std::nullopt;
}

const FluentDecl* ActionDescription::find_fluent(std::string_view name) const {
  for (const auto& f : fluents) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::optional<std::size_t> ActionDescription::fluent_index(std::string_view name) const {
  for (std::size_t i = 0; i < fluents.size(); ++i) {
    if (fluents[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> ActionDescription::action_index(std::string_view name) const {
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i].name == name) return i;
  }
  return std::nullopt;
}

std::string Diagnostic::to_string() const {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + message;
}

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(diagnostics.empty() ? std::string("parse error")
                                             : diagnostics.front().to_string()),
      diagnostics_(std::move(diagnostics)) {
  if (diagnostics_.empty()) diagnostics_.push_back({{1, 1}, "error", "parse error"});
}

namespace {

enum class Tok { ident, integer, dot, dotdot, comma, colon, eq, lbrace, rbrace, plus, minus, end };

struct Token {
  Tok kind;
  std::string text;
  std::int64_t number = 0;
  SourceLoc loc;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::integer: return "integer";
    case Tok::dot: return "'.'";
    case Tok::dotdot: return "'..'";
    case Tok::comma: return "','";
    case Tok::colon: return "':'";
    case Tok::eq: return "'='";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::plus: return "'+'";
    case Tok::minus: return "'-'";
    case Tok::end: return "end of input";
  }
  return "token";
}

[[noreturn]] void fail(SourceLoc loc, std::string code, std::string message) {
  throw ParseError({Diagnostic{loc, std::move(code), std::move(message)}});
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const SourceLoc loc{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      out.push_back({Tok::ident, std::string(text.substr(i, j - i)), 0, loc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      std::int64_t value = 0;
      const auto* first = text.data() + i;
      const auto [ptr, ec] = std::from_chars(first, text.data() + j, value);
      if (ec != std::errc() || ptr != text.data() + j) {
        fail(loc, "lexical", "integer literal out of range");
      }
      out.push_back({Tok::integer, std::string(text.substr(i, j - i)), value, loc});
      advance(j - i);
      continue;
    }
    Tok kind;
    std::size_t len = 1;
    switch (c) {
      case '.':
        if (i + 1 < text.size() && text[i + 1] == '.') {
          kind = Tok::dotdot;
          len = 2;
        } else {
          kind = Tok::dot;
        }
        break;
      case ',': kind = Tok::comma; break;
      case ':': kind = Tok::colon; break;
      case '=': kind = Tok::eq; break;
      case '{': kind = Tok::lbrace; break;
      case '}': kind = Tok::rbrace; break;
      case '+': kind = Tok::plus; break;
      case '-': kind = Tok::minus; break;
      default:
        fail(loc, "lexical", std::string("unexpected character '") + c + "'");
    }
    out.push_back({kind, std::string(text.substr(i, len)), 0, loc});
    advance(len);
  }
  out.push_back({Tok::end, "", 0, SourceLoc{line, col}});
  return out;
}

const std::unordered_set<std::string>& keywords() {
  static const std::unordered_set<std::string> k{"fluent", "action", "causes", "if",
                                                 "where",  "in",     "init",   "goal"};
  return k;
}

bool is_variable_name(std::string_view s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s.front()));
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(lex(text)) {}

  ActionDescription domain() {
    ActionDescription d;
    while (peek().kind != Tok::end) statement(d);
    return d;
  }

  Query query() {
    Query q;
    while (peek().kind != Tok::end) {
      const Token& t = peek();
      if (is_keyword(t, "init")) {
        next();
        atom_list(q.initial);
      } else if (is_keyword(t, "goal")) {
        next();
        atom_list(q.goal);
      } else {
        fail(t.loc, "syntax", "expected 'init' or 'goal', found " + show(t));
      }
      expect(Tok::dot);
    }
    return q;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  static bool is_keyword(const Token& t, std::string_view kw) {
    return t.kind == Tok::ident && t.text == kw;
  }

  static std::string show(const Token& t) {
    if (t.kind == Tok::ident || t.kind == Tok::integer) return "'" + t.text + "'";
    return describe(t.kind);
  }

  const Token& expect(Tok kind) {
    const Token& t = peek();
    if (t.kind != kind) {
      fail(t.loc, "syntax", std::string("expected ") + describe(kind) + ", found " + show(t));
    }
    return next();
  }

  void expect_keyword(std::string_view kw) {
    const Token& t = peek();
    if (!is_keyword(t, kw)) {
      fail(t.loc, "syntax", "expected '" + std::string(kw) + "', found " + show(t));
    }
    next();
  }

  std::string name() {
    const Token& t = expect(Tok::ident);
    if (keywords().count(t.text)) fail(t.loc, "syntax", "'" + t.text + "' is a reserved word");
    return t.text;
  }

  std::int64_t integer() {
    bool negative = false;
    if (peek().kind == Tok::minus) {
      next();
      negative = true;
    }
    const Token& t = expect(Tok::integer);
    return negative ? -t.number : t.number;
  }

  Value domain_value() {
    const Token& t = peek();
    if (t.kind == Tok::ident) {
      if (is_variable_name(t.text)) {
        fail(t.loc, "syntax", "symbol values must start with a lowercase letter: '" + t.text + "'");
      }
      return Value{name()};
    }
    return Value{integer()};
  }

  void statement(ActionDescription& d) {
    const Token& t = peek();
    if (is_keyword(t, "fluent")) {
      next();
      FluentDecl f;
      f.loc = t.loc;
      f.name = name();
      expect(Tok::colon);
      if (peek().kind == Tok::lbrace) {
        next();
        f.domain.push_back(domain_value());
        while (peek().kind == Tok::comma) {
          next();
          f.domain.push_back(domain_value());
        }
        expect(Tok::rbrace);
      } else {
        const SourceLoc range_loc = peek().loc;
        const std::int64_t lo = integer();
        expect(Tok::dotdot);
        const std::int64_t hi = integer();
        if (hi < lo) fail(range_loc, "empty-domain", "empty domain for fluent '" + f.name + "'");
        if (hi - lo > 1'000'000) fail(range_loc, "syntax", "fluent domain too large");
        for (std::int64_t v = lo; v <= hi; ++v) f.domain.emplace_back(v);
      }
      expect(Tok::dot);
      d.fluents.push_back(std::move(f));
      return;
    }
    if (is_keyword(t, "action")) {
      next();
      ActionDecl a;
      a.loc = t.loc;
      a.name = name();
      expect(Tok::dot);
      d.actions.push_back(std::move(a));
      return;
    }
    if (t.kind != Tok::ident) fail(t.loc, "syntax", "expected a declaration or law, found " + show(t));
    if (is_keyword(peek(1), "causes")) {
      DynamicLaw law;
      law.loc = t.loc;
      law.action = name();
      next();  // causes
      law.effect = atom();
      if (is_keyword(peek(), "if")) {
        next();
        atom_list(law.conditions);
      }
      law.params = where_clause();
      expect(Tok::dot);
      d.dynamics.push_back(std::move(law));
      return;
    }
    if (peek(1).kind != Tok::eq) {
      fail(peek(1).loc, "syntax", "malformed law: expected 'causes' or '=' after '" + t.text + "'");
    }
    StaticLaw law;
    law.loc = t.loc;
    law.head = atom();
    if (is_keyword(peek(), "if")) {
      next();
      atom_list(law.body);
    }
    law.params = where_clause();
    expect(Tok::dot);
    d.statics.push_back(std::move(law));
  }

  Atom atom() {
    Atom a;
    a.loc = peek().loc;
    a.fluent = name();
    expect(Tok::eq);
    a.value = value_expr();
    return a;
  }

  void atom_list(std::vector<Atom>& out) {
    out.push_back(atom());
    while (peek().kind == Tok::comma) {
      next();
      out.push_back(atom());
    }
  }

  ValueExpr value_expr() {
    const Token& t = peek();
    if (t.kind == Tok::ident && is_variable_name(t.text)) {
      std::string var = name();
      std::int64_t offset = 0;
      if (peek().kind == Tok::plus || peek().kind == Tok::minus) {
        const bool minus = next().kind == Tok::minus;
        const std::int64_t c = expect(Tok::integer).number;
        offset = minus ? -c : c;
      }
      return ValueExpr::var(std::move(var), offset);
    }
    if (t.kind == Tok::ident) return ValueExpr::of(Value{name()});
    if (t.kind == Tok::integer || t.kind == Tok::minus) return ValueExpr::of(Value{integer()});
    fail(t.loc, "syntax", "expected a value, found " + show(t));
  }

  std::vector<ParamRange> where_clause() {
    std::vector<ParamRange> params;
    if (!is_keyword(peek(), "where")) return params;
    next();
    while (true) {
      ParamRange p;
      p.loc = peek().loc;
      const Token& v = peek();
      if (v.kind != Tok::ident || !is_variable_name(v.text)) {
        fail(v.loc, "syntax", "expected a parameter variable, found " + show(v));
      }
      p.variable = name();
      expect_keyword("in");
      p.lo = integer();
      expect(Tok::dotdot);
      p.hi = integer();
      params.push_back(std::move(p));
      if (peek().kind != Tok::comma) break;
      next();
    }
    return params;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool in_domain(const FluentDecl& f, const Value& v) {
  return std::find(f.domain.begin(), f.domain.end(), v) != f.domain.end();
}

class Validator {
 public:
  explicit Validator(const ActionDescription& d) : d_(d) {}

  std::vector<Diagnostic> run() {
    if (d_.fluents.empty()) {
      add({1, 1}, "no-fluents", "no fluent declarations");
    }
    std::unordered_map<std::string, SourceLoc> seen;
    auto declare = [&](const std::string& name, SourceLoc loc, const char* what) {
      auto [it, inserted] = seen.emplace(name, loc);
      if (!inserted) {
        add(loc, "duplicate",
            std::string("duplicate ") + what + " '" + name + "' (first declared at " +
                std::to_string(it->second.line) + ":" + std::to_string(it->second.column) + ")");
      }
    };
    for (const auto& f : d_.fluents) {
      declare(f.name, f.loc, "declaration");
      if (f.domain.empty()) add(f.loc, "empty-domain", "empty domain for fluent '" + f.name + "'");
      std::set<Value> values;
      for (const auto& v : f.domain) {
        if (!values.insert(v).second) {
          add(f.loc, "duplicate", "duplicate value '" + to_string(v) + "' in domain of '" + f.name + "'");
        }
      }
    }
    for (const auto& a : d_.actions) declare(a.name, a.loc, "declaration");

    for (const auto& law : d_.statics) {
      std::vector<const Atom*> atoms{&law.head};
      for (const auto& a : law.body) atoms.push_back(&a);
      check_law(atoms, law.params, law.loc);
    }
    for (const auto& law : d_.dynamics) {
      if (!d_.action_index(law.action)) {
        add(law.loc, "unknown-action", "unknown action '" + law.action + "'");
      }
      std::vector<const Atom*> atoms{&law.effect};
      for (const auto& a : law.conditions) atoms.push_back(&a);
      check_law(atoms, law.params, law.loc);
    }
    return std::move(out_);
  }

 private:
  void add(SourceLoc loc, std::string code, std::string message) {
    out_.push_back({loc, std::move(code), std::move(message)});
  }

  void check_law(const std::vector<const Atom*>& atoms, const std::vector<ParamRange>& params,
                 SourceLoc loc) {
    bool ok = true;
    std::set<std::string> vars;
    for (const auto& p : params) {
      if (!vars.insert(p.variable).second) {
        add(p.loc, "duplicate", "duplicate parameter '" + p.variable + "'");
        ok = false;
      }
      if (p.lo > p.hi) {
        add(p.loc, "empty-range", "empty range for parameter '" + p.variable + "'");
        ok = false;
      }
    }
    std::vector<const FluentDecl*> fluents;
    for (const Atom* a : atoms) {
      const FluentDecl* f = d_.find_fluent(a->fluent);
      if (f == nullptr) {
        add(a->loc, "unknown-fluent", "unknown fluent '" + a->fluent + "'");
        ok = false;
      }
      fluents.push_back(f);
      if (!a->value.is_constant() && !vars.count(a->value.variable)) {
        add(a->loc, "unbound-variable",
            "variable '" + a->value.variable + "' is not bound by a where clause");
        ok = false;
      }
    }
    if (!ok) return;

    // A law none of whose groundings stays inside the fluent domains can
    // never fire.
    constexpr std::size_t kMaxChecked = 1'000'000;
    std::size_t visited = 0;
    bool any = false;
    for_each_binding(params, [&](const Binding& b) {
      ++visited;
      bool all_in = true;
      for (std::size_t i = 0; i < atoms.size() && all_in; ++i) {
        const auto v = evaluate(atoms[i]->value, b);
        all_in = v && in_domain(*fluents[i], *v);
      }
      if (all_in) any = true;
      return !any && visited < kMaxChecked;
    });
    if (!any && visited < kMaxChecked) {
      add(loc, "vacuous", "vacuous law: no grounding has all values inside the fluent domains");
    }
  }

  const ActionDescription& d_;
  std::vector<Diagnostic> out_;
};

void print_atom(std::ostream& os, const Atom& a) { os << a.fluent << " = " << to_string(a.value); }

void print_atoms(std::ostream& os, const std::vector<Atom>& atoms) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) os << ", ";
    print_atom(os, atoms[i]);
  }
}

void print_where(std::ostream& os, const std::vector<ParamRange>& params) {
  if (params.empty()) return;
  os << " where ";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) os << ", ";
    os << params[i].variable << " in " << params[i].lo << ".." << params[i].hi;
  }
}

bool is_int_range(const std::vector<Value>& domain) {
  if (domain.empty()) return false;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto* v = std::get_if<std::int64_t>(&domain[i]);
    if (v == nullptr) return false;
    if (i > 0 && *v != std::get<std::int64_t>(domain[i - 1]) + 1) return false;
  }
  return true;
}

void strip(Atom& a) { a.loc = {}; }

}  // namespace

ActionDescription parse_domain_syntax(std::string_view text) { return Parser(text).domain(); }

ActionDescription parse_domain(std::string_view text) {
  ActionDescription d = parse_domain_syntax(text);
  auto diagnostics = validate(d);
  if (!diagnostics.empty()) throw ParseError(std::move(diagnostics));
  return d;
}

Query parse_query(std::string_view text, const ActionDescription& domain) {
  Query q = Parser(text).query();
  std::vector<Diagnostic> diagnostics;
  auto check = [&](const Atom& a) {
    const FluentDecl* f = domain.find_fluent(a.fluent);
    if (f == nullptr) {
      diagnostics.push_back({a.loc, "unknown-fluent", "unknown fluent '" + a.fluent + "'"});
      return;
    }
    if (!a.value.is_constant()) {
      diagnostics.push_back({a.loc, "unbound-variable",
                             "query atoms must be ground; found variable '" + a.value.variable + "'"});
      return;
    }
    if (!in_domain(*f, *a.value.constant)) {
      diagnostics.push_back({a.loc, "out-of-domain",
                             "value '" + to_string(*a.value.constant) + "' is not in the domain of '" +
                                 a.fluent + "'"});
    }
  };
  for (const auto& a : q.initial) check(a);
  for (const auto& a : q.goal) check(a);
  if (!diagnostics.empty()) throw ParseError(std::move(diagnostics));
  return q;
}

std::vector<Diagnostic> validate(const ActionDescription& d) { return Validator(d).run(); }

std::string print_domain(const ActionDescription& d) {
  std::ostringstream os;
  for (const auto& f : d.fluents) {
    os << "fluent " << f.name << " : ";
    if (is_int_range(f.domain)) {
      os << std::get<std::int64_t>(f.domain.front()) << ".."
         << std::get<std::int64_t>(f.domain.back());
    } else {
      os << "{";
      for (std::size_t i = 0; i < f.domain.size(); ++i) {
        if (i) os << ", ";
        os << to_string(f.domain[i]);
      }
      os << "}";
    }
    os << " .\n";
  }
  for (const auto& a : d.actions) os << "action " << a.name << " .\n";
  for (const auto& law : d.statics) {
    print_atom(os, law.head);
    if (!law.body.empty()) {
      os << " if ";
      print_atoms(os, law.body);
    }
    print_where(os, law.params);
    os << " .\n";
  }
  for (const auto& law : d.dynamics) {
    os << law.action << " causes ";
    print_atom(os, law.effect);
    if (!law.conditions.empty()) {
      os << " if ";
      print_atoms(os, law.conditions);
    }
    print_where(os, law.params);
    os << " .\n";
  }
  return os.str();
}

std::string print_query(const Query& q) {
  std::ostringstream os;
  if (!q.initial.empty()) {
    os << "init ";
    print_atoms(os, q.initial);
    os << " .\n";
  }
  if (!q.goal.empty()) {
    os << "goal ";
    print_atoms(os, q.goal);
    os << " .\n";
  }
  return os.str();
}

ActionDescription strip_locations(ActionDescription d) {
  for (auto& f : d.fluents) f.loc = {};
  for (auto& a : d.actions) a.loc = {};
  for (auto& law : d.statics) {
    law.loc = {};
    strip(law.head);
    for (auto& a : law.body) strip(a);
    for (auto& p : law.params) p.loc = {};
  }
  for (auto& law : d.dynamics) {
    law.loc = {};
    strip(law.effect);
    for (auto& a : law.conditions) strip(a);
    for (auto& p : law.params) p.loc = {};
  }
  return d;
}

Query strip_locations(Query q) {
  for (auto& a : q.initial) strip(a);
  for (auto& a : q.goal) strip(a);
  return q;
}

}  // namespace pac
