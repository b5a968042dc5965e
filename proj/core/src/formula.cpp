// Copyright 2026 The tprover Authors. All Rights Reserved.
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

#include "tprover/formula.hpp"

#include <cctype>
#include <limits>
#include <vector>

#include "tprover/errors.hpp"

namespace tprover {

Term Term::var(std::string name) {
  return Term(std::make_shared<const Node>(Node{Kind::Var, std::move(name), 0, nullptr, nullptr}));
}

Term Term::nat(std::uint64_t value) {
  return Term(std::make_shared<const Node>(Node{Kind::Nat, {}, value, nullptr, nullptr}));
}

Term Term::add(Term lhs, Term rhs) {
  return Term(std::make_shared<const Node>(Node{Kind::Add, {}, 0,
                                                std::make_shared<const Term>(std::move(lhs)),
                                                std::make_shared<const Term>(std::move(rhs))}));
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var:
      return a.name() == b.name();
    case Term::Kind::Nat:
      return a.value() == b.value();
    case Term::Kind::Add:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

Formula Formula::atom(std::string name) {
  Node n{Kind::Atom, std::move(name), nullptr, nullptr, nullptr, nullptr};
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::imp(Formula lhs, Formula rhs) {
  Node n{Kind::Imp, {}, std::make_shared<const Formula>(std::move(lhs)),
         std::make_shared<const Formula>(std::move(rhs)), nullptr, nullptr};
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::conj(Formula lhs, Formula rhs) {
  Node n{Kind::And, {}, std::make_shared<const Formula>(std::move(lhs)),
         std::make_shared<const Formula>(std::move(rhs)), nullptr, nullptr};
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::disj(Formula lhs, Formula rhs) {
  Node n{Kind::Or, {}, std::make_shared<const Formula>(std::move(lhs)),
         std::make_shared<const Formula>(std::move(rhs)), nullptr, nullptr};
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::eq(Term lhs, Term rhs) {
  Node n{Kind::Eq, {}, nullptr, nullptr, std::make_shared<const Term>(std::move(lhs)),
         std::make_shared<const Term>(std::move(rhs))};
  return Formula(std::make_shared<const Node>(std::move(n)));
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::Atom:
      return a.name() == b.name();
    case Formula::Kind::Eq:
      return a.left_term() == b.left_term() && a.right_term() == b.right_term();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  const auto first = static_cast<unsigned char>(text.front());
  if (!(std::isalpha(first) || first == '_')) return false;
  for (char c : text.substr(1)) {
    const auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || u == '_' || u == '\'')) return false;
  }
  return true;
}

namespace {

enum class Tok { Ident, Nat, LParen, RParen, Arrow, And, Or, Eq, Plus, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

constexpr std::string_view kArrow = "\xE2\x86\x92";  // →
constexpr std::string_view kAnd = "\xE2\x88\xA7";    // ∧
constexpr std::string_view kOr = "\xE2\x88\xA8";     // ∨

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto starts = [&](std::string_view p) { return s.substr(i, p.size()) == p; };
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(c) || c == '_') {
      while (i < s.size()) {
        const auto u = static_cast<unsigned char>(s[i]);
        if (!(std::isalnum(u) || u == '_' || u == '\'')) break;
        ++i;
      }
      out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
    } else if (std::isdigit(c)) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::Nat, std::string(s.substr(start, i - start)), start});
    } else if (c == '(') {
      out.push_back({Tok::LParen, "(", start});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::RParen, ")", start});
      ++i;
    } else if (c == '=') {
      out.push_back({Tok::Eq, "=", start});
      ++i;
    } else if (c == '+') {
      out.push_back({Tok::Plus, "+", start});
      ++i;
    } else if (starts("->")) {
      out.push_back({Tok::Arrow, "->", start});
      i += 2;
    } else if (starts("/\\")) {
      out.push_back({Tok::And, "/\\", start});
      i += 2;
    } else if (starts("\\/")) {
      out.push_back({Tok::Or, "\\/", start});
      i += 2;
    } else if (starts(kArrow)) {
      out.push_back({Tok::Arrow, std::string(kArrow), start});
      i += kArrow.size();
    } else if (starts(kAnd)) {
      out.push_back({Tok::And, std::string(kAnd), start});
      i += kAnd.size();
    } else if (starts(kOr)) {
      out.push_back({Tok::Or, std::string(kOr), start});
      i += kOr.size();
    } else {
      throw ParseError("unexpected character", start);
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Formula parse_all() {
    Formula f = formula();
    if (peek().kind != Tok::End) throw ParseError("unexpected trailing input", peek().pos);
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) throw ParseError(std::string("expected ") + what, peek().pos);
  }

  Formula formula() {
    Formula lhs = disj();
    if (accept(Tok::Arrow)) return Formula::imp(std::move(lhs), formula());
    return lhs;
  }

  Formula disj() {
    Formula lhs = conj();
    if (accept(Tok::Or)) return Formula::disj(std::move(lhs), disj());
    return lhs;
  }

  Formula conj() {
    Formula lhs = prim();
    if (accept(Tok::And)) return Formula::conj(std::move(lhs), conj());
    return lhs;
  }

  Formula prim() {
    const std::size_t saved = pos_;
    // An equation is tried first; on failure we rewind and read an atom or a
    // parenthesised formula instead.
    try {
      Term lhs = term();
      expect(Tok::Eq, "'='");
      return Formula::eq(std::move(lhs), term());
    } catch (const ParseError&) {
      pos_ = saved;
    }
    if (peek().kind == Tok::Ident) {
      std::string name = peek().text;
      ++pos_;
      return Formula::atom(std::move(name));
    }
    if (accept(Tok::LParen)) {
      Formula inner = formula();
      expect(Tok::RParen, "')'");
      return inner;
    }
    throw ParseError("expected formula", peek().pos);
  }

  Term term() {
    Term acc = term_prim();
    while (accept(Tok::Plus)) acc = Term::add(std::move(acc), term_prim());
    return acc;
  }

  Term term_prim() {
    const Token& t = peek();
    if (t.kind == Tok::Ident) {
      ++pos_;
      return Term::var(t.text);
    }
    if (t.kind == Tok::Nat) {
      std::uint64_t v = 0;
      for (char c : t.text) {
        const auto d = static_cast<std::uint64_t>(c - '0');
        if (v > (std::numeric_limits<std::uint64_t>::max() - d) / 10) {
          throw ParseError("numeric literal out of range", t.pos);
        }
        v = v * 10 + d;
      }
      ++pos_;
      return Term::nat(v);
    }
    if (accept(Tok::LParen)) {
      Term inner = term();
      expect(Tok::RParen, "')'");
      return inner;
    }
    throw ParseError("expected term", t.pos);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Imp:
      return 1;
    case Formula::Kind::Or:
      return 2;
    case Formula::Kind::And:
      return 3;
    default:
      return 4;
  }
}

void render_into(const Term& t, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      out += t.name();
      return;
    case Term::Kind::Nat:
      out += std::to_string(t.value());
      return;
    case Term::Kind::Add:
      render_into(t.lhs(), out);
      out += " + ";
      if (t.rhs().kind() == Term::Kind::Add) {
        out += '(';
        render_into(t.rhs(), out);
        out += ')';
      } else {
        render_into(t.rhs(), out);
      }
      return;
  }
}

void render_into(const Formula& f, std::string& out) {
  auto child = [&out](const Formula& c, bool parens) {
    if (parens) out += '(';
    render_into(c, out);
    if (parens) out += ')';
  };
  switch (f.kind()) {
    case Formula::Kind::Atom:
      out += f.name();
      return;
    case Formula::Kind::Eq:
      render_into(f.left_term(), out);
      out += " = ";
      render_into(f.right_term(), out);
      return;
    case Formula::Kind::Imp:
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      // Right-associative binary operators: the left operand needs parentheses
      // at equal or looser precedence, the right one only when looser.
      const int p = precedence(f.kind());
      child(f.lhs(), precedence(f.lhs().kind()) <= p);
      if (f.kind() == Formula::Kind::Imp) {
        out += " ";
        out += kArrow;
        out += " ";
      } else if (f.kind() == Formula::Kind::And) {
        out += " ";
        out += kAnd;
        out += " ";
      } else {
        out += " ";
        out += kOr;
        out += " ";
      }
      child(f.rhs(), precedence(f.rhs().kind()) < p);
      return;
    }
  }
}

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(lex(text)).parse_all(); }

std::string render(const Formula& formula) {
  std::string out;
  render_into(formula, out);
  return out;
}

std::string render(const Term& term) {
  std::string out;
  render_into(term, out);
  return out;
}

}  // namespace tprover
