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

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace tprover {

// Arithmetic term: a variable, a natural literal, or a (left-associative) sum.
// Immutable; copies share structure.
class Term {
 public:
  enum class Kind { Var, Nat, Add };

  static Term var(std::string name);
  static Term nat(std::uint64_t value);
  static Term add(Term lhs, Term rhs);

  Kind kind() const noexcept { return node_->kind; }
  const std::string& name() const noexcept { return node_->name; }
  std::uint64_t value() const noexcept { return node_->value; }
  const Term& lhs() const noexcept { return *node_->lhs; }
  const Term& rhs() const noexcept { return *node_->rhs; }

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::uint64_t value = 0;
    std::shared_ptr<const Term> lhs;
    std::shared_ptr<const Term> rhs;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Propositional formula with term equations at the leaves.
//
// Equality is structural and purely syntactic: `a + 0 = a` is not `a = a`.
class Formula {
 public:
  enum class Kind { Atom, Imp, And, Or, Eq };

  static Formula atom(std::string name);
  static Formula imp(Formula lhs, Formula rhs);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula eq(Term lhs, Term rhs);

  Kind kind() const noexcept { return node_->kind; }
  // Atom only.
  const std::string& name() const noexcept { return node_->name; }
  // Imp / And / Or only.
  const Formula& lhs() const noexcept { return *node_->lhs; }
  const Formula& rhs() const noexcept { return *node_->rhs; }
  // Eq only.
  const Term& left_term() const noexcept { return *node_->left_term; }
  const Term& right_term() const noexcept { return *node_->right_term; }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::shared_ptr<const Formula> lhs;
    std::shared_ptr<const Formula> rhs;
    std::shared_ptr<const Term> left_term;
    std::shared_ptr<const Term> right_term;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Grammar (loosest to tightest):
//   formula := disj ( ("→" | "->") formula )?          right-associative
//   disj    := conj ( ("∨" | "\/") disj )?              right-associative
//   conj    := prim ( ("∧" | "/\") conj )?              right-associative
//   prim    := term "=" term | ident | "(" formula ")"
//   term    := tprim ( "+" tprim )*                      left-associative
//   tprim   := ident | nat | "(" term ")"
// Throws ParseError carrying the byte offset of the failure.
Formula parse_formula(std::string_view text);

// Unicode rendering with the minimal parentheses needed to round-trip.
std::string render(const Formula& formula);
std::string render(const Term& term);

bool is_identifier(std::string_view text);

}  // namespace tprover
