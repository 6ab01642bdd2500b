#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ltlrl {

/// A set of atomic propositions as a bitmask over an AtomSet's indices.
using Label = std::uint32_t;

/// Ordered set of atomic proposition names. Index i corresponds to bit i of a
/// Label, so at most 32 propositions are supported.
class AtomSet {
 public:
  static constexpr std::size_t max_atoms = 32;

  AtomSet() = default;
  explicit AtomSet(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Number of distinct labels, 2^|AP|.
  std::size_t label_count() const noexcept { return std::size_t{1} << names_.size(); }

  /// Label containing exactly the named propositions; throws on unknown names.
  Label label_of(const std::vector<std::string>& names) const;
  /// "{a,c}" style rendering.
  std::string format(Label label) const;

  bool same_atoms(const AtomSet& other) const;
  bool operator==(const AtomSet& other) const = default;

 private:
  std::vector<std::string> names_;
};

enum class LtlOp { True, Atom, Not, And, Or, Implies, Next, Until, Eventually, Always };

/// Immutable LTL syntax tree. Derived operators (Or, Implies, Eventually,
/// Always) are kept as written; `to_core` rewrites them into the
/// true/atom/not/and/next/until grammar.
class LtlFormula {
 public:
  static LtlFormula truth();
  static LtlFormula falsity();  // !true
  static LtlFormula atom(std::size_t index, std::string name);
  static LtlFormula negation(LtlFormula f);
  static LtlFormula conjunction(LtlFormula lhs, LtlFormula rhs);
  static LtlFormula disjunction(LtlFormula lhs, LtlFormula rhs);
  static LtlFormula implication(LtlFormula lhs, LtlFormula rhs);
  static LtlFormula next(LtlFormula f);
  static LtlFormula until(LtlFormula lhs, LtlFormula rhs);
  static LtlFormula eventually(LtlFormula f);
  static LtlFormula always(LtlFormula f);

  LtlOp op() const noexcept;
  /// Operand of unary operators, left operand of binary ones.
  const LtlFormula& lhs() const;
  const LtlFormula& rhs() const;
  std::size_t atom_index() const;
  const std::string& atom_name() const;

  bool is_unary() const noexcept;
  bool is_binary() const noexcept;

  /// Identity of the shared node; equal formulas built separately differ.
  const void* id() const noexcept { return node_.get(); }

  friend bool operator==(const LtlFormula& a, const LtlFormula& b);

 private:
  struct Node;
  explicit LtlFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses the concrete syntax: `true false 1 0`, identifiers, `! X F G`,
/// `U` (right-assoc), `&`, `|`, `->` (right-assoc), parentheses. Precedence
/// from tightest: unary, U, &, |, ->.
/// Throws ParseError on syntax errors and ValidationError(undeclared_atom).
LtlFormula parse_ltl(std::string_view text, const AtomSet& ap);

/// Fully parenthesized rendering that `parse_ltl` reads back to an equal tree.
std::string to_string(const LtlFormula& f);

/// Rewrites derived operators into the core grammar:
/// a|b = !(!a & !b), a->b = !(a & !b), F a = true U a, G a = !(true U !a).
LtlFormula to_core(const LtlFormula& f);
/// Inverse of `to_core` on its image: recognizes the rewrite patterns and
/// restores the derived operators.
LtlFormula from_core(const LtlFormula& f);

bool is_core(const LtlFormula& f);
/// Height of the syntax tree; atoms and true have depth 0.
std::size_t depth(const LtlFormula& f);
/// True when the formula has no temporal operators.
bool is_propositional(const LtlFormula& f);
/// Evaluates a propositional formula on one label.
bool holds(const LtlFormula& f, Label label);

/// The infinite word prefix . cycle^omega.
struct LassoWord {
  std::vector<Label> prefix;
  std::vector<Label> cycle;  // nonempty

  std::size_t positions() const noexcept { return prefix.size() + cycle.size(); }
  /// Successor position in the folded representation.
  std::size_t successor(std::size_t pos) const noexcept {
    return pos + 1 < positions() ? pos + 1 : prefix.size();
  }
  Label at(std::size_t pos) const { return pos < prefix.size() ? prefix[pos] : cycle[pos - prefix.size()]; }
};

/// Decides prefix . cycle^omega |= f. Throws std::invalid_argument on an
/// empty cycle.
bool check_lasso(const LtlFormula& f, const LassoWord& word);

/// Satisfaction of f at every folded position of the word.
std::vector<bool> evaluate_positions(const LtlFormula& f, const LassoWord& word);

}  // namespace ltlrl
