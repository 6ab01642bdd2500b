#include "ltlrl/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "ltlrl/errors.hpp"

namespace ltlrl {

// ---------------------------------------------------------------------------
// AtomSet

AtomSet::AtomSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() > max_atoms) {
    throw std::invalid_argument(fmt::format("at most {} atomic propositions are supported", max_atoms));
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (std::find(names_.begin(), names_.begin() + static_cast<std::ptrdiff_t>(i), names_[i]) !=
        names_.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw std::invalid_argument("duplicate atomic proposition '" + names_[i] + "'");
    }
  }
}

std::optional<std::size_t> AtomSet::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

Label AtomSet::label_of(const std::vector<std::string>& names) const {
  Label label = 0;
  for (const auto& n : names) {
    auto idx = index_of(n);
    if (!idx) throw ValidationError(ValidationError::Kind::undeclared_atom, "unknown proposition '" + n + "'");
    label |= Label{1} << *idx;
  }
  return label;
}

std::string AtomSet::format(Label label) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (label & (Label{1} << i)) {
      if (!first) out += ',';
      out += names_[i];
      first = false;
    }
  }
  return out + "}";
}

bool AtomSet::same_atoms(const AtomSet& other) const {
  if (size() != other.size()) return false;
  return std::all_of(names_.begin(), names_.end(), [&](const std::string& n) { return other.index_of(n).has_value(); });
}

// ---------------------------------------------------------------------------
// LtlFormula

struct LtlFormula::Node {
  LtlOp op;
  std::size_t atom = 0;
  std::string name;
  std::optional<LtlFormula> lhs;
  std::optional<LtlFormula> rhs;
};

LtlFormula LtlFormula::truth() { return LtlFormula(std::make_shared<const Node>(Node{LtlOp::True, 0, {}, std::nullopt, std::nullopt})); }
LtlFormula LtlFormula::falsity() { return negation(truth()); }

LtlFormula LtlFormula::atom(std::size_t index, std::string name) {
  return LtlFormula(std::make_shared<const Node>(Node{LtlOp::Atom, index, std::move(name), std::nullopt, std::nullopt}));
}

LtlFormula LtlFormula::negation(LtlFormula f) {
  return LtlFormula(std::make_shared<const Node>(Node{LtlOp::Not, 0, {}, std::move(f), std::nullopt}));
}
LtlFormula LtlFormula::next(LtlFormula f) {
  return LtlFormula(std::make_shared<const Node>(Node{LtlOp::Next, 0, {}, std::move(f), std::nullopt}));
}
LtlFormula LtlFormula::eventually(LtlFormula f) {
  return LtlFormula(std::make_shared<const Node>(Node{LtlOp::Eventually, 0, {}, std::move(f), std::nullopt}));
}
LtlFormula LtlFormula::always(LtlFormula f) {
  return LtlFormula(std::make_shared<const Node>(Node{LtlOp::Always, 0, {}, std::move(f), std::nullopt}));
}
LtlFormula LtlFormula::conjunction(LtlFormula lhs, LtlFormula rhs) {
  return LtlFormula(std::make_shared<const Node>(Node{LtlOp::And, 0, {}, std::move(lhs), std::move(rhs)}));
}
LtlFormula LtlFormula::disjunction(LtlFormula lhs, LtlFormula rhs) {
  return LtlFormula(std::make_shared<const Node>(Node{LtlOp::Or, 0, {}, std::move(lhs), std::move(rhs)}));
}
LtlFormula LtlFormula::implication(LtlFormula lhs, LtlFormula rhs) {
  return LtlFormula(std::make_shared<const Node>(Node{LtlOp::Implies, 0, {}, std::move(lhs), std::move(rhs)}));
}
LtlFormula LtlFormula::until(LtlFormula lhs, LtlFormula rhs) {
  return LtlFormula(std::make_shared<const Node>(Node{LtlOp::Until, 0, {}, std::move(lhs), std::move(rhs)}));
}

LtlOp LtlFormula::op() const noexcept { return node_->op; }

const LtlFormula& LtlFormula::lhs() const {
  if (!node_->lhs) throw std::logic_error("formula has no operand");
  return *node_->lhs;
}

const LtlFormula& LtlFormula::rhs() const {
  if (!node_->rhs) throw std::logic_error("formula has no right operand");
  return *node_->rhs;
}

std::size_t LtlFormula::atom_index() const {
  if (node_->op != LtlOp::Atom) throw std::logic_error("not an atom");
  return node_->atom;
}

const std::string& LtlFormula::atom_name() const {
  if (node_->op != LtlOp::Atom) throw std::logic_error("not an atom");
  return node_->name;
}

bool LtlFormula::is_unary() const noexcept {
  switch (node_->op) {
    case LtlOp::Not:
    case LtlOp::Next:
    case LtlOp::Eventually:
    case LtlOp::Always: return true;
    default: return false;
  }
}

bool LtlFormula::is_binary() const noexcept { return node_->rhs.has_value(); }

bool operator==(const LtlFormula& a, const LtlFormula& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  if (a.op() == LtlOp::True) return true;
  if (a.op() == LtlOp::Atom) return a.atom_index() == b.atom_index() && a.atom_name() == b.atom_name();
  if (!(a.lhs() == b.lhs())) return false;
  return !a.is_binary() || a.rhs() == b.rhs();
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { End, LParen, RParen, Not, And, Or, Implies, Next, Eventually, Always, Until, True, False, Ident };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) return {Tok::End, start, {}};
    const char c = text_[pos_];
    auto single = [&](Tok kind, std::size_t len) {
      pos_ += len;
      return Token{kind, start, std::string(text_.substr(start, len))};
    };
    switch (c) {
      case '(': return single(Tok::LParen, 1);
      case ')': return single(Tok::RParen, 1);
      case '!': return single(Tok::Not, 1);
      case '&': return single(Tok::And, peek(1) == '&' ? 2 : 1);
      case '|': return single(Tok::Or, peek(1) == '|' ? 2 : 1);
      case '-':
        if (peek(1) == '>') return single(Tok::Implies, 2);
        throw ParseError("expected '->'", 0, start);
      case '1': return single(Tok::True, 1);
      case '0': return single(Tok::False, 1);
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      std::string word(text_.substr(start, pos_ - start));
      if (word == "true") return {Tok::True, start, word};
      if (word == "false") return {Tok::False, start, word};
      if (word == "X") return {Tok::Next, start, word};
      if (word == "F") return {Tok::Eventually, start, word};
      if (word == "G") return {Tok::Always, start, word};
      if (word == "U") return {Tok::Until, start, word};
      return {Tok::Ident, start, word};
    }
    throw ParseError(fmt::format("unexpected character '{}'", c), 0, start);
  }

 private:
  char peek(std::size_t ahead) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

  std::string_view text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  Parser(std::string_view text, const AtomSet& ap) : lexer_(text), ap_(ap) { advance(); }

  LtlFormula parse() {
    LtlFormula f = implies();
    if (current_.kind != Tok::End) throw ParseError("unexpected '" + current_.text + "'", 0, current_.pos);
    return f;
  }

 private:
  void advance() { current_ = lexer_.next(); }

  LtlFormula implies() {
    LtlFormula lhs = disjunction();
    if (current_.kind == Tok::Implies) {
      advance();
      return LtlFormula::implication(std::move(lhs), implies());
    }
    return lhs;
  }

  LtlFormula disjunction() {
    LtlFormula lhs = conjunction();
    while (current_.kind == Tok::Or) {
      advance();
      lhs = LtlFormula::disjunction(std::move(lhs), conjunction());
    }
    return lhs;
  }

  LtlFormula conjunction() {
    LtlFormula lhs = until();
    while (current_.kind == Tok::And) {
      advance();
      lhs = LtlFormula::conjunction(std::move(lhs), until());
    }
    return lhs;
  }

  LtlFormula until() {
    LtlFormula lhs = unary();
    if (current_.kind == Tok::Until) {
      advance();
      return LtlFormula::until(std::move(lhs), until());
    }
    return lhs;
  }

  LtlFormula unary() {
    switch (current_.kind) {
      case Tok::Not: advance(); return LtlFormula::negation(unary());
      case Tok::Next: advance(); return LtlFormula::next(unary());
      case Tok::Eventually: advance(); return LtlFormula::eventually(unary());
      case Tok::Always: advance(); return LtlFormula::always(unary());
      default: return primary();
    }
  }

  LtlFormula primary() {
    const Token tok = current_;
    switch (tok.kind) {
      case Tok::True: advance(); return LtlFormula::truth();
      case Tok::False: advance(); return LtlFormula::falsity();
      case Tok::Ident: {
        auto idx = ap_.index_of(tok.text);
        if (!idx) {
          throw ValidationError(ValidationError::Kind::undeclared_atom,
                                fmt::format("proposition '{}' at offset {} is not declared", tok.text, tok.pos));
        }
        advance();
        return LtlFormula::atom(*idx, tok.text);
      }
      case Tok::LParen: {
        advance();
        LtlFormula inner = implies();
        if (current_.kind != Tok::RParen) throw ParseError("expected ')'", 0, current_.pos);
        advance();
        return inner;
      }
      case Tok::End: throw ParseError("unexpected end of formula", 0, tok.pos);
      default: throw ParseError("unexpected '" + tok.text + "'", 0, tok.pos);
    }
  }

  Lexer lexer_;
  const AtomSet& ap_;
  Token current_{Tok::End, 0, {}};
};

}  // namespace

LtlFormula parse_ltl(std::string_view text, const AtomSet& ap) { return Parser(text, ap).parse(); }

std::string to_string(const LtlFormula& f) {
  switch (f.op()) {
    case LtlOp::True: return "true";
    case LtlOp::Atom: return f.atom_name();
    case LtlOp::Not: return "!" + to_string(f.lhs());
    case LtlOp::Next: return "X " + to_string(f.lhs());
    case LtlOp::Eventually: return "F " + to_string(f.lhs());
    case LtlOp::Always: return "G " + to_string(f.lhs());
    case LtlOp::And: return "(" + to_string(f.lhs()) + " & " + to_string(f.rhs()) + ")";
    case LtlOp::Or: return "(" + to_string(f.lhs()) + " | " + to_string(f.rhs()) + ")";
    case LtlOp::Implies: return "(" + to_string(f.lhs()) + " -> " + to_string(f.rhs()) + ")";
    case LtlOp::Until: return "(" + to_string(f.lhs()) + " U " + to_string(f.rhs()) + ")";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Core grammar

LtlFormula to_core(const LtlFormula& f) {
  using F = LtlFormula;
  switch (f.op()) {
    case LtlOp::True:
    case LtlOp::Atom: return f;
    case LtlOp::Not: return F::negation(to_core(f.lhs()));
    case LtlOp::Next: return F::next(to_core(f.lhs()));
    case LtlOp::And: return F::conjunction(to_core(f.lhs()), to_core(f.rhs()));
    case LtlOp::Until: return F::until(to_core(f.lhs()), to_core(f.rhs()));
    case LtlOp::Or:
      return F::negation(F::conjunction(F::negation(to_core(f.lhs())), F::negation(to_core(f.rhs()))));
    case LtlOp::Implies: return F::negation(F::conjunction(to_core(f.lhs()), F::negation(to_core(f.rhs()))));
    case LtlOp::Eventually: return F::until(F::truth(), to_core(f.lhs()));
    case LtlOp::Always: return F::negation(F::until(F::truth(), F::negation(to_core(f.lhs()))));
  }
  return f;
}

LtlFormula from_core(const LtlFormula& f) {
  using F = LtlFormula;
  switch (f.op()) {
    case LtlOp::True:
    case LtlOp::Atom: return f;
    case LtlOp::Next: return F::next(from_core(f.lhs()));
    case LtlOp::Until:
      if (f.lhs().op() == LtlOp::True) return F::eventually(from_core(f.rhs()));
      return F::until(from_core(f.lhs()), from_core(f.rhs()));
    case LtlOp::And: return F::conjunction(from_core(f.lhs()), from_core(f.rhs()));
    case LtlOp::Not: {
      const LtlFormula& inner = f.lhs();
      // !(true U !x) = G x
      if (inner.op() == LtlOp::Until && inner.lhs().op() == LtlOp::True && inner.rhs().op() == LtlOp::Not) {
        return F::always(from_core(inner.rhs().lhs()));
      }
      if (inner.op() == LtlOp::And && inner.rhs().op() == LtlOp::Not) {
        // !(!x & !y) = x | y, !(x & !y) = x -> y
        if (inner.lhs().op() == LtlOp::Not) {
          return F::disjunction(from_core(inner.lhs().lhs()), from_core(inner.rhs().lhs()));
        }
        return F::implication(from_core(inner.lhs()), from_core(inner.rhs().lhs()));
      }
      return F::negation(from_core(inner));
    }
    default: return from_core(to_core(f));
  }
}

bool is_core(const LtlFormula& f) {
  switch (f.op()) {
    case LtlOp::True:
    case LtlOp::Atom: return true;
    case LtlOp::Not:
    case LtlOp::Next: return is_core(f.lhs());
    case LtlOp::And:
    case LtlOp::Until: return is_core(f.lhs()) && is_core(f.rhs());
    default: return false;
  }
}

std::size_t depth(const LtlFormula& f) {
  if (f.op() == LtlOp::True || f.op() == LtlOp::Atom) return 0;
  std::size_t d = depth(f.lhs());
  if (f.is_binary()) d = std::max(d, depth(f.rhs()));
  return d + 1;
}

bool is_propositional(const LtlFormula& f) {
  switch (f.op()) {
    case LtlOp::True:
    case LtlOp::Atom: return true;
    case LtlOp::Not: return is_propositional(f.lhs());
    case LtlOp::And:
    case LtlOp::Or:
    case LtlOp::Implies: return is_propositional(f.lhs()) && is_propositional(f.rhs());
    default: return false;
  }
}

bool holds(const LtlFormula& f, Label label) {
  switch (f.op()) {
    case LtlOp::True: return true;
    case LtlOp::Atom: return (label >> f.atom_index()) & 1U;
    case LtlOp::Not: return !holds(f.lhs(), label);
    case LtlOp::And: return holds(f.lhs(), label) && holds(f.rhs(), label);
    case LtlOp::Or: return holds(f.lhs(), label) || holds(f.rhs(), label);
    case LtlOp::Implies: return !holds(f.lhs(), label) || holds(f.rhs(), label);
    default: throw std::invalid_argument("temporal operator in a propositional context: " + to_string(f));
  }
}

// ---------------------------------------------------------------------------
// Lasso evaluation

namespace {

class LassoEvaluator {
 public:
  explicit LassoEvaluator(const LassoWord& word) : word_(word), n_(word.positions()) {}

  const std::vector<char>& eval(const LtlFormula& f) {
    if (auto it = memo_.find(f.id()); it != memo_.end()) return it->second;
    std::vector<char> out(n_, 0);
    switch (f.op()) {
      case LtlOp::True: std::fill(out.begin(), out.end(), 1); break;
      case LtlOp::Atom:
        for (std::size_t i = 0; i < n_; ++i) out[i] = (word_.at(i) >> f.atom_index()) & 1U;
        break;
      case LtlOp::Not: {
        const auto& a = eval(f.lhs());
        for (std::size_t i = 0; i < n_; ++i) out[i] = !a[i];
        break;
      }
      case LtlOp::And:
      case LtlOp::Or:
      case LtlOp::Implies: {
        const auto a = eval(f.lhs());
        const auto& b = eval(f.rhs());
        for (std::size_t i = 0; i < n_; ++i) {
          out[i] = f.op() == LtlOp::And ? (a[i] && b[i]) : f.op() == LtlOp::Or ? (a[i] || b[i]) : (!a[i] || b[i]);
        }
        break;
      }
      case LtlOp::Next: {
        const auto& a = eval(f.lhs());
        for (std::size_t i = 0; i < n_; ++i) out[i] = a[word_.successor(i)];
        break;
      }
      case LtlOp::Until: {
        const auto a = eval(f.lhs());
        const auto& b = eval(f.rhs());
        propagate(out, false, [&](std::size_t i, bool next) { return b[i] || (a[i] && next); });
        break;
      }
      case LtlOp::Eventually: {
        const auto& a = eval(f.lhs());
        propagate(out, false, [&](std::size_t i, bool next) { return a[i] || next; });
        break;
      }
      case LtlOp::Always: {
        const auto& a = eval(f.lhs());
        propagate(out, true, [&](std::size_t i, bool next) { return a[i] && next; });
        break;
      }
    }
    return memo_.emplace(f.id(), std::move(out)).first->second;
  }

 private:
  // Fixpoint of out[i] = step(i, out[succ(i)]) starting from `seed`: two
  // backward passes over the cycle settle the wrap-around, then one pass over
  // the prefix.
  template <typename Step>
  void propagate(std::vector<char>& out, bool seed, Step step) const {
    const std::size_t p = word_.prefix.size();
    std::fill(out.begin(), out.end(), seed);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = n_; i-- > p;) out[i] = step(i, out[word_.successor(i)]);
    }
    for (std::size_t i = p; i-- > 0;) out[i] = step(i, out[i + 1]);
  }

  const LassoWord& word_;
  std::size_t n_;
  std::unordered_map<const void*, std::vector<char>> memo_;
};

}  // namespace

std::vector<bool> evaluate_positions(const LtlFormula& f, const LassoWord& word) {
  if (word.cycle.empty()) throw std::invalid_argument("lasso cycle must be nonempty");
  LassoEvaluator ev(word);
  const auto& v = ev.eval(f);
  return {v.begin(), v.end()};
}

bool check_lasso(const LtlFormula& f, const LassoWord& word) { return evaluate_positions(f, word).front(); }

}  // namespace ltlrl
