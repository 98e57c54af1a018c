#include "sectionview/formula.h"

#include <algorithm>
#include <cctype>

#include "sectionview/errors.h"

namespace sectionview {

std::vector<std::string> term_vars(const Term& t) {
  if (const auto* m = std::get_if<MainTerm>(&t)) return {m->var};
  if (const auto* i = std::get_if<InteractionTerm>(&t)) return {i->a, i->b};
  return {std::get<PowerTerm>(t).var};
}

std::string render(const Term& t) {
  if (const auto* m = std::get_if<MainTerm>(&t)) return m->var;
  if (const auto* i = std::get_if<InteractionTerm>(&t)) return i->a + ":" + i->b;
  const auto& p = std::get<PowerTerm>(t);
  return "I(" + p.var + "^" + std::to_string(p.exponent) + ")";
}

bool same_term(const Term& x, const Term& y) {
  const auto* ix = std::get_if<InteractionTerm>(&x);
  const auto* iy = std::get_if<InteractionTerm>(&y);
  if (ix && iy) {
    return (ix->a == iy->a && ix->b == iy->b) ||
           (ix->a == iy->b && ix->b == iy->a);
  }
  return x == y;
}

std::vector<std::string> FormulaSpec::predictors() const {
  std::vector<std::string> out;
  for (const auto& t : terms) {
    for (auto& v : term_vars(t)) {
      if (std::find(out.begin(), out.end(), v) == out.end()) {
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  FormulaSpec parse() {
    FormulaSpec f;
    skip_space();
    const std::size_t response_at = pos_;
    f.response = name("response name");
    if (f.response == ".") throw FormulaError(response_at, "'.' cannot be the response");
    expect('~');
    do {
      parse_term(f);
    } while (accept('+'));
    skip_space();
    if (pos_ != text_.size()) {
      throw FormulaError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    }
    return f;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw FormulaError(pos_, std::string("expected '") + c + "'");
    }
  }

  std::string name(const char* what) {
    skip_space();
    if (pos_ >= text_.size() || !is_name_start(text_[pos_])) {
      throw FormulaError(pos_, std::string("expected ") + what);
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void add(FormulaSpec& f, Term t, std::size_t at) {
    for (const auto& v : term_vars(t)) {
      if (v == f.response) {
        throw FormulaError(at, "response '" + v + "' used as a predictor");
      }
    }
    for (const auto& existing : f.terms) {
      if (same_term(existing, t)) return;
    }
    f.terms.push_back(std::move(t));
  }

  void parse_term(FormulaSpec& f) {
    skip_space();
    const std::size_t at = pos_;
    const std::string first = name("term");
    if (first == ".") {
      f.dot = true;
      return;
    }
    if (first == "I") {
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        parse_power(f, at);
        return;
      }
    }
    if (accept(':')) {
      const std::string second = interaction_operand();
      if (second == first) {
        add(f, MainTerm{first}, at);
      } else {
        add(f, InteractionTerm{first, second}, at);
      }
      return;
    }
    if (accept('*')) {
      const std::string second = interaction_operand();
      add(f, MainTerm{first}, at);
      add(f, MainTerm{second}, at);
      if (second != first) add(f, InteractionTerm{first, second}, at);
      return;
    }
    add(f, MainTerm{first}, at);
  }

  std::string interaction_operand() {
    skip_space();
    const std::size_t at = pos_;
    std::string n = name("variable name");
    if (n == ".") throw FormulaError(at, "'.' cannot appear in an interaction");
    return n;
  }

  void parse_power(FormulaSpec& f, std::size_t at) {
    expect('(');
    skip_space();
    const std::size_t var_at = pos_;
    const std::string var = name("variable name");
    if (var == ".") throw FormulaError(var_at, "'.' cannot be raised to a power");
    expect('^');
    skip_space();
    const std::size_t digits_at = pos_;
    long exponent = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      exponent = exponent * 10 + (text_[pos_] - '0');
      if (exponent > 64) throw FormulaError(digits_at, "exponent too large");
      ++pos_;
    }
    if (pos_ == digits_at) throw FormulaError(digits_at, "expected integer exponent");
    if (exponent < 1) throw FormulaError(digits_at, "exponent must be positive");
    expect(')');
    if (exponent == 1) {
      add(f, MainTerm{var}, at);
    } else {
      add(f, PowerTerm{var, static_cast<int>(exponent)}, at);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaSpec parse_formula(std::string_view text) {
  return FormulaParser(text).parse();
}

std::string render(const FormulaSpec& f) {
  std::string out = f.response + " ~ ";
  bool first = true;
  for (const auto& t : f.terms) {
    if (!first) out += " + ";
    out += render(t);
    first = false;
  }
  if (f.dot) out += first ? "." : " + .";
  return out;
}

FormulaSpec expand_dot(const FormulaSpec& f, const Dataset& d) {
  d.column(f.response);
  for (const auto& t : f.terms) {
    for (const auto& v : term_vars(t)) d.column(v);
  }
  if (!f.dot) return f;
  FormulaSpec out = f;
  out.dot = false;
  for (const auto& name : d.names()) {
    if (name == f.response) continue;
    const Term main = MainTerm{name};
    if (std::none_of(out.terms.begin(), out.terms.end(),
                     [&](const Term& t) { return same_term(t, main); })) {
      out.terms.push_back(main);
    }
  }
  return out;
}

}  // namespace sectionview
