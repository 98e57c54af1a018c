#ifndef SECTIONVIEW_FORMULA_H_
#define SECTIONVIEW_FORMULA_H_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sectionview/dataset.h"

namespace sectionview {

struct MainTerm {
  std::string var;
  bool operator==(const MainTerm&) const = default;
};

// Product of two distinct variables; stored in the order written.
struct InteractionTerm {
  std::string a, b;
  bool operator==(const InteractionTerm&) const = default;
};

// var^exponent with exponent >= 2.
struct PowerTerm {
  std::string var;
  int exponent = 2;
  bool operator==(const PowerTerm&) const = default;
};

using Term = std::variant<MainTerm, InteractionTerm, PowerTerm>;

// Variables a term reads.
std::vector<std::string> term_vars(const Term& t);
std::string render(const Term& t);
// Interaction terms compare equal regardless of operand order.
bool same_term(const Term& x, const Term& y);

struct FormulaSpec {
  std::string response;
  std::vector<Term> terms;
  // True when the right-hand side contained `.`; see expand_dot().
  bool dot = false;

  // Distinct predictor variables in first-use order.
  std::vector<std::string> predictors() const;
  bool operator==(const FormulaSpec&) const = default;
};

// Grammar:
//   formula := name "~" term ("+" term)*
//   term    := "." | name | name ":" name | name "*" name | "I(" name "^" int ")"
// a*b expands to a + b + a:b, I(x^1) to x, and repeated terms collapse.
// Throws FormulaError carrying the byte offset of the problem.
FormulaSpec parse_formula(std::string_view text);

std::string render(const FormulaSpec& f);

// Replaces `.` with a main effect for every dataset column other than the
// response, in column order, skipping columns already present as main
// effects. Throws UnknownVariable for variables absent from `d`.
FormulaSpec expand_dot(const FormulaSpec& f, const Dataset& d);

}  // namespace sectionview

#endif  // SECTIONVIEW_FORMULA_H_
