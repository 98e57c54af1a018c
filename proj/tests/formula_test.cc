#include <doctest.h>

#include "sectionview/errors.h"
#include "sectionview/formula.h"
#include "support.h"

using namespace sectionview;

TEST_CASE("main effects") {
  const auto f = parse_formula("y ~ x1 + x2");
  CHECK(f.response == "y");
  CHECK(f.terms == std::vector<Term>{MainTerm{"x1"}, MainTerm{"x2"}});
  CHECK_FALSE(f.dot);
  CHECK(f.predictors() == std::vector<std::string>{"x1", "x2"});
}

TEST_CASE("star expands to main effects plus interaction") {
  const auto f = parse_formula("y ~ x1*x2");
  CHECK(f.terms ==
        std::vector<Term>{MainTerm{"x1"}, MainTerm{"x2"}, InteractionTerm{"x1", "x2"}});
}

TEST_CASE("colon is the interaction alone") {
  const auto f = parse_formula("y~a:b");
  CHECK(f.terms == std::vector<Term>{InteractionTerm{"a", "b"}});
  CHECK(f.predictors() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("powers") {
  CHECK(parse_formula("y ~ x1 + I(x1^2)").terms ==
        std::vector<Term>{MainTerm{"x1"}, PowerTerm{"x1", 2}});
  CHECK(parse_formula("y ~ I( x ^ 3 )").terms == std::vector<Term>{PowerTerm{"x", 3}});
  CHECK(parse_formula("y ~ I(x^1)").terms == std::vector<Term>{MainTerm{"x"}});
}

TEST_CASE("duplicates collapse") {
  CHECK(parse_formula("y ~ a + a + b:a + a:b").terms ==
        std::vector<Term>{MainTerm{"a"}, InteractionTerm{"b", "a"}});
  CHECK(parse_formula("y ~ a*b + a").terms.size() == 3);
  CHECK(parse_formula("y ~ a:a").terms == std::vector<Term>{MainTerm{"a"}});
  CHECK(same_term(InteractionTerm{"a", "b"}, InteractionTerm{"b", "a"}));
}

TEST_CASE("syntax errors carry the byte offset") {
  const auto offset_of = [](std::string_view text) -> std::size_t {
    try {
      parse_formula(text);
    } catch (const FormulaError& e) {
      return e.offset();
    }
    return std::string::npos;
  };
  CHECK(offset_of("y x") == 2);
  CHECK(offset_of("y ~ ") == 4);
  CHECK(offset_of("y ~ a +") == 7);
  CHECK(offset_of("y ~ a $ b") == 6);
  CHECK(offset_of("y ~ I(x^0)") == 8);
  CHECK(offset_of("~ a") == 0);
  CHECK(offset_of("y ~ y + a") != std::string::npos);
  CHECK(offset_of("y ~ a:b:c") != std::string::npos);
}

TEST_CASE("render round trip") {
  for (const char* text : {"y ~ x1 + x2", "y ~ a*b", "y ~ a:b + I(c^3)", "fev ~ .",
                           "y ~ . + I(age^2)"}) {
    const auto once = parse_formula(text);
    const auto twice = parse_formula(render(once));
    CHECK(once == twice);
    CHECK(render(once) == render(twice));
  }
}

TEST_CASE("dot expands to every other column") {
  const Dataset d({support::cont("fev", {1, 2}), support::cont("age", {3, 4}),
                   support::cat("smoke", {"no", "yes"}), support::cont("ht", {5, 6})});
  const auto f = expand_dot(parse_formula("fev ~ ."), d);
  CHECK_FALSE(f.dot);
  CHECK(f.terms ==
        std::vector<Term>{MainTerm{"age"}, MainTerm{"smoke"}, MainTerm{"ht"}});
  const auto g = expand_dot(parse_formula("fev ~ ht + ."), d);
  CHECK(g.predictors() == std::vector<std::string>{"ht", "age", "smoke"});
  CHECK_THROWS_AS(expand_dot(parse_formula("fev ~ nope"), d), UnknownVariable);
  CHECK_THROWS_AS(expand_dot(parse_formula("nope ~ age"), d), UnknownVariable);
}
