#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "af2/formula.hpp"

using namespace af2;

namespace {

Signature num_sig() {
    Signature s;
    s.funs = {{"s", 1}, {"0", 0}, {"add", 2}};
    s.preds = {{"N", 1}};
    return s;
}

EquationSystem add_eqs() {
    return {{parse_fo("add(0, y)"), parse_fo("y")},
            {parse_fo("add(s(x), y)"), parse_fo("s(add(x, y))")}};
}

}  // namespace

TEST_CASE("formula printing round-trips") {
    Signature sig = num_sig();
    for (const char* s :
         {"_|_", "N(0)", "!X. X -> X -> X", "!X/1. (!y. X(y) -> X(s(y))) -> X(0) -> X(s(0))",
          "(!X. X) -> !X. X", "!x. N(x) -> N(s(x))", "N(add(s(0), 0))"}) {
        FormulaPtr a = parse_formula_with(s, &sig);
        CHECK(formula_alpha_eq(parse_formula_with(print_formula(a), &sig), a));
    }
}

TEST_CASE("arrow associates to the right") {
    FormulaPtr a = parse_formula("!X. X -> X -> X");
    REQUIRE(a->kind == Formula::Kind::AllSo);
    const FormulaPtr& m = a->left;
    REQUIRE(m->kind == Formula::Kind::Arrow);
    CHECK(m->right->kind == Formula::Kind::Arrow);
}

TEST_CASE("bound second-order arity comes from use or annotation") {
    Signature sig = num_sig();
    FormulaPtr a = parse_formula_with("!X/1. X(0)", &sig);
    CHECK(a->arity == 1);
    FormulaPtr b = parse_formula_with("!X. X(0, s(0))", &sig);
    CHECK(b->arity == 2);
    CHECK_THROWS(parse_formula_with("!X/1. X(0) -> X(0, 0)", &sig));
}

TEST_CASE("parse errors") {
    CHECK_THROWS(parse_formula("!x A"));
    CHECK_THROWS(parse_formula("A ->"));
    Signature sig = num_sig();
    CHECK_THROWS(parse_formula_with("N(0, 0)", &sig));
}

TEST_CASE("alpha equivalence of formulas") {
    CHECK(formula_alpha_eq(parse_formula("!X. X -> X"), parse_formula("!Y. Y -> Y")));
    CHECK(formula_alpha_eq(parse_formula("!x. !y. P(x, y)"), parse_formula("!a. !b. P(a, b)")));
    CHECK_FALSE(formula_alpha_eq(parse_formula("!x. !y. P(x, y)"),
                                 parse_formula("!x. !y. P(y, x)")));
}

TEST_CASE("free variable computation") {
    Signature sig = num_sig();
    FormulaPtr a = parse_formula_with("!x. N(x) -> N(w)", &sig);
    CHECK(formula_free_fo(a) == std::set<std::string>{"w"});
    FormulaPtr b = parse_formula("!X. X -> Y");
    auto so = formula_free_so(b);
    REQUIRE(so.size() == 1);
    CHECK(so.count("Y") == 1);
}

TEST_CASE("first-order substitution avoids capture") {
    Signature sig = num_sig();
    FormulaPtr a = parse_formula_with("!y. N(y) -> N(w)", &sig);
    FormulaPtr b = subst_fo(a, {{"w", parse_fo("s(y)")}});
    // the binder must have been renamed away from y
    CHECK(formula_free_fo(b) == std::set<std::string>{"y"});
    CHECK(formula_alpha_eq(b, parse_formula_with("!z. N(z) -> N(s(y))", &sig)));
}

TEST_CASE("second-order substitution instantiates atoms") {
    Signature sig = num_sig();
    FormulaPtr a = parse_formula_with("X(0) -> X(s(0))", &sig);
    FormulaPtr g = parse_formula_with("N(s(p))", &sig);
    FormulaPtr b = subst_so(a, "X", {"p"}, g);
    CHECK(formula_alpha_eq(b, parse_formula_with("N(s(0)) -> N(s(s(0)))", &sig)));
    // arity mismatch is an error
    CHECK_THROWS(subst_so(parse_formula_with("X(0, 0)", &sig), "X", {"p"}, g));
}

TEST_CASE("quantifier wrap and strip") {
    Signature sig = num_sig();
    std::vector<VarSpec> xi = {{true, "X", 1}, {false, "y", 0}};
    FormulaPtr body = parse_formula_with("X(y)", &sig);
    FormulaPtr w = forall_wrap(xi, body);
    auto back = forall_strip(w, xi);
    REQUIRE(back);
    CHECK(formula_alpha_eq(*back, body));
    // stripping renames binders to the requested specs
    FormulaPtr other = parse_formula_with("!Z/1. !q. Z(q)", &sig);
    auto ren = forall_strip(other, xi);
    REQUIRE(ren);
    CHECK(formula_alpha_eq(*ren, body));
    CHECK_FALSE(forall_strip(body, xi).has_value());
}

TEST_CASE("particular cases match either orientation") {
    EquationSystem E = add_eqs();
    CHECK(match_particular_case(E, parse_fo("add(0, s(0))"), parse_fo("s(0)")).has_value());
    CHECK(match_particular_case(E, parse_fo("s(0)"), parse_fo("add(0, s(0))")).has_value());
    CHECK(match_particular_case(E, parse_fo("add(s(0), w)"), parse_fo("s(add(0, w))"))
              .has_value());
    CHECK_FALSE(match_particular_case(E, parse_fo("add(0, 0)"), parse_fo("s(0)")).has_value());
}

TEST_CASE("congruence decision by bounded rewriting") {
    EquationSystem E = add_eqs();
    CHECK(eq_congruent(E, parse_fo("add(s(0), 0)"), parse_fo("s(0)")) == Trivalent::Yes);
    CHECK(eq_congruent(E, parse_fo("add(s(0), s(0))"), parse_fo("s(s(0))")) == Trivalent::Yes);
    CHECK(eq_congruent(E, parse_fo("0"), parse_fo("0")) == Trivalent::Yes);
    CHECK(eq_congruent(E, parse_fo("s(0)"), parse_fo("0")) != Trivalent::Yes);
}

TEST_CASE("oriented rewriting reaches the canonical form") {
    EquationSystem E = add_eqs();
    CHECK(print_fo(rewrite_canonical(E, parse_fo("add(s(s(0)), s(0))"))) == "s(s(s(0)))");
    CHECK(print_fo(rewrite_canonical(E, parse_fo("add(0, add(0, w))"))) == "w");
}

TEST_CASE("equation formulas") {
    FormulaPtr f = equation_as_formula(parse_fo("add(0, y)"), parse_fo("y"));
    REQUIRE(f->kind == Formula::Kind::AllSo);
    CHECK(f->left->kind == Formula::Kind::Arrow);
}

TEST_CASE("validation enforces signature arities") {
    Signature sig = num_sig();
    CHECK_NOTHROW(validate_formula(sig, parse_formula_with("!x. N(s(x))", &sig)));
    CHECK_THROWS(validate_fo(sig, fo_app("s", {})));
    CHECK_THROWS(validate_fo(sig, fo_app("add", {fo_var("x")})));
}

TEST_CASE("combined substitution") {
    Signature sig = num_sig();
    Substitution sub;
    sub.fo["w"] = parse_fo("s(0)");
    sub.so["Y"] = {{}, parse_formula_with("N(0)", &sig)};
    FormulaPtr a = parse_formula_with("Y -> N(w)", &sig);
    CHECK(formula_alpha_eq(apply_subst(a, sub),
                           parse_formula_with("N(0) -> N(s(0))", &sig)));
}
