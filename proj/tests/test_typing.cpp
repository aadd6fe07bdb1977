#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "af2/typing.hpp"
#include "af2/workspace.hpp"
#include "helpers.hpp"

using namespace af2;

namespace {

FormulaPtr F(const char* s) {
    static Signature sig = [] {
        Signature x;
        x.funs = {{"s", 1}, {"0", 0}, {"add", 2}};
        x.preds = {{"N", 1}};
        return x;
    }();
    return parse_formula_with(s, &sig);
}

}  // namespace

TEST_CASE("system names round-trip") {
    for (System s : {System::AF2, System::AF2Sub, System::AF2S, System::AF2Eta}) {
        auto back = system_from_string(system_name(s));
        REQUIRE(back);
        CHECK(*back == s);
    }
    CHECK_FALSE(system_from_string("af3").has_value());
}

TEST_CASE("contexts") {
    Context c;
    c.binds = {{"x", F("N(0)")}, {"y", F("!X. X")}};
    CHECK(c.distinct_names());
    REQUIRE(c.lookup("x"));
    CHECK(formula_alpha_eq(*c.lookup("x"), F("N(0)")));
    CHECK(c.lookup("z") == nullptr);
    Context d = c.extended("x", F("N(s(0))"));
    CHECK(formula_alpha_eq(*d.lookup("x"), F("N(s(0))")));
    CHECK(d.binds.size() == 2);
    CHECK(c.without("x").binds.size() == 1);
    CHECK(c.var_free({true, "X", 0}) == false);  // X is bound in !X. X
}

TEST_CASE("all corpus derivations check in their declared systems") {
    for (auto& file : corpus_files()) {
        Workspace w = load_corpus_file(file);
        for (auto& d : w.derivations) {
            if (!d.deriv) continue;
            CAPTURE(file);
            CAPTURE(d.name);
            Verdict v = check_derivation(d.system, w.eqs, d.deriv, d.ctx, d.term, d.formula);
            CHECK_MESSAGE(v.ok, v.path, ": ", v.reason);
        }
    }
}

TEST_CASE("node kinds are policed per system") {
    EquationSystem E;
    Context empty;
    // an S-node is foreign to the base system
    DerivPtr s = dv_s2("x", dv_s1("x", {}, sp_ax()), sp_ax());
    CHECK(check_derivation(System::AF2S, E, s, empty, parse_term("\\x. x"),
                           F("N(0) -> N(0)")).ok);
    CHECK_FALSE(check_derivation(System::AF2, E, s, empty, parse_term("\\x. x"),
                                 F("N(0) -> N(0)")).ok);
    // subsumption is foreign to both the base and the compact system
    DerivPtr sub = dv_sub(sp_ax(), dv_r2("x", dv_r1("x")));
    CHECK(check_derivation(System::AF2Sub, E, sub, empty, parse_term("\\x. x"),
                           F("N(0) -> N(0)")).ok);
    CHECK_FALSE(check_derivation(System::AF2, E, sub, empty, parse_term("\\x. x"),
                                 F("N(0) -> N(0)")).ok);
    CHECK_FALSE(check_derivation(System::AF2S, E, sub, empty, parse_term("\\x. x"),
                                 F("N(0) -> N(0)")).ok);
}

TEST_CASE("generalization side conditions") {
    EquationSystem E;
    Context c;
    c.binds = {{"x", F("Y")}};
    DerivPtr d = dv_gen(VarSpec{true, "Y", 0}, dv_r1("x"));
    // Y free in the context blocks (!)-introduction
    CHECK_FALSE(check_derivation(System::AF2, E, d, c, parse_term("x"), F("!Y. Y")).ok);
    Context ok;
    ok.binds = {{"x", F("!Y. Y")}};
    DerivPtr fine = dv_gen(VarSpec{true, "Z", 0},
                           dv_r7(F("!Y. Y"), {}, F("Z"), dv_r1("x")));
    CHECK(check_derivation(System::AF2, E, fine, ok, parse_term("x"), F("!Z. Z")).ok);
}

TEST_CASE("instantiation rules") {
    EquationSystem E;
    Context c;
    c.binds = {{"x", F("!y. N(y)")}};
    DerivPtr d = dv_r5(F("!y. N(y)"), parse_fo("s(0)"), dv_r1("x"));
    CHECK(check_derivation(System::AF2, E, d, c, parse_term("x"), F("N(s(0))")).ok);
    CHECK_FALSE(check_derivation(System::AF2, E, d, c, parse_term("x"), F("N(0)")).ok);
}

TEST_CASE("equational typing rule") {
    EquationSystem E = {{parse_fo("add(0, y)"), parse_fo("y")}};
    Context c;
    c.binds = {{"x", F("N(0)")}};
    DerivPtr d = dv_r8(F("N(hole)"), "hole", parse_fo("0"), parse_fo("add(0, 0)"), false,
                       dv_r1("x"));
    CHECK(check_derivation(System::AF2, E, d, c, parse_term("x"), F("N(add(0, 0))")).ok);
    // without the equation the step is unjustified
    CHECK_FALSE(check_derivation(System::AF2, EquationSystem{}, d, c, parse_term("x"),
                                 F("N(add(0, 0))")).ok);
}

TEST_CASE("eta steps only in the eta system") {
    Workspace w = load_corpus_file("paradigm.af2");
    const NamedDerivation* d = w.derivation("id_af2eta");
    REQUIRE(d);
    CHECK(check_derivation(System::AF2Eta, w.eqs, d->deriv, d->ctx, d->term, d->formula).ok);
    CHECK_FALSE(check_derivation(System::AF2, w.eqs, d->deriv, d->ctx, d->term, d->formula).ok);
}

TEST_CASE("wrong subjects and wrong types are rejected") {
    Workspace w = load_corpus_file("church.af2");
    const NamedDerivation* d = w.derivation("church2");
    REQUIRE(d);
    CHECK_FALSE(check_derivation(d->system, w.eqs, d->deriv, d->ctx,
                                 parse_term("\\f. \\x. f x"), d->formula).ok);
    CHECK_FALSE(check_derivation(d->system, w.eqs, d->deriv, d->ctx, d->term,
                                 *w.formula("Nat3")).ok);
}

TEST_CASE("derivation skeletons are preorder labels") {
    DerivPtr d = dv_r2("x", dv_r1("x"));
    auto sk = derivation_skeleton(d);
    REQUIRE(sk.size() == 2);
    CHECK(sk[0] != sk[1]);
}

TEST_CASE("generation data for the compact systems") {
    Workspace w = load_corpus_file("paradigm.af2");
    const NamedDerivation* d = w.derivation("id_af2s");
    REQUIRE(d);
    GenerationData g = invert(w.eqs, d->deriv, d->ctx, d->term, d->formula);
    CHECK(g.kind == GenerationData::Case::Abs);
    REQUIRE(g.at_arrow);
    // the body derivation lives at the arrow instance of the conclusion
    Context inner = d->ctx.extended("x", d->formula->left);
    Verdict v = check_derivation(System::AF2S, w.eqs, g.at_arrow, inner,
                                 parse_term("x"), d->formula->right);
    CHECK_MESSAGE(v.ok, v.path, ": ", v.reason);
}
