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

TEST_CASE("search rediscovers every normal corpus judgment") {
    for (auto& file : corpus_files()) {
        Workspace w = load_corpus_file(file);
        for (auto& d : w.derivations) {
            if (!d.deriv || !is_beta_normal(d.term)) continue;
            CAPTURE(file);
            CAPTURE(d.name);
            auto r = search_typing(d.system, w.eqs, d.ctx, d.term, d.formula);
            REQUIRE(r.deriv.has_value());
            Verdict v = check_derivation(d.system, w.eqs, *r.deriv, d.ctx, d.term, d.formula);
            CHECK_MESSAGE(v.ok, v.path, ": ", v.reason);
        }
    }
}

TEST_CASE("compact rules type a judgment the base rules provably miss") {
    EquationSystem E;
    Context empty;
    TermPtr id = parse_term("\\x. x");
    FormulaPtr goal = parse_formula("(!X. X -> X -> X) -> (!X. X) -> !X. X -> X");
    auto base = search_typing(System::AF2, E, empty, id, goal);
    CHECK_FALSE(base.deriv.has_value());
    CHECK(base.saturated);  // a genuine miss, not a budget artifact
    auto compact = search_typing(System::AF2S, E, empty, id, goal);
    REQUIRE(compact.deriv.has_value());
    CHECK(check_derivation(System::AF2S, E, *compact.deriv, empty, id, goal).ok);
}

TEST_CASE("eta system search can fall back on base derivations") {
    EquationSystem E;
    Context empty;
    auto r = search_typing(System::AF2Eta, E, empty, parse_term("\\x. \\y. x"),
                           parse_formula("!X. X -> X -> X"));
    REQUIRE(r.deriv.has_value());
    CHECK(check_derivation(System::AF2Eta, E, *r.deriv, empty, parse_term("\\x. \\y. x"),
                           parse_formula("!X. X -> X -> X")).ok);
}

TEST_CASE("equational reasoning inside search") {
    EquationSystem E = {{parse_fo("add(0, y)"), parse_fo("y")},
                        {parse_fo("add(s(x), y)"), parse_fo("s(add(x, y))")}};
    Context c;
    c.binds = {{"n", F("N(s(0))")}};
    auto r = search_typing(System::AF2, E, c, parse_term("n"), F("N(add(0, s(0)))"));
    REQUIRE(r.deriv.has_value());
    CHECK(check_derivation(System::AF2, E, *r.deriv, c, parse_term("n"),
                           F("N(add(0, s(0)))")).ok);
}

TEST_CASE("church numerals are found at their numeral types") {
    Workspace w = load_corpus_file("church.af2");
    for (const char* name : {"church0", "church1", "church2"}) {
        const NamedDerivation* d = w.derivation(name);
        REQUIRE(d);
        CAPTURE(name);
        auto r = search_typing(System::AF2S, w.eqs, d->ctx, d->term, d->formula);
        REQUIRE(r.deriv.has_value());
        CHECK(check_derivation(System::AF2S, w.eqs, *r.deriv, d->ctx, d->term, d->formula).ok);
    }
}

TEST_CASE("misses at starved limits are not reported as exhaustive") {
    EquationSystem E;
    Context empty;
    TypingSearchLimits tiny;
    tiny.depth = 1;
    tiny.subtype_depth = 1;
    auto r = search_typing(System::AF2S, E, empty, parse_term("\\f. \\x. f (f x)"),
                           parse_formula("!X. (X -> X) -> X -> X"), tiny);
    CHECK_FALSE(r.deriv.has_value());
    CHECK_FALSE(r.saturated);
}

TEST_CASE("non-theorems are rejected exhaustively") {
    EquationSystem E;
    Context empty;
    auto r = search_typing(System::AF2S, E, empty, parse_term("\\x. x"),
                           parse_formula("!X. !Y. X -> Y"));
    CHECK_FALSE(r.deriv.has_value());
    CHECK(r.saturated);
}

TEST_CASE("search demands a beta-normal subject") {
    EquationSystem E;
    Context empty;
    CHECK_THROWS_AS(search_typing(System::AF2S, E, empty, parse_term("(\\x. x) (\\y. y)"),
                                  parse_formula("!X. X -> X")),
                    std::runtime_error);
}

TEST_CASE("extra bases extend the instantiation space") {
    EquationSystem E;
    Context c;
    c.binds = {{"n", F("!x. N(x)")}};
    TypingSearchLimits lim;
    lim.term_basis = {parse_fo("s(s(s(0)))")};
    auto r = search_typing(System::AF2, E, c, parse_term("n"), F("N(s(s(s(0))))"), lim);
    REQUIRE(r.deriv.has_value());
    CHECK(check_derivation(System::AF2, E, *r.deriv, c, parse_term("n"),
                           F("N(s(s(s(0))))")).ok);
}
