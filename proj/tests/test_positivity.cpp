#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "af2/positivity.hpp"

using namespace af2;

namespace {

Signature num_sig() {
    Signature s;
    s.funs = {{"s", 1}, {"0", 0}};
    s.preds = {{"N", 1}, {"P", 0}};
    return s;
}

FormulaPtr F(const char* s) {
    static Signature sig = num_sig();
    return parse_formula_with(s, &sig);
}

// independent recursive oracle, written directly from the defining clauses
std::pair<bool, bool> oracle(const FormulaPtr& a) {
    switch (a->kind) {
        case Formula::Kind::Absurd:
        case Formula::Kind::Pred:
        case Formula::Kind::Var2:
            return {true, true};
        case Formula::Kind::Arrow: {
            auto l = oracle(a->left);
            auto r = oracle(a->right);
            return {l.second && r.first, l.first && r.second};
        }
        case Formula::Kind::AllFo: {
            return oracle(a->left);
        }
        case Formula::Kind::AllSo: {
            auto b = oracle(a->left);
            return {b.first, false};
        }
    }
    return {false, false};
}

FormulaPtr random_formula(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
    switch (pick(rng)) {
        case 0:
            return f_absurd();
        case 1: {
            std::uniform_int_distribution<int> which(0, 2);
            switch (which(rng)) {
                case 0: return F("P");
                case 1: return F("N(0)");
                default: return f_var2("X", 0, {});
            }
        }
        case 2:
            return f_arrow(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
        case 3:
            return f_all_fo("y", random_formula(rng, depth - 1));
        default:
            return f_all_so("X", 0, random_formula(rng, depth - 1));
    }
}

}  // namespace

TEST_CASE("hand-labeled polarity table") {
    struct Row {
        const char* text;
        bool pos, neg;
    };
    const Row rows[] = {
        {"P", true, true},
        {"_|_", true, true},
        {"N(0)", true, true},
        {"P -> P", true, true},
        {"!y. N(y)", true, true},
        {"!y. N(y) -> N(s(y))", true, true},
        {"!X. X", true, false},
        {"!X. X -> X", true, false},
        {"!X. X -> X -> X", true, false},
        {"(!X. X) -> P", false, true},
        {"(!X. X -> X) -> P", false, true},
        {"P -> !X. X", true, false},
        {"((!X. X) -> P) -> P", true, false},
        {"(((!X. X) -> P) -> P) -> P", false, true},
        {"!y. (!X. X) -> N(y)", false, true},
        {"!X/1. (!y. X(y) -> X(s(y))) -> X(0) -> X(0)", true, false},
        {"(!X/1. (!y. X(y) -> X(s(y))) -> X(0) -> X(0)) -> P", false, true},
        {"!X. (X -> P) -> X", true, false},
        {"!y. !X. N(y) -> X", true, false},
        {"(P -> !X. X) -> _|_", false, true},
    };
    for (auto& r : rows) {
        CAPTURE(r.text);
        Polarity p = classify(F(r.text));
        CHECK(p.positive == r.pos);
        CHECK(p.negative == r.neg);
    }
}

TEST_CASE("classification agrees with an independent oracle on random formulas") {
    std::mt19937 rng(20240817);
    for (int i = 0; i < 200; ++i) {
        FormulaPtr a = random_formula(rng, 5);
        CAPTURE(print_formula(a));
        Polarity p = classify(a);
        auto [pos, neg] = oracle(a);
        CHECK(p.positive == pos);
        CHECK(p.negative == neg);
    }
}

TEST_CASE("quantified variables do not change their binder's effect") {
    // the second-order quantifier erases negativity even when the variable is unused
    Polarity p = classify(F("!X. P"));
    CHECK(p.positive);
    CHECK_FALSE(p.negative);
    // the first-order quantifier is transparent
    Polarity q = classify(F("!y. (!X. X) -> P"));
    CHECK_FALSE(q.positive);
    CHECK(q.negative);
}
