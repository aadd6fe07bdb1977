#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "af2/semantics.hpp"
#include "af2/workspace.hpp"
#include "helpers.hpp"

using namespace af2;

namespace {

// membership by beta-normalizing and comparing against a closed normal form
std::function<MembershipVerdict(const TermPtr&)> equals_normal(const TermPtr& nf) {
    return [nf](const TermPtr& t) {
        ReductionResult r = reduce(t, Strategy::BetaNormalOrder, 2000);
        if (r.status != ReductionStatus::NormalForm) return MembershipVerdict::Unknown;
        return alpha_eq(r.result, nf) ? MembershipVerdict::In : MembershipVerdict::Out;
    };
}

SemanticSet singleton(const char* s) {
    TermPtr nf = parse_term(s);
    return make_set_with_probes(std::string("{") + s + "}", equals_normal(nf), {nf});
}

}  // namespace

TEST_CASE("arrow sets probe the domain") {
    SemanticSet idset = singleton("\\x. x");
    SemanticSet f = arrow_set(idset, idset);
    CHECK(f.oracle(parse_term("\\x. x")) == MembershipVerdict::In);
    CHECK(f.oracle(parse_term("\\g. g (\\x. x)")) == MembershipVerdict::In);
    CHECK(f.oracle(parse_term("\\g. \\x. \\y. x")) == MembershipVerdict::Out);
    // with no probes at all, the arrow set cannot confirm membership
    SemanticSet empty_dom = make_set_with_probes(
        "empty", [](const TermPtr&) { return MembershipVerdict::Out; }, {});
    SemanticSet g = arrow_set(empty_dom, idset);
    CHECK(g.oracle(parse_term("\\x. x")) == MembershipVerdict::Unknown);
}

TEST_CASE("intersections combine verdicts pointwise") {
    SemanticSet a = singleton("\\x. x");
    SemanticSet b = singleton("\\x. \\y. x");
    SemanticSet both = intersect_sets("a&b", {a, b});
    CHECK(both.oracle(parse_term("\\x. x")) == MembershipVerdict::Out);
    SemanticSet same = intersect_sets("a&a", {a, a});
    CHECK(same.oracle(parse_term("\\x. x")) == MembershipVerdict::In);
    SemanticSet unknown = make_set_with_probes(
        "?", [](const TermPtr&) { return MembershipVerdict::Unknown; }, {});
    CHECK(intersect_sets("a&?", {a, unknown}).oracle(parse_term("\\x. x")) ==
          MembershipVerdict::Unknown);
}

TEST_CASE("membership is stable under weak-head expansion") {
    SemanticSet idset = singleton("\\x. x");
    // (\z. z) (\x. x) weak-head-reduces into the member
    CHECK(idset.oracle(parse_term("(\\z. z) (\\x. x)")) == MembershipVerdict::In);
    CHECK(idset.oracle(parse_term("(\\a. \\b. b) (\\w. w w) (\\x. x)")) ==
          MembershipVerdict::In);
}

TEST_CASE("oracle results are cached per set") {
    int calls = 0;
    SemanticSet s = make_set_with_probes(
        "counting",
        [&calls](const TermPtr&) {
            ++calls;
            return MembershipVerdict::In;
        },
        {});
    TermPtr t = parse_term("\\x. x");
    s.oracle(t);
    s.oracle(t);
    CHECK(calls == 1);
    s.oracle(parse_term("\\y. y"));  // distinct key
    CHECK(calls == 2);
}

TEST_CASE("hand-built models satisfy the addition equations") {
    EquationSystem E = {{parse_fo("add(0, y)"), parse_fo("y")},
                        {parse_fo("add(s(x), y)"), parse_fo("s(add(x, y))")}};
    SemanticSet any = make_set_with_probes(
        "any", [](const TermPtr&) { return MembershipVerdict::In; }, {parse_term("\\x. x")});

    Model one;
    one.domain = {"e"};
    one.fun = [](const std::string&, const std::vector<std::string>&) { return std::string("e"); };
    one.pred = [&](const std::string&, const std::vector<std::string>&) { return any; };
    CHECK(model_satisfies(one, E));

    Model z2;
    z2.domain = {"e0", "e1"};
    z2.fun = [](const std::string& f, const std::vector<std::string>& a) -> std::string {
        if (f == "0") return "e0";
        if (f == "s") return a[0] == "e0" ? "e1" : "e0";
        // add = xor
        return a[0] == a[1] ? "e0" : "e1";
    };
    z2.pred = [&](const std::string&, const std::vector<std::string>&) { return any; };
    CHECK(model_satisfies(z2, E));

    Model broken = z2;
    broken.fun = [](const std::string& f, const std::vector<std::string>& a) -> std::string {
        if (f == "0") return "e0";
        if (f == "s") return a[0] == "e0" ? "e1" : "e0";
        return "e0";  // add collapses, violating add(0, e1) = e1
    };
    CHECK_FALSE(model_satisfies(broken, E));
}

TEST_CASE("the term model materializes its context and domain") {
    Workspace w = load_corpus_file("church.af2");
    SyntacticModelConfig cfg;
    cfg.E = w.eqs;
    cfg.sig = w.sig;
    FormulaPtr neg = parse_formula("(!X. X -> X -> X) -> _|_");
    cfg.neg_types = {neg};
    cfg.context_size = 3;
    SyntacticModel m = syntactic_model(cfg);
    CHECK(m.gamma.binds.size() == 3);
    for (auto& b : m.gamma.binds) CHECK(formula_alpha_eq(b.type, neg));
    CHECK_FALSE(m.model.domain.empty());
    // the domain is closed under nothing but contains the canonical constants
    CHECK(std::find(m.model.domain.begin(), m.model.domain.end(), "0") !=
          m.model.domain.end());
    CHECK_FALSE(m.model.probe_pool.empty());
}

TEST_CASE("checked judgments evaluate inside their interpretation") {
    Workspace w = load_corpus_file("paradigm.af2");
    const NamedDerivation* d = w.derivation("redex_id");
    REQUIRE(d);
    SyntacticModelConfig cfg;
    cfg.E = w.eqs;
    cfg.sig = w.sig;
    cfg.sig.funs["0"] = 0;  // the workspace signature has no constants of its own
    cfg.sig.svars["G"] = 0;
    cfg.neg_types = {f_var2("G", 0, {})};
    SyntacticModel m = syntactic_model(cfg);
    AdequacyReport rep = check_adequacy(w.eqs, d->deriv, d->ctx, d->term, d->formula, d->term,
                                        m.model, m.interp, {});
    CHECK(rep.verdict == MembershipVerdict::In);

    // a higher type needs witnesses for its arrow domain in the probe pool
    const NamedDerivation* pair = w.derivation("id_af2s");
    REQUIRE(pair);
    AdequacyReport starved = check_adequacy(w.eqs, pair->deriv, pair->ctx, pair->term,
                                            pair->formula, pair->term, m.model, m.interp, {});
    CHECK(starved.verdict == MembershipVerdict::Unknown);
    SyntacticModelConfig cfg2 = cfg;
    cfg2.extra_probes = {parse_term("\\x. \\y. x"), parse_term("\\x. x")};
    SyntacticModel m2 = syntactic_model(cfg2);
    AdequacyReport fed = check_adequacy(w.eqs, pair->deriv, pair->ctx, pair->term,
                                        pair->formula, pair->term, m2.model, m2.interp, {});
    CHECK(fed.verdict == MembershipVerdict::In);
}

TEST_CASE("closed normal term enumeration") {
    auto small = enumerate_normal_closed(5);
    CHECK(small.size() == 17);
    auto larger = enumerate_normal_closed(7);
    CHECK(larger.size() == 114);
    for (auto& t : larger) {
        CHECK(free_vars(t).empty());
        CHECK(is_beta_normal(t));
        CHECK(term_size(t) <= 7);
    }
}

TEST_CASE("typability and semantics agree on the small complete types") {
    SyntacticModelConfig cfg;
    cfg.sig.funs = {{"s", 1}, {"0", 0}};

    FormulaPtr id_ty = parse_formula("!X. X -> X");
    CompletenessReport id_rep = completeness_experiment(id_ty, 5, cfg);
    CHECK(id_rep.rows.size() == 17);
    CHECK(id_rep.agreements == 17);
    CHECK(id_rep.unknowns == 0);
    CHECK_FALSE(id_rep.hard_failure);
    std::vector<TermPtr> in;
    for (auto& r : id_rep.rows)
        if (r.typable == MembershipVerdict::In) in.push_back(r.term);
    REQUIRE(in.size() == 1);
    CHECK(alpha_eq(in[0], parse_term("\\x. x")));

    FormulaPtr bool_ty = parse_formula("!X. X -> X -> X");
    CompletenessReport bool_rep = completeness_experiment(bool_ty, 7, cfg);
    CHECK(bool_rep.rows.size() == 114);
    CHECK(bool_rep.agreements == 114);
    CHECK(bool_rep.unknowns == 0);
    std::vector<TermPtr> members;
    for (auto& r : bool_rep.rows)
        if (r.sem == MembershipVerdict::In) members.push_back(r.term);
    REQUIRE(members.size() == 2);
    auto has = [&](const char* s) {
        TermPtr t = parse_term(s);
        return std::any_of(members.begin(), members.end(),
                           [&](const TermPtr& m) { return alpha_eq(m, t); });
    };
    CHECK(has("\\x. \\y. x"));
    CHECK(has("\\x. \\y. y"));

    // the report renders one line per term plus the summary
    std::string text = bool_rep.render();
    CHECK(text.find("AGREEMENT 114/114") != std::string::npos);
    CHECK(text.find("UNKNOWN 0") != std::string::npos);
}
