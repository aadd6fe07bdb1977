#include "af2/typing.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace af2 {

std::optional<System> system_from_string(const std::string& s) {
    if (s == "af2") return System::AF2;
    if (s == "af2sub" || s == "af2-sub") return System::AF2Sub;
    if (s == "af2s") return System::AF2S;
    if (s == "af2eta" || s == "af2-eta") return System::AF2Eta;
    return std::nullopt;
}

std::string system_name(System s) {
    switch (s) {
        case System::AF2: return "af2";
        case System::AF2Sub: return "af2sub";
        case System::AF2S: return "af2s";
        case System::AF2Eta: return "af2eta";
    }
    return "?";
}

// ---- context ---------------------------------------------------------------

const FormulaPtr* Context::lookup(const std::string& x) const {
    for (auto it = binds.rbegin(); it != binds.rend(); ++it)
        if (it->name == x) return &it->type;
    return nullptr;
}

bool Context::distinct_names() const {
    std::set<std::string> seen;
    for (auto& b : binds)
        if (!seen.insert(b.name).second) return false;
    return true;
}

Context Context::extended(std::string x, FormulaPtr a) const {
    Context out = without(x);
    out.binds.push_back({std::move(x), std::move(a)});
    return out;
}

Context Context::without(const std::string& x) const {
    Context out;
    for (auto& b : binds)
        if (b.name != x) out.binds.push_back(b);
    return out;
}

bool Context::var_free(const VarSpec& v) const {
    for (auto& b : binds)
        if (varspec_free_in(v, b.type)) return true;
    return false;
}

std::set<std::string> Context::free_fo() const {
    std::set<std::string> out;
    for (auto& b : binds) {
        auto s = formula_free_fo(b.type);
        out.insert(s.begin(), s.end());
    }
    return out;
}

std::map<std::string, int> Context::free_so() const {
    std::map<std::string, int> out;
    for (auto& b : binds)
        for (auto& [k, a] : formula_free_so(b.type)) out[k] = a;
    return out;
}

// ---- constructors ----------------------------------------------------------

static std::shared_ptr<Derivation> mk(Derivation::Kind k) {
    auto d = std::make_shared<Derivation>();
    d->kind = k;
    return d;
}

DerivPtr dv_r1(std::string x) {
    auto d = mk(Derivation::Kind::R1);
    d->name = std::move(x);
    return d;
}
DerivPtr dv_r2(std::string binder, DerivPtr body) {
    auto d = mk(Derivation::Kind::R2);
    d->name = std::move(binder);
    d->d1 = std::move(body);
    return d;
}
DerivPtr dv_r3(FormulaPtr arg_type, DerivPtr fun, DerivPtr arg) {
    auto d = mk(Derivation::Kind::R3);
    d->prem = std::move(arg_type);
    d->d1 = std::move(fun);
    d->d2 = std::move(arg);
    return d;
}
DerivPtr dv_gen(VarSpec v, DerivPtr child) {
    auto d = mk(v.second_order ? Derivation::Kind::R6 : Derivation::Kind::R4);
    d->gen = std::move(v);
    d->d1 = std::move(child);
    return d;
}
DerivPtr dv_r5(FormulaPtr prem, FoPtr u, DerivPtr child) {
    auto d = mk(Derivation::Kind::R5);
    d->prem = std::move(prem);
    d->inst_term = std::move(u);
    d->d1 = std::move(child);
    return d;
}
DerivPtr dv_r7(FormulaPtr prem, std::vector<std::string> params, FormulaPtr g, DerivPtr child) {
    auto d = mk(Derivation::Kind::R7);
    d->prem = std::move(prem);
    d->inst_params = std::move(params);
    d->inst_formula = std::move(g);
    d->d1 = std::move(child);
    return d;
}
DerivPtr dv_r8(FormulaPtr templ, std::string hole, FoPtr u, FoPtr v, bool lr, DerivPtr child) {
    auto d = mk(Derivation::Kind::R8);
    d->prem = std::move(templ);
    d->hole = std::move(hole);
    d->eq_u = std::move(u);
    d->eq_v = std::move(v);
    d->eq_lr = lr;
    d->d1 = std::move(child);
    return d;
}
DerivPtr dv_sub(SubPtr p, DerivPtr child) {
    auto d = mk(Derivation::Kind::Sub);
    d->sub = std::move(p);
    d->d1 = std::move(child);
    return d;
}
DerivPtr dv_s1(std::string x, std::vector<VarSpec> xi, SubPtr p) {
    auto d = mk(Derivation::Kind::S1);
    d->name = std::move(x);
    d->xi = std::move(xi);
    d->sub = std::move(p);
    return d;
}
DerivPtr dv_s2(std::string binder, DerivPtr body, SubPtr p) {
    auto d = mk(Derivation::Kind::S2);
    d->name = std::move(binder);
    d->d1 = std::move(body);
    d->sub = std::move(p);
    return d;
}
DerivPtr dv_s3(FormulaPtr arg_type, std::vector<VarSpec> xi, DerivPtr fun, DerivPtr arg,
               SubPtr p) {
    auto d = mk(Derivation::Kind::S3);
    d->prem = std::move(arg_type);
    d->xi = std::move(xi);
    d->d1 = std::move(fun);
    d->d2 = std::move(arg);
    d->sub = std::move(p);
    return d;
}
DerivPtr dv_eta(TermPtr source, TermPath path, DerivPtr child) {
    auto d = mk(Derivation::Kind::Eta);
    d->eta_source = std::move(source);
    d->eta_path = std::move(path);
    d->d1 = std::move(child);
    return d;
}

// ---- checking --------------------------------------------------------------

namespace {

bool kind_allowed(System sys, Derivation::Kind k) {
    using K = Derivation::Kind;
    bool base = k == K::R1 || k == K::R2 || k == K::R3 || k == K::R4 || k == K::R5 ||
                k == K::R6 || k == K::R7 || k == K::R8;
    switch (sys) {
        case System::AF2: return base;
        case System::AF2Sub: return base || k == K::Sub;
        case System::AF2Eta: return base || k == K::Eta;
        case System::AF2S: return k == K::S1 || k == K::S2 || k == K::S3;
    }
    return false;
}

const char* kind_label(Derivation::Kind k) {
    static const char* names[] = {"r1", "r2", "r3", "r4", "r5", "r6", "r7",
                                  "r8", "sub", "s1", "s2", "s3", "eta"};
    return names[(int)k];
}

// Strip leading quantifiers of L until an arrow, collecting them verbatim.
std::optional<std::pair<std::vector<VarSpec>, FormulaPtr>> split_quantified_arrow(
    const FormulaPtr& L) {
    std::vector<VarSpec> xi;
    FormulaPtr cur = L;
    while (cur->kind == Formula::Kind::AllFo || cur->kind == Formula::Kind::AllSo) {
        xi.push_back(cur->kind == Formula::Kind::AllFo ? VarSpec{false, cur->name, 0}
                                                       : VarSpec{true, cur->name, cur->arity});
        cur = cur->left;
    }
    if (cur->kind != Formula::Kind::Arrow) return std::nullopt;
    return std::make_pair(std::move(xi), cur);
}

}  // namespace

// Bottom-up conclusion synthesis for the node shapes that determine their own
// conclusion (variables, instantiations, equational steps, generalizations and
// containment-extended conclusions).  Returns null when the conclusion is not
// locally determined, e.g. under an abstraction.
FormulaPtr synth_conclusion(const EquationSystem& E, const Context& G, const DerivPtr& d) {
    if (!d) return nullptr;
    using K = Derivation::Kind;
    switch (d->kind) {
        case K::R1: {
            auto* b = G.lookup(d->name);
            return b ? *b : nullptr;
        }
        case K::R3: {
            FormulaPtr f = synth_conclusion(E, G, d->d1);
            return f && f->kind == Formula::Kind::Arrow ? f->right : nullptr;
        }
        case K::R4:
        case K::R6: {
            FormulaPtr f = synth_conclusion(E, G, d->d1);
            return f ? forall_wrap({d->gen}, f) : nullptr;
        }
        case K::R5:
            if (d->prem->kind != Formula::Kind::AllFo) return nullptr;
            return subst_fo(d->prem->left, {{d->prem->name, d->inst_term}});
        case K::R7:
            if (d->prem->kind != Formula::Kind::AllSo ||
                d->prem->arity != (int)d->inst_params.size())
                return nullptr;
            return subst_so(d->prem->left, d->prem->name, d->inst_params, d->inst_formula);
        case K::R8:
            return subst_fo(d->prem, {{d->hole, d->eq_v}});
        case K::Sub: {
            FormulaPtr f = synth_conclusion(E, G, d->d1);
            if (!f) return nullptr;
            return synth_right(E, d->sub, f).formula;
        }
        case K::S1: {
            auto* b = G.lookup(d->name);
            if (!b) return nullptr;
            return synth_right(E, d->sub, forall_wrap(d->xi, *b)).formula;
        }
        case K::S3: {
            FormulaPtr f = synth_conclusion(E, G, d->d1);
            if (!f || f->kind != Formula::Kind::Arrow) return nullptr;
            return synth_right(E, d->sub, forall_wrap(d->xi, f->right)).formula;
        }
        case K::Eta:
            return synth_conclusion(E, G, d->d1);
        default:
            return nullptr;
    }
}

namespace {

struct DerivChecker {
    System sys;
    const EquationSystem& E;

    Verdict fail(const std::string& path, const std::string& reason) {
        return Verdict{false, path, reason};
    }

    Verdict check(const DerivPtr& d, const Context& G, const TermPtr& t, const FormulaPtr& A,
                  const std::string& path) {
        if (!d) return fail(path, "missing derivation node");
        if (!kind_allowed(sys, d->kind))
            return fail(path, std::string("node ") + kind_label(d->kind) +
                                  " is not part of system " + system_name(sys));
        using K = Derivation::Kind;
        switch (d->kind) {
            case K::R1: {
                if (t->kind != Term::Kind::Var || t->name != d->name)
                    return fail(path, "axiom subject must be the variable " + d->name);
                auto* b = G.lookup(d->name);
                if (!b) return fail(path, "variable " + d->name + " is not bound in the context");
                if (!formula_alpha_eq(*b, A))
                    return fail(path, "axiom type mismatch: context has " + print_formula(*b) +
                                          ", conclusion wants " + print_formula(A));
                return {};
            }
            case K::R2: {
                if (t->kind != Term::Kind::Abs || t->name != d->name)
                    return fail(path, "abstraction rule subject must bind " + d->name);
                if (A->kind != Formula::Kind::Arrow)
                    return fail(path, "abstraction rule needs an arrow type, got " +
                                          print_formula(A));
                if (G.lookup(d->name))
                    return fail(path, "binder " + d->name +
                                          " shadows a context variable; alpha-rename the subject");
                return check(d->d1, G.extended(d->name, A->left), t->sub, A->right, path + ".0");
            }
            case K::R3: {
                if (t->kind != Term::Kind::App)
                    return fail(path, "application rule subject must be an application");
                auto v = check(d->d1, G, t->sub, f_arrow(d->prem, A), path + ".0");
                if (!v.ok) return v;
                return check(d->d2, G, t->arg, d->prem, path + ".1");
            }
            case K::R4:
            case K::R6: {
                if (d->gen.second_order != (d->kind == K::R6))
                    return fail(path, "generalized variable order does not match the rule");
                auto body = forall_strip(A, {d->gen});
                if (!body)
                    return fail(path, "conclusion " + print_formula(A) +
                                          " does not start with the generalized quantifier");
                if (G.var_free(d->gen))
                    return fail(path, "generalized variable " + d->gen.name +
                                          " appears free in the context");
                return check(d->d1, G, t, *body, path + ".0");
            }
            case K::R5: {
                if (d->prem->kind != Formula::Kind::AllFo)
                    return fail(path, "instantiation premise must be a first-order quantifier");
                FormulaPtr inst = subst_fo(d->prem->left, {{d->prem->name, d->inst_term}});
                if (!formula_alpha_eq(inst, A))
                    return fail(path, "instantiation concludes " + print_formula(inst) +
                                          ", expected " + print_formula(A));
                return check(d->d1, G, t, d->prem, path + ".0");
            }
            case K::R7: {
                if (d->prem->kind != Formula::Kind::AllSo)
                    return fail(path, "instantiation premise must be a second-order quantifier");
                if (d->prem->arity != (int)d->inst_params.size())
                    return fail(path, "instantiation arity mismatch");
                FormulaPtr inst =
                    subst_so(d->prem->left, d->prem->name, d->inst_params, d->inst_formula);
                if (!formula_alpha_eq(inst, A))
                    return fail(path, "instantiation concludes " + print_formula(inst) +
                                          ", expected " + print_formula(A));
                return check(d->d1, G, t, d->prem, path + ".0");
            }
            case K::R8: {
                if (!match_particular_case(E, d->eq_u, d->eq_v))
                    return fail(path, print_fo(d->eq_u) + " = " + print_fo(d->eq_v) +
                                          " is not a particular case of the equations");
                FormulaPtr conc = subst_fo(d->prem, {{d->hole, d->eq_v}});
                if (!formula_alpha_eq(conc, A))
                    return fail(path, "equation rule concludes " + print_formula(conc) +
                                          ", expected " + print_formula(A));
                return check(d->d1, G, t, subst_fo(d->prem, {{d->hole, d->eq_u}}), path + ".0");
            }
            case K::Sub: {
                auto s = synth_left(E, d->sub, A);
                FormulaPtr P = s.formula;
                if (!P) {
                    // fall back to the subderivation's own conclusion when the
                    // containment is not invertible from the right side
                    P = synth_conclusion(E, G, d->d1);
                    if (!P)
                        return fail(path + "/" + s.path,
                                    "containment premise not determined: " + s.error);
                    auto r = synth_right(E, d->sub, P);
                    if (!r.formula)
                        return fail(path + "/" + r.path,
                                    "containment does not apply to " + print_formula(P) + ": " +
                                        r.error);
                    if (!formula_alpha_eq(r.formula, A))
                        return fail(path, "containment concludes " + print_formula(r.formula) +
                                              ", expected " + print_formula(A));
                }
                return check(d->d1, G, t, P, path + ".0");
            }
            case K::S1: {
                if (t->kind != Term::Kind::Var || t->name != d->name)
                    return fail(path, "subject must be the variable " + d->name);
                auto* b = G.lookup(d->name);
                if (!b) return fail(path, "variable " + d->name + " is not bound in the context");
                for (auto& v : d->xi)
                    if (G.var_free(v))
                        return fail(path, "generalized variable " + v.name +
                                              " is free in the context");
                auto v = check_subproof(E, d->sub, forall_wrap(d->xi, *b), A);
                if (!v.ok) return fail(path + "/" + v.path, v.reason);
                return {};
            }
            case K::S2: {
                if (t->kind != Term::Kind::Abs || t->name != d->name)
                    return fail(path, "subject must bind " + d->name);
                if (G.lookup(d->name))
                    return fail(path, "binder " + d->name +
                                          " shadows a context variable; alpha-rename the subject");
                auto s = synth_left(E, d->sub, A);
                if (!s.formula)
                    return fail(path + "/" + s.path, "containment premise not determined: " +
                                                         s.error);
                auto split = split_quantified_arrow(s.formula);
                if (!split)
                    return fail(path, "containment premise " + print_formula(s.formula) +
                                          " is not a quantified arrow");
                for (auto& v : split->first)
                    if (G.var_free(v))
                        return fail(path, "generalized variable " + v.name +
                                              " is free in the context");
                const FormulaPtr& arrow = split->second;
                return check(d->d1, G.extended(d->name, arrow->left), t->sub, arrow->right,
                             path + ".0");
            }
            case K::S3: {
                if (t->kind != Term::Kind::App)
                    return fail(path, "subject must be an application");
                auto s = synth_left(E, d->sub, A);
                if (!s.formula)
                    return fail(path + "/" + s.path, "containment premise not determined: " +
                                                         s.error);
                auto body = forall_strip(s.formula, d->xi);
                if (!body)
                    return fail(path, "containment premise " + print_formula(s.formula) +
                                          " does not carry the recorded quantifier sequence");
                for (auto& v : d->xi)
                    if (G.var_free(v))
                        return fail(path, "generalized variable " + v.name +
                                              " is free in the context");
                auto vf = check(d->d1, G, t->sub, f_arrow(d->prem, *body), path + ".0");
                if (!vf.ok) return vf;
                return check(d->d2, G, t->arg, d->prem, path + ".1");
            }
            case K::Eta: {
                auto contracted = contract_at(d->eta_source, d->eta_path, true);
                if (!contracted)
                    return fail(path, "recorded position is not an eta redex of " +
                                          print_term(d->eta_source));
                if (!alpha_eq(*contracted, t))
                    return fail(path, "eta step yields " + print_term(*contracted) +
                                          ", expected " + print_term(t));
                return check(d->d1, G, d->eta_source, A, path + ".0");
            }
        }
        return fail(path, "unknown node");
    }
};

}  // namespace

Verdict check_derivation(System system, const EquationSystem& E, const DerivPtr& d,
                         const Context& ctx, const TermPtr& t, const FormulaPtr& A) {
    if (!ctx.distinct_names())
        return Verdict{false, "root", "context variable names are not pairwise distinct"};
    for (auto& v : free_vars(t))
        if (!ctx.lookup(v))
            return Verdict{false, "root", "free subject variable " + v + " is not bound"};
    DerivChecker c{system, E};
    return c.check(d, ctx, t, A, "root");
}

std::vector<std::string> derivation_skeleton(const DerivPtr& d) {
    std::vector<std::string> out;
    std::function<void(const DerivPtr&)> go = [&](const DerivPtr& q) {
        if (!q) return;
        out.push_back(kind_label(q->kind));
        go(q->d1);
        go(q->d2);
    };
    go(d);
    return out;
}

// ---- substitution -----------------------------------------------------------

namespace {

std::set<std::string> sigma_avoid(const Substitution& sigma) {
    std::set<std::string> avoid;
    for (auto& [k, v] : sigma.fo) {
        avoid.insert(k);
        auto vs = fo_vars(v);
        avoid.insert(vs.begin(), vs.end());
    }
    for (auto& [k, pg] : sigma.so) {
        avoid.insert(k);
        for (auto& [k2, a] : formula_free_so(pg.second)) avoid.insert(k2);
        auto fo = formula_free_fo(pg.second);
        avoid.insert(fo.begin(), fo.end());
    }
    return avoid;
}

Substitution rename_var(const Substitution& sigma, const VarSpec& from, const std::string& to) {
    Substitution out = sigma;
    if (from.second_order) {
        std::vector<std::string> ps;
        std::vector<FoPtr> as;
        for (int i = 0; i < from.arity; ++i) {
            ps.push_back("p" + std::to_string(i));
            as.push_back(fo_var(ps.back()));
        }
        out.so[from.name] = {ps, f_var2(to, from.arity, as)};
    } else {
        out.fo[from.name] = fo_var(to);
    }
    return out;
}

// Rename a list of generalized variables away from sigma; returns the renamed
// list and the substitution extended with the renames.
std::pair<std::vector<VarSpec>, Substitution> freshen_xis(const std::vector<VarSpec>& xi,
                                                          const Substitution& sigma,
                                                          const std::set<std::string>& avoid) {
    std::vector<VarSpec> out;
    Substitution inner = sigma;
    for (auto& v : xi) {
        std::string nn = fresh_name(v.name, avoid);
        VarSpec nv = v;
        if (nn != v.name) {
            nv.name = nn;
            inner = rename_var(inner, v, nn);
        }
        out.push_back(nv);
    }
    return {out, inner};
}

DerivPtr subst_dv(const DerivPtr& d, const Substitution& sigma,
                  const std::set<std::string>& avoid) {
    using K = Derivation::Kind;
    switch (d->kind) {
        case K::R1:
            return d;
        case K::R2:
            return dv_r2(d->name, subst_dv(d->d1, sigma, avoid));
        case K::R3:
            return dv_r3(apply_subst(d->prem, sigma), subst_dv(d->d1, sigma, avoid),
                         subst_dv(d->d2, sigma, avoid));
        case K::R4:
        case K::R6: {
            auto [xi, inner] = freshen_xis({d->gen}, sigma, avoid);
            return dv_gen(xi[0], subst_dv(d->d1, inner, avoid));
        }
        case K::R5:
            return dv_r5(apply_subst(d->prem, sigma), fo_subst(d->inst_term, sigma.fo),
                         subst_dv(d->d1, sigma, avoid));
        case K::R7: {
            Substitution inner = sigma;
            for (auto& par : d->inst_params) inner.fo.erase(par);
            return dv_r7(apply_subst(d->prem, sigma), d->inst_params,
                         apply_subst(d->inst_formula, inner), subst_dv(d->d1, sigma, avoid));
        }
        case K::R8: {
            std::string nh = fresh_name(d->hole, avoid);
            Substitution inner = sigma;
            if (nh != d->hole) inner.fo[d->hole] = fo_var(nh);
            inner.fo.erase(nh);
            return dv_r8(apply_subst(d->prem, inner), nh, fo_subst(d->eq_u, sigma.fo),
                         fo_subst(d->eq_v, sigma.fo), d->eq_lr, subst_dv(d->d1, sigma, avoid));
        }
        case K::Sub:
            return dv_sub(substitute_subproof(d->sub, sigma), subst_dv(d->d1, sigma, avoid));
        case K::S1: {
            auto [xi, inner] = freshen_xis(d->xi, sigma, avoid);
            return dv_s1(d->name, xi, substitute_subproof(d->sub, inner));
        }
        case K::S2:
            return dv_s2(d->name, subst_dv(d->d1, sigma, avoid),
                         substitute_subproof(d->sub, sigma));
        case K::S3: {
            auto [xi, inner] = freshen_xis(d->xi, sigma, avoid);
            return dv_s3(apply_subst(d->prem, inner), xi, subst_dv(d->d1, inner, avoid),
                         subst_dv(d->d2, inner, avoid), substitute_subproof(d->sub, inner));
        }
        case K::Eta:
            return dv_eta(d->eta_source, d->eta_path, subst_dv(d->d1, sigma, avoid));
    }
    return d;
}

}  // namespace

DerivPtr substitute_derivation(const DerivPtr& d, const Substitution& sigma) {
    return subst_dv(d, sigma, sigma_avoid(sigma));
}

}  // namespace af2
