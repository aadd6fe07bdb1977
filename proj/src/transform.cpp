#include <algorithm>
#include <functional>
#include <stdexcept>

#include "af2/typing.hpp"

namespace af2 {

namespace {

[[noreturn]] void xfail(const std::string& msg) { throw std::runtime_error(msg); }

FormulaPtr synth_left_or_fail(const EquationSystem& E, const SubPtr& p, const FormulaPtr& B) {
    auto s = synth_left(E, p, B);
    if (!s.formula) xfail("containment premise not determined: " + s.error);
    return s.formula;
}

// Premise of a subsumption node: invert the containment if possible, otherwise
// synthesize the subderivation's own conclusion and confirm it reaches A.
FormulaPtr sub_node_premise(const EquationSystem& E, const Context& ctx, const DerivPtr& d,
                            const FormulaPtr& A) {
    auto s = synth_left(E, d->sub, A);
    if (s.formula) return s.formula;
    if (FormulaPtr P = synth_conclusion(E, ctx, d->d1)) {
        auto r = synth_right(E, d->sub, P);
        if (r.formula && formula_alpha_eq(r.formula, A)) return P;
    }
    xfail("containment premise not determined: " + s.error);
}

std::optional<std::pair<std::vector<VarSpec>, FormulaPtr>> split_qarrow(const FormulaPtr& L) {
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

SubPtr elim_one_var(const VarSpec& v, SubPtr child) {
    if (v.second_order) {
        std::vector<std::string> ps;
        std::vector<FoPtr> as;
        for (int i = 0; i < v.arity; ++i) {
            ps.push_back("p" + std::to_string(i));
            as.push_back(fo_var(ps.back()));
        }
        return sp_all_elim_so(ps, f_var2(v.name, v.arity, as), std::move(child));
    }
    return sp_all_elim_fo(fo_var(v.name), std::move(child));
}

Substitution one_rename(const VarSpec& from, const std::string& to) {
    Substitution s;
    if (from.second_order) {
        std::vector<std::string> ps;
        std::vector<FoPtr> as;
        for (int i = 0; i < from.arity; ++i) {
            ps.push_back("p" + std::to_string(i));
            as.push_back(fo_var(ps.back()));
        }
        s.so[from.name] = {ps, f_var2(to, from.arity, as)};
    } else {
        s.fo[from.name] = fo_var(to);
    }
    return s;
}

// alpha-rename the leading quantifier of a formula to a fresh name
FormulaPtr rename_top_binder(const FormulaPtr& f, const std::string& fresh) {
    VarSpec v{f->kind == Formula::Kind::AllSo, fresh, f->arity};
    auto body = forall_strip(f, {v});
    if (!body) xfail("cannot rename the leading quantifier of " + print_formula(f));
    return forall_wrap({v}, *body);
}

}  // namespace

// ---- root subsumption surgery ----------------------------------------------

DerivPtr resubtype(const DerivPtr& d, const FormulaPtr& A, const SubPtr& p) {
    using K = Derivation::Kind;
    switch (d->kind) {
        case K::S1:
            return dv_s1(d->name, d->xi, sp_compose(A, d->sub, p));
        case K::S2:
            return dv_s2(d->name, d->d1, sp_compose(A, d->sub, p));
        case K::S3:
            return dv_s3(d->prem, d->xi, d->d1, d->d2, sp_compose(A, d->sub, p));
        default:
            xfail("resubtype expects an S-style root node");
    }
}

DerivPtr generalize_snode(const EquationSystem& E, const Context& ctx, const DerivPtr& d,
                          const FormulaPtr& A, const VarSpec& z) {
    using K = Derivation::Kind;
    FormulaPtr L;
    switch (d->kind) {
        case K::S1: {
            auto* b = ctx.lookup(d->name);
            if (!b) xfail("generalize: variable " + d->name + " not bound");
            L = forall_wrap(d->xi, *b);
            break;
        }
        case K::S2:
        case K::S3:
            L = synth_left_or_fail(E, d->sub, A);
            break;
        default:
            xfail("generalize expects an S-style root node");
    }
    SubPtr q = sp_all_intro(z, sp_trans(L, elim_one_var(z, sp_ax()), d->sub));
    switch (d->kind) {
        case K::S1: {
            std::vector<VarSpec> xi{z};
            xi.insert(xi.end(), d->xi.begin(), d->xi.end());
            return dv_s1(d->name, xi, q);
        }
        case K::S2:
            return dv_s2(d->name, d->d1, q);
        default: {
            std::vector<VarSpec> xi{z};
            xi.insert(xi.end(), d->xi.begin(), d->xi.end());
            return dv_s3(d->prem, xi, d->d1, d->d2, q);
        }
    }
}

// ---- strengthening ----------------------------------------------------------

DerivPtr strengthen(const EquationSystem& E, const Context& ctx, const DerivPtr& d,
                    const FormulaPtr& A,
                    const std::map<std::string, std::pair<FormulaPtr, SubPtr>>& ctx_proofs,
                    const FormulaPtr& B, const SubPtr& goal_proof) {
    using K = Derivation::Kind;
    switch (d->kind) {
        case K::S1: {
            auto* old = ctx.lookup(d->name);
            if (!old) xfail("strengthen: variable " + d->name + " not bound");
            FormulaPtr newb = *old;
            SubPtr pvar = sp_ax();
            if (auto it = ctx_proofs.find(d->name); it != ctx_proofs.end()) {
                newb = it->second.first;
                pvar = it->second.second;
            }
            // !xi B_x <= !xi A_x <= A <= B
            SubPtr chain = sp_forall_mono(d->xi, newb, pvar);
            chain = sp_compose(forall_wrap(d->xi, *old), chain, d->sub);
            chain = sp_compose(A, chain, goal_proof);
            return dv_s1(d->name, d->xi, chain);
        }
        case K::S2: {
            FormulaPtr L = synth_left_or_fail(E, d->sub, A);
            auto split = split_qarrow(L);
            if (!split) xfail("strengthen: malformed abstraction premise");
            auto inner = ctx_proofs;
            inner.erase(d->name);
            DerivPtr body =
                strengthen(E, ctx.extended(d->name, split->second->left), d->d1,
                           split->second->right, inner, split->second->right, sp_ax());
            return dv_s2(d->name, body, sp_compose(A, d->sub, goal_proof));
        }
        case K::S3: {
            FormulaPtr L = synth_left_or_fail(E, d->sub, A);
            auto body = forall_strip(L, d->xi);
            if (!body) xfail("strengthen: malformed application premise");
            DerivPtr fun = strengthen(E, ctx, d->d1, f_arrow(d->prem, *body), ctx_proofs,
                                      f_arrow(d->prem, *body), sp_ax());
            DerivPtr arg = strengthen(E, ctx, d->d2, d->prem, ctx_proofs, d->prem, sp_ax());
            return dv_s3(d->prem, d->xi, fun, arg, sp_compose(A, d->sub, goal_proof));
        }
        default:
            xfail("strengthen expects an S-system derivation");
    }
}

// ---- cut ---------------------------------------------------------------------

namespace {

DerivPtr rename_subject_var(const DerivPtr& d, const std::string& from, const std::string& to) {
    using K = Derivation::Kind;
    switch (d->kind) {
        case K::S1:
            return d->name == from ? dv_s1(to, d->xi, d->sub) : d;
        case K::S2:
            if (d->name == from) return d;  // shadowed below this binder
            return dv_s2(d->name, rename_subject_var(d->d1, from, to), d->sub);
        case K::S3:
            return dv_s3(d->prem, d->xi, rename_subject_var(d->d1, from, to),
                         rename_subject_var(d->d2, from, to), d->sub);
        default:
            xfail("subject renaming expects an S-system derivation");
    }
}

}  // namespace

DerivPtr cut(const EquationSystem& E, const Context& ctx, const std::string& x,
             const FormulaPtr& B, const DerivPtr& d_u, const TermPtr& u, const FormulaPtr& A,
             const DerivPtr& d_v) {
    using K = Derivation::Kind;
    if (!free_vars(u).count(x)) return d_u;
    switch (d_u->kind) {
        case K::S1: {
            if (d_u->name != x) return d_u;
            // B <= !xi B <= A (the generalized variables are not free in B)
            SubPtr p = sp_compose(forall_wrap(d_u->xi, B), sp_intro_all(d_u->xi, sp_ax()),
                                  d_u->sub);
            return resubtype(d_v, B, p);
        }
        case K::S2: {
            std::string y = d_u->name;
            DerivPtr body = d_u->d1;
            TermPtr ubody = u->sub;
            auto L = synth_left_or_fail(E, d_u->sub, A);
            auto split = split_qarrow(L);
            if (!split) xfail("cut: malformed abstraction premise");
            // the free variables of the substituted value all name ctx entries,
            // so the binder captures one exactly when it shadows a ctx entry
            if (ctx.lookup(y)) {
                std::set<std::string> avoid = free_vars(u);
                for (auto& b : ctx.binds) avoid.insert(b.name);
                avoid.insert(x);
                std::string ny = fresh_name(y, avoid);
                body = rename_subject_var(body, y, ny);
                ubody = substitute(ubody, y, mk_var(ny));
                y = ny;
            }
            DerivPtr nbody = cut(E, ctx.extended(y, split->second->left), x, B, body, ubody,
                                 split->second->right, d_v);
            return dv_s2(y, nbody, d_u->sub);
        }
        case K::S3: {
            auto L = synth_left_or_fail(E, d_u->sub, A);
            auto sbody = forall_strip(L, d_u->xi);
            if (!sbody) xfail("cut: malformed application premise");
            DerivPtr fun = cut(E, ctx, x, B, d_u->d1, u->sub, f_arrow(d_u->prem, *sbody), d_v);
            DerivPtr arg = cut(E, ctx, x, B, d_u->d2, u->arg, d_u->prem, d_v);
            return dv_s3(d_u->prem, d_u->xi, fun, arg, d_u->sub);
        }
        default:
            xfail("cut expects an S-system derivation");
    }
}

// ---- abstraction inversion (recursion over the containment proof) -----------

namespace {

struct ArrowState {
    std::vector<VarSpec> xi;  // prefix of L, not free in ctx
    FormulaPtr C, D;          // matrix of L
    DerivPtr body;            // ctx, x:C |- u : D
};

struct ArrowOut {
    std::vector<VarSpec> prefix;  // prefix of R
    FormulaPtr dom, cod;          // matrix of R
    DerivPtr deriv;               // ctx, x:dom |- u : cod
};

struct ArrowInverter {
    const EquationSystem& E;
    const Context& ctx;
    std::string x;

    ArrowOut run(const SubPtr& p, const ArrowState& st, const FormulaPtr& R) {
        switch (p->kind) {
            case SubProof::Kind::Ax: {
                auto split = split_qarrow(R);
                if (!split) xfail("inversion: the target is not a quantified arrow");
                auto& rho = split->first;
                if (rho.size() != st.xi.size())
                    xfail("inversion: quantifier prefixes do not line up");
                Substitution sigma;
                for (size_t i = 0; i < rho.size(); ++i)
                    if (!(st.xi[i] == rho[i])) {
                        auto one = one_rename(st.xi[i], rho[i].name);
                        sigma.fo.insert(one.fo.begin(), one.fo.end());
                        sigma.so.insert(one.so.begin(), one.so.end());
                    }
                DerivPtr dd = sigma.fo.empty() && sigma.so.empty()
                                  ? st.body
                                  : substitute_derivation(st.body, sigma);
                auto stripped = forall_strip(forall_wrap(st.xi, f_arrow(st.C, st.D)), rho);
                if (!stripped || (*stripped)->kind != Formula::Kind::Arrow)
                    xfail("inversion: prefix renaming failed");
                return {rho, (*stripped)->left, (*stripped)->right, dd};
            }
            case SubProof::Kind::Dist: {
                // !xi(C -> D) <= !xi C -> !xi D
                FormulaPtr dom = forall_wrap(st.xi, st.C);
                FormulaPtr cod = forall_wrap(st.xi, st.D);
                std::map<std::string, std::pair<FormulaPtr, SubPtr>> cp;
                cp[x] = {dom, sp_strip_all(st.xi)};
                DerivPtr cur = strengthen(E, ctx.extended(x, st.C), st.body, st.D, cp, st.D,
                                          sp_ax());
                Context inner = ctx.extended(x, dom);
                FormulaPtr curA = st.D;
                for (auto it = st.xi.rbegin(); it != st.xi.rend(); ++it) {
                    cur = generalize_snode(E, inner, cur, curA, *it);
                    curA = forall_wrap({*it}, curA);
                }
                return {{}, dom, cod, cur};
            }
            case SubProof::Kind::Mono: {
                if (!st.xi.empty())
                    xfail("inversion: arrow monotonicity against a quantified left side");
                if (R->kind != Formula::Kind::Arrow)
                    xfail("inversion: arrow monotonicity against a non-arrow target");
                std::map<std::string, std::pair<FormulaPtr, SubPtr>> cp;
                cp[x] = {R->left, p->a};
                DerivPtr dd = strengthen(E, ctx.extended(x, st.C), st.body, st.D, cp, R->right,
                                         p->b);
                return {{}, R->left, R->right, dd};
            }
            case SubProof::Kind::AllIntro: {
                const VarSpec& v = p->xi.at(0);
                auto body = forall_strip(R, {v});
                if (!body) xfail("inversion: target does not match the introduced quantifier");
                ArrowOut sub = run(p->a, st, *body);
                std::vector<VarSpec> prefix{v};
                prefix.insert(prefix.end(), sub.prefix.begin(), sub.prefix.end());
                return {prefix, sub.dom, sub.cod, sub.deriv};
            }
            case SubProof::Kind::AllElim: {
                FormulaPtr L = forall_wrap(st.xi, f_arrow(st.C, st.D));
                auto s = synth_right(E, p->a, L);
                if (!s.formula) xfail("inversion: " + s.error);
                FormulaPtr S = s.formula;
                if (S->kind != Formula::Kind::AllFo && S->kind != Formula::Kind::AllSo)
                    xfail("inversion: elimination premise is not quantified");
                std::set<std::string> avoid = ctx.free_fo();
                for (auto& [k, a] : ctx.free_so()) avoid.insert(k);
                if (p->so_inst) {
                    auto fv = formula_free_fo(p->inst_formula);
                    avoid.insert(fv.begin(), fv.end());
                    for (auto& [k, a] : formula_free_so(p->inst_formula)) avoid.insert(k);
                } else {
                    auto fv = fo_vars(p->inst_term);
                    avoid.insert(fv.begin(), fv.end());
                }
                std::string sname = fresh_name(S->name, avoid);
                FormulaPtr S_use = sname == S->name ? S : rename_top_binder(S, sname);
                ArrowOut sub = run(p->a, st, S_use);
                if (sub.prefix.empty()) xfail("inversion: elimination lost its quantifier");
                VarSpec head = sub.prefix.front();
                Substitution sigma;
                if (p->so_inst) {
                    if (!head.second_order) xfail("inversion: quantifier order mismatch");
                    sigma.so[head.name] = {p->inst_params, p->inst_formula};
                } else {
                    if (head.second_order) xfail("inversion: quantifier order mismatch");
                    sigma.fo[head.name] = p->inst_term;
                }
                ArrowOut out;
                out.prefix.assign(sub.prefix.begin() + 1, sub.prefix.end());
                out.dom = apply_subst(sub.dom, sigma);
                out.cod = apply_subst(sub.cod, sigma);
                out.deriv = substitute_derivation(sub.deriv, sigma);
                return out;
            }
            case SubProof::Kind::Trans: {
                auto msplit = split_qarrow(p->mid);
                if (!msplit)
                    xfail("inversion: transitivity through a non-arrow middle formula (" +
                          print_formula(p->mid) + ") is out of scope");
                // refresh the middle's prefix so it is not free in the context
                std::set<std::string> avoid = ctx.free_fo();
                for (auto& [k, a] : ctx.free_so()) avoid.insert(k);
                FormulaPtr M = p->mid;
                {
                    std::vector<VarSpec> fresh;
                    for (auto& v : msplit->first) {
                        VarSpec nv = v;
                        nv.name = fresh_name(v.name, avoid);
                        avoid.insert(nv.name);
                        fresh.push_back(nv);
                    }
                    auto body = forall_strip(p->mid, fresh);
                    if (!body) xfail("inversion: middle prefix refresh failed");
                    M = forall_wrap(fresh, *body);
                }
                ArrowOut first = run(p->a, st, M);
                ArrowState st2{first.prefix, first.dom, first.cod, first.deriv};
                return run(p->b, st2, R);
            }
            case SubProof::Kind::EqStep: {
                // A <= T[u/y] then A <= T[v/y]; recurse at the premise and
                // substitute the equation step through the result
                if (!match_particular_case(E, p->eq_u, p->eq_v))
                    xfail("inversion: equation step is not a particular case");
                FormulaPtr premf = subst_fo(p->mid, {{p->hole, p->eq_u}});
                ArrowOut sub = run(p->a, st, premf);
                // rebuild the conclusion's matrix from the template
                auto tsplit = split_qarrow(p->mid);
                if (!tsplit) xfail("inversion: equation template is not a quantified arrow");
                FormulaPtr dom_v =
                    subst_fo(tsplit->second->left, {{p->hole, p->eq_v}});
                FormulaPtr cod_v =
                    subst_fo(tsplit->second->right, {{p->hole, p->eq_v}});
                // dom_v <= dom_u and cod_u <= cod_v by the symmetric equation step
                SubPtr pd = sp_eq(tsplit->second->left, p->hole, p->eq_v, p->eq_u,
                                  !p->eq_lr, sp_ax());
                SubPtr pc = sp_eq(tsplit->second->right, p->hole, p->eq_u, p->eq_v,
                                  p->eq_lr, sp_ax());
                std::map<std::string, std::pair<FormulaPtr, SubPtr>> cp;
                cp[x] = {dom_v, pd};
                DerivPtr dd = strengthen(E, ctx.extended(x, sub.dom), sub.deriv, sub.cod, cp,
                                         cod_v, pc);
                return {sub.prefix, dom_v, cod_v, dd};
            }
        }
        xfail("inversion: unsupported containment node");
    }
};

}  // namespace

ArrowInversion invert_at_arrow(const EquationSystem& E, const Context& ctx,
                               const std::string& x, const FormulaPtr& C, const FormulaPtr& D,
                               const std::vector<VarSpec>& xi, const DerivPtr& body,
                               const SubPtr& p, const FormulaPtr& R) {
    ArrowInverter inv{E, ctx, x};
    ArrowOut out = inv.run(p, ArrowState{xi, C, D, body}, R);
    return {out.dom, out.cod, out.deriv};
}

namespace {

// From an S2 derivation of ctx |- \x.u : A -> B, the body judgment
// ctx, x:A |- u : B.
ArrowInversion abstraction_body(const EquationSystem& E, const Context& ctx, const DerivPtr& d,
                                const FormulaPtr& arrow) {
    if (d->kind != Derivation::Kind::S2) xfail("expected an abstraction derivation");
    FormulaPtr L = synth_left_or_fail(E, d->sub, arrow);
    auto split = split_qarrow(L);
    if (!split) xfail("malformed abstraction premise");
    return invert_at_arrow(E, ctx, d->name, split->second->left, split->second->right,
                           split->first, d->d1, d->sub, arrow);
}

}  // namespace

// ---- generation -------------------------------------------------------------

GenerationData invert(const EquationSystem& E, const DerivPtr& d, const Context& ctx,
                      const TermPtr& t, const FormulaPtr& A) {
    using K = Derivation::Kind;
    GenerationData g;
    switch (d->kind) {
        case K::S1: {
            g.kind = GenerationData::Case::Var;
            auto* b = ctx.lookup(d->name);
            if (!b) xfail("invert: unbound variable");
            g.B = *b;
            g.xi = d->xi;
            g.sub = d->sub;
            return g;
        }
        case K::S2: {
            g.kind = GenerationData::Case::Abs;
            FormulaPtr L = synth_left_or_fail(E, d->sub, A);
            auto split = split_qarrow(L);
            if (!split) xfail("invert: malformed abstraction premise");
            g.B = split->second->left;
            g.C = split->second->right;
            g.xi = split->first;
            g.sub = d->sub;
            g.body = d->d1;
            if (A->kind == Formula::Kind::Arrow)
                g.at_arrow = abstraction_body(E, ctx, d, A).deriv;
            return g;
        }
        case K::S3: {
            // spine when the head is a variable reached through S3/S1 only
            std::vector<DerivPtr> chain;  // S3 nodes, root first
            DerivPtr cur = d;
            while (cur->kind == K::S3) {
                chain.push_back(cur);
                cur = cur->d1;
            }
            FormulaPtr L = synth_left_or_fail(E, d->sub, A);
            auto strip = forall_strip(L, d->xi);
            if (!strip) xfail("invert: malformed application premise");
            if (cur->kind != K::S1) {
                g.kind = GenerationData::Case::App;
                g.B = d->prem;
                g.C = *strip;
                g.xi = d->xi;
                g.sub = d->sub;
                g.fun = d->d1;
                g.arg = d->d2;
                return g;
            }
            g.kind = GenerationData::Case::Spine;
            auto* hb = ctx.lookup(cur->name);
            if (!hb) xfail("invert: unbound spine head");
            g.B = *hb;
            g.xi = d->xi;
            g.sub = d->sub;
            // walk conclusions top-down, then emit links head-first
            std::vector<GenerationData::Link> rev;
            FormulaPtr conc = A;
            for (auto& node : chain) {
                FormulaPtr l = synth_left_or_fail(E, node->sub, conc);
                auto st = forall_strip(l, node->xi);
                if (!st) xfail("invert: malformed application premise");
                GenerationData::Link link;
                link.arg_type = node->prem;
                link.out_type = *st;
                link.arg = node->d2;
                link.xi = node->d1->xi;
                link.sub = node->d1->sub;
                rev.push_back(link);
                conc = f_arrow(node->prem, *st);
            }
            g.links.assign(rev.rbegin(), rev.rend());
            return g;
        }
        default:
            xfail("invert expects an S-system derivation");
    }
}

// ---- subject reduction -------------------------------------------------------

DerivPtr subject_reduce(const EquationSystem& E, const Context& ctx, const DerivPtr& d,
                        const TermPtr& t, const FormulaPtr& A, bool eta, const TermPath& path) {
    using K = Derivation::Kind;
    if (!path.empty()) {
        TermPath rest(path.begin() + 1, path.end());
        if (d->kind == K::S2 && path[0] == 0) {
            FormulaPtr L = synth_left_or_fail(E, d->sub, A);
            auto split = split_qarrow(L);
            if (!split) xfail("subject reduction: malformed abstraction premise");
            DerivPtr body =
                subject_reduce(E, ctx.extended(d->name, split->second->left), d->d1, t->sub,
                               split->second->right, eta, rest);
            return dv_s2(d->name, body, d->sub);
        }
        if (d->kind == K::S3) {
            FormulaPtr L = synth_left_or_fail(E, d->sub, A);
            auto strip = forall_strip(L, d->xi);
            if (!strip) xfail("subject reduction: malformed application premise");
            if (path[0] == 0) {
                DerivPtr fun = subject_reduce(E, ctx, d->d1, t->sub,
                                              f_arrow(d->prem, *strip), eta, rest);
                return dv_s3(d->prem, d->xi, fun, d->d2, d->sub);
            }
            DerivPtr arg = subject_reduce(E, ctx, d->d2, t->arg, d->prem, eta, rest);
            return dv_s3(d->prem, d->xi, d->d1, arg, d->sub);
        }
        xfail("subject reduction: the redex path does not match the derivation");
    }
    if (!eta) {
        // beta redex at the root: (\y.w)v
        if (d->kind != K::S3 || t->kind != Term::Kind::App ||
            t->sub->kind != Term::Kind::Abs)
            xfail("subject reduction: no beta redex at the given position");
        FormulaPtr L = synth_left_or_fail(E, d->sub, A);
        auto strip = forall_strip(L, d->xi);
        if (!strip) xfail("subject reduction: malformed application premise");
        FormulaPtr arrow = f_arrow(d->prem, *strip);
        ArrowInversion inv = abstraction_body(E, ctx, d->d1, arrow);
        const std::string& y = t->sub->name;
        DerivPtr cur = cut(E, ctx, y, inv.dom, inv.deriv, t->sub->sub, inv.cod, d->d2);
        FormulaPtr curA = inv.cod;
        for (auto it = d->xi.rbegin(); it != d->xi.rend(); ++it) {
            cur = generalize_snode(E, ctx, cur, curA, *it);
            curA = forall_wrap({*it}, curA);
        }
        return resubtype(cur, curA, d->sub);
    }
    // eta redex at the root: \y.(w)y with y not free in w
    if (d->kind != K::S2 || t->kind != Term::Kind::Abs ||
        t->sub->kind != Term::Kind::App)
        xfail("subject reduction: no eta redex at the given position");
    const std::string& y = t->name;
    if (t->sub->arg->kind != Term::Kind::Var || t->sub->arg->name != y ||
        free_vars(t->sub->sub).count(y))
        xfail("subject reduction: no eta redex at the given position");
    FormulaPtr L = synth_left_or_fail(E, d->sub, A);
    auto split = split_qarrow(L);
    if (!split) xfail("subject reduction: malformed abstraction premise");
    const std::vector<VarSpec>& xi = split->first;
    FormulaPtr Bf = split->second->left;
    FormulaPtr Cf = split->second->right;
    DerivPtr app = d->d1;
    if (app->kind != K::S3) xfail("subject reduction: unexpected body derivation");
    FormulaPtr Lc = synth_left_or_fail(E, app->sub, Cf);
    auto stripc = forall_strip(Lc, app->xi);
    if (!stripc) xfail("subject reduction: malformed application premise");
    FormulaPtr Ef = app->prem;     // argument type
    FormulaPtr Ff = *stripc;       // result type before generalization
    DerivPtr dy = app->d2;
    if (dy->kind != K::S1 || dy->name != y)
        xfail("subject reduction: the eta variable is not typed by a lookup");
    // B <= !xi'' B <= E, then B <= !xi' E
    SubPtr pBE = sp_compose(forall_wrap(dy->xi, Bf), sp_intro_all(dy->xi, sp_ax()), dy->sub);
    SubPtr pBallE = sp_intro_all(app->xi, pBE);
    FormulaPtr qarrow = forall_wrap(app->xi, f_arrow(Ef, Ff));
    FormulaPtr distTo = f_arrow(forall_wrap(app->xi, Ef), forall_wrap(app->xi, Ff));
    SubPtr p3 = sp_trans(distTo, sp_dist(app->xi), sp_mono(pBallE, app->sub));
    SubPtr p4 = sp_forall_mono(xi, qarrow, p3);
    SubPtr p5 = sp_compose(L, p4, d->sub);
    // the function part, generalized over xi' then xi, then pushed along p5
    DerivPtr cur = app->d1;
    FormulaPtr curA = f_arrow(Ef, Ff);
    std::vector<VarSpec> gens = app->xi;
    gens.insert(gens.begin(), xi.begin(), xi.end());
    for (auto it = gens.rbegin(); it != gens.rend(); ++it) {
        cur = generalize_snode(E, ctx, cur, curA, *it);
        curA = forall_wrap({*it}, curA);
    }
    return resubtype(cur, curA, p5);
}

// ---- conversions -------------------------------------------------------------

namespace {

struct Converter {
    const EquationSystem& E;

    // base systems (R-rules, optionally Sub or Eta) into the S system
    DerivPtr to_s(const Context& ctx, const DerivPtr& d, const TermPtr& t,
                  const FormulaPtr& A) {
        using K = Derivation::Kind;
        switch (d->kind) {
            case K::R1:
                return dv_s1(d->name, {}, sp_ax());
            case K::R2: {
                if (A->kind != Formula::Kind::Arrow) xfail("convert: malformed abstraction");
                DerivPtr body =
                    to_s(ctx.extended(d->name, A->left), d->d1, t->sub, A->right);
                return dv_s2(d->name, body, sp_ax());
            }
            case K::R3: {
                DerivPtr fun = to_s(ctx, d->d1, t->sub, f_arrow(d->prem, A));
                DerivPtr arg = to_s(ctx, d->d2, t->arg, d->prem);
                return dv_s3(d->prem, {}, fun, arg, sp_ax());
            }
            case K::R4:
            case K::R6: {
                auto body = forall_strip(A, {d->gen});
                if (!body) xfail("convert: malformed generalization");
                DerivPtr child = to_s(ctx, d->d1, t, *body);
                return generalize_snode(E, ctx, child, *body, d->gen);
            }
            case K::R5: {
                DerivPtr child = to_s(ctx, d->d1, t, d->prem);
                return resubtype(child, d->prem, sp_all_elim_fo(d->inst_term, sp_ax()));
            }
            case K::R7: {
                DerivPtr child = to_s(ctx, d->d1, t, d->prem);
                return resubtype(child, d->prem,
                                 sp_all_elim_so(d->inst_params, d->inst_formula, sp_ax()));
            }
            case K::R8: {
                FormulaPtr premf = subst_fo(d->prem, {{d->hole, d->eq_u}});
                DerivPtr child = to_s(ctx, d->d1, t, premf);
                return resubtype(child, premf,
                                 sp_eq(d->prem, d->hole, d->eq_u, d->eq_v, d->eq_lr, sp_ax()));
            }
            case K::Sub: {
                FormulaPtr premf = sub_node_premise(E, ctx, d, A);
                DerivPtr child = to_s(ctx, d->d1, t, premf);
                return resubtype(child, premf, d->sub);
            }
            case K::Eta: {
                DerivPtr child = to_s(ctx, d->d1, d->eta_source, A);
                return subject_reduce(E, ctx, child, d->eta_source, A, true, d->eta_path);
            }
            default:
                xfail("convert: S-system nodes cannot appear in the source derivation");
        }
    }

    // S system back to the base-plus-containment presentation
    DerivPtr from_s(const Context& ctx, const DerivPtr& d, const TermPtr& t,
                    const FormulaPtr& A) {
        using K = Derivation::Kind;
        switch (d->kind) {
            case K::S1: {
                DerivPtr cur = dv_r1(d->name);
                for (auto it = d->xi.rbegin(); it != d->xi.rend(); ++it)
                    cur = dv_gen(*it, cur);
                if (!(d->sub->kind == SubProof::Kind::Ax)) cur = dv_sub(d->sub, cur);
                return cur;
            }
            case K::S2: {
                FormulaPtr L = synth_left_or_fail(E, d->sub, A);
                auto split = split_qarrow(L);
                if (!split) xfail("convert: malformed abstraction premise");
                DerivPtr body = from_s(ctx.extended(d->name, split->second->left), d->d1,
                                       t->sub, split->second->right);
                DerivPtr cur = dv_r2(d->name, body);
                for (auto it = split->first.rbegin(); it != split->first.rend(); ++it)
                    cur = dv_gen(*it, cur);
                if (!(d->sub->kind == SubProof::Kind::Ax && split->first.empty()))
                    cur = dv_sub(d->sub, cur);
                return cur;
            }
            case K::S3: {
                FormulaPtr L = synth_left_or_fail(E, d->sub, A);
                auto strip = forall_strip(L, d->xi);
                if (!strip) xfail("convert: malformed application premise");
                DerivPtr fun = from_s(ctx, d->d1, t->sub, f_arrow(d->prem, *strip));
                DerivPtr arg = from_s(ctx, d->d2, t->arg, d->prem);
                DerivPtr cur = dv_r3(d->prem, fun, arg);
                for (auto it = d->xi.rbegin(); it != d->xi.rend(); ++it) cur = dv_gen(*it, cur);
                if (!(d->sub->kind == SubProof::Kind::Ax && d->xi.empty()))
                    cur = dv_sub(d->sub, cur);
                return cur;
            }
            default:
                xfail("convert: expected an S-system derivation");
        }
    }

    // push a derivation of t : P along q : P <= B inside the eta system
    DerivPtr push_sub_eta(const Context& ctx, const DerivPtr& dt, const TermPtr& t,
                          const FormulaPtr& P, const SubPtr& q, const FormulaPtr& B) {
        switch (q->kind) {
            case SubProof::Kind::Ax:
                return dt;
            case SubProof::Kind::AllElim: {
                auto s = synth_right(E, q->a, P);
                if (!s.formula) xfail("convert: " + s.error);
                DerivPtr up = push_sub_eta(ctx, dt, t, P, q->a, s.formula);
                if (q->so_inst)
                    return dv_r7(s.formula, q->inst_params, q->inst_formula, up);
                return dv_r5(s.formula, q->inst_term, up);
            }
            case SubProof::Kind::AllIntro: {
                VarSpec v = q->xi.at(0);
                SubPtr inner = q->a;
                if (ctx.var_free(v)) {
                    std::set<std::string> avoid = ctx.free_fo();
                    for (auto& [k, a] : ctx.free_so()) avoid.insert(k);
                    auto bf = formula_free_fo(B);
                    avoid.insert(bf.begin(), bf.end());
                    for (auto& [k, a] : formula_free_so(B)) avoid.insert(k);
                    std::string nn = fresh_name(v.name, avoid);
                    inner = substitute_subproof(inner, one_rename(v, nn));
                    v.name = nn;
                }
                auto body = forall_strip(B, {v});
                if (!body) xfail("convert: malformed quantifier introduction");
                DerivPtr up = push_sub_eta(ctx, dt, t, P, inner, *body);
                return dv_gen(v, up);
            }
            case SubProof::Kind::Trans: {
                DerivPtr up = push_sub_eta(ctx, dt, t, P, q->a, q->mid);
                return push_sub_eta(ctx, up, t, q->mid, q->b, B);
            }
            case SubProof::Kind::EqStep: {
                FormulaPtr premf = subst_fo(q->mid, {{q->hole, q->eq_u}});
                DerivPtr up = push_sub_eta(ctx, dt, t, P, q->a, premf);
                return dv_r8(q->mid, q->hole, q->eq_u, q->eq_v, q->eq_lr, up);
            }
            case SubProof::Kind::Mono: {
                if (P->kind != Formula::Kind::Arrow || B->kind != Formula::Kind::Arrow)
                    xfail("convert: arrow monotonicity against non-arrows");
                std::set<std::string> avoid = free_vars(t);
                for (auto& b : ctx.binds) avoid.insert(b.name);
                std::string z = fresh_name("z", avoid);
                Context inner = ctx.extended(z, B->left);
                DerivPtr dz = push_sub_eta(inner, dv_r1(z), mk_var(z), B->left, q->a, P->left);
                DerivPtr dapp = dv_r3(P->left, dt, dz);
                TermPtr tz = mk_app(t, mk_var(z));
                DerivPtr dres = push_sub_eta(inner, dapp, tz, P->right, q->b, B->right);
                DerivPtr dlam = dv_r2(z, dres);
                return dv_eta(mk_abs(z, tz), {}, dlam);
            }
            case SubProof::Kind::Dist: {
                std::set<std::string> avoid = free_vars(t);
                for (auto& b : ctx.binds) avoid.insert(b.name);
                auto cf = ctx.free_fo();
                avoid.insert(cf.begin(), cf.end());
                for (auto& [k, a] : ctx.free_so()) avoid.insert(k);
                auto pf = formula_free_fo(P);
                avoid.insert(pf.begin(), pf.end());
                for (auto& [k, a] : formula_free_so(P)) avoid.insert(k);
                std::vector<VarSpec> xi;
                for (auto& v : q->xi) {
                    VarSpec nv = v;
                    nv.name = fresh_name(v.name, avoid);
                    avoid.insert(nv.name);
                    xi.push_back(nv);
                }
                auto body = forall_strip(P, xi);
                if (!body || (*body)->kind != Formula::Kind::Arrow)
                    xfail("convert: distribution against a non-arrow body");
                FormulaPtr C = (*body)->left, D = (*body)->right;
                std::string z = fresh_name("z", avoid);
                Context inner = ctx.extended(z, forall_wrap(xi, C));
                // z : !xi C eliminated to C; t : !xi(C->D) eliminated to C->D
                DerivPtr dz = dv_r1(z);
                FormulaPtr curz = forall_wrap(xi, C);
                DerivPtr dtt = dt;
                FormulaPtr curt = forall_wrap(xi, f_arrow(C, D));
                for (auto& v : xi) {
                    if (v.second_order) {
                        std::vector<std::string> ps;
                        std::vector<FoPtr> as;
                        for (int i = 0; i < v.arity; ++i) {
                            ps.push_back("p" + std::to_string(i));
                            as.push_back(fo_var(ps.back()));
                        }
                        FormulaPtr atom = f_var2(v.name, v.arity, as);
                        dz = dv_r7(curz, ps, atom, dz);
                        dtt = dv_r7(curt, ps, atom, dtt);
                    } else {
                        dz = dv_r5(curz, fo_var(v.name), dz);
                        dtt = dv_r5(curt, fo_var(v.name), dtt);
                    }
                    curz = *forall_strip(curz, {v});
                    curt = *forall_strip(curt, {v});
                }
                DerivPtr dapp = dv_r3(C, dtt, dz);
                for (auto it = xi.rbegin(); it != xi.rend(); ++it) dapp = dv_gen(*it, dapp);
                DerivPtr dlam = dv_r2(z, dapp);
                TermPtr tz = mk_abs(z, mk_app(t, mk_var(z)));
                return dv_eta(tz, {}, dlam);
            }
        }
        xfail("convert: unsupported containment node");
    }

    // replace containment nodes by eta-system reasoning
    DerivPtr etaize(const Context& ctx, const DerivPtr& d, const TermPtr& t,
                    const FormulaPtr& A) {
        using K = Derivation::Kind;
        switch (d->kind) {
            case K::R1:
                return d;
            case K::R2:
                return dv_r2(d->name, etaize(ctx.extended(d->name, A->left), d->d1, t->sub,
                                             A->right));
            case K::R3:
                return dv_r3(d->prem, etaize(ctx, d->d1, t->sub, f_arrow(d->prem, A)),
                             etaize(ctx, d->d2, t->arg, d->prem));
            case K::R4:
            case K::R6: {
                auto body = forall_strip(A, {d->gen});
                if (!body) xfail("convert: malformed generalization");
                return dv_gen(d->gen, etaize(ctx, d->d1, t, *body));
            }
            case K::R5:
                return dv_r5(d->prem, d->inst_term, etaize(ctx, d->d1, t, d->prem));
            case K::R7:
                return dv_r7(d->prem, d->inst_params, d->inst_formula,
                             etaize(ctx, d->d1, t, d->prem));
            case K::R8: {
                FormulaPtr premf = subst_fo(d->prem, {{d->hole, d->eq_u}});
                return dv_r8(d->prem, d->hole, d->eq_u, d->eq_v, d->eq_lr,
                             etaize(ctx, d->d1, t, premf));
            }
            case K::Sub: {
                FormulaPtr premf = sub_node_premise(E, ctx, d, A);
                DerivPtr child = etaize(ctx, d->d1, t, premf);
                return push_sub_eta(ctx, child, t, premf, d->sub, A);
            }
            default:
                xfail("convert: unexpected node while building an eta-system derivation");
        }
    }
};

}  // namespace

DerivPtr convert(System from, System to, const EquationSystem& E, const Context& ctx,
                 const DerivPtr& d, const TermPtr& t, const FormulaPtr& A) {
    if (from == to) return d;
    Converter cv{E};
    if (from == System::AF2 && (to == System::AF2Sub || to == System::AF2Eta)) return d;
    DerivPtr s =
        from == System::AF2S ? d : cv.to_s(ctx, d, t, A);  // any source reaches the S system
    if (to == System::AF2S) return s;
    if (to == System::AF2Sub) return cv.from_s(ctx, s, t, A);
    if (to == System::AF2Eta) {
        DerivPtr base = cv.from_s(ctx, s, t, A);
        return cv.etaize(ctx, base, t, A);
    }
    xfail("conversion into the base system is not supported; use the eta-expansion witness");
}

// ---- eta-expansion witness ---------------------------------------------------

EtaWitness eta_expand_witness(const EquationSystem& E, const Context& ctx, const DerivPtr& d,
                              const TermPtr& t, const FormulaPtr& A) {
    using K = Derivation::Kind;
    switch (d->kind) {
        case K::R1:
            return {t, d};
        case K::R2: {
            if (A->kind != Formula::Kind::Arrow) xfail("witness: malformed abstraction");
            EtaWitness w = eta_expand_witness(E, ctx.extended(d->name, A->left), d->d1, t->sub,
                                              A->right);
            return {mk_abs(d->name, w.witness), dv_r2(d->name, w.deriv)};
        }
        case K::R3: {
            EtaWitness wf = eta_expand_witness(E, ctx, d->d1, t->sub, f_arrow(d->prem, A));
            EtaWitness wa = eta_expand_witness(E, ctx, d->d2, t->arg, d->prem);
            return {mk_app(wf.witness, wa.witness), dv_r3(d->prem, wf.deriv, wa.deriv)};
        }
        case K::R4:
        case K::R6: {
            auto body = forall_strip(A, {d->gen});
            if (!body) xfail("witness: malformed generalization");
            EtaWitness w = eta_expand_witness(E, ctx, d->d1, t, *body);
            return {w.witness, dv_gen(d->gen, w.deriv)};
        }
        case K::R5: {
            EtaWitness w = eta_expand_witness(E, ctx, d->d1, t, d->prem);
            return {w.witness, dv_r5(d->prem, d->inst_term, w.deriv)};
        }
        case K::R7: {
            EtaWitness w = eta_expand_witness(E, ctx, d->d1, t, d->prem);
            return {w.witness, dv_r7(d->prem, d->inst_params, d->inst_formula, w.deriv)};
        }
        case K::R8: {
            FormulaPtr premf = subst_fo(d->prem, {{d->hole, d->eq_u}});
            EtaWitness w = eta_expand_witness(E, ctx, d->d1, t, premf);
            return {w.witness, dv_r8(d->prem, d->hole, d->eq_u, d->eq_v, d->eq_lr, w.deriv)};
        }
        case K::Eta: {
            return eta_expand_witness(E, ctx, d->d1, d->eta_source, A);
        }
        default:
            xfail("witness extraction expects an eta-system derivation");
    }
}

// ---- rule permutation --------------------------------------------------------

DerivPtr normalize_derivation(const EquationSystem& E, const Context& ctx, const DerivPtr& d,
                              const TermPtr& t, const FormulaPtr& A) {
    using K = Derivation::Kind;
    // collect the non-structural chain above the next structural node
    struct ChainItem {
        DerivPtr node;
        FormulaPtr conclusion;
    };
    std::vector<ChainItem> chain;
    DerivPtr cur = d;
    FormulaPtr curA = A;
    auto premise_of = [&](const DerivPtr& n, const FormulaPtr& conc) -> FormulaPtr {
        switch (n->kind) {
            case K::Sub:
                return sub_node_premise(E, ctx, n, conc);
            case K::R4:
            case K::R6: {
                auto body = forall_strip(conc, {n->gen});
                if (!body) xfail("normalize: malformed generalization");
                return *body;
            }
            case K::R5:
            case K::R7:
                return n->prem;
            case K::R8:
                return subst_fo(n->prem, {{n->hole, n->eq_u}});
            default:
                xfail("normalize: unexpected node");
        }
    };
    while (cur->kind == K::Sub || cur->kind == K::R4 || cur->kind == K::R5 ||
           cur->kind == K::R6 || cur->kind == K::R7 || cur->kind == K::R8) {
        chain.push_back({cur, curA});
        curA = premise_of(cur, curA);
        cur = cur->d1;
    }
    // normalize below the structural node
    DerivPtr base;
    FormulaPtr P0 = curA;
    switch (cur->kind) {
        case K::R1:
            base = cur;
            break;
        case K::R2: {
            // the collected chain never changes the subject
            if (P0->kind != Formula::Kind::Arrow) xfail("normalize: malformed abstraction");
            base = dv_r2(cur->name,
                         normalize_derivation(E, ctx.extended(cur->name, P0->left), cur->d1,
                                              t->sub, P0->right));
            break;
        }
        case K::R3:
            base = dv_r3(cur->prem,
                         normalize_derivation(E, ctx, cur->d1, t->sub,
                                              f_arrow(cur->prem, P0)),
                         normalize_derivation(E, ctx, cur->d2, t->arg, cur->prem));
            break;
        default:
            xfail("normalize: unexpected structural node");
    }
    // replay the chain: generalizations first, then one fused containment
    std::vector<VarSpec> gens;
    SubPtr acc = sp_ax();
    FormulaPtr left = P0;   // !gens P0
    FormulaPtr curc = P0;   // conclusion reached so far
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        const DerivPtr& n = it->node;
        switch (n->kind) {
            case K::Sub:
                acc = sp_compose(curc, acc, n->sub);
                break;
            case K::R5:
                acc = sp_compose(curc, acc, sp_all_elim_fo(n->inst_term, sp_ax()));
                break;
            case K::R7:
                acc = sp_compose(curc, acc,
                                 sp_all_elim_so(n->inst_params, n->inst_formula, sp_ax()));
                break;
            case K::R8:
                acc = sp_compose(curc, acc,
                                 sp_eq(n->prem, n->hole, n->eq_u, n->eq_v, n->eq_lr, sp_ax()));
                break;
            case K::R4:
            case K::R6:
                if (acc->kind != SubProof::Kind::Ax)
                    acc = sp_forall_mono({n->gen}, left, acc);
                gens.insert(gens.begin(), n->gen);
                left = forall_wrap({n->gen}, left);
                break;
            default:
                break;
        }
        curc = it->conclusion;
    }
    DerivPtr out = base;
    for (auto it = gens.rbegin(); it != gens.rend(); ++it) out = dv_gen(*it, out);
    if (acc->kind != SubProof::Kind::Ax) out = dv_sub(acc, out);
    return out;
}

}  // namespace af2
