#include "af2/subtyping.hpp"

#include <functional>
#include <sstream>

namespace af2 {

SubPtr sp_ax() {
    auto p = std::make_shared<SubProof>();
    p->kind = SubProof::Kind::Ax;
    return p;
}

SubPtr sp_dist(std::vector<VarSpec> xi) {
    auto p = std::make_shared<SubProof>();
    p->kind = SubProof::Kind::Dist;
    p->xi = std::move(xi);
    return p;
}

SubPtr sp_mono(SubPtr left, SubPtr right) {
    auto p = std::make_shared<SubProof>();
    p->kind = SubProof::Kind::Mono;
    p->a = std::move(left);
    p->b = std::move(right);
    return p;
}

SubPtr sp_all_elim_fo(FoPtr f, SubPtr child) {
    auto p = std::make_shared<SubProof>();
    p->kind = SubProof::Kind::AllElim;
    p->so_inst = false;
    p->inst_term = std::move(f);
    p->a = std::move(child);
    return p;
}

SubPtr sp_all_elim_so(std::vector<std::string> params, FormulaPtr g, SubPtr child) {
    auto p = std::make_shared<SubProof>();
    p->kind = SubProof::Kind::AllElim;
    p->so_inst = true;
    p->inst_params = std::move(params);
    p->inst_formula = std::move(g);
    p->a = std::move(child);
    return p;
}

SubPtr sp_all_intro(VarSpec v, SubPtr child) {
    auto p = std::make_shared<SubProof>();
    p->kind = SubProof::Kind::AllIntro;
    p->xi = {std::move(v)};
    p->a = std::move(child);
    return p;
}

SubPtr sp_trans(FormulaPtr mid, SubPtr left, SubPtr right) {
    auto p = std::make_shared<SubProof>();
    p->kind = SubProof::Kind::Trans;
    p->mid = std::move(mid);
    p->a = std::move(left);
    p->b = std::move(right);
    return p;
}

SubPtr sp_eq(FormulaPtr templ, std::string hole, FoPtr u, FoPtr v, bool lr, SubPtr child) {
    auto p = std::make_shared<SubProof>();
    p->kind = SubProof::Kind::EqStep;
    p->mid = std::move(templ);
    p->hole = std::move(hole);
    p->eq_u = std::move(u);
    p->eq_v = std::move(v);
    p->eq_lr = lr;
    p->a = std::move(child);
    return p;
}

// ---- checking --------------------------------------------------------------

namespace {

Verdict fail_at(const std::string& path, const std::string& reason) {
    return Verdict{false, path, reason};
}

// instantiate a quantified formula per the node's data
SynthResult do_instantiate(const SubPtr& p, const FormulaPtr& quantified, const std::string& path) {
    if (p->so_inst) {
        if (quantified->kind != Formula::Kind::AllSo)
            return {nullptr, "forall-elim with formula instantiation needs a second-order quantifier, got " +
                                 print_formula(quantified),
                    path};
        if (quantified->arity != (int)p->inst_params.size())
            return {nullptr, "forall-elim instantiation arity mismatch", path};
        return {subst_so(quantified->left, quantified->name, p->inst_params, p->inst_formula), "", path};
    }
    if (quantified->kind != Formula::Kind::AllFo)
        return {nullptr, "forall-elim with term instantiation needs a first-order quantifier, got " +
                             print_formula(quantified),
                path};
    return {subst_fo(quantified->left, {{quantified->name, p->inst_term}}), "", path};
}

struct Checker {
    const EquationSystem& E;

    Verdict check(const SubPtr& p, const FormulaPtr& A, const FormulaPtr& B,
                  const std::string& path) {
        switch (p->kind) {
            case SubProof::Kind::Ax:
                if (!formula_alpha_eq(A, B))
                    return fail_at(path, "(ax) requires identical sides: " + print_formula(A) +
                                             " vs " + print_formula(B));
                return {};
            case SubProof::Kind::Dist: {
                auto body = forall_strip(A, p->xi);
                if (!body || (*body)->kind != Formula::Kind::Arrow)
                    return fail_at(path, "(dist) left side is not !xi (C -> D): " + print_formula(A));
                FormulaPtr expect =
                    f_arrow(forall_wrap(p->xi, (*body)->left), forall_wrap(p->xi, (*body)->right));
                if (!formula_alpha_eq(B, expect))
                    return fail_at(path, "(dist) right side should be " + print_formula(expect));
                return {};
            }
            case SubProof::Kind::Mono: {
                if (A->kind != Formula::Kind::Arrow || B->kind != Formula::Kind::Arrow)
                    return fail_at(path, "(->) requires arrows on both sides");
                auto v = check(p->a, B->left, A->left, path + ".0");
                if (!v.ok) return v;
                return check(p->b, A->right, B->right, path + ".1");
            }
            case SubProof::Kind::AllElim: {
                auto s = synthR(p->a, A, path + ".0");
                if (!s.formula) return fail_at(s.path, s.error);
                auto inst = do_instantiate(p, s.formula, path);
                if (!inst.formula) return fail_at(path, inst.error);
                if (!formula_alpha_eq(inst.formula, B))
                    return fail_at(path, "(forall-elim) concludes " + print_formula(inst.formula) +
                                             ", expected " + print_formula(B));
                return {};
            }
            case SubProof::Kind::AllIntro: {
                const VarSpec& v = p->xi.at(0);
                auto body = forall_strip(B, {v});
                if (!body)
                    return fail_at(path, "(forall-intro) right side is not a matching quantifier: " +
                                             print_formula(B));
                if (varspec_free_in(v, A))
                    return fail_at(path, "(forall-intro) side condition: " + v.name +
                                             " is free in " + print_formula(A));
                return check(p->a, A, *body, path + ".0");
            }
            case SubProof::Kind::Trans: {
                auto v = check(p->a, A, p->mid, path + ".0");
                if (!v.ok) return v;
                return check(p->b, p->mid, B, path + ".1");
            }
            case SubProof::Kind::EqStep: {
                if (!match_particular_case(E, p->eq_u, p->eq_v))
                    return fail_at(path, "(e) " + print_fo(p->eq_u) + " = " + print_fo(p->eq_v) +
                                             " is not a particular case of E");
                FormulaPtr prem = subst_fo(p->mid, {{p->hole, p->eq_u}});
                FormulaPtr conc = subst_fo(p->mid, {{p->hole, p->eq_v}});
                if (!formula_alpha_eq(conc, B))
                    return fail_at(path, "(e) concludes " + print_formula(conc) + ", expected " +
                                             print_formula(B));
                return check(p->a, A, prem, path + ".0");
            }
        }
        return fail_at(path, "unknown node");
    }

    SynthResult synthR(const SubPtr& p, const FormulaPtr& A, const std::string& path) {
        switch (p->kind) {
            case SubProof::Kind::Ax:
                return {A, "", path};
            case SubProof::Kind::Dist: {
                auto body = forall_strip(A, p->xi);
                if (!body || (*body)->kind != Formula::Kind::Arrow)
                    return {nullptr, "(dist) left side is not !xi (C -> D)", path};
                return {f_arrow(forall_wrap(p->xi, (*body)->left),
                                forall_wrap(p->xi, (*body)->right)),
                        "", path};
            }
            case SubProof::Kind::Mono: {
                if (A->kind != Formula::Kind::Arrow)
                    return {nullptr, "(->) requires an arrow on the left", path};
                auto cl = synthL(p->a, A->left, path + ".0");
                if (!cl.formula) return cl;
                auto dr = synthR(p->b, A->right, path + ".1");
                if (!dr.formula) return dr;
                return {f_arrow(cl.formula, dr.formula), "", path};
            }
            case SubProof::Kind::AllElim: {
                auto s = synthR(p->a, A, path + ".0");
                if (!s.formula) return s;
                return do_instantiate(p, s.formula, path);
            }
            case SubProof::Kind::AllIntro: {
                const VarSpec& v = p->xi.at(0);
                if (varspec_free_in(v, A))
                    return {nullptr, "(forall-intro) side condition: " + v.name + " free in left",
                            path};
                auto s = synthR(p->a, A, path + ".0");
                if (!s.formula) return s;
                return {forall_wrap({v}, s.formula), "", path};
            }
            case SubProof::Kind::Trans: {
                auto v = check(p->a, A, p->mid, path + ".0");
                if (!v.ok) return {nullptr, v.reason, v.path};
                return synthR(p->b, p->mid, path + ".1");
            }
            case SubProof::Kind::EqStep: {
                if (!match_particular_case(E, p->eq_u, p->eq_v))
                    return {nullptr, "(e) not a particular case of E", path};
                FormulaPtr prem = subst_fo(p->mid, {{p->hole, p->eq_u}});
                auto v = check(p->a, A, prem, path + ".0");
                if (!v.ok) return {nullptr, v.reason, v.path};
                return {subst_fo(p->mid, {{p->hole, p->eq_v}}), "", path};
            }
        }
        return {nullptr, "unknown node", path};
    }

    SynthResult synthL(const SubPtr& p, const FormulaPtr& B, const std::string& path) {
        switch (p->kind) {
            case SubProof::Kind::Ax:
                return {B, "", path};
            case SubProof::Kind::Dist: {
                if (B->kind != Formula::Kind::Arrow)
                    return {nullptr, "(dist) right side is not an arrow", path};
                auto c = forall_strip(B->left, p->xi);
                auto d = forall_strip(B->right, p->xi);
                if (!c || !d) return {nullptr, "(dist) right side is not !xi C -> !xi D", path};
                return {forall_wrap(p->xi, f_arrow(*c, *d)), "", path};
            }
            case SubProof::Kind::Mono: {
                if (B->kind != Formula::Kind::Arrow)
                    return {nullptr, "(->) requires an arrow on the right", path};
                auto c = synthR(p->a, B->left, path + ".0");
                if (!c.formula) return c;
                auto d = synthL(p->b, B->right, path + ".1");
                if (!d.formula) return d;
                return {f_arrow(c.formula, d.formula), "", path};
            }
            case SubProof::Kind::AllElim: {
                // a self-instantiation over an axiom (eliminating a binder by
                // the bound variable itself) is recoverable: the left side is
                // the right side re-quantified
                if (p->a->kind == SubProof::Kind::Ax) {
                    if (!p->so_inst && p->inst_term->is_var)
                        return {f_all_fo(p->inst_term->name, B), "", path};
                    if (p->so_inst && p->inst_formula->kind == Formula::Kind::Var2 &&
                        p->inst_formula->args.size() == p->inst_params.size()) {
                        bool ident = (int)p->inst_params.size() == p->inst_formula->arity;
                        for (size_t i = 0; ident && i < p->inst_params.size(); ++i)
                            ident = p->inst_formula->args[i]->is_var &&
                                    p->inst_formula->args[i]->name == p->inst_params[i];
                        if (ident)
                            return {f_all_so(p->inst_formula->name, p->inst_formula->arity, B),
                                    "", path};
                    }
                }
                return {nullptr,
                        "(forall-elim) conclusion is not determined from the right side alone",
                        path};
            }
            case SubProof::Kind::AllIntro: {
                const VarSpec& v = p->xi.at(0);
                auto body = forall_strip(B, {v});
                if (!body) return {nullptr, "(forall-intro) right side mismatch", path};
                auto s = synthL(p->a, *body, path + ".0");
                if (!s.formula) return s;
                if (varspec_free_in(v, s.formula))
                    return {nullptr, "(forall-intro) side condition violated", path};
                return s;
            }
            case SubProof::Kind::Trans: {
                auto v = check(p->b, p->mid, B, path + ".1");
                if (!v.ok) return {nullptr, v.reason, v.path};
                return synthL(p->a, p->mid, path + ".0");
            }
            case SubProof::Kind::EqStep: {
                if (!match_particular_case(E, p->eq_u, p->eq_v))
                    return {nullptr, "(e) not a particular case of E", path};
                FormulaPtr conc = subst_fo(p->mid, {{p->hole, p->eq_v}});
                if (!formula_alpha_eq(conc, B))
                    return {nullptr, "(e) conclusion mismatch", path};
                return synthL(p->a, subst_fo(p->mid, {{p->hole, p->eq_u}}), path + ".0");
            }
        }
        return {nullptr, "unknown node", path};
    }
};

}  // namespace

Verdict check_subproof(const EquationSystem& E, const SubPtr& p, const FormulaPtr& A,
                       const FormulaPtr& B) {
    Checker c{E};
    return c.check(p, A, B, "root");
}

SynthResult synth_right(const EquationSystem& E, const SubPtr& p, const FormulaPtr& A) {
    Checker c{E};
    return c.synthR(p, A, "root");
}

SynthResult synth_left(const EquationSystem& E, const SubPtr& p, const FormulaPtr& B) {
    Checker c{E};
    return c.synthL(p, B, "root");
}

// ---- substitution ----------------------------------------------------------

namespace {

void collect_sigma_avoid(const Substitution& sigma, std::set<std::string>& avoid) {
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
}

Substitution extend_rename(const Substitution& sigma, const VarSpec& from, const std::string& to) {
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

SubPtr subst_sp(const SubPtr& p, const Substitution& sigma, const std::set<std::string>& avoid) {
    switch (p->kind) {
        case SubProof::Kind::Ax:
            return sp_ax();
        case SubProof::Kind::Dist: {
            // binder names are renamed only when they would collide with sigma
            std::vector<VarSpec> xi;
            for (auto& v : p->xi) {
                VarSpec nv = v;
                nv.name = fresh_name(v.name, avoid);
                xi.push_back(nv);
            }
            return sp_dist(std::move(xi));
        }
        case SubProof::Kind::Mono:
            return sp_mono(subst_sp(p->a, sigma, avoid), subst_sp(p->b, sigma, avoid));
        case SubProof::Kind::AllElim: {
            if (p->so_inst) {
                // parameters are binders of the instantiation formula
                Substitution inner = sigma;
                for (auto& par : p->inst_params) inner.fo.erase(par);
                return sp_all_elim_so(p->inst_params, apply_subst(p->inst_formula, inner),
                                      subst_sp(p->a, sigma, avoid));
            }
            return sp_all_elim_fo(fo_subst(p->inst_term, sigma.fo), subst_sp(p->a, sigma, avoid));
        }
        case SubProof::Kind::AllIntro: {
            VarSpec v = p->xi.at(0);
            std::string nn = fresh_name(v.name, avoid);
            if (nn == v.name) return sp_all_intro(v, subst_sp(p->a, sigma, avoid));
            Substitution inner = extend_rename(sigma, v, nn);
            VarSpec nv = v;
            nv.name = nn;
            return sp_all_intro(nv, subst_sp(p->a, inner, avoid));
        }
        case SubProof::Kind::Trans:
            return sp_trans(apply_subst(p->mid, sigma), subst_sp(p->a, sigma, avoid),
                            subst_sp(p->b, sigma, avoid));
        case SubProof::Kind::EqStep: {
            std::string nh = fresh_name(p->hole, avoid);
            Substitution inner = sigma;
            if (nh != p->hole) inner.fo[p->hole] = fo_var(nh);
            inner.fo.erase(nh);
            return sp_eq(apply_subst(p->mid, inner), nh, fo_subst(p->eq_u, sigma.fo),
                         fo_subst(p->eq_v, sigma.fo), p->eq_lr, subst_sp(p->a, sigma, avoid));
        }
    }
    return p;
}

}  // namespace

SubPtr substitute_subproof(const SubPtr& p, const Substitution& sigma) {
    std::set<std::string> avoid;
    collect_sigma_avoid(sigma, avoid);
    return subst_sp(p, sigma, avoid);
}

std::vector<std::string> subproof_skeleton(const SubPtr& p) {
    std::vector<std::string> out;
    std::function<void(const SubPtr&)> go = [&](const SubPtr& q) {
        static const char* names[] = {"ax", "dist", "mono", "forall-elim", "forall-intro",
                                      "trans", "eq"};
        out.push_back(names[(int)q->kind]);
        if (q->a) go(q->a);
        if (q->b) go(q->b);
    };
    go(p);
    return out;
}

// ---- derived builders ------------------------------------------------------

static FoPtr var_as_inst(const VarSpec& v) { return fo_var(v.name); }

static SubPtr elim_one(const VarSpec& v, SubPtr child) {
    if (v.second_order) {
        std::vector<std::string> ps;
        std::vector<FoPtr> as;
        for (int i = 0; i < v.arity; ++i) {
            ps.push_back("p" + std::to_string(i));
            as.push_back(fo_var(ps.back()));
        }
        return sp_all_elim_so(ps, f_var2(v.name, v.arity, as), std::move(child));
    }
    return sp_all_elim_fo(var_as_inst(v), std::move(child));
}

SubPtr sp_strip_all(const std::vector<VarSpec>& xi) {
    SubPtr p = sp_ax();
    for (auto& v : xi) p = elim_one(v, p);
    return p;
}

SubPtr sp_compose(const FormulaPtr& mid, SubPtr p, SubPtr q) {
    if (p->kind == SubProof::Kind::Ax) return q;
    if (q->kind == SubProof::Kind::Ax) return p;
    return sp_trans(mid, std::move(p), std::move(q));
}

SubPtr sp_intro_all(const std::vector<VarSpec>& xi, SubPtr base) {
    SubPtr p = std::move(base);
    for (auto it = xi.rbegin(); it != xi.rend(); ++it) p = sp_all_intro(*it, p);
    return p;
}

SubPtr sp_forall_mono(const std::vector<VarSpec>& xi, const FormulaPtr& B, SubPtr q) {
    if (xi.empty()) return q;
    SubPtr strip = sp_strip_all(xi);
    SubPtr toA = sp_compose(B, strip, std::move(q));
    return sp_intro_all(xi, toA);
}

// ---- search ----------------------------------------------------------------

namespace {

// alpha-canonical key for visited-set lookups
std::string canon_key(const FormulaPtr& f) {
    std::ostringstream os;
    std::vector<std::string> fo, so;
    std::function<void(const FormulaPtr&)> go;
    std::function<void(const FoPtr&)> got = [&](const FoPtr& t) {
        if (t->is_var) {
            for (int i = (int)fo.size() - 1; i >= 0; --i)
                if (fo[i] == t->name) {
                    os << "#" << i;
                    return;
                }
            os << t->name;
            return;
        }
        os << t->name << "(";
        for (auto& a : t->args) {
            got(a);
            os << ",";
        }
        os << ")";
    };
    go = [&](const FormulaPtr& a) {
        switch (a->kind) {
            case Formula::Kind::Absurd:
                os << "_|_";
                return;
            case Formula::Kind::Pred:
            case Formula::Kind::Var2:
                if (a->kind == Formula::Kind::Var2) {
                    bool found = false;
                    for (int i = (int)so.size() - 1; i >= 0 && !found; --i)
                        if (so[i] == a->name) {
                            os << "@" << i;
                            found = true;
                        }
                    if (!found) os << a->name;
                } else {
                    os << a->name;
                }
                os << "(";
                for (auto& t : a->args) {
                    got(t);
                    os << ",";
                }
                os << ")";
                return;
            case Formula::Kind::Arrow:
                os << "(";
                go(a->left);
                os << "->";
                go(a->right);
                os << ")";
                return;
            case Formula::Kind::AllFo:
                os << "!.";
                fo.push_back(a->name);
                go(a->left);
                fo.pop_back();
                return;
            case Formula::Kind::AllSo:
                os << "!!" << a->arity << ".";
                so.push_back(a->name);
                go(a->left);
                so.pop_back();
                return;
        }
    };
    go(f);
    return os.str();
}

void collect_subformulas(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    out.push_back(f);
    switch (f->kind) {
        case Formula::Kind::Arrow:
            collect_subformulas(f->left, out);
            collect_subformulas(f->right, out);
            break;
        case Formula::Kind::AllFo:
        case Formula::Kind::AllSo:
            collect_subformulas(f->left, out);
            break;
        default:
            break;
    }
}

void collect_subterms(const FoPtr& t, std::vector<FoPtr>& out) {
    out.push_back(t);
    for (auto& a : t->args) collect_subterms(a, out);
}

void collect_formula_terms(const FormulaPtr& f, std::vector<FoPtr>& out) {
    switch (f->kind) {
        case Formula::Kind::Pred:
        case Formula::Kind::Var2:
            for (auto& t : f->args) collect_subterms(t, out);
            break;
        case Formula::Kind::Arrow:
            collect_formula_terms(f->left, out);
            collect_formula_terms(f->right, out);
            break;
        case Formula::Kind::AllFo:
        case Formula::Kind::AllSo:
            collect_formula_terms(f->left, out);
            break;
        default:
            break;
    }
}

struct SubSearcher {
    const EquationSystem& E;
    const SubSearchLimits& limits;
    std::set<std::string> visited;

    std::optional<SubPtr> search(const FormulaPtr& A, const FormulaPtr& B, int depth) {
        if (formula_alpha_eq(A, B)) return sp_ax();
        if (depth <= 0) return std::nullopt;
        std::string key = canon_key(A) + "<=" + canon_key(B);
        if (visited.count(key)) return std::nullopt;
        visited.insert(key);
        auto out = expand(A, B, depth);
        visited.erase(key);
        return out;
    }

    std::optional<SubPtr> expand(const FormulaPtr& A, const FormulaPtr& B, int depth) {
        // (dist), over every quantifier prefix of A
        if (B->kind == Formula::Kind::Arrow) {
            std::vector<VarSpec> xi;
            FormulaPtr cur = A;
            while (cur->kind == Formula::Kind::AllFo || cur->kind == Formula::Kind::AllSo) {
                xi.push_back(cur->kind == Formula::Kind::AllFo
                                 ? VarSpec{false, cur->name, 0}
                                 : VarSpec{true, cur->name, cur->arity});
                cur = cur->left;
                if (!xi.empty() && cur->kind == Formula::Kind::Arrow) {
                    FormulaPtr distd = f_arrow(forall_wrap(xi, cur->left), forall_wrap(xi, cur->right));
                    if (formula_alpha_eq(distd, B)) return sp_dist(xi);
                    if (auto rest = search(distd, B, depth - 1))
                        return sp_trans(distd, sp_dist(xi), *rest);
                }
            }
        }
        // (forall-intro)
        if (B->kind == Formula::Kind::AllFo || B->kind == Formula::Kind::AllSo) {
            VarSpec v = B->kind == Formula::Kind::AllFo ? VarSpec{false, B->name, 0}
                                                        : VarSpec{true, B->name, B->arity};
            std::set<std::string> avoid = formula_free_fo(A);
            for (auto& [k, a] : formula_free_so(A)) avoid.insert(k);
            auto bodyfree = formula_free_fo(B->left);
            avoid.insert(bodyfree.begin(), bodyfree.end());
            for (auto& [k, a] : formula_free_so(B->left)) avoid.insert(k);
            v.name = fresh_name(v.name, avoid);
            auto body = forall_strip(B, {v});
            if (body && !varspec_free_in(v, A))
                if (auto sub = search(A, *body, depth - 1)) return sp_all_intro(v, *sub);
        }
        // (->)
        if (A->kind == Formula::Kind::Arrow && B->kind == Formula::Kind::Arrow) {
            if (auto l = search(B->left, A->left, depth - 1))
                if (auto r = search(A->right, B->right, depth - 1)) return sp_mono(*l, *r);
        }
        // (forall-elim) through (tr)
        if (A->kind == Formula::Kind::AllFo) {
            for (auto& cand : term_candidates(A, B)) {
                FormulaPtr inst = subst_fo(A->left, {{A->name, cand}});
                if (auto rest = search(inst, B, depth - 1))
                    return sp_compose(inst, sp_all_elim_fo(cand, sp_ax()), *rest);
            }
        }
        if (A->kind == Formula::Kind::AllSo) {
            for (auto& [params, g] : formula_candidates(A, B)) {
                if ((int)params.size() != A->arity) continue;
                FormulaPtr inst = subst_so(A->left, A->name, params, g);
                if (auto rest = search(inst, B, depth - 1))
                    return sp_compose(inst, sp_all_elim_so(params, g, sp_ax()), *rest);
            }
        }
        // (e): rewrite one equation instance inside A
        if (!E.empty()) {
            for (auto& [templ, hole, u, v] : eq_steps(A)) {
                FormulaPtr stepped = subst_fo(templ, {{hole, v}});
                if (auto rest = search(stepped, B, depth - 1))
                    return sp_compose(stepped, sp_eq(templ, hole, u, v, true, sp_ax()), *rest);
            }
        }
        return std::nullopt;
    }

    std::vector<FoPtr> term_candidates(const FormulaPtr& A, const FormulaPtr& B) {
        std::vector<FoPtr> raw = limits.term_hints;
        collect_formula_terms(B, raw);
        collect_formula_terms(A, raw);
        for (auto& v : formula_free_fo(B)) raw.push_back(fo_var(v));
        std::vector<FoPtr> out;
        for (auto& t : raw) {
            bool dup = false;
            for (auto& o : out) dup = dup || fo_eq(o, t);
            if (!dup) out.push_back(t);
        }
        return out;
    }

    std::vector<std::pair<std::vector<std::string>, FormulaPtr>> formula_candidates(
        const FormulaPtr& A, const FormulaPtr& B) {
        std::vector<std::pair<std::vector<std::string>, FormulaPtr>> out;
        int arity = A->arity;
        std::vector<std::string> params;
        for (int i = 0; i < arity; ++i) params.push_back("q" + std::to_string(i));
        std::vector<FormulaPtr> subs = limits.formula_hints;
        collect_subformulas(B, subs);
        for (auto& g : subs) out.emplace_back(params, g);
        return out;
    }

    // all single-position equation rewrites of the atoms of A
    std::vector<std::tuple<FormulaPtr, std::string, FoPtr, FoPtr>> eq_steps(const FormulaPtr& A) {
        std::vector<std::tuple<FormulaPtr, std::string, FoPtr, FoPtr>> out;
        std::set<std::string> avoid = formula_free_fo(A);
        std::string hole = fresh_name("hole", avoid);
        std::vector<FoPtr> terms;
        collect_formula_terms(A, terms);
        for (auto& occ : terms) {
            for (auto& eq : E) {
                for (int dir = 0; dir < 2; ++dir) {
                    const FoPtr& lhs = dir == 0 ? eq.left : eq.right;
                    const FoPtr& rhs = dir == 0 ? eq.right : eq.left;
                    std::map<std::string, FoPtr> b;
                    if (!fo_match(lhs, occ, b)) continue;
                    bool closed = true;
                    for (auto& v : fo_vars(rhs)) closed = closed && b.count(v);
                    if (!closed) continue;
                    // template: A with the first occurrence of occ replaced by hole
                    bool done = false;
                    FormulaPtr templ = replace_first(A, occ, hole, done);
                    if (done) out.emplace_back(templ, hole, occ, fo_subst(rhs, b));
                }
            }
        }
        return out;
    }

    static FoPtr replace_first_term(const FoPtr& t, const FoPtr& target, const std::string& hole,
                                    bool& done) {
        if (done) return t;
        if (fo_eq(t, target)) {
            done = true;
            return fo_var(hole);
        }
        if (t->is_var) return t;
        std::vector<FoPtr> args;
        for (auto& a : t->args) args.push_back(replace_first_term(a, target, hole, done));
        return fo_app(t->name, std::move(args));
    }

    static FormulaPtr replace_first(const FormulaPtr& f, const FoPtr& target,
                                    const std::string& hole, bool& done) {
        if (done) return f;
        switch (f->kind) {
            case Formula::Kind::Absurd:
                return f;
            case Formula::Kind::Pred:
            case Formula::Kind::Var2: {
                std::vector<FoPtr> args;
                for (auto& t : f->args) args.push_back(replace_first_term(t, target, hole, done));
                return f->kind == Formula::Kind::Pred ? f_pred(f->name, std::move(args))
                                                     : f_var2(f->name, f->arity, std::move(args));
            }
            case Formula::Kind::Arrow: {
                auto l = replace_first(f->left, target, hole, done);
                auto r = replace_first(f->right, target, hole, done);
                return f_arrow(l, r);
            }
            case Formula::Kind::AllFo:
                return f_all_fo(f->name, replace_first(f->left, target, hole, done));
            case Formula::Kind::AllSo:
                return f_all_so(f->name, f->arity, replace_first(f->left, target, hole, done));
        }
        return f;
    }
};

}  // namespace

std::optional<SubPtr> search_subtype(const EquationSystem& E, const FormulaPtr& A,
                                     const FormulaPtr& B, const SubSearchLimits& limits) {
    SubSearcher s{E, limits, {}};
    return s.search(A, B, limits.depth);
}

}  // namespace af2
