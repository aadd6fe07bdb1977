#include <algorithm>
#include <set>
#include <stdexcept>

#include "af2/typing.hpp"

namespace af2 {

namespace {

void collect_fo_subterms(const FoPtr& t, std::vector<FoPtr>& out) {
    out.push_back(t);
    for (auto& a : t->args) collect_fo_subterms(a, out);
}

void collect_formula_fo(const FormulaPtr& a, std::vector<FoPtr>& out) {
    switch (a->kind) {
        case Formula::Kind::Pred:
        case Formula::Kind::Var2:
            for (auto& t : a->args) collect_fo_subterms(t, out);
            break;
        case Formula::Kind::Arrow:
            collect_formula_fo(a->left, out);
            collect_formula_fo(a->right, out);
            break;
        case Formula::Kind::AllFo:
        case Formula::Kind::AllSo:
            collect_formula_fo(a->left, out);
            break;
        default:
            break;
    }
}

void collect_subformulas(const FormulaPtr& a, std::vector<FormulaPtr>& out) {
    out.push_back(a);
    switch (a->kind) {
        case Formula::Kind::Arrow:
            collect_subformulas(a->left, out);
            collect_subformulas(a->right, out);
            break;
        case Formula::Kind::AllFo:
        case Formula::Kind::AllSo:
            collect_subformulas(a->left, out);
            break;
        default:
            break;
    }
}

// every way of rewriting exactly one first-order subterm of A by a particular
// case of an equation; yields (template, hole, u, v, lr) with A = template[v]
struct EqMove {
    FormulaPtr templ;
    std::string hole;
    FoPtr u, v;
    bool lr;
};

FoPtr replace_first_fo(const FoPtr& t, const FoPtr& target, const FoPtr& repl, bool& done) {
    if (!done && fo_eq(t, target)) {
        done = true;
        return repl;
    }
    if (t->args.empty()) return t;
    std::vector<FoPtr> args;
    bool changed = false;
    for (auto& a : t->args) {
        FoPtr na = done ? a : replace_first_fo(a, target, repl, done);
        changed = changed || na != a;
        args.push_back(na);
    }
    return changed ? fo_app(t->name, args) : t;
}

FormulaPtr replace_first_in_formula(const FormulaPtr& a, const FoPtr& target,
                                    const FoPtr& repl, bool& done) {
    switch (a->kind) {
        case Formula::Kind::Pred:
        case Formula::Kind::Var2: {
            std::vector<FoPtr> args;
            bool changed = false;
            for (auto& t : a->args) {
                FoPtr nt = done ? t : replace_first_fo(t, target, repl, done);
                changed = changed || nt != t;
                args.push_back(nt);
            }
            if (!changed) return a;
            return a->kind == Formula::Kind::Pred ? f_pred(a->name, args)
                                                  : f_var2(a->name, (int)a->args.size(), args);
        }
        case Formula::Kind::Arrow: {
            FormulaPtr l = replace_first_in_formula(a->left, target, repl, done);
            FormulaPtr r = done && l != a->left
                               ? a->right
                               : replace_first_in_formula(a->right, target, repl, done);
            if (l == a->left && r == a->right) return a;
            return f_arrow(l, r);
        }
        case Formula::Kind::AllFo:
        case Formula::Kind::AllSo: {
            FormulaPtr b = replace_first_in_formula(a->left, target, repl, done);
            if (b == a->left) return a;
            return a->kind == Formula::Kind::AllFo ? f_all_fo(a->name, b)
                                                   : f_all_so(a->name, a->arity, b);
        }
        default:
            return a;
    }
}

std::vector<EqMove> eq_moves(const EquationSystem& E, const FormulaPtr& A) {
    std::vector<EqMove> out;
    if (E.empty()) return out;
    std::vector<FoPtr> subs;
    collect_formula_fo(A, subs);
    std::vector<FoPtr> uniq;
    for (auto& s : subs) {
        bool seen = false;
        for (auto& u : uniq)
            if (fo_eq(u, s)) {
                seen = true;
                break;
            }
        if (!seen) uniq.push_back(s);
    }
    std::set<std::string> avoid = formula_free_fo(A);
    std::string hole = fresh_name("hole", avoid);
    for (auto& s : uniq) {
        for (auto& eq : E) {
            for (bool lr : {true, false}) {
                const FoPtr& from = lr ? eq.left : eq.right;
                const FoPtr& to = lr ? eq.right : eq.left;
                std::map<std::string, FoPtr> m;
                if (!fo_match(to, s, m)) continue;  // s is an instance of the v side
                // the matched instance must determine every variable of the
                // other side, else the rewrite source is not fixed
                bool ok = true;
                for (auto& x : fo_vars(from))
                    if (!m.count(x)) ok = false;
                if (!ok) continue;
                FoPtr u = fo_subst(from, m);
                bool done = false;
                FormulaPtr templ =
                    replace_first_in_formula(A, s, fo_var(hole), done);
                if (!done) continue;
                out.push_back({templ, hole, u, s, lr});
            }
        }
    }
    return out;
}

struct Searcher {
    const EquationSystem& E;
    const TypingSearchLimits& limits;
    bool saturated = true;
    std::uint64_t nodes = 0;
    std::uint64_t node_budget = 200000;

    bool spend() {
        if (++nodes > node_budget) {
            saturated = false;
            return false;
        }
        return true;
    }

    std::vector<FoPtr> fo_candidates(const Context& ctx, const FormulaPtr& A) {
        std::vector<FoPtr> raw = limits.term_basis;
        collect_formula_fo(A, raw);
        for (auto& b : ctx.binds) collect_formula_fo(b.type, raw);
        std::vector<FoPtr> out;
        for (auto& t : raw) {
            bool seen = false;
            for (auto& u : out)
                if (fo_eq(u, t)) {
                    seen = true;
                    break;
                }
            if (!seen) out.push_back(t);
        }
        return out;
    }

    std::vector<std::pair<std::vector<std::string>, FormulaPtr>> so_candidates(
        const Context& ctx, const FormulaPtr& A, int arity) {
        std::vector<std::pair<std::vector<std::string>, FormulaPtr>> out;
        std::vector<std::string> ps;
        for (int i = 0; i < arity; ++i) ps.push_back("p" + std::to_string(i));
        auto add = [&](const FormulaPtr& g) {
            for (auto& [q, h] : out)
                if (formula_alpha_eq(h, g)) return;
            out.push_back({ps, g});
        };
        for (auto& g : limits.formula_basis) add(g);
        if (arity == 0) {
            std::vector<FormulaPtr> subs;
            collect_subformulas(A, subs);
            for (auto& b : ctx.binds) collect_subformulas(b.type, subs);
            for (auto& g : subs) add(g);
        }
        return out;
    }

    // ---- plain system ------------------------------------------------------

    std::optional<DerivPtr> af2(const Context& ctx, const TermPtr& t, const FormulaPtr& A,
                                int depth) {
        if (!spend()) return std::nullopt;
        if (depth < 0) {
            saturated = false;
            return std::nullopt;
        }
        // generalization at the goal
        if (A->kind == Formula::Kind::AllFo || A->kind == Formula::Kind::AllSo) {
            VarSpec v{A->kind == Formula::Kind::AllSo, A->name, A->arity};
            if (ctx.var_free(v)) {
                std::set<std::string> avoid = ctx.free_fo();
                for (auto& [k, a] : ctx.free_so()) avoid.insert(k);
                auto ff = formula_free_fo(A);
                avoid.insert(ff.begin(), ff.end());
                for (auto& [k, a] : formula_free_so(A)) avoid.insert(k);
                v.name = fresh_name(v.name, avoid);
            }
            auto body = forall_strip(A, {v});
            if (body)
                if (auto d = af2(ctx, t, *body, depth)) return dv_gen(v, *d);
        }
        if (t->kind == Term::Kind::Abs && A->kind == Formula::Kind::Arrow &&
            !ctx.lookup(t->name)) {
            if (auto d = af2(ctx.extended(t->name, A->left), t->sub, A->right, depth))
                return dv_r2(t->name, *d);
        }
        if (t->kind == Term::Kind::Var || t->kind == Term::Kind::App) {
            if (auto d = spine(ctx, t, A, depth, /*exact=*/true, nullptr)) return d;
        }
        // one equation step at the goal
        if (depth > 0)
            for (auto& m : eq_moves(E, A)) {
                FormulaPtr prem = subst_fo(m.templ, {{m.hole, m.u}});
                if (formula_alpha_eq(prem, A)) continue;
                if (auto d = af2(ctx, t, prem, depth - 1))
                    return dv_r8(m.templ, m.hole, m.u, m.v, m.lr, *d);
            }
        return std::nullopt;
    }

    // derive the spine t (head variable under applications); when exact, the
    // final type must be alpha-equal to A, otherwise every reachable final
    // type is offered to `loose`
    std::optional<DerivPtr> spine(const Context& ctx, const TermPtr& t, const FormulaPtr& A,
                                  int depth, bool exact,
                                  const std::function<std::optional<DerivPtr>(
                                      const FormulaPtr&, const DerivPtr&)>* loose) {
        std::vector<std::pair<FormulaPtr, DerivPtr>> states;
        if (!head_states(ctx, t, A, depth, states)) return std::nullopt;
        for (auto& [B, d] : states) {
            if (exact) {
                if (formula_alpha_eq(B, A)) return d;
            } else if (loose) {
                if (auto r = (*loose)(B, d)) return r;
            }
        }
        return std::nullopt;
    }

    // all (type, derivation) pairs for the spine, instantiations included
    bool head_states(const Context& ctx, const TermPtr& t, const FormulaPtr& A, int depth,
                     std::vector<std::pair<FormulaPtr, DerivPtr>>& out) {
        if (!spend()) return false;
        std::vector<std::pair<FormulaPtr, DerivPtr>> base;
        if (t->kind == Term::Kind::Var) {
            auto* b = ctx.lookup(t->name);
            if (!b) return true;
            base.push_back({*b, dv_r1(t->name)});
        } else if (t->kind == Term::Kind::App) {
            std::vector<std::pair<FormulaPtr, DerivPtr>> fun;
            if (!head_states(ctx, t->sub, A, depth, fun)) return false;
            for (auto& [B, d] : fun) {
                if (B->kind != Formula::Kind::Arrow) continue;
                if (auto da = af2(ctx, t->arg, B->left, depth - 1))
                    base.push_back({B->right, dv_r3(B->left, d, *da)});
            }
        } else {
            return true;
        }
        // close under bounded instantiation chains
        for (size_t i = 0; i < base.size(); ++i) {
            auto [B, d] = base[i];
            if ((int)i > 64 * (depth + 1)) {
                saturated = false;
                break;
            }
            if (B->kind == Formula::Kind::AllFo) {
                for (auto& u : fo_candidates(ctx, A)) {
                    FormulaPtr inst = subst_fo(B->left, {{B->name, u}});
                    base.push_back({inst, dv_r5(B, u, d)});
                }
            } else if (B->kind == Formula::Kind::AllSo) {
                for (auto& [ps, g] : so_candidates(ctx, A, B->arity)) {
                    FormulaPtr inst = subst_so(B->left, B->name, ps, g);
                    base.push_back({inst, dv_r7(B, ps, g, d)});
                }
            }
        }
        out.insert(out.end(), base.begin(), base.end());
        return true;
    }

    // ---- S system ----------------------------------------------------------

    SubSearchLimits sub_limits() const {
        SubSearchLimits sl;
        sl.depth = limits.subtype_depth;
        sl.formula_hints = limits.formula_basis;
        sl.term_hints = limits.term_basis;
        return sl;
    }

    std::optional<DerivPtr> s_search(const Context& ctx, const TermPtr& t,
                                     const FormulaPtr& A, int depth) {
        if (!spend()) return std::nullopt;
        if (depth < 0) {
            saturated = false;
            return std::nullopt;
        }
        if (t->kind == Term::Kind::Var) {
            auto* b = ctx.lookup(t->name);
            if (!b) return std::nullopt;
            if (auto q = search_subtype(E, *b, A, sub_limits()))
                return dv_s1(t->name, {}, *q);
            // strip the goal's prefix with fresh names and generalize over it
            if (A->kind == Formula::Kind::AllFo || A->kind == Formula::Kind::AllSo) {
                auto stripped = strip_fresh(ctx, A);
                if (stripped) {
                    auto& [zeta, body] = *stripped;
                    if (auto q = search_subtype(E, *b, body, sub_limits()))
                        return dv_s1(t->name, zeta, sp_forall_mono(zeta, *b, *q));
                }
            }
            return std::nullopt;
        }
        if (t->kind == Term::Kind::Abs) {
            auto try_arrow = [&](const std::vector<VarSpec>& rho, const FormulaPtr& arrow,
                                 const SubPtr& sub) -> std::optional<DerivPtr> {
                if (ctx.lookup(t->name)) return std::nullopt;
                bool clash = false;
                for (auto& v : rho)
                    if (ctx.var_free(v)) clash = true;
                if (clash) return std::nullopt;
                if (auto body = s_search(ctx.extended(t->name, arrow->left), t->sub,
                                         arrow->right, depth - 1))
                    return dv_s2(t->name, *body, sub);
                return std::nullopt;
            };
            std::vector<VarSpec> rho;
            FormulaPtr cur = A;
            while (cur->kind == Formula::Kind::AllFo || cur->kind == Formula::Kind::AllSo) {
                rho.push_back(cur->kind == Formula::Kind::AllFo
                                  ? VarSpec{false, cur->name, 0}
                                  : VarSpec{true, cur->name, cur->arity});
                cur = cur->left;
            }
            if (cur->kind == Formula::Kind::Arrow)
                if (auto d = try_arrow(rho, cur, sp_ax())) return d;
            return std::nullopt;
        }
        // application: spine with a containment finish
        std::function<std::optional<DerivPtr>(const FormulaPtr&, const DerivPtr&)> loose =
            [&](const FormulaPtr& C, const DerivPtr& d) -> std::optional<DerivPtr> {
            if (formula_alpha_eq(C, A)) return to_s_local(ctx, d, t, A);
            if (auto q = search_subtype(E, C, A, sub_limits()))
                return resubtype(to_s_local(ctx, d, t, C), C, *q);
            if (A->kind == Formula::Kind::AllFo || A->kind == Formula::Kind::AllSo) {
                auto stripped = strip_fresh(ctx, A);
                if (stripped) {
                    auto& [zeta, body] = *stripped;
                    if (auto q = search_subtype(E, C, body, sub_limits()))
                        return resubtype(to_s_local(ctx, d, t, C), C,
                                         sp_forall_mono(zeta, C, *q));
                }
            }
            return std::nullopt;
        };
        return spine(ctx, t, A, depth, /*exact=*/false, &loose);
    }

    std::optional<std::pair<std::vector<VarSpec>, FormulaPtr>> strip_fresh(
        const Context& ctx, const FormulaPtr& A) {
        std::set<std::string> avoid = ctx.free_fo();
        for (auto& [k, a] : ctx.free_so()) avoid.insert(k);
        auto ff = formula_free_fo(A);
        avoid.insert(ff.begin(), ff.end());
        for (auto& [k, a] : formula_free_so(A)) avoid.insert(k);
        std::vector<VarSpec> zeta;
        FormulaPtr cur = A;
        while (cur->kind == Formula::Kind::AllFo || cur->kind == Formula::Kind::AllSo) {
            VarSpec v{cur->kind == Formula::Kind::AllSo, cur->name, cur->arity};
            v.name = fresh_name(v.name, avoid);
            avoid.insert(v.name);
            zeta.push_back(v);
            cur = cur->left;
        }
        auto body = forall_strip(A, zeta);
        if (!body) return std::nullopt;
        return std::make_pair(zeta, *body);
    }

    DerivPtr to_s_local(const Context& ctx, const DerivPtr& d, const TermPtr& t,
                        const FormulaPtr& A) {
        return convert(System::AF2, System::AF2S, E, ctx, d, t, A);
    }
};

}  // namespace

TypingSearchResult search_typing(System system, const EquationSystem& E, const Context& ctx,
                                 const TermPtr& t, const FormulaPtr& A,
                                 const TypingSearchLimits& limits) {
    if (!is_beta_normal(t)) throw std::runtime_error("search requires a beta-normal subject");
    Searcher s{E, limits};
    TypingSearchResult res;
    if (auto d = s.af2(ctx, t, A, limits.depth)) {
        res.deriv = system == System::AF2S ? convert(System::AF2, System::AF2S, E, ctx, *d, t, A)
                                           : *d;
        res.saturated = s.saturated;
        return res;
    }
    if (system != System::AF2) {
        if (auto d = s.s_search(ctx, t, A, limits.depth)) {
            res.deriv = convert(System::AF2S, system, E, ctx, *d, t, A);
            res.saturated = s.saturated;
            return res;
        }
    }
    res.saturated = s.saturated;
    return res;
}

}  // namespace af2
