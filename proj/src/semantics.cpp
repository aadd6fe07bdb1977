#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "af2/positivity.hpp"
#include "af2/semantics.hpp"

namespace af2 {

std::string verdict_name(MembershipVerdict v) {
    switch (v) {
        case MembershipVerdict::In:
            return "In";
        case MembershipVerdict::Out:
            return "Out";
        default:
            return "Unknown";
    }
}

// ---- semantic sets ----------------------------------------------------------

struct SemState {
    std::function<MembershipVerdict(const TermPtr&)> raw;
    std::vector<TermPtr> pool;
    bool fixed_probes = false;
    bool probes_done = false;
    std::vector<TermPtr> probes;
    std::map<std::string, MembershipVerdict> cache;
};

MembershipVerdict SemanticSet::oracle(const TermPtr& t) const {
    std::string key = print_term(t);
    auto it = state->cache.find(key);
    if (it != state->cache.end()) return it->second;
    MembershipVerdict v = state->raw(t);
    state->cache.emplace(std::move(key), v);
    return v;
}

const std::vector<TermPtr>& SemanticSet::probes() const {
    if (!state->probes_done) {
        state->probes_done = true;
        if (!state->fixed_probes) {
            for (auto& t : state->pool) {
                if (oracle(t) == MembershipVerdict::In) state->probes.push_back(t);
                if (state->probes.size() >= 8) break;
            }
        }
    }
    return state->probes;
}

SemanticSet make_set(std::string description,
                     std::function<MembershipVerdict(const TermPtr&)> raw,
                     std::vector<TermPtr> probe_pool) {
    auto st = std::make_shared<SemState>();
    st->raw = std::move(raw);
    st->pool = std::move(probe_pool);
    return {std::move(description), std::move(st)};
}

SemanticSet make_set_with_probes(std::string description,
                                 std::function<MembershipVerdict(const TermPtr&)> raw,
                                 std::vector<TermPtr> probes) {
    auto st = std::make_shared<SemState>();
    st->raw = std::move(raw);
    st->fixed_probes = true;
    st->probes_done = true;
    st->probes = std::move(probes);
    return {std::move(description), std::move(st)};
}

SemanticSet arrow_set(const SemanticSet& G, const SemanticSet& H, std::uint64_t budget) {
    SemanticSet g = G, h = H;
    auto raw = [g, h, budget](const TermPtr& u) -> MembershipVerdict {
        ReductionResult r = reduce(u, Strategy::WeakHead, budget);
        if (r.status == ReductionStatus::BudgetExhausted) return MembershipVerdict::Unknown;
        const auto& probes = g.probes();
        if (probes.empty()) return MembershipVerdict::Unknown;
        bool unknown = false;
        for (auto& t : probes) {
            MembershipVerdict v = h.oracle(mk_app(r.result, t));
            if (v == MembershipVerdict::Out) return MembershipVerdict::Out;
            if (v == MembershipVerdict::Unknown) unknown = true;
        }
        return unknown ? MembershipVerdict::Unknown : MembershipVerdict::In;
    };
    std::vector<TermPtr> pool = G.state->pool.empty() ? H.state->pool : G.state->pool;
    return make_set("(" + G.description + " -> " + H.description + ")", raw, pool);
}

SemanticSet intersect_sets(std::string description, std::vector<SemanticSet> parts) {
    auto raw = [parts](const TermPtr& u) -> MembershipVerdict {
        bool unknown = parts.empty();
        for (auto& s : parts) {
            MembershipVerdict v = s.oracle(u);
            if (v == MembershipVerdict::Out) return MembershipVerdict::Out;
            if (v == MembershipVerdict::Unknown) unknown = true;
        }
        return unknown ? MembershipVerdict::Unknown : MembershipVerdict::In;
    };
    std::vector<TermPtr> pool;
    if (!parts.empty()) pool = parts.front().state->pool;
    return make_set(std::move(description), raw, pool);
}

// ---- interpretation ---------------------------------------------------------

std::string eval_fo(const Model& M, const Interpretation& I, const FoPtr& t) {
    if (t->is_var) {
        auto it = I.fo.find(t->name);
        if (it == I.fo.end())
            throw std::runtime_error("unassigned first-order variable " + t->name);
        return it->second;
    }
    std::vector<std::string> args;
    for (auto& a : t->args) args.push_back(eval_fo(M, I, a));
    return M.fun(t->name, args);
}

SemanticSet interpret(const FormulaPtr& A, const Model& M, const Interpretation& I,
                      std::uint64_t budget) {
    switch (A->kind) {
        case Formula::Kind::Absurd:
            return make_set("absurd",
                            [](const TermPtr&) { return MembershipVerdict::Out; },
                            M.probe_pool);
        case Formula::Kind::Pred: {
            std::vector<std::string> args;
            for (auto& a : A->args) args.push_back(eval_fo(M, I, a));
            return M.pred(A->name, args);
        }
        case Formula::Kind::Var2: {
            auto it = I.so.find(A->name);
            if (it == I.so.end())
                throw std::runtime_error("unassigned second-order variable " + A->name);
            std::vector<std::string> args;
            for (auto& a : A->args) args.push_back(eval_fo(M, I, a));
            return it->second.at(args);
        }
        case Formula::Kind::Arrow:
            return arrow_set(interpret(A->left, M, I, budget),
                             interpret(A->right, M, I, budget), budget);
        case Formula::Kind::AllFo: {
            std::vector<SemanticSet> parts;
            for (auto& a : M.domain) {
                Interpretation J = I;
                J.fo[A->name] = a;
                parts.push_back(interpret(A->left, M, J, budget));
            }
            return intersect_sets("forall " + A->name, std::move(parts));
        }
        case Formula::Kind::AllSo: {
            std::vector<SemanticSet> parts;
            for (auto& fam : M.families) {
                if (fam.arity != A->arity) continue;
                Interpretation J = I;
                J.so[A->name] = fam;
                parts.push_back(interpret(A->left, M, J, budget));
            }
            return intersect_sets("forall2 " + A->name, std::move(parts));
        }
    }
    throw std::runtime_error("unreachable formula kind");
}

bool model_satisfies(const Model& M, const EquationSystem& E, int max_samples) {
    for (auto& eq : E) {
        std::set<std::string> vars = fo_vars(eq.left);
        for (auto& v : fo_vars(eq.right)) vars.insert(v);
        std::vector<std::string> vs(vars.begin(), vars.end());
        // enumerate assignments of domain elements to the equation variables
        std::vector<size_t> idx(vs.size(), 0);
        int samples = 0;
        while (samples < max_samples) {
            Interpretation I;
            for (size_t i = 0; i < vs.size(); ++i) I.fo[vs[i]] = M.domain[idx[i]];
            if (eval_fo(M, I, eq.left) != eval_fo(M, I, eq.right)) return false;
            ++samples;
            size_t k = 0;
            for (; k < idx.size(); ++k) {
                if (++idx[k] < M.domain.size()) break;
                idx[k] = 0;
            }
            if (k == idx.size()) break;  // wrapped all counters (or no variables)
        }
    }
    return true;
}

// ---- the term model ---------------------------------------------------------

SyntacticModel syntactic_model(const SyntacticModelConfig& cfg) {
    for (auto& nt : cfg.neg_types)
        if (!classify(nt).negative)
            throw std::runtime_error("context type is not negatively classified: " +
                                     print_formula(nt));
    if (cfg.neg_types.empty()) throw std::runtime_error("no context types configured");

    // domain: canonical forms of closed terms, grown from the constants
    auto elems = std::make_shared<std::map<std::string, FoPtr>>();
    std::vector<std::string> order;
    auto intern = [&](const FoPtr& t) {
        FoPtr c = rewrite_canonical(cfg.E, t, cfg.budget);
        std::string id = print_fo(c);
        if (!elems->count(id)) {
            (*elems)[id] = c;
            order.push_back(id);
        }
        return id;
    };
    for (auto& [f, n] : cfg.sig.funs)
        if (n == 0) intern(fo_app(f, {}));
    if (order.empty()) throw std::runtime_error("the signature has no closed terms");
    for (int round = 0; round < 3 && (int)order.size() < cfg.domain_cap; ++round) {
        std::vector<std::string> snapshot = order;
        for (auto& [f, n] : cfg.sig.funs) {
            if (n == 0) continue;
            // tuples over the snapshot, counted in base |snapshot|
            std::vector<size_t> idx(n, 0);
            while ((int)order.size() < cfg.domain_cap) {
                std::vector<FoPtr> args;
                for (size_t i = 0; i < idx.size(); ++i) args.push_back((*elems)[snapshot[idx[i]]]);
                intern(fo_app(f, args));
                size_t k = 0;
                for (; k < idx.size(); ++k) {
                    if (++idx[k] < snapshot.size()) break;
                    idx[k] = 0;
                }
                if (k == idx.size()) break;
            }
        }
    }

    // the ambient context: round-robin over the configured types
    Context gamma;
    for (int i = 0; i < cfg.context_size; ++i) {
        gamma.binds.push_back(
            {"x" + std::to_string(i), cfg.neg_types[i % cfg.neg_types.size()]});
    }

    // candidate probe pool: the context variables plus spines grown round by
    // round, extending on either side so that both left-associated argument
    // chains and right-nested iteration towers appear
    std::vector<TermPtr> pool;
    for (auto& b : gamma.binds) pool.push_back(mk_var(b.name));
    {
        std::vector<TermPtr> seeds;  // one variable per distinct type
        for (auto& b : gamma.binds) {
            bool dup = false;
            for (auto& s : seeds) {
                const FormulaPtr* a = gamma.lookup(s->name);
                if (a && formula_alpha_eq(*a, b.type)) dup = true;
            }
            if (!dup) seeds.push_back(mk_var(b.name));
        }
        std::set<std::string> seen;
        for (auto& t : pool) seen.insert(print_term(t));
        std::vector<TermPtr> frontier = seeds;
        while (!frontier.empty() && (int)pool.size() < cfg.pool_cap) {
            std::vector<TermPtr> next;
            for (auto& p : frontier) {
                for (auto& v : seeds) {
                    for (TermPtr cand : {mk_app(v, p), mk_app(p, v)}) {
                        if ((int)pool.size() >= cfg.pool_cap) break;
                        if (seen.insert(print_term(cand)).second) {
                            pool.push_back(cand);
                            next.push_back(cand);
                        }
                    }
                }
            }
            frontier = std::move(next);
        }
    }
    for (auto& t : cfg.extra_probes) pool.push_back(t);

    EquationSystem E = cfg.E;
    std::uint64_t budget = cfg.budget;
    TypingSearchLimits search = cfg.search;

    // bounded typability oracle: does some beta-reduct of u type at F in gamma?
    auto typable = [E, budget, search, gamma](const TermPtr& u,
                                              const FormulaPtr& F) -> MembershipVerdict {
        for (auto& v : free_vars(u))
            if (!gamma.lookup(v)) return MembershipVerdict::Out;
        ReductionResult r = reduce(u, Strategy::BetaNormalOrder, budget);
        if (r.status == ReductionStatus::BudgetExhausted) return MembershipVerdict::Unknown;
        TypingSearchResult res = search_typing(System::AF2S, E, gamma, r.result, F, search);
        if (res.deriv) return MembershipVerdict::In;
        return res.saturated ? MembershipVerdict::Out : MembershipVerdict::Unknown;
    };

    Model M;
    M.domain = order;
    M.probe_pool = pool;
    M.fun = [elems, E, budget](const std::string& f, const std::vector<std::string>& args) {
        std::vector<FoPtr> as;
        for (auto& a : args) {
            auto it = elems->find(a);
            as.push_back(it != elems->end() ? it->second : parse_fo(a));
        }
        return print_fo(rewrite_canonical(E, fo_app(f, as), budget));
    };
    M.pred = [elems, typable, pool](const std::string& p,
                                    const std::vector<std::string>& args) {
        std::vector<FoPtr> as;
        for (auto& a : args) {
            auto it = elems->find(a);
            as.push_back(it != elems->end() ? it->second : parse_fo(a));
        }
        FormulaPtr F = f_pred(p, as);
        return make_set("typable at " + print_formula(F),
                        [typable, F](const TermPtr& u) { return typable(u, F); }, pool);
    };
    for (auto& [x, n] : cfg.sig.svars) {
        int arity = n;
        std::string name = x;
        Model::Family fam;
        fam.description = "typable at " + name;
        fam.arity = arity;
        fam.at = [elems, typable, pool, name, arity](const std::vector<std::string>& args) {
            std::vector<FoPtr> as;
            for (auto& a : args) {
                auto it = elems->find(a);
                as.push_back(it != elems->end() ? it->second : parse_fo(a));
            }
            FormulaPtr F = f_var2(name, arity, as);
            return make_set("typable at " + print_formula(F),
                            [typable, F](const TermPtr& u) { return typable(u, F); }, pool);
        };
        M.families.push_back(fam);
    }

    Interpretation I;
    // free first-order variables name their own canonical class; nothing to
    // preassign here — eval_fo fails loudly on genuinely unassigned variables
    for (auto& fam : M.families) {
        // pick out each declared second-order variable's own family by name
        std::string tag = "typable at ";
        I.so[fam.description.substr(tag.size())] = fam;
    }

    return {std::move(M), std::move(I), std::move(gamma)};
}

// ---- adequacy ---------------------------------------------------------------

AdequacyReport check_adequacy(const EquationSystem& E, const DerivPtr& d, const Context& ctx,
                              const TermPtr& t_checked, const FormulaPtr& A, const TermPtr& t,
                              const Model& M, const Interpretation& I,
                              const std::vector<TermPtr>& members, std::uint64_t budget) {
    Verdict v = check_derivation(System::AF2S, E, d, ctx, t_checked, A);
    if (!v.ok) return {MembershipVerdict::Unknown, "derivation rejected: " + v.reason};
    Trivalent eq = beta_equiv(t, t_checked, budget);
    if (eq == Trivalent::No) return {MembershipVerdict::Unknown, "terms not beta-equivalent"};
    if (eq == Trivalent::Unknown)
        return {MembershipVerdict::Unknown, "beta-equivalence undecided within budget"};
    if (members.size() != ctx.binds.size())
        throw std::invalid_argument("one member term required per context variable");
    TermPtr inst = t;
    for (size_t i = 0; i < ctx.binds.size(); ++i) {
        SemanticSet Bi = interpret(ctx.binds[i].type, M, I, budget);
        if (Bi.oracle(members[i]) != MembershipVerdict::In)
            throw std::invalid_argument("member for " + ctx.binds[i].name +
                                        " is not In for its type");
        inst = substitute(inst, ctx.binds[i].name, members[i]);
    }
    MembershipVerdict out = interpret(A, M, I, budget).oracle(inst);
    std::string detail;
    switch (out) {
        case MembershipVerdict::In:
            detail = "confirmed";
            break;
        case MembershipVerdict::Unknown:
            detail = "inconclusive";
            break;
        case MembershipVerdict::Out:
            detail = "hard failure: counterexample to adequacy";
            break;
    }
    return {out, detail};
}

// ---- closed normal term enumeration -----------------------------------------

namespace {

// nameless normal forms: an abstraction over a normal form, or a variable
// applied to normal forms
struct Nameless {
    bool abs;
    int var = -1;
    std::shared_ptr<const Nameless> body, fun, arg;
};
using NlPtr = std::shared_ptr<const Nameless>;

void gen_neutral(int size, int depth, std::vector<NlPtr>& out);

void gen_normal(int size, int depth, std::vector<NlPtr>& out) {
    if (size <= 0) return;
    if (size >= 2) {
        std::vector<NlPtr> bodies;
        gen_normal(size - 1, depth + 1, bodies);
        for (auto& b : bodies) {
            auto n = std::make_shared<Nameless>();
            n->abs = true;
            n->body = b;
            out.push_back(n);
        }
    }
    gen_neutral(size, depth, out);
}

void gen_neutral(int size, int depth, std::vector<NlPtr>& out) {
    if (size == 1) {
        for (int i = 0; i < depth; ++i) {
            auto n = std::make_shared<Nameless>();
            n->abs = false;
            n->var = i;
            out.push_back(n);
        }
        return;
    }
    for (int fs = 1; fs <= size - 2; ++fs) {
        std::vector<NlPtr> funs, args;
        gen_neutral(fs, depth, funs);
        gen_normal(size - 1 - fs, depth, args);
        for (auto& f : funs)
            for (auto& a : args) {
                auto n = std::make_shared<Nameless>();
                n->abs = false;
                n->fun = f;
                n->arg = a;
                out.push_back(n);
            }
    }
}

TermPtr to_named(const NlPtr& n, std::vector<std::string>& env) {
    if (n->abs) {
        std::string v = "v" + std::to_string(env.size());
        env.push_back(v);
        TermPtr b = to_named(n->body, env);
        env.pop_back();
        return mk_abs(v, b);
    }
    if (n->var >= 0) return mk_var(env[env.size() - 1 - n->var]);
    return mk_app(to_named(n->fun, env), to_named(n->arg, env));
}

}  // namespace

std::vector<TermPtr> enumerate_normal_closed(int size) {
    std::vector<TermPtr> out;
    for (int s = 1; s <= size; ++s) {
        std::vector<NlPtr> nl;
        gen_normal(s, 0, nl);
        for (auto& n : nl) {
            std::vector<std::string> env;
            out.push_back(to_named(n, env));
        }
    }
    return out;
}

// ---- the completeness experiment --------------------------------------------

namespace {

// replace each second-order quantifier binder by a fresh generic variable and
// collect the negatively classified argument types of the resulting matrix
void generic_witness_types(const FormulaPtr& A, Signature& sig,
                           std::vector<FormulaPtr>& neg_types, int& counter) {
    switch (A->kind) {
        case Formula::Kind::AllSo: {
            std::string g = "G" + std::to_string(counter++);
            sig.svars[g] = A->arity;
            std::vector<std::string> ps;
            std::vector<FoPtr> as;
            for (int i = 0; i < A->arity; ++i) {
                ps.push_back("p" + std::to_string(i));
                as.push_back(fo_var(ps.back()));
            }
            FormulaPtr body = subst_so(A->left, A->name, ps, f_var2(g, A->arity, as));
            generic_witness_types(body, sig, neg_types, counter);
            break;
        }
        case Formula::Kind::AllFo:
            generic_witness_types(A->left, sig, neg_types, counter);
            break;
        case Formula::Kind::Arrow: {
            FormulaPtr ant = A->left;
            // only closed antecedents can serve as context types; open ones
            // (under a first-order quantifier) are covered by instances of
            // their closed ancestors
            if (classify(ant).negative && formula_free_fo(ant).empty()) {
                bool seen = false;
                for (auto& t : neg_types)
                    if (formula_alpha_eq(t, ant)) seen = true;
                if (!seen) neg_types.push_back(ant);
            }
            generic_witness_types(A->left, sig, neg_types, counter);
            generic_witness_types(A->right, sig, neg_types, counter);
            break;
        }
        default:
            break;
    }
}

}  // namespace

std::string CompletenessReport::render() const {
    std::ostringstream os;
    for (auto& r : rows)
        os << "TERM " << print_term(r.term) << " TYPE " << verdict_name(r.typable) << " SEM "
           << verdict_name(r.sem) << " AGREE " << r.agree << "\n";
    os << "AGREEMENT " << agreements << "/" << rows.size() << " UNKNOWN " << unknowns << "\n";
    return os.str();
}

CompletenessReport completeness_experiment(const FormulaPtr& A, int size_bound,
                                           const SyntacticModelConfig& cfg) {
    if (!classify(A).positive)
        throw std::invalid_argument("the type is not positively classified");
    if (!formula_free_fo(A).empty() || !formula_free_so(A).empty())
        throw std::invalid_argument("the type is not closed");

    SyntacticModelConfig c = cfg;
    // first-order quantifiers intersect over the whole domain, and every
    // element must have pool witnesses for its predicate sets, so keep the
    // domain small and the pool generous
    c.domain_cap = std::min(c.domain_cap, 4);
    c.pool_cap = std::max(c.pool_cap, 128);
    int counter = 0;
    generic_witness_types(A, c.sig, c.neg_types, counter);
    if (c.sig.funs.empty()) c.sig.funs["c0"] = 0;  // a nonempty closed universe
    bool closed_universe = false;
    for (auto& [f, n] : c.sig.funs)
        if (n == 0) closed_universe = true;
    if (!closed_universe) c.sig.funs["c0"] = 0;

    SyntacticModel sm = syntactic_model(c);
    SemanticSet SA = interpret(A, sm.model, sm.interp, c.budget);

    CompletenessReport rep;
    Context empty_ctx;
    for (auto& t : enumerate_normal_closed(size_bound)) {
        CompletenessRow row;
        row.term = t;
        TypingSearchResult tr = search_typing(System::AF2S, c.E, empty_ctx, t, A, c.search);
        row.typable = tr.deriv ? MembershipVerdict::In
                               : (tr.saturated ? MembershipVerdict::Out
                                               : MembershipVerdict::Unknown);
        row.sem = SA.oracle(t);
        if (row.typable == MembershipVerdict::Unknown || row.sem == MembershipVerdict::Unknown)
            row.agree = "moot";
        else if (row.typable == row.sem)
            row.agree = "yes";
        else
            row.agree = "no";
        if (row.agree == "yes") ++rep.agreements;
        if (row.agree == "moot") ++rep.unknowns;
        if (row.agree == "no") rep.hard_failure = true;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace af2
