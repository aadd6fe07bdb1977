#include "af2/formula.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace af2 {

// ---- first-order terms -----------------------------------------------------

FoPtr fo_var(std::string name) {
    auto t = std::make_shared<FoTerm>();
    t->is_var = true;
    t->name = std::move(name);
    return t;
}

FoPtr fo_app(std::string fun, std::vector<FoPtr> args) {
    auto t = std::make_shared<FoTerm>();
    t->is_var = false;
    t->name = std::move(fun);
    t->args = std::move(args);
    return t;
}

bool fo_eq(const FoPtr& a, const FoPtr& b) {
    if (a->is_var != b->is_var || a->name != b->name) return false;
    if (a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!fo_eq(a->args[i], b->args[i])) return false;
    return true;
}

std::set<std::string> fo_vars(const FoPtr& t) {
    std::set<std::string> out;
    std::function<void(const FoPtr&)> go = [&](const FoPtr& u) {
        if (u->is_var) out.insert(u->name);
        for (auto& a : u->args) go(a);
    };
    go(t);
    return out;
}

FoPtr fo_subst(const FoPtr& t, const std::map<std::string, FoPtr>& sigma) {
    if (t->is_var) {
        auto it = sigma.find(t->name);
        return it == sigma.end() ? t : it->second;
    }
    std::vector<FoPtr> args;
    args.reserve(t->args.size());
    for (auto& a : t->args) args.push_back(fo_subst(a, sigma));
    return fo_app(t->name, std::move(args));
}

std::string print_fo(const FoPtr& t) {
    if (t->is_var || t->args.empty()) return t->name;
    std::string s = t->name + "(";
    for (size_t i = 0; i < t->args.size(); ++i) {
        if (i) s += ", ";
        s += print_fo(t->args[i]);
    }
    return s + ")";
}

bool fo_match(const FoPtr& pattern, const FoPtr& t, std::map<std::string, FoPtr>& binding) {
    if (pattern->is_var) {
        auto it = binding.find(pattern->name);
        if (it != binding.end()) return fo_eq(it->second, t);
        binding[pattern->name] = t;
        return true;
    }
    if (t->is_var || t->name != pattern->name || t->args.size() != pattern->args.size())
        return false;
    for (size_t i = 0; i < pattern->args.size(); ++i)
        if (!fo_match(pattern->args[i], t->args[i], binding)) return false;
    return true;
}

// ---- formula constructors --------------------------------------------------

FormulaPtr f_absurd() {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Absurd;
    return f;
}

FormulaPtr f_pred(std::string p, std::vector<FoPtr> args) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Pred;
    f->name = std::move(p);
    f->arity = (int)args.size();
    f->args = std::move(args);
    return f;
}

FormulaPtr f_var2(std::string x, int arity, std::vector<FoPtr> args) {
    if ((int)args.size() != arity)
        throw std::runtime_error("second-order atom arity mismatch for " + x);
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Var2;
    f->name = std::move(x);
    f->arity = arity;
    f->args = std::move(args);
    return f;
}

FormulaPtr f_arrow(FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Arrow;
    f->left = std::move(a);
    f->right = std::move(b);
    return f;
}

FormulaPtr f_all_fo(std::string x, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::AllFo;
    f->name = std::move(x);
    f->left = std::move(body);
    return f;
}

FormulaPtr f_all_so(std::string x, int arity, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::AllSo;
    f->name = std::move(x);
    f->arity = arity;
    f->left = std::move(body);
    return f;
}

// ---- free variables --------------------------------------------------------

static void free_go(const FormulaPtr& a, std::set<std::string>& boundFo,
                    std::set<std::string>& boundSo, std::set<std::string>& fo,
                    std::map<std::string, int>& so) {
    switch (a->kind) {
        case Formula::Kind::Absurd:
            break;
        case Formula::Kind::Pred:
        case Formula::Kind::Var2:
            if (a->kind == Formula::Kind::Var2 && !boundSo.count(a->name)) so[a->name] = a->arity;
            for (auto& t : a->args)
                for (auto& v : fo_vars(t))
                    if (!boundFo.count(v)) fo.insert(v);
            break;
        case Formula::Kind::Arrow:
            free_go(a->left, boundFo, boundSo, fo, so);
            free_go(a->right, boundFo, boundSo, fo, so);
            break;
        case Formula::Kind::AllFo: {
            bool was = boundFo.count(a->name) > 0;
            boundFo.insert(a->name);
            free_go(a->left, boundFo, boundSo, fo, so);
            if (!was) boundFo.erase(a->name);
            break;
        }
        case Formula::Kind::AllSo: {
            bool was = boundSo.count(a->name) > 0;
            boundSo.insert(a->name);
            free_go(a->left, boundFo, boundSo, fo, so);
            if (!was) boundSo.erase(a->name);
            break;
        }
    }
}

std::set<std::string> formula_free_fo(const FormulaPtr& a) {
    std::set<std::string> bf, bs, fo;
    std::map<std::string, int> so;
    free_go(a, bf, bs, fo, so);
    return fo;
}

std::map<std::string, int> formula_free_so(const FormulaPtr& a) {
    std::set<std::string> bf, bs, fo;
    std::map<std::string, int> so;
    free_go(a, bf, bs, fo, so);
    return so;
}

bool varspec_free_in(const VarSpec& v, const FormulaPtr& a) {
    if (v.second_order) {
        auto so = formula_free_so(a);
        auto it = so.find(v.name);
        return it != so.end();
    }
    return formula_free_fo(a).count(v.name) > 0;
}

// ---- alpha-equivalence -----------------------------------------------------

using Env = std::vector<std::pair<std::string, std::string>>;

static bool env_match(const Env& e, const std::string& a, const std::string& b) {
    for (auto it = e.rbegin(); it != e.rend(); ++it) {
        bool ma = it->first == a, mb = it->second == b;
        if (ma || mb) return ma && mb;
    }
    return a == b;
}

static bool fo_alpha(const FoPtr& a, const FoPtr& b, const Env& env) {
    if (a->is_var != b->is_var) return false;
    if (a->is_var) return env_match(env, a->name, b->name);
    if (a->name != b->name || a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!fo_alpha(a->args[i], b->args[i], env)) return false;
    return true;
}

static bool alpha_go(const FormulaPtr& a, const FormulaPtr& b, Env& fo, Env& so) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Formula::Kind::Absurd:
            return true;
        case Formula::Kind::Pred:
        case Formula::Kind::Var2: {
            if (a->kind == Formula::Kind::Pred) {
                if (a->name != b->name) return false;
            } else {
                if (!env_match(so, a->name, b->name) || a->arity != b->arity) return false;
            }
            if (a->args.size() != b->args.size()) return false;
            for (size_t i = 0; i < a->args.size(); ++i)
                if (!fo_alpha(a->args[i], b->args[i], fo)) return false;
            return true;
        }
        case Formula::Kind::Arrow:
            return alpha_go(a->left, b->left, fo, so) && alpha_go(a->right, b->right, fo, so);
        case Formula::Kind::AllFo: {
            fo.emplace_back(a->name, b->name);
            bool r = alpha_go(a->left, b->left, fo, so);
            fo.pop_back();
            return r;
        }
        case Formula::Kind::AllSo: {
            if (a->arity != b->arity) return false;
            so.emplace_back(a->name, b->name);
            bool r = alpha_go(a->left, b->left, fo, so);
            so.pop_back();
            return r;
        }
    }
    return false;
}

bool formula_alpha_eq(const FormulaPtr& a, const FormulaPtr& b) {
    Env fo, so;
    return alpha_go(a, b, fo, so);
}

// ---- substitution ----------------------------------------------------------

static std::set<std::string> range_fo_vars(const std::map<std::string, FoPtr>& sigma) {
    std::set<std::string> out;
    for (auto& [k, v] : sigma) {
        auto vs = fo_vars(v);
        out.insert(vs.begin(), vs.end());
    }
    return out;
}

FormulaPtr subst_fo(const FormulaPtr& a, const std::map<std::string, FoPtr>& sigma) {
    if (sigma.empty()) return a;
    switch (a->kind) {
        case Formula::Kind::Absurd:
            return a;
        case Formula::Kind::Pred:
        case Formula::Kind::Var2: {
            std::vector<FoPtr> args;
            args.reserve(a->args.size());
            for (auto& t : a->args) args.push_back(fo_subst(t, sigma));
            return a->kind == Formula::Kind::Pred ? f_pred(a->name, std::move(args))
                                                 : f_var2(a->name, a->arity, std::move(args));
        }
        case Formula::Kind::Arrow:
            return f_arrow(subst_fo(a->left, sigma), subst_fo(a->right, sigma));
        case Formula::Kind::AllFo: {
            auto inner = sigma;
            inner.erase(a->name);
            if (inner.empty()) return a;
            auto rng = range_fo_vars(inner);
            if (rng.count(a->name)) {
                auto avoid = rng;
                auto bodyfree = formula_free_fo(a->left);
                avoid.insert(bodyfree.begin(), bodyfree.end());
                for (auto& [k, v] : inner) avoid.insert(k);
                std::string y = fresh_name(a->name, avoid);
                FormulaPtr body = subst_fo(a->left, {{a->name, fo_var(y)}});
                return f_all_fo(y, subst_fo(body, inner));
            }
            return f_all_fo(a->name, subst_fo(a->left, inner));
        }
        case Formula::Kind::AllSo:
            return f_all_so(a->name, a->arity, subst_fo(a->left, sigma));
    }
    return a;
}

FormulaPtr subst_so(const FormulaPtr& a, const std::string& x,
                    const std::vector<std::string>& params, const FormulaPtr& g) {
    // free first-order variables of g other than the parameters must not be
    // captured by first-order binders of a
    std::set<std::string> g_fo = formula_free_fo(g);
    for (auto& p : params) g_fo.erase(p);
    std::map<std::string, int> g_so = formula_free_so(g);

    std::function<FormulaPtr(const FormulaPtr&)> go = [&](const FormulaPtr& f) -> FormulaPtr {
        switch (f->kind) {
            case Formula::Kind::Absurd:
            case Formula::Kind::Pred:
                return f;
            case Formula::Kind::Var2: {
                if (f->name != x) return f;
                if ((int)params.size() != f->arity)
                    throw std::runtime_error("subst_so: arity mismatch for " + x);
                std::map<std::string, FoPtr> sigma;
                for (size_t i = 0; i < params.size(); ++i) sigma[params[i]] = f->args[i];
                return subst_fo(g, sigma);
            }
            case Formula::Kind::Arrow:
                return f_arrow(go(f->left), go(f->right));
            case Formula::Kind::AllFo: {
                if (g_fo.count(f->name)) {
                    auto avoid = g_fo;
                    auto bodyfree = formula_free_fo(f->left);
                    avoid.insert(bodyfree.begin(), bodyfree.end());
                    std::string y = fresh_name(f->name, avoid);
                    FormulaPtr body = subst_fo(f->left, {{f->name, fo_var(y)}});
                    return f_all_fo(y, go(body));
                }
                return f_all_fo(f->name, go(f->left));
            }
            case Formula::Kind::AllSo: {
                if (f->name == x) return f;
                if (g_so.count(f->name)) {
                    std::set<std::string> avoid;
                    for (auto& [k, v] : g_so) avoid.insert(k);
                    for (auto& [k, v] : formula_free_so(f->left)) avoid.insert(k);
                    avoid.insert(x);
                    std::string y = fresh_name(f->name, avoid);
                    std::vector<std::string> ps;
                    std::vector<FoPtr> as;
                    for (int i = 0; i < f->arity; ++i) {
                        ps.push_back("p" + std::to_string(i));
                        as.push_back(fo_var(ps.back()));
                    }
                    FormulaPtr body = subst_so(f->left, f->name, ps, f_var2(y, f->arity, as));
                    return f_all_so(y, f->arity, go(body));
                }
                return f_all_so(f->name, f->arity, go(f->left));
            }
        }
        return f;
    };
    return go(a);
}

FormulaPtr apply_subst(const FormulaPtr& a, const Substitution& sigma) {
    // simultaneous application: rename second-order targets to fresh markers,
    // apply the first-order part, then expand the markers
    FormulaPtr cur = a;
    std::vector<std::pair<std::string, std::string>> markers;
    std::set<std::string> avoid;
    for (auto& [k, v] : formula_free_so(a)) avoid.insert(k);
    for (auto& [k, v] : sigma.so) {
        avoid.insert(k);
        for (auto& [k2, v2] : formula_free_so(v.second)) avoid.insert(k2);
    }
    for (auto& [x, pg] : sigma.so) {
        auto so = formula_free_so(cur);
        auto it = so.find(x);
        if (it == so.end()) continue;
        int arity = it->second;
        std::string m = fresh_name("M_" + x, avoid);
        avoid.insert(m);
        std::vector<std::string> ps;
        std::vector<FoPtr> as;
        for (int i = 0; i < arity; ++i) {
            ps.push_back("p" + std::to_string(i));
            as.push_back(fo_var(ps.back()));
        }
        cur = subst_so(cur, x, ps, f_var2(m, arity, as));
        markers.emplace_back(m, x);
    }
    cur = subst_fo(cur, sigma.fo);
    for (auto& [m, x] : markers) {
        auto& [params, g] = sigma.so.at(x);
        cur = subst_so(cur, m, params, g);
    }
    return cur;
}

FormulaPtr forall_wrap(const std::vector<VarSpec>& xi, FormulaPtr body) {
    FormulaPtr out = std::move(body);
    for (auto it = xi.rbegin(); it != xi.rend(); ++it)
        out = it->second_order ? f_all_so(it->name, it->arity, out) : f_all_fo(it->name, out);
    return out;
}

std::optional<FormulaPtr> forall_strip(const FormulaPtr& a, const std::vector<VarSpec>& xi) {
    FormulaPtr cur = a;
    for (auto& v : xi) {
        if (v.second_order) {
            if (cur->kind != Formula::Kind::AllSo || cur->arity != v.arity) return std::nullopt;
            if (cur->name == v.name) {
                cur = cur->left;
            } else {
                auto so = formula_free_so(cur->left);
                if (so.count(v.name)) return std::nullopt;  // renaming would capture
                std::vector<std::string> ps;
                std::vector<FoPtr> as;
                for (int i = 0; i < v.arity; ++i) {
                    ps.push_back("p" + std::to_string(i));
                    as.push_back(fo_var(ps.back()));
                }
                cur = subst_so(cur->left, cur->name, ps, f_var2(v.name, v.arity, as));
            }
        } else {
            if (cur->kind != Formula::Kind::AllFo) return std::nullopt;
            if (cur->name == v.name) {
                cur = cur->left;
            } else {
                if (formula_free_fo(cur->left).count(v.name)) return std::nullopt;
                cur = subst_fo(cur->left, {{cur->name, fo_var(v.name)}});
            }
        }
    }
    return cur;
}

// ---- equations -------------------------------------------------------------

FormulaPtr equation_as_formula(const FoPtr& t, const FoPtr& tp) {
    std::set<std::string> used = fo_vars(t);
    auto v2 = fo_vars(tp);
    used.insert(v2.begin(), v2.end());
    std::string X = "X";
    return f_all_so(X, 1, f_arrow(f_var2(X, 1, {t}), f_var2(X, 1, {tp})));
}

std::optional<std::map<std::string, FoPtr>> match_particular_case(const EquationSystem& E,
                                                                  const FoPtr& u, const FoPtr& v) {
    for (auto& eq : E) {
        std::map<std::string, FoPtr> b;
        if (fo_match(eq.left, u, b) && fo_match(eq.right, v, b)) return b;
        b.clear();
        if (fo_match(eq.right, u, b) && fo_match(eq.left, v, b)) return b;
    }
    return std::nullopt;
}

// one-step rewrites of t by instances of E, both orientations, any position
static void rewrites(const EquationSystem& E, const FoPtr& t, std::vector<FoPtr>& out) {
    for (auto& eq : E) {
        for (int dir = 0; dir < 2; ++dir) {
            const FoPtr& lhs = dir == 0 ? eq.left : eq.right;
            const FoPtr& rhs = dir == 0 ? eq.right : eq.left;
            auto rv = fo_vars(rhs);
            auto lv = fo_vars(lhs);
            bool closed_rhs = std::includes(lv.begin(), lv.end(), rv.begin(), rv.end());
            if (!closed_rhs) continue;  // would need instance enumeration
            std::map<std::string, FoPtr> b;
            if (fo_match(lhs, t, b)) out.push_back(fo_subst(rhs, b));
        }
    }
    if (!t->is_var) {
        for (size_t i = 0; i < t->args.size(); ++i) {
            std::vector<FoPtr> sub;
            rewrites(E, t->args[i], sub);
            for (auto& s : sub) {
                auto args = t->args;
                args[i] = s;
                out.push_back(fo_app(t->name, std::move(args)));
            }
        }
    }
}

Trivalent eq_congruent(const EquationSystem& E, const FoPtr& a, const FoPtr& b,
                       std::uint64_t budget) {
    if (fo_eq(a, b)) return Trivalent::Yes;
    auto key = [](const FoPtr& t) { return print_fo(t); };
    std::map<std::string, int> seen;  // 0: from a, 1: from b
    std::deque<std::pair<FoPtr, int>> queue;
    seen[key(a)] = 0;
    seen[key(b)] = 1;
    queue.emplace_back(a, 0);
    queue.emplace_back(b, 1);
    std::uint64_t used = 0;
    while (!queue.empty()) {
        auto [t, side] = queue.front();
        queue.pop_front();
        std::vector<FoPtr> next;
        rewrites(E, t, next);
        for (auto& n : next) {
            if (++used > budget) return Trivalent::Unknown;
            auto k = key(n);
            auto it = seen.find(k);
            if (it != seen.end()) {
                if (it->second != side) return Trivalent::Yes;
                continue;
            }
            seen[k] = side;
            queue.emplace_back(n, side);
        }
    }
    return Trivalent::Unknown;
}

FoPtr rewrite_canonical(const EquationSystem& E, const FoPtr& t, std::uint64_t budget) {
    FoPtr cur = t;
    for (std::uint64_t i = 0; i < budget; ++i) {
        // leftmost-innermost single step, left-to-right only
        std::function<std::optional<FoPtr>(const FoPtr&)> step =
            [&](const FoPtr& u) -> std::optional<FoPtr> {
            if (!u->is_var) {
                for (size_t j = 0; j < u->args.size(); ++j) {
                    if (auto s = step(u->args[j])) {
                        auto args = u->args;
                        args[j] = *s;
                        return fo_app(u->name, std::move(args));
                    }
                }
            }
            for (auto& eq : E) {
                std::map<std::string, FoPtr> b;
                if (fo_match(eq.left, u, b)) {
                    auto rv = fo_vars(eq.right);
                    bool ok = true;
                    for (auto& v : rv) ok = ok && b.count(v);
                    if (ok) return fo_subst(eq.right, b);
                }
            }
            return std::nullopt;
        };
        auto n = step(cur);
        if (!n) return cur;
        cur = *n;
    }
    return cur;
}

// ---- printing --------------------------------------------------------------

static void fprint_go(const FormulaPtr& a, std::ostringstream& os, bool antecedent) {
    switch (a->kind) {
        case Formula::Kind::Absurd:
            os << "_|_";
            break;
        case Formula::Kind::Pred:
        case Formula::Kind::Var2:
            os << a->name;
            if (!a->args.empty()) {
                os << '(';
                for (size_t i = 0; i < a->args.size(); ++i) {
                    if (i) os << ", ";
                    os << print_fo(a->args[i]);
                }
                os << ')';
            }
            break;
        case Formula::Kind::Arrow: {
            bool parens = antecedent;
            if (parens) os << '(';
            fprint_go(a->left, os, true);
            os << " -> ";
            fprint_go(a->right, os, false);
            if (parens) os << ')';
            break;
        }
        case Formula::Kind::AllFo:
        case Formula::Kind::AllSo: {
            bool parens = antecedent;
            if (parens) os << '(';
            os << '!' << a->name << ". ";
            fprint_go(a->left, os, false);
            if (parens) os << ')';
            break;
        }
    }
}

std::string print_formula(const FormulaPtr& a) {
    std::ostringstream os;
    fprint_go(a, os, false);
    return os.str();
}

// ---- parsing ---------------------------------------------------------------

namespace {

struct FormulaParser {
    const std::string& s;
    size_t i = 0;
    const Signature* sig;  // may be null; then uppercase atoms are variables
    // second-order binders currently in scope, name -> arity (-1: not yet known)
    std::vector<std::pair<std::string, int>> so_scope;

    FormulaParser(const std::string& str, const Signature* signature) : s(str), sig(signature) {}

    [[noreturn]] void fail(const std::string& msg) {
        throw std::runtime_error("formula parse error at offset " + std::to_string(i) + ": " + msg);
    }
    void skip_ws() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    bool peek(const std::string& tok) {
        skip_ws();
        return s.compare(i, tok.size(), tok) == 0;
    }
    bool eat(const std::string& tok) {
        if (!peek(tok)) return false;
        i += tok.size();
        return true;
    }
    std::string ident() {
        skip_ws();
        size_t start = i;
        while (i < s.size() && (std::isalnum((unsigned char)s[i]) || s[i] == '_' || s[i] == '\''))
            ++i;
        if (i == start) fail("expected identifier");
        return s.substr(start, i - start);
    }

    FoPtr fo_term() {
        std::string n = ident();
        std::vector<FoPtr> args;
        if (eat("(")) {
            if (!eat(")")) {
                do {
                    args.push_back(fo_term());
                } while (eat(","));
                if (!eat(")")) fail("expected ')'");
            }
        }
        bool declared_fun = sig && sig->funs.count(n);
        if (args.empty() && !declared_fun && std::islower((unsigned char)n[0]))
            return fo_var(n);
        if (sig && !declared_fun) fail("unknown function symbol " + n);
        if (declared_fun && (int)args.size() != sig->funs.at(n))
            fail("arity mismatch for function " + n);
        return fo_app(n, std::move(args));
    }

    FormulaPtr atom_or_group() {
        skip_ws();
        if (i >= s.size()) fail("unexpected end of input");
        if (eat("_|_")) return f_absurd();
        if (s[i] == '(') {
            ++i;
            FormulaPtr f = formula();
            if (!eat(")")) fail("expected ')'");
            return f;
        }
        if (s[i] == '!') {
            ++i;
            std::string v = ident();
            bool second = std::isupper((unsigned char)v[0]);
            int declared_arity = -1;
            if (eat("/")) {
                declared_arity = (int)std::stoul(ident());
            }
            if (!eat(".")) fail("expected '.' after quantifier");
            if (second) {
                so_scope.emplace_back(v, declared_arity);
                FormulaPtr body = formula();
                int arity = so_scope.back().second;
                so_scope.pop_back();
                if (arity < 0) arity = 0;  // unused binder
                return f_all_so(v, arity, body);
            }
            FormulaPtr body = formula();
            return f_all_fo(v, body);
        }
        // atom
        size_t save = i;
        std::string n = ident();
        std::vector<FoPtr> args;
        // only treat '(' as an argument list, not a grouped formula, when it
        // starts a term; formulas never start an argument list here because
        // atoms are the only named heads
        if (peek("(")) {
            eat("(");
            if (!eat(")")) {
                do {
                    args.push_back(fo_term());
                } while (eat(","));
                if (!eat(")")) fail("expected ')'");
            }
        }
        (void)save;
        if (sig && sig->preds.count(n)) {
            if ((int)args.size() != sig->preds.at(n)) fail("arity mismatch for predicate " + n);
            return f_pred(n, std::move(args));
        }
        if (!std::isupper((unsigned char)n[0])) fail("unknown predicate or lowercase atom " + n);
        // second-order variable: bound takes binder arity, free takes declared
        for (auto it = so_scope.rbegin(); it != so_scope.rend(); ++it) {
            if (it->first == n) {
                if (it->second < 0)
                    it->second = (int)args.size();
                else if (it->second != (int)args.size())
                    fail("inconsistent arity for bound variable " + n);
                { int k = (int)args.size(); return f_var2(n, k, std::move(args)); }
            }
        }
        if (sig && sig->svars.count(n) && sig->svars.at(n) != (int)args.size())
            fail("arity mismatch for second-order variable " + n);
        { int k = (int)args.size(); return f_var2(n, k, std::move(args)); }
    }

    FormulaPtr formula() {
        FormulaPtr left = atom_or_group();
        if (eat("->")) return f_arrow(left, formula());
        return left;
    }
};

}  // namespace

FoPtr parse_fo(const std::string& text) {
    FormulaParser p(text, nullptr);
    FoPtr t = p.fo_term();
    p.skip_ws();
    if (p.i != text.size()) p.fail("trailing input");
    return t;
}

FormulaPtr parse_formula_with(const std::string& text, const Signature* sig) {
    FormulaParser p(text, sig);
    FormulaPtr f = p.formula();
    p.skip_ws();
    if (p.i != text.size()) p.fail("trailing input");
    return f;
}

FormulaPtr parse_formula(const std::string& text) { return parse_formula_with(text, nullptr); }

// ---- validation ------------------------------------------------------------

void validate_fo(const Signature& sig, const FoPtr& t) {
    if (t->is_var) return;
    auto it = sig.funs.find(t->name);
    if (it == sig.funs.end()) throw std::runtime_error("unknown function symbol " + t->name);
    if (it->second != (int)t->args.size())
        throw std::runtime_error("arity mismatch for function " + t->name);
    for (auto& a : t->args) validate_fo(sig, a);
}

void validate_formula(const Signature& sig, const FormulaPtr& a) {
    switch (a->kind) {
        case Formula::Kind::Absurd:
            return;
        case Formula::Kind::Pred: {
            auto it = sig.preds.find(a->name);
            if (it == sig.preds.end())
                throw std::runtime_error("unknown predicate symbol " + a->name);
            if (it->second != (int)a->args.size())
                throw std::runtime_error("arity mismatch for predicate " + a->name);
            for (auto& t : a->args) validate_fo(sig, t);
            return;
        }
        case Formula::Kind::Var2:
            for (auto& t : a->args) validate_fo(sig, t);
            return;
        case Formula::Kind::Arrow:
            validate_formula(sig, a->left);
            validate_formula(sig, a->right);
            return;
        case Formula::Kind::AllFo:
        case Formula::Kind::AllSo:
            validate_formula(sig, a->left);
            return;
    }
}

}  // namespace af2
