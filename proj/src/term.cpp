#include "af2/term.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace af2 {

TermPtr mk_var(std::string name) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Var;
    t->name = std::move(name);
    return t;
}

TermPtr mk_abs(std::string binder, TermPtr body) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Abs;
    t->name = std::move(binder);
    t->sub = std::move(body);
    return t;
}

TermPtr mk_app(TermPtr fun, TermPtr arg) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::App;
    t->sub = std::move(fun);
    t->arg = std::move(arg);
    return t;
}

static void free_vars_go(const TermPtr& t, std::set<std::string>& bound,
                         std::set<std::string>& out) {
    switch (t->kind) {
        case Term::Kind::Var:
            if (!bound.count(t->name)) out.insert(t->name);
            break;
        case Term::Kind::Abs: {
            bool was = bound.count(t->name) > 0;
            bound.insert(t->name);
            free_vars_go(t->sub, bound, out);
            if (!was) bound.erase(t->name);
            break;
        }
        case Term::Kind::App:
            free_vars_go(t->sub, bound, out);
            free_vars_go(t->arg, bound, out);
            break;
    }
}

std::set<std::string> free_vars(const TermPtr& t) {
    std::set<std::string> bound, out;
    free_vars_go(t, bound, out);
    return out;
}

// Alpha-equivalence by locally-nameless comparison.
static bool alpha_go(const TermPtr& a, const TermPtr& b,
                     std::vector<std::string>& ea, std::vector<std::string>& eb) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Term::Kind::Var: {
            for (int i = (int)ea.size() - 1; i >= 0; --i) {
                bool ma = ea[i] == a->name, mb = eb[i] == b->name;
                if (ma || mb) return ma && mb;
            }
            return a->name == b->name;
        }
        case Term::Kind::Abs: {
            ea.push_back(a->name);
            eb.push_back(b->name);
            bool r = alpha_go(a->sub, b->sub, ea, eb);
            ea.pop_back();
            eb.pop_back();
            return r;
        }
        case Term::Kind::App:
            return alpha_go(a->sub, b->sub, ea, eb) && alpha_go(a->arg, b->arg, ea, eb);
    }
    return false;
}

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
    std::vector<std::string> ea, eb;
    return alpha_go(a, b, ea, eb);
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    if (!avoid.count(base)) return base;
    // strip a trailing digit suffix so x3 freshens to x4, not x31
    std::string stem = base;
    while (!stem.empty() && std::isdigit((unsigned char)stem.back())) stem.pop_back();
    if (stem.empty()) stem = base;
    for (int i = 1;; ++i) {
        std::string cand = stem + std::to_string(i);
        if (!avoid.count(cand)) return cand;
    }
}

TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& v) {
    switch (t->kind) {
        case Term::Kind::Var:
            return t->name == x ? v : t;
        case Term::Kind::Abs: {
            if (t->name == x) return t;
            auto fv_v = free_vars(v);
            if (fv_v.count(t->name)) {
                auto avoid = fv_v;
                auto fv_body = free_vars(t->sub);
                avoid.insert(fv_body.begin(), fv_body.end());
                avoid.insert(x);
                std::string y = fresh_name(t->name, avoid);
                TermPtr body = substitute(t->sub, t->name, mk_var(y));
                return mk_abs(y, substitute(body, x, v));
            }
            return mk_abs(t->name, substitute(t->sub, x, v));
        }
        case Term::Kind::App:
            return mk_app(substitute(t->sub, x, v), substitute(t->arg, x, v));
    }
    return t;
}

HeadShape head_shape(const TermPtr& t) {
    if (t->kind == Term::Kind::Abs) return HeadShape::HeadAbstraction;
    // walk the application spine to the head
    TermPtr h = t;
    while (h->kind == Term::Kind::App) h = h->sub;
    return h->kind == Term::Kind::Abs ? HeadShape::WeakHeadRedex : HeadShape::HeadVariable;
}

std::optional<TermPtr> step_weak_head(const TermPtr& t) {
    if (head_shape(t) != HeadShape::WeakHeadRedex) return std::nullopt;
    // t = (\x u) v v1 ... vm : contract the head redex
    std::vector<TermPtr> args;
    TermPtr h = t;
    while (h->kind == Term::Kind::App) {
        args.push_back(h->arg);
        h = h->sub;
    }
    // h is the abstraction, args reversed: last pushed is v
    TermPtr res = substitute(h->sub, h->name, args.back());
    for (int i = (int)args.size() - 2; i >= 0; --i) res = mk_app(res, args[i]);
    return res;
}

std::optional<TermPtr> step_beta(const TermPtr& t) {
    // leftmost-outermost
    if (t->kind == Term::Kind::App && t->sub->kind == Term::Kind::Abs)
        return substitute(t->sub->sub, t->sub->name, t->arg);
    switch (t->kind) {
        case Term::Kind::Var:
            return std::nullopt;
        case Term::Kind::Abs:
            if (auto b = step_beta(t->sub)) return mk_abs(t->name, *b);
            return std::nullopt;
        case Term::Kind::App:
            if (auto f = step_beta(t->sub)) return mk_app(*f, t->arg);
            if (auto a = step_beta(t->arg)) return mk_app(t->sub, *a);
            return std::nullopt;
    }
    return std::nullopt;
}

static bool is_eta_redex(const TermPtr& t) {
    return t->kind == Term::Kind::Abs && t->sub->kind == Term::Kind::App &&
           t->sub->arg->kind == Term::Kind::Var && t->sub->arg->name == t->name &&
           !free_vars(t->sub->sub).count(t->name);
}

std::optional<TermPtr> step_eta(const TermPtr& t) {
    if (is_eta_redex(t)) return t->sub->sub;
    switch (t->kind) {
        case Term::Kind::Var:
            return std::nullopt;
        case Term::Kind::Abs:
            if (auto b = step_eta(t->sub)) return mk_abs(t->name, *b);
            return std::nullopt;
        case Term::Kind::App:
            if (auto f = step_eta(t->sub)) return mk_app(*f, t->arg);
            if (auto a = step_eta(t->arg)) return mk_app(t->sub, *a);
            return std::nullopt;
    }
    return std::nullopt;
}

ReductionResult reduce(const TermPtr& t, Strategy strategy, std::uint64_t budget) {
    ReductionResult r{t, 0, ReductionStatus::NormalForm};
    auto step = [&](const TermPtr& u) -> std::optional<TermPtr> {
        switch (strategy) {
            case Strategy::BetaNormalOrder: return step_beta(u);
            case Strategy::Eta: return step_eta(u);
            case Strategy::WeakHead: return step_weak_head(u);
        }
        return std::nullopt;
    };
    while (true) {
        auto next = step(r.result);
        if (!next) return r;
        if (r.steps_used >= budget) {
            r.status = ReductionStatus::BudgetExhausted;
            return r;
        }
        r.result = *next;
        ++r.steps_used;
    }
}

std::optional<TermPtr> subterm_at(const TermPtr& t, const TermPath& path) {
    TermPtr cur = t;
    for (int step : path) {
        switch (cur->kind) {
            case Term::Kind::Abs:
                if (step != 0) return std::nullopt;
                cur = cur->sub;
                break;
            case Term::Kind::App:
                if (step == 0) cur = cur->sub;
                else if (step == 1) cur = cur->arg;
                else return std::nullopt;
                break;
            default:
                return std::nullopt;
        }
    }
    return cur;
}

static std::optional<TermPtr> rebuild_at(const TermPtr& t, const TermPath& path, size_t i,
                                         const std::function<std::optional<TermPtr>(const TermPtr&)>& f) {
    if (i == path.size()) return f(t);
    switch (t->kind) {
        case Term::Kind::Abs: {
            if (path[i] != 0) return std::nullopt;
            auto b = rebuild_at(t->sub, path, i + 1, f);
            if (!b) return std::nullopt;
            return mk_abs(t->name, *b);
        }
        case Term::Kind::App: {
            if (path[i] == 0) {
                auto x = rebuild_at(t->sub, path, i + 1, f);
                if (!x) return std::nullopt;
                return mk_app(*x, t->arg);
            }
            if (path[i] == 1) {
                auto x = rebuild_at(t->arg, path, i + 1, f);
                if (!x) return std::nullopt;
                return mk_app(t->sub, *x);
            }
            return std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

std::optional<TermPtr> contract_at(const TermPtr& t, const TermPath& path, bool eta) {
    return rebuild_at(t, path, 0, [eta](const TermPtr& u) -> std::optional<TermPtr> {
        if (eta) {
            if (!is_eta_redex(u)) return std::nullopt;
            return u->sub->sub;
        }
        if (u->kind == Term::Kind::App && u->sub->kind == Term::Kind::Abs)
            return substitute(u->sub->sub, u->sub->name, u->arg);
        return std::nullopt;
    });
}

static void redex_go(const TermPtr& t, bool eta, TermPath& cur, std::vector<TermPath>& out) {
    bool hit = eta ? is_eta_redex(t)
                   : (t->kind == Term::Kind::App && t->sub->kind == Term::Kind::Abs);
    if (hit) out.push_back(cur);
    switch (t->kind) {
        case Term::Kind::Abs:
            cur.push_back(0);
            redex_go(t->sub, eta, cur, out);
            cur.pop_back();
            break;
        case Term::Kind::App:
            cur.push_back(0);
            redex_go(t->sub, eta, cur, out);
            cur.back() = 1;
            redex_go(t->arg, eta, cur, out);
            cur.pop_back();
            break;
        default:
            break;
    }
}

std::vector<TermPath> redex_paths(const TermPtr& t, bool eta) {
    TermPath cur;
    std::vector<TermPath> out;
    redex_go(t, eta, cur, out);
    return out;
}

Trivalent beta_equiv(const TermPtr& a, const TermPtr& b, std::uint64_t budget) {
    auto ra = reduce(a, Strategy::BetaNormalOrder, budget);
    auto rb = reduce(b, Strategy::BetaNormalOrder, budget);
    if (ra.status == ReductionStatus::BudgetExhausted ||
        rb.status == ReductionStatus::BudgetExhausted)
        return Trivalent::Unknown;
    return alpha_eq(ra.result, rb.result) ? Trivalent::Yes : Trivalent::No;
}

bool is_beta_normal(const TermPtr& t) { return !step_beta(t).has_value(); }

std::uint64_t term_size(const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::Var: return 1;
        case Term::Kind::Abs: return 1 + term_size(t->sub);
        case Term::Kind::App: return 1 + term_size(t->sub) + term_size(t->arg);
    }
    return 0;
}

// ---- concrete syntax -------------------------------------------------------

static void print_go(const TermPtr& t, std::ostringstream& os, bool arg_pos) {
    switch (t->kind) {
        case Term::Kind::Var:
            os << t->name;
            break;
        case Term::Kind::Abs:
            // lambdas bind as far right as possible; parenthesize except at
            // the tail of an enclosing context
            os << '\\' << t->name << ". ";
            print_go(t->sub, os, false);
            break;
        case Term::Kind::App: {
            if (t->sub->kind == Term::Kind::Abs) {
                os << '(';
                print_go(t->sub, os, false);
                os << ')';
            } else {
                print_go(t->sub, os, false);
            }
            os << ' ';
            if (t->arg->kind == Term::Kind::Var) {
                print_go(t->arg, os, true);
            } else {
                os << '(';
                print_go(t->arg, os, false);
                os << ')';
            }
            break;
        }
    }
    (void)arg_pos;
}

std::string print_term(const TermPtr& t) {
    std::ostringstream os;
    print_go(t, os, false);
    return os.str();
}

namespace {

struct TermParser {
    const std::string& s;
    size_t i = 0;
    explicit TermParser(const std::string& str) : s(str) {}

    [[noreturn]] void fail(const std::string& msg) {
        throw std::runtime_error("term parse error at offset " + std::to_string(i) + ": " + msg);
    }
    void skip_ws() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    bool eat(char c) {
        skip_ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    std::string ident() {
        skip_ws();
        size_t start = i;
        while (i < s.size() && (std::isalnum((unsigned char)s[i]) || s[i] == '_' || s[i] == '\''))
            ++i;
        if (i == start) fail("expected identifier");
        return s.substr(start, i - start);
    }

    TermPtr atom() {
        skip_ws();
        if (i >= s.size()) fail("unexpected end of input");
        if (s[i] == '(') {
            ++i;
            TermPtr t = expr();
            if (!eat(')')) fail("expected ')'");
            return t;
        }
        if (s[i] == '\\') {
            ++i;
            std::string x = ident();
            if (!eat('.')) fail("expected '.' after binder");
            return mk_abs(x, expr());
        }
        std::string n = ident();
        if (!std::islower((unsigned char)n[0])) fail("term variables are lowercase");
        return mk_var(n);
    }

    TermPtr expr() {
        TermPtr t = atom();
        while (true) {
            skip_ws();
            if (i >= s.size() || s[i] == ')') return t;
            t = mk_app(t, atom());
        }
    }
};

}  // namespace

TermPtr parse_term(const std::string& text) {
    TermParser p(text);
    TermPtr t = p.expr();
    p.skip_ws();
    if (p.i != text.size()) p.fail("trailing input");
    return t;
}

}  // namespace af2
