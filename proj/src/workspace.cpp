#include <cctype>
#include <sstream>
#include <stdexcept>

#include "af2/workspace.hpp"

namespace af2 {

// ---- s-expressions ----------------------------------------------------------

namespace {

struct Sx {
    enum class Kind { List, Atom, Brace };
    Kind kind;
    std::string text;       // Atom / Brace payload
    std::vector<Sx> items;  // List
};

struct SxParser {
    const std::string& s;
    size_t i = 0;

    [[noreturn]] void fail(const std::string& msg) {
        throw std::runtime_error("proof parse error at offset " + std::to_string(i) + ": " +
                                 msg);
    }
    void skip_ws() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    Sx parse() {
        skip_ws();
        if (i >= s.size()) fail("unexpected end of input");
        if (s[i] == '(') {
            ++i;
            Sx x{Sx::Kind::List, "", {}};
            while (true) {
                skip_ws();
                if (i >= s.size()) fail("missing ')'");
                if (s[i] == ')') {
                    ++i;
                    return x;
                }
                x.items.push_back(parse());
            }
        }
        if (s[i] == '{') {
            ++i;
            size_t start = i;
            int depth = 1;
            while (i < s.size()) {
                if (s[i] == '{') ++depth;
                if (s[i] == '}' && --depth == 0) break;
                ++i;
            }
            if (i >= s.size()) fail("missing '}'");
            Sx x{Sx::Kind::Brace, s.substr(start, i - start), {}};
            ++i;
            return x;
        }
        size_t start = i;
        while (i < s.size() && !std::isspace((unsigned char)s[i]) && s[i] != '(' &&
               s[i] != ')' && s[i] != '{' && s[i] != '}')
            ++i;
        if (i == start) fail("unexpected character");
        return {Sx::Kind::Atom, s.substr(start, i - start), {}};
    }
};

const Sx& item(const Sx& x, size_t k, const std::string& what) {
    if (x.kind != Sx::Kind::List || x.items.size() <= k)
        throw std::runtime_error("malformed " + what + " node");
    return x.items[k];
}
std::string atom(const Sx& x, const std::string& what) {
    if (x.kind != Sx::Kind::Atom) throw std::runtime_error("expected a name in " + what);
    return x.text;
}
std::string brace(const Sx& x, const std::string& what) {
    if (x.kind != Sx::Kind::Brace)
        throw std::runtime_error("expected a {...} payload in " + what);
    return x.text;
}

VarSpec parse_varspec(const std::string& a) {
    VarSpec v;
    std::string name = a;
    auto slash = a.find('/');
    if (slash != std::string::npos) {
        name = a.substr(0, slash);
        v.arity = std::stoi(a.substr(slash + 1));
    }
    v.name = name;
    v.second_order = !name.empty() && std::isupper((unsigned char)name[0]);
    return v;
}

std::string print_varspec(const VarSpec& v) {
    if (v.second_order && v.arity > 0) return v.name + "/" + std::to_string(v.arity);
    return v.name;
}

std::vector<VarSpec> parse_varspecs(const Sx& x, const std::string& what) {
    if (x.kind != Sx::Kind::List)
        throw std::runtime_error("expected a variable list in " + what);
    std::vector<VarSpec> out;
    for (auto& it : x.items) out.push_back(parse_varspec(atom(it, what)));
    return out;
}

SubPtr sp_from_sx(const Sx& x, const Signature* sig);

SubPtr sp_from_sx(const Sx& x, const Signature* sig) {
    std::string tag = atom(item(x, 0, "subproof"), "subproof");
    if (tag == "ax") return sp_ax();
    if (tag == "dist") {
        std::vector<VarSpec> xi;
        for (size_t k = 1; k < x.items.size(); ++k)
            xi.push_back(parse_varspec(atom(x.items[k], "dist")));
        return sp_dist(std::move(xi));
    }
    if (tag == "mono")
        return sp_mono(sp_from_sx(item(x, 1, "mono"), sig), sp_from_sx(item(x, 2, "mono"), sig));
    if (tag == "forall-elim") {
        if (x.items.size() == 3)
            return sp_all_elim_fo(parse_fo(brace(item(x, 1, "forall-elim"), "forall-elim")),
                                  sp_from_sx(item(x, 2, "forall-elim"), sig));
        std::vector<std::string> params;
        for (auto& p : item(x, 1, "forall-elim").items) params.push_back(atom(p, "params"));
        FormulaPtr g = parse_formula_with(brace(item(x, 2, "forall-elim"), "forall-elim"), sig);
        return sp_all_elim_so(std::move(params), g, sp_from_sx(item(x, 3, "forall-elim"), sig));
    }
    if (tag == "forall-intro")
        return sp_all_intro(parse_varspec(atom(item(x, 1, "forall-intro"), "forall-intro")),
                            sp_from_sx(item(x, 2, "forall-intro"), sig));
    if (tag == "trans")
        return sp_trans(parse_formula_with(brace(item(x, 1, "trans"), "trans"), sig),
                        sp_from_sx(item(x, 2, "trans"), sig),
                        sp_from_sx(item(x, 3, "trans"), sig));
    if (tag == "eq") {
        FormulaPtr templ = parse_formula_with(brace(item(x, 1, "eq"), "eq"), sig);
        std::string hole = atom(item(x, 2, "eq"), "eq");
        FoPtr u = parse_fo(brace(item(x, 3, "eq"), "eq"));
        FoPtr v = parse_fo(brace(item(x, 4, "eq"), "eq"));
        std::string dir = atom(item(x, 5, "eq"), "eq");
        if (dir != "lr" && dir != "rl") throw std::runtime_error("eq direction must be lr or rl");
        return sp_eq(templ, hole, u, v, dir == "lr", sp_from_sx(item(x, 6, "eq"), sig));
    }
    throw std::runtime_error("unknown subproof tag " + tag);
}

void sp_to_sx(const SubPtr& p, std::ostringstream& os) {
    using K = SubProof::Kind;
    switch (p->kind) {
        case K::Ax:
            os << "(ax)";
            return;
        case K::Dist:
            os << "(dist";
            for (auto& v : p->xi) os << ' ' << print_varspec(v);
            os << ')';
            return;
        case K::Mono:
            os << "(mono ";
            sp_to_sx(p->a, os);
            os << ' ';
            sp_to_sx(p->b, os);
            os << ')';
            return;
        case K::AllElim:
            if (p->so_inst) {
                os << "(forall-elim (";
                for (size_t i = 0; i < p->inst_params.size(); ++i)
                    os << (i ? " " : "") << p->inst_params[i];
                os << ") {" << print_formula(p->inst_formula) << "} ";
            } else {
                os << "(forall-elim {" << print_fo(p->inst_term) << "} ";
            }
            sp_to_sx(p->a, os);
            os << ')';
            return;
        case K::AllIntro:
            os << "(forall-intro " << print_varspec(p->xi.at(0)) << ' ';
            sp_to_sx(p->a, os);
            os << ')';
            return;
        case K::Trans:
            os << "(trans {" << print_formula(p->mid) << "} ";
            sp_to_sx(p->a, os);
            os << ' ';
            sp_to_sx(p->b, os);
            os << ')';
            return;
        case K::EqStep:
            os << "(eq {" << print_formula(p->mid) << "} " << p->hole << " {"
               << print_fo(p->eq_u) << "} {" << print_fo(p->eq_v) << "} "
               << (p->eq_lr ? "lr" : "rl") << ' ';
            sp_to_sx(p->a, os);
            os << ')';
            return;
    }
}

DerivPtr dv_from_sx(const Sx& x, const Signature* sig) {
    std::string tag = atom(item(x, 0, "derivation"), "derivation");
    auto F = [&](size_t k) {
        return parse_formula_with(brace(item(x, k, tag), tag), sig);
    };
    if (tag == "r1") return dv_r1(atom(item(x, 1, tag), tag));
    if (tag == "r2") return dv_r2(atom(item(x, 1, tag), tag), dv_from_sx(item(x, 2, tag), sig));
    if (tag == "r3")
        return dv_r3(F(1), dv_from_sx(item(x, 2, tag), sig), dv_from_sx(item(x, 3, tag), sig));
    if (tag == "r4" || tag == "r6")
        return dv_gen(parse_varspec(atom(item(x, 1, tag), tag)),
                      dv_from_sx(item(x, 2, tag), sig));
    if (tag == "r5")
        return dv_r5(F(1), parse_fo(brace(item(x, 2, tag), tag)),
                     dv_from_sx(item(x, 3, tag), sig));
    if (tag == "r7") {
        std::vector<std::string> params;
        for (auto& p : item(x, 2, tag).items) params.push_back(atom(p, "params"));
        return dv_r7(F(1), std::move(params), F(3), dv_from_sx(item(x, 4, tag), sig));
    }
    if (tag == "r8") {
        std::string dir = atom(item(x, 5, tag), tag);
        if (dir != "lr" && dir != "rl") throw std::runtime_error("r8 direction must be lr or rl");
        return dv_r8(F(1), atom(item(x, 2, tag), tag), parse_fo(brace(item(x, 3, tag), tag)),
                     parse_fo(brace(item(x, 4, tag), tag)), dir == "lr",
                     dv_from_sx(item(x, 6, tag), sig));
    }
    if (tag == "sub")
        return dv_sub(sp_from_sx(item(x, 1, tag), sig), dv_from_sx(item(x, 2, tag), sig));
    if (tag == "s1")
        return dv_s1(atom(item(x, 1, tag), tag), parse_varspecs(item(x, 2, tag), tag),
                     sp_from_sx(item(x, 3, tag), sig));
    if (tag == "s2")
        return dv_s2(atom(item(x, 1, tag), tag), dv_from_sx(item(x, 2, tag), sig),
                     sp_from_sx(item(x, 3, tag), sig));
    if (tag == "s3")
        return dv_s3(F(1), parse_varspecs(item(x, 2, tag), tag),
                     dv_from_sx(item(x, 3, tag), sig), dv_from_sx(item(x, 4, tag), sig),
                     sp_from_sx(item(x, 5, tag), sig));
    if (tag == "eta") {
        TermPtr src = parse_term(brace(item(x, 1, tag), tag));
        TermPath path;
        for (auto& p : item(x, 2, tag).items) path.push_back(std::stoi(atom(p, "path")));
        return dv_eta(src, path, dv_from_sx(item(x, 3, tag), sig));
    }
    throw std::runtime_error("unknown derivation tag " + tag);
}

void dv_to_sx(const DerivPtr& d, std::ostringstream& os) {
    using K = Derivation::Kind;
    switch (d->kind) {
        case K::R1:
            os << "(r1 " << d->name << ')';
            return;
        case K::R2:
            os << "(r2 " << d->name << ' ';
            dv_to_sx(d->d1, os);
            os << ')';
            return;
        case K::R3:
            os << "(r3 {" << print_formula(d->prem) << "} ";
            dv_to_sx(d->d1, os);
            os << ' ';
            dv_to_sx(d->d2, os);
            os << ')';
            return;
        case K::R4:
        case K::R6:
            os << (d->kind == K::R4 ? "(r4 " : "(r6 ") << print_varspec(d->gen) << ' ';
            dv_to_sx(d->d1, os);
            os << ')';
            return;
        case K::R5:
            os << "(r5 {" << print_formula(d->prem) << "} {" << print_fo(d->inst_term) << "} ";
            dv_to_sx(d->d1, os);
            os << ')';
            return;
        case K::R7: {
            os << "(r7 {" << print_formula(d->prem) << "} (";
            for (size_t i = 0; i < d->inst_params.size(); ++i)
                os << (i ? " " : "") << d->inst_params[i];
            os << ") {" << print_formula(d->inst_formula) << "} ";
            dv_to_sx(d->d1, os);
            os << ')';
            return;
        }
        case K::R8:
            os << "(r8 {" << print_formula(d->prem) << "} " << d->hole << " {"
               << print_fo(d->eq_u) << "} {" << print_fo(d->eq_v) << "} "
               << (d->eq_lr ? "lr" : "rl") << ' ';
            dv_to_sx(d->d1, os);
            os << ')';
            return;
        case K::Sub:
            os << "(sub ";
            sp_to_sx(d->sub, os);
            os << ' ';
            dv_to_sx(d->d1, os);
            os << ')';
            return;
        case K::S1: {
            os << "(s1 " << d->name << " (";
            for (size_t i = 0; i < d->xi.size(); ++i)
                os << (i ? " " : "") << print_varspec(d->xi[i]);
            os << ") ";
            sp_to_sx(d->sub, os);
            os << ')';
            return;
        }
        case K::S2:
            os << "(s2 " << d->name << ' ';
            dv_to_sx(d->d1, os);
            os << ' ';
            sp_to_sx(d->sub, os);
            os << ')';
            return;
        case K::S3: {
            os << "(s3 {" << print_formula(d->prem) << "} (";
            for (size_t i = 0; i < d->xi.size(); ++i)
                os << (i ? " " : "") << print_varspec(d->xi[i]);
            os << ") ";
            dv_to_sx(d->d1, os);
            os << ' ';
            dv_to_sx(d->d2, os);
            os << ' ';
            sp_to_sx(d->sub, os);
            os << ')';
            return;
        }
        case K::Eta: {
            os << "(eta {" << print_term(d->eta_source) << "} (";
            for (size_t i = 0; i < d->eta_path.size(); ++i)
                os << (i ? " " : "") << d->eta_path[i];
            os << ") ";
            dv_to_sx(d->d1, os);
            os << ')';
            return;
        }
    }
}

}  // namespace

std::string print_subproof(const SubPtr& p) {
    std::ostringstream os;
    sp_to_sx(p, os);
    return os.str();
}

SubPtr parse_subproof(const std::string& text, const Signature* sig) {
    SxParser p{text};
    Sx x = p.parse();
    p.skip_ws();
    if (p.i != text.size()) p.fail("trailing input");
    return sp_from_sx(x, sig);
}

std::string print_derivation(const DerivPtr& d) {
    std::ostringstream os;
    dv_to_sx(d, os);
    return os.str();
}

DerivPtr parse_derivation(const std::string& text, const Signature* sig) {
    SxParser p{text};
    Sx x = p.parse();
    p.skip_ws();
    if (p.i != text.size()) p.fail("trailing input");
    return dv_from_sx(x, sig);
}

// ---- workspace --------------------------------------------------------------

const FormulaPtr* Workspace::formula(const std::string& n) const {
    for (auto& [k, v] : formulas)
        if (k == n) return &v;
    return nullptr;
}
const TermPtr* Workspace::term(const std::string& n) const {
    for (auto& [k, v] : terms)
        if (k == n) return &v;
    return nullptr;
}
const Context* Workspace::context(const std::string& n) const {
    for (auto& [k, v] : contexts)
        if (k == n) return &v;
    return nullptr;
}
const NamedSubproof* Workspace::subproof(const std::string& n) const {
    for (auto& s : subproofs)
        if (s.name == n) return &s;
    return nullptr;
}
const NamedDerivation* Workspace::derivation(const std::string& n) const {
    for (auto& d : derivations)
        if (d.name == n) return &d;
    return nullptr;
}

namespace {

struct WsParser {
    Workspace w;
    int lineno = 0;

    [[noreturn]] void fail(const std::string& msg) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": " + msg);
    }

    // split `text` at the first occurrence of `sep` outside parens and braces
    static bool split_top(const std::string& text, const std::string& sep, std::string& a,
                          std::string& b) {
        int depth = 0;
        for (size_t i = 0; i + sep.size() <= text.size(); ++i) {
            char c = text[i];
            if (c == '(' || c == '{') ++depth;
            if (c == ')' || c == '}') --depth;
            if (depth == 0 && text.compare(i, sep.size(), sep) == 0) {
                a = text.substr(0, i);
                b = text.substr(i + sep.size());
                return true;
            }
        }
        return false;
    }

    static std::string trim(const std::string& s) {
        size_t a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        size_t b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    void sig_decls(const std::string& rest) {
        std::istringstream is(rest);
        std::string kind;
        while (is >> kind) {
            std::string decl;
            if (!(is >> decl)) fail("dangling signature keyword " + kind);
            auto slash = decl.find('/');
            if (slash == std::string::npos) fail("expected name/arity in " + decl);
            std::string name = decl.substr(0, slash);
            int arity = std::stoi(decl.substr(slash + 1));
            if (arity < 0) fail("negative arity");
            if (kind == "fun") {
                if (w.sig.funs.count(name)) fail("duplicate function symbol " + name);
                w.sig.funs[name] = arity;
            } else if (kind == "pred") {
                if (w.sig.preds.count(name)) fail("duplicate predicate symbol " + name);
                w.sig.preds[name] = arity;
            } else if (kind == "svar") {
                if (w.sig.svars.count(name)) fail("duplicate second-order symbol " + name);
                w.sig.svars[name] = arity;
            } else {
                fail("unknown signature keyword " + kind);
            }
        }
    }

    void equation(const std::string& text) {
        std::string l, r;
        if (!split_top(text, "=", l, r)) fail("expected t = t'");
        w.eqs.push_back({parse_fo(trim(l)), parse_fo(trim(r))});
    }

    // a formula position accepts either a formula literal or the name of a
    // previously defined formula
    FormulaPtr form(const std::string& text) {
        std::string t = trim(text);
        if (auto* f = w.formula(t)) return *f;
        return parse_formula_with(t, &w.sig);
    }

    Context parse_ctx(const std::string& text) {
        Context c;
        std::string rest = trim(text);
        while (!rest.empty()) {
            std::string entry;
            // next comma at depth 0 separates entries
            int depth = 0;
            size_t cut = rest.size();
            for (size_t i = 0; i < rest.size(); ++i) {
                char ch = rest[i];
                if (ch == '(' || ch == '{') ++depth;
                if (ch == ')' || ch == '}') --depth;
                if (depth == 0 && ch == ',') {
                    cut = i;
                    break;
                }
            }
            entry = trim(rest.substr(0, cut));
            rest = cut == rest.size() ? "" : trim(rest.substr(cut + 1));
            std::string x, f;
            if (!split_top(entry, ":", x, f)) fail("expected var : formula in context");
            x = trim(x);
            for (auto& b : c.binds)
                if (b.name == x) fail("duplicate context variable " + x);
            c.binds.push_back({x, form(f)});
        }
        return c;
    }

    void finish_block(const std::string& keyword, const std::string& body) {
        if (keyword == "formula") {
            std::string name, text;
            if (!split_top(body, ":=", name, text)) fail("expected name := formula");
            name = trim(name);
            if (w.formula(name)) fail("duplicate formula " + name);
            w.formulas.emplace_back(name, parse_formula_with(trim(text), &w.sig));
        } else if (keyword == "term") {
            std::string name, text;
            if (!split_top(body, ":=", name, text)) fail("expected name := term");
            name = trim(name);
            if (w.term(name)) fail("duplicate term " + name);
            w.terms.emplace_back(name, parse_term(trim(text)));
        } else if (keyword == "ctx") {
            std::string name, text;
            if (!split_top(body, ":=", name, text)) fail("expected name := bindings");
            name = trim(name);
            if (w.context(name)) fail("duplicate context " + name);
            w.contexts.emplace_back(name, parse_ctx(text));
        } else if (keyword == "subproof") {
            std::string head, proof;
            if (!split_top(body, ":=", head, proof)) fail("expected ... := proof");
            std::string name, claim;
            if (!split_top(head, ":", name, claim)) fail("expected name : A <= B");
            std::string a, b;
            if (!split_top(claim, "<=", a, b)) fail("expected A <= B");
            NamedSubproof s;
            s.name = trim(name);
            if (w.subproof(s.name)) fail("duplicate subproof " + s.name);
            s.lhs = form(a);
            s.rhs = form(b);
            s.proof = parse_subproof(trim(proof), &w.sig);
            w.subproofs.push_back(std::move(s));
        } else if (keyword == "derive" || keyword == "judgment") {
            std::string head = body, proof;
            bool has_proof = split_top(body, ":=", head, proof);
            if (keyword == "derive" && !has_proof) fail("expected ... := derivation");
            std::string name, rest;
            if (!split_top(head, ":", name, rest)) fail("expected name : system ctx |- ...");
            NamedDerivation nd;
            nd.name = trim(name);
            if (w.derivation(nd.name)) fail("duplicate derivation " + nd.name);
            std::string judg, sysctx;
            if (!split_top(rest, "|-", sysctx, judg)) fail("expected ... |- term : formula");
            std::istringstream hs(sysctx);
            std::string sysname;
            if (!(hs >> sysname >> nd.ctx_name)) fail("expected system and context name");
            auto sys = system_from_string(sysname);
            if (!sys) fail("unknown system " + sysname);
            nd.system = *sys;
            if (nd.ctx_name != "-") {
                auto* c = w.context(nd.ctx_name);
                if (!c) fail("unknown context " + nd.ctx_name);
                nd.ctx = *c;
            }
            std::string tm, fm;
            if (!split_top(judg, ":", tm, fm)) fail("expected term : formula");
            nd.term = parse_term(trim(tm));
            nd.formula = form(fm);
            if (has_proof) nd.deriv = parse_derivation(trim(proof), &w.sig);
            w.derivations.push_back(std::move(nd));
        } else {
            fail("unknown block keyword " + keyword);
        }
    }
};

}  // namespace

Workspace parse_workspace(const std::string& text) {
    WsParser P;
    std::istringstream is(text);
    std::string line;
    std::string mode;            // "sig" | "eqs" | ""
    std::string pending_kw;      // multi-line := block being accumulated
    std::string pending_body;
    auto balanced = [](const std::string& s) {
        int d = 0;
        for (char c : s) {
            if (c == '(' || c == '{') ++d;
            if (c == ')' || c == '}') --d;
        }
        return d == 0;
    };
    static const std::set<std::string> keywords = {"sig",      "eqs",  "formula",
                                                   "term",     "ctx",  "subproof",
                                                   "derive",   "judgment"};
    while (std::getline(is, line)) {
        ++P.lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = WsParser::trim(line);
        if (line.empty()) continue;
        if (!pending_kw.empty()) {
            pending_body += " " + line;
            if (balanced(pending_body)) {
                P.finish_block(pending_kw, pending_body);
                pending_kw.clear();
                pending_body.clear();
            }
            continue;
        }
        std::istringstream ls(line);
        std::string first;
        ls >> first;
        if (keywords.count(first)) {
            std::string rest = WsParser::trim(line.substr(first.size()));
            if (first == "sig") {
                mode = "sig";
                if (!rest.empty()) P.sig_decls(rest);
            } else if (first == "eqs") {
                mode = "eqs";
                if (!rest.empty()) P.equation(rest);
            } else {
                mode.clear();
                if (balanced(rest) && !rest.ends_with(":=")) {
                    P.finish_block(first, rest);
                } else {
                    pending_kw = first;
                    pending_body = rest;
                }
            }
            continue;
        }
        if (mode == "sig") {
            P.sig_decls(line);
        } else if (mode == "eqs") {
            P.equation(line);
        } else {
            P.fail("unexpected input: " + line);
        }
    }
    if (!pending_kw.empty()) P.fail("unterminated block " + pending_kw);
    return P.w;
}

std::string print_workspace(const Workspace& w) {
    std::ostringstream os;
    if (!w.sig.funs.empty() || !w.sig.preds.empty() || !w.sig.svars.empty()) {
        os << "sig";
        for (auto& [n, a] : w.sig.funs) os << " fun " << n << '/' << a;
        for (auto& [n, a] : w.sig.preds) os << " pred " << n << '/' << a;
        for (auto& [n, a] : w.sig.svars) os << " svar " << n << '/' << a;
        os << "\n";
    }
    if (!w.eqs.empty()) {
        os << "eqs\n";
        for (auto& e : w.eqs) os << "  " << print_fo(e.left) << " = " << print_fo(e.right) << "\n";
    }
    for (auto& [n, f] : w.formulas) os << "formula " << n << " := " << print_formula(f) << "\n";
    for (auto& [n, t] : w.terms) os << "term " << n << " := " << print_term(t) << "\n";
    for (auto& [n, c] : w.contexts) {
        os << "ctx " << n << " :=";
        for (size_t i = 0; i < c.binds.size(); ++i)
            os << (i ? ", " : " ") << c.binds[i].name << " : " << print_formula(c.binds[i].type);
        os << "\n";
    }
    for (auto& s : w.subproofs)
        os << "subproof " << s.name << " : " << print_formula(s.lhs) << " <= "
           << print_formula(s.rhs) << " := " << print_subproof(s.proof) << "\n";
    for (auto& d : w.derivations) {
        os << (d.deriv ? "derive " : "judgment ") << d.name << " : " << system_name(d.system)
           << ' ' << d.ctx_name << " |- " << print_term(d.term) << " : "
           << print_formula(d.formula);
        if (d.deriv) os << " := " << print_derivation(d.deriv);
        os << "\n";
    }
    return os.str();
}

int Report::exit_code() const {
    bool any_fail = false, all_unknown = !items.empty();
    for (auto& it : items) {
        if (it.status == "FAIL") any_fail = true;
        if (it.status != "UNKNOWN") all_unknown = false;
    }
    if (any_fail) return 1;
    if (all_unknown) return 3;
    return 0;
}

std::string Report::render() const {
    std::ostringstream os;
    for (auto& it : items) {
        os << it.status << ' ' << it.name;
        if (!it.detail.empty()) os << " — " << it.detail;
        os << "\n";
    }
    return os.str();
}

Report check_workspace(const Workspace& w) {
    Report r;
    for (auto& s : w.subproofs) {
        Verdict v = check_subproof(w.eqs, s.proof, s.lhs, s.rhs);
        r.items.push_back({"subproof " + s.name, v.ok ? "PASS" : "FAIL",
                           v.ok ? "" : v.path + ": " + v.reason});
    }
    for (auto& d : w.derivations) {
        if (!d.deriv) continue;
        Verdict v = check_derivation(d.system, w.eqs, d.deriv, d.ctx, d.term, d.formula);
        r.items.push_back({"derivation " + d.name, v.ok ? "PASS" : "FAIL",
                           v.ok ? "" : v.path + ": " + v.reason});
    }
    return r;
}

}  // namespace af2
