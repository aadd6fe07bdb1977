#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "af2/positivity.hpp"
#include "af2/semantics.hpp"
#include "af2/workspace.hpp"

namespace fs = std::filesystem;
using namespace af2;

namespace {

std::uint64_t env_budget() {
    if (const char* s = std::getenv("AF2LAB_BUDGET")) {
        try {
            return std::stoull(s);
        } catch (...) {
            throw std::runtime_error("AF2LAB_BUDGET is not a number");
        }
    }
    return kDefaultBudget;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Workspace load(const std::string& path) { return parse_workspace(slurp(path)); }

int emit(const Report& r) {
    std::cout << r.render();
    return r.exit_code();
}

int cmd_check(const std::string& file) {
    Report r = check_workspace(load(file));
    return emit(r);
}

int cmd_reduce(const std::string& file, const std::string& strategy, std::uint64_t budget,
               const std::string& only) {
    Workspace w = load(file);
    Strategy st;
    if (strategy == "beta")
        st = Strategy::BetaNormalOrder;
    else if (strategy == "eta")
        st = Strategy::Eta;
    else if (strategy == "whnf")
        st = Strategy::WeakHead;
    else
        throw CLI::ValidationError("--strategy must be beta, eta or whnf");
    Report r;
    for (auto& [name, t] : w.terms) {
        if (!only.empty() && name != only) continue;
        ReductionResult res = reduce(t, st, budget);
        bool done = res.status == ReductionStatus::NormalForm;
        r.items.push_back({"reduce " + name, done ? "PASS" : "UNKNOWN",
                           print_term(res.result) + " (" + std::to_string(res.steps_used) +
                               " steps" + (done ? "" : ", budget exhausted") + ")"});
    }
    if (!only.empty() && r.items.empty()) throw std::runtime_error("no term named " + only);
    return emit(r);
}

int cmd_classify(const std::string& file) {
    Workspace w = load(file);
    Report r;
    for (auto& [name, f] : w.formulas) {
        Polarity p = classify(f);
        std::string tag = p.positive && p.negative ? "positive negative"
                          : p.positive             ? "positive"
                          : p.negative             ? "negative"
                                                   : "neither";
        r.items.push_back({"classify " + name, "PASS", tag});
    }
    return emit(r);
}

int cmd_subtype(const std::string& file, bool search, int depth) {
    Workspace w = load(file);
    Report r;
    for (auto& s : w.subproofs) {
        if (search) {
            SubSearchLimits lim;
            lim.depth = depth;
            auto found = search_subtype(w.eqs, s.lhs, s.rhs, lim);
            r.items.push_back({"subtype " + s.name, found ? "PASS" : "UNKNOWN",
                               found ? print_subproof(*found) : "no containment proof found"});
        } else {
            Verdict v = check_subproof(w.eqs, s.proof, s.lhs, s.rhs);
            r.items.push_back({"subtype " + s.name, v.ok ? "PASS" : "FAIL",
                               v.ok ? "" : v.path + ": " + v.reason});
        }
    }
    return emit(r);
}

int cmd_typecheck(const std::string& file, const std::string& sysname, bool search, int depth,
                  bool print) {
    Workspace w = load(file);
    auto sys = system_from_string(sysname);
    if (!sys) throw CLI::ValidationError("unknown system " + sysname);
    Report r;
    for (auto& d : w.derivations) {
        if (search || !d.deriv) {
            TypingSearchLimits lim;
            lim.depth = depth;
            try {
                TypingSearchResult res =
                    search_typing(*sys, w.eqs, d.ctx, d.term, d.formula, lim);
                std::string status = res.deriv ? "PASS" : res.saturated ? "FAIL" : "UNKNOWN";
                std::string detail = res.deriv   ? (print ? print_derivation(*res.deriv) : "")
                                     : res.saturated ? "no derivation at this search basis"
                                                     : "search budget exhausted";
                r.items.push_back({"typecheck " + d.name, status, detail});
            } catch (const std::exception& e) {
                r.items.push_back({"typecheck " + d.name, "UNKNOWN", e.what()});
            }
        } else {
            Verdict v = check_derivation(*sys, w.eqs, d.deriv, d.ctx, d.term, d.formula);
            r.items.push_back({"typecheck " + d.name, v.ok ? "PASS" : "FAIL",
                               v.ok ? "" : v.path + ": " + v.reason});
        }
    }
    return emit(r);
}

int cmd_transform(const std::string& file, const std::string& to, bool print) {
    Workspace w = load(file);
    auto target = system_from_string(to);
    if (!target) throw CLI::ValidationError("unknown system " + to);
    Report r;
    for (auto& d : w.derivations) {
        if (!d.deriv) continue;
        try {
            DerivPtr out = convert(d.system, *target, w.eqs, d.ctx, d.deriv, d.term, d.formula);
            Verdict v = check_derivation(*target, w.eqs, out, d.ctx, d.term, d.formula);
            r.items.push_back({"transform " + d.name, v.ok ? "PASS" : "FAIL",
                               v.ok ? (print ? print_derivation(out) : "")
                                    : v.path + ": " + v.reason});
        } catch (const std::exception& e) {
            r.items.push_back({"transform " + d.name, "FAIL", e.what()});
        }
    }
    return emit(r);
}

int cmd_eta_witness(const std::string& file, std::uint64_t budget) {
    Workspace w = load(file);
    Report r;
    for (auto& d : w.derivations) {
        if (!d.deriv) continue;
        try {
            DerivPtr in_eta =
                convert(d.system, System::AF2Eta, w.eqs, d.ctx, d.deriv, d.term, d.formula);
            EtaWitness ew = eta_expand_witness(w.eqs, d.ctx, in_eta, d.term, d.formula);
            Verdict v = check_derivation(System::AF2, w.eqs, ew.deriv, d.ctx, ew.witness,
                                         d.formula);
            TermPtr down = reduce(ew.witness, Strategy::Eta, budget).result;
            bool reaches = alpha_eq(down, reduce(d.term, Strategy::Eta, budget).result);
            bool ok = v.ok && reaches;
            r.items.push_back({"eta-witness " + d.name, ok ? "PASS" : "FAIL",
                               ok ? print_term(ew.witness)
                                  : (!v.ok ? v.path + ": " + v.reason
                                           : "witness does not eta-reduce to the subject")});
        } catch (const std::exception& e) {
            r.items.push_back({"eta-witness " + d.name, "FAIL", e.what()});
        }
    }
    return emit(r);
}

int cmd_complete(const std::string& file, const std::string& type_name, int size,
                 std::uint64_t budget) {
    Workspace w = load(file);
    FormulaPtr A;
    if (auto* f = w.formula(type_name))
        A = *f;
    else
        A = parse_formula_with(type_name, &w.sig);
    SyntacticModelConfig cfg;
    cfg.E = w.eqs;
    cfg.sig = w.sig;
    cfg.budget = budget;
    CompletenessReport rep = completeness_experiment(A, size, cfg);
    std::cout << rep.render();
    if (rep.hard_failure) return 1;
    if (!rep.rows.empty() && rep.unknowns == (int)rep.rows.size()) return 3;
    return 0;
}

int cmd_verify_corpus(const std::string& dir) {
    std::vector<fs::path> files;
    for (auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".af2") files.push_back(e.path());
    if (files.empty()) throw std::runtime_error("no .af2 files in " + dir);
    std::sort(files.begin(), files.end());
    Report r;
    for (auto& f : files) {
        std::string base = f.filename().string();
        try {
            Workspace w = parse_workspace(slurp(f.string()));
            std::string once = print_workspace(w);
            std::string twice = print_workspace(parse_workspace(once));
            if (once != twice) {
                r.items.push_back({"roundtrip " + base, "FAIL", "print/parse not stable"});
            } else {
                r.items.push_back({"roundtrip " + base, "PASS", ""});
            }
            Report sub = check_workspace(w);
            for (auto& it : sub.items) r.items.push_back({base + " " + it.name, it.status, it.detail});
        } catch (const std::exception& e) {
            r.items.push_back({"parse " + base, "FAIL", e.what()});
        }
    }
    return emit(r);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"workspace checker for second-order typed lambda calculi"};
    app.require_subcommand(1);

    std::string file, strategy = "beta", only, sysname = "af2s", to = "af2s", type_name,
                     dir = "corpus";
    std::uint64_t budget = 0;
    int depth = 6, size = 7;
    bool search = false, print = false;

    auto add_file = [&](CLI::App* c) {
        c->add_option("file", file, "workspace file")->required()->check(CLI::ExistingFile);
    };

    auto* c_check = app.add_subcommand("check", "check every proof in a workspace");
    add_file(c_check);

    auto* c_reduce = app.add_subcommand("reduce", "reduce the named terms of a workspace");
    add_file(c_reduce);
    c_reduce->add_option("--strategy", strategy, "beta | eta | whnf");
    c_reduce->add_option("--budget", budget, "step budget");
    c_reduce->add_option("--term", only, "reduce only this named term");

    auto* c_classify = app.add_subcommand("classify", "polarity of the named formulas");
    add_file(c_classify);

    auto* c_subtype = app.add_subcommand("subtype", "check or search containment claims");
    add_file(c_subtype);
    c_subtype->add_flag("--search", search, "search instead of checking stored proofs");
    c_subtype->add_option("--depth", depth, "search depth");

    auto* c_typecheck = app.add_subcommand("typecheck", "check or search typing judgments");
    add_file(c_typecheck);
    c_typecheck->add_option("--system", sysname, "af2 | af2sub | af2s | af2eta");
    c_typecheck->add_flag("--search", search, "search instead of checking stored proofs");
    c_typecheck->add_option("--depth", depth, "search depth");
    c_typecheck->add_flag("--print", print, "print found derivations");

    auto* c_transform = app.add_subcommand("transform", "convert derivations between systems");
    add_file(c_transform);
    c_transform->add_option("--to", to, "target system")->required();
    c_transform->add_flag("--print", print, "print converted derivations");

    auto* c_eta = app.add_subcommand("eta-witness",
                                     "eta-expanded subjects typable by the base rules alone");
    add_file(c_eta);

    auto* c_complete = app.add_subcommand("complete",
                                          "compare typability with the term-model semantics");
    add_file(c_complete);
    c_complete->add_option("--type", type_name, "named formula or literal type")->required();
    c_complete->add_option("--size", size, "term size bound");

    auto* c_corpus = app.add_subcommand("verify-corpus", "check every workspace in a directory");
    c_corpus->add_option("dir", dir, "corpus directory")->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (budget == 0) budget = env_budget();
        if (c_check->parsed()) return cmd_check(file);
        if (c_reduce->parsed()) return cmd_reduce(file, strategy, budget, only);
        if (c_classify->parsed()) return cmd_classify(file);
        if (c_subtype->parsed()) return cmd_subtype(file, search, depth);
        if (c_typecheck->parsed()) return cmd_typecheck(file, sysname, search, depth, print);
        if (c_transform->parsed()) return cmd_transform(file, to, print);
        if (c_eta->parsed()) return cmd_eta_witness(file, budget);
        if (c_complete->parsed()) return cmd_complete(file, type_name, size, budget);
        if (c_corpus->parsed()) return cmd_verify_corpus(dir);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
