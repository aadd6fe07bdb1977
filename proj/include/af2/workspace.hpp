#ifndef AF2_WORKSPACE_HPP
#define AF2_WORKSPACE_HPP

#include <map>
#include <string>
#include <vector>

#include "af2/formula.hpp"
#include "af2/subtyping.hpp"
#include "af2/term.hpp"
#include "af2/typing.hpp"

namespace af2 {

// Serialized proof trees.  Formulas and first-order terms inside a tree are
// wrapped in braces ({...}); everything else is parenthesized atoms.
std::string print_subproof(const SubPtr& p);
SubPtr parse_subproof(const std::string& text, const Signature* sig = nullptr);

std::string print_derivation(const DerivPtr& d);
DerivPtr parse_derivation(const std::string& text, const Signature* sig = nullptr);

struct NamedSubproof {
    std::string name;
    FormulaPtr lhs, rhs;  // claimed containment lhs <= rhs
    SubPtr proof;
};

struct NamedDerivation {
    std::string name;
    System system = System::AF2;
    std::string ctx_name;  // "-" for the empty context
    Context ctx;
    TermPtr term;
    FormulaPtr formula;
    DerivPtr deriv;  // null for a plain judgment (search target)
};

struct Workspace {
    Signature sig;
    EquationSystem eqs;
    std::vector<std::pair<std::string, FormulaPtr>> formulas;
    std::vector<std::pair<std::string, TermPtr>> terms;
    std::vector<std::pair<std::string, Context>> contexts;
    std::vector<NamedSubproof> subproofs;
    std::vector<NamedDerivation> derivations;  // includes plain judgments

    const FormulaPtr* formula(const std::string& n) const;
    const TermPtr* term(const std::string& n) const;
    const Context* context(const std::string& n) const;
    const NamedSubproof* subproof(const std::string& n) const;
    const NamedDerivation* derivation(const std::string& n) const;
};

// Throws std::runtime_error with line information on malformed input.
Workspace parse_workspace(const std::string& text);
std::string print_workspace(const Workspace& w);

struct ReportItem {
    std::string name;
    std::string status;  // PASS | FAIL | UNKNOWN
    std::string detail;
};
struct Report {
    std::vector<ReportItem> items;
    int exit_code() const;  // 0 all pass, 1 any fail, 3 all unknown
    std::string render() const;
};

// Check every subproof and derivation in the workspace.
Report check_workspace(const Workspace& w);

}  // namespace af2

#endif
