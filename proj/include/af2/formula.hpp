#ifndef AF2_FORMULA_HPP
#define AF2_FORMULA_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "af2/term.hpp"

namespace af2 {

// ---- first-order terms -----------------------------------------------------

struct FoTerm;
using FoPtr = std::shared_ptr<const FoTerm>;

struct FoTerm {
    bool is_var;
    std::string name;
    std::vector<FoPtr> args;  // empty for variables
};

FoPtr fo_var(std::string name);
FoPtr fo_app(std::string fun, std::vector<FoPtr> args);

bool fo_eq(const FoPtr& a, const FoPtr& b);
std::set<std::string> fo_vars(const FoPtr& t);
FoPtr fo_subst(const FoPtr& t, const std::map<std::string, FoPtr>& sigma);
std::string print_fo(const FoPtr& t);

// First-order matching: extend `binding` so that pattern[binding] == t.
bool fo_match(const FoPtr& pattern, const FoPtr& t, std::map<std::string, FoPtr>& binding);

// ---- signature, equations --------------------------------------------------

struct Signature {
    std::map<std::string, int> funs;    // function symbol -> arity
    std::map<std::string, int> preds;   // predicate symbol -> arity
    std::map<std::string, int> svars;   // declared free second-order variables -> arity
};

struct Equation {
    FoPtr left;
    FoPtr right;
};

using EquationSystem = std::vector<Equation>;

// ---- formulas --------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Kind { Absurd, Pred, Var2, Arrow, AllFo, AllSo };
    Kind kind;
    std::string name;         // Pred/Var2: symbol; AllFo/AllSo: binder
    int arity = 0;            // Var2 / AllSo
    std::vector<FoPtr> args;  // Pred/Var2
    FormulaPtr left;          // Arrow antecedent; AllFo/AllSo body
    FormulaPtr right;         // Arrow consequent
};

FormulaPtr f_absurd();
FormulaPtr f_pred(std::string p, std::vector<FoPtr> args);
FormulaPtr f_var2(std::string x, int arity, std::vector<FoPtr> args);
FormulaPtr f_arrow(FormulaPtr a, FormulaPtr b);
FormulaPtr f_all_fo(std::string x, FormulaPtr body);
FormulaPtr f_all_so(std::string x, int arity, FormulaPtr body);

bool formula_alpha_eq(const FormulaPtr& a, const FormulaPtr& b);

std::set<std::string> formula_free_fo(const FormulaPtr& a);
// free second-order variables, with arities
std::map<std::string, int> formula_free_so(const FormulaPtr& a);

// A quantified variable: first- or second-order, with arity for the latter.
struct VarSpec {
    bool second_order = false;
    std::string name;
    int arity = 0;
    bool operator==(const VarSpec& o) const {
        return second_order == o.second_order && name == o.name && arity == o.arity;
    }
};

bool varspec_free_in(const VarSpec& v, const FormulaPtr& a);
FormulaPtr forall_wrap(const std::vector<VarSpec>& xi, FormulaPtr body);
// Strip |xi| quantifiers from `a`, renaming binders to xi's names; nullopt on
// kind/arity mismatch.
std::optional<FormulaPtr> forall_strip(const FormulaPtr& a, const std::vector<VarSpec>& xi);

// Capture-avoiding first-order substitution.
FormulaPtr subst_fo(const FormulaPtr& a, const std::map<std::string, FoPtr>& sigma);
// Capture-avoiding second-order substitution: each atom X(t1..tn) becomes
// g[t1/params[0], ...]; arity of X must equal params.size().
FormulaPtr subst_so(const FormulaPtr& a, const std::string& x,
                    const std::vector<std::string>& params, const FormulaPtr& g);

// Combined substitution object.
struct Substitution {
    std::map<std::string, FoPtr> fo;
    std::map<std::string, std::pair<std::vector<std::string>, FormulaPtr>> so;
};
FormulaPtr apply_subst(const FormulaPtr& a, const Substitution& sigma);

// The formula !X (X t -> X t') standing for t = t'.
FormulaPtr equation_as_formula(const FoPtr& t, const FoPtr& tp);

// A particular case of an equation of E: first-order matching in either
// orientation; returns the instantiation if some equation matches.
std::optional<std::map<std::string, FoPtr>> match_particular_case(const EquationSystem& E,
                                                                  const FoPtr& u, const FoPtr& v);

// Bounded bidirectional rewriting decision for the ~E congruence:
// Yes is sound, Unknown is an honest don't-know.
Trivalent eq_congruent(const EquationSystem& E, const FoPtr& a, const FoPtr& b,
                       std::uint64_t budget = kDefaultBudget);

// Oriented left-to-right rewriting to a normal form (for terminating E).
FoPtr rewrite_canonical(const EquationSystem& E, const FoPtr& t,
                        std::uint64_t budget = kDefaultBudget);

std::string print_formula(const FormulaPtr& a);
FoPtr parse_fo(const std::string& text);
FormulaPtr parse_formula(const std::string& text);
FormulaPtr parse_formula_with(const std::string& text, const Signature* sig);

// Arity checks against a signature (throws std::runtime_error on violation).
void validate_fo(const Signature& sig, const FoPtr& t);
void validate_formula(const Signature& sig, const FormulaPtr& a);

}  // namespace af2

#endif
