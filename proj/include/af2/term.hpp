#ifndef AF2_TERM_HPP
#define AF2_TERM_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace af2 {

// Pure lambda terms. Values are immutable and shared; binder names are
// display-only, identity is alpha-equivalence.
struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { Var, Abs, App };
    Kind kind;
    std::string name;  // Var: variable name; Abs: binder name
    TermPtr sub;       // Abs: body; App: function
    TermPtr arg;       // App: argument
};

TermPtr mk_var(std::string name);
TermPtr mk_abs(std::string binder, TermPtr body);
TermPtr mk_app(TermPtr fun, TermPtr arg);

std::set<std::string> free_vars(const TermPtr& t);
bool alpha_eq(const TermPtr& a, const TermPtr& b);

// Capture-avoiding substitution t[v/x].
TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& v);

// Fresh name based on `base`, avoiding everything in `avoid`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

enum class HeadShape { WeakHeadRedex, HeadVariable, HeadAbstraction };
HeadShape head_shape(const TermPtr& t);

enum class Strategy { BetaNormalOrder, Eta, WeakHead };
enum class ReductionStatus { NormalForm, BudgetExhausted };

struct ReductionResult {
    TermPtr result;
    std::uint64_t steps_used = 0;
    ReductionStatus status = ReductionStatus::NormalForm;
};

constexpr std::uint64_t kDefaultBudget = 10000;

// Step budget; budget exhaustion is a status, never an error.
ReductionResult reduce(const TermPtr& t, Strategy strategy,
                       std::uint64_t budget = kDefaultBudget);

// One step of the given relation, if any (leftmost-outermost).
std::optional<TermPtr> step_beta(const TermPtr& t);
std::optional<TermPtr> step_eta(const TermPtr& t);
std::optional<TermPtr> step_weak_head(const TermPtr& t);

// Paths into terms: 0 = into abstraction body / application function,
// 1 = into application argument.
using TermPath = std::vector<int>;
std::optional<TermPtr> subterm_at(const TermPtr& t, const TermPath& path);
// Contract the redex of the given kind at `path`; nullopt if the subterm
// there is not a redex of that kind.
std::optional<TermPtr> contract_at(const TermPtr& t, const TermPath& path, bool eta);
// All beta (resp. eta) redex positions, preorder.
std::vector<TermPath> redex_paths(const TermPtr& t, bool eta);

enum class Trivalent { Yes, No, Unknown };
Trivalent beta_equiv(const TermPtr& a, const TermPtr& b,
                     std::uint64_t budget = kDefaultBudget);

bool is_beta_normal(const TermPtr& t);
std::uint64_t term_size(const TermPtr& t);

// Concrete syntax: `\x. t`, juxtaposition left-associative, parens group.
std::string print_term(const TermPtr& t);
// Throws std::runtime_error with position info on malformed input.
TermPtr parse_term(const std::string& text);

}  // namespace af2

#endif
