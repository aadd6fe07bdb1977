#ifndef AF2_SEMANTICS_HPP
#define AF2_SEMANTICS_HPP

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "af2/formula.hpp"
#include "af2/term.hpp"
#include "af2/typing.hpp"

namespace af2 {

enum class MembershipVerdict { In, Out, Unknown };
std::string verdict_name(MembershipVerdict v);

// A set of lambda-terms closed under weak-head expansion, presented by a
// three-valued membership oracle plus a finite list of known members
// (probes).  Oracle results are cached; probes are drawn lazily from a
// shared candidate pool unless fixed explicitly.
struct SemState;
struct SemanticSet {
    std::string description;
    std::shared_ptr<SemState> state;

    MembershipVerdict oracle(const TermPtr& t) const;
    const std::vector<TermPtr>& probes() const;
};

SemanticSet make_set(std::string description,
                     std::function<MembershipVerdict(const TermPtr&)> raw,
                     std::vector<TermPtr> probe_pool);
SemanticSet make_set_with_probes(std::string description,
                                 std::function<MembershipVerdict(const TermPtr&)> raw,
                                 std::vector<TermPtr> probes);

// Terms mapping every member of G into H; the verdict probes G's members.
SemanticSet arrow_set(const SemanticSet& G, const SemanticSet& H,
                      std::uint64_t budget = kDefaultBudget);
// Pointwise intersection; In iff all In, Out iff some Out.
SemanticSet intersect_sets(std::string description, std::vector<SemanticSet> parts);

// A finitely presented model: named domain elements, function and predicate
// tables, and a finite family of second-order candidates used to approximate
// the quantifier over all adequate sets.
struct Model {
    std::vector<std::string> domain;  // canonical element names
    std::function<std::string(const std::string&, const std::vector<std::string>&)> fun;
    std::function<SemanticSet(const std::string&, const std::vector<std::string>&)> pred;

    struct Family {
        std::string description;
        int arity = 0;  // only families of the binder's arity are candidates
        std::function<SemanticSet(const std::vector<std::string>&)> at;
    };
    std::vector<Family> families;

    std::vector<TermPtr> probe_pool;  // shared candidate members for new sets
};

struct Interpretation {
    std::map<std::string, std::string> fo;     // variable -> domain element
    std::map<std::string, Model::Family> so;   // variable -> candidate family
};

std::string eval_fo(const Model& M, const Interpretation& I, const FoPtr& t);

SemanticSet interpret(const FormulaPtr& A, const Model& M, const Interpretation& I,
                      std::uint64_t budget = kDefaultBudget);

// Sampled check that the model satisfies every equation of E.
bool model_satisfies(const Model& M, const EquationSystem& E, int max_samples = 64);

// The term model: domain = closed first-order terms modulo the equations
// (oriented-rewrite canonical forms), predicates interpreted by bounded
// typability over an ambient context of negatively classified types.
struct SyntacticModelConfig {
    EquationSystem E;
    Signature sig;
    std::vector<FormulaPtr> neg_types;  // context types, each classified negative
    int context_size = 6;               // variables materialized round-robin
    std::uint64_t budget = kDefaultBudget;
    TypingSearchLimits search;
    int domain_cap = 24;
    int pool_cap = 24;
    std::vector<TermPtr> extra_probes;  // known inhabitants seeded into the pool
};

struct SyntacticModel {
    Model model;
    Interpretation interp;
    Context gamma;  // the materialized context (x0 : A0, x1 : A1, ...)
};

SyntacticModel syntactic_model(const SyntacticModelConfig& cfg);

// Evaluate a checked judgment in a model: substitute known members for the
// context variables and ask the oracle of the conclusion's value.
struct AdequacyReport {
    MembershipVerdict verdict = MembershipVerdict::Unknown;
    std::string detail;
};
AdequacyReport check_adequacy(const EquationSystem& E, const DerivPtr& d, const Context& ctx,
                              const TermPtr& t_checked, const FormulaPtr& A, const TermPtr& t,
                              const Model& M, const Interpretation& I,
                              const std::vector<TermPtr>& members,
                              std::uint64_t budget = kDefaultBudget);

// Exhaustive comparison, for one closed positive type, of bounded typability
// against the term-model semantics over all closed beta-normal terms up to
// the given size.
struct CompletenessRow {
    TermPtr term;
    MembershipVerdict typable;
    MembershipVerdict sem;
    std::string agree;  // yes | no | moot
};
struct CompletenessReport {
    std::vector<CompletenessRow> rows;
    int agreements = 0;
    int unknowns = 0;
    bool hard_failure = false;
    std::string render() const;
};
CompletenessReport completeness_experiment(const FormulaPtr& A, int size_bound,
                                           const SyntacticModelConfig& cfg);

// All closed beta-normal terms with at most `size` nodes.
std::vector<TermPtr> enumerate_normal_closed(int size);

}  // namespace af2

#endif
