#ifndef AF2_TYPING_HPP
#define AF2_TYPING_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "af2/formula.hpp"
#include "af2/subtyping.hpp"
#include "af2/term.hpp"

namespace af2 {

enum class System { AF2, AF2Sub, AF2S, AF2Eta };
std::optional<System> system_from_string(const std::string& s);
std::string system_name(System s);

// Ordered context of distinct variable bindings.
struct Binding {
    std::string name;
    FormulaPtr type;
};
struct Context {
    std::vector<Binding> binds;

    const FormulaPtr* lookup(const std::string& x) const;
    bool distinct_names() const;
    Context extended(std::string x, FormulaPtr a) const;  // replaces an old x binding
    Context without(const std::string& x) const;
    // a variable (first- or second-order) occurs free in some context formula
    bool var_free(const VarSpec& v) const;
    std::set<std::string> free_fo() const;
    std::map<std::string, int> free_so() const;
};

// One derivation node; carries enough data for local checking.
struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

struct Derivation {
    enum class Kind { R1, R2, R3, R4, R5, R6, R7, R8, Sub, S1, S2, S3, Eta };
    Kind kind;

    std::string name;  // R1/S1: the variable; R2/S2: the binder

    VarSpec gen;    // R4/R6: generalized variable
    FormulaPtr prem;  // R5/R7: quantified premise; R3/S3: argument type B; R8: template

    FoPtr inst_term;                       // R5
    std::vector<std::string> inst_params;  // R7
    FormulaPtr inst_formula;               // R7

    std::string hole;  // R8
    FoPtr eq_u, eq_v;  // R8
    bool eq_lr = true;

    std::vector<VarSpec> xi;  // S1/S3 generalized sequence
    SubPtr sub;               // Sub/S1/S2/S3

    TermPtr eta_source;  // Eta: the term before the eta step
    TermPath eta_path;   // Eta: redex position in eta_source

    DerivPtr d1, d2;  // premise derivations
};

DerivPtr dv_r1(std::string x);
DerivPtr dv_r2(std::string binder, DerivPtr body);
DerivPtr dv_r3(FormulaPtr arg_type, DerivPtr fun, DerivPtr arg);
DerivPtr dv_gen(VarSpec v, DerivPtr d);  // R4 (first-order) or R6 (second-order)
DerivPtr dv_r5(FormulaPtr prem, FoPtr u, DerivPtr d);
DerivPtr dv_r7(FormulaPtr prem, std::vector<std::string> params, FormulaPtr g, DerivPtr d);
DerivPtr dv_r8(FormulaPtr templ, std::string hole, FoPtr u, FoPtr v, bool lr, DerivPtr d);
DerivPtr dv_sub(SubPtr p, DerivPtr d);
DerivPtr dv_s1(std::string x, std::vector<VarSpec> xi, SubPtr p);
DerivPtr dv_s2(std::string binder, DerivPtr body, SubPtr p);
DerivPtr dv_s3(FormulaPtr arg_type, std::vector<VarSpec> xi, DerivPtr fun, DerivPtr arg,
               SubPtr p);
DerivPtr dv_eta(TermPtr source, TermPath path, DerivPtr d);

// Full judgment check: does d derive ctx |- t : A in the given system?
Verdict check_derivation(System system, const EquationSystem& E, const DerivPtr& d,
                         const Context& ctx, const TermPtr& t, const FormulaPtr& A);

std::vector<std::string> derivation_skeleton(const DerivPtr& d);

// Bottom-up conclusion synthesis for nodes that determine their own conclusion
// (variables, instantiations, equational steps, generalizations, containments).
// Returns null when the conclusion is not locally determined.
FormulaPtr synth_conclusion(const EquationSystem& E, const Context& ctx, const DerivPtr& d);

// ---- generation (inversion) -------------------------------------------------

struct GenerationData {
    enum class Case { Var, Abs, App, Spine };
    Case kind;

    FormulaPtr B;  // Var: context type; Abs: domain; App/Spine head: argument/head type
    FormulaPtr C;  // Abs: body type; App: result type before generalization
    std::vector<VarSpec> xi;
    SubPtr sub;

    DerivPtr body;      // Abs: body derivation over ctx, x:B
    DerivPtr fun, arg;  // App

    // Abs checked at an arrow type D -> F: a derivation of ctx, x:D |- u : F
    DerivPtr at_arrow;

    // Spine (head variable applied to n arguments): per-application data
    struct Link {
        FormulaPtr arg_type;   // C_i
        FormulaPtr out_type;   // B_i
        std::vector<VarSpec> xi;
        SubPtr sub;            // !xi B_{i-1} <= C_i -> B_i (i = 1: over the head type)
        DerivPtr arg;
    };
    std::vector<Link> links;
};

// Requires: d checks in AF2S for ctx |- t : A.  Throws std::runtime_error when
// a transformation step falls outside the supported shapes.
GenerationData invert(const EquationSystem& E, const DerivPtr& d, const Context& ctx,
                      const TermPtr& t, const FormulaPtr& A);

// ---- transformers (all on checked inputs) -----------------------------------

// From ctx, x:C |- u : D and p : !xi(C -> D) <= R with R a quantified arrow
// !rho(A -> B) and xi not free in ctx: a derivation of ctx, x:A |- u : B.
// Returns the (A, B) actually realized (alpha-equal to R's matrix).
struct ArrowInversion {
    FormulaPtr dom, cod;
    DerivPtr deriv;
};
ArrowInversion invert_at_arrow(const EquationSystem& E, const Context& ctx,
                               const std::string& x, const FormulaPtr& C, const FormulaPtr& D,
                               const std::vector<VarSpec>& xi, const DerivPtr& body,
                               const SubPtr& p, const FormulaPtr& R);

// Context/goal strengthening: from d : {x_i:A_i} |- t : A, proofs B_i <= A_i
// and A <= B, a derivation of {x_i:B_i} |- t : B.  ctx_proofs maps variable
// name -> proof; missing entries mean "unchanged" (ax).
DerivPtr strengthen(const EquationSystem& E, const Context& ctx, const DerivPtr& d,
                    const FormulaPtr& A,
                    const std::map<std::string, std::pair<FormulaPtr, SubPtr>>& ctx_proofs,
                    const FormulaPtr& B, const SubPtr& goal_proof);

// Cut: from ctx, x:B |- u : A and ctx |- v : B, a derivation of
// ctx |- u[v/x] : A (all in AF2S).
DerivPtr cut(const EquationSystem& E, const Context& ctx, const std::string& x,
             const FormulaPtr& B, const DerivPtr& d_u, const TermPtr& u, const FormulaPtr& A,
             const DerivPtr& d_v);

// Extend the conclusion of an AF2S derivation along p : A <= B.
DerivPtr resubtype(const DerivPtr& d, const FormulaPtr& A, const SubPtr& p);

// Generalize the conclusion of an AF2S derivation: ctx |- t : A becomes
// ctx |- t : !z A (z must not be free in ctx; checked by the caller).
DerivPtr generalize_snode(const EquationSystem& E, const Context& ctx, const DerivPtr& d,
                          const FormulaPtr& A, const VarSpec& z);

// One-step subject reduction (beta or eta) at the given redex path.
DerivPtr subject_reduce(const EquationSystem& E, const Context& ctx, const DerivPtr& d,
                        const TermPtr& t, const FormulaPtr& A, bool eta, const TermPath& path);

// Simultaneous variable substitution: same skeleton, judgment instantiated.
DerivPtr substitute_derivation(const DerivPtr& d, const Substitution& sigma);

// Rule permutation into the normal shape: generalizations first, then one
// fused trailing subsumption (AF2-with-subsumption derivations).
DerivPtr normalize_derivation(const EquationSystem& E, const Context& ctx, const DerivPtr& d,
                              const TermPtr& t, const FormulaPtr& A);

// System conversion; supported directions are the pairwise bridges plus their
// composites.  Result is a derivation in `to` of the same judgment, except
// that converting into the eta system may conclude via eta steps whose source
// terms eta-reduce to t.
DerivPtr convert(System from, System to, const EquationSystem& E, const Context& ctx,
                 const DerivPtr& d, const TermPtr& t, const FormulaPtr& A);

// Eta-expansion witness: a term u with u ->eta* t and a plain derivation of
// ctx |- u : A using only the eight base rules.
struct EtaWitness {
    TermPtr witness;
    DerivPtr deriv;
};
EtaWitness eta_expand_witness(const EquationSystem& E, const Context& ctx, const DerivPtr& d,
                              const TermPtr& t, const FormulaPtr& A);

// ---- bounded search ---------------------------------------------------------

struct TypingSearchLimits {
    int depth = 6;
    int subtype_depth = 6;
    std::vector<FoPtr> term_basis;        // extra first-order instantiation candidates
    std::vector<FormulaPtr> formula_basis;  // extra second-order candidates
};

struct TypingSearchResult {
    std::optional<DerivPtr> deriv;
    // true when the bounded move space was explored exhaustively (a miss is
    // then a miss for this basis/depth, not a budget artifact)
    bool saturated = true;
};

// Subject must be beta-normal; throws std::runtime_error otherwise.
TypingSearchResult search_typing(System system, const EquationSystem& E, const Context& ctx,
                                 const TermPtr& t, const FormulaPtr& A,
                                 const TypingSearchLimits& limits = {});

}  // namespace af2

#endif
