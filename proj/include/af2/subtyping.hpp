#ifndef AF2_SUBTYPING_HPP
#define AF2_SUBTYPING_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "af2/formula.hpp"

namespace af2 {

// Proof trees for the containment relation A <= B.
struct SubProof;
using SubPtr = std::shared_ptr<const SubProof>;

struct SubProof {
    enum class Kind { Ax, Dist, Mono, AllElim, AllIntro, Trans, EqStep };
    Kind kind;

    std::vector<VarSpec> xi;  // Dist: quantified sequence; AllIntro: xi[0]

    // AllElim instantiation: a first-order term, or a parameterized formula
    bool so_inst = false;
    FoPtr inst_term;
    std::vector<std::string> inst_params;
    FormulaPtr inst_formula;

    FormulaPtr mid;  // Trans: middle formula; EqStep: template D

    // EqStep: D[u/hole] <= D[v/hole], u = v a particular case of E
    std::string hole;
    FoPtr eq_u, eq_v;
    bool eq_lr = true;

    SubPtr a, b;  // children (Mono/Trans: two; AllElim/AllIntro/EqStep: a)
};

SubPtr sp_ax();
SubPtr sp_dist(std::vector<VarSpec> xi);
SubPtr sp_mono(SubPtr left, SubPtr right);
SubPtr sp_all_elim_fo(FoPtr f, SubPtr child);
SubPtr sp_all_elim_so(std::vector<std::string> params, FormulaPtr g, SubPtr child);
SubPtr sp_all_intro(VarSpec v, SubPtr child);
SubPtr sp_trans(FormulaPtr mid, SubPtr left, SubPtr right);
SubPtr sp_eq(FormulaPtr templ, std::string hole, FoPtr u, FoPtr v, bool lr, SubPtr child);

struct Verdict {
    bool ok = true;
    std::string path;    // node path like "root.1.0" on failure
    std::string reason;  // human-readable failure reason
};

Verdict check_subproof(const EquationSystem& E, const SubPtr& p, const FormulaPtr& A,
                       const FormulaPtr& B);

// Given the left formula of p's conclusion, compute the right one (fails for
// shapes whose conclusion is not determined upward, with a diagnostic).
struct SynthResult {
    FormulaPtr formula;
    std::string error;  // empty iff formula set
    std::string path;
};
SynthResult synth_right(const EquationSystem& E, const SubPtr& p, const FormulaPtr& A);
SynthResult synth_left(const EquationSystem& E, const SubPtr& p, const FormulaPtr& B);

// Simultaneous variable substitution: same rule skeleton, conclusion instantiated.
SubPtr substitute_subproof(const SubPtr& p, const Substitution& sigma);

// Preorder node labels, for skeleton comparison.
std::vector<std::string> subproof_skeleton(const SubPtr& p);

// ---- derived proof builders ------------------------------------------------

// !xi A <= A by repeated (forall-elim) instantiating each variable by itself.
SubPtr sp_strip_all(const std::vector<VarSpec>& xi);
// From q : B <= A, build !xi B <= !xi A (requires each xi not free in !xi B,
// which always holds).
SubPtr sp_forall_mono(const std::vector<VarSpec>& xi, const FormulaPtr& B, SubPtr q);
// A <= !xi A when no xi is free in A.
SubPtr sp_intro_all(const std::vector<VarSpec>& xi, SubPtr base);
// Compose p : A <= M and q : M <= B, flattening trivial Ax ends.
SubPtr sp_compose(const FormulaPtr& mid, SubPtr p, SubPtr q);

// ---- bounded search --------------------------------------------------------

struct SubSearchLimits {
    int depth = 6;
    std::vector<FormulaPtr> formula_hints;
    std::vector<FoPtr> term_hints;
};

std::optional<SubPtr> search_subtype(const EquationSystem& E, const FormulaPtr& A,
                                     const FormulaPtr& B, const SubSearchLimits& limits = {});

}  // namespace af2

#endif
