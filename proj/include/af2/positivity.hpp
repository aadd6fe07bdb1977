#ifndef AF2_POSITIVITY_HPP
#define AF2_POSITIVITY_HPP

#include "af2/formula.hpp"

namespace af2 {

// Polarity classification of a formula under the second-order quantifier
// discipline: atoms are both positive and negative; an arrow B -> A is
// positive when A is positive and B negative (and dually); a first-order
// quantifier passes both flags through; a second-order quantifier keeps
// positivity and destroys negativity.
struct Polarity {
    bool positive = false;
    bool negative = false;
};

Polarity classify(const FormulaPtr& a);

}  // namespace af2

#endif
