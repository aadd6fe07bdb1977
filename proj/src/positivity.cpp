#include "af2/positivity.hpp"

namespace af2 {

Polarity classify(const FormulaPtr& a) {
    switch (a->kind) {
        case Formula::Kind::Absurd:  // treated as atomic
        case Formula::Kind::Pred:
        case Formula::Kind::Var2:
            return {true, true};
        case Formula::Kind::Arrow: {
            Polarity l = classify(a->left);
            Polarity r = classify(a->right);
            return {r.positive && l.negative, r.negative && l.positive};
        }
        case Formula::Kind::AllFo:
            return classify(a->left);
        case Formula::Kind::AllSo: {
            Polarity b = classify(a->left);
            return {b.positive, false};
        }
    }
    return {false, false};
}

}  // namespace af2
