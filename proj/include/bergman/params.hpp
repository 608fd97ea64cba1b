#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace bergman {

// Weight parameters of the measure |z|^{2b} (1-|z|^2)^a dA(z) / B(a+1,b+1)
// on the unit disc. The strict gate keeps (alpha, beta) inside the range for
// which the operators are known to be compact: alpha > -1, -1/2 < beta <= 0.
// With strict=false the formulas may be evaluated on -1 < beta <= 0 without
// asserting any operator-theoretic meaning.
struct Params {
    double alpha;
    double beta;
    bool strict = true;

    Params(double a, double b, bool strict_gate = true)
        : alpha(a), beta(b), strict(strict_gate) {
        if (!std::isfinite(a) || !std::isfinite(b))
            throw std::domain_error("Params: alpha and beta must be finite");
        if (!(a > -1.0))
            throw std::domain_error("Params: alpha must satisfy alpha > -1, got " +
                                    std::to_string(a));
        if (strict) {
            if (!(b >= -0.5 && b <= 0.0))
                throw std::domain_error(
                    "Params: strict mode requires -1/2 <= beta <= 0 "
                    "(compactness hypothesis range, closed at the published "
                    "boundary case beta = -1/2), got beta = " + std::to_string(b) +
                    "; pass strict=false to evaluate formulas outside it");
        } else {
            if (!(b > -1.0 && b <= 0.0))
                throw std::domain_error(
                    "Params: exploratory mode requires -1 < beta <= 0, got " +
                    std::to_string(b));
        }
    }
};

}  // namespace bergman
