#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "maopac/errors.hpp"

namespace maopac {

/// Learning hyperparameters shared by the actor-critic core and the bounds
/// engine. beta_n = beta0 / (1+n)^beta_exponent; an exponent in (0.5, 1]
/// gives a divergent step-size sum with convergent squares.
struct HyperParams {
    double gamma = 0.2;          // discount
    double lambda = 0.5;         // trace decay
    double zeta = 0.5;           // emphatic interest weight
    double b_eps = 0.5;          // behavioral floor, must exceed gamma
    double beta0 = 0.05;
    double beta_exponent = 0.65;
    double epsilon = 0.1;        // target bound for the Theorem-2 engine
    int t_state = 25;            // inner belief-loop length; <=0 means auto
    int t_rho = 50;              // ratio-diffusion length; <=0 means auto

    double beta(int n) const { return beta0 / std::pow(1.0 + n, beta_exponent); }

    /// Collects every violated assumption instead of stopping at the first.
    std::vector<std::string> validate() const {
        std::vector<std::string> v;
        if (!(gamma > 0.0 && gamma < 1.0))
            v.push_back("gamma (" + std::to_string(gamma) + ") must lie in (0,1)");
        if (!(lambda > 0.0 && lambda < 1.0))
            v.push_back("lambda (" + std::to_string(lambda) + ") must lie in (0,1)");
        if (!(zeta > 0.0 && zeta < 1.0))
            v.push_back("zeta (" + std::to_string(zeta) + ") must lie in (0,1)");
        if (!(b_eps > gamma))
            v.push_back("b_eps (" + std::to_string(b_eps) + ") must exceed gamma (" +
                        std::to_string(gamma) + "): behavioral-policy assumption");
        if (!(b_eps <= 1.0)) v.push_back("b_eps must be at most 1");
        if (!(beta0 > 0.0))
            v.push_back("beta0 (" + std::to_string(beta0) + ") must be positive: step-size assumption");
        if (!(beta_exponent > 0.5 && beta_exponent <= 1.0))
            v.push_back("beta_exponent (" + std::to_string(beta_exponent) +
                        ") must lie in (0.5, 1]: step-size assumption");
        if (!(lambda * gamma < 1.0)) v.push_back("lambda * gamma must be below 1");
        if (!(epsilon > 0.0)) v.push_back("epsilon must be positive");
        return v;
    }
};

}  // namespace maopac
