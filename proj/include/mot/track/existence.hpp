#pragma once

#include <stdexcept>

namespace mot::track {

struct ExistenceConfig {
    double p_survival = 0.95;
    double p_detect = 0.9;
    double p_false = 0.1;
    double theta_ex = 0.40;         // prune below this
    double report_threshold = 0.5;  // emit at or above this
    double init = 0.5;              // fresh tracks
};

/// Survival-decayed prior: P'_e = p_s * P_e.
inline double existence_predict(double pe, const ExistenceConfig& cfg) {
    if (pe < 0.0 || pe > 1.0) throw std::invalid_argument("existence_predict: P_e out of [0,1]");
    return cfg.p_survival * pe;
}

enum class Outcome { matched, missed };

/// Two-likelihood Bayes update: a match weighs P_d against the false-alarm
/// rate, a miss weighs (1-P_d) against (1-p_fa). P_e = 0 is absorbing.
inline double existence_update(double pe, Outcome outcome, const ExistenceConfig& cfg) {
    if (pe < 0.0 || pe > 1.0) throw std::invalid_argument("existence_update: P_e out of [0,1]");
    if (outcome == Outcome::matched) {
        const double num = cfg.p_detect * pe;
        const double den = num + cfg.p_false * (1.0 - pe);
        return den == 0.0 ? 0.0 : num / den;
    }
    const double num = (1.0 - cfg.p_detect) * pe;
    const double den = num + (1.0 - cfg.p_false) * (1.0 - pe);
    return den == 0.0 ? 0.0 : num / den;
}

} // namespace mot::track
