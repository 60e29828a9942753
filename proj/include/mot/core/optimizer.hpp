#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mot/core/tape.hpp"

namespace mot::core {

/// Staircase exponential decay: lr(epoch) = base * decay_base^(epoch / period).
struct LrSchedule {
    double base = 1e-4;
    int decay_period_epochs = 100;
    double decay_base = 0.95;

    double lr_at(int epoch) const {
        return base * std::pow(decay_base, static_cast<double>(epoch / decay_period_epochs));
    }

    static LrSchedule simnet_default() { return {1e-5, 100, 0.95}; }
    static LrSchedule assocnet_default() { return {1e-6, 20, 0.95}; }
};

/// Adam with bias correction over a fixed parameter set. Steps with any
/// non-finite gradient are skipped and counted rather than applied.
template <class T>
class AdamT {
public:
    AdamT(std::vector<ParamT<T>*> params, LrSchedule schedule, double beta1 = 0.9, double beta2 = 0.999,
          double eps = 1e-8)
        : params_(std::move(params)), schedule_(schedule), beta1_(beta1), beta2_(beta2), eps_(eps) {
        for (auto* p : params_) {
            m_.push_back(TensorT<T>::zeros(p->value.shape));
            v_.push_back(TensorT<T>::zeros(p->value.shape));
        }
    }

    void zero_grad() {
        for (auto* p : params_) p->zero_grad();
    }

    /// Global-norm gradient clipping before each step; 0 disables.
    void set_clip_norm(double clip) { clip_norm_ = clip; }

    /// Applies one update using lr(epoch). Returns false when skipped.
    bool step(int epoch) {
        for (auto* p : params_) {
            if (!p->grad.all_finite()) {
                ++skipped_;
                return false;
            }
        }
        if (clip_norm_ > 0.0) {
            double sq = 0.0;
            for (auto* p : params_) sq += kern::sq_sum(p->grad.data(), p->grad.v.size());
            const double norm = std::sqrt(sq);
            if (norm > clip_norm_) {
                const T scale = static_cast<T>(clip_norm_ / norm);
                for (auto* p : params_) kern::scale(p->grad.data(), p->grad.v.size(), scale);
            }
        }
        ++t_;
        const double lr = schedule_.lr_at(epoch);
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t k = 0; k < params_.size(); ++k) {
            auto& p = params_[k]->value;
            auto& g = params_[k]->grad;
            auto& m = m_[k];
            auto& v = v_[k];
            for (std::size_t i = 0; i < p.v.size(); ++i) {
                const double gi = static_cast<double>(g.v[i]);
                const double mi = beta1_ * static_cast<double>(m.v[i]) + (1.0 - beta1_) * gi;
                const double vi = beta2_ * static_cast<double>(v.v[i]) + (1.0 - beta2_) * gi * gi;
                m.v[i] = static_cast<T>(mi);
                v.v[i] = static_cast<T>(vi);
                p.v[i] -= static_cast<T>(lr * (mi / bc1) / (std::sqrt(vi / bc2) + eps_));
            }
        }
        return true;
    }

    std::int64_t steps_taken() const { return t_; }
    std::int64_t steps_skipped() const { return skipped_; }
    const LrSchedule& schedule() const { return schedule_; }

    // Exposed for checkpoint resume.
    std::vector<TensorT<T>>& first_moments() { return m_; }
    std::vector<TensorT<T>>& second_moments() { return v_; }
    void set_steps_taken(std::int64_t t) { t_ = t; }
    const std::vector<ParamT<T>*>& params() const { return params_; }

private:
    std::vector<ParamT<T>*> params_;
    LrSchedule schedule_;
    double beta1_, beta2_, eps_;
    double clip_norm_ = 0.0;
    std::int64_t t_ = 0;
    std::int64_t skipped_ = 0;
    std::vector<TensorT<T>> m_;
    std::vector<TensorT<T>> v_;
};

using Adam = AdamT<float>;

} // namespace mot::core
