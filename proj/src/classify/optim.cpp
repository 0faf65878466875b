#include "emofuse/classify/optim.hpp"

#include <cmath>

#include "emofuse/errors.hpp"

namespace emofuse::classify {

void adam_step(Eigen::Ref<Eigen::VectorXd> params,
               const Eigen::Ref<const Eigen::VectorXd>& grads,
               AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw ShapeError("adam_step: params/grads/state sizes disagree (" +
                         std::to_string(params.size()) + "/" +
                         std::to_string(grads.size()) + "/" +
                         std::to_string(state.m.size()) + ")");
    }
    const long t = ++state.step;
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
    state.v =
        state.beta2 * state.v.array().matrix() +
        (1.0 - state.beta2) * grads.array().square().matrix();
    const double m_corr = 1.0 - std::pow(state.beta1, static_cast<double>(t));
    const double v_corr = 1.0 - std::pow(state.beta2, static_cast<double>(t));
    params.array() -=
        state.lr * (state.m.array() / m_corr) /
        ((state.v.array() / v_corr).sqrt() + state.epsilon);
}

double lr_schedule(ScheduleKind kind, double lr0, int epoch,
                   const ScheduleParams& params) {
    if (lr0 <= 0.0) {
        throw ParameterError("lr_schedule: lr0 must be positive");
    }
    if (epoch < 0) {
        throw ParameterError("lr_schedule: epoch must be non-negative");
    }
    switch (kind) {
        case ScheduleKind::TimeBased:
            return lr0 / (1.0 + params.decay * epoch);
        case ScheduleKind::Step:
            if (params.period <= 0) {
                throw ParameterError("lr_schedule: step period must be "
                                     "positive");
            }
            return lr0 * std::pow(params.drop, epoch / params.period);
        case ScheduleKind::Exponential:
            return lr0 * std::exp(-params.k * epoch);
    }
    throw ParameterError("lr_schedule: unknown kind");
}

ScheduleKind schedule_kind_from_name(const std::string& name) {
    if (name == "time_based") {
        return ScheduleKind::TimeBased;
    }
    if (name == "step") {
        return ScheduleKind::Step;
    }
    if (name == "exponential") {
        return ScheduleKind::Exponential;
    }
    throw ParameterError("lr_schedule: unknown kind \"" + name + "\"");
}

}  // namespace emofuse::classify
