#pragma once

#include <Eigen/Dense>

#include <string>

namespace emofuse::classify {

/// Adam with bias correction. One state per trained parameter vector.
struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    long step = 0;
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    explicit AdamState(Eigen::Index n_params = 0)
        : m(Eigen::VectorXd::Zero(n_params)),
          v(Eigen::VectorXd::Zero(n_params)) {}
};

/// One Adam update in place; increments state.step.
void adam_step(Eigen::Ref<Eigen::VectorXd> params,
               const Eigen::Ref<const Eigen::VectorXd>& grads,
               AdamState& state);

enum class ScheduleKind {
    TimeBased,    // lr0 / (1 + decay * epoch)
    Step,         // lr0 * drop^floor(epoch / period)
    Exponential,  // lr0 * exp(-k * epoch)
};

struct ScheduleParams {
    double decay = 0.01;  // time-based
    double drop = 0.5;    // step
    int period = 10;      // step
    double k = 0.1;       // exponential
};

double lr_schedule(ScheduleKind kind, double lr0, int epoch,
                   const ScheduleParams& params = {});

ScheduleKind schedule_kind_from_name(const std::string& name);

}  // namespace emofuse::classify
