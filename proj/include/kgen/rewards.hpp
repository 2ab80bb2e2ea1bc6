#pragma once

#include <cmath>
#include <stdexcept>

namespace kgen {

struct RewardConfig {
  double lambda1 = 0.5;  // ADE scaling
  double lambda2 = 0.5;  // FDE scaling
  double tau1 = 1.0;     // ADE decay scale
  double tau2 = 2.0;     // FDE decay scale
  int l_max = 512;       // max CoT token count
  double alpha = 0.7;    // accuracy weight
  double beta = 0.2;     // CoT-length weight
  double gamma = 0.1;    // format weight
};

struct RewardBreakdown {
  double r_acc = 0.0;
  double r_cot = 0.0;
  double r_fmt = 0.0;
  double composite = 0.0;
};

// lambda1 * exp(-ade/tau1) + lambda2 * exp(-fde/tau2)
inline double accuracy_reward(double ade, double fde, const RewardConfig& cfg) {
  if (!(ade >= 0.0) || !(fde >= 0.0)) {
    throw std::invalid_argument("accuracy_reward: ade and fde must be >= 0");
  }
  return cfg.lambda1 * std::exp(-ade / cfg.tau1) + cfg.lambda2 * std::exp(-fde / cfg.tau2);
}

// 1 - L/L_max for L <= L_max, else 0.
inline double cot_reward(int length, const RewardConfig& cfg) {
  if (length < 0) throw std::invalid_argument("cot_reward: length must be >= 0");
  if (length > cfg.l_max) return 0.0;
  return 1.0 - static_cast<double>(length) / static_cast<double>(cfg.l_max);
}

// Weighted sum alpha*r_acc + beta*r_cot + gamma*r_fmt.
inline RewardBreakdown composite_reward(double r_acc, double r_cot, double r_fmt,
                                        const RewardConfig& cfg) {
  if (r_fmt != 0.0 && r_fmt != 1.0) {
    throw std::invalid_argument("composite_reward: r_fmt must be 0 or 1");
  }
  if (r_cot < 0.0 || r_cot > 1.0) {
    throw std::invalid_argument("composite_reward: r_cot outside [0, 1]");
  }
  if (r_acc < 0.0 || r_acc > cfg.lambda1 + cfg.lambda2 + 1e-12) {
    throw std::invalid_argument("composite_reward: r_acc outside [0, lambda1+lambda2]");
  }
  RewardBreakdown b;
  b.r_acc = r_acc;
  b.r_cot = r_cot;
  b.r_fmt = r_fmt;
  b.composite = cfg.alpha * r_acc + cfg.beta * r_cot + cfg.gamma * r_fmt;
  return b;
}

}  // namespace kgen
