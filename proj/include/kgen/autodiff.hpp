#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kgen/common.hpp"

// Reverse-mode tape over Eigen matrices, sized for the refiner: a few
// thousand nodes per batch, double precision throughout. With a
// non-recording tape the same code path runs as plain inference.

namespace kgen::ad {

using Matrix = Eigen::MatrixXd;

struct Tensor {
  Matrix v;
  Matrix g;  // allocated only under a recording tape

  Eigen::Index rows() const { return v.rows(); }
  Eigen::Index cols() const { return v.cols(); }
};

using TensorPtr = std::shared_ptr<Tensor>;

inline TensorPtr make_param(Matrix v) {
  auto t = std::make_shared<Tensor>();
  t->g = Matrix::Zero(v.rows(), v.cols());
  t->v = std::move(v);
  return t;
}

class Tape {
 public:
  explicit Tape(bool recording = true) : recording_(recording) {}

  bool recording() const { return recording_; }

  TensorPtr input(Matrix v) {
    auto t = std::make_shared<Tensor>();
    if (recording_) t->g = Matrix::Zero(v.rows(), v.cols());
    t->v = std::move(v);
    return t;
  }

  TensorPtr scalar(double v) { return input(Matrix::Constant(1, 1, v)); }

  TensorPtr matmul(TensorPtr a, TensorPtr b) {
    TensorPtr out = input(a->v * b->v);
    record([a, b, out] {
      a->g += out->g * b->v.transpose();
      b->g += a->v.transpose() * out->g;
    });
    return out;
  }

  // a * b^T
  TensorPtr matmul_nt(TensorPtr a, TensorPtr b) {
    TensorPtr out = input(a->v * b->v.transpose());
    record([a, b, out] {
      a->g += out->g * b->v;
      b->g += out->g.transpose() * a->v;
    });
    return out;
  }

  TensorPtr add(TensorPtr a, TensorPtr b) {
    TensorPtr out = input(a->v + b->v);
    record([a, b, out] {
      a->g += out->g;
      b->g += out->g;
    });
    return out;
  }

  // a + cb * b
  TensorPtr add_scaled(TensorPtr a, TensorPtr b, double cb) {
    TensorPtr out = input(a->v + cb * b->v);
    record([a, b, out, cb] {
      a->g += out->g;
      b->g += cb * out->g;
    });
    return out;
  }

  // broadcast a 1 x n bias over every row
  TensorPtr add_rowvec(TensorPtr a, TensorPtr b) {
    TensorPtr out = input(a->v.rowwise() + b->v.row(0));
    record([a, b, out] {
      a->g += out->g;
      b->g.row(0) += out->g.colwise().sum();
    });
    return out;
  }

  TensorPtr add_const(TensorPtr a, const Matrix& c) {
    TensorPtr out = input(a->v + c);
    record([a, out] { a->g += out->g; });
    return out;
  }

  TensorPtr scale(TensorPtr a, double s) {
    TensorPtr out = input(s * a->v);
    record([a, out, s] { a->g += s * out->g; });
    return out;
  }

  TensorPtr relu(TensorPtr a) {
    TensorPtr out = input(a->v.cwiseMax(0.0));
    record([a, out] {
      a->g.array() += (a->v.array() > 0.0).cast<double>() * out->g.array();
    });
    return out;
  }

  // Row-wise softmax; `mask` (1 x cols) is added to every row first, with
  // large negative entries excluding padded positions.
  TensorPtr softmax_rows(TensorPtr a, const Eigen::RowVectorXd* mask = nullptr) {
    Matrix m = a->v;
    if (mask) m.rowwise() += *mask;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const double mx = m.row(r).maxCoeff();
      m.row(r) = (m.row(r).array() - mx).exp();
      m.row(r) /= m.row(r).sum();
    }
    TensorPtr out = input(std::move(m));
    record([a, out] {
      for (Eigen::Index r = 0; r < out->v.rows(); ++r) {
        const double dot = out->g.row(r).dot(out->v.row(r));
        a->g.row(r).array() +=
            out->v.row(r).array() * (out->g.row(r).array() - dot);
      }
    });
    return out;
  }

  // Row-wise layer normalization with learned gain/bias (1 x cols each).
  TensorPtr layer_norm(TensorPtr x, TensorPtr gain, TensorPtr bias, double eps = 1e-5) {
    const Eigen::Index n = x->cols();
    Matrix xhat(x->rows(), n);
    Eigen::VectorXd inv_std(x->rows());
    for (Eigen::Index r = 0; r < x->rows(); ++r) {
      const double mu = x->v.row(r).mean();
      const Eigen::RowVectorXd c = x->v.row(r).array() - mu;
      const double var = c.squaredNorm() / static_cast<double>(n);
      inv_std(r) = 1.0 / std::sqrt(var + eps);
      xhat.row(r) = c * inv_std(r);
    }
    Matrix out_v = (xhat.array().rowwise() * gain->v.row(0).array()).rowwise() +
                   bias->v.row(0).array();
    TensorPtr out = input(std::move(out_v));
    record([x, gain, bias, out, xhat, inv_std, n] {
      for (Eigen::Index r = 0; r < x->v.rows(); ++r) {
        const Eigen::RowVectorXd gy = out->g.row(r);
        const Eigen::RowVectorXd gxhat = gy.array() * gain->v.row(0).array();
        const double mean_g = gxhat.mean();
        const double mean_gx = (gxhat.array() * xhat.row(r).array()).mean();
        x->g.row(r).array() +=
            inv_std(r) * (gxhat.array() - mean_g - xhat.row(r).array() * mean_gx);
        gain->g.row(0).array() += gy.array() * xhat.row(r).array();
        bias->g.row(0) += gy;
      }
    });
    return out;
  }

  TensorPtr slice_cols(TensorPtr a, Eigen::Index c0, Eigen::Index w) {
    TensorPtr out = input(a->v.middleCols(c0, w));
    record([a, out, c0, w] { a->g.middleCols(c0, w) += out->g; });
    return out;
  }

  TensorPtr slice_rows(TensorPtr a, Eigen::Index r0, Eigen::Index n) {
    TensorPtr out = input(a->v.middleRows(r0, n));
    record([a, out, r0, n] { a->g.middleRows(r0, n) += out->g; });
    return out;
  }

  TensorPtr concat_cols(const std::vector<TensorPtr>& xs) {
    Eigen::Index cols = 0;
    for (const auto& x : xs) cols += x->cols();
    Matrix m(xs[0]->rows(), cols);
    Eigen::Index at = 0;
    for (const auto& x : xs) {
      m.middleCols(at, x->cols()) = x->v;
      at += x->cols();
    }
    TensorPtr out = input(std::move(m));
    record([xs, out] {
      Eigen::Index at = 0;
      for (const auto& x : xs) {
        x->g += out->g.middleCols(at, x->cols());
        at += x->cols();
      }
    });
    return out;
  }

  // Mean over rows of the squared row difference (for T x 2 positions this
  // is the mean squared Euclidean distance per timestep).
  TensorPtr mse_rows(TensorPtr pred, const Matrix& target) {
    if (pred->rows() != target.rows() || pred->cols() != target.cols()) {
      throw std::invalid_argument("mse_rows: shape mismatch");
    }
    const double n = static_cast<double>(pred->rows());
    const Matrix diff = pred->v - target;
    TensorPtr out = input(Matrix::Constant(1, 1, diff.squaredNorm() / n));
    record([pred, out, diff, n] { pred->g += out->g(0, 0) * (2.0 / n) * diff; });
    return out;
  }

  // Mean over rows of the squared angle residual, wrapped to (-pi, pi].
  TensorPtr angle_mse(TensorPtr pred, const Eigen::VectorXd& target) {
    if (pred->rows() != target.rows() || pred->cols() != 1) {
      throw std::invalid_argument("angle_mse: shape mismatch");
    }
    const double n = static_cast<double>(pred->rows());
    Eigen::VectorXd wrapped(pred->rows());
    for (Eigen::Index i = 0; i < pred->rows(); ++i) {
      wrapped(i) = wrap_angle(pred->v(i, 0) - target(i));
    }
    TensorPtr out = input(Matrix::Constant(1, 1, wrapped.squaredNorm() / n));
    record([pred, out, wrapped, n] {
      pred->g.col(0) += out->g(0, 0) * (2.0 / n) * wrapped;
    });
    return out;
  }

  // Heading/speed series from a T x 2 position sequence via finite
  // differences; the last step replicates the previous one and zero
  // displacements carry the previous heading (seed_theta at the start).
  std::pair<TensorPtr, TensorPtr> trajectory_kinematics(TensorPtr pos, double rate,
                                                        double seed_theta) {
    const Eigen::Index n = pos->rows();
    if (n < 2 || pos->cols() != 2) {
      throw std::invalid_argument("trajectory_kinematics: need T x 2 with T >= 2");
    }
    Eigen::VectorXd theta(n), speed(n);
    std::vector<bool> carried(n - 1, false);
    double prev_theta = seed_theta;
    for (Eigen::Index t = 0; t + 1 < n; ++t) {
      const double dx = pos->v(t + 1, 0) - pos->v(t, 0);
      const double dy = pos->v(t + 1, 1) - pos->v(t, 1);
      const double dist = std::hypot(dx, dy);
      speed(t) = dist * rate;
      if (dist > kKinematicsTol) {
        theta(t) = std::atan2(dy, dx);
      } else {
        theta(t) = prev_theta;
        carried[t] = true;
      }
      prev_theta = theta(t);
    }
    theta(n - 1) = theta(n - 2);
    speed(n - 1) = speed(n - 2);
    TensorPtr theta_t = input(theta);
    TensorPtr speed_t = input(speed);
    record([pos, theta_t, speed_t, carried, rate, n] {
      Eigen::VectorXd gth = theta_t->g.col(0);
      Eigen::VectorXd gv = speed_t->g.col(0);
      gth(n - 2) += gth(n - 1);
      gv(n - 2) += gv(n - 1);
      // propagate carried headings back to the step that defined them
      for (Eigen::Index t = n - 2; t >= 1; --t) {
        if (carried[t]) gth(t - 1) += gth(t);
      }
      for (Eigen::Index t = 0; t + 1 < n; ++t) {
        const double dx = pos->v(t + 1, 0) - pos->v(t, 0);
        const double dy = pos->v(t + 1, 1) - pos->v(t, 1);
        const double dist = std::hypot(dx, dy);
        const double safe = std::max(dist, 1e-12);
        // speed term
        const double cv = rate * gv(t) / safe;
        pos->g(t + 1, 0) += cv * dx;
        pos->g(t + 1, 1) += cv * dy;
        pos->g(t, 0) -= cv * dx;
        pos->g(t, 1) -= cv * dy;
        // heading term (skipped when the heading was carried)
        if (!carried[t]) {
          const double r2 = std::max(dist * dist, 1e-24);
          const double gx = gth(t) * (-dy / r2);
          const double gy2 = gth(t) * (dx / r2);
          pos->g(t + 1, 0) += gx;
          pos->g(t + 1, 1) += gy2;
          pos->g(t, 0) -= gx;
          pos->g(t, 1) -= gy2;
        }
      }
    });
    return {theta_t, speed_t};
  }

  void backward(const TensorPtr& loss) {
    if (!recording_) throw std::logic_error("backward on a non-recording tape");
    if (loss->rows() != 1 || loss->cols() != 1) {
      throw std::invalid_argument("backward: loss must be 1x1");
    }
    loss->g(0, 0) = 1.0;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
  }

  static constexpr double kKinematicsTol = 1e-12;

 private:
  void record(std::function<void()> f) {
    if (recording_) steps_.push_back(std::move(f));
  }

  bool recording_;
  std::vector<std::function<void()>> steps_;
};

}  // namespace kgen::ad
