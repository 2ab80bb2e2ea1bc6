#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgen/autodiff.hpp"

// Named-tensor container shared by the refiner and the keypoint policy, plus
// the versioned checkpoint format:
//   line 1: "KGTC1"
//   line 2: JSON header {"meta": {...}, "tensors": [{"name", "rows", "cols"}, ...]}
//   then raw little-endian float64 payload, row-major, in header order.

namespace kgen {

class TensorStore {
 public:
  ad::TensorPtr add(const std::string& name, ad::Matrix init) {
    if (index_.count(name)) throw std::invalid_argument("duplicate tensor: " + name);
    auto t = ad::make_param(std::move(init));
    index_[name] = items_.size();
    items_.emplace_back(name, t);
    return t;
  }

  ad::TensorPtr at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("no tensor named " + name);
    return items_[it->second].second;
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  const std::vector<std::pair<std::string, ad::TensorPtr>>& items() const { return items_; }

  std::size_t size() const { return items_.size(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : items_) n += static_cast<std::size_t>(t->v.size());
    return n;
  }

  void zero_grads() {
    for (auto& [name, t] : items_) t->g.setZero();
  }

 private:
  std::vector<std::pair<std::string, ad::TensorPtr>> items_;  // insertion order
  std::map<std::string, std::size_t> index_;
};

inline void save_store(const std::string& path, const TensorStore& store,
                       const nlohmann::json& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  nlohmann::json header;
  header["meta"] = meta;
  header["tensors"] = nlohmann::json::array();
  for (const auto& [name, t] : store.items()) {
    header["tensors"].push_back({{"name", name}, {"rows", t->v.rows()}, {"cols", t->v.cols()}});
  }
  out << "KGTC1\n" << header.dump() << "\n";
  for (const auto& [name, t] : store.items()) {
    for (Eigen::Index r = 0; r < t->v.rows(); ++r) {
      for (Eigen::Index c = 0; c < t->v.cols(); ++c) {
        const double v = t->v(r, c);
        out.write(reinterpret_cast<const char*>(&v), sizeof(double));
      }
    }
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

struct LoadedStore {
  TensorStore store;
  nlohmann::json meta;
};

inline LoadedStore load_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint for reading: " + path);
  std::string magic, header_line;
  std::getline(in, magic);
  if (magic != "KGTC1") throw std::runtime_error("unsupported checkpoint format: " + path);
  std::getline(in, header_line);
  const nlohmann::json header = nlohmann::json::parse(header_line);
  LoadedStore out;
  out.meta = header.value("meta", nlohmann::json::object());
  for (const auto& jt : header.at("tensors")) {
    const auto name = jt.at("name").get<std::string>();
    const auto rows = jt.at("rows").get<Eigen::Index>();
    const auto cols = jt.at("cols").get<Eigen::Index>();
    ad::Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        double v = 0.0;
        in.read(reinterpret_cast<char*>(&v), sizeof(double));
        m(r, c) = v;
      }
    }
    if (!in) throw std::runtime_error("truncated checkpoint payload: " + path);
    out.store.add(name, std::move(m));
  }
  return out;
}

// AdamW with decoupled weight decay (0 by default). Moments are keyed by
// tensor name so lazily created tables pick up fresh state.
class AdamW {
 public:
  explicit AdamW(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8,
                 double weight_decay = 0.0)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), weight_decay_(weight_decay) {}

  void step(TensorStore& params) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (const auto& [name, p] : params.items()) {
      auto& [m, v] = moments_[name];
      if (m.size() == 0) {
        m = ad::Matrix::Zero(p->v.rows(), p->v.cols());
        v = ad::Matrix::Zero(p->v.rows(), p->v.cols());
      }
      m = beta1_ * m + (1.0 - beta1_) * p->g;
      v = beta2_ * v.array() + (1.0 - beta2_) * p->g.array().square();
      const ad::Matrix m_hat = m / bc1;
      const ad::Matrix v_hat = v / bc2;
      if (weight_decay_ != 0.0) p->v -= lr_ * weight_decay_ * p->v;
      p->v.array() -= lr_ * m_hat.array() / (v_hat.array().sqrt() + eps_);
    }
  }

  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_, weight_decay_;
  long t_ = 0;
  std::map<std::string, std::pair<ad::Matrix, ad::Matrix>> moments_;
};

}  // namespace kgen
