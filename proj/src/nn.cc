// src/nn.cc

// Copyright 2026  EGRA Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "egra/nn.h"

#include <cmath>

#include "egra/common.h"

namespace egra::nn {

Dense::Dense(const std::string& name, int in, int out, Rng& rng) {
  weight.name = name + ".weight";
  bias.name = name + ".bias";
  // Glorot-uniform
  const double limit = std::sqrt(6.0 / (in + out));
  weight.value.resize(out, in);
  for (int r = 0; r < out; ++r)
    for (int c = 0; c < in; ++c) weight.value(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
  bias.value = Matrix::Zero(1, out);
  weight.zero_grad();
  bias.zero_grad();
}

Matrix Dense::forward(const Matrix& x) const {
  Matrix y = x * weight.value.transpose();
  y.rowwise() += bias.value.row(0);
  return y;
}

Matrix Dense::backward(const Matrix& x, const Matrix& grad_out) {
  weight.grad.noalias() += grad_out.transpose() * x;
  bias.grad.row(0) += grad_out.colwise().sum();
  return grad_out * weight.value;
}

RowVector softmax(const RowVector& logits) {
  RowVector e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

double cross_entropy(const RowVector& logits, std::size_t target) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return lse - logits(static_cast<Eigen::Index>(target));
}

ClassifierHead::ClassifierHead(int input_dim, const std::vector<int>& hidden, int n_classes, Rng& rng)
    : input_dim_(input_dim), hidden_(hidden) {
  if (input_dim <= 0 || n_classes < 2) throw InvalidArgumentError("head needs input_dim > 0 and >= 2 classes");
  int in = input_dim;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (hidden[i] <= 0) throw InvalidArgumentError("hidden widths must be positive");
    layers_.emplace_back("head.hidden" + std::to_string(i), in, hidden[i], rng);
    in = hidden[i];
  }
  layers_.emplace_back("head.out", in, n_classes, rng);
}

RowVector ClassifierHead::logits(const Matrix& frames, Tape* tape) const {
  if (frames.rows() == 0) throw Error("classifier head received zero frames");
  Matrix x = frames.colwise().mean();
  if (tape) {
    tape->frames = frames;
    tape->inputs.clear();
    tape->pre.clear();
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (tape) tape->inputs.push_back(x);
    Matrix z = layers_[i].forward(x);
    if (i + 1 < layers_.size()) {
      if (tape) tape->pre.push_back(z);
      x = z.cwiseMax(0.0);
    } else {
      x = std::move(z);
    }
  }
  return x.row(0);
}

Matrix ClassifierHead::backward(const Tape& tape, const RowVector& grad_logits) {
  Matrix g = grad_logits;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    if (i + 1 < layers_.size()) g = g.cwiseProduct((tape.pre[i].array() > 0.0).cast<double>().matrix());
    g = layers_[i].backward(tape.inputs[i], g);
  }
  // mean pooling spreads the gradient evenly over frames
  const auto frames = tape.frames.rows();
  return g.replicate(frames, 1) / static_cast<double>(frames);
}

std::vector<Parameter*> ClassifierHead::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<const Parameter*> ClassifierHead::parameters() const {
  std::vector<const Parameter*> out;
  for (const auto& l : layers_) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

void Adam::step(const std::vector<Parameter*>& params) {
  if (m_.empty()) {
    for (auto* p : params) {
      m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = *params[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseAbs2();
    p.value.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

}  // namespace egra::nn
