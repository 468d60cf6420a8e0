// include/egra/nn.h

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

#ifndef EGRA_NN_H_
#define EGRA_NN_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "egra/rng.h"

// Minimal dense-network building blocks with hand-written backward passes.
namespace egra::nn {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

/// y = x W^T + b for row-major batches x (n x in).
class Dense {
 public:
  Dense() = default;
  Dense(const std::string& name, int in, int out, Rng& rng);

  Matrix forward(const Matrix& x) const;
  /// Accumulates parameter gradients and returns dL/dx.
  Matrix backward(const Matrix& x, const Matrix& grad_out);

  int in_dim() const { return static_cast<int>(weight.value.cols()); }
  int out_dim() const { return static_cast<int>(weight.value.rows()); }

  Parameter weight;  // out x in
  Parameter bias;    // 1 x out
};

RowVector softmax(const RowVector& logits);
/// -log p[target], computed from logits with log-sum-exp.
double cross_entropy(const RowVector& logits, std::size_t target);

/// Mean-pool over frames followed by ReLU hidden layers and a linear output.
class ClassifierHead {
 public:
  struct Tape {
    Matrix frames;
    std::vector<Matrix> inputs;  // input to each dense layer
    std::vector<Matrix> pre;     // pre-activation of each hidden layer
  };

  ClassifierHead() = default;
  ClassifierHead(int input_dim, const std::vector<int>& hidden, int n_classes, Rng& rng);

  RowVector logits(const Matrix& frames, Tape* tape = nullptr) const;
  RowVector probabilities(const Matrix& frames) const { return softmax(logits(frames)); }
  /// Accumulates parameter gradients; returns dL/dframes.
  Matrix backward(const Tape& tape, const RowVector& grad_logits);

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  int input_dim() const { return input_dim_; }
  int n_classes() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }
  const std::vector<int>& hidden() const { return hidden_; }

 private:
  int input_dim_ = 0;
  std::vector<int> hidden_;
  std::vector<Dense> layers_;
};

class Adam {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<Parameter*>& params);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

}  // namespace egra::nn

#endif  // EGRA_NN_H_
