#pragma once

#include <functional>
#include <string>
#include <vector>

#include "zpres/tensor.hpp"

namespace zpres {

// Named trainable tensor. `grad` always has the value's shape and accumulates
// across backward passes until zero_grad().
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string name, Tensor v);

  void zero_grad() { grad.fill(0.0); }
};

// Handle into a Tape.
struct Var {
  int id = -1;
};

// Records tensor-valued ops during a forward pass. Tape order is topological
// by construction (an op only refers to earlier nodes), so backward() is a
// single reverse sweep. Leaves bound to a Parameter flush their gradient into
// Parameter::grad at the end of backward(); parameters not touched by the
// forward pass keep whatever grad they had (zero after zero_grad()).
class Tape {
 public:
  Var leaf(Parameter& p);
  Var constant(Tensor t);
  Var zeros(std::size_t dim);

  // y = W x (W: r x c, x: c)
  Var matvec(Var w, Var x);
  // column j of a matrix; gradient flows only into that column
  Var col(Var m, std::size_t j);
  Var add(Var a, Var b);
  Var sum(const std::vector<Var>& parts);
  // elementwise product
  Var mul(Var a, Var b);
  Var scale(Var a, double c);
  Var concat(const std::vector<Var>& parts);
  // k one-dim vars -> vector of dim k
  Var stack_scalars(const std::vector<Var>& parts);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  // max-subtracted; rejects empty input
  Var softmax(Var a);
  // -sum_i gold_i * log(max(probs_i, 1e-12)); gold entries in {0,1}
  Var cross_entropy(Var probs, const std::vector<double>& gold);

  const Tensor& value(Var v) const;
  const Tensor& grad(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)=1 and runs recorded adjoints in reverse. `loss` must be a
  // scalar node recorded on this tape; calling with no recorded forward pass
  // is an error.
  void backward(Var loss);

  static constexpr double kLogFloor = 1e-12;

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Tape&, const Node&)> back;  // null for leaves/constants
    Parameter* param = nullptr;
    bool touched = false;  // received any adjoint during backward
  };

  Var push(Tensor value, std::function<void(Tape&, const Node&)> back, Parameter* param = nullptr);
  Node& node(Var v);
  const Node& node_checked(Var v, const char* what) const;
  void accumulate(int id, const Tensor& g);
  void accumulate_scaled(int id, const Tensor& g, double c);

  std::vector<Node> nodes_;
};

}  // namespace zpres
