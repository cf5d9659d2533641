#pragma once

#include <functional>
#include <utility>

#include "zpres/rng.hpp"
#include "zpres/tape.hpp"

namespace zpres {

struct LstmVars {
  Var wi, ui, bi, wf, uf, bf, wo, uo, bo, wc, uc, bc;
};

// One LSTM direction: sigmoid input/forget/output gates, tanh cell candidate,
// no peepholes. W*: hidden x input, U*: hidden x hidden, b*: hidden.
struct LstmParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Parameter wi, ui, bi, wf, uf, bf, wo, uo, bo, wc, uc, bc;

  LstmParams() = default;
  LstmParams(const std::string& prefix, std::size_t input_dim, std::size_t hidden_dim);

  LstmVars bind(Tape& t);
  std::vector<Parameter*> params();
};

struct MlpVars {
  Var w1, b1, w2, b2, w3, b3;
};

// Three layers, ReLU after each (including the last).
struct MlpParams {
  std::vector<std::size_t> dims;  // {in, h1, h2, h3}
  Parameter w1, b1, w2, b2, w3, b3;

  MlpParams() = default;
  MlpParams(const std::string& prefix, std::size_t in, std::size_t h1, std::size_t h2,
            std::size_t h3);

  MlpVars bind(Tape& t);
  std::vector<Parameter*> params();
  std::size_t out_dim() const { return dims.back(); }
};

struct LstmState {
  Var h, c;
};

LstmState lstm_step(Tape& t, Var x, LstmState prev, const LstmVars& p);

// all_hidden[i] is the hidden state produced when seq[i] was consumed,
// whatever the direction; last_hidden is the state after the final step in
// the chosen direction (zeros for an empty sequence).
struct LstmRun {
  std::vector<Var> all_hidden;
  Var last_hidden;
};
LstmRun lstm_run(Tape& t, const std::vector<Var>& seq, const LstmVars& p, bool reversed,
                 std::size_t hidden_dim);

Var mlp_forward(Tape& t, Var x, const MlpVars& p);

// Plain-tensor entry points (scratch tape inside; forward values only).
std::pair<Tensor, Tensor> lstm_step(const Tensor& x, const Tensor& h_prev, const Tensor& c_prev,
                                    LstmParams& p);
std::pair<std::vector<Tensor>, Tensor> lstm_run(const std::vector<Tensor>& seq, LstmParams& p,
                                                bool reversed);
Tensor mlp_forward(const Tensor& x, MlpParams& p);
Tensor softmax(const Tensor& scores);
double cross_entropy(const Tensor& probs, const std::vector<double>& gold);

// p <- p - lr * grad for every parameter; gradients are left as-is.
void sgd_step(const std::vector<Parameter*>& params, double lr);
void zero_grads(const std::vector<Parameter*>& params);
// U(-range, range), consuming one draw per entry in declared order.
void init_uniform(const std::vector<Parameter*>& params, double range, Rng& rng);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
};

// Compares tape gradients of `loss_fn` against central finite differences on
// up to samples_per_tensor entries of each parameter. loss_fn must be
// deterministic in the parameter values. Relative error uses the
// max(|analytic|, |numeric|, 1e-8) floor. after_backward, when given, runs
// once after the analytic pass; the self-test path uses it to corrupt a
// gradient and prove the comparison catches it.
GradCheckResult grad_check(const std::vector<Parameter*>& params,
                           const std::function<Var(Tape&)>& loss_fn, double eps,
                           std::size_t samples_per_tensor, std::uint64_t seed,
                           const std::function<void()>& after_backward = nullptr);

}  // namespace zpres
