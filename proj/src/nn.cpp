#include "zpres/nn.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "zpres/error.hpp"

namespace zpres {

LstmParams::LstmParams(const std::string& prefix, std::size_t in, std::size_t hidden)
    : input_dim(in),
      hidden_dim(hidden),
      wi(prefix + ".wi", Tensor::zeros({hidden, in})),
      ui(prefix + ".ui", Tensor::zeros({hidden, hidden})),
      bi(prefix + ".bi", Tensor::zeros({hidden})),
      wf(prefix + ".wf", Tensor::zeros({hidden, in})),
      uf(prefix + ".uf", Tensor::zeros({hidden, hidden})),
      bf(prefix + ".bf", Tensor::zeros({hidden})),
      wo(prefix + ".wo", Tensor::zeros({hidden, in})),
      uo(prefix + ".uo", Tensor::zeros({hidden, hidden})),
      bo(prefix + ".bo", Tensor::zeros({hidden})),
      wc(prefix + ".wc", Tensor::zeros({hidden, in})),
      uc(prefix + ".uc", Tensor::zeros({hidden, hidden})),
      bc(prefix + ".bc", Tensor::zeros({hidden})) {}

LstmVars LstmParams::bind(Tape& t) {
  return LstmVars{t.leaf(wi), t.leaf(ui), t.leaf(bi), t.leaf(wf), t.leaf(uf), t.leaf(bf),
                  t.leaf(wo), t.leaf(uo), t.leaf(bo), t.leaf(wc), t.leaf(uc), t.leaf(bc)};
}

std::vector<Parameter*> LstmParams::params() {
  return {&wi, &ui, &bi, &wf, &uf, &bf, &wo, &uo, &bo, &wc, &uc, &bc};
}

MlpParams::MlpParams(const std::string& prefix, std::size_t in, std::size_t h1, std::size_t h2,
                     std::size_t h3)
    : dims{in, h1, h2, h3},
      w1(prefix + ".w1", Tensor::zeros({h1, in})),
      b1(prefix + ".b1", Tensor::zeros({h1})),
      w2(prefix + ".w2", Tensor::zeros({h2, h1})),
      b2(prefix + ".b2", Tensor::zeros({h2})),
      w3(prefix + ".w3", Tensor::zeros({h3, h2})),
      b3(prefix + ".b3", Tensor::zeros({h3})) {}

MlpVars MlpParams::bind(Tape& t) {
  return MlpVars{t.leaf(w1), t.leaf(b1), t.leaf(w2), t.leaf(b2), t.leaf(w3), t.leaf(b3)};
}

std::vector<Parameter*> MlpParams::params() { return {&w1, &b1, &w2, &b2, &w3, &b3}; }

LstmState lstm_step(Tape& t, Var x, LstmState prev, const LstmVars& p) {
  Var i = t.sigmoid(t.sum({t.matvec(p.wi, x), t.matvec(p.ui, prev.h), p.bi}));
  Var f = t.sigmoid(t.sum({t.matvec(p.wf, x), t.matvec(p.uf, prev.h), p.bf}));
  Var o = t.sigmoid(t.sum({t.matvec(p.wo, x), t.matvec(p.uo, prev.h), p.bo}));
  Var cand = t.tanh(t.sum({t.matvec(p.wc, x), t.matvec(p.uc, prev.h), p.bc}));
  Var c = t.add(t.mul(f, prev.c), t.mul(i, cand));
  Var h = t.mul(o, t.tanh(c));
  return LstmState{h, c};
}

LstmRun lstm_run(Tape& t, const std::vector<Var>& seq, const LstmVars& p, bool reversed,
                 std::size_t hidden_dim) {
  LstmRun run;
  run.all_hidden.resize(seq.size());
  LstmState state{t.zeros(hidden_dim), t.zeros(hidden_dim)};
  run.last_hidden = state.h;
  if (seq.empty()) return run;
  for (std::size_t step = 0; step < seq.size(); ++step) {
    std::size_t i = reversed ? seq.size() - 1 - step : step;
    state = lstm_step(t, seq[i], state, p);
    run.all_hidden[i] = state.h;
  }
  run.last_hidden = state.h;
  return run;
}

Var mlp_forward(Tape& t, Var x, const MlpVars& p) {
  Var h1 = t.relu(t.add(t.matvec(p.w1, x), p.b1));
  Var h2 = t.relu(t.add(t.matvec(p.w2, h1), p.b2));
  return t.relu(t.add(t.matvec(p.w3, h2), p.b3));
}

std::pair<Tensor, Tensor> lstm_step(const Tensor& x, const Tensor& h_prev, const Tensor& c_prev,
                                    LstmParams& p) {
  require_vector_dim(x, p.input_dim, "lstm_step x");
  require_vector_dim(h_prev, p.hidden_dim, "lstm_step h_prev");
  require_vector_dim(c_prev, p.hidden_dim, "lstm_step c_prev");
  Tape t;
  LstmVars v = p.bind(t);
  LstmState s = lstm_step(t, t.constant(x), LstmState{t.constant(h_prev), t.constant(c_prev)}, v);
  return {t.value(s.h), t.value(s.c)};
}

std::pair<std::vector<Tensor>, Tensor> lstm_run(const std::vector<Tensor>& seq, LstmParams& p,
                                                bool reversed) {
  Tape t;
  LstmVars v = p.bind(t);
  std::vector<Var> vars;
  vars.reserve(seq.size());
  for (const Tensor& x : seq) {
    require_vector_dim(x, p.input_dim, "lstm_run element");
    vars.push_back(t.constant(x));
  }
  LstmRun run = lstm_run(t, vars, v, reversed, p.hidden_dim);
  std::vector<Tensor> hs;
  hs.reserve(run.all_hidden.size());
  for (Var h : run.all_hidden) hs.push_back(t.value(h));
  return {std::move(hs), t.value(run.last_hidden)};
}

Tensor mlp_forward(const Tensor& x, MlpParams& p) {
  require_vector_dim(x, p.dims[0], "mlp_forward x");
  Tape t;
  MlpVars v = p.bind(t);
  return t.value(mlp_forward(t, t.constant(x), v));
}

Tensor softmax(const Tensor& scores) {
  Tape t;
  return t.value(t.softmax(t.constant(scores)));
}

double cross_entropy(const Tensor& probs, const std::vector<double>& gold) {
  Tape t;
  return t.value(t.cross_entropy(t.constant(probs), gold)).data[0];
}

void sgd_step(const std::vector<Parameter*>& params, double lr) {
  for (Parameter* p : params)
    for (std::size_t i = 0; i < p->value.data.size(); ++i)
      p->value.data[i] -= lr * p->grad.data[i];
}

void zero_grads(const std::vector<Parameter*>& params) {
  for (Parameter* p : params) p->zero_grad();
}

void init_uniform(const std::vector<Parameter*>& params, double range, Rng& rng) {
  for (Parameter* p : params)
    for (double& v : p->value.data) v = rng.next_uniform(range);
}

GradCheckResult grad_check(const std::vector<Parameter*>& params,
                           const std::function<Var(Tape&)>& loss_fn, double eps,
                           std::size_t samples_per_tensor, std::uint64_t seed,
                           const std::function<void()>& after_backward) {
  auto eval_loss = [&]() {
    Tape t;
    Var loss = loss_fn(t);
    double v = t.value(loss).data[0];
    if (!std::isfinite(v)) throw NumericError("grad_check: loss is not finite");
    return v;
  };

  zero_grads(params);
  {
    Tape t;
    Var loss = loss_fn(t);
    t.backward(loss);
  }
  if (after_backward) after_backward();

  Rng rng(seed);
  GradCheckResult result;
  for (Parameter* p : params) {
    std::size_t n = p->value.size();
    if (n == 0) continue;
    std::set<std::size_t> picks;
    picks.insert(0);
    picks.insert(n - 1);
    while (picks.size() < std::min(samples_per_tensor, n)) picks.insert(rng.next_index(n));
    for (std::size_t idx : picks) {
      double saved = p->value.data[idx];
      p->value.data[idx] = saved + eps;
      double up = eval_loss();
      p->value.data[idx] = saved - eps;
      double down = eval_loss();
      p->value.data[idx] = saved;
      double numeric = (up - down) / (2.0 * eps);
      double analytic = p->grad.data[idx];
      double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      double rel = std::fabs(analytic - numeric) / denom;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = p->name + "[" + std::to_string(idx) + "]";
      }
    }
  }
  return result;
}

}  // namespace zpres
