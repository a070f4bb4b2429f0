// Copyright 2026 The phireg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phireg/regret.h"

#include <algorithm>
#include <cmath>

namespace phireg {

DagCfr::DagCfr(const DeviationDag& dag)
    : dag_(&dag),
      regrets_(dag.num_edges(), 0.0),
      sum_terminal_(dag.num_terminals(), 0.0),
      sum_flow_(dag.num_edges(), 0.0) {}

Vec DagCfr::LocalPolicy(int s) const {
  const int deg = static_cast<int>(dag_->out_edges(s).size());
  const int base = dag_->edge_offset(s);
  Vec p(deg, 0.0);
  double total = 0.0;
  for (int i = 0; i < deg; ++i) total += regrets_[base + i];
  for (int i = 0; i < deg; ++i) {
    p[i] = total > 0.0 ? regrets_[base + i] / total : 1.0 / deg;
  }
  return p;
}

ReducedStrategy DagCfr::Next() const {
  const DeviationDag& dag = *dag_;
  ReducedStrategy q;
  q.terminal.assign(dag.num_terminals(), 0.0);
  q.edge_flow.assign(dag.num_edges(), 0.0);
  Vec mass(dag.num_states(), 0.0);
  mass[dag.root()] = 1.0;
  for (int s = 0; s < dag.num_states(); ++s) {
    const auto edges = dag.out_edges(s);
    const int base = dag.edge_offset(s);
    if (dag.kind(s) == NodeKind::kTerminal) {
      q.terminal[dag.terminal_of(s)] = mass[s];
      continue;
    }
    if (mass[s] == 0.0) continue;
    if (dag.kind(s) == NodeKind::kObservation) {
      for (std::size_t i = 0; i < edges.size(); ++i) {
        q.edge_flow[base + i] = mass[s];
        mass[edges[i].child] += mass[s];
      }
      continue;
    }
    const Vec p = LocalPolicy(s);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const double f = mass[s] * p[i];
      q.edge_flow[base + i] = f;
      mass[edges[i].child] += f;
    }
  }
  return q;
}

void DagCfr::Observe(std::span<const double> w) {
  const DeviationDag& dag = *dag_;
  if (static_cast<int>(w.size()) != dag.num_terminals()) {
    throw PhiregError("DagCfr::Observe: weight vector has the wrong size");
  }
  for (double v : w) {
    if (!std::isfinite(v)) throw PhiregError("DagCfr::Observe: nonfinite weight");
  }
  // Fold the strategy being scored into the running average first.
  const ReducedStrategy q = Next();
  for (std::size_t i = 0; i < q.terminal.size(); ++i) {
    sum_terminal_[i] += q.terminal[i];
  }
  for (std::size_t i = 0; i < q.edge_flow.size(); ++i) {
    sum_flow_[i] += q.edge_flow[i];
  }
  ++rounds_;

  Vec value(dag.num_states(), 0.0);
  for (int s = dag.num_states() - 1; s >= 0; --s) {
    const auto edges = dag.out_edges(s);
    switch (dag.kind(s)) {
      case NodeKind::kTerminal:
        value[s] = w[dag.terminal_of(s)];
        break;
      case NodeKind::kObservation:
        for (const auto& e : edges) value[s] += value[e.child];
        break;
      case NodeKind::kDecision: {
        const Vec p = LocalPolicy(s);
        for (std::size_t i = 0; i < edges.size(); ++i) {
          value[s] += p[i] * value[edges[i].child];
        }
        const int base = dag.edge_offset(s);
        for (std::size_t i = 0; i < edges.size(); ++i) {
          regrets_[base + i] = std::max(
              0.0, regrets_[base + i] + value[edges[i].child] - value[s]);
        }
        break;
      }
    }
  }
}

ReducedStrategy DagCfr::Average() const {
  if (rounds_ == 0) return Next();
  ReducedStrategy avg;
  avg.terminal = sum_terminal_;
  avg.edge_flow = sum_flow_;
  for (double& v : avg.terminal) v /= rounds_;
  for (double& v : avg.edge_flow) v /= rounds_;
  return avg;
}

Mwu::Mwu(int arms, int horizon, double step_scale)
    : cumulative_(arms, 0.0), horizon_(horizon), step_scale_(step_scale) {
  if (arms < 1) throw PhiregError("Mwu: need at least one arm");
  if (horizon < 0) throw PhiregError("Mwu: negative horizon");
  if (!(step_scale > 0.0)) throw PhiregError("Mwu: step scale must be positive");
}

double Mwu::step_size() const {
  const double log_arms = std::log(static_cast<double>(arms()));
  const int t = horizon_ > 0 ? horizon_ : std::max(1, rounds_);
  return step_scale_ * std::sqrt(log_arms / t);
}

Vec Mwu::Next() const {
  const double eta = step_size();
  const double top = *std::max_element(cumulative_.begin(), cumulative_.end());
  Vec p(arms());
  double total = 0.0;
  for (int a = 0; a < arms(); ++a) {
    p[a] = std::exp(eta * (cumulative_[a] - top));
    total += p[a];
  }
  for (double& v : p) v /= total;
  return p;
}

void Mwu::Observe(std::span<const double> u, double scale) {
  if (static_cast<int>(u.size()) != arms()) {
    throw PhiregError("Mwu::Observe: expected " + std::to_string(arms()) +
                      " utilities");
  }
  if (!std::isfinite(scale)) throw PhiregError("Mwu::Observe: nonfinite scale");
  for (double v : u) {
    if (!std::isfinite(v)) throw PhiregError("Mwu::Observe: nonfinite utility");
  }
  if (scale == 0.0) return;
  for (int a = 0; a < arms(); ++a) cumulative_[a] += scale * u[a];
  ++rounds_;
}

ExternalRegretMeter::ExternalRegretMeter(const DeviationDag& dag)
    : dag_(&dag), sum_w_(dag.num_terminals(), 0.0) {}

void ExternalRegretMeter::Record(std::span<const double> w,
                                 std::span<const double> q) {
  if (static_cast<int>(w.size()) != dag_->num_terminals() ||
      w.size() != q.size()) {
    throw PhiregError("ExternalRegretMeter::Record: dimension mismatch");
  }
  for (std::size_t i = 0; i < w.size(); ++i) sum_w_[i] += w[i];
  sum_played_ += Dot(w, q);
  ++rounds_;
}

double ExternalRegretMeter::AverageRegret() const {
  if (rounds_ == 0) return 0.0;
  return (BestReducedStrategy(*dag_, sum_w_).value - sum_played_) / rounds_;
}

double MeasureExternalRegret(
    const DeviationDag& dag,
    const std::vector<std::pair<Vec, Vec>>& weights_and_strategies) {
  ExternalRegretMeter meter(dag);
  for (const auto& [w, q] : weights_and_strategies) meter.Record(w, q);
  return meter.AverageRegret();
}

}  // namespace phireg
