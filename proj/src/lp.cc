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

#include "phireg/lp.h"

#include <algorithm>
#include <cmath>

namespace phireg::lp {
namespace {

class Tableau {
 public:
  Tableau(const Problem& p, double tol)
      : m_(static_cast<int>(p.b.size())),
        n_(static_cast<int>(p.c.size())),
        tol_(tol),
        rows_(m_ + 1, Vec(n_ + m_ + 1, 0.0)),
        basis_(m_),
        flipped_(m_, false) {
    for (int i = 0; i < m_; ++i) {
      if (static_cast<int>(p.a[i].size()) != n_) {
        throw PhiregError("lp::Solve: row " + std::to_string(i) +
                          " has the wrong width");
      }
      flipped_[i] = p.b[i] < 0.0;
      const double sign = flipped_[i] ? -1.0 : 1.0;
      for (int j = 0; j < n_; ++j) rows_[i][j] = sign * p.a[i][j];
      rows_[i][n_ + i] = 1.0;
      rows_[i][rhs()] = sign * p.b[i];
      basis_[i] = n_ + i;
    }
  }

  int rhs() const { return n_ + m_; }

  // Installs the reduced-cost row for `cost` over all n + m columns.
  void SetObjective(const Vec& cost) {
    Vec& z = rows_[m_];
    for (int j = 0; j <= rhs(); ++j) z[j] = j < rhs() ? cost[j] : 0.0;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j <= rhs(); ++j) z[j] -= cb * rows_[i][j];
    }
  }

  // Runs Bland-rule pivots over columns [0, limit). Returns false if the
  // objective is unbounded below.
  bool Optimize(int limit, int* iterations) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < limit; ++j) {
        if (rows_[m_][j] < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = rows_[i][enter];
        if (a <= tol_) continue;
        const double ratio = rows_[i][rhs()] / a;
        if (leave < 0 || ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      Pivot(leave, enter);
      ++*iterations;
    }
  }

  void Pivot(int r, int c) {
    Vec& pr = rows_[r];
    const double inv = 1.0 / pr[c];
    for (double& v : pr) v *= inv;
    pr[c] = 1.0;
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = rows_[i][c];
      if (f == 0.0) continue;
      Vec& row = rows_[i];
      for (int j = 0; j <= rhs(); ++j) row[j] -= f * pr[j];
      row[c] = 0.0;
    }
    basis_[r] = c;
  }

  // Pivots basic artificials out where a structural column allows it.
  void DriveOutArtificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      int best = -1;
      for (int j = 0; j < n_; ++j) {
        if (std::abs(rows_[i][j]) > 1e-9 &&
            (best < 0 || std::abs(rows_[i][j]) > std::abs(rows_[i][best]))) {
          best = j;
        }
      }
      if (best >= 0) Pivot(i, best);
    }
  }

  // y_i = cost_{n+i} - reduced cost of artificial i, mapped back through
  // row flips.
  Vec Duals(const Vec& cost) const {
    Vec y(m_);
    for (int i = 0; i < m_; ++i) {
      y[i] = cost[n_ + i] - rows_[m_][n_ + i];
      if (flipped_[i]) y[i] = -y[i];
    }
    return y;
  }

  Vec Primal() const {
    Vec x(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = std::max(0.0, rows_[i][rhs()]);
    }
    return x;
  }

  double Value() const { return -rows_[m_][rhs()]; }
  int m() const { return m_; }
  int n() const { return n_; }

 private:
  int m_;
  int n_;
  double tol_;
  std::vector<Vec> rows_;
  std::vector<int> basis_;
  std::vector<bool> flipped_;
};

}  // namespace

Solution Solve(const Problem& problem, double tol) {
  if (problem.a.size() != problem.b.size()) {
    throw PhiregError("lp::Solve: A and b disagree on the row count");
  }
  Tableau t(problem, tol);
  const int m = t.m();
  const int n = t.n();
  Solution sol;

  Vec phase1(n + m, 0.0);
  for (int i = 0; i < m; ++i) phase1[n + i] = 1.0;
  t.SetObjective(phase1);
  t.Optimize(n + m, &sol.iterations);
  double scale = 1.0;
  for (double v : problem.b) scale = std::max(scale, std::abs(v));
  if (t.Value() > 1e-9 * scale) {
    sol.status = Status::kInfeasible;
    sol.y = t.Duals(phase1);
    sol.objective = t.Value();
    return sol;
  }
  t.DriveOutArtificials();

  Vec phase2(n + m, 0.0);
  std::copy(problem.c.begin(), problem.c.end(), phase2.begin());
  t.SetObjective(phase2);
  if (!t.Optimize(n, &sol.iterations)) {
    sol.status = Status::kUnbounded;
    return sol;
  }
  sol.status = Status::kOptimal;
  sol.x = t.Primal();
  sol.objective = 0.0;
  for (int j = 0; j < n; ++j) sol.objective += problem.c[j] * sol.x[j];
  sol.y = t.Duals(phase2);
  return sol;
}

}  // namespace phireg::lp
