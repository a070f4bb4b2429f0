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

#include "phireg/profile.h"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

namespace phireg {

std::string FormatExact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void WriteProfileCsv(std::ostream& out, const CorrelatedProfile& profile) {
  out << "t,player,ell,j,alpha,strategy\n";
  for (int t = 0; t < profile.num_rounds(); ++t) {
    for (int i = 0; i < profile.num_players; ++i) {
      const Mixture& mix = profile.rounds[t][i];
      for (const auto& c : mix.components) {
        out << t << "," << i << "," << c.ell << ",";
        if (mix.map == StrategyMap::kBehavioral) {
          out << "-1,1,";
          for (std::size_t z = 0; z < c.point.size(); ++z) {
            out << (z ? " " : "") << FormatExact(c.point[z]);
          }
        } else {
          out << c.atom << "," << FormatExact(c.alpha) << ",";
          for (double v : c.point) out << (v > 0.5 ? '1' : '0');
        }
        out << "\n";
      }
    }
  }
}

namespace {

double ParseDouble(const std::string& s, int line) {
  // from_chars, unlike stod, accepts subnormals.
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw PhiregError("profile line " + std::to_string(line) +
                      ": bad number '" + s + "'");
  }
  return v;
}

int ParseInt(const std::string& s, int line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw PhiregError("profile line " + std::to_string(line) +
                      ": bad integer '" + s + "'");
  }
  return v;
}

struct Row {
  int ell = 0;
  int atom = -1;
  double alpha = 1.0;
  Vec point;
};

}  // namespace

CorrelatedProfile ReadProfileCsv(
    std::istream& in, const std::vector<const DecisionProblem*>& problems) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || line.rfind("t,player,ell,j,alpha,strategy", 0) != 0) {
    throw PhiregError("profile line 1: expected header t,player,ell,j,alpha,strategy");
  }
  // (t, player) -> rows, in file order.
  std::map<std::pair<int, int>, std::vector<Row>> groups;
  int num_rounds = 0;
  const int num_players = static_cast<int>(problems.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6) {
      throw PhiregError("profile line " + std::to_string(line_no) +
                        ": expected 6 fields");
    }
    const int t = ParseInt(f[0], line_no);
    const int player = ParseInt(f[1], line_no);
    if (t < 0 || player < 0 || player >= num_players) {
      throw PhiregError("profile line " + std::to_string(line_no) +
                        ": round or player out of range");
    }
    Row row;
    row.ell = ParseInt(f[2], line_no);
    row.atom = ParseInt(f[3], line_no);
    row.alpha = ParseDouble(f[4], line_no);
    if (row.atom < 0) {
      std::stringstream vs(f[5]);
      std::string tok;
      while (vs >> tok) row.point.push_back(ParseDouble(tok, line_no));
    } else {
      for (char c : f[5]) {
        if (c != '0' && c != '1') {
          throw PhiregError("profile line " + std::to_string(line_no) +
                            ": pure strategy must be a bit string");
        }
        row.point.push_back(c == '1' ? 1.0 : 0.0);
      }
    }
    num_rounds = std::max(num_rounds, t + 1);
    groups[{t, player}].push_back(std::move(row));
  }
  CorrelatedProfile profile;
  profile.num_players = num_players;
  profile.rounds.assign(num_rounds, std::vector<Mixture>(num_players));
  for (auto& [key, rows] : groups) {
    const auto [t, player] = key;
    Mixture& mix = profile.rounds[t][player];
    const bool behavioral = rows.front().atom < 0;
    mix.map = behavioral ? StrategyMap::kBehavioral : StrategyMap::kCaratheodory;
    int max_ell = 0;
    for (const Row& r : rows) {
      if ((r.atom < 0) != behavioral) {
        throw PhiregError("profile: round " + std::to_string(t) + " player " +
                          std::to_string(player) + " mixes row kinds");
      }
      max_ell = std::max(max_ell, r.ell);
    }
    mix.num_iterates = max_ell + 1;
    for (Row& r : rows) {
      mix.Add(problems[player], r.ell, r.atom, r.alpha, std::move(r.point));
    }
  }
  for (int t = 0; t < num_rounds; ++t) {
    for (int i = 0; i < num_players; ++i) {
      if (profile.rounds[t][i].components.empty()) {
        throw PhiregError("profile: round " + std::to_string(t) +
                          " has no rows for player " + std::to_string(i));
      }
    }
  }
  return profile;
}

}  // namespace phireg
