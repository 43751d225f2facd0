// Copyright 2026 The formstruct Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference implementations written independently of the library code, used
// as the second route in cross-checks. They favour obviousness over speed.

#ifndef FORMSTRUCT_TESTS_ORACLES_HPP_
#define FORMSTRUCT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

// softmax(Q K^T / sqrt(d)) V with plain loops.
inline Mat VanillaAttention(const Mat& q, const Mat& k, const Mat& v) {
  const std::size_t n = q.size(), m = k.size(), d = q[0].size(), dv = v[0].size();
  Mat out(n, std::vector<double>(dv, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> s(m);
    for (std::size_t j = 0; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += q[i][c] * k[j][c];
      s[j] = dot / std::sqrt(static_cast<double>(d));
    }
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double& x : s) z += (x = std::exp(x - mx));
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t c = 0; c < dv; ++c) out[i][c] += s[j] / z * v[j][c];
    }
  }
  return out;
}

// Block distance straight from its definition: tokens of the form title
// (role id 0, or block -1) are at distance 0 from everything; otherwise the
// absolute difference of block indices, the description counting as 0.
inline int BlockDistance(int role_a, int block_a, int role_b, int block_b) {
  if (role_a == 0 || role_b == 0 || block_a == -1 || block_b == -1) return 0;
  return block_a > block_b ? block_a - block_b : block_b - block_a;
}

// --- ROUGE ------------------------------------------------------------------

inline std::vector<std::string> Words(const std::string& text) {
  std::vector<std::string> out;
  std::string w;
  for (unsigned char c : text) {
    if (std::isalnum(c) && c < 128) {
      w += static_cast<char>(std::tolower(c));
    } else {
      if (!w.empty()) out.push_back(w);
      w.clear();
    }
  }
  if (!w.empty()) out.push_back(w);
  return out;
}

inline double F(double hits, double cand, double ref) {
  if (hits == 0 || cand == 0 || ref == 0) return 0.0;
  const double p = hits / cand, r = hits / ref;
  return 100.0 * 2 * p * r / (p + r);
}

// Clipped n-gram matches by greedy one-to-one pairing over lists.
inline double RougeN(const std::vector<std::string>& c, const std::vector<std::string>& r, int n) {
  auto grams = [n](const std::vector<std::string>& t) {
    std::vector<std::string> g;
    for (std::size_t i = 0; i + n <= t.size(); ++i) {
      std::string s;
      for (int k = 0; k < n; ++k) s += t[i + k] + '\x1f';
      g.push_back(s);
    }
    return g;
  };
  const auto cg = grams(c);
  auto rg = grams(r);
  std::vector<bool> used(rg.size(), false);
  double hits = 0;
  for (const auto& g : cg) {
    for (std::size_t j = 0; j < rg.size(); ++j) {
      if (!used[j] && rg[j] == g) {
        used[j] = true;
        ++hits;
        break;
      }
    }
  }
  return F(hits, static_cast<double>(cg.size()), static_cast<double>(rg.size()));
}

// LCS by enumerating every subsequence of the shorter list (exponential;
// inputs are kept short) and testing whether it embeds in the other.
inline int BruteForceLcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const auto& s = a.size() <= b.size() ? a : b;
  const auto& t = a.size() <= b.size() ? b : a;
  int best = 0;
  for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (mask & (1u << i)) sub.push_back(s[i]);
    }
    std::size_t p = 0;
    for (const auto& w : t) {
      if (p < sub.size() && sub[p] == w) ++p;
    }
    if (p == sub.size()) best = std::max(best, static_cast<int>(sub.size()));
  }
  return best;
}

inline double RougeL(const std::vector<std::string>& c, const std::vector<std::string>& r) {
  return F(BruteForceLcs(c, r), static_cast<double>(c.size()), static_cast<double>(r.size()));
}

// --- Macro-F1 ----------------------------------------------------------------

// From an explicit confusion matrix; classes with no gold and no predicted
// instance are left out of the average.
inline double MacroF1(const std::vector<int>& pred, const std::vector<int>& gold, int classes) {
  std::vector<std::vector<int>> cm(classes, std::vector<int>(classes, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) cm[gold[i]][pred[i]]++;
  double sum = 0;
  int counted = 0;
  for (int c = 0; c < classes; ++c) {
    int tp = cm[c][c], fp = 0, fn = 0;
    for (int o = 0; o < classes; ++o) {
      if (o == c) continue;
      fp += cm[o][c];
      fn += cm[c][o];
    }
    if (tp + fp + fn == 0) continue;
    ++counted;
    const double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    const double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    sum += p + r == 0 ? 0.0 : 2 * p * r / (p + r);
  }
  return sum / counted;
}

// --- Finite differences -----------------------------------------------------

inline double CentralDifference(const std::function<double()>& f, double& x, double h = 1e-4) {
  const double keep = x;
  x = keep + h;
  const double up = f();
  x = keep - h;
  const double down = f();
  x = keep;
  return (up - down) / (2 * h);
}

// |a - n| / max(|a|, |n|, floor): relative error with an absolute floor for
// gradients that are essentially zero.
inline double RelativeError(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

}  // namespace oracle

#endif  // FORMSTRUCT_TESTS_ORACLES_HPP_
