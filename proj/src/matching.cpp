#include "amtile/matching.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <unordered_map>

namespace amtile {

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

struct HK {
  const std::vector<std::vector<int>>& adj;
  std::vector<int>& ml;
  std::vector<int>& mr;
  std::vector<int> dist;
  std::vector<std::size_t> it;

  bool bfs() {
    std::queue<int> q;
    bool found = false;
    for (std::size_t u = 0; u < adj.size(); ++u) {
      if (ml[u] < 0) {
        dist[u] = 0;
        q.push(static_cast<int>(u));
      } else {
        dist[u] = kInf;
      }
    }
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        const int w = mr[v];
        if (w < 0) {
          found = true;
        } else if (dist[w] == kInf) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  // Iterative layered DFS so long augmenting paths cannot overflow the stack.
  bool dfs(int root) {
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const int u = stack.back();
      auto& i = it[u];
      bool advanced = false;
      while (i < adj[u].size()) {
        const int v = adj[u][i];
        const int w = mr[v];
        if (w < 0) {
          // Augment along the stack.
          int right = v;
          for (auto k = stack.size(); k-- > 0;) {
            const int left = stack[k];
            const int prev = ml[left];
            ml[left] = right;
            mr[right] = left;
            right = prev;
          }
          return true;
        }
        if (dist[w] == dist[u] + 1) {
          stack.push_back(w);
          advanced = true;
          break;
        }
        ++i;
      }
      if (!advanced) {
        dist[u] = kInf;
        stack.pop_back();
        if (!stack.empty()) ++it[stack.back()];
      }
    }
    return false;
  }
};

}  // namespace

BipartiteMatching hopcroft_karp(std::size_t n_right, const std::vector<std::vector<int>>& adj) {
  BipartiteMatching m;
  m.mate_left.assign(adj.size(), -1);
  m.mate_right.assign(n_right, -1);
  HK hk{adj, m.mate_left, m.mate_right, std::vector<int>(adj.size()), std::vector<std::size_t>(adj.size())};
  while (hk.bfs()) {
    std::fill(hk.it.begin(), hk.it.end(), 0);
    for (std::size_t u = 0; u < adj.size(); ++u) {
      if (m.mate_left[u] < 0 && hk.dist[u] == 0) hk.dfs(static_cast<int>(u));
    }
  }
  for (int v : m.mate_left) m.size += v >= 0;
  return m;
}

std::pair<std::vector<int>, std::vector<int>> hall_violator(const BipartiteMatching& m,
                                                            const std::vector<std::vector<int>>& adj, int from) {
  std::vector<char> seen_l(adj.size(), 0);
  std::vector<char> seen_r(m.mate_right.size(), 0);
  std::vector<int> left{from};
  std::vector<int> right;
  seen_l[from] = 1;
  for (std::size_t k = 0; k < left.size(); ++k) {
    for (int v : adj[left[k]]) {
      if (seen_r[v]) continue;
      seen_r[v] = 1;
      right.push_back(v);
      const int w = m.mate_right[v];
      if (w >= 0 && !seen_l[w]) {
        seen_l[w] = 1;
        left.push_back(w);
      }
    }
  }
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  return {left, right};
}

HallMatch hall_match(const FiniteSubset& B, const FiniteSubset& A, const FiniteSubset& F) {
  if (!(B.group() == A.group()) || !(B.group() == F.group())) throw Error("hall_match: mismatched group contexts");
  const Group& g = B.group();
  std::unordered_map<Element, int, ElementHash> aidx;
  for (std::size_t i = 0; i < A.size(); ++i) aidx.emplace(A[i], static_cast<int>(i));
  std::vector<std::vector<int>> adj(B.size());
  std::vector<std::size_t> rdeg(A.size(), 0);
  for (std::size_t i = 0; i < B.size(); ++i) {
    for (const auto& f : F) {
      const auto it = aidx.find(g.mul(f, B[i]));
      if (it == aidx.end()) continue;
      adj[i].push_back(it->second);
      ++rdeg[it->second];
    }
  }
  HallMatch out;
  if (!B.empty()) {
    out.min_left_degree = adj[0].size();
    for (const auto& a : adj) out.min_left_degree = std::min(out.min_left_degree, a.size());
  }
  for (auto d : rdeg) out.max_right_degree = std::max(out.max_right_degree, d);
  out.degree_condition = B.empty() || (out.min_left_degree >= 1 && out.min_left_degree >= out.max_right_degree);

  const auto m = hopcroft_karp(A.size(), adj);
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (m.mate_left[i] >= 0) out.pairs.emplace_back(B[i], A[static_cast<std::size_t>(m.mate_left[i])]);
  }
  out.complete = m.size == B.size();
  if (!out.complete) {
    int first = 0;
    while (m.mate_left[first] >= 0) ++first;
    const auto [l, r] = hall_violator(m, adj, first);
    for (int u : l) out.deficient.push_back(B[static_cast<std::size_t>(u)]);
    for (int v : r) out.deficient_neighbors.push_back(A[static_cast<std::size_t>(v)]);
  }
  return out;
}

}  // namespace amtile
