#include "htsim/matching.h"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace htsim {

namespace {

// Maximum-weight matching, primal-dual blossom method with integer labels.
// Vertices are 1..n, blossoms n+1..2n, 0 is "none"; zero weight means no edge.
class Blossom {
 public:
  struct Edge {
    int u = 0;
    int v = 0;
    int64_t w = 0;
  };

  explicit Blossom(int n)
      : n_(n),
        dim_(2 * n + 1),
        g_(static_cast<size_t>(dim_) * dim_),
        lab_(dim_),
        match_(dim_),
        slack_(dim_),
        st_(dim_),
        pa_(dim_),
        flo_from_(static_cast<size_t>(dim_) * (n + 1)),
        s_(dim_),
        vis_(dim_),
        flo_(dim_) {
    for (int u = 1; u <= n_; ++u) {
      for (int v = 1; v <= n_; ++v) E(u, v) = {u, v, 0};
    }
  }

  void set_weight(int u, int v, int64_t w) {
    E(u, v).w = w;
    E(v, u).w = w;
  }

  std::vector<int> solve() {
    std::fill(match_.begin(), match_.end(), 0);
    std::fill(st_.begin(), st_.end(), 0);
    nx_ = n_;
    for (int u = 0; u <= n_; ++u) {
      st_[u] = u;
      flo_[u].clear();
    }
    int64_t w_max = 0;
    for (int u = 1; u <= n_; ++u) {
      for (int v = 1; v <= n_; ++v) {
        FF(u, v) = u == v ? u : 0;
        w_max = std::max(w_max, E(u, v).w);
      }
    }
    for (int u = 1; u <= n_; ++u) lab_[u] = w_max;
    while (matching()) {
    }
    std::vector<int> mate(n_, -1);
    for (int u = 1; u <= n_; ++u) {
      if (match_[u]) mate[u - 1] = match_[u] - 1;
    }
    return mate;
  }

 private:
  Edge& E(int u, int v) { return g_[static_cast<size_t>(u) * dim_ + v]; }
  int& FF(int b, int x) { return flo_from_[static_cast<size_t>(b) * (n_ + 1) + x]; }

  int64_t e_delta(const Edge& e) { return lab_[e.u] + lab_[e.v] - E(e.u, e.v).w * 2; }

  void update_slack(int u, int x) {
    if (!slack_[x] || e_delta(E(u, x)) < e_delta(E(slack_[x], x))) slack_[x] = u;
  }

  void set_slack(int x) {
    slack_[x] = 0;
    for (int u = 1; u <= n_; ++u) {
      if (E(u, x).w > 0 && st_[u] != x && s_[st_[u]] == 0) update_slack(u, x);
    }
  }

  void q_push(int x) {
    if (x <= n_) {
      q_.push_back(x);
    } else {
      for (int y : flo_[x]) q_push(y);
    }
  }

  void set_st(int x, int b) {
    st_[x] = b;
    if (x > n_) {
      for (int y : flo_[x]) set_st(y, b);
    }
  }

  int get_pr(int b, int xr) {
    auto& f = flo_[b];
    int pr = static_cast<int>(std::find(f.begin(), f.end(), xr) - f.begin());
    if (pr % 2 == 1) {
      std::reverse(f.begin() + 1, f.end());
      return static_cast<int>(f.size()) - pr;
    }
    return pr;
  }

  void set_match(int u, int v) {
    match_[u] = E(u, v).v;
    if (u <= n_) return;
    Edge e = E(u, v);
    int xr = FF(u, e.u);
    int pr = get_pr(u, xr);
    for (int i = 0; i < pr; ++i) set_match(flo_[u][i], flo_[u][i ^ 1]);
    set_match(xr, v);
    std::rotate(flo_[u].begin(), flo_[u].begin() + pr, flo_[u].end());
  }

  void augment(int u, int v) {
    for (;;) {
      int xnv = st_[match_[u]];
      set_match(u, v);
      if (!xnv) return;
      set_match(xnv, st_[pa_[xnv]]);
      u = st_[pa_[xnv]];
      v = xnv;
    }
  }

  int get_lca(int u, int v) {
    for (++timer_; u || v; std::swap(u, v)) {
      if (u == 0) continue;
      if (vis_[u] == timer_) return u;
      vis_[u] = timer_;
      u = st_[match_[u]];
      if (u) u = st_[pa_[u]];
    }
    return 0;
  }

  void add_blossom(int u, int lca, int v) {
    int b = n_ + 1;
    while (b <= nx_ && st_[b]) ++b;
    if (b > nx_) ++nx_;
    lab_[b] = 0;
    s_[b] = 0;
    match_[b] = match_[lca];
    auto& f = flo_[b];
    f.clear();
    f.push_back(lca);
    for (int x = u, y; x != lca; x = st_[pa_[y]]) {
      f.push_back(x);
      f.push_back(y = st_[match_[x]]);
      q_push(y);
    }
    std::reverse(f.begin() + 1, f.end());
    for (int x = v, y; x != lca; x = st_[pa_[y]]) {
      f.push_back(x);
      f.push_back(y = st_[match_[x]]);
      q_push(y);
    }
    set_st(b, b);
    for (int x = 1; x <= nx_; ++x) E(b, x).w = E(x, b).w = 0;
    for (int x = 1; x <= n_; ++x) FF(b, x) = 0;
    for (int xs : f) {
      for (int x = 1; x <= nx_; ++x) {
        if (E(b, x).w == 0 || e_delta(E(xs, x)) < e_delta(E(b, x))) {
          E(b, x) = E(xs, x);
          E(x, b) = E(x, xs);
        }
      }
      for (int x = 1; x <= n_; ++x) {
        if (FF(xs, x)) FF(b, x) = xs;
      }
    }
    set_slack(b);
  }

  void expand_blossom(int b) {
    for (int x : flo_[b]) set_st(x, x);
    int xr = FF(b, E(b, pa_[b]).u);
    int pr = get_pr(b, xr);
    for (int i = 0; i < pr; i += 2) {
      int xs = flo_[b][i];
      int xns = flo_[b][i + 1];
      pa_[xs] = E(xns, xs).u;
      s_[xs] = 1;
      s_[xns] = 0;
      slack_[xs] = 0;
      set_slack(xns);
      q_push(xns);
    }
    s_[xr] = 1;
    pa_[xr] = pa_[b];
    for (size_t i = pr + 1; i < flo_[b].size(); ++i) {
      int xs = flo_[b][i];
      s_[xs] = -1;
      set_slack(xs);
    }
    st_[b] = 0;
  }

  bool on_found_edge(const Edge& e) {
    int u = st_[e.u];
    int v = st_[e.v];
    if (s_[v] == -1) {
      pa_[v] = e.u;
      s_[v] = 1;
      int nu = st_[match_[v]];
      slack_[v] = slack_[nu] = 0;
      s_[nu] = 0;
      q_push(nu);
    } else if (s_[v] == 0) {
      int lca = get_lca(u, v);
      if (!lca) {
        augment(u, v);
        augment(v, u);
        return true;
      }
      add_blossom(u, lca, v);
    }
    return false;
  }

  bool matching() {
    std::fill(s_.begin() + 1, s_.begin() + nx_ + 1, -1);
    std::fill(slack_.begin() + 1, slack_.begin() + nx_ + 1, 0);
    q_.clear();
    for (int x = 1; x <= nx_; ++x) {
      if (st_[x] == x && !match_[x]) {
        pa_[x] = 0;
        s_[x] = 0;
        q_push(x);
      }
    }
    if (q_.empty()) return false;
    for (;;) {
      while (!q_.empty()) {
        int u = q_.front();
        q_.pop_front();
        if (s_[st_[u]] == 1) continue;
        for (int v = 1; v <= n_; ++v) {
          if (E(u, v).w > 0 && st_[u] != st_[v]) {
            if (e_delta(E(u, v)) == 0) {
              if (on_found_edge(E(u, v))) return true;
            } else {
              update_slack(u, st_[v]);
            }
          }
        }
      }
      int64_t d = std::numeric_limits<int64_t>::max();
      for (int b = n_ + 1; b <= nx_; ++b) {
        if (st_[b] == b && s_[b] == 1) d = std::min(d, lab_[b] / 2);
      }
      for (int x = 1; x <= nx_; ++x) {
        if (st_[x] == x && slack_[x]) {
          if (s_[x] == -1) {
            d = std::min(d, e_delta(E(slack_[x], x)));
          } else if (s_[x] == 0) {
            d = std::min(d, e_delta(E(slack_[x], x)) / 2);
          }
        }
      }
      for (int u = 1; u <= n_; ++u) {
        if (s_[st_[u]] == 0) {
          if (lab_[u] <= d) return false;
          lab_[u] -= d;
        } else if (s_[st_[u]] == 1) {
          lab_[u] += d;
        }
      }
      for (int b = n_ + 1; b <= nx_; ++b) {
        if (st_[b] == b) {
          if (s_[st_[b]] == 0) {
            lab_[b] += d * 2;
          } else if (s_[st_[b]] == 1) {
            lab_[b] -= d * 2;
          }
        }
      }
      q_.clear();
      for (int x = 1; x <= nx_; ++x) {
        if (st_[x] == x && slack_[x] && st_[slack_[x]] != x &&
            e_delta(E(slack_[x], x)) == 0) {
          if (on_found_edge(E(slack_[x], x))) return true;
        }
      }
      for (int b = n_ + 1; b <= nx_; ++b) {
        if (st_[b] == b && s_[b] == 1 && lab_[b] == 0) expand_blossom(b);
      }
    }
  }

  int n_;
  int nx_ = 0;
  int dim_;
  int timer_ = 0;
  std::vector<Edge> g_;
  std::vector<int64_t> lab_;
  std::vector<int> match_, slack_, st_, pa_;
  std::vector<int> flo_from_;
  std::vector<int> s_, vis_;
  std::vector<std::vector<int>> flo_;
  std::deque<int> q_;
};

void check_even(int n) {
  if (n < 0 || n % 2 != 0) {
    throw std::invalid_argument("perfect matching needs an even number of points");
  }
}

}  // namespace

std::vector<int> min_weight_perfect_matching(int n, const WeightFn& w) {
  check_even(n);
  if (n == 0) return {};
  int64_t w_max = 0;
  std::vector<int64_t> cost(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int64_t c = w(i, j);
      if (c < 0) throw std::invalid_argument("matching weights must be non-negative");
      cost[static_cast<size_t>(i) * n + j] = c;
      w_max = std::max(w_max, c);
    }
  }
  // any perfect matching outweighs every matching with fewer pairs
  const int64_t big = (n / 2) * w_max + 1;
  Blossom b(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      b.set_weight(i + 1, j + 1, big - cost[static_cast<size_t>(i) * n + j]);
    }
  }
  auto mate = b.solve();
  for (int i = 0; i < n; ++i) {
    if (mate[i] < 0 || mate[mate[i]] != i) throw std::logic_error("matching is not perfect");
  }
  return mate;
}

namespace {

void brute(std::vector<int>& mate, int64_t acc, const WeightFn& w, int64_t& best,
           std::vector<int>& best_mate) {
  const int n = static_cast<int>(mate.size());
  int i = 0;
  while (i < n && mate[i] >= 0) ++i;
  if (i == n) {
    if (acc < best) {
      best = acc;
      best_mate = mate;
    }
    return;
  }
  for (int j = i + 1; j < n; ++j) {
    if (mate[j] >= 0) continue;
    mate[i] = j;
    mate[j] = i;
    brute(mate, acc + w(i, j), w, best, best_mate);
    mate[i] = mate[j] = -1;
  }
}

}  // namespace

std::vector<int> brute_force_matching(int n, const WeightFn& w) {
  check_even(n);
  if (n > 14) throw std::invalid_argument("brute force matching limited to 14 points");
  std::vector<int> mate(n, -1), best_mate;
  int64_t best = std::numeric_limits<int64_t>::max();
  brute(mate, 0, w, best, best_mate);
  return n == 0 ? std::vector<int>{} : best_mate;
}

std::vector<int> greedy_matching(int n, const WeightFn& w) {
  check_even(n);
  std::vector<std::tuple<int64_t, int, int>> pairs;
  pairs.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(w(i, j), i, j);
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<int> mate(n, -1);
  for (const auto& [c, i, j] : pairs) {
    if (mate[i] < 0 && mate[j] < 0) {
      mate[i] = j;
      mate[j] = i;
    }
  }
  return mate;
}

int64_t matching_weight(const std::vector<int>& mate, const WeightFn& w) {
  int64_t s = 0;
  for (int i = 0; i < static_cast<int>(mate.size()); ++i) {
    if (mate[i] > i) s += w(i, mate[i]);
  }
  return s;
}

}  // namespace htsim
