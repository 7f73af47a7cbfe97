#include "pd/cluster.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace pd {

namespace {

// Push the 4-neighbours of idx that match `want` and are unvisited.
template <typename Visit>
inline void for_each_unvisited_neighbour(const BinaryImage& img, int idx, std::uint8_t want,
                                         const std::vector<std::int32_t>& mark, Visit&& visit) {
  int w = img.width;
  int row = idx / w, col = idx % w;
  if (col > 0 && img.bits[idx - 1] == want && mark[idx - 1] == 0) visit(idx - 1);
  if (col + 1 < w && img.bits[idx + 1] == want && mark[idx + 1] == 0) visit(idx + 1);
  if (row > 0 && img.bits[idx - w] == want && mark[idx - w] == 0) visit(idx - w);
  if (row + 1 < img.height && img.bits[idx + w] == want && mark[idx + w] == 0) visit(idx + w);
}

}  // namespace

ClusterLabeling label_components(const BinaryImage& img, CellColor color, bool store_pixels) {
  const std::uint8_t want = color == CellColor::kBlack ? 1 : 0;
  const int w = img.width;
  ClusterLabeling out;
  out.labels.assign(img.bits.size(), 0);
  std::vector<int> stack;

  for (int idx = 0; idx < static_cast<int>(img.bits.size()); ++idx) {
    if (img.bits[idx] != want || out.labels[idx] != 0) continue;
    Cluster c;
    c.id = static_cast<int>(out.clusters.size()) + 1;
    c.min_row = c.max_row = idx / w;
    c.min_col = c.max_col = idx % w;
    out.labels[idx] = c.id;
    stack.clear();
    stack.push_back(idx);
    while (!stack.empty()) {
      int j = stack.back();
      stack.pop_back();
      ++c.size;
      int row = j / w, col = j % w;
      c.min_row = std::min(c.min_row, row);
      c.max_row = std::max(c.max_row, row);
      c.min_col = std::min(c.min_col, col);
      c.max_col = std::max(c.max_col, col);
      for_each_unvisited_neighbour(img, j, want, out.labels, [&](int n) {
        out.labels[n] = c.id;
        stack.push_back(n);
      });
    }
    out.clusters.push_back(std::move(c));
  }

  if (store_pixels) {
    for (auto& c : out.clusters) c.pixels.reserve(c.size);
    for (int idx = 0; idx < static_cast<int>(out.labels.size()); ++idx) {
      std::int32_t id = out.labels[idx];
      if (id != 0) out.clusters[id - 1].pixels.emplace_back(idx / w, idx % w);
    }
  }
  return out;
}

int max_cluster_size(const ClusterLabeling& labeling) {
  int best = 0;
  for (const auto& c : labeling.clusters) best = std::max(best, c.size);
  return best;
}

ClusterSearchResult find_cluster_at_least(const BinaryImage& img, int min_size) {
  if (min_size < 1)
    throw std::invalid_argument("find_cluster_at_least: min_size must be at least 1");
  ClusterSearchResult result;
  const int w = img.width;
  std::vector<std::int32_t> visited(img.bits.size(), 0);
  std::vector<int> stack;
  std::vector<int> explored;  // pixels popped from the current component
  int completed = 0;

  for (int idx = 0; idx < static_cast<int>(img.bits.size()); ++idx) {
    if (img.bits[idx] != 1 || visited[idx] != 0) continue;
    visited[idx] = 1;
    stack.clear();
    explored.clear();
    stack.push_back(idx);
    while (!stack.empty()) {
      int j = stack.back();
      stack.pop_back();
      explored.push_back(j);
      if (static_cast<int>(explored.size()) >= min_size) {
        // Stop immediately: the explored cells already form a connected
        // black patch of the requested size.
        std::sort(explored.begin(), explored.end());
        Cluster c;
        c.id = completed + 1;
        c.size = static_cast<int>(explored.size());
        c.pixels.reserve(explored.size());
        c.min_row = c.max_row = explored.front() / w;
        c.min_col = c.max_col = explored.front() % w;
        for (int p : explored) {
          int row = p / w, col = p % w;
          c.pixels.emplace_back(row, col);
          c.min_row = std::min(c.min_row, row);
          c.max_row = std::max(c.max_row, row);
          c.min_col = std::min(c.min_col, col);
          c.max_col = std::max(c.max_col, col);
        }
        result.found = std::move(c);
        result.max_size = std::max(result.max_size, static_cast<int>(explored.size()));
        return result;
      }
      for_each_unvisited_neighbour(img, j, 1, visited, [&](int n) {
        visited[n] = 1;
        stack.push_back(n);
      });
    }
    ++completed;
    result.max_size = std::max(result.max_size, static_cast<int>(explored.size()));
  }
  return result;
}

bool has_left_right_crossing(const BinaryImage& img) {
  const int w = img.width;
  std::vector<std::int32_t> visited(img.bits.size(), 0);
  std::vector<int> stack;
  for (int row = 0; row < img.height; ++row) {
    int idx = row * w;
    if (img.bits[idx] == 1 && visited[idx] == 0) {
      visited[idx] = 1;
      stack.push_back(idx);
    }
  }
  while (!stack.empty()) {
    int j = stack.back();
    stack.pop_back();
    if (j % w == w - 1) return true;
    for_each_unvisited_neighbour(img, j, 1, visited, [&](int n) {
      visited[n] = 1;
      stack.push_back(n);
    });
  }
  return false;
}

namespace {

// Dinic max-flow on unit-capacity graphs; enough for vertex-disjoint paths.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes) : head_(nodes, -1) {}

  void add_edge(int from, int to) {
    edge_to_.push_back(to);
    edge_cap_.push_back(1);
    edge_next_.push_back(head_[from]);
    head_[from] = static_cast<int>(edge_to_.size()) - 1;
    edge_to_.push_back(from);
    edge_cap_.push_back(0);
    edge_next_.push_back(head_[to]);
    head_[to] = static_cast<int>(edge_to_.size()) - 1;
  }

  int run(int source, int sink) {
    int flow = 0;
    std::vector<int> level(head_.size());
    std::vector<int> it(head_.size());
    while (bfs(source, sink, level)) {
      for (std::size_t i = 0; i < head_.size(); ++i) it[i] = head_[i];
      while (augment(source, sink, level, it)) ++flow;
    }
    return flow;
  }

 private:
  bool bfs(int source, int sink, std::vector<int>& level) {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> q;
    level[source] = 0;
    q.push(source);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int e = head_[v]; e != -1; e = edge_next_[e]) {
        if (edge_cap_[e] > 0 && level[edge_to_[e]] < 0) {
          level[edge_to_[e]] = level[v] + 1;
          q.push(edge_to_[e]);
        }
      }
    }
    return level[sink] >= 0;
  }

  // Walk one augmenting path along level-increasing edges. Iterative so path
  // length (which can approach the pixel count) never touches the call stack.
  bool augment(int source, int sink, const std::vector<int>& level, std::vector<int>& it) {
    std::vector<int> path;  // edge indices from source to the current node
    int v = source;
    for (;;) {
      if (v == sink) {
        for (int e : path) {
          --edge_cap_[e];
          ++edge_cap_[e ^ 1];
        }
        return true;
      }
      int e = it[v];
      while (e != -1 && !(edge_cap_[e] > 0 && level[edge_to_[e]] == level[v] + 1))
        e = edge_next_[e];
      it[v] = e;
      if (e == -1) {
        if (path.empty()) return false;
        int back = path.back();
        path.pop_back();
        v = edge_to_[back ^ 1];      // node the dead-end edge came from
        it[v] = edge_next_[back];    // never retry the edge that dead-ended
      } else {
        path.push_back(e);
        v = edge_to_[e];
      }
    }
  }

  std::vector<int> head_;
  std::vector<int> edge_to_;
  std::vector<int> edge_cap_;
  std::vector<int> edge_next_;
};

}  // namespace

int count_disjoint_crossings(const BinaryImage& img) {
  const int w = img.width, h = img.height;
  const int n = w * h;
  // Split every black pixel into in/out nodes joined by a unit edge so each
  // pixel serves at most one crossing (Menger: max vertex-disjoint paths).
  const int source = 2 * n, sink = 2 * n + 1;
  MaxFlow flow(2 * n + 2);
  auto in_node = [](int idx) { return 2 * idx; };
  auto out_node = [](int idx) { return 2 * idx + 1; };

  for (int idx = 0; idx < n; ++idx) {
    if (img.bits[idx] != 1) continue;
    flow.add_edge(in_node(idx), out_node(idx));
    int row = idx / w, col = idx % w;
    if (col == 0) flow.add_edge(source, in_node(idx));
    if (col == w - 1) flow.add_edge(out_node(idx), sink);
    if (col + 1 < w && img.bits[idx + 1] == 1) {
      flow.add_edge(out_node(idx), in_node(idx + 1));
      flow.add_edge(out_node(idx + 1), in_node(idx));
    }
    if (row + 1 < h && img.bits[idx + w] == 1) {
      flow.add_edge(out_node(idx), in_node(idx + w));
      flow.add_edge(out_node(idx + w), in_node(idx));
    }
  }
  return flow.run(source, sink);
}

void write_clusters_csv(std::ostream& out, const ClusterLabeling& labeling, bool with_pixels) {
  out << "label,size,min_row,min_col,max_row,max_col";
  if (with_pixels) out << ",pixels";
  out << '\n';
  for (const auto& c : labeling.clusters) {
    out << c.id << ',' << c.size << ',' << c.min_row << ',' << c.min_col << ',' << c.max_row
        << ',' << c.max_col;
    if (with_pixels) {
      out << ',';
      for (std::size_t i = 0; i < c.pixels.size(); ++i) {
        if (i) out << ';';
        out << c.pixels[i].first << ':' << c.pixels[i].second;
      }
    }
    out << '\n';
  }
}

}  // namespace pd
