#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "ionfab/arch_graph.hpp"
#include "ionfab/errors.hpp"
#include "ionfab/qec_codes.hpp"
#include "ionfab/rng.hpp"

namespace ionfab::qec {

int swaps_for_hops(int hops) { return 2 * std::max(0, hops - 1); }

namespace {

int manhattan(const Cell& a, const Cell& b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

void summarize(EmbeddingReport& report) {
  report.swap_count = 0;
  report.max_check_span = 0;
  double route_sum = 0.0;
  double span_sum = 0.0;
  for (const auto& c : report.checks) {
    report.swap_count += c.swaps;
    report.max_check_span = std::max(report.max_check_span, c.span);
    route_sum += c.route_length;
    span_sum += c.span;
  }
  if (!report.checks.empty()) {
    report.mean_route_length = route_sum / static_cast<double>(report.checks.size());
    report.mean_span = span_sum / static_cast<double>(report.checks.size());
  }
}

}  // namespace

std::vector<Cell> grid_placement(const QecGraph& code, GridPlacement placement, std::uint64_t seed) {
  const int n = code.node_count();
  if (placement == GridPlacement::kNative) {
    if (!code.layout) throw Error("code family '" + code.family + "' has no native layout");
    return *code.layout;
  }
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  std::vector<Cell> cells;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) cells.push_back({r, c});
  }
  if (placement == GridPlacement::kRandom) {
    Rng rng(seed, 0x67726964);  // "grid"
    rng.shuffle(cells);
  }
  cells.resize(static_cast<std::size_t>(n));
  return cells;
}

EmbeddingReport embed_with_cells(const QecGraph& code, const std::vector<Cell>& cells) {
  if (static_cast<int>(cells.size()) != code.node_count()) {
    throw Error("placement size differs from node count");
  }
  std::set<std::pair<int, int>> used;
  int extent = 0;
  for (const auto& c : cells) {
    if (c.row < 0 || c.col < 0) throw Error("negative grid cell");
    if (!used.insert({c.row, c.col}).second) throw Error("two nodes placed on one grid cell");
    extent = std::max({extent, c.row + 1, c.col + 1});
  }
  EmbeddingReport report;
  report.host = "grid";
  report.grid_side = extent;
  for (std::size_t ci = 0; ci < code.checks.size(); ++ci) {
    const Cell& anc = cells[static_cast<std::size_t>(code.n_data) + ci];
    CheckCost cost;
    cost.check = static_cast<int>(ci);
    for (int q : code.checks[ci].data) {
      const int hops = manhattan(anc, cells[static_cast<std::size_t>(q)]);
      cost.route_length += hops;
      cost.span = std::max(cost.span, hops);
      cost.swaps += swaps_for_hops(hops);
    }
    report.checks.push_back(cost);
  }
  summarize(report);
  return report;
}

EmbeddingReport embed_on_grid(const QecGraph& code, GridPlacement placement, std::uint64_t seed) {
  return embed_with_cells(code, grid_placement(code, placement, seed));
}

// ---------------------------------------------------------------------------
// modular host

int pairs_per_round(const QecGraph& code, const std::vector<int>& node_elu) {
  int pairs = 0;
  std::set<int> remote;
  for (std::size_t ci = 0; ci < code.checks.size(); ++ci) {
    const int home = node_elu[static_cast<std::size_t>(code.n_data) + ci];
    remote.clear();
    for (int q : code.checks[ci].data) {
      const int e = node_elu[static_cast<std::size_t>(q)];
      if (e != home) remote.insert(e);
    }
    pairs += static_cast<int>(remote.size());
  }
  return pairs;
}

namespace {

std::vector<std::vector<int>> tanner_adjacency(const QecGraph& code) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(code.node_count()));
  for (std::size_t ci = 0; ci < code.checks.size(); ++ci) {
    const int a = code.n_data + static_cast<int>(ci);
    for (int q : code.checks[ci].data) {
      adj[static_cast<std::size_t>(a)].push_back(q);
      adj[static_cast<std::size_t>(q)].push_back(a);
    }
  }
  return adj;
}

std::vector<int> capacities(const ArchitectureSpec& spec) {
  std::vector<int> cap;
  for (const auto& e : spec.elus) cap.push_back(e.n_ions);
  return cap;
}

std::vector<int> round_robin(const QecGraph& code, const std::vector<int>& cap) {
  const int n_elu = static_cast<int>(cap.size());
  std::vector<int> load(cap.size(), 0);
  std::vector<int> out;
  int next = 0;
  for (int node = 0; node < code.node_count(); ++node) {
    int tries = 0;
    while (load[static_cast<std::size_t>(next)] >= cap[static_cast<std::size_t>(next)]) {
      next = (next + 1) % n_elu;
      if (++tries > n_elu) throw Error("capacity exceeded");
    }
    out.push_back(next);
    ++load[static_cast<std::size_t>(next)];
    next = (next + 1) % n_elu;
  }
  return out;
}

// Grow clusters in breadth-first order, placing each node where most of its
// already-placed neighbours live, then improve with single-node moves and
// (for small codes) pairwise exchanges while the pair count drops.
std::vector<int> greedy_cut(const QecGraph& code, const std::vector<int>& cap) {
  const int n = code.node_count();
  const auto adj = tanner_adjacency(code);
  std::vector<int> order;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int s = 0; s < n; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    std::deque<int> queue{s};
    seen[static_cast<std::size_t>(s)] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      order.push_back(u);
      for (int v : adj[static_cast<std::size_t>(u)]) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          queue.push_back(v);
        }
      }
    }
  }

  const std::size_t n_elu = cap.size();
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  std::vector<int> load(n_elu, 0);
  std::vector<int> score(n_elu);
  for (int u : order) {
    std::fill(score.begin(), score.end(), 0);
    for (int v : adj[static_cast<std::size_t>(u)]) {
      const int e = assign[static_cast<std::size_t>(v)];
      if (e >= 0) ++score[static_cast<std::size_t>(e)];
    }
    int best = -1;
    for (std::size_t e = 0; e < n_elu; ++e) {
      if (load[e] >= cap[e]) continue;
      if (best < 0 || score[e] > score[static_cast<std::size_t>(best)]) best = static_cast<int>(e);
    }
    if (best < 0) throw Error("capacity exceeded");
    assign[static_cast<std::size_t>(u)] = best;
    ++load[static_cast<std::size_t>(best)];
  }

  int cost = pairs_per_round(code, assign);
  const bool try_swaps = n <= 64;
  for (int pass = 0; pass < 50 && cost > 0; ++pass) {
    bool improved = false;
    for (int u = 0; u < n; ++u) {
      const int from = assign[static_cast<std::size_t>(u)];
      for (std::size_t e = 0; e < n_elu; ++e) {
        if (static_cast<int>(e) == from || load[e] >= cap[e]) continue;
        assign[static_cast<std::size_t>(u)] = static_cast<int>(e);
        const int c = pairs_per_round(code, assign);
        if (c < cost) {
          cost = c;
          --load[static_cast<std::size_t>(from)];
          ++load[e];
          improved = true;
          break;
        }
        assign[static_cast<std::size_t>(u)] = from;
      }
    }
    if (try_swaps) {
      for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
          const int eu = assign[static_cast<std::size_t>(u)];
          const int ev = assign[static_cast<std::size_t>(v)];
          if (eu == ev) continue;
          std::swap(assign[static_cast<std::size_t>(u)], assign[static_cast<std::size_t>(v)]);
          const int c = pairs_per_round(code, assign);
          if (c < cost) {
            cost = c;
            improved = true;
          } else {
            std::swap(assign[static_cast<std::size_t>(u)], assign[static_cast<std::size_t>(v)]);
          }
        }
      }
    }
    if (!improved) break;
  }
  return assign;
}

}  // namespace

std::vector<int> partition_nodes(const QecGraph& code, const ArchitectureSpec& spec,
                                 Partition partition, const std::vector<std::string>& user_map) {
  const auto cap = capacities(spec);
  const int total = std::accumulate(cap.begin(), cap.end(), 0);
  if (code.node_count() > total) {
    throw Error("capacity exceeded: " + std::to_string(code.node_count()) + " nodes, " +
                std::to_string(total) + " ions");
  }
  switch (partition) {
    case Partition::kRoundRobin:
      return round_robin(code, cap);
    case Partition::kGreedyCut:
      return greedy_cut(code, cap);
    case Partition::kUserMap: {
      if (static_cast<int>(user_map.size()) != code.node_count()) {
        throw Error("user map must name an ELU for every node");
      }
      std::vector<int> out;
      std::vector<int> load(cap.size(), 0);
      for (const auto& id : user_map) {
        const int e = spec.elu_index(id);
        if (e < 0) throw Error("unknown ELU '" + id + "' in user map");
        if (++load[static_cast<std::size_t>(e)] > cap[static_cast<std::size_t>(e)]) {
          throw Error("capacity exceeded in ELU '" + id + "'");
        }
        out.push_back(e);
      }
      return out;
    }
  }
  throw Error("unknown partition strategy");
}

EmbeddingReport embed_with_partition(const QecGraph& code, const ArchitectureSpec& spec,
                                     const std::vector<int>& node_elu) {
  if (static_cast<int>(node_elu.size()) != code.node_count()) {
    throw Error("partition size differs from node count");
  }
  const auto graph = build_interaction_graph(spec);
  const auto adj = graph.adjacency(TierSet::kCollective);

  // Ions are taken in chain order within each ELU.
  std::vector<int> next_pos(spec.elus.size(), 0);
  std::vector<int> ion(node_elu.size());
  for (std::size_t i = 0; i < node_elu.size(); ++i) {
    const int e = node_elu[i];
    if (e < 0 || e >= static_cast<int>(spec.elus.size())) throw Error("partition names unknown ELU");
    int& pos = next_pos[static_cast<std::size_t>(e)];
    if (pos >= spec.elus[static_cast<std::size_t>(e)].n_ions) throw Error("capacity exceeded");
    ion[i] = graph.node_index(e, pos++);
  }

  EmbeddingReport report;
  report.host = "modular";
  std::set<int> remote;
  std::vector<int> dist(static_cast<std::size_t>(graph.node_count()));
  for (std::size_t ci = 0; ci < code.checks.size(); ++ci) {
    const std::size_t anc = static_cast<std::size_t>(code.n_data) + ci;
    const int home = node_elu[anc];

    std::fill(dist.begin(), dist.end(), -1);
    std::deque<int> queue{ion[anc]};
    dist[static_cast<std::size_t>(ion[anc])] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }

    CheckCost cost;
    cost.check = static_cast<int>(ci);
    remote.clear();
    for (int q : code.checks[ci].data) {
      const int e = node_elu[static_cast<std::size_t>(q)];
      if (e == home) {
        const int hops = dist[static_cast<std::size_t>(ion[static_cast<std::size_t>(q)])];
        cost.route_length += hops;
        cost.span = std::max(cost.span, hops);
        report.max_intra_route_length = std::max(report.max_intra_route_length, hops);
      } else {
        // A teleported interaction counts as one hop.
        cost.route_length += 1;
        cost.span = std::max(cost.span, 1);
        remote.insert(e);
      }
    }
    cost.remote_elus = static_cast<int>(remote.size());
    report.pairs_per_round += cost.remote_elus;
    report.checks.push_back(cost);
  }
  summarize(report);
  report.nodes_per_elu.assign(spec.elus.size(), 0);
  for (int e : node_elu) {
    report.node_elu.push_back(spec.elus[static_cast<std::size_t>(e)].id);
    ++report.nodes_per_elu[static_cast<std::size_t>(e)];
  }
  return report;
}

EmbeddingReport embed_on_modular(const QecGraph& code, const ArchitectureSpec& spec,
                                 Partition partition, const std::vector<std::string>& user_map) {
  return embed_with_partition(code, spec, partition_nodes(code, spec, partition, user_map));
}

nlohmann::json to_json(const EmbeddingReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json row = {{"check", c.check}, {"route_length", c.route_length},
                          {"span", c.span}, {"swaps", c.swaps}};
    if (r.host == "modular") row["remote_elus"] = c.remote_elus;
    checks.push_back(row);
  }
  nlohmann::json doc = {{"host", r.host},
                        {"checks", checks},
                        {"swap_count", r.swap_count},
                        {"max_check_span", r.max_check_span},
                        {"mean_route_length", r.mean_route_length},
                        {"mean_span", r.mean_span}};
  if (r.host == "grid") {
    doc["grid_side"] = r.grid_side;
  } else {
    doc["pairs_per_round"] = r.pairs_per_round;
    doc["max_intra_route_length"] = r.max_intra_route_length;
    doc["node_elu"] = r.node_elu;
    doc["nodes_per_elu"] = r.nodes_per_elu;
  }
  return doc;
}

}  // namespace ionfab::qec
