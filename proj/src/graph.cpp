#include "facloc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "facloc/error.hpp"

namespace facloc {

namespace {

constexpr double kResidualEps = 1e-12;

// Residual view of a network: arc 2a is the forward copy of arc a, 2a+1 its
// reverse.
struct Residual {
  std::vector<std::vector<int>> out;
  std::vector<int> to;
  std::vector<double> cap;
  std::vector<double> cost;

  explicit Residual(const FlowNetwork& net) : out(net.num_nodes) {
    const auto m = net.arcs.size();
    to.resize(2 * m);
    cap.resize(2 * m);
    cost.resize(2 * m);
    for (std::size_t a = 0; a < m; ++a) {
      const Arc& arc = net.arcs[a];
      if (arc.tail < 0 || arc.tail >= net.num_nodes || arc.head < 0 || arc.head >= net.num_nodes)
        throw Error(ErrorCode::DimensionMismatch, "arc endpoint out of range");
      to[2 * a] = arc.head;
      cap[2 * a] = std::max(arc.capacity, 0.0);
      cost[2 * a] = arc.cost;
      to[2 * a + 1] = arc.tail;
      cap[2 * a + 1] = 0.0;
      cost[2 * a + 1] = -arc.cost;
      out[arc.tail].push_back(static_cast<int>(2 * a));
      out[arc.head].push_back(static_cast<int>(2 * a + 1));
    }
  }

  void push(int r, double amount) {
    cap[r] -= amount;
    cap[r ^ 1] += amount;
  }

  std::vector<double> arc_flows() const {
    std::vector<double> flow(to.size() / 2);
    for (std::size_t a = 0; a < flow.size(); ++a) flow[a] = cap[2 * a + 1];
    return flow;
  }
};

}  // namespace

double cut_capacity(const FlowNetwork& net, std::span<const int> source_side) {
  std::vector<char> in_s(net.num_nodes, 0);
  for (int v : source_side) in_s[v] = 1;
  double value = 0.0;
  for (const Arc& arc : net.arcs)
    if (in_s[arc.tail] && !in_s[arc.head]) value += arc.capacity;
  return value;
}

MaxFlowResult max_flow(const FlowNetwork& net) {
  Residual res(net);
  MaxFlowResult result;
  const int n = net.num_nodes;
  std::vector<int> parent_arc(n);

  while (true) {
    std::fill(parent_arc.begin(), parent_arc.end(), -1);
    std::deque<int> queue{net.source};
    std::vector<char> seen(n, 0);
    seen[net.source] = 1;
    while (!queue.empty() && !seen[net.sink]) {
      const int u = queue.front();
      queue.pop_front();
      for (int r : res.out[u]) {
        const int w = res.to[r];
        if (!seen[w] && res.cap[r] > kResidualEps) {
          seen[w] = 1;
          parent_arc[w] = r;
          queue.push_back(w);
        }
      }
    }
    if (!seen[net.sink]) break;
    double bottleneck = kInfinity;
    for (int v = net.sink; v != net.source; v = res.to[parent_arc[v] ^ 1])
      bottleneck = std::min(bottleneck, res.cap[parent_arc[v]]);
    for (int v = net.sink; v != net.source; v = res.to[parent_arc[v] ^ 1]) res.push(parent_arc[v], bottleneck);
    result.value += bottleneck;
  }

  std::vector<char> reach(n, 0);
  std::deque<int> queue{net.source};
  reach[net.source] = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int r : res.out[u]) {
      const int w = res.to[r];
      if (!reach[w] && res.cap[r] > kResidualEps) {
        reach[w] = 1;
        queue.push_back(w);
      }
    }
  }
  for (int v = 0; v < n; ++v)
    if (reach[v]) result.min_cut.source_side.push_back(v);
  result.min_cut.value = cut_capacity(net, result.min_cut.source_side);
  result.arc_flow = res.arc_flows();
  return result;
}

MinCostFlowResult min_cost_flow(const FlowNetwork& net, double demand) {
  Residual res(net);
  MinCostFlowResult result;
  const int n = net.num_nodes;
  std::vector<double> dist(n);
  std::vector<int> parent_arc(n);
  std::vector<char> queued(n);

  while (result.value < demand - kResidualEps) {
    // Bellman-Ford queue variant; residual costs may be negative.
    std::fill(dist.begin(), dist.end(), kInfinity);
    std::fill(parent_arc.begin(), parent_arc.end(), -1);
    std::fill(queued.begin(), queued.end(), 0);
    dist[net.source] = 0.0;
    std::deque<int> queue{net.source};
    queued[net.source] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      queued[u] = 0;
      for (int r : res.out[u]) {
        if (res.cap[r] <= kResidualEps) continue;
        const int w = res.to[r];
        const double nd = dist[u] + res.cost[r];
        if (nd < dist[w] - 1e-12) {
          dist[w] = nd;
          parent_arc[w] = r;
          if (!queued[w]) {
            queued[w] = 1;
            queue.push_back(w);
          }
        }
      }
    }
    if (parent_arc[net.sink] < 0) break;
    double amount = demand - result.value;
    for (int v = net.sink; v != net.source; v = res.to[parent_arc[v] ^ 1])
      amount = std::min(amount, res.cap[parent_arc[v]]);
    for (int v = net.sink; v != net.source; v = res.to[parent_arc[v] ^ 1]) res.push(parent_arc[v], amount);
    result.value += amount;
    result.cost += amount * dist[net.sink];
  }
  result.arc_flow = res.arc_flows();
  return result;
}

AssignmentResult min_cost_assignment(const AssignmentProblem& p) {
  const int n_open = static_cast<int>(p.open.size());
  const int n_cli = static_cast<int>(p.clients.size());
  const bool with_penalty = !p.penalty.empty();

  AssignmentResult result;
  result.facility_of.assign(p.cost.cols(), -1);
  if (n_cli == 0) return result;

  // source, clients, open facilities, sink
  FlowNetwork net;
  net.num_nodes = n_cli + n_open + 2;
  net.source = 0;
  net.sink = net.num_nodes - 1;
  const auto client_node = [](int c) { return 1 + c; };
  const auto facility_node = [n_cli](int f) { return 1 + n_cli + f; };

  struct ServiceArc {
    int arc, client, facility;
  };
  std::vector<ServiceArc> service;
  std::vector<int> penalty_arc(n_cli, -1);
  for (int c = 0; c < n_cli; ++c) {
    net.add_arc(net.source, client_node(c), 1.0);
    const int j = p.clients[c];
    for (int f = 0; f < n_open; ++f) {
      const int i = p.open[f];
      const double cost = p.cost(i, j);
      if (cost > p.max_cost) continue;
      service.push_back({net.add_arc(client_node(c), facility_node(f), 1.0, cost), j, i});
    }
    if (with_penalty) penalty_arc[c] = net.add_arc(client_node(c), net.sink, 1.0, p.penalty[j]);
  }
  for (int f = 0; f < n_open; ++f)
    net.add_arc(facility_node(f), net.sink, static_cast<double>(std::max(p.capacity[p.open[f]], 0)));

  const MinCostFlowResult flow = min_cost_flow(net, n_cli);
  if (flow.value < n_cli - 0.5)
    throw Error(ErrorCode::Infeasible, "open facilities cannot serve all " + std::to_string(n_cli) + " clients");

  for (const ServiceArc& s : service)
    if (flow.arc_flow[s.arc] > 0.5) {
      result.facility_of[s.client] = s.facility;
      result.service_cost += p.cost(s.facility, s.client);
    }
  for (int c = 0; c < n_cli; ++c)
    if (with_penalty && flow.arc_flow[penalty_arc[c]] > 0.5) {
      result.penalized.push_back(p.clients[c]);
      result.penalty_cost += p.penalty[p.clients[c]];
    }
  std::sort(result.penalized.begin(), result.penalized.end());
  return result;
}

std::pair<double, AssignmentResult> bottleneck_assignment(const AssignmentProblem& p) {
  if (p.clients.empty()) return {0.0, min_cost_assignment(p)};
  if (p.open.empty()) throw Error(ErrorCode::Infeasible, "no open facility");
  std::vector<double> radii;
  for (int i : p.open)
    for (int j : p.clients) radii.push_back(p.cost(i, j));
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  const int n_open = static_cast<int>(p.open.size());
  const int n_cli = static_cast<int>(p.clients.size());
  const auto feasible = [&](double r) {
    FlowNetwork net;
    net.num_nodes = n_cli + n_open + 2;
    net.source = 0;
    net.sink = net.num_nodes - 1;
    for (int c = 0; c < n_cli; ++c) {
      net.add_arc(0, 1 + c, 1.0);
      for (int f = 0; f < n_open; ++f)
        if (p.cost(p.open[f], p.clients[c]) <= r) net.add_arc(1 + c, 1 + n_cli + f, 1.0);
    }
    for (int f = 0; f < n_open; ++f)
      net.add_arc(1 + n_cli + f, net.sink, static_cast<double>(std::max(p.capacity[p.open[f]], 0)));
    return max_flow(net).value > n_cli - 0.5;
  };

  if (!feasible(radii.back()))
    throw Error(ErrorCode::Infeasible, "open facilities cannot serve all clients");
  std::size_t lo = 0, hi = radii.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible(radii[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  AssignmentProblem restricted = p;
  restricted.max_cost = radii[lo];
  restricted.penalty = {};
  return {radii[lo], min_cost_assignment(restricted)};
}

TreeResult mst(std::span<const int> nodes, const Eigen::MatrixXd& weights) {
  TreeResult tree;
  const std::size_t n = nodes.size();
  if (n <= 1) return tree;
  std::vector<char> in_tree(n, 0);
  std::vector<double> key(n, kInfinity);
  std::vector<std::size_t> parent(n, 0);
  key[0] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t a = 0; a < n; ++a)
      if (!in_tree[a] && (best == n || key[a] < key[best])) best = a;
    in_tree[best] = 1;
    if (step > 0) {
      tree.edges.insert(make_edge(nodes[best], nodes[parent[best]]));
      tree.weight += key[best];
    }
    for (std::size_t a = 0; a < n; ++a) {
      const double w = weights(nodes[best], nodes[a]);
      if (!in_tree[a] && w < key[a]) {
        key[a] = w;
        parent[a] = best;
      }
    }
  }
  return tree;
}

Connectivity is_connected(std::span<const int> nodes, const EdgeSet& edges) {
  std::map<int, int> parent;
  const auto find = [&parent](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (int v : nodes) parent.emplace(v, v);
  for (const auto& [a, b] : edges) {
    parent.emplace(a, a);
    parent.emplace(b, b);
  }
  for (const auto& [a, b] : edges) {
    const int ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  Connectivity result;
  std::map<int, std::vector<int>> groups;
  for (const auto& entry : parent) groups[find(entry.first)].push_back(entry.first);
  for (auto& [root, members] : groups) result.components.push_back(std::move(members));
  if (!nodes.empty()) {
    const int root = find(nodes.front());
    result.connected = std::all_of(nodes.begin(), nodes.end(), [&](int v) { return find(v) == root; });
  }
  return result;
}

std::vector<int> ShortestPaths::path(int from, int to) const {
  std::vector<int> p{from};
  if (from == to) return p;
  if (next(from, to) < 0) return {};
  for (int v = from; v != to;) {
    v = next(v, to);
    p.push_back(v);
  }
  return p;
}

ShortestPaths all_pairs_shortest_paths(const Eigen::MatrixXd& weights) {
  const Eigen::Index n = weights.rows();
  ShortestPaths sp{weights, Eigen::MatrixXi::Constant(n, n, -1)};
  for (Eigen::Index a = 0; a < n; ++a) {
    sp.dist(a, a) = 0.0;
    for (Eigen::Index b = 0; b < n; ++b)
      if (a != b && std::isfinite(weights(a, b))) sp.next(a, b) = static_cast<int>(b);
  }
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) {
        const double via = sp.dist(a, m) + sp.dist(m, b);
        if (via < sp.dist(a, b) - 1e-12) {
          sp.dist(a, b) = via;
          sp.next(a, b) = sp.next(a, m);
        }
      }
  return sp;
}

TreeResult metric_closure_steiner(std::span<const int> terminals, const Eigen::MatrixXd& weights) {
  TreeResult tree;
  if (terminals.size() <= 1) return tree;
  const ShortestPaths sp = all_pairs_shortest_paths(weights);
  const TreeResult closure = mst(terminals, sp.dist);
  for (const auto& [a, b] : closure.edges) {
    const std::vector<int> p = sp.path(a, b);
    for (std::size_t s = 0; s + 1 < p.size(); ++s) tree.edges.insert(make_edge(p[s], p[s + 1]));
  }
  for (const auto& [a, b] : tree.edges) tree.weight += weights(a, b);
  return tree;
}

Eigen::MatrixXd minimax_distances(const Eigen::MatrixXd& weights) {
  Eigen::MatrixXd m = weights;
  const Eigen::Index n = m.rows();
  for (Eigen::Index a = 0; a < n; ++a) m(a, a) = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) m(a, b) = std::min(m(a, b), std::max(m(a, k), m(k, b)));
  return m;
}

EdgeSet prune_to_terminals(EdgeSet edges, std::span<const int> terminals) {
  const std::set<int> keep(terminals.begin(), terminals.end());
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<int, int> degree;
    for (const auto& [a, b] : edges) {
      ++degree[a];
      ++degree[b];
    }
    for (auto it = edges.begin(); it != edges.end();) {
      const bool leaf_a = degree[it->first] == 1 && !keep.count(it->first);
      const bool leaf_b = degree[it->second] == 1 && !keep.count(it->second);
      if (leaf_a || leaf_b) {
        it = edges.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  return edges;
}

}  // namespace facloc
