#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>

#include "facloc/error.hpp"
#include "facloc/graph.hpp"
#include "facloc/lp.hpp"

using namespace facloc;

namespace {

// Flow polytope LP: maximise net outflow of the source.
double flow_lp_value(const FlowNetwork& net) {
  LpModel m;
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    double c = 0.0;
    if (net.arcs[a].tail == net.source) c -= 1.0;
    if (net.arcs[a].head == net.source) c += 1.0;
    m.add_variable("f" + std::to_string(a), 0.0, net.arcs[a].capacity, c);
  }
  for (int v = 0; v < net.num_nodes; ++v) {
    if (v == net.source || v == net.sink) continue;
    LpConstraint con;
    for (std::size_t a = 0; a < net.arcs.size(); ++a) {
      if (net.arcs[a].head == v) con.terms.emplace_back(static_cast<int>(a), 1.0);
      if (net.arcs[a].tail == v) con.terms.emplace_back(static_cast<int>(a), -1.0);
    }
    con.relation = Relation::Equal;
    m.add_constraint(con);
  }
  return -solve_lp(m).objective;
}

double brute_min_cut(const FlowNetwork& net) {
  std::vector<int> inner;
  for (int v = 0; v < net.num_nodes; ++v)
    if (v != net.source && v != net.sink) inner.push_back(v);
  double best = kInfinity;
  for (unsigned mask = 0; mask < (1u << inner.size()); ++mask) {
    std::vector<int> side{net.source};
    for (std::size_t b = 0; b < inner.size(); ++b)
      if (mask & (1u << b)) side.push_back(inner[b]);
    best = std::min(best, cut_capacity(net, side));
  }
  return best;
}

FlowNetwork random_network(std::mt19937& rng) {
  FlowNetwork net;
  net.num_nodes = 2 + static_cast<int>(rng() % 7);
  net.source = 0;
  net.sink = net.num_nodes - 1;
  const int arcs = static_cast<int>(rng() % 16);
  for (int a = 0; a < arcs; ++a) {
    const int t = static_cast<int>(rng() % net.num_nodes);
    const int h = static_cast<int>(rng() % net.num_nodes);
    if (t == h) continue;
    net.add_arc(t, h, static_cast<double>(rng() % 1000) / 100.0);
  }
  return net;
}

// Exhaustive capacitated assignment, penalties optional.
double brute_assignment(const Eigen::MatrixXd& cost, const std::vector<int>& open, const std::vector<int>& cap,
                        int n_clients, const std::vector<double>& penalty) {
  const int options = static_cast<int>(open.size()) + (penalty.empty() ? 0 : 1);
  if (options == 0) return kInfinity;
  std::vector<int> choice(n_clients, 0);
  double best = kInfinity;
  while (true) {
    std::vector<int> load(open.size(), 0);
    double total = 0.0;
    bool ok = true;
    for (int j = 0; j < n_clients && ok; ++j) {
      const int c = choice[j];
      if (c == static_cast<int>(open.size())) {
        total += penalty[j];
      } else {
        total += cost(open[c], j);
        ok = ++load[c] <= cap[open[c]];
      }
    }
    if (ok) best = std::min(best, total);
    int pos = 0;
    while (pos < n_clients && ++choice[pos] == options) choice[pos++] = 0;
    if (pos == n_clients) break;
  }
  return best;
}

Eigen::MatrixXd random_points_metric(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixX2d p(n, 2);
  for (int i = 0; i < n; ++i) p(i, 0) = u(rng), p(i, 1) = u(rng);
  Eigen::MatrixXd d(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) d(a, b) = (p.row(a) - p.row(b)).norm();
  return d;
}

// Enumerates every labeled tree through its Pruefer sequence.
double cayley_min_tree(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  if (n <= 1) return 0.0;
  if (n == 2) return w(0, 1);
  std::vector<int> seq(n - 2, 0);
  double best = kInfinity;
  while (true) {
    std::vector<int> degree(n, 1);
    for (int s : seq) ++degree[s];
    double total = 0.0;
    std::vector<int> deg = degree;
    for (int s : seq) {
      int leaf = 0;
      while (deg[leaf] != 1) ++leaf;
      total += w(leaf, s);
      --deg[leaf];
      --deg[s];
    }
    int u = -1, v = -1;
    for (int i = 0; i < n; ++i)
      if (deg[i] == 1) (u < 0 ? u : v) = i;
    total += w(u, v);
    best = std::min(best, total);
    int pos = 0;
    while (pos < n - 2 && ++seq[pos] == n) seq[pos++] = 0;
    if (pos == n - 2) break;
  }
  return best;
}

}  // namespace

TEST_CASE("max_flow basic cases") {
  FlowNetwork single;
  single.num_nodes = 2;
  single.source = 0;
  single.sink = 1;
  single.add_arc(0, 1, 5.0);
  auto r = max_flow(single);
  CHECK(r.value == doctest::Approx(5.0));
  CHECK(r.min_cut.source_side == std::vector<int>{0});
  CHECK(r.min_cut.value == doctest::Approx(5.0));

  FlowNetwork parallel = single;
  parallel.arcs.clear();
  parallel.add_arc(0, 1, 2.0);
  parallel.add_arc(0, 1, 3.0);
  r = max_flow(parallel);
  CHECK(r.value == doctest::Approx(5.0));
  CHECK(r.min_cut.value == doctest::Approx(5.0));

  FlowNetwork empty;
  empty.num_nodes = 2;
  empty.sink = 1;
  CHECK(max_flow(empty).value == 0.0);
}

TEST_CASE("max_flow agrees with the flow LP and exhaustive min cut") {
  std::mt19937 rng(20240);
  for (int trial = 0; trial < 20; ++trial) {
    const FlowNetwork net = random_network(rng);
    const MaxFlowResult r = max_flow(net);
    CHECK(r.value == doctest::Approx(r.min_cut.value).epsilon(0).scale(1).epsilon(1e-9));
    CHECK(std::abs(r.value - flow_lp_value(net)) <= 1e-7);
    CHECK(std::abs(r.value - brute_min_cut(net)) <= 1e-9);
    CHECK(std::find(r.min_cut.source_side.begin(), r.min_cut.source_side.end(), net.sink) ==
          r.min_cut.source_side.end());
  }
}

TEST_CASE("min_cost_assignment examples") {
  Eigen::MatrixXd cost(2, 2);
  cost << 1, 1, 5, 4;
  const std::vector<int> open0{0}, clients{0, 1};
  std::vector<int> cap{2, 2};
  auto r = min_cost_assignment({.cost = cost, .open = open0, .capacity = cap, .clients = clients});
  CHECK(r.service_cost == doctest::Approx(2.0));
  CHECK(r.facility_of == std::vector<int>{0, 0});

  // Both clients prefer facility 0 but each facility takes one client:
  // crossing patterns cost 1+4=5 and 5+1=6.
  cap = {1, 1};
  const std::vector<int> both{0, 1};
  r = min_cost_assignment({.cost = cost, .open = both, .capacity = cap, .clients = clients});
  CHECK(r.service_cost == doctest::Approx(std::min(1.0 + 4.0, 5.0 + 1.0)));
  CHECK(r.facility_of == std::vector<int>{0, 1});

  cap = {1, 0};
  try {
    min_cost_assignment({.cost = cost, .open = open0, .capacity = cap, .clients = clients});
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }
}

TEST_CASE("min_cost_assignment matches exhaustive enumeration") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const int nf = 1 + static_cast<int>(rng() % 4);
    const int nc = 1 + static_cast<int>(rng() % 5);
    Eigen::MatrixXd cost(nf, nc);
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nc; ++j) cost(i, j) = static_cast<double>(rng() % 100) / 10.0;
    std::vector<int> cap(nf), open, clients(nc);
    std::iota(clients.begin(), clients.end(), 0);
    for (int i = 0; i < nf; ++i) {
      cap[i] = 1 + static_cast<int>(rng() % 3);
      if (rng() % 4 != 0) open.push_back(i);
    }
    std::vector<double> penalty;
    if (trial % 2 == 1)
      for (int j = 0; j < nc; ++j) penalty.push_back(static_cast<double>(rng() % 80) / 10.0);

    const double expected = brute_assignment(cost, open, cap, nc, penalty);
    AssignmentProblem problem{.cost = cost, .open = open, .capacity = cap, .clients = clients, .penalty = penalty};
    if (!std::isfinite(expected)) {
      CHECK_THROWS_AS(min_cost_assignment(problem), Error);
      continue;
    }
    const AssignmentResult r = min_cost_assignment(problem);
    CHECK(std::abs(r.total() - expected) <= 1e-9);
    std::vector<int> load(nf, 0);
    for (int j = 0; j < nc; ++j) {
      const bool pen = std::binary_search(r.penalized.begin(), r.penalized.end(), j);
      CHECK((r.facility_of[j] >= 0) != pen);
      if (r.facility_of[j] >= 0) ++load[r.facility_of[j]];
    }
    for (int i = 0; i < nf; ++i) CHECK(load[i] <= cap[i]);
  }
}

TEST_CASE("min_cost_assignment equals the transportation LP optimum") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const int nf = 1 + static_cast<int>(rng() % 5);
    const int nc = 1 + static_cast<int>(rng() % 8);
    Eigen::MatrixXd cost(nf, nc);
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nc; ++j) cost(i, j) = static_cast<double>(rng() % 1000) / 100.0;
    std::vector<int> cap(nf), open(nf), clients(nc);
    std::iota(open.begin(), open.end(), 0);
    std::iota(clients.begin(), clients.end(), 0);
    int total = 0;
    for (int i = 0; i < nf; ++i) total += cap[i] = 1 + static_cast<int>(rng() % 4);
    if (total < nc) cap[0] += nc - total;

    LpModel lp;
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nc; ++j) lp.add_variable("t", 0.0, 1.0, cost(i, j));
    for (int j = 0; j < nc; ++j) {
      LpConstraint con{{}, Relation::Equal, 1.0, ""};
      for (int i = 0; i < nf; ++i) con.terms.emplace_back(i * nc + j, 1.0);
      lp.add_constraint(con);
    }
    for (int i = 0; i < nf; ++i) {
      LpConstraint con{{}, Relation::LessEqual, static_cast<double>(cap[i]), ""};
      for (int j = 0; j < nc; ++j) con.terms.emplace_back(i * nc + j, 1.0);
      lp.add_constraint(con);
    }
    const auto r = min_cost_assignment({.cost = cost, .open = open, .capacity = cap, .clients = clients});
    CHECK(std::abs(r.service_cost - solve_lp(lp).objective) <= 1e-7);
  }
}

TEST_CASE("bottleneck_assignment minimises the largest service cost") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int nf = 1 + static_cast<int>(rng() % 3);
    const int nc = 1 + static_cast<int>(rng() % 5);
    Eigen::MatrixXd cost(nf, nc);
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nc; ++j) cost(i, j) = static_cast<double>(rng() % 50);
    std::vector<int> cap(nf, (nc + nf - 1) / nf), open(nf), clients(nc);
    std::iota(open.begin(), open.end(), 0);
    std::iota(clients.begin(), clients.end(), 0);

    double best = kInfinity;
    std::vector<int> choice(nc, 0);
    while (true) {
      std::vector<int> load(nf, 0);
      double radius = 0.0;
      bool ok = true;
      for (int j = 0; j < nc; ++j) {
        ok = ok && ++load[choice[j]] <= cap[choice[j]];
        radius = std::max(radius, cost(choice[j], j));
      }
      if (ok) best = std::min(best, radius);
      int pos = 0;
      while (pos < nc && ++choice[pos] == nf) choice[pos++] = 0;
      if (pos == nc) break;
    }
    const auto [radius, assignment] =
        bottleneck_assignment({.cost = cost, .open = open, .capacity = cap, .clients = clients});
    CHECK(radius == best);
    for (int j = 0; j < nc; ++j) CHECK(cost(assignment.facility_of[j], j) <= radius);
  }
}

TEST_CASE("mst examples") {
  Eigen::MatrixXd w(3, 3);
  w << 0, 1, 3, 1, 0, 2, 3, 2, 0;
  const std::vector<int> one{0}, three{0, 1, 2};
  CHECK(mst(one, w).edges.empty());
  CHECK(mst(one, w).weight == 0.0);
  const TreeResult t = mst(three, w);
  CHECK(t.weight == doctest::Approx(3.0));
  CHECK(t.edges == EdgeSet{{0, 1}, {1, 2}});
}

TEST_CASE("mst weight equals the Cayley enumeration minimum and ignores labels") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 7);
    const Eigen::MatrixXd w = random_points_metric(rng, n);
    std::vector<int> nodes(n);
    std::iota(nodes.begin(), nodes.end(), 0);
    const TreeResult t = mst(nodes, w);
    CHECK(static_cast<int>(t.edges.size()) == std::max(n - 1, 0));
    CHECK(std::abs(t.weight - cayley_min_tree(w)) <= 1e-9);
    CHECK(is_connected(nodes, t.edges).connected);

    std::vector<int> perm = nodes;
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd relabeled(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) relabeled(perm[a], perm[b]) = w(a, b);
    CHECK(std::abs(mst(nodes, relabeled).weight - t.weight) <= 1e-9);
  }
}

TEST_CASE("is_connected examples") {
  const std::vector<int> one{0}, two{0, 1};
  CHECK(is_connected(one, {}).connected);
  const Connectivity apart = is_connected(two, {});
  CHECK_FALSE(apart.connected);
  CHECK(apart.components.size() == 2);
  // Open {0, 2} joined through Steiner node 1.
  const std::vector<int> open{0, 2};
  CHECK(is_connected(open, EdgeSet{{0, 1}, {1, 2}}).connected);
  CHECK_FALSE(is_connected(open, EdgeSet{{0, 1}, {3, 2}}).connected);
}

TEST_CASE("metric closure Steiner tree connects the terminals through paths") {
  Eigen::MatrixXd w(4, 4);
  w << 0, 1, 10, 10, 1, 0, 1, 10, 10, 1, 0, 10, 10, 10, 10, 0;
  const std::vector<int> terminals{0, 2};
  const TreeResult t = metric_closure_steiner(terminals, w);
  CHECK(t.edges == EdgeSet{{0, 1}, {1, 2}});
  CHECK(t.weight == doctest::Approx(2.0));
  CHECK(is_connected(terminals, t.edges).connected);

  const EdgeSet pruned = prune_to_terminals(EdgeSet{{0, 1}, {1, 2}, {2, 3}}, terminals);
  CHECK(pruned == EdgeSet{{0, 1}, {1, 2}});

  const Eigen::MatrixXd mm = minimax_distances(w);
  CHECK(mm(0, 2) == 1.0);
  CHECK(mm(0, 3) == 10.0);
}
