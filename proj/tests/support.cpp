#include "support.hpp"

#include <algorithm>
#include <numeric>

#include "facloc/graph.hpp"

namespace facloc::testing {

Solution random_feasible(const Instance& inst, const ProblemKind& kind, std::mt19937_64& rng) {
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  const int k = kind.has_cardinality() && inst.k ? std::min(*inst.k, nf) : nf;
  std::vector<int> cap(nf, nc);
  if (kind.capacitated)
    for (int i = 0; i < nf; ++i) cap[i] = *inst.facilities[i].capacity;

  std::vector<int> open;
  while (true) {
    std::vector<int> order(nf);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int size = 1 + static_cast<int>(rng() % k);
    open.assign(order.begin(), order.begin() + size);
    long long total = 0;
    for (int i : open) total += cap[i];
    if (kind.prize_collecting || total >= nc) break;
  }

  Solution sol = Solution::empty_for(inst);
  sol.open.insert(open.begin(), open.end());
  std::vector<int> clients(nc);
  std::iota(clients.begin(), clients.end(), 0);
  std::shuffle(clients.begin(), clients.end(), rng);
  std::vector<int> used(nf, 0);
  for (int j : clients) {
    if (kind.prize_collecting && rng() % 4 == 0) {
      sol.penalty_set.insert(j);
      continue;
    }
    std::vector<int> spare;
    for (int i : open)
      if (used[i] < cap[i]) spare.push_back(i);
    if (spare.empty()) {
      sol.penalty_set.insert(j);
      continue;
    }
    const int i = spare[rng() % spare.size()];
    sol.assignment[j] = i;
    ++used[i];
  }
  if (kind.connected) {
    std::vector<int> nodes(sol.open.begin(), sol.open.end());
    sol.steiner_edges = mst(nodes, inst.edge_cost).edges;
  }
  return sol;
}

}  // namespace facloc::testing
