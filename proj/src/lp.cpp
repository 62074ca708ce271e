#include "facloc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "facloc/error.hpp"

namespace facloc {

int LpModel::add_variable(std::string name, double lower, double upper, double cost) {
  variables.push_back({std::move(name), lower, upper});
  objective.push_back(cost);
  return num_variables() - 1;
}

void LpModel::validate() const {
  if (objective.size() != variables.size())
    throw Error(ErrorCode::DimensionMismatch, "objective length differs from variable count");
  for (const auto& v : variables)
    if (!(v.lower <= v.upper)) throw Error(ErrorCode::InvalidConfig, "variable '" + v.name + "' has lower > upper");
  for (const auto& c : constraints)
    for (const auto& [idx, coef] : c.terms)
      if (idx < 0 || idx >= num_variables())
        throw Error(ErrorCode::DimensionMismatch, "constraint '" + c.name + "' references unknown variable");
}

LpSolution solve_lp(const LpModel& model) {
  model.validate();
  const auto n = static_cast<Eigen::Index>(model.variables.size());
  const auto m = static_cast<Eigen::Index>(model.constraints.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd b(m), c(n), lower(n), upper(n);
  std::vector<Relation> rel(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& con = model.constraints[i];
    for (const auto& [idx, coef] : con.terms) A(i, idx) += coef;
    b(i) = con.rhs;
    rel[i] = con.relation;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    c(j) = model.objective[j];
    lower(j) = model.variables[j].lower;
    upper(j) = model.variables[j].upper;
  }
  const auto result = simplex::minimize<double>(A, b, rel, c, lower, upper);
  switch (result.status) {
    case simplex::Status::Infeasible: throw Error(ErrorCode::Infeasible, "LP has no feasible point");
    case simplex::Status::Unbounded: throw Error(ErrorCode::Unbounded, "LP objective is unbounded below");
    case simplex::Status::IterationLimit: throw Error(ErrorCode::IterationLimit, "simplex iteration limit");
    case simplex::Status::Optimal: break;
  }
  LpSolution sol;
  sol.x.assign(result.x.data(), result.x.data() + n);
  sol.objective = result.objective;
  sol.iterations = result.iterations;
  return sol;
}

namespace {

void write_terms(std::ostream& out, const std::vector<std::pair<int, double>>& terms, const LpModel& model) {
  bool first = true;
  for (const auto& [idx, coef] : terms) {
    if (coef == 0.0) continue;
    out << (coef < 0 ? (first ? "-" : " - ") : (first ? "" : " + ")) << std::abs(coef) << ' '
        << model.variables[idx].name;
    first = false;
  }
  if (first) out << "0 " << (model.variables.empty() ? "dummy" : model.variables.front().name);
}

}  // namespace

void write_lp_format(const LpModel& model, std::ostream& out) {
  model.validate();
  out.precision(17);
  out << "\\ facility location relaxation\nMinimize\n obj: ";
  std::vector<std::pair<int, double>> obj;
  for (int j = 0; j < model.num_variables(); ++j) obj.emplace_back(j, model.objective[j]);
  write_terms(out, obj, model);
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < model.constraints.size(); ++i) {
    const auto& con = model.constraints[i];
    out << ' ' << (con.name.empty() ? "c" + std::to_string(i) : con.name) << ": ";
    write_terms(out, con.terms, model);
    switch (con.relation) {
      case Relation::LessEqual: out << " <= "; break;
      case Relation::Equal: out << " = "; break;
      case Relation::GreaterEqual: out << " >= "; break;
    }
    out << con.rhs << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : model.variables) {
    out << ' ';
    if (std::isinf(v.lower)) out << "-inf";
    else out << v.lower;
    out << " <= " << v.name << " <= ";
    if (std::isinf(v.upper)) out << "+inf";
    else out << v.upper;
    out << '\n';
  }
  out << "End\n";
}

// ---------------------------------------------------------------------------
// Facility-location models

int FlLpLayout::edge_index(int a, int b) const {
  const Edge e = make_edge(a, b);
  const auto it = std::lower_bound(edges.begin(), edges.end(), e);
  return it != edges.end() && *it == e ? static_cast<int>(it - edges.begin()) : -1;
}

namespace {

ConnectedLp build_connected(const Instance& inst, std::vector<int> clients, int root, bool with_z) {
  const int nf = inst.num_facilities();
  if (root < 0 || root >= nf) throw Error(ErrorCode::UnknownFacility, "root " + std::to_string(root));
  std::sort(clients.begin(), clients.end());
  clients.erase(std::unique(clients.begin(), clients.end()), clients.end());
  for (int j : clients) {
    if (j < 0 || j >= inst.num_clients()) throw Error(ErrorCode::UnknownId, "client " + std::to_string(j));
    if (with_z && !inst.clients[j].penalty)
      throw Error(ErrorCode::MissingPenalty, "client '" + inst.clients[j].id + "' has no penalty");
  }

  ConnectedLp lp;
  FlLpLayout& L = lp.layout;
  L.num_facilities = nf;
  L.num_clients = inst.num_clients();
  L.clients = std::move(clients);
  L.has_z = with_z;
  L.root = root;
  for (int a = 0; a < nf; ++a)
    for (int b = a + 1; b < nf; ++b) L.edges.emplace_back(a, b);

  LpModel& M = lp.model;
  const int nc = static_cast<int>(L.clients.size());
  for (int i = 0; i < nf; ++i) M.add_variable("w_" + std::to_string(i), 0.0, 1.0, inst.open_cost(i));
  for (int p = 0; p < nc; ++p)
    for (int i = 0; i < nf; ++i)
      M.add_variable("x_" + std::to_string(i) + "_" + std::to_string(L.clients[p]), 0.0, 1.0,
                     inst.d(i, L.clients[p]));
  for (const auto& [a, b] : L.edges)
    M.add_variable("y_" + std::to_string(a) + "_" + std::to_string(b), 0.0, 1.0,
                   inst.connection_scale * inst.edge_cost(a, b));
  if (with_z)
    for (int p = 0; p < nc; ++p)
      M.add_variable("z_" + std::to_string(L.clients[p]), 0.0, 1.0, inst.penalty(L.clients[p]));

  // Every modeled client is served, or pays its penalty when z exists.
  for (int p = 0; p < nc; ++p) {
    LpConstraint con;
    con.name = "assign_" + std::to_string(L.clients[p]);
    for (int i = 0; i < nf; ++i) con.terms.emplace_back(L.x(i, p), 1.0);
    if (with_z) con.terms.emplace_back(L.z(p), 1.0);
    con.relation = Relation::Equal;
    con.rhs = 1.0;
    M.add_constraint(std::move(con));
  }
  for (int p = 0; p < nc; ++p)
    for (int i = 0; i < nf; ++i)
      M.add_constraint({{{L.x(i, p), 1.0}, {L.w(i), -1.0}},
                        Relation::LessEqual,
                        0.0,
                        "open_" + std::to_string(i) + "_" + std::to_string(L.clients[p])});
  M.add_constraint({{{L.w(root), 1.0}}, Relation::Equal, 1.0, "root"});

  M.lazy = [layout = L](std::span<const double> values) {
    const FractionalSolution frac = to_fractional(layout, values, 0.0);
    std::vector<LpConstraint> out;
    for (const ConnectivityCut& cut : separation_sweep(frac, frac.clients)) out.push_back(to_constraint(layout, cut));
    return out;
  };
  return lp;
}

}  // namespace

ConnectedLp build_conpfl_lp(const Instance& inst, int root) {
  std::vector<int> all(inst.num_clients());
  for (int j = 0; j < inst.num_clients(); ++j) all[j] = j;
  return build_connected(inst, std::move(all), root, true);
}

ConnectedLp build_confl_lp(const Instance& inst, std::span<const int> residual_clients, int root) {
  return build_connected(inst, std::vector<int>(residual_clients.begin(), residual_clients.end()), root, false);
}

FractionalSolution to_fractional(const FlLpLayout& L, std::span<const double> values, double objective) {
  const int nf = L.num_facilities;
  FractionalSolution f;
  f.w = Eigen::VectorXd::Zero(nf);
  f.x = Eigen::MatrixXd::Zero(nf, L.num_clients);
  f.y = Eigen::MatrixXd::Zero(nf, nf);
  f.clients = L.clients;
  f.root = L.root;
  f.objective = objective;
  for (int i = 0; i < nf; ++i) f.w(i) = values[L.w(i)];
  for (std::size_t p = 0; p < L.clients.size(); ++p)
    for (int i = 0; i < nf; ++i) f.x(i, L.clients[p]) = values[L.x(i, static_cast<int>(p))];
  for (std::size_t e = 0; e < L.edges.size(); ++e) {
    const auto& [a, b] = L.edges[e];
    f.y(a, b) = f.y(b, a) = values[L.y(static_cast<int>(e))];
  }
  if (L.has_z) {
    f.z = Eigen::VectorXd::Zero(L.num_clients);
    for (std::size_t p = 0; p < L.clients.size(); ++p) f.z(L.clients[p]) = values[L.z(static_cast<int>(p))];
  }
  return f;
}

std::vector<double> to_variables(const FlLpLayout& L, const FractionalSolution& f) {
  const int nc = static_cast<int>(L.clients.size());
  std::vector<double> v(L.z(0) + (L.has_z ? nc : 0), 0.0);
  for (int i = 0; i < L.num_facilities; ++i) v[L.w(i)] = f.w(i);
  for (int p = 0; p < nc; ++p)
    for (int i = 0; i < L.num_facilities; ++i) v[L.x(i, p)] = f.x(i, L.clients[p]);
  for (std::size_t e = 0; e < L.edges.size(); ++e) v[L.y(static_cast<int>(e))] = f.y(L.edges[e].first, L.edges[e].second);
  if (L.has_z)
    for (int p = 0; p < nc; ++p) v[L.z(p)] = f.has_z() ? f.z(L.clients[p]) : 0.0;
  return v;
}

FractionalCost fractional_cost(const Instance& inst, const FractionalSolution& frac, std::span<const int> clients) {
  FractionalCost cost;
  const int nf = inst.num_facilities();
  for (int i = 0; i < nf; ++i) cost.facility += inst.open_cost(i) * frac.w(i);
  for (int j : clients) {
    for (int i = 0; i < nf; ++i) cost.service += inst.d(i, j) * frac.x(i, j);
    if (frac.has_z()) cost.penalty += inst.penalty(j) * frac.z(j);
  }
  for (int a = 0; a < nf; ++a)
    for (int b = a + 1; b < nf; ++b) cost.connection += inst.edge_cost(a, b) * frac.y(a, b);
  cost.connection *= inst.connection_scale;
  return cost;
}

// ---------------------------------------------------------------------------
// Separation

std::vector<ConnectivityCut> separate_cuts(int nf, const Eigen::Ref<const Eigen::VectorXd>& x_col,
                                           const Eigen::MatrixXd& y, int root, int client, double tolerance) {
  FlowNetwork net;
  net.num_nodes = nf + 1;
  net.source = nf;
  net.sink = root;
  double demand = 0.0;
  for (int i = 0; i < nf; ++i) {
    if (x_col(i) <= 0.0) continue;
    net.add_arc(net.source, i, x_col(i));
    demand += x_col(i);
  }
  for (int a = 0; a < nf; ++a)
    for (int b = a + 1; b < nf; ++b)
      if (y(a, b) > 0.0) net.add_undirected(a, b, y(a, b));

  const MaxFlowResult flow = max_flow(net);
  if (flow.value >= demand - tolerance) return {};
  ConnectivityCut cut;
  cut.client = client;
  for (int v : flow.min_cut.source_side)
    if (v != net.source) cut.facilities.push_back(v);
  double lhs = 0.0, rhs = 0.0;
  std::vector<char> in_s(nf, 0);
  for (int i : cut.facilities) in_s[i] = 1, lhs += x_col(i);
  for (int a = 0; a < nf; ++a)
    for (int b = a + 1; b < nf; ++b)
      if (in_s[a] != in_s[b]) rhs += y(a, b);
  cut.violation = lhs - rhs;
  if (cut.facilities.empty() || cut.violation <= tolerance) return {};
  return {cut};
}

std::vector<ConnectivityCut> separate_cuts(const Instance& inst, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                           int root, int client, double tolerance) {
  return separate_cuts(inst.num_facilities(), x.col(client), y, root, client, tolerance);
}

std::vector<ConnectivityCut> separation_sweep(const FractionalSolution& frac, std::span<const int> clients,
                                              double tolerance) {
  std::vector<ConnectivityCut> cuts;
  const int nf = static_cast<int>(frac.w.size());
  for (int j : clients)
    for (auto& cut : separate_cuts(nf, frac.x.col(j), frac.y, frac.root, j, tolerance)) cuts.push_back(std::move(cut));
  return cuts;
}

LpConstraint to_constraint(const FlLpLayout& L, const ConnectivityCut& cut) {
  const auto pos_it = std::lower_bound(L.clients.begin(), L.clients.end(), cut.client);
  if (pos_it == L.clients.end() || *pos_it != cut.client)
    throw Error(ErrorCode::UnknownId, "cut for unmodeled client " + std::to_string(cut.client));
  const int pos = static_cast<int>(pos_it - L.clients.begin());
  std::vector<char> in_s(L.num_facilities, 0);
  LpConstraint con;
  con.name = "conn_" + std::to_string(cut.client);
  for (int i : cut.facilities) {
    in_s[i] = 1;
    con.name += "_" + std::to_string(i);
    con.terms.emplace_back(L.x(i, pos), 1.0);
  }
  for (std::size_t e = 0; e < L.edges.size(); ++e)
    if (in_s[L.edges[e].first] != in_s[L.edges[e].second]) con.terms.emplace_back(L.y(static_cast<int>(e)), -1.0);
  con.relation = Relation::LessEqual;
  con.rhs = 0.0;
  return con;
}

void add_all_connectivity_cuts(ConnectedLp& lp) {
  const FlLpLayout& L = lp.layout;
  const int nf = L.num_facilities;
  for (int j : L.clients)
    for (unsigned mask = 1; mask < (1u << nf); ++mask) {
      if (mask & (1u << L.root)) continue;
      ConnectivityCut cut;
      cut.client = j;
      for (int i = 0; i < nf; ++i)
        if (mask & (1u << i)) cut.facilities.push_back(i);
      lp.model.add_constraint(to_constraint(L, cut));
    }
}

FractionalSolution solve_with_cuts(const ConnectedLp& lp, CutPool* pool, const CuttingPlaneOptions& options,
                                   CuttingPlaneStats* stats) {
  CuttingPlaneStats local;
  CuttingPlaneStats& st = stats ? *stats : local;
  st = {};
  LpModel model = lp.model;
  const FlLpLayout& L = lp.layout;

  if (pool) {
    for (const ConnectivityCut& cut : pool->cuts) {
      if (std::find(cut.facilities.begin(), cut.facilities.end(), L.root) != cut.facilities.end()) continue;
      if (!std::binary_search(L.clients.begin(), L.clients.end(), cut.client)) continue;
      model.add_constraint(to_constraint(L, cut));
      ++st.pooled_cuts_used;
    }
  }

  double previous = -kInfinity;
  while (true) {
    if (st.rounds >= options.max_rounds)
      throw Error(ErrorCode::IterationLimit, "cutting-plane loop exceeded " + std::to_string(options.max_rounds) + " rounds");
    ++st.rounds;
    const LpSolution sol = solve_lp(model);
    st.round_values.push_back(sol.objective);
    if (sol.objective < previous - 1e-7) st.monotone = false;
    previous = sol.objective;

    FractionalSolution frac = to_fractional(L, sol.x, sol.objective);
    const std::vector<ConnectivityCut> cuts = separation_sweep(frac, L.clients, options.tolerance);
    if (cuts.empty()) return frac;
    for (const ConnectivityCut& cut : cuts) {
      model.add_constraint(to_constraint(L, cut));
      if (pool) pool->cuts.push_back(cut);
    }
    st.cuts_added += static_cast<int>(cuts.size());
  }
}

}  // namespace facloc
