#include "facloc/solution.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "facloc/error.hpp"

namespace facloc {

using nlohmann::json;

std::vector<int> Solution::load(int num_facilities) const {
  std::vector<int> load(num_facilities, 0);
  for (int i : assignment)
    if (i >= 0 && i < num_facilities) ++load[i];
  return load;
}

std::vector<int> Solution::clients_of(int facility) const {
  std::vector<int> out;
  for (int j = 0; j < static_cast<int>(assignment.size()); ++j)
    if (assignment[j] == facility) out.push_back(j);
  return out;
}

CostBreakdown evaluate(const Instance& inst, const Solution& sol, const ProblemKind& kind) {
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  const auto facility_ok = [nf](int i) { return i >= 0 && i < nf; };
  if (static_cast<int>(sol.assignment.size()) != nc)
    throw Error(ErrorCode::UnknownId, "assignment covers " + std::to_string(sol.assignment.size()) + " clients, instance has " +
                                          std::to_string(nc));

  CostBreakdown c;
  for (int i : sol.open) {
    if (!facility_ok(i)) throw Error(ErrorCode::UnknownId, "open facility index " + std::to_string(i));
    if (kind.base != BaseProblem::kM) c.facility += inst.open_cost(i);
  }
  for (int j = 0; j < nc; ++j) {
    const int i = sol.assignment[j];
    if (i == -1) continue;
    if (!facility_ok(i)) throw Error(ErrorCode::UnknownId, "client " + inst.clients[j].id + " assigned to " + std::to_string(i));
    c.service += inst.d(i, j);
    c.radius = std::max(c.radius, inst.d(i, j));
  }
  double tree = 0.0;
  for (const auto& [a, b] : sol.steiner_edges) {
    if (!facility_ok(a) || !facility_ok(b)) throw Error(ErrorCode::UnknownId, "steiner edge endpoint out of range");
    tree += inst.edge_cost(a, b);
    c.longest_edge = std::max(c.longest_edge, inst.edge_cost(a, b));
  }
  c.connection = inst.connection_scale * tree;
  for (int j : sol.penalty_set) {
    if (j < 0 || j >= nc) throw Error(ErrorCode::UnknownId, "penalty client index " + std::to_string(j));
    c.penalty += inst.penalty(j);
  }
  c.total = c.facility + c.service + c.connection + c.penalty;
  return c;
}

double objective_value(const CostBreakdown& cost, const ProblemKind& kind) {
  if (!kind.is_center()) return cost.total;
  return kind.connected ? std::max(cost.radius, cost.longest_edge) : cost.radius;
}

std::string solution_to_json(const Instance& inst, const Solution& sol, int indent) {
  json j;
  json open = json::array();
  for (int i : sol.open) open.push_back(inst.facilities.at(i).id);
  json assignment = json::array();
  for (int c = 0; c < static_cast<int>(sol.assignment.size()); ++c)
    if (sol.assignment[c] >= 0) assignment.push_back({inst.clients.at(c).id, inst.facilities.at(sol.assignment[c]).id});
  json penalties = json::array();
  for (int c : sol.penalty_set) penalties.push_back(inst.clients.at(c).id);
  json edges = json::array();
  for (const auto& [a, b] : sol.steiner_edges) edges.push_back({inst.facilities.at(a).id, inst.facilities.at(b).id});
  j["open"] = open;
  j["assignment"] = assignment;
  j["penalty_set"] = penalties;
  j["steiner_edges"] = edges;
  json meta = json::object();
  if (sol.kind) meta["kind"] = *sol.kind;
  if (sol.claimed_total) meta["claimed_total"] = *sol.claimed_total;
  j["metadata"] = meta;
  return j.dump(indent);
}

namespace {

int facility_id(const Instance& inst, const json& v) {
  const auto idx = inst.facility_index(v.get<std::string>());
  if (!idx) throw Error(ErrorCode::UnknownId, "unknown facility id '" + v.get<std::string>() + "'");
  return *idx;
}

int client_id(const Instance& inst, const json& v) {
  const auto idx = inst.client_index(v.get<std::string>());
  if (!idx) throw Error(ErrorCode::UnknownId, "unknown client id '" + v.get<std::string>() + "'");
  return *idx;
}

}  // namespace

Solution parse_solution(const Instance& inst, std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  Solution sol = Solution::empty_for(inst);
  try {
    for (const auto& v : j.value("open", json::array())) sol.open.insert(facility_id(inst, v));
    for (const auto& pair : j.value("assignment", json::array())) {
      if (!pair.is_array() || pair.size() != 2) throw Error(ErrorCode::ParseError, "assignment entries are [client, facility]");
      sol.assignment[client_id(inst, pair[0])] = facility_id(inst, pair[1]);
    }
    for (const auto& v : j.value("penalty_set", json::array())) sol.penalty_set.insert(client_id(inst, v));
    for (const auto& e : j.value("steiner_edges", json::array())) {
      if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::ParseError, "steiner edges are [facility, facility]");
      const int a = facility_id(inst, e[0]);
      const int b = facility_id(inst, e[1]);
      if (a == b) throw Error(ErrorCode::ParseError, "self-loop steiner edge");
      sol.steiner_edges.insert(make_edge(a, b));
    }
    if (j.contains("metadata")) {
      const auto& m = j["metadata"];
      if (m.contains("kind")) sol.kind = m["kind"].get<std::string>();
      if (m.contains("claimed_total")) sol.claimed_total = m["claimed_total"].get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return sol;
}

Solution load_solution(const Instance& inst, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_solution(inst, buffer.str());
}

void save_solution(const Instance& inst, const Solution& sol, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << solution_to_json(inst, sol) << '\n';
}

}  // namespace facloc
