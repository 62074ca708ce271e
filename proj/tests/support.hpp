#pragma once

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "facloc/error.hpp"
#include "facloc/instance.hpp"
#include "facloc/solution.hpp"

namespace facloc::testing {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::ParseError;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline Instance line4() { return load_instance(FACLOC_TEST_DATA "/line4.json"); }

inline nlohmann::json line4_golden() { return nlohmann::json::parse(read_file(FACLOC_TEST_DATA "/line4_golden.json")); }

/// Instance on a line with the given coordinates.
inline Instance on_line(const std::vector<double>& facility_x, const std::vector<double>& client_x,
                        double open_cost = 1.0, std::optional<int> capacity = std::nullopt,
                        std::optional<double> penalty = std::nullopt) {
  Instance inst;
  inst.name = "line";
  const int nf = static_cast<int>(facility_x.size());
  const int nc = static_cast<int>(client_x.size());
  for (int i = 0; i < nf; ++i) inst.facilities.push_back({"f" + std::to_string(i), open_cost, capacity});
  for (int j = 0; j < nc; ++j) inst.clients.push_back({"c" + std::to_string(j), penalty});
  Eigen::MatrixX2d pts = Eigen::MatrixX2d::Zero(nf + nc, 2);
  for (int i = 0; i < nf; ++i) pts(i, 0) = facility_x[i];
  for (int j = 0; j < nc; ++j) pts(nf + j, 0) = client_x[j];
  inst.dist.resize(nf + nc, nf + nc);
  for (int a = 0; a < nf + nc; ++a)
    for (int b = 0; b < nf + nc; ++b) inst.dist(a, b) = std::abs(pts(a, 0) - pts(b, 0));
  inst.edge_cost = inst.dist.topLeftCorner(nf, nf);
  inst.points = pts;
  validate_instance(inst);
  return inst;
}

/// Random feasible solution: random open set, capacity-respecting random
/// assignment, random penalties where allowed, MST tree when connected.
Solution random_feasible(const Instance& inst, const ProblemKind& kind, std::mt19937_64& rng);

}  // namespace facloc::testing
