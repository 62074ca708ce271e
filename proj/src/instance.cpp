#include "facloc/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "facloc/error.hpp"

namespace facloc {

using nlohmann::json;

bool Instance::all_capacitated() const {
  return std::all_of(facilities.begin(), facilities.end(),
                     [](const FacilitySpec& f) { return f.capacity.has_value(); });
}

bool Instance::all_penalized() const {
  return std::all_of(clients.begin(), clients.end(),
                     [](const ClientSpec& c) { return c.penalty.has_value(); });
}

std::optional<int> Instance::facility_index(std::string_view id) const {
  for (int i = 0; i < num_facilities(); ++i)
    if (facilities[i].id == id) return i;
  return std::nullopt;
}

std::optional<int> Instance::client_index(std::string_view id) const {
  for (int j = 0; j < num_clients(); ++j)
    if (clients[j].id == id) return j;
  return std::nullopt;
}

bool Instance::operator==(const Instance& other) const {
  if (name != other.name || facilities != other.facilities || clients != other.clients ||
      connection_scale != other.connection_scale || k != other.k ||
      connectivity_dropped != other.connectivity_dropped)
    return false;
  if (dist.rows() != other.dist.rows() || dist.cols() != other.dist.cols() || dist != other.dist)
    return false;
  if (edge_cost.rows() != other.edge_cost.rows() || edge_cost.cols() != other.edge_cost.cols() ||
      edge_cost != other.edge_cost)
    return false;
  if (points.has_value() != other.points.has_value()) return false;
  if (points && (points->rows() != other.points->rows() || *points != *other.points)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Problem kinds

ProblemKind parse_kind(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  std::string_view rest = s;
  ProblemKind kind;
  if (rest.starts_with("con")) {
    kind.connected = true;
    rest.remove_prefix(3);
  }
  if (rest.starts_with("c")) {
    kind.capacitated = true;
    rest.remove_prefix(1);
  }
  if (rest.starts_with("p")) {
    kind.prize_collecting = true;
    rest.remove_prefix(1);
  }
  if (rest == "fl") {
    kind.base = BaseProblem::FL;
  } else if (rest == "km") {
    kind.base = BaseProblem::kM;
  } else if (rest == "kfl") {
    kind.base = BaseProblem::kFL;
  } else if (rest == "kc") {
    kind.base = BaseProblem::kC;
  } else {
    throw Error(ErrorCode::ParseError, "unknown problem kind '" + std::string(name) + "'");
  }
  return kind;
}

std::string to_string(const ProblemKind& kind) {
  std::string s;
  if (kind.connected) s += "con";
  if (kind.capacitated) s += "c";
  if (kind.prize_collecting) s += "p";
  switch (kind.base) {
    case BaseProblem::FL: s += "fl"; break;
    case BaseProblem::kM: s += "km"; break;
    case BaseProblem::kFL: s += "kfl"; break;
    case BaseProblem::kC: s += "kc"; break;
  }
  return s;
}

void require_fields(const Instance& inst, const ProblemKind& kind) {
  if (kind.prize_collecting && !inst.all_penalized())
    throw Error(ErrorCode::MissingPenalty, "kind " + to_string(kind) + " needs a penalty on every client");
  if (kind.capacitated && !inst.all_capacitated())
    throw Error(ErrorCode::MissingCapacity,
                "kind " + to_string(kind) + " needs a capacity on every facility");
  if (kind.has_cardinality() && !inst.k)
    throw Error(ErrorCode::MissingCardinality, "kind " + to_string(kind) + " needs k");
}

// ---------------------------------------------------------------------------
// Validation

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_square_metric_part(const Eigen::MatrixXd& m, const char* what) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index a = 0; a < n; ++a) {
    if (std::abs(m(a, a)) > kMetricTolerance)
      throw Error(ErrorCode::MetricViolation,
                  std::string(what) + " has nonzero diagonal at " + std::to_string(a));
    for (Eigen::Index b = 0; b < n; ++b) {
      if (!std::isfinite(m(a, b)) || m(a, b) < -kMetricTolerance)
        throw Error(ErrorCode::MetricViolation, std::string(what) + " entry (" + std::to_string(a) +
                                                    "," + std::to_string(b) + ") is negative or not finite");
      if (std::abs(m(a, b) - m(b, a)) > kMetricTolerance)
        throw Error(ErrorCode::MetricViolation, std::string(what) + " is asymmetric at (" +
                                                    std::to_string(a) + "," + std::to_string(b) + ")");
    }
  }
}

}  // namespace

void validate_instance(const Instance& inst) {
  const int nf = inst.num_facilities();
  const int n = inst.num_nodes();
  if (inst.dist.rows() != n || inst.dist.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "dist must be " + std::to_string(n) + "x" + std::to_string(n));
  if (inst.edge_cost.rows() != nf || inst.edge_cost.cols() != nf)
    throw Error(ErrorCode::DimensionMismatch,
                "edge_cost must be " + std::to_string(nf) + "x" + std::to_string(nf));
  if (inst.points && inst.points->rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "points must list every facility then every client");

  std::set<std::string> ids;
  for (const auto& f : inst.facilities) {
    if (!ids.insert(f.id).second) throw Error(ErrorCode::ParseError, "duplicate id '" + f.id + "'");
    if (!(f.open_cost >= 0.0) || !std::isfinite(f.open_cost))
      throw Error(ErrorCode::ParseError, "facility '" + f.id + "' has negative open_cost");
    if (f.capacity && *f.capacity < 1)
      throw Error(ErrorCode::ParseError, "facility '" + f.id + "' has capacity < 1");
  }
  for (const auto& c : inst.clients) {
    if (!ids.insert(c.id).second) throw Error(ErrorCode::ParseError, "duplicate id '" + c.id + "'");
    if (c.penalty && (!(*c.penalty >= 0.0) || !std::isfinite(*c.penalty)))
      throw Error(ErrorCode::ParseError, "client '" + c.id + "' has negative penalty");
  }
  if (!(inst.connection_scale >= 0.0) || !std::isfinite(inst.connection_scale))
    throw Error(ErrorCode::ParseError, "connection_scale must be nonnegative");
  if (inst.k && *inst.k < 1) throw Error(ErrorCode::ParseError, "k must be positive");

  check_square_metric_part(inst.dist, "dist");
  check_square_metric_part(inst.edge_cost, "edge_cost");

  double worst = 0.0;
  int wa = -1, wb = -1, wc = -1;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double dab = inst.dist(a, b);
      for (int c = 0; c < n; ++c) {
        const double excess = inst.dist(a, c) - dab - inst.dist(b, c);
        if (excess > worst) {
          worst = excess;
          wa = a, wb = b, wc = c;
        }
      }
    }
  if (worst > kMetricTolerance)
    throw Error(ErrorCode::MetricViolation, "triangle inequality broken by " + fmt_double(worst) +
                                                " on triple (" + std::to_string(wa) + "," +
                                                std::to_string(wb) + "," + std::to_string(wc) + ")");

  // Witness-edge bounds in the combiners need c(i,i') <= d(i,i').
  for (int a = 0; a < nf; ++a)
    for (int b = 0; b < nf; ++b)
      if (inst.edge_cost(a, b) > inst.dist(a, b) + kMetricTolerance)
        throw Error(ErrorCode::MetricViolation, "edge_cost(" + std::to_string(a) + "," +
                                                    std::to_string(b) + ") exceeds dist");
}

// ---------------------------------------------------------------------------
// JSON format

namespace {

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows)
      throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be square");
    for (Eigen::Index c = 0; c < rows; ++c) {
      if (!row[c].is_number()) throw Error(ErrorCode::ParseError, std::string(what) + " entries must be numbers");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd euclidean_distances(const Eigen::MatrixX2d& pts) {
  const Eigen::Index n = pts.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) d(a, b) = (pts.row(a) - pts.row(b)).norm();
  return d;
}

std::string require_string(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_string())
    throw Error(ErrorCode::ParseError, std::string("missing string field '") + key + "'");
  return obj[key].get<std::string>();
}

}  // namespace

Instance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "instance must be a JSON object");

  Instance inst;
  try {
    inst.name = doc.value("name", std::string{});
    if (!doc.contains("facilities") || !doc["facilities"].is_array())
      throw Error(ErrorCode::ParseError, "missing 'facilities' array");
    if (!doc.contains("clients") || !doc["clients"].is_array())
      throw Error(ErrorCode::ParseError, "missing 'clients' array");

    for (const json& f : doc["facilities"]) {
      FacilitySpec spec;
      spec.id = require_string(f, "id");
      spec.open_cost = f.value("open_cost", 0.0);
      if (f.contains("capacity") && !f["capacity"].is_null()) {
        if (!f["capacity"].is_number_integer())
          throw Error(ErrorCode::ParseError, "capacity of '" + spec.id + "' must be an integer");
        spec.capacity = f["capacity"].get<int>();
      }
      inst.facilities.push_back(std::move(spec));
    }
    for (const json& c : doc["clients"]) {
      ClientSpec spec;
      spec.id = require_string(c, "id");
      if (c.contains("penalty") && !c["penalty"].is_null()) spec.penalty = c["penalty"].get<double>();
      inst.clients.push_back(std::move(spec));
    }

    const Eigen::Index n = inst.num_nodes();
    const bool has_points = doc.contains("points");
    const bool has_dist = doc.contains("dist");
    if (!has_points && !has_dist) throw Error(ErrorCode::ParseError, "need one of 'points' or 'dist'");
    if (has_points) {
      const json& p = doc["points"];
      if (!p.is_array() || static_cast<Eigen::Index>(p.size()) != n)
        throw Error(ErrorCode::DimensionMismatch, "points must have one entry per node");
      Eigen::MatrixX2d pts(n, 2);
      for (Eigen::Index r = 0; r < n; ++r) {
        if (!p[r].is_array() || p[r].size() != 2)
          throw Error(ErrorCode::ParseError, "each point must be [x, y]");
        pts(r, 0) = p[r][0].get<double>();
        pts(r, 1) = p[r][1].get<double>();
      }
      inst.points = pts;
      inst.dist = euclidean_distances(pts);
      if (has_dist) {
        const Eigen::MatrixXd given = matrix_from_json(doc["dist"], "dist");
        if (given.rows() != n) throw Error(ErrorCode::DimensionMismatch, "dist size does not match nodes");
        if ((given - inst.dist).cwiseAbs().maxCoeff() > kMetricTolerance)
          throw Error(ErrorCode::MetricViolation, "supplied dist disagrees with points");
      }
    } else {
      inst.dist = matrix_from_json(doc["dist"], "dist");
      if (inst.dist.rows() != n) throw Error(ErrorCode::DimensionMismatch, "dist size does not match nodes");
    }

    const Eigen::Index nf = inst.num_facilities();
    if (doc.contains("edge_cost") && !doc["edge_cost"].is_null()) {
      inst.edge_cost = matrix_from_json(doc["edge_cost"], "edge_cost");
      if (inst.edge_cost.rows() != nf)
        throw Error(ErrorCode::DimensionMismatch, "edge_cost must be facilities x facilities");
    } else {
      inst.edge_cost = inst.dist.topLeftCorner(nf, nf);
    }
    inst.connection_scale = doc.value("connection_scale", 1.0);
    if (doc.contains("k") && !doc["k"].is_null()) {
      if (!doc["k"].is_number_integer()) throw Error(ErrorCode::ParseError, "k must be an integer");
      inst.k = doc["k"].get<int>();
    }
    inst.connectivity_dropped = doc.value("connectivity_dropped", false);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }

  validate_instance(inst);
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

std::string instance_to_json(const Instance& inst, int indent) {
  json doc;
  doc["name"] = inst.name;
  json fac = json::array();
  for (const auto& f : inst.facilities) {
    json o{{"id", f.id}, {"open_cost", f.open_cost}};
    if (f.capacity) o["capacity"] = *f.capacity;
    fac.push_back(std::move(o));
  }
  doc["facilities"] = std::move(fac);
  json cli = json::array();
  for (const auto& c : inst.clients) {
    json o{{"id", c.id}};
    if (c.penalty) o["penalty"] = *c.penalty;
    cli.push_back(std::move(o));
  }
  doc["clients"] = std::move(cli);
  if (inst.points) {
    json pts = json::array();
    for (Eigen::Index r = 0; r < inst.points->rows(); ++r)
      pts.push_back({(*inst.points)(r, 0), (*inst.points)(r, 1)});
    doc["points"] = std::move(pts);
  } else {
    doc["dist"] = matrix_to_json(inst.dist);
  }
  const Eigen::Index nf = inst.num_facilities();
  if (inst.edge_cost != inst.dist.topLeftCorner(nf, nf)) doc["edge_cost"] = matrix_to_json(inst.edge_cost);
  doc["connection_scale"] = inst.connection_scale;
  if (inst.k) doc["k"] = *inst.k;
  if (inst.connectivity_dropped) doc["connectivity_dropped"] = true;
  return doc.dump(indent);
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
  out << instance_to_json(inst) << '\n';
}

// ---------------------------------------------------------------------------
// Generator

namespace {

// Fixed-width draws straight from the engine so output does not depend on
// the standard library's distribution implementations.
struct Draw {
  std::mt19937_64 engine;
  double unit() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(engine() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

}  // namespace

Instance generate_euclidean(int n_facilities, int n_clients, std::uint64_t seed, const GeneratorConfig& cfg) {
  if (n_facilities < 1 || n_clients < 1)
    throw Error(ErrorCode::InvalidConfig, "need at least one facility and one client");
  if (cfg.open_cost_min > cfg.open_cost_max || cfg.open_cost_min < 0.0)
    throw Error(ErrorCode::InvalidConfig, "empty or negative open cost range");
  if (cfg.penalties && (cfg.penalty_min > cfg.penalty_max || cfg.penalty_min < 0.0))
    throw Error(ErrorCode::InvalidConfig, "empty or negative penalty range");
  if (cfg.capacitated) {
    if (cfg.capacity_min > cfg.capacity_max || cfg.capacity_min < 1)
      throw Error(ErrorCode::InvalidConfig, "empty capacity range");
    if (cfg.ensure_feasible &&
        static_cast<long>(cfg.capacity_min) * n_facilities < static_cast<long>(n_clients))
      throw Error(ErrorCode::InvalidConfig, "capacity range allows total capacity below the client count");
  }
  if (!(cfg.edge_cost_factor > 0.0 && cfg.edge_cost_factor <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "edge_cost_factor must lie in (0, 1]");
  if (cfg.connection_scale < 0.0) throw Error(ErrorCode::InvalidConfig, "negative connection_scale");
  if (cfg.k && *cfg.k < 1) throw Error(ErrorCode::InvalidConfig, "k must be positive");

  Draw rng{std::mt19937_64(seed)};
  const int n = n_facilities + n_clients;
  Eigen::MatrixX2d pts(n, 2);
  for (int r = 0; r < n; ++r) {
    pts(r, 0) = rng.unit();
    pts(r, 1) = rng.unit();
  }

  Instance inst;
  inst.name = cfg.name.empty() ? "euclid-f" + std::to_string(n_facilities) + "-c" +
                                     std::to_string(n_clients) + "-s" + std::to_string(seed)
                               : cfg.name;
  const int uniform_cap = cfg.capacitated ? rng.integer(cfg.capacity_min, cfg.capacity_max) : 0;
  for (int i = 0; i < n_facilities; ++i) {
    FacilitySpec f;
    f.id = "f" + std::to_string(i);
    f.open_cost = rng.uniform(cfg.open_cost_min, cfg.open_cost_max);
    if (cfg.capacitated)
      f.capacity = cfg.uniform_capacity ? uniform_cap : rng.integer(cfg.capacity_min, cfg.capacity_max);
    inst.facilities.push_back(std::move(f));
  }
  for (int j = 0; j < n_clients; ++j) {
    ClientSpec c;
    c.id = "c" + std::to_string(j);
    if (cfg.penalties) c.penalty = rng.uniform(cfg.penalty_min, cfg.penalty_max);
    inst.clients.push_back(std::move(c));
  }
  inst.points = pts;
  inst.dist = euclidean_distances(pts);
  inst.edge_cost = cfg.edge_cost_factor * inst.dist.topLeftCorner(n_facilities, n_facilities);
  inst.connection_scale = cfg.connection_scale;
  inst.k = cfg.k;
  validate_instance(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// Constraint-dropping views

Instance drop_capacities(const Instance& inst) {
  Instance out = inst;
  for (auto& f : out.facilities) f.capacity.reset();
  return out;
}

Instance drop_connectivity(const Instance& inst) {
  Instance out = inst;
  out.connection_scale = 0.0;
  out.connectivity_dropped = true;
  return out;
}

}  // namespace facloc
