#include "smoothdist/dag_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "smoothdist/errors.hpp"

namespace smoothdist {
namespace {

using nlohmann::json;

json vec_to_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector vec_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  Vector v(values.size());
  for (size_t i = 0; i < values.size(); ++i) v[int(i)] = values[i];
  return v;
}

json mat_to_json(const Matrix& m) {
  std::vector<double> flat;
  flat.reserve(size_t(m.rows() * m.cols()));
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  }
  return flat;
}

Matrix mat_from_json(const json& j, int dim) {
  const auto flat = j.get<std::vector<double>>();
  if (int(flat.size()) != dim * dim) {
    throw InvalidInput("shape matrix has the wrong number of entries");
  }
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) m(r, c) = flat[size_t(r * dim + c)];
  }
  return m;
}

}  // namespace

std::string dag_to_json_text(const DistanceDag& dag) {
  json root;
  root["version"] = 1;
  root["epsilon"] = dag.epsilon;
  root["seed"] = dag.seed;

  json cfg;
  cfg["lambdaC"] = dag.lambda_c;
  cfg["lambdaP"] = dag.lambda_p;
  cfg["tolerances"] = {{"geometric", dag.config.tol.geometric},
                       {"membership", dag.config.tol.membership},
                       {"unitNormal", dag.config.tol.unit_normal},
                       {"solverRel", dag.config.tol.solver_rel},
                       {"predicate", dag.config.tol.predicate},
                       {"mollifierCutoff", dag.config.tol.mollifier_cutoff}};
  cfg["samples"] = {
      {"worklistFactor", dag.config.samples.worklist_factor},
      {"coverageVerifyFactor", dag.config.samples.coverage_verify_factor},
      {"topFactor", dag.config.samples.top_factor},
      {"repValidationFactor", dag.config.samples.rep_validation_factor}};
  root["config"] = cfg;

  json poly;
  poly["dim"] = dag.normalized.dim();
  json hs = json::array();
  for (const Halfspace& h : dag.normalized.halfspaces()) {
    hs.push_back({{"a", vec_to_json(h.a)}, {"b", h.b}});
  }
  poly["halfspaces"] = std::move(hs);
  poly["transform"] = {{"scale", dag.transform.scale},
                       {"translation", vec_to_json(dag.transform.translation)}};
  root["polytope"] = std::move(poly);

  json levels = json::array();
  for (const DagLevel& level : dag.levels) {
    json nodes = json::array();
    for (const DagNode& n : level.nodes) {
      json jn;
      jn["center"] = vec_to_json(n.center);
      jn["shape"] = mat_to_json(n.covering.M());
      jn["children"] = n.children;
      jn["isTop"] = n.is_top;
      jn["repIndex"] = n.rep_index;
      jn["adjacentPatches"] = n.adjacent_patches;
      nodes.push_back(std::move(jn));
    }
    levels.push_back({{"delta", level.delta}, {"nodes", std::move(nodes)}});
  }
  root["levels"] = std::move(levels);

  json patches = json::array();
  for (const Patch& p : dag.patches) patches.push_back({{"node", p.node}});
  root["patches"] = std::move(patches);

  return root.dump() + "\n";
}

DistanceDag dag_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("not valid JSON: ") + e.what());
  }
  try {
    if (root.at("version").get<int>() != 1) {
      throw InvalidInput("unsupported snapshot version");
    }
    const json& poly = root.at("polytope");
    const int d = poly.at("dim").get<int>();
    std::vector<Halfspace> hs;
    for (const json& jh : poly.at("halfspaces")) {
      Halfspace h;
      h.a = vec_from_json(jh.at("a"));
      h.b = jh.at("b").get<double>();
      hs.push_back(std::move(h));
    }
    NormalizationTransform tr;
    tr.scale = poly.at("transform").at("scale").get<double>();
    tr.translation = vec_from_json(poly.at("transform").at("translation"));
    if (!(tr.scale > 0.0)) throw InvalidInput("transform scale must be positive");

    Polytope normalized(d, hs);
    std::vector<Halfspace> hs_orig = hs;
    for (Halfspace& h : hs_orig) {
      h.b = h.b / tr.scale + h.a.dot(tr.translation);
    }
    Polytope original(d, std::move(hs_orig));

    DistanceDag dag(std::move(original), std::move(normalized), tr);
    dag.epsilon = root.at("epsilon").get<double>();
    dag.seed = root.at("seed").get<std::uint64_t>();
    const json& cfg = root.at("config");
    dag.lambda_c = cfg.at("lambdaC").get<double>();
    dag.lambda_p = cfg.at("lambdaP").get<double>();
    if (!(dag.lambda_p > 0.0) || !(dag.lambda_p < dag.lambda_c) ||
        !(dag.lambda_c < 1.0)) {
      throw InvalidInput("scaling factors must satisfy 0 < lambdaP < lambdaC < 1");
    }
    dag.config.epsilon = dag.epsilon;
    dag.config.seed = dag.seed;
    dag.config.lambda_c = dag.lambda_c;
    dag.config.lambda_p = dag.lambda_p;
    const json& jt = cfg.at("tolerances");
    dag.config.tol.geometric = jt.at("geometric").get<double>();
    dag.config.tol.membership = jt.at("membership").get<double>();
    dag.config.tol.unit_normal = jt.at("unitNormal").get<double>();
    dag.config.tol.solver_rel = jt.at("solverRel").get<double>();
    dag.config.tol.predicate = jt.at("predicate").get<double>();
    dag.config.tol.mollifier_cutoff = jt.at("mollifierCutoff").get<double>();
    const json& js = cfg.at("samples");
    dag.config.samples.worklist_factor = js.at("worklistFactor").get<int>();
    dag.config.samples.coverage_verify_factor =
        js.at("coverageVerifyFactor").get<int>();
    dag.config.samples.top_factor = js.at("topFactor").get<int>();
    dag.config.samples.rep_validation_factor =
        js.at("repValidationFactor").get<int>();

    const double pack_ratio = dag.lambda_p / dag.lambda_c;
    for (const json& jl : root.at("levels")) {
      DagLevel level;
      level.delta = jl.at("delta").get<double>();
      for (const json& jn : jl.at("nodes")) {
        DagNode n;
        n.center = vec_from_json(jn.at("center"));
        if (int(n.center.size()) != d + 1) {
          throw InvalidInput("node center has the wrong dimension");
        }
        Matrix M = mat_from_json(jn.at("shape"), d + 1);
        n.covering = Ellipsoid::unchecked(n.center, std::move(M));
        if (!n.covering.valid()) {
          throw InvalidInput("node shape matrix is not positive definite");
        }
        n.packing = n.covering.scaled(pack_ratio);
        n.half_covering = n.covering.scaled(0.5);
        n.children = jn.at("children").get<std::vector<int>>();
        n.is_top = jn.at("isTop").get<bool>();
        n.rep_index = jn.at("repIndex").get<int>();
        n.adjacent_patches = jn.at("adjacentPatches").get<std::vector<int>>();
        level.nodes.push_back(std::move(n));
      }
      if (level.nodes.empty()) throw InvalidInput("empty level");
      dag.levels.push_back(std::move(level));
    }
    if (dag.levels.empty()) throw InvalidInput("no levels");
    if (dag.levels.back().nodes.size() != 1) {
      throw InvalidInput("the last level must hold exactly one node");
    }

    for (const json& jp : root.at("patches")) {
      const int ni = jp.at("node").get<int>();
      if (ni < 0 || ni >= int(dag.levels[0].nodes.size())) {
        throw InvalidInput("patch references a node out of range");
      }
      DagNode& n = dag.levels[0].nodes[size_t(ni)];
      if (!n.is_top) throw InvalidInput("patch references a non-top node");
      n.patch_id = int(dag.patches.size());
      Patch p;
      p.node = ni;
      p.projected = n.covering.project_vertical();
      p.rep_index = n.rep_index;
      dag.patches.push_back(std::move(p));
    }

    const int num_patches = int(dag.patches.size());
    const int num_hs = dag.normalized.num_halfspaces();
    for (size_t l = 0; l < dag.levels.size(); ++l) {
      const int below = l > 0 ? int(dag.levels[l - 1].nodes.size()) : 0;
      for (const DagNode& n : dag.levels[l].nodes) {
        if (l > 0 && n.children.empty()) {
          throw InvalidInput("a non-leaf node has no children");
        }
        for (int c : n.children) {
          if (c < 0 || c >= below) throw InvalidInput("child index out of range");
        }
        if (l == 0) {
          if (n.rep_index < 0 || n.rep_index >= num_hs) {
            throw InvalidInput("facet index out of range");
          }
          for (int pid : n.adjacent_patches) {
            if (pid < 0 || pid >= num_patches) {
              throw InvalidInput("adjacent patch id out of range");
            }
          }
        }
        dag.stats.max_out_degree =
            std::max(dag.stats.max_out_degree, int(n.children.size()));
      }
      dag.stats.level_sizes.push_back(int(dag.levels[l].nodes.size()));
    }
    dag.stats.num_patches = num_patches;
    return dag;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed snapshot: ") + e.what());
  }
}

void save_dag(const DistanceDag& dag, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  const std::string text = dag_to_json_text(dag);
  out.write(text.data(), std::streamsize(text.size()));
  if (!out) throw InvalidInput("failed writing: " + path);
}

DistanceDag load_dag(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return dag_from_json_text(buffer.str());
}

}  // namespace smoothdist
