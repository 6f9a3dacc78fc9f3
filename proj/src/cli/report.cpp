#include <cinttypes>
#include <cstdio>

#include "radiso/cli.hpp"
#include "radiso/error.hpp"

namespace radiso::cli::report {

namespace {

using nlohmann::json;

json array_of(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json one_based(const std::vector<int>& idx) {
  json a = json::array();
  for (int i : idx) a.push_back(i + 1);
  return a;
}

template <class T>
json optional_value(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string checksum(const Instance& instance) {
  const std::string text = serialize_instance(instance);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

json digest(const Instance& instance) {
  return {{"d", instance.vectors.dim()}, {"n", instance.vectors.count()}, {"checksum", checksum(instance)}};
}

json verdicts(const PolytopeReport& r, std::string_view test) {
  json out;
  out["membership"] = std::string(to_string(r.member));
  out["test"] = std::string(test);
  out["reducible"] = r.classes.size() > 1;
  json classes = json::array();
  for (const auto& k : r.classes) classes.push_back(one_based(k));
  out["classes"] = classes;
  out["class_dims"] = r.class_dims;
  if (r.witness) {
    out["witness"] = {{"indices", one_based(r.witness->indices)},
                      {"c_sum", r.witness->c_sum},
                      {"span_dim", r.witness->span_dim}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

json bounds(const BoundReport& b) {
  json out;
  out["beta"] = b.beta;
  out["inputs"] = {{"c_min", b.c_min},
                   {"gamma", optional_value(b.gamma)},
                   {"delta_s_min", optional_value(b.delta_s_min)},
                   {"eta", b.deepness ? json(b.deepness->eta) : json(nullptr)},
                   {"delta", b.deepness ? json(b.deepness->delta) : json(nullptr)}};
  if (b.deepness) {
    out["deepness"] = {{"eta", b.deepness->eta},
                       {"delta", b.deepness->delta},
                       {"checked_subspaces", b.deepness->checked_subspaces},
                       {"worst_case", one_based(b.deepness->worst_case)},
                       {"t_inf", b.deepness->t_inf},
                       {"certified", !b.deepness->heuristic}};
  } else {
    out["deepness"] = nullptr;
  }
  out["t_inf_new"] = b.t_inf_new ? json{{"value", *b.t_inf_new}, {"certified", false}} : json(nullptr);
  out["t_inf_hm"] = b.t_inf_hm ? json{{"value", *b.t_inf_hm}, {"certified", true}} : json(nullptr);
  if (b.hm_deepness) {
    out["hm_deepness"] = {{"eta", b.hm_deepness->eta},
                          {"delta", b.hm_deepness->delta},
                          {"t_inf", b.hm_deepness->t_inf},
                          {"certified", true}};
  } else {
    out["hm_deepness"] = nullptr;
  }
  out["t_inf_used"] = optional_value(b.t_inf_used);
  if (b.alpha) {
    // The alpha bounds inherit the status of the |t|_inf bound they use.
    const bool certified = b.t_inf_hm && b.t_inf_used && *b.t_inf_used == *b.t_inf_hm;
    out["alpha"] = {{"alpha_general", b.alpha->alpha_general},
                    {"log_alpha_general", b.alpha->log_alpha_general},
                    {"alpha_gp", optional_value(b.alpha->alpha_gp)},
                    {"kappa_general", b.alpha->kappa_general},
                    {"kappa_gp", optional_value(b.alpha->kappa_gp)},
                    {"certified", certified}};
  } else {
    out["alpha"] = nullptr;
  }
  out["notes"] = b.notes;
  return out;
}

json transform(const Transformation& t) {
  const Matrix& m = t.map();
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  const char* form = t.provenance() == TransformProvenance::q_inv_sqrt_symmetric ? "q_inv_sqrt_symmetric"
                                                                                 : "sigma_inv_vt";
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}, {"form", form}};
}

Matrix parse_transform(const json& doc) {
  try {
    const json& t = doc.contains("transform") ? doc.at("transform") : doc;
    if (t.is_array()) {
      const auto rows = static_cast<Eigen::Index>(t.size());
      if (rows == 0) throw Error(ErrorKind::parse, "empty transform");
      Matrix m(rows, rows);
      for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = t.at(i);
        if (static_cast<Eigen::Index>(row.size()) != rows) throw Error(ErrorKind::dimension, "transform is not square");
        for (Eigen::Index j = 0; j < rows; ++j) m(i, j) = row.at(j).get<double>();
      }
      return m;
    }
    const auto rows = t.at("rows").get<Eigen::Index>();
    const auto cols = t.at("cols").get<Eigen::Index>();
    const auto& data = t.at("data");
    if (rows != cols || rows <= 0) throw Error(ErrorKind::dimension, "transform is not square");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
      throw Error(ErrorKind::dimension, "transform data has the wrong length");
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = data.at(i * cols + j).get<double>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("bad transform: ") + e.what());
  }
}

json result(const IsotropyResult& r) {
  return {{"method", std::string(to_string(r.method))},
          {"iterations", r.iterations},
          {"isotropy_residual", r.isotropy_residual},
          {"grad_norm", r.grad_norm},
          {"t", array_of(r.t_apx.entries)},
          {"c_apx", array_of(r.c_apx)},
          {"warnings", r.warnings}};
}

json provenance(const Options& o) {
  json cfg = {{"c", o.c ? json(*o.c) : json(nullptr)},
              {"eps", o.eps},
              {"method", o.method},
              {"alpha", o.alpha ? json(*o.alpha) : json(nullptr)},
              {"max_iters", o.max_iters},
              {"region_bound", optional_value(o.region_bound)},
              {"svd_tol", optional_value(o.svd_tol)},
              {"seed", o.seed}};
  return {{"config", cfg}, {"version", std::string(kVersion)}};
}

std::string render(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace radiso::cli::report
