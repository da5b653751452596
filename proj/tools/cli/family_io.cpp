#include "cli/family_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gibbslab::cli {

using nlohmann::json;

SchemaError::SchemaError(std::string field, const std::string& message)
    : Error(ErrorKind::kInvalidInput, field + ": " + message), field_(std::move(field)) {}

namespace {

double number(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing");
  if (!it->is_number()) throw SchemaError(path + "." + key, "expected a number");
  return it->get<double>();
}

int integer(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing");
  if (!it->is_number_integer()) throw SchemaError(path + "." + key, "expected an integer");
  const auto v = it->get<long long>();
  if (v < 0 || v > 1'000'000) throw SchemaError(path + "." + key, "out of range [0, 1e6]");
  return static_cast<int>(v);
}

double probability(const json& obj, const std::string& key, const std::string& path) {
  const double v = number(obj, key, path);
  if (!(v > 0.0 && v < 1.0)) throw SchemaError(path + "." + key, "must lie in (0, 1)");
  return v;
}

void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw SchemaError(path + "." + k, "unknown field");
  }
}

BaseSpec parse_member(const json& m, const std::string& path) {
  if (!m.is_object()) throw SchemaError(path, "expected an object");
  const auto kind_it = m.find("kind");
  if (kind_it == m.end()) throw SchemaError(path + ".kind", "missing");
  if (!kind_it->is_string()) throw SchemaError(path + ".kind", "expected a string");
  const std::string kind = kind_it->get<std::string>();
  if (kind == "geometric") {
    only_keys(m, {"kind", "p"}, path);
    return BaseSpec::geometric(probability(m, "p", path));
  }
  if (kind == "poisson") {
    only_keys(m, {"kind", "mu"}, path);
    const double mu = number(m, "mu", path);
    if (!(mu > 0.0) || !std::isfinite(mu)) throw SchemaError(path + ".mu", "must be positive");
    return BaseSpec::poisson(mu);
  }
  if (kind == "binomial") {
    only_keys(m, {"kind", "m", "q"}, path);
    return BaseSpec::binomial(integer(m, "m", path), probability(m, "q", path));
  }
  if (kind == "bernoulli") {
    only_keys(m, {"kind", "q"}, path);
    return BaseSpec::bernoulli(probability(m, "q", path));
  }
  if (kind == "uniform") {
    only_keys(m, {"kind", "m"}, path);
    return BaseSpec::uniform(integer(m, "m", path));
  }
  if (kind == "weights") {
    only_keys(m, {"kind", "w"}, path);
    const auto it = m.find("w");
    if (it == m.end()) throw SchemaError(path + ".w", "missing");
    if (!it->is_array() || it->empty()) throw SchemaError(path + ".w", "expected a nonempty array");
    std::vector<double> w;
    bool positive = false;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& e = (*it)[i];
      const std::string epath = path + ".w[" + std::to_string(i) + "]";
      if (!e.is_number()) throw SchemaError(epath, "expected a number");
      const double v = e.get<double>();
      if (!(v >= 0.0) || !std::isfinite(v)) throw SchemaError(epath, "weights must be >= 0");
      positive = positive || v > 0.0;
      w.push_back(v);
    }
    if (!positive) throw SchemaError(path + ".w", "all weights are zero");
    return BaseSpec::from_weights(std::move(w));
  }
  throw SchemaError(path + ".kind", "unknown kind '" + kind +
                                        "' (geometric, poisson, binomial, bernoulli, uniform, weights)");
}

}  // namespace

FamilyFile parse_family(const json& doc) {
  if (!doc.is_object()) throw SchemaError("$", "expected an object");
  only_keys(doc, {"members", "repeat", "trunc_eps", "lambda_cap"}, "$");
  FamilyFile file;
  const auto members = doc.find("members");
  if (members == doc.end()) throw SchemaError("members", "missing");
  if (!members->is_array() || members->empty()) {
    throw SchemaError("members", "expected a nonempty array");
  }
  for (std::size_t i = 0; i < members->size(); ++i) {
    file.specs.push_back(parse_member((*members)[i], "members[" + std::to_string(i) + "]"));
  }
  if (const auto it = doc.find("repeat"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1) {
      throw SchemaError("repeat", "expected a positive integer");
    }
    file.repeat = it->get<std::size_t>();
  }
  if (const auto it = doc.find("trunc_eps"); it != doc.end()) {
    if (!it->is_number()) throw SchemaError("trunc_eps", "expected a number");
    file.trunc_eps = it->get<double>();
    if (!(file.trunc_eps > 0.0 && file.trunc_eps <= 1e-6)) {
      throw SchemaError("trunc_eps", "must lie in (0, 1e-6]");
    }
  }
  if (const auto it = doc.find("lambda_cap"); it != doc.end()) {
    if (!it->is_number()) throw SchemaError("lambda_cap", "expected a number");
    file.lambda_cap = it->get<double>();
    if (!(*file.lambda_cap > 0.0)) throw SchemaError("lambda_cap", "must be positive");
  }
  return file;
}

FamilyFile load_family_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot open family file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("not valid JSON (") + e.what() + ")");
  }
  return parse_family(doc);
}

Family build_family(const FamilyFile& file) {
  return make_family(file.specs, file.trunc_eps, file.lambda_cap, file.repeat);
}

nlohmann::ordered_json to_json(const FamilyFile& file) {
  nlohmann::ordered_json out;
  out["members"] = nlohmann::ordered_json::array();
  for (const auto& s : file.specs) {
    nlohmann::ordered_json m;
    switch (s.kind) {
      case BaseSpec::Kind::kGeometric:
        m = {{"kind", "geometric"}, {"p", s.p}};
        break;
      case BaseSpec::Kind::kPoisson:
        m = {{"kind", "poisson"}, {"mu", s.mu}};
        break;
      case BaseSpec::Kind::kBinomial:
        m = {{"kind", "binomial"}, {"m", s.m}, {"q", s.q}};
        break;
      case BaseSpec::Kind::kUniform:
        m = {{"kind", "uniform"}, {"m", s.m}};
        break;
      case BaseSpec::Kind::kWeights:
        m = {{"kind", "weights"}, {"w", s.weights}};
        break;
    }
    out["members"].push_back(std::move(m));
  }
  out["repeat"] = file.repeat;
  out["trunc_eps"] = file.trunc_eps;
  if (file.lambda_cap) out["lambda_cap"] = *file.lambda_cap;
  return out;
}

}  // namespace gibbslab::cli
