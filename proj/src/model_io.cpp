#include <cmath>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <json.hpp>

#include "qconcept/detail/json_numbers.hpp"
#include "qconcept/error.hpp"
#include "qconcept/hilbert.hpp"

namespace qconcept::hilbert {

namespace {

using Json = nlohmann::ordered_json;

double round12(double v) {
  const double r = std::stod(fmt::format("{:.12g}", v));
  return r == 0.0 ? 0.0 : r;
}

Json complex_array(const Vector& v) {
  Json out = Json::array();
  for (const auto& z : v) out.push_back(Json::array({round12(z.real()), round12(z.imag())}));
  return out;
}

Vector read_complex_array(const Json& j, const char* name) {
  if (!j.is_array()) throw DataError(fmt::format("model: \"{}\" must be an array", name));
  Vector v;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      throw DataError(fmt::format("model: \"{}\" entries must be [re, im] pairs", name));
    }
    v.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return v;
}

template <typename T>
std::vector<T> read_array(const Json& root, const char* name) {
  if (!root.contains(name) || !root.at(name).is_array()) {
    throw DataError(fmt::format("model: missing array \"{}\"", name));
  }
  try {
    return root.at(name).get<std::vector<T>>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(fmt::format("model: \"{}\" has entries of the wrong type", name));
  }
}

}  // namespace

std::string model_to_json(const DisjunctionModel& model) {
  Json root;
  root["labels"] = model.labels;
  Json lambda = Json::array();
  for (double v : model.lambda) lambda.push_back(round12(v));
  root["lambda"] = std::move(lambda);
  root["sign"] = model.signs;
  Json beta = Json::array();
  for (double v : model.beta_deg) beta.push_back(round12(v));
  root["beta_deg"] = std::move(beta);
  root["c_m"] = round12(model.c_m);
  root["m"] = model.m + 1;
  root["vecA"] = complex_array(model.vec_a);
  root["vecB"] = complex_array(model.vec_b);
  return detail::shortest_floats(root.dump(2)) + "\n";
}

DisjunctionModel model_from_json(std::string_view json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(fmt::format("model is not valid JSON: {}", e.what()));
  }
  if (!root.is_object()) throw DataError("model must be a JSON object");
  DisjunctionModel model;
  model.labels = read_array<std::string>(root, "labels");
  model.lambda = read_array<double>(root, "lambda");
  model.signs = read_array<int>(root, "sign");
  model.beta_deg = read_array<double>(root, "beta_deg");
  if (!root.contains("c_m") || !root.at("c_m").is_number()) throw DataError("model: missing number \"c_m\"");
  model.c_m = root.at("c_m").get<double>();
  if (!root.contains("m") || !root.at("m").is_number_integer() || root.at("m").get<long long>() < 1) {
    throw DataError("model: \"m\" must be a 1-based index");
  }
  model.m = static_cast<std::size_t>(root.at("m").get<long long>() - 1);
  if (!root.contains("vecA") || !root.contains("vecB")) throw DataError("model: missing vecA/vecB");
  model.vec_a = read_complex_array(root.at("vecA"), "vecA");
  model.vec_b = read_complex_array(root.at("vecB"), "vecB");

  const std::size_t n = model.labels.size();
  if (model.lambda.size() != n || model.signs.size() != n || model.beta_deg.size() != n ||
      model.vec_a.size() != n + 1 || model.vec_b.size() != n + 1 || model.m >= n) {
    throw DataError(fmt::format("model arrays are inconsistent with {} labels", n));
  }
  return model;
}

void write_model(const DisjunctionModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write model '{}'", path.string()));
  out << model_to_json(model);
  if (!out) throw IoError(fmt::format("failed writing model '{}'", path.string()));
}

DisjunctionModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open model '{}'", path.string()));
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return model_from_json(text);
}

}  // namespace qconcept::hilbert
