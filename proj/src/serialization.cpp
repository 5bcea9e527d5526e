#include "dapien/serialization.hpp"

#include <string>

#include "dapien/error.hpp"

namespace dapien {
namespace {

using nlohmann::json;

void check_header(const json& doc, std::string_view method) {
  if (!doc.is_object() || doc.value("format", "") != "dapien-model") {
    throw Error(ErrorKind::ParseError, "not a dapien-model document");
  }
  if (doc.value("version", 0) != kModelFormatVersion) {
    throw Error(ErrorKind::ParseError, "unsupported model format version");
  }
  if (doc.value("method", "") != method) {
    throw Error(ErrorKind::ParseError, "expected a '" + std::string(method) + "' model");
  }
}

json header(std::string_view method) {
  return {{"format", "dapien-model"}, {"version", kModelFormatVersion}, {"method", method}};
}

template <typename F>
auto parse_guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

}  // namespace

json to_json(const LinearModel& model) {
  return {{"weights", model.weights}, {"bias", model.bias}, {"activation", to_string(model.activation)}};
}

LinearModel linear_model_from_json(const json& doc) {
  return parse_guarded([&] {
    LinearModel model;
    model.weights = doc.at("weights").get<std::vector<double>>();
    model.bias = doc.at("bias").get<double>();
    model.activation = parse_activation(doc.at("activation").get<std::string>());
    return model;
  });
}

json to_json(const DapienModel& model) {
  json doc = header("dapien");
  doc["family"] = to_string(model.family);
  if (model.ndf) doc["ndf"] = *model.ndf;
  json models = json::array();
  for (const auto& m : model.param_models) models.push_back(to_json(m));
  doc["models"] = std::move(models);
  return doc;
}

DapienModel dapien_model_from_json(const json& doc) {
  check_header(doc, "dapien");
  DapienModel model = parse_guarded([&] {
    DapienModel m;
    m.family = parse_family(doc.at("family").get<std::string>());
    if (doc.contains("ndf")) m.ndf = doc.at("ndf").get<double>();
    for (const auto& item : doc.at("models")) m.param_models.push_back(linear_model_from_json(item));
    return m;
  });
  try {
    validate(model);
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return model;
}

json to_json(const BootstrapModel& model) {
  json doc = header("bootstrap");
  doc["b"] = model.b;
  json members = json::array();
  for (const auto& m : model.members) members.push_back(to_json(m));
  doc["members"] = std::move(members);
  doc["noise_model"] = to_json(model.noise_model);
  return doc;
}

BootstrapModel bootstrap_model_from_json(const json& doc) {
  check_header(doc, "bootstrap");
  BootstrapModel model = parse_guarded([&] {
    BootstrapModel m;
    m.b = doc.at("b").get<int>();
    for (const auto& item : doc.at("members")) m.members.push_back(linear_model_from_json(item));
    m.noise_model = linear_model_from_json(doc.at("noise_model"));
    return m;
  });
  if (model.b < 2 || model.members.size() != static_cast<std::size_t>(model.b)) {
    throw Error(ErrorKind::ParseError, "bootstrap member count does not match b");
  }
  return model;
}

json to_json(const EvaluationReport& report) {
  return {{"picp", report.picp},   {"mpiw", report.mpiw},     {"nmpiw", report.nmpiw},
          {"cwc", report.cwc},     {"n", report.n},           {"confidence", report.confidence},
          {"cwc_mu", report.cwc_mu}, {"cwc_eta", report.cwc_eta}};
}

}  // namespace dapien
