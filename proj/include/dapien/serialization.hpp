#pragma once

#include "json.hpp"

#include "dapien/bootstrap.hpp"
#include "dapien/dapien.hpp"
#include "dapien/metrics.hpp"
#include "dapien/regressor.hpp"

namespace dapien {

/// Model documents carry {"format": "dapien-model", "version": 1,
/// "method": "dapien" | "bootstrap", ...}. Readers reject other versions.
inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const LinearModel& model);
LinearModel linear_model_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const DapienModel& model);
DapienModel dapien_model_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const BootstrapModel& model);
BootstrapModel bootstrap_model_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const EvaluationReport& report);

}  // namespace dapien
