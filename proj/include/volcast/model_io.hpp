#pragma once

#include <string>

#include <json.hpp>

#include "volcast/bekk.hpp"
#include "volcast/garch.hpp"
#include "volcast/mlmodels.hpp"

namespace volcast {

inline constexpr int kModelFormatVersion = 1;

/// Throws naming both versions when the document's format_version is not
/// the supported one.
void check_format_version(const nlohmann::json& j, const std::string& what);

/// Parse a JSON document; a malformed byte stream is rejected with the
/// parser's byte offset in the message.
nlohmann::json parse_json(const std::string& text, const std::string& what);

nlohmann::json to_json(const LinearModel& m);
LinearModel linear_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TreeEnsemble& m);  // trees as nested node objects
TreeEnsemble ensemble_from_json(const nlohmann::json& j);

nlohmann::json to_json(const KnnModel& m);
KnnModel knn_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MlpModel& m);
MlpModel mlp_from_json(const nlohmann::json& j);

nlohmann::json ml_predictor_to_json(const MlPredictor& m);
MlPredictor ml_predictor_from_json(const nlohmann::json& j);

nlohmann::json garch_fit_to_json(const GarchFit& fit);
GarchFit garch_fit_from_json(const nlohmann::json& j);

/// The BEKK artifact keeps the last covariance only; a reloaded fit
/// forecasts identically but does not carry the full path.
nlohmann::json bekk_fit_to_json(const BekkFit& fit);
BekkFit bekk_fit_from_json(const nlohmann::json& j);

}  // namespace volcast
