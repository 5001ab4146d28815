#pragma once

// JSON (de)serialization for systems, scenario bundles and analysis reports.

#include <string>

#include "json.hpp"

#include "dissiped/analysis.hpp"
#include "dissiped/scenarios.hpp"

namespace dissiped {

nlohmann::json to_json(const Mat& m);
nlohmann::json to_json(const ColVec& v);
nlohmann::json to_json(const InputAffineSystem& sys);
nlohmann::json to_json(const Equilibrium& eq);
nlohmann::json to_json(const FeedbackLaw& law);
nlohmann::json to_json(const LyapunovSpec& w);
nlohmann::json to_json(const SimConfig& cfg);
nlohmann::json to_json(const ScenarioBundle& b);
nlohmann::json to_json(const AnalysisReport& r);

Mat mat_from_json(const nlohmann::json& j);
ColVec colvec_from_json(const nlohmann::json& j);
InputAffineSystem system_from_json(const nlohmann::json& j);
FeedbackLaw feedback_from_json(const nlohmann::json& j);
LyapunovSpec lyapunov_from_json(const nlohmann::json& j);
SimConfig simconfig_from_json(const nlohmann::json& j);
ScenarioBundle scenario_from_json(const nlohmann::json& j);

}  // namespace dissiped
