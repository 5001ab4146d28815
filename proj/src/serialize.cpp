#include "dissiped/serialize.hpp"

namespace dissiped {

using nlohmann::json;

json to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols; ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

json to_json(const ColVec& v) {
  json a = json::array();
  for (int i = 0; i < v.dim(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const InputAffineSystem& sys) {
  json j;
  j["n"] = sys.n;
  j["m"] = sys.m;
  j["p"] = sys.p;
  j["A0"] = to_json(sys.A0);
  json ac = json::array();
  for (const Mat& Ak : sys.A_coeff) ac.push_back(to_json(Ak));
  j["A_coeff"] = std::move(ac);
  j["B0"] = to_json(sys.B0);
  json bc = json::array();
  for (const ColVec& bk : sys.B_coeff) bc.push_back(to_json(bk));
  j["B_coeff"] = std::move(bc);
  j["C"] = to_json(sys.C);
  j["P"] = to_json(sys.P);
  json box = json::array();
  for (const Interval& iv : sys.input_box) box.push_back(json::array({iv.lo, iv.hi}));
  j["input_box"] = std::move(box);
  return j;
}

json to_json(const Equilibrium& eq) {
  return json{{"x_star", to_json(eq.x_star)},
              {"u_star", to_json(eq.u_star)},
              {"residual", eq.residual}};
}

json to_json(const FeedbackLaw& law) {
  json j;
  switch (law.variant) {
    case FeedbackVariant::LinearUnsaturated:
      j["variant"] = "linear";
      break;
    case FeedbackVariant::LinearSaturated:
      j["variant"] = "saturated";
      break;
    case FeedbackVariant::Constant:
      j["variant"] = "constant";
      break;
  }
  if (law.variant != FeedbackVariant::Constant) j["gain"] = to_json(law.gain);
  j["offset"] = to_json(law.offset);
  if (law.variant == FeedbackVariant::LinearSaturated) {
    j["sat_lo"] = to_json(law.sat_lo);
    j["sat_hi"] = to_json(law.sat_hi);
  }
  return j;
}

json to_json(const LyapunovSpec& w) {
  return json{{"kind", "quadratic"}, {"Q", to_json(w.Q)}, {"scale", w.scale}};
}

json to_json(const SimConfig& cfg) {
  return json{{"t_final", cfg.t_final}, {"step", cfg.h}, {"record_every", cfg.record_every}};
}

json to_json(const ScenarioBundle& b) {
  json j;
  j["system"] = to_json(b.shifted);
  j["feedback"] = to_json(b.law);
  j["gain"] = json{{"alphas", b.default_alphas}};
  j["sim"] = to_json(b.default_sim);
  j["initial"] = to_json(b.z0);
  j["name"] = b.name;
  j["physical_system"] = to_json(b.physical);
  j["equilibrium"] = to_json(b.equilibrium);
  j["lyapunov"] = to_json(b.lyapunov);
  j["output"] = json{{"state", b.output_state},
                     {"scale", b.output_scale},
                     {"label", b.output_label}};
  return j;
}

json to_json(const AnalysisReport& r) {
  json j;
  j["dissipativity"] = {
      {"pass", r.dissipativity.pass},
      {"worst_input", to_json(r.dissipativity.worst_input)},
      {"worst_eig", r.dissipativity.worst_eig},
      {"vertex_worst_eig", r.dissipativity.vertex_worst_eig},
  };
  json det;
  det["pass"] = r.detectability.pass;
  if (r.detectability.offending_eigenvalue) {
    det["offending_eigenvalue"] = {{"re", r.detectability.offending_eigenvalue->real()},
                                   {"im", r.detectability.offending_eigenvalue->imag()}};
  } else {
    det["offending_eigenvalue"] = nullptr;
  }
  j["detectability"] = std::move(det);
  json obs;
  obs["rank"] = r.observability.rank;
  if (r.observability.det)
    obs["det"] = *r.observability.det;
  else
    obs["det"] = nullptr;
  json si = json::array();
  for (const ColVec& u : r.observability.singular_inputs_found) si.push_back(to_json(u));
  obs["singular_inputs_found"] = std::move(si);
  j["observability"] = std::move(obs);
  if (r.alpha0)
    j["alpha0"] = *r.alpha0;
  else
    j["alpha0"] = nullptr;
  j["notes"] = r.notes;
  return j;
}

Mat mat_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows ? static_cast<int>(j.at(0).size()) : 0;
  std::vector<double> entries;
  entries.reserve(static_cast<size_t>(rows) * cols);
  for (const auto& row : j) {
    if (static_cast<int>(row.size()) != cols)
      throw std::invalid_argument("matrix json: ragged rows");
    for (const auto& e : row) entries.push_back(e.get<double>());
  }
  return Mat::from(rows, cols, std::move(entries));
}

ColVec colvec_from_json(const json& j) {
  std::vector<double> entries;
  entries.reserve(j.size());
  for (const auto& e : j) entries.push_back(e.get<double>());
  return ColVec::from(std::move(entries));
}

InputAffineSystem system_from_json(const json& j) {
  InputAffineSystem sys;
  sys.n = j.at("n").get<int>();
  sys.m = j.at("m").get<int>();
  sys.p = j.at("p").get<int>();
  sys.A0 = mat_from_json(j.at("A0"));
  for (const auto& a : j.at("A_coeff")) sys.A_coeff.push_back(mat_from_json(a));
  sys.B0 = colvec_from_json(j.at("B0"));
  for (const auto& b : j.at("B_coeff")) sys.B_coeff.push_back(colvec_from_json(b));
  sys.C = mat_from_json(j.at("C"));
  sys.P = mat_from_json(j.at("P"));
  for (const auto& iv : j.at("input_box"))
    sys.input_box.push_back(Interval{iv.at(0).get<double>(), iv.at(1).get<double>()});
  sys.validate();
  return sys;
}

FeedbackLaw feedback_from_json(const json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "constant") return FeedbackLaw::constant(colvec_from_json(j.at("offset")));
  Mat gain = mat_from_json(j.at("gain"));
  if (variant == "linear") return FeedbackLaw::linear(std::move(gain));
  if (variant == "saturated")
    return FeedbackLaw::saturated(std::move(gain), colvec_from_json(j.at("sat_lo")),
                                  colvec_from_json(j.at("sat_hi")));
  throw std::invalid_argument("feedback json: unknown variant " + variant);
}

LyapunovSpec lyapunov_from_json(const json& j) {
  LyapunovSpec w{mat_from_json(j.at("Q")), j.at("scale").get<double>()};
  w.validate();
  return w;
}

SimConfig simconfig_from_json(const json& j) {
  SimConfig cfg;
  cfg.t_final = j.at("t_final").get<double>();
  cfg.h = j.at("step").get<double>();
  cfg.record_every = j.at("record_every").get<int>();
  cfg.validate();
  return cfg;
}

ScenarioBundle scenario_from_json(const json& j) {
  ScenarioBundle b;
  b.shifted = system_from_json(j.at("system"));
  b.law = feedback_from_json(j.at("feedback"));
  for (const auto& a : j.at("gain").at("alphas")) b.default_alphas.push_back(a.get<double>());
  b.default_sim = simconfig_from_json(j.at("sim"));
  b.z0 = colvec_from_json(j.at("initial"));
  b.name = j.value("name", std::string("scenario"));
  if (j.contains("physical_system")) b.physical = system_from_json(j.at("physical_system"));
  else b.physical = b.shifted;
  if (j.contains("equilibrium")) {
    b.equilibrium.x_star = colvec_from_json(j.at("equilibrium").at("x_star"));
    b.equilibrium.u_star = colvec_from_json(j.at("equilibrium").at("u_star"));
    b.equilibrium.residual = j.at("equilibrium").at("residual").get<double>();
  } else {
    b.equilibrium.x_star = ColVec(b.shifted.n);
    b.equilibrium.u_star = ColVec(b.shifted.m);
  }
  if (j.contains("lyapunov")) b.lyapunov = lyapunov_from_json(j.at("lyapunov"));
  else b.lyapunov = LyapunovSpec{b.shifted.P, 1.0};
  if (j.contains("output")) {
    b.output_state = j.at("output").value("state", 1);
    b.output_scale = j.at("output").value("scale", 1.0);
    b.output_label = j.at("output").value("label", std::string());
  }
  return b;
}

}  // namespace dissiped
