// JSON serialization for the public value types. Measures round-trip as
// {"angles":[...],"weights":[...]} / {"points":[...],"weights":[...]} with
// IEEE-754 doubles.
#pragma once

#include <json.hpp>

#include "specmeas/ldp.hpp"
#include "specmeas/measures.hpp"
#include "specmeas/stats.hpp"

namespace specmeas {

using json = nlohmann::json;

inline json to_json(const CircleAtomicMeasure& mu) {
  return json{{"angles", mu.angles()}, {"weights", mu.weights()}};
}

inline CircleAtomicMeasure circle_measure_from_json(const json& j) {
  return CircleAtomicMeasure(j.at("angles").get<std::vector<double>>(),
                             j.at("weights").get<std::vector<double>>());
}

inline json to_json(const IntervalAtomicMeasure& gamma) {
  return json{{"points", gamma.points()}, {"weights", gamma.weights()}};
}

inline IntervalAtomicMeasure interval_measure_from_json(const json& j) {
  return IntervalAtomicMeasure(j.at("points").get<std::vector<double>>(),
                               j.at("weights").get<std::vector<double>>());
}

inline json to_json(const VerblunskyVector& c) {
  json j;
  std::vector<double> re, im;
  for (const Complex& z : c.interior) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  j["interior_re"] = re;
  j["interior_im"] = im;
  if (c.terminal) {
    j["terminal_re"] = c.terminal->real();
    j["terminal_im"] = c.terminal->imag();
  }
  return j;
}

inline json to_json(const TestReport& r) {
  return json{{"name", r.name},       {"statistic", r.statistic},
              {"p_value", r.p_value}, {"sample_size", r.sample_size},
              {"alpha", r.alpha},     {"pass", r.pass}};
}

inline json to_json(const RateEstimate& est) {
  json pts = json::array();
  for (const RatePoint& p : est.points) {
    pts.push_back(json{{"N", p.N},
                       {"samples", p.samples},
                       {"hits", p.hits},
                       {"p_hat", p.p_hat},
                       {"log_prob", p.log_prob},
                       {"rate", p.rate},
                       {"ci_low", p.ci_low},
                       {"ci_high", p.ci_high},
                       {"dropped", p.dropped}});
  }
  return json{{"points", pts},
              {"fitted_rate", est.fitted_rate},
              {"fitted_se", est.fitted_se},
              {"theory_rate", est.theory_rate}};
}

}  // namespace specmeas
