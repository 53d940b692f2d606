#pragma once

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include "cbnorm/cbentropy.hpp"
#include "cbnorm/channel_io.hpp"
#include "cbnorm/inequalities.hpp"
#include "cbnorm/vnorms.hpp"

namespace cbnorm {

using OrderedJson = nlohmann::ordered_json;

// Fixed key order keeps reruns of the same command byte-identical except for
// wall time.
inline OrderedJson new_report(const std::string& command) {
  OrderedJson j;
  j["schema_version"] = "1";
  j["command"] = command;
  j["inputs"] = OrderedJson::object();
  j["results"] = OrderedJson::object();
  j["diagnostics"] = OrderedJson::object();
  return j;
}

struct WallClock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

inline OrderedJson params_json(const NormParams& p) {
  OrderedJson j;
  j["p"] = p.p;
  j["restarts"] = p.restarts;
  j["max_iters"] = p.max_iters;
  j["grad_tol"] = p.grad_tol;
  j["seed"] = p.seed;
  return j;
}

inline OrderedJson opt_report_json(const OptReport& r, bool include_argument = true) {
  OrderedJson j;
  j["value"] = r.value;
  j["iterations"] = r.iterations;
  j["restarts_used"] = r.restarts_used;
  j["converged"] = r.converged;
  j["spread"] = r.spread;
  if (include_argument && r.argument.size() > 0) j["argument"] = matrix_to_json(r.argument);
  return j;
}

inline OrderedJson cb_result_json(const CbResult& r, bool include_state = true) {
  OrderedJson j;
  j["value"] = r.value;
  if (include_state && r.state.coeffs.size() > 0)
    j["state_coeffs"] = matrix_to_json(r.state.coeffs);
  j["iterations"] = r.report.iterations;
  j["restarts_used"] = r.report.restarts_used;
  j["converged"] = r.report.converged;
  j["spread"] = r.report.spread;
  return j;
}

inline OrderedJson pair_check_json(const PairCheck& r) {
  OrderedJson j;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["gap"] = r.gap;
  j["rel_gap"] = r.rel_gap;
  j["a"] = cb_result_json(r.a, false);
  j["b"] = cb_result_json(r.b, false);
  j["joint"] = cb_result_json(r.joint, false);
  return j;
}

inline OrderedJson suite_report_json(const SuiteReport& r) {
  OrderedJson j;
  j["suite"] = r.suite;
  j["trials"] = r.trials;
  j["passed"] = r.passed;
  j["min_slack"] = r.min_slack;
  if (std::isfinite(r.reference)) j["reference"] = r.reference;
  OrderedJson v = OrderedJson::array();
  for (const auto& [seed, slack] : r.violations)
    v.push_back(OrderedJson{{"seed", seed}, {"slack", slack}});
  j["violations"] = std::move(v);
  return j;
}

inline OrderedJson channel_json(const Channel& ch) {
  OrderedJson j;
  j["name"] = ch.name;
  j["d_in"] = ch.d_in;
  j["d_out"] = ch.d_out;
  j["kraus_rank"] = ch.kraus.size();
  j["entanglement_breaking"] = ch.entanglement_breaking;
  if (!ch.params.empty()) {
    OrderedJson p = OrderedJson::object();
    for (const auto& [k, v] : ch.params) p[k] = v;
    j["params"] = std::move(p);
  }
  return j;
}

// stdout carries the report unless a CSV view replaced it; --report always
// receives the json.
inline void emit_report(const OrderedJson& j, const std::string& report_path,
                        bool json_to_stdout) {
  if (json_to_stdout) std::cout << j.dump(2) << "\n";
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw BadNameError("cannot write report file '" + report_path + "'");
    out << j.dump(2) << "\n";
  }
}

}  // namespace cbnorm
