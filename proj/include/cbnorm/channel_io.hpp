#pragma once

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "cbnorm/channels.hpp"

namespace cbnorm {

inline nlohmann::ordered_json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int c = 0; c < m.cols(); ++c)
      row.push_back(nlohmann::ordered_json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw BadNameError("matrix json must be a nonempty array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw BadNameError("matrix json rows have inconsistent lengths");
    for (int c = 0; c < cols; ++c) {
      const auto& e = j[r][c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw BadNameError("matrix json entries must be [re, im] pairs");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

// Parsed form of the textual channel grammar "name:key=val,key=val".
struct ChannelSpec {
  std::string name;
  std::map<std::string, double> params;
};

inline ChannelSpec parse_channel_spec(const std::string& text) {
  ChannelSpec spec;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  if (spec.name.empty()) throw BadNameError("channel spec has no name: '" + text + "'");
  if (colon == std::string::npos) return spec;
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw BadNameError("channel spec entry '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      spec.params[key] = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw BadNameError("channel spec value '" + val + "' for key '" + key +
                         "' is not a number");
    }
  }
  return spec;
}

namespace detail {

inline double spec_get(const ChannelSpec& spec, const char* key) {
  auto it = spec.params.find(key);
  if (it == spec.params.end())
    throw BadNameError("channel '" + spec.name + "' needs parameter " + key);
  return it->second;
}

inline double spec_get(const ChannelSpec& spec, const char* key, double fallback) {
  auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

inline void spec_allow(const ChannelSpec& spec, std::initializer_list<const char*> keys) {
  for (const auto& kv : spec.params) {
    bool known = false;
    for (const char* k : keys)
      if (kv.first == k) known = true;
    if (!known)
      throw BadNameError("channel '" + spec.name + "' does not take parameter " + kv.first);
  }
}

}  // namespace detail

inline Channel build_channel(const ChannelSpec& spec) {
  using detail::spec_allow;
  using detail::spec_get;
  if (spec.name == "depolarizing") {
    spec_allow(spec, {"d", "mu"});
    return depolarizing(static_cast<int>(spec_get(spec, "d")), spec_get(spec, "mu"));
  }
  if (spec.name == "identity") {
    spec_allow(spec, {"d"});
    return identity_channel(static_cast<int>(spec_get(spec, "d")));
  }
  if (spec.name == "noisy") {
    spec_allow(spec, {"d"});
    return noisy_channel(static_cast<int>(spec_get(spec, "d")));
  }
  if (spec.name == "werner_holevo") {
    spec_allow(spec, {"d"});
    return werner_holevo(static_cast<int>(spec_get(spec, "d")));
  }
  if (spec.name == "nonunital") {
    spec_allow(spec, {"lambda", "tau"});
    return nonunital_qubit(spec_get(spec, "lambda"), spec_get(spec, "tau"));
  }
  if (spec.name == "random") {
    spec_allow(spec, {"d_in", "d_out", "d_env", "seed"});
    return random_cpt(static_cast<int>(spec_get(spec, "d_in")),
                      static_cast<int>(spec_get(spec, "d_out")),
                      static_cast<int>(spec_get(spec, "d_env")),
                      static_cast<std::uint64_t>(spec_get(spec, "seed", 1.0)));
  }
  throw BadNameError("unknown channel name '" + spec.name + "'");
}

inline Channel parse_channel(const std::string& text) {
  return build_channel(parse_channel_spec(text));
}

inline Channel load_channel_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadNameError("cannot open channel file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw BadNameError("channel file '" + path + "' is not valid json: " + e.what());
  }
  if (!j.contains("d_in") || !j.contains("d_out") || !j.contains("kraus"))
    throw BadNameError("channel file '" + path + "' needs d_in, d_out and kraus");
  Channel ch;
  ch.d_in = j["d_in"].get<int>();
  ch.d_out = j["d_out"].get<int>();
  ch.name = j.value("name", std::string("json"));
  if (ch.d_in < 1 || ch.d_out < 1)
    throw DimMismatchError("channel file '" + path + "' has nonpositive dimensions");
  if (!j["kraus"].is_array() || j["kraus"].empty())
    throw BadNameError("channel file '" + path + "' has an empty kraus list");
  for (const auto& k : j["kraus"]) {
    ComplexMatrix m = matrix_from_json(k);
    if (m.rows() != ch.d_out || m.cols() != ch.d_in)
      throw DimMismatchError("kraus operator in '" + path + "' is " + std::to_string(m.rows()) +
                             "x" + std::to_string(m.cols()) + ", expected " +
                             std::to_string(ch.d_out) + "x" + std::to_string(ch.d_in));
    ch.kraus.push_back(std::move(m));
  }
  return ch;
}

inline void save_channel_json(const Channel& ch, const std::string& path) {
  nlohmann::ordered_json j;
  j["name"] = ch.name;
  j["d_in"] = ch.d_in;
  j["d_out"] = ch.d_out;
  j["kraus"] = nlohmann::ordered_json::array();
  for (const auto& k : ch.kraus) j["kraus"].push_back(matrix_to_json(k));
  std::ofstream out(path);
  if (!out) throw BadNameError("cannot write channel file '" + path + "'");
  out << j.dump(2) << "\n";
}

// Channel argument as the CLI accepts it: a grammar string, or a path to a
// json description when the argument ends in .json.
inline Channel channel_from_arg(const std::string& arg) {
  if (arg.size() > 5 && arg.substr(arg.size() - 5) == ".json") return load_channel_json(arg);
  return parse_channel(arg);
}

}  // namespace cbnorm
