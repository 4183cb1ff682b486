#pragma once

// Runs one module network in isolation from named initial values.

#include <map>
#include <string>

#include "bfcnn/crn.hpp"
#include "bfcnn/integrate.hpp"

namespace bfcnn::testing {

using Values = std::map<std::string, double>;

inline Values run_module(const Crn& crn, const Values& init, double T, IntegratorConfig cfg = {}) {
  ConcentrationState x(crn.size(), 0.0);
  for (const auto& [name, v] : init)
    if (auto id = crn.find(name)) x[*id] = v;
  auto end = integrate_endpoint(crn, x, T, cfg);
  Values out;
  for (std::size_t i = 0; i < crn.size(); ++i) out[crn.name(i)] = end[i];
  return out;
}

inline double at(const Values& v, const std::string& name) {
  auto it = v.find(name);
  return it == v.end() ? 0.0 : it->second;
}

}  // namespace bfcnn::testing
