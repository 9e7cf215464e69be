#pragma once

#include <string>

#include "gwmm/distribution.hpp"
#include "gwmm/gwmm.h"
#include "json.hpp"

namespace gwmm::cmd {

struct Output {
  nlohmann::json json;
  std::string csv;
  bool budget_dominant = false;
};

Output analyze(const OffspringDistribution& d, const gwmm_options& opt);
Output curve(const OffspringDistribution& d, const gwmm_options& opt);
Output scan(const std::string& family, const gwmm_options& opt);
Output simulate(const OffspringDistribution& d, const gwmm_options& opt);
Output scaling(const OffspringDistribution& d, const gwmm_options& opt);
Output endogeny(const OffspringDistribution& d, const gwmm_options& opt);

extern const char* const kVersion;

}  // namespace gwmm::cmd
