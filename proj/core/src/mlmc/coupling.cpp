#include "mlabc/mlmc/coupling.hpp"

#include <string>

#include "mlabc/error.hpp"
#include "mlabc/logging.hpp"
#include "mlabc/mlmc/ecdf.hpp"

namespace mlabc {

const char* to_string(CouplingMode mode) {
  switch (mode) {
    case CouplingMode::MarginalMatching: return "marginal";
    case CouplingMode::Identity: return "identity";
    case CouplingMode::Independent: return "independent";
  }
  return "unknown";
}

CouplingMode coupling_mode_from_string(const std::string& name) {
  if (name == "marginal") return CouplingMode::MarginalMatching;
  if (name == "identity") return CouplingMode::Identity;
  if (name == "independent") return CouplingMode::Independent;
  throw InvalidArgument("unknown coupling mode '" + name + "'");
}

std::vector<ParameterVector> couple_samples(std::span<const ParameterVector> level,
                                            const std::vector<MarginalCdf>& level_marginals,
                                            const std::vector<MarginalCdf>& accumulated) {
  const std::size_t k = accumulated.size();
  if (level_marginals.size() != k) {
    throw InvalidArgument("couple_samples: marginal counts differ");
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (accumulated[j].is_constant()) {
      warn("couple_samples: accumulated marginal " + std::to_string(j) +
           " is constant; matching to its first node");
    }
  }
  std::vector<ParameterVector> matched;
  matched.reserve(level.size());
  for (const auto& theta : level) {
    if (theta.size() != k) throw InvalidArgument("couple_samples: dimension mismatch");
    ParameterVector m(k);
    for (std::size_t j = 0; j < k; ++j) {
      if (accumulated[j].is_constant()) {
        m[j] = accumulated[j].nodes.front();
      } else {
        m[j] = inverse_marginal(accumulated[j], level_marginals[j].evaluate(theta[j]));
      }
    }
    matched.push_back(std::move(m));
  }
  return matched;
}

}  // namespace mlabc
