#include "homscore/dataset.hpp"

#include <unordered_set>

#include "homscore/errors.hpp"

namespace homscore {

void Dataset::validate() const {
  if (clusters.empty()) throw DataError("dataset has no clusters");
  std::unordered_set<std::string> seen;
  int p = -1, q = -1;
  for (const auto& c : clusters) {
    if (!seen.insert(c.id).second) throw DataError("duplicate cluster id '" + c.id + "'");
    if (c.obs.empty()) throw DataError("cluster '" + c.id + "' has no observations");
    for (const auto& o : c.obs) {
      if (p < 0) p = static_cast<int>(o.x.size());
      if (q < 0) q = static_cast<int>(o.z.size());
      if (static_cast<int>(o.x.size()) != p)
        throw DataError("inconsistent x dimension in cluster '" + c.id + "'");
      if (static_cast<int>(o.z.size()) != q)
        throw DataError("inconsistent z dimension in cluster '" + c.id + "'");
      if (o.trials < 0) throw DataError("negative trials in cluster '" + c.id + "'");
    }
  }
  if (p == 0) throw DataError("dataset has no fixed-effect covariates");
  if (n_obs() < static_cast<std::size_t>(p))
    throw DataError("fewer observations than fixed-effect covariates");
}

}  // namespace homscore
