#include "symbiosim/kinds.hpp"

#include <stdexcept>

namespace symbiosim {

std::string_view to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::naive: return "naive";
    case DesignKind::clustered: return "clustered";
    case DesignKind::data_diverted: return "data_diverted";
    case DesignKind::co_diverted: return "co_diverted";
  }
  throw std::logic_error("unreachable design kind");
}

std::string_view to_string(RecommenderKind kind) {
  switch (kind) {
    case RecommenderKind::oracle: return "oracle";
    case RecommenderKind::random: return "random";
    case RecommenderKind::item_cf: return "itemcf";
    case RecommenderKind::user_cf: return "usercf";
  }
  throw std::logic_error("unreachable recommender kind");
}

std::string_view to_string(Arm arm) {
  return arm == Arm::treatment ? "treatment" : "control";
}

DesignKind design_from_string(std::string_view name) {
  if (name == "naive") return DesignKind::naive;
  if (name == "clustered") return DesignKind::clustered;
  if (name == "data_diverted") return DesignKind::data_diverted;
  if (name == "co_diverted") return DesignKind::co_diverted;
  throw std::invalid_argument("unknown design: " + std::string(name));
}

RecommenderKind recommender_from_string(std::string_view name) {
  if (name == "oracle") return RecommenderKind::oracle;
  if (name == "random") return RecommenderKind::random;
  if (name == "itemcf") return RecommenderKind::item_cf;
  if (name == "usercf") return RecommenderKind::user_cf;
  throw std::invalid_argument("unknown recommender: " + std::string(name));
}

}  // namespace symbiosim
