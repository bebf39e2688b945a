#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace symbiosim {

enum class DesignKind {
  naive,
  clustered,
  data_diverted,
  co_diverted,
};

enum class RecommenderKind {
  oracle,
  random,
  item_cf,
  user_cf,
};

enum class Arm : std::int8_t {
  control = 0,
  treatment = 1,
};

// Arm tag stored on interaction records; -1 marks consumption during the
// pre-randomization warm-up, before any arm exists.
inline constexpr std::int8_t kArmNone = -1;

std::string_view to_string(DesignKind kind);
std::string_view to_string(RecommenderKind kind);
std::string_view to_string(Arm arm);

DesignKind design_from_string(std::string_view name);
RecommenderKind recommender_from_string(std::string_view name);

inline constexpr DesignKind kAllDesigns[] = {
    DesignKind::naive,
    DesignKind::clustered,
    DesignKind::data_diverted,
    DesignKind::co_diverted,
};

inline constexpr RecommenderKind kAllRecommenders[] = {
    RecommenderKind::oracle,
    RecommenderKind::random,
    RecommenderKind::item_cf,
    RecommenderKind::user_cf,
};

}  // namespace symbiosim
