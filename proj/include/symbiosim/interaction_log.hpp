#pragma once

#include <cstdint>
#include <vector>

#include "symbiosim/kinds.hpp"

namespace symbiosim {

struct InteractionRecord {
  std::int32_t user = 0;
  std::int32_t item = 0;
  std::int32_t period = 0;  // 1-based
  std::int8_t arm = kArmNone;  // user's arm at consumption; kArmNone pre-randomization
};

// Append-only consumption log. Enforces: at most one record per (user,
// item), at most one per (user, period), period within [1, T].
class InteractionLog {
 public:
  InteractionLog(int n_users, int n_items, int periods);

  void append(const InteractionRecord& rec);  // throws std::logic_error on violation

  const std::vector<InteractionRecord>& records() const { return records_; }

  bool has_consumed(int user, int item) const {
    return period_of_[cell(user, item)] != 0;
  }
  // 0 when the pair never interacted.
  std::int32_t period_of(int user, int item) const { return period_of_[cell(user, item)]; }
  // Dense per-user row of consumption periods (0 = never consumed).
  const std::int32_t* period_row(int user) const {
    return &period_of_[static_cast<std::size_t>(user) * n_items_];
  }
  std::int8_t arm_of(int user, int item) const { return arm_of_[cell(user, item)]; }

  int n_users() const { return n_users_; }
  int n_items() const { return n_items_; }
  int periods() const { return periods_; }

 private:
  std::size_t cell(int user, int item) const {
    return static_cast<std::size_t>(user) * n_items_ + item;
  }

  int n_users_;
  int n_items_;
  int periods_;
  std::vector<InteractionRecord> records_;
  std::vector<std::int32_t> period_of_;       // dense (user, item) -> period, 0 = none
  std::vector<std::int8_t> arm_of_;           // dense (user, item) -> arm tag
  std::vector<std::int32_t> last_period_;     // per user, last period with a record
};

}  // namespace symbiosim
