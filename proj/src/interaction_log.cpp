#include "symbiosim/interaction_log.hpp"

#include <stdexcept>
#include <string>

namespace symbiosim {

InteractionLog::InteractionLog(int n_users, int n_items, int periods)
    : n_users_(n_users), n_items_(n_items), periods_(periods) {
  if (n_users <= 0 || n_items <= 0 || periods <= 0) {
    throw std::invalid_argument("log dimensions must be positive");
  }
  period_of_.assign(static_cast<std::size_t>(n_users) * n_items, 0);
  arm_of_.assign(static_cast<std::size_t>(n_users) * n_items, kArmNone);
  last_period_.assign(n_users, 0);
}

void InteractionLog::append(const InteractionRecord& rec) {
  if (rec.user < 0 || rec.user >= n_users_ || rec.item < 0 || rec.item >= n_items_) {
    throw std::logic_error("record out of range");
  }
  if (rec.period < 1 || rec.period > periods_) {
    throw std::logic_error("record period outside [1, T]");
  }
  if (period_of_[cell(rec.user, rec.item)] != 0) {
    throw std::logic_error("user " + std::to_string(rec.user) + " already consumed item " +
                           std::to_string(rec.item));
  }
  if (last_period_[rec.user] == rec.period) {
    throw std::logic_error("user " + std::to_string(rec.user) +
                           " already consumed in period " + std::to_string(rec.period));
  }
  if (rec.period < last_period_[rec.user]) {
    throw std::logic_error("records must be appended in period order per user");
  }
  records_.push_back(rec);
  period_of_[cell(rec.user, rec.item)] = rec.period;
  arm_of_[cell(rec.user, rec.item)] = rec.arm;
  last_period_[rec.user] = rec.period;
}

}  // namespace symbiosim
