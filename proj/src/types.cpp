#include "swarmkit/types.hpp"

#include <algorithm>

namespace swarmkit {

namespace {
const TypeSet kEmpty;
}

Subscription::Subscription(const std::map<Role, TypeSet>& entries) {
  for (const auto& [r, ts] : entries) {
    if (!ts.empty()) entries_[r] = ts;
  }
}

const TypeSet& Subscription::of(const Role& r) const {
  auto it = entries_.find(r);
  return it == entries_.end() ? kEmpty : it->second;
}

bool Subscription::contains(const Role& r, const EventType& t) const {
  auto it = entries_.find(r);
  return it != entries_.end() && it->second.count(t) > 0;
}

bool Subscription::add(const Role& r, const EventType& t) { return entries_[r].insert(t).second; }

bool Subscription::add_all(const Role& r, const TypeSet& ts) {
  if (ts.empty()) return false;
  auto& dst = entries_[r];
  std::size_t before = dst.size();
  dst.insert(ts.begin(), ts.end());
  return dst.size() != before;
}

void Subscription::merge(const Subscription& other) {
  for (const auto& [r, ts] : other.entries_) add_all(r, ts);
}

bool Subscription::includes(const Subscription& other) const {
  for (const auto& [r, ts] : other.entries_) {
    const TypeSet& mine = of(r);
    if (!std::includes(mine.begin(), mine.end(), ts.begin(), ts.end())) return false;
  }
  return true;
}

std::size_t Subscription::total() const {
  std::size_t n = 0;
  for (const auto& [r, ts] : entries_) n += ts.size();
  return n;
}

RoleSet Subscription::roles() const {
  RoleSet out;
  for (const auto& [r, ts] : entries_) out.insert(r);
  return out;
}

void ConcurrencyRelation::insert(const EventType& a, const EventType& b) {
  if (a == b) return;
  pairs_.insert(a < b ? Pair{a, b} : Pair{b, a});
}

bool ConcurrencyRelation::contains(const EventType& a, const EventType& b) const {
  if (a == b) return false;
  return pairs_.count(a < b ? Pair{a, b} : Pair{b, a}) > 0;
}

bool ConcurrencyRelation::includes(const ConcurrencyRelation& other) const {
  return std::includes(pairs_.begin(), pairs_.end(), other.pairs_.begin(), other.pairs_.end());
}

void ConcurrencyRelation::merge(const ConcurrencyRelation& other) {
  pairs_.insert(other.pairs_.begin(), other.pairs_.end());
}

}  // namespace swarmkit
