#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swarmkit {

using EventType = std::string;
using Role = std::string;
using StateId = std::string;
using TypeSet = std::set<EventType>;
using RoleSet = std::set<Role>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed protocol, machine, log or subscription input.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A state-space expansion exceeded its configured cap.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& what, std::size_t cap) : Error(what), cap_(cap) {}
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

// Total map role -> event types; absent roles map to the empty set.
class Subscription {
 public:
  Subscription() = default;
  explicit Subscription(const std::map<Role, TypeSet>& entries);

  const TypeSet& of(const Role& r) const;
  bool contains(const Role& r, const EventType& t) const;
  // Returns true when the entry was not present before.
  bool add(const Role& r, const EventType& t);
  bool add_all(const Role& r, const TypeSet& ts);
  void merge(const Subscription& other);

  // Pointwise superset.
  bool includes(const Subscription& other) const;
  std::size_t total() const;
  // Roles with a non-empty entry.
  RoleSet roles() const;
  const std::map<Role, TypeSet>& entries() const { return entries_; }

  friend bool operator==(const Subscription& a, const Subscription& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::map<Role, TypeSet> entries_;  // never holds empty sets
};

// Set of unordered, irreflexive event-type pairs.
class ConcurrencyRelation {
 public:
  using Pair = std::pair<EventType, EventType>;

  void insert(const EventType& a, const EventType& b);
  bool contains(const EventType& a, const EventType& b) const;
  bool includes(const ConcurrencyRelation& other) const;
  void merge(const ConcurrencyRelation& other);
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  // Each pair ordered (first < second).
  const std::set<Pair>& pairs() const { return pairs_; }

  friend bool operator==(const ConcurrencyRelation& a, const ConcurrencyRelation& b) {
    return a.pairs_ == b.pairs_;
  }

 private:
  std::set<Pair> pairs_;
};

}  // namespace swarmkit
