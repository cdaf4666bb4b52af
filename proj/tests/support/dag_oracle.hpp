#pragma once
// Reference computations over a plain adjacency list, written without any of
// the ledger's bookkeeping so they can serve as oracles.

#include "dledger/record/types.hpp"

#include <deque>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <vector>

namespace dledger::oracle {

struct PlainDag
{
  // record -> approved records
  std::map<RecordName, std::vector<RecordName>> approves;
  std::map<RecordName, EntityId> generator;

  void add(const Record& r)
  {
    approves[r.name] = r.approved();
    generator[r.name] = r.generator();
  }

  bool reaches(const RecordName& from, const RecordName& to) const
  {
    std::set<RecordName> seen;
    std::vector<RecordName> stack{from};
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      auto it = approves.find(cur);
      if (it == approves.end())
        continue;
      for (const auto& a : it->second) {
        if (a == to)
          return true;
        if (seen.insert(a).second)
          stack.push_back(a);
      }
    }
    return false;
  }

  /// |{gen(d) : d reaches r, d != r}|, minus gen(r) unless count_self.
  std::size_t weight(const RecordName& r, bool count_self = false) const
  {
    std::set<EntityId> gens;
    for (const auto& [d, _] : approves)
      if (d != r && reaches(d, r))
        gens.insert(generator.at(d));
    if (!count_self)
      gens.erase(generator.at(r));
    return gens.size();
  }

  /// weight() for every record at once: a reverse BFS from each record.
  std::map<RecordName, std::size_t> all_weights(bool count_self = false) const
  {
    std::map<RecordName, std::vector<RecordName>> approvers;
    for (const auto& [d, parents] : approves)
      for (const auto& p : parents)
        approvers[p].push_back(d);
    std::map<RecordName, std::size_t> out;
    for (const auto& [r, _] : approves) {
      std::set<RecordName> seen;
      std::set<EntityId> gens;
      std::deque<RecordName> q{r};
      while (!q.empty()) {
        auto cur = q.front();
        q.pop_front();
        auto it = approvers.find(cur);
        if (it == approvers.end())
          continue;
        for (const auto& d : it->second)
          if (seen.insert(d).second) {
            gens.insert(generator.at(d));
            q.push_back(d);
          }
      }
      if (!count_self)
        gens.erase(generator.at(r));
      out[r] = gens.size();
    }
    return out;
  }

  std::set<RecordName> tailing() const
  {
    std::set<RecordName> out;
    for (const auto& [r, _] : approves)
      out.insert(r);
    for (const auto& [r, parents] : approves)
      for (const auto& p : parents)
        out.erase(p);
    return out;
  }

  /// Shortest approval distance from any tailing record.
  std::map<RecordName, std::size_t> distance_from_tailing() const
  {
    std::map<RecordName, std::size_t> dist;
    std::deque<RecordName> q;
    for (const auto& t : tailing()) {
      dist[t] = 0;
      q.push_back(t);
    }
    while (!q.empty()) {
      auto cur = q.front();
      q.pop_front();
      for (const auto& p : approves.at(cur))
        if (approves.contains(p) && !dist.contains(p)) {
          dist[p] = dist[cur] + 1;
          q.push_back(p);
        }
    }
    return dist;
  }
};

} // namespace dledger::oracle
