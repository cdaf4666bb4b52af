#include "dledger/net/scheduler.hpp"

#include <algorithm>
#include <stdexcept>

namespace dledger::net {

EventId Scheduler::schedule_at(double t, Action action)
{
  if (t < now_)
    throw std::invalid_argument("cannot schedule an event in the past");
  auto id = next_id_++;
  heap_.push_back({t, id, std::move(action)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  return id;
}

void Scheduler::cancel(EventId id)
{
  if (id < next_id_)
    cancelled_.insert(id);
}

void Scheduler::drop_cancelled()
{
  while (!heap_.empty() && !cancelled_.empty() && cancelled_.erase(heap_.front().id)) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    heap_.pop_back();
  }
}

bool Scheduler::step()
{
  drop_cancelled();
  if (heap_.empty())
    return false;
  std::pop_heap(heap_.begin(), heap_.end(), Later{});
  Event ev = std::move(heap_.back());
  heap_.pop_back();
  now_ = ev.time;
  ++executed_;
  ev.action();
  return true;
}

void Scheduler::run_until(double t)
{
  for (drop_cancelled(); !heap_.empty() && heap_.front().time <= t; drop_cancelled())
    step();
  if (t > now_)
    now_ = t;
}

void Scheduler::run()
{
  while (step()) {
  }
}

} // namespace dledger::net
