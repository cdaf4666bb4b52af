#pragma once

#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

namespace dledger::net {

using EventId = std::uint64_t;

/// Discrete-event loop. Simultaneous events run in scheduling order.
class Scheduler
{
public:
  using Action = std::function<void()>;

  double now() const { return now_; }

  EventId schedule_at(double t, Action action);
  EventId schedule(double delay, Action action) { return schedule_at(now_ + delay, std::move(action)); }
  void cancel(EventId id);

  /// Runs the next event; false when none is left.
  bool step();

  /// Runs every event with time <= `t`, then advances the clock to `t`.
  void run_until(double t);
  void run();

  std::size_t queued() const { return heap_.size(); }
  std::uint64_t executed() const { return executed_; }

private:
  struct Event
  {
    double time;
    EventId id;
    Action action;
  };
  struct Later
  {
    bool operator()(const Event& a, const Event& b) const
    {
      return a.time != b.time ? a.time > b.time : a.id > b.id;
    }
  };

  void drop_cancelled();

  double now_ = 0.0;
  EventId next_id_ = 0;
  std::uint64_t executed_ = 0;
  std::vector<Event> heap_;
  std::unordered_set<EventId> cancelled_;
};

} // namespace dledger::net
