#include "ionfab/netsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <set>
#include <thread>

#include "ionfab/errors.hpp"
#include "ionfab/phys_rates.hpp"
#include "ionfab/report.hpp"
#include "ionfab/rng.hpp"

namespace ionfab::netsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::pair<int, int> elu_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }
}  // namespace

Link::Link(Port x, Port y) : a(std::min(x, y)), b(std::max(x, y)) {}

std::string label(const ArchitectureSpec& spec, const Link& link) {
  auto port = [&](const Port& p) {
    return spec.elus.at(static_cast<std::size_t>(p.elu)).id + ":" + std::to_string(p.ion);
  };
  return port(link.a) + "~" + port(link.b);
}

// ---------------------------------------------------------------------------
// switch

SwitchConfig SwitchConfig::make(const ArchitectureSpec& spec, std::vector<Link> links) {
  std::set<Port> used;
  for (const auto& l : links) {
    for (const Port& p : {l.a, l.b}) {
      if (p.elu < 0 || p.elu >= static_cast<int>(spec.elus.size())) {
        throw ValidationError("link references unknown ELU index " + std::to_string(p.elu));
      }
      const auto& elu = spec.elus[static_cast<std::size_t>(p.elu)];
      if (!elu.is_comm_ion(p.ion)) {
        throw ValidationError("port " + elu.id + ":" + std::to_string(p.ion) +
                              " is not a communication ion");
      }
      if (!used.insert(p).second) {
        throw ValidationError("port " + elu.id + ":" + std::to_string(p.ion) +
                              " used by two links");
      }
    }
    if (l.a.elu == l.b.elu) throw ValidationError("link joins two ports of one ELU");
  }
  if (static_cast<int>(used.size()) > spec.switch_spec.port_count) {
    throw ValidationError("configuration uses " + std::to_string(used.size()) +
                          " ports; switch has " + std::to_string(spec.switch_spec.port_count));
  }
  SwitchConfig cfg;
  std::sort(links.begin(), links.end());
  cfg.links_ = std::move(links);
  return cfg;
}

bool SwitchConfig::contains(const Link& link) const {
  return std::binary_search(links_.begin(), links_.end(), link);
}

bool SwitchConfig::connects(int elu_a, int elu_b) const {
  const auto key = elu_key(elu_a, elu_b);
  return std::any_of(links_.begin(), links_.end(),
                     [&](const Link& l) { return elu_key(l.a.elu, l.b.elu) == key; });
}

Reconfiguration reconfigure(const ArchitectureSpec& spec, const SwitchConfig& current,
                            std::vector<Link> new_links) {
  Reconfiguration r;
  r.config = SwitchConfig::make(spec, std::move(new_links));
  for (const auto& l : r.config.links()) {
    if (!current.contains(l)) r.suspended.push_back(l);
  }
  for (const auto& l : current.links()) {
    if (!r.config.contains(l)) r.removed.push_back(l);
  }
  return r;
}

SwitchConfig auto_config(const ArchitectureSpec& spec,
                         const std::vector<std::pair<int, int>>& elu_pairs) {
  std::set<Port> used;
  std::vector<Link> links;
  auto take_port = [&](int elu) -> Port {
    const auto& e = spec.elus.at(static_cast<std::size_t>(elu));
    std::vector<int> comm = e.comm_ion_indices;
    std::sort(comm.begin(), comm.end());
    for (int ion : comm) {
      if (!used.count({elu, ion})) {
        used.insert({elu, ion});
        return {elu, ion};
      }
    }
    throw ValidationError("ELU " + e.id + " has no free communication ion");
  };
  std::set<std::pair<int, int>> done;
  for (auto [a, b] : elu_pairs) {
    const auto key = elu_key(a, b);
    if (key.first == key.second || !done.insert(key).second) continue;
    const Port pa = take_port(key.first);
    const Port pb = take_port(key.second);
    links.emplace_back(pa, pb);
  }
  return SwitchConfig::make(spec, std::move(links));
}

// ---------------------------------------------------------------------------
// buffer

PairBuffer::PairBuffer(int elu_a, int elu_b, int capacity)
    : elu_a_(std::min(elu_a, elu_b)), elu_b_(std::max(elu_a, elu_b)), capacity_(capacity) {
  if (capacity < 0) throw DomainError("buffer capacity must be >= 0");
}

bool PairBuffer::push(const PairRecord& pair) {
  if (static_cast<int>(queue_.size()) >= capacity_) return false;
  queue_.push_back(pair);
  return true;
}

std::optional<PairRecord> PairBuffer::take(double now, std::vector<PairRecord>* expired) {
  while (!queue_.empty() && queue_.front().expiry <= now) {
    if (expired) expired->push_back(queue_.front());
    queue_.pop_front();
  }
  if (queue_.empty()) return std::nullopt;
  PairRecord p = queue_.front();
  queue_.pop_front();
  return p;
}

std::size_t PairBuffer::purge_expired(double now, std::vector<PairRecord>* expired) {
  const std::size_t before = queue_.size();
  std::deque<PairRecord> keep;
  for (const auto& p : queue_) {
    if (p.expiry <= now) {
      if (expired) expired->push_back(p);
    } else {
      keep.push_back(p);
    }
  }
  queue_ = std::move(keep);
  return before - queue_.size();
}

std::vector<PairRecord> PairBuffer::clear() {
  std::vector<PairRecord> out(queue_.begin(), queue_.end());
  queue_.clear();
  return out;
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kReconfigStart:
      return "RECONFIG_START";
    case EventKind::kReconfigDone:
      return "RECONFIG_DONE";
    case EventKind::kReloadDone:
      return "RELOAD_DONE";
    case EventKind::kCollision:
      return "COLLISION";
    case EventKind::kSuccess:
      return "SUCCESS";
    case EventKind::kPairRequest:
      return "PAIR_REQUEST";
    case EventKind::kPairDelivered:
      return "PAIR_DELIVERED";
    case EventKind::kPairExpired:
      return "PAIR_EXPIRED";
    case EventKind::kPairDropped:
      return "PAIR_DROPPED";
    case EventKind::kPairInvalidated:
      return "PAIR_INVALIDATED";
    case EventKind::kAttempt:
      return "ATTEMPT";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// simulator

struct Simulator::Impl {
  struct QueuedEvent {
    double time;
    EventKind kind;
    std::uint64_t seq;
    int target;  // schedule entry, link, ELU or request index
    std::uint64_t generation;

    bool operator>(const QueuedEvent& o) const {
      if (time != o.time) return time > o.time;
      if (kind != o.kind) return kind > o.kind;
      return seq > o.seq;
    }
  };

  struct LinkState {
    Link link;
    std::string label;
    Rng rng;
    bool in_config = false;
    bool running = false;
    double reconfig_until = 0.0;
    double epoch = 0.0;                  // activation time
    std::uint64_t attempts_in_epoch = 0; // attempts of completed successes this epoch
    std::uint64_t next_success = 0;      // attempt index (this epoch) of pending success
    std::uint64_t generation = 0;
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;
  };

  struct Request {
    double time;
    int elu_a;
    int elu_b;
    bool served = false;
  };

  Impl(const ArchitectureSpec& s, std::vector<ScheduledConfig> sched, std::uint64_t sd,
       SimOptions opts)
      : spec(s), schedule(std::move(sched)), seed(sd), options(opts) {
    require_valid(spec);
    for (std::size_t i = 1; i < schedule.size(); ++i) {
      if (schedule[i].time < schedule[i - 1].time) {
        throw ValidationError("switch schedule times must be sorted");
      }
    }
    for (const auto& entry : schedule) {
      if (!(entry.time >= 0.0) || !std::isfinite(entry.time)) {
        throw ValidationError("switch schedule times must be finite and >= 0");
      }
      // Re-validate: configs may have been built against another spec.
      SwitchConfig::make(spec, entry.config.links());
    }
    p = options.success_probability.value_or(
        rates::link_success_probability(spec.collection_fraction, spec.detector_efficiency));
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("success probability must lie in [0, 1]");
    rate = spec.attempt_rate;
    reload_until.assign(spec.elus.size(), 0.0);

    for (std::size_t i = 0; i < schedule.size(); ++i) {
      push(schedule[i].time, EventKind::kReconfigStart, static_cast<int>(i));
    }
    if (options.collisions) {
      for (std::size_t e = 0; e < spec.elus.size(); ++e) {
        const double lambda = collision_rate(static_cast<int>(e));
        if (lambda > 0.0) {
          collision_rng.emplace_back(seed, 0xC011000000ULL + e);
          push(collision_rng.back().exponential(lambda), EventKind::kCollision, static_cast<int>(e));
        } else {
          collision_rng.emplace_back(seed, 0xC011000000ULL + e);
        }
      }
    }
  }

  double collision_rate(int elu) const {
    const auto& e = spec.elus[static_cast<std::size_t>(elu)];
    return e.collision_rate_per_ion * e.n_ions;
  }

  void push(double time, EventKind kind, int target, std::uint64_t generation = 0) {
    queue.push({time, kind, next_seq++, target, generation});
  }

  void log(double time, EventKind kind, const std::string& link, int elu_a, int elu_b) {
    if (!options.record_events) return;
    LogEntry entry;
    entry.time = time;
    entry.kind = kind;
    entry.link = link;
    if (elu_a >= 0) entry.elu_a = spec.elus[static_cast<std::size_t>(elu_a)].id;
    if (elu_b >= 0) entry.elu_b = spec.elus[static_cast<std::size_t>(elu_b)].id;
    entry.seq = events.size();
    events.push_back(std::move(entry));
  }

  void log_link(double time, EventKind kind, const LinkState& ls) {
    log(time, kind, ls.label, ls.link.a.elu, ls.link.b.elu);
  }

  void record_occupancy(double time, const PairBuffer& buf) {
    if (!options.record_occupancy) return;
    occupancy.push_back({time, buf.elu_a(), buf.elu_b(), static_cast<int>(buf.size())});
  }

  int link_index(const Link& link) {
    auto it = link_ids.find(link);
    if (it != link_ids.end()) return it->second;
    const int id = static_cast<int>(links.size());
    const std::uint64_t stream = (static_cast<std::uint64_t>(link.a.elu) << 48) ^
                                 (static_cast<std::uint64_t>(link.a.ion) << 32) ^
                                 (static_cast<std::uint64_t>(link.b.elu) << 16) ^
                                 static_cast<std::uint64_t>(link.b.ion);
    links.push_back(LinkState{link, netsim::label(spec, link), Rng(seed, stream)});
    link_ids.emplace(link, id);
    return id;
  }

  PairBuffer& buffer(int elu_a, int elu_b) {
    const auto key = elu_key(elu_a, elu_b);
    auto it = buffers.find(key);
    if (it == buffers.end()) {
      it = buffers.emplace(key, PairBuffer(key.first, key.second, spec.buffer_capacity)).first;
    }
    return it->second;
  }

  double attempt_time(const LinkState& ls, std::uint64_t index) const {
    return ls.epoch + static_cast<double>(index) / rate;
  }

  // Number of attempts j >= 1 of the current epoch with time < t (strict) or <= t.
  std::uint64_t attempts_before(const LinkState& ls, double t, bool inclusive) const {
    if (t <= ls.epoch) return 0;
    double guess = std::floor((t - ls.epoch) * rate);
    if (guess > 9.0e18) guess = 9.0e18;
    auto j = static_cast<std::uint64_t>(std::max(0.0, guess));
    auto fits = [&](std::uint64_t idx) {
      const double at = attempt_time(ls, idx);
      return inclusive ? at <= t : at < t;
    };
    while (fits(j + 1)) ++j;
    while (j > 0 && !fits(j)) --j;
    return j;
  }

  void draw_next_success(LinkState& ls, int id) {
    if (p <= 0.0) {
      ls.next_success = std::numeric_limits<std::uint64_t>::max();
      return;
    }
    const std::uint64_t k = ls.rng.geometric(p);
    if (k > std::numeric_limits<std::uint64_t>::max() - ls.attempts_in_epoch) {
      ls.next_success = std::numeric_limits<std::uint64_t>::max();
      return;
    }
    ls.next_success = ls.attempts_in_epoch + k;
    push(attempt_time(ls, ls.next_success), EventKind::kSuccess, id, ls.generation);
  }

  void start_link(int id, double t) {
    LinkState& ls = links[static_cast<std::size_t>(id)];
    ls.running = true;
    ls.epoch = t;
    ls.attempts_in_epoch = 0;
    draw_next_success(ls, id);
  }

  void stop_link(int id, double t) {
    LinkState& ls = links[static_cast<std::size_t>(id)];
    if (!ls.running) return;
    std::uint64_t done = attempts_before(ls, t, false);
    if (ls.next_success != std::numeric_limits<std::uint64_t>::max()) {
      done = std::min(done, ls.next_success - 1);
    }
    ls.attempts += done - std::min(done, ls.attempts_in_epoch);
    ls.running = false;
    ++ls.generation;
  }

  void try_resume(int id, double t) {
    LinkState& ls = links[static_cast<std::size_t>(id)];
    if (!ls.in_config || ls.running || ls.reconfig_until > t) return;
    if (reload_until[static_cast<std::size_t>(ls.link.a.elu)] > t) return;
    if (reload_until[static_cast<std::size_t>(ls.link.b.elu)] > t) return;
    start_link(id, t);
  }

  void apply_config(int entry, double t) {
    const auto& cfg = schedule[static_cast<std::size_t>(entry)].config;
    const bool initial = entry == 0 && t == 0.0;
    log(t, EventKind::kReconfigStart, "", -1, -1);
    for (std::size_t id = 0; id < links.size(); ++id) {
      LinkState& ls = links[id];
      if (ls.in_config && !cfg.contains(ls.link)) {
        stop_link(static_cast<int>(id), t);
        ls.in_config = false;
      }
    }
    for (const auto& link : cfg.links()) {
      const int id = link_index(link);
      LinkState& ls = links[static_cast<std::size_t>(id)];
      if (ls.in_config) continue;
      ls.in_config = true;
      if (initial) {
        ls.reconfig_until = t;
        try_resume(id, t);
      } else {
        ls.reconfig_until = t + spec.switch_spec.reconfiguration_time;
        push(ls.reconfig_until, EventKind::kReconfigDone, id);
      }
    }
  }

  void expire_logged(const std::vector<PairRecord>& expired, double t, int a, int b) {
    ledger.expired += expired.size();
    for (std::size_t i = 0; i < expired.size(); ++i) log(t, EventKind::kPairExpired, "", a, b);
  }

  void deliver(int request, const PairRecord& pair, double t) {
    Request& r = requests[static_cast<std::size_t>(request)];
    r.served = true;
    ++ledger.delivered;
    deliveries.push_back({request, r.time, t, pair.id});
    delivery_index[request] = deliveries.size() - 1;
    log(t, EventKind::kPairDelivered, "", r.elu_a, r.elu_b);
  }

  void serve(int elu_a, int elu_b, double t) {
    const auto key = elu_key(elu_a, elu_b);
    auto& waiting = pending[key];
    PairBuffer& buf = buffer(elu_a, elu_b);
    bool changed = false;
    while (!waiting.empty()) {
      std::vector<PairRecord> expired;
      auto pair = buf.take(t, &expired);
      expire_logged(expired, t, key.first, key.second);
      changed = changed || !expired.empty();
      if (!pair) break;
      changed = true;
      deliver(waiting.front(), *pair, t);
      waiting.pop_front();
    }
    if (changed) record_occupancy(t, buf);
  }

  void on_success(const QueuedEvent& ev) {
    LinkState& ls = links[static_cast<std::size_t>(ev.target)];
    if (!ls.running || ev.generation != ls.generation) return;
    ls.attempts += ls.next_success - ls.attempts_in_epoch;
    ls.attempts_in_epoch = ls.next_success;
    ++ls.successes;
    ++ledger.successes;
    log_link(ev.time, EventKind::kSuccess, ls);

    PairRecord pair{next_pair_id++, ev.time,
                    spec.pair_lifetime ? ev.time + *spec.pair_lifetime : kInf};
    const int a = ls.link.a.elu;
    const int b = ls.link.b.elu;
    const auto key = elu_key(a, b);
    auto& waiting = pending[key];
    PairBuffer& buf = buffer(a, b);
    std::vector<PairRecord> expired;
    buf.purge_expired(ev.time, &expired);
    expire_logged(expired, ev.time, key.first, key.second);
    if (!waiting.empty()) {
      // A waiting request implies the buffer held no live pair.
      deliver(waiting.front(), pair, ev.time);
      waiting.pop_front();
    } else if (buf.push(pair)) {
      record_occupancy(ev.time, buf);
    } else {
      ++ledger.overflowed;
      log_link(ev.time, EventKind::kPairDropped, ls);
    }
    if (!expired.empty()) record_occupancy(ev.time, buf);
    draw_next_success(ls, ev.target);
  }

  void on_collision(const QueuedEvent& ev) {
    const int elu = ev.target;
    ++collisions;
    log(ev.time, EventKind::kCollision, "", elu, -1);
    for (auto& [key, buf] : buffers) {
      if (key.first != elu && key.second != elu) continue;
      const auto lost = buf.clear();
      ledger.invalidated += lost.size();
      for (std::size_t i = 0; i < lost.size(); ++i) {
        log(ev.time, EventKind::kPairInvalidated, "", key.first, key.second);
      }
      if (!lost.empty()) record_occupancy(ev.time, buf);
    }
    for (std::size_t id = 0; id < links.size(); ++id) {
      const Link& l = links[id].link;
      if (l.a.elu == elu || l.b.elu == elu) stop_link(static_cast<int>(id), ev.time);
    }
    const double until = ev.time + spec.elus[static_cast<std::size_t>(elu)].reload_time;
    reload_until[static_cast<std::size_t>(elu)] =
        std::max(reload_until[static_cast<std::size_t>(elu)], until);
    push(until, EventKind::kReloadDone, elu);
    auto& rng = collision_rng[static_cast<std::size_t>(elu)];
    push(ev.time + rng.exponential(collision_rate(elu)), EventKind::kCollision, elu);
  }

  void on_reload_done(const QueuedEvent& ev) {
    const int elu = ev.target;
    if (reload_until[static_cast<std::size_t>(elu)] > ev.time) return;  // superseded
    log(ev.time, EventKind::kReloadDone, "", elu, -1);
    for (std::size_t id = 0; id < links.size(); ++id) {
      const Link& l = links[id].link;
      if (l.a.elu == elu || l.b.elu == elu) try_resume(static_cast<int>(id), ev.time);
    }
  }

  void on_reconfig_done(const QueuedEvent& ev) {
    LinkState& ls = links[static_cast<std::size_t>(ev.target)];
    if (!ls.in_config || ls.reconfig_until != ev.time) return;  // stale
    log_link(ev.time, EventKind::kReconfigDone, ls);
    try_resume(ev.target, ev.time);
  }

  void on_request(const QueuedEvent& ev) {
    const Request& r = requests[static_cast<std::size_t>(ev.target)];
    log(ev.time, EventKind::kPairRequest, "", r.elu_a, r.elu_b);
    pending[elu_key(r.elu_a, r.elu_b)].push_back(ev.target);
    serve(r.elu_a, r.elu_b, ev.time);
  }

  bool step() {
    if (queue.empty()) return false;
    const QueuedEvent ev = queue.top();
    queue.pop();
    clock = ev.time;
    switch (ev.kind) {
      case EventKind::kReconfigStart:
        apply_config(ev.target, ev.time);
        break;
      case EventKind::kReconfigDone:
        on_reconfig_done(ev);
        break;
      case EventKind::kReloadDone:
        on_reload_done(ev);
        break;
      case EventKind::kCollision:
        on_collision(ev);
        break;
      case EventKind::kSuccess:
        on_success(ev);
        break;
      case EventKind::kPairRequest:
        on_request(ev);
        break;
      default:
        break;
    }
    return true;
  }

  SimResult finish(double horizon) {
    if (!(horizon >= clock)) throw DomainError("horizon precedes the simulation clock");
    run_until(horizon);
    clock = horizon;
    SimResult res;
    res.horizon = horizon;
    res.seed = seed;
    res.success_probability = p;
    for (std::size_t id = 0; id < links.size(); ++id) {
      LinkState& ls = links[id];
      if (ls.running) {
        std::uint64_t done = attempts_before(ls, horizon, true);
        if (ls.next_success != std::numeric_limits<std::uint64_t>::max()) {
          done = std::min(done, ls.next_success - 1);
        }
        ls.attempts += done - std::min(done, ls.attempts_in_epoch);
        ls.attempts_in_epoch = std::max(ls.attempts_in_epoch, done);
      }
    }
    // Report links in canonical order, independent of activation order.
    std::vector<std::size_t> order(links.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return links[x].link < links[y].link; });
    for (std::size_t id : order) {
      const LinkState& ls = links[id];
      res.links.push_back({ls.link, ls.label, spec.elus[static_cast<std::size_t>(ls.link.a.elu)].id,
                           spec.elus[static_cast<std::size_t>(ls.link.b.elu)].id, ls.attempts,
                           ls.successes});
      res.attempts += ls.attempts;
      res.successes += ls.successes;
    }
    res.measured_rate = static_cast<double>(res.successes) / horizon;

    for (auto& [key, buf] : buffers) {
      std::vector<PairRecord> expired;
      buf.purge_expired(horizon, &expired);
      expire_logged(expired, horizon, key.first, key.second);
      if (!expired.empty()) record_occupancy(horizon, buf);
      ledger.residual += buf.size();
    }
    res.ledger = ledger;

    res.latency.requests = requests.size();
    double sum = 0.0;
    for (const auto& d : deliveries) {
      const double lat = d.delivered - d.requested;
      sum += lat;
      res.latency.max = std::max(res.latency.max, lat);
    }
    res.latency.served = deliveries.size();
    res.latency.pending = requests.size() - deliveries.size();
    res.latency.mean = deliveries.empty() ? 0.0 : sum / static_cast<double>(deliveries.size());
    res.collisions = collisions;
    res.deliveries = deliveries;
    res.occupancy = occupancy;
    res.events = events;
    return res;
  }

  void run_until(double t) {
    while (!queue.empty() && queue.top().time <= t) step();
  }

  const ArchitectureSpec spec;
  std::vector<ScheduledConfig> schedule;
  std::uint64_t seed;
  SimOptions options;
  double p = 0.0;
  double rate = 0.0;
  double clock = 0.0;

  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue;
  std::uint64_t next_seq = 0;
  std::uint64_t next_pair_id = 0;

  std::vector<LinkState> links;
  std::map<Link, int> link_ids;
  std::map<std::pair<int, int>, PairBuffer> buffers;
  std::map<std::pair<int, int>, std::deque<int>> pending;
  std::vector<double> reload_until;
  std::vector<Rng> collision_rng;

  std::vector<Request> requests;
  std::vector<Delivery> deliveries;
  std::map<int, std::size_t> delivery_index;
  PairLedger ledger;
  std::uint64_t collisions = 0;
  std::vector<OccupancySample> occupancy;
  std::vector<LogEntry> events;
};

Simulator::Simulator(const ArchitectureSpec& spec, std::vector<ScheduledConfig> schedule,
                     std::uint64_t seed, SimOptions options)
    : impl_(std::make_unique<Impl>(spec, std::move(schedule), seed, options)) {}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

int Simulator::submit_request(double time, int elu_a, int elu_b) {
  auto& s = *impl_;
  const int n = static_cast<int>(s.spec.elus.size());
  if (elu_a < 0 || elu_b < 0 || elu_a >= n || elu_b >= n || elu_a == elu_b) {
    throw ValidationError("pair request needs two distinct known ELUs");
  }
  if (!std::isfinite(time) || time < s.clock) {
    throw ValidationError("pair request time precedes the simulation clock");
  }
  const bool linkable = std::any_of(s.schedule.begin(), s.schedule.end(), [&](const auto& e) {
    return e.config.connects(elu_a, elu_b);
  });
  if (!linkable) {
    throw ValidationError("no scheduled configuration links " +
                          s.spec.elus[static_cast<std::size_t>(elu_a)].id + " and " +
                          s.spec.elus[static_cast<std::size_t>(elu_b)].id);
  }
  const int id = static_cast<int>(s.requests.size());
  s.requests.push_back({time, elu_a, elu_b});
  s.push(time, EventKind::kPairRequest, id);
  return id;
}

double Simulator::now() const { return impl_->clock; }

std::optional<double> Simulator::next_event_time() const {
  if (impl_->queue.empty()) return std::nullopt;
  return impl_->queue.top().time;
}

bool Simulator::step() { return impl_->step(); }

void Simulator::run_until(double t) { impl_->run_until(t); }

std::optional<Delivery> Simulator::delivery(int request) const {
  auto it = impl_->delivery_index.find(request);
  if (it == impl_->delivery_index.end()) return std::nullopt;
  return impl_->deliveries[it->second];
}

SimResult Simulator::finish(double horizon) { return impl_->finish(horizon); }

SimResult run_sim(const ArchitectureSpec& spec, const std::vector<ScheduledConfig>& schedule,
                  const std::vector<PairRequest>& demand, double horizon, std::uint64_t seed,
                  const SimOptions& options) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be > 0");
  Simulator sim(spec, schedule, seed, options);
  for (const auto& r : demand) sim.submit_request(r.time, r.elu_a, r.elu_b);
  return sim.finish(horizon);
}

// ---------------------------------------------------------------------------

SimSummary SimSummary::of(const SimResult& r) {
  SimSummary s;
  s.runs = 1;
  s.horizon_total = r.horizon;
  s.attempts = r.attempts;
  s.successes = r.successes;
  s.ledger = r.ledger;
  s.collisions = r.collisions;
  s.served = r.latency.served;
  s.latency_sum = r.latency.mean * static_cast<double>(r.latency.served);
  s.latency_max = r.latency.max;
  return s;
}

SimSummary SimSummary::merged(const SimSummary& o) const {
  SimSummary s = *this;
  s.runs += o.runs;
  s.horizon_total += o.horizon_total;
  s.attempts += o.attempts;
  s.successes += o.successes;
  s.ledger.successes += o.ledger.successes;
  s.ledger.delivered += o.ledger.delivered;
  s.ledger.expired += o.ledger.expired;
  s.ledger.invalidated += o.ledger.invalidated;
  s.ledger.overflowed += o.ledger.overflowed;
  s.ledger.residual += o.ledger.residual;
  s.collisions += o.collisions;
  s.served += o.served;
  s.latency_sum += o.latency_sum;
  s.latency_max = std::max(s.latency_max, o.latency_max);
  return s;
}

namespace {

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("IONFAB_THREADS")) n = static_cast<unsigned>(std::atoi(env));
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

std::vector<SimResult> run_ensemble(const ArchitectureSpec& spec,
                                    const std::vector<ScheduledConfig>& schedule,
                                    const std::vector<PairRequest>& demand, double horizon,
                                    const std::vector<std::uint64_t>& seeds,
                                    const SimOptions& options, unsigned threads) {
  std::vector<SimResult> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        results[i] = run_sim(spec, schedule, demand, horizon, seeds[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = worker_count(threads, seeds.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

RateCheck theoretical_rate_check(const ArchitectureSpec& spec, const Link& link,
                                 std::uint64_t seed, std::optional<double> success_probability) {
  const auto cfg = SwitchConfig::make(spec, {link});
  SimOptions opts;
  opts.record_events = false;
  opts.record_occupancy = false;
  opts.collisions = false;
  opts.success_probability = success_probability;
  const double horizon = static_cast<double>(kRateCheckAttempts) / spec.attempt_rate;
  const auto res = run_sim(spec, {{0.0, cfg}}, {}, horizon, seed, opts);

  RateCheck rc;
  rc.attempts = res.attempts;
  rc.successes = res.successes;
  rc.horizon = horizon;
  rc.measured_rate = res.measured_rate;
  rc.analytic_rate = spec.attempt_rate * res.success_probability;
  const double n = static_cast<double>(res.attempts);
  const double var = n * res.success_probability * (1.0 - res.success_probability);
  const double expected = n * res.success_probability;
  rc.z_score = var > 0.0 ? (static_cast<double>(res.successes) - expected) / std::sqrt(var) : 0.0;
  return rc;
}

// ---------------------------------------------------------------------------
// I/O

std::string events_csv(const std::vector<LogEntry>& events) {
  CsvTable t;
  t.header = {"time_s", "kind", "link", "elu_a", "elu_b", "seq"};
  for (const auto& e : events) {
    t.rows.push_back({format_number(e.time), to_string(e.kind), e.link, e.elu_a, e.elu_b,
                      std::to_string(e.seq)});
  }
  return t.str();
}

nlohmann::json to_json(const SimResult& r, bool include_events) {
  nlohmann::json links = nlohmann::json::array();
  for (const auto& l : r.links) {
    links.push_back({{"link", l.label},
                     {"elu_a", l.elu_a},
                     {"elu_b", l.elu_b},
                     {"attempts", l.attempts},
                     {"successes", l.successes},
                     {"measured_rate", static_cast<double>(l.successes) / r.horizon}});
  }
  nlohmann::json occupancy = nlohmann::json::array();
  for (const auto& o : r.occupancy) occupancy.push_back({o.time, o.elu_a, o.elu_b, o.occupancy});
  nlohmann::json doc = {
      {"schema", kSimSchemaId},
      {"horizon", r.horizon},
      {"seed", r.seed},
      {"success_probability", r.success_probability},
      {"links", links},
      {"attempts", r.attempts},
      {"successes", r.successes},
      {"measured_rate", r.measured_rate},
      {"ledger",
       {{"successes", r.ledger.successes},
        {"delivered", r.ledger.delivered},
        {"expired", r.ledger.expired},
        {"invalidated", r.ledger.invalidated},
        {"overflowed", r.ledger.overflowed},
        {"residual", r.ledger.residual},
        {"balanced", r.ledger.balanced()}}},
      {"latency",
       {{"requests", r.latency.requests},
        {"served", r.latency.served},
        {"pending", r.latency.pending},
        {"mean", r.latency.mean},
        {"max", r.latency.max}}},
      {"collisions", r.collisions},
      {"occupancy", occupancy}};
  if (include_events) {
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& e : r.events) {
      ev.push_back({e.time, to_string(e.kind), e.link, e.elu_a, e.elu_b, e.seq});
    }
    doc["events"] = ev;
  }
  return doc;
}

namespace {

Port parse_port(const ArchitectureSpec& spec, const nlohmann::json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + ": expected \"ELU:ion\" string");
  const std::string s = j.get<std::string>();
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) throw SchemaError(where + ": expected \"ELU:ion\", got '" + s + "'");
  const int elu = spec.elu_index(s.substr(0, colon));
  if (elu < 0) throw SchemaError(where + ": unknown ELU '" + s.substr(0, colon) + "'");
  try {
    std::size_t used = 0;
    const int ion = std::stoi(s.substr(colon + 1), &used);
    if (used != s.size() - colon - 1) throw std::invalid_argument("trailing");
    return {elu, ion};
  } catch (const std::exception&) {
    throw SchemaError(where + ": bad ion index in '" + s + "'");
  }
}

int parse_elu(const ArchitectureSpec& spec, const nlohmann::json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + ": expected ELU id string");
  const int e = spec.elu_index(j.get<std::string>());
  if (e < 0) throw SchemaError(where + ": unknown ELU '" + j.get<std::string>() + "'");
  return e;
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> keys,
                    const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected object");
  for (const auto& [k, _] : obj.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* x) { return k == x; }) == keys.end()) {
      throw SchemaError(where + "." + k + ": unknown key");
    }
  }
}

}  // namespace

std::vector<ScheduledConfig> schedule_from_json(const ArchitectureSpec& spec,
                                                const nlohmann::json& doc) {
  reject_unknown(doc, {"configs"}, "schedule");
  if (!doc.contains("configs") || !doc["configs"].is_array()) {
    throw SchemaError("schedule.configs: missing or not an array");
  }
  std::vector<ScheduledConfig> out;
  for (std::size_t i = 0; i < doc["configs"].size(); ++i) {
    const auto& c = doc["configs"][i];
    const std::string where = "schedule.configs[" + std::to_string(i) + "]";
    reject_unknown(c, {"time", "links"}, where);
    if (!c.contains("time") || !c["time"].is_number()) throw SchemaError(where + ".time: expected number");
    if (!c.contains("links") || !c["links"].is_array()) throw SchemaError(where + ".links: expected array");
    std::vector<Link> links;
    for (std::size_t k = 0; k < c["links"].size(); ++k) {
      const auto& l = c["links"][k];
      const std::string lw = where + ".links[" + std::to_string(k) + "]";
      if (!l.is_array() || l.size() != 2) throw SchemaError(lw + ": expected two ports");
      links.emplace_back(parse_port(spec, l[0], lw), parse_port(spec, l[1], lw));
    }
    out.push_back({c["time"].get<double>(), SwitchConfig::make(spec, std::move(links))});
  }
  return out;
}

std::vector<PairRequest> demand_from_json(const ArchitectureSpec& spec, const nlohmann::json& doc) {
  reject_unknown(doc, {"requests"}, "demand");
  if (!doc.contains("requests") || !doc["requests"].is_array()) {
    throw SchemaError("demand.requests: missing or not an array");
  }
  std::vector<PairRequest> out;
  for (std::size_t i = 0; i < doc["requests"].size(); ++i) {
    const auto& r = doc["requests"][i];
    const std::string where = "demand.requests[" + std::to_string(i) + "]";
    reject_unknown(r, {"time", "elus", "count", "interval"}, where);
    if (!r.contains("time") || !r["time"].is_number()) throw SchemaError(where + ".time: expected number");
    if (!r.contains("elus") || !r["elus"].is_array() || r["elus"].size() != 2) {
      throw SchemaError(where + ".elus: expected two ELU ids");
    }
    const int a = parse_elu(spec, r["elus"][0], where + ".elus[0]");
    const int b = parse_elu(spec, r["elus"][1], where + ".elus[1]");
    const int count = r.value("count", 1);
    const double interval = r.value("interval", 0.0);
    const double t0 = r["time"].get<double>();
    for (int k = 0; k < count; ++k) out.push_back({t0 + k * interval, a, b});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PairRequest& x, const PairRequest& y) { return x.time < y.time; });
  return out;
}

}  // namespace ionfab::netsim
