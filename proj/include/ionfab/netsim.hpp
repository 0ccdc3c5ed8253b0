#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ionfab/arch_model.hpp"

namespace ionfab::netsim {

inline constexpr const char* kSimSchemaId = "ionfab-sim/1";

// A switch port is one communication ion.
struct Port {
  int elu = 0;
  int ion = 0;  // chain position

  auto operator<=>(const Port&) const = default;
};

// Unordered port pair, stored with a < b.
struct Link {
  Port a;
  Port b;

  Link() = default;
  Link(Port x, Port y);
  auto operator<=>(const Link&) const = default;
};

std::string label(const ArchitectureSpec& spec, const Link& link);

// Non-blocking matching of ports.
class SwitchConfig {
 public:
  SwitchConfig() = default;

  // Throws ValidationError if a port is reused, a port is not a
  // communication ion, both ends sit in one ELU, or the switch has too few
  // ports.
  static SwitchConfig make(const ArchitectureSpec& spec, std::vector<Link> links);

  const std::vector<Link>& links() const { return links_; }
  bool contains(const Link& link) const;
  bool connects(int elu_a, int elu_b) const;

  bool operator==(const SwitchConfig&) const = default;

 private:
  std::vector<Link> links_;  // sorted
};

struct Reconfiguration {
  SwitchConfig config;
  std::vector<Link> suspended;  // links new in `config`; they wait reconfiguration_time
  std::vector<Link> removed;
};

Reconfiguration reconfigure(const ArchitectureSpec& spec, const SwitchConfig& current,
                            std::vector<Link> new_links);

struct ScheduledConfig {
  double time = 0.0;
  SwitchConfig config;
};

struct PairRequest {
  double time = 0.0;
  int elu_a = 0;
  int elu_b = 0;
};

struct PairRecord {
  std::uint64_t id = 0;
  double created = 0.0;
  double expiry = 0.0;  // +inf when pairs do not expire
};

// FIFO of entangled pairs shared by one unordered ELU pair.
class PairBuffer {
 public:
  PairBuffer(int elu_a, int elu_b, int capacity);

  int elu_a() const { return elu_a_; }
  int elu_b() const { return elu_b_; }
  int capacity() const { return capacity_; }
  std::size_t size() const { return queue_.size(); }
  bool empty() const { return queue_.empty(); }

  // Tail drop: returns false and leaves the queue untouched when full.
  bool push(const PairRecord& pair);
  // Removes expired pairs from the head (appending them to `expired`), then
  // returns the oldest live pair, if any.
  std::optional<PairRecord> take(double now, std::vector<PairRecord>* expired = nullptr);
  // Drops every pair with expiry <= now.
  std::size_t purge_expired(double now, std::vector<PairRecord>* expired = nullptr);
  std::vector<PairRecord> clear();

 private:
  int elu_a_;
  int elu_b_;
  int capacity_;
  std::deque<PairRecord> queue_;
};

// Queue priority at equal time follows declaration order up to
// kPairRequest. The remaining kinds are written to the log when the event
// that causes them is processed.
enum class EventKind {
  kReconfigStart,
  kReconfigDone,
  kReloadDone,
  kCollision,
  kSuccess,
  kPairRequest,
  kPairDelivered,
  kPairExpired,
  kPairDropped,
  kPairInvalidated,
  kAttempt,
};

const char* to_string(EventKind kind);

struct LogEntry {
  double time = 0.0;
  EventKind kind = EventKind::kSuccess;
  std::string link;  // empty when not link-specific
  std::string elu_a;
  std::string elu_b;
  std::uint64_t seq = 0;
};

struct SimOptions {
  bool record_events = true;
  bool record_occupancy = true;
  // Replaces (F eta_D)^2 / 2 when set.
  std::optional<double> success_probability;
  // Collisions are simulated only when enabled and the per-ion rate is > 0.
  bool collisions = true;
};

struct LinkStats {
  Link link;
  std::string label;
  std::string elu_a;
  std::string elu_b;
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
};

// Every heralded pair ends in exactly one of these bins.
struct PairLedger {
  std::uint64_t successes = 0;
  std::uint64_t delivered = 0;
  std::uint64_t expired = 0;
  std::uint64_t invalidated = 0;  // lost to collisions
  std::uint64_t overflowed = 0;   // tail-dropped at a full buffer
  std::uint64_t residual = 0;     // buffered at the horizon

  bool balanced() const {
    return delivered + expired + invalidated + overflowed + residual == successes;
  }
};

struct LatencyStats {
  std::uint64_t requests = 0;
  std::uint64_t served = 0;
  std::uint64_t pending = 0;  // still waiting at the horizon
  double mean = 0.0;
  double max = 0.0;
};

struct OccupancySample {
  double time = 0.0;
  int elu_a = 0;
  int elu_b = 0;
  int occupancy = 0;
};

struct Delivery {
  int request = 0;
  double requested = 0.0;
  double delivered = 0.0;
  std::uint64_t pair = 0;
};

struct SimResult {
  double horizon = 0.0;
  std::uint64_t seed = 0;
  double success_probability = 0.0;
  std::vector<LinkStats> links;
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  double measured_rate = 0.0;  // successes / horizon
  PairLedger ledger;
  LatencyStats latency;
  std::uint64_t collisions = 0;
  std::vector<Delivery> deliveries;
  std::vector<OccupancySample> occupancy;
  std::vector<LogEntry> events;
};

// Event-driven simulator. Attempts on an active link are periodic with
// spacing 1/R from the moment the link becomes active; the attempt index of
// the next success is drawn from a geometric distribution, which is exactly
// the law of a Bernoulli(p) trial sequence, so individual failed attempts
// are counted but never materialised as events.
class Simulator {
 public:
  Simulator(const ArchitectureSpec& spec, std::vector<ScheduledConfig> schedule,
            std::uint64_t seed, SimOptions options = {});
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  // Queues a pair request. `time` must not precede the current clock.
  // Returns the request id. Throws ValidationError when no scheduled
  // configuration ever links the two ELUs.
  int submit_request(double time, int elu_a, int elu_b);

  double now() const;
  std::optional<double> next_event_time() const;
  // Processes one queued event; false when the queue is empty.
  bool step();
  // Processes every event with time <= t.
  void run_until(double t);
  std::optional<Delivery> delivery(int request) const;

  // Closes the run at `horizon` (>= now) and returns the aggregate.
  SimResult finish(double horizon);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Validates inputs, runs to `horizon`, returns the result. Identical
// arguments produce bit-identical results.
SimResult run_sim(const ArchitectureSpec& spec, const std::vector<ScheduledConfig>& schedule,
                  const std::vector<PairRequest>& demand, double horizon, std::uint64_t seed,
                  const SimOptions& options = {});

// Associative merge of aggregate statistics over runs.
struct SimSummary {
  std::uint64_t runs = 0;
  double horizon_total = 0.0;
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  PairLedger ledger;
  std::uint64_t collisions = 0;
  std::uint64_t served = 0;
  double latency_sum = 0.0;
  double latency_max = 0.0;

  static SimSummary of(const SimResult& r);
  SimSummary merged(const SimSummary& other) const;
  double mean_rate() const { return horizon_total > 0 ? successes / horizon_total : 0.0; }
};

// Runs one simulation per seed, in parallel across `threads` workers
// (0 = IONFAB_THREADS or hardware concurrency). Results are in seed order
// and do not depend on the worker count.
std::vector<SimResult> run_ensemble(const ArchitectureSpec& spec,
                                    const std::vector<ScheduledConfig>& schedule,
                                    const std::vector<PairRequest>& demand, double horizon,
                                    const std::vector<std::uint64_t>& seeds,
                                    const SimOptions& options, unsigned threads = 0);

struct RateCheck {
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  double horizon = 0.0;
  double measured_rate = 0.0;
  double analytic_rate = 0.0;
  double z_score = 0.0;
};

inline constexpr std::uint64_t kRateCheckAttempts = 1'000'000;

// Single-link run of kRateCheckAttempts attempts compared with R p.
RateCheck theoretical_rate_check(const ArchitectureSpec& spec, const Link& link,
                                 std::uint64_t seed,
                                 std::optional<double> success_probability = std::nullopt);

// One link per listed ELU pair, using the lowest free communication ion of
// each ELU. Throws ValidationError when ports run out.
SwitchConfig auto_config(const ArchitectureSpec& spec,
                         const std::vector<std::pair<int, int>>& elu_pairs);

std::string events_csv(const std::vector<LogEntry>& events);
nlohmann::json to_json(const SimResult& result, bool include_events = false);

std::vector<ScheduledConfig> schedule_from_json(const ArchitectureSpec& spec,
                                                const nlohmann::json& doc);
std::vector<PairRequest> demand_from_json(const ArchitectureSpec& spec, const nlohmann::json& doc);

}  // namespace ionfab::netsim
