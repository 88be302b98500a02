#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "impatience/estimation.hpp"
#include "impatience/marks.hpp"
#include "impatience/recursion.hpp"

namespace impatience {

// begin: patience runs until service starts (non-preemptive afterwards).
// end: patience runs until service completes; service in progress at the
// deadline is aborted.
enum class ImpatienceModel { begin, end };

std::string to_string(ImpatienceModel model);

struct Scenario {
    unsigned servers = 1;
    ImpatienceModel model = ImpatienceModel::begin;
    MarkSource source = MarkSource::constant({1.0, 0.0, 0.0});
    std::int64_t horizon_customers = 1;
};

enum class Outcome { served, abandoned_queue, aborted_in_service };

std::string to_string(Outcome outcome);

struct CustomerRecord {
    std::int64_t index = 0;
    double arrival = 0.0;
    double sigma = 0.0;
    double dpat = 0.0;
    std::optional<double> service_start;
    double departure = 0.0;
    Outcome outcome = Outcome::served;
    // Service actually rendered (sigma when served, partial when aborted).
    double rendered_service = 0.0;
    std::optional<unsigned> server;
};

struct PathStatistics {
    std::size_t events = 0;
    std::size_t empty_epoch_count = 0;  // maximal intervals with X_t = 0 after the first arrival
    std::size_t inclusion_violations = 0;  // {L_t=0} in {X_t=0} in {M_t=0}, checked at every event time
    std::size_t sojourn_violations = 0;
    std::size_t idle_with_queue = 0;  // a server idle while customers wait
    std::size_t served = 0;
    std::size_t abandoned = 0;
    std::size_t aborted = 0;
    std::size_t in_system_at_end = 0;
    std::size_t arrivals = 0;
    std::size_t arrivals_seeing_l_zero = 0;
    std::size_t arrivals_seeing_m_zero = 0;
    std::size_t arrivals_seeing_empty = 0;
    double time_average_congestion = 0.0;
    double final_time = 0.0;
};

struct SimulationResult {
    std::vector<CustomerRecord> customers;
    PathStatistics stats;
    // LRMST, LRmST and congestion just before each arrival.
    std::vector<double> lrmst_before_arrival;
    std::vector<double> lrmst_min_before_arrival;
    std::vector<std::size_t> congestion_before_arrival;
};

// Event-driven run of G/G/s/s+G(b) or G/G/s/s+G(e) from an empty system with
// T_0 = 0 and T_{n+1} = T_n + xi_n, until every customer has left. Servers are
// FIFO and non-idling; a free customer goes to the lowest-index idle server.
// Simultaneous events resolve completion < deadline < arrival, then by
// customer index.
SimulationResult simulate(const Scenario& scn);

struct RegenerationReport {
    PathStatistics path;
    Estimate l_zero_at_arrivals;
    Estimate m_zero_at_arrivals;
    Estimate empty_at_arrivals;
    // P(Y=0) for the dominating alpha (sigma+D for begin, D for end) and for
    // sigma^D: the sufficient and the necessary regenerativity conditions.
    ProbZeroEstimate sufficient;
    ProbZeroEstimate necessary;
};

RegenerationReport regeneration_stats(const SimulationResult& run, const Scenario& scn, std::size_t replicas,
                                      std::int64_t max_depth, unsigned workers = 1);

// Workload found by each arrival in a single-server run: the time until all
// service owed to earlier customers is finished.
std::vector<double> workload_before_arrivals(const SimulationResult& run);

// max_n |DES workload before T_n - recursion W_n| with both started empty.
// The begin model pairs with fifo_step, the end model with end_step. Throws
// CapabilityError unless servers == 1.
double cross_validate_recursion(const Scenario& scn);

}  // namespace impatience
