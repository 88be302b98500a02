#include "impatience/des.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include "impatience/errors.hpp"
#include "impatience/fifo_begin.hpp"
#include "impatience/fifo_end.hpp"

namespace impatience {

std::string to_string(ImpatienceModel model) { return model == ImpatienceModel::begin ? "begin" : "end"; }

std::string to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::served: return "served";
        case Outcome::abandoned_queue: return "abandoned_queue";
        case Outcome::aborted_in_service: return "aborted_in_service";
    }
    return "unknown";
}

namespace {

enum class EventClass : int { completion = 0, deadline = 1, arrival = 2 };

struct Event {
    double time;
    EventClass klass;
    std::int64_t customer;

    // Min-heap order: time, then class, then customer index.
    bool operator>(const Event& o) const noexcept {
        if (time != o.time) return time > o.time;
        if (klass != o.klass) return klass > o.klass;
        return customer > o.customer;
    }
};

enum class Status { waiting, in_service, done };

class Engine {
public:
    explicit Engine(const Scenario& scn) : scn_(scn), busy_(scn.servers, false) {
        const auto n = static_cast<std::size_t>(scn.horizon_customers);
        out_.customers.resize(n);
        status_.resize(n, Status::waiting);
        out_.lrmst_before_arrival.reserve(n);
        out_.lrmst_min_before_arrival.reserve(n);
        out_.congestion_before_arrival.reserve(n);
    }

    SimulationResult run() {
        calendar_.push({0.0, EventClass::arrival, 0});
        while (!calendar_.empty()) {
            const Event ev = calendar_.top();
            calendar_.pop();
            advance_to(ev.time);
            ++out_.stats.events;
            switch (ev.klass) {
                case EventClass::arrival: on_arrival(ev); break;
                case EventClass::completion: on_completion(ev); break;
                case EventClass::deadline: on_deadline(ev); break;
            }
            // rcll state at ev.time: check once every event at this instant is done.
            if (calendar_.empty() || calendar_.top().time != ev.time) check_state(ev.time);
        }
        finish();
        return std::move(out_);
    }

private:
    void advance_to(double t) {
        area_ += static_cast<double>(in_system_) * (t - now_);
        now_ = t;
    }

    void on_arrival(const Event& ev) {
        const auto n = ev.customer;
        const MarkTriple m = scn_.source.mark_at(n);
        CustomerRecord& rec = out_.customers[static_cast<std::size_t>(n)];
        rec.index = n;
        rec.arrival = ev.time;
        rec.sigma = m.sigma;
        rec.dpat = m.dpat;

        out_.lrmst_before_arrival.push_back(positive(l_expiry_ - ev.time));
        out_.lrmst_min_before_arrival.push_back(positive(m_expiry_ - ev.time));
        out_.congestion_before_arrival.push_back(in_system_);

        // Latest and earliest possible departures, in the same floating
        // arithmetic as the departure times themselves.
        const double deadline = ev.time + m.dpat;
        const double latest = scn_.model == ImpatienceModel::begin ? deadline + m.sigma : deadline;
        l_expiry_ = std::max(l_expiry_, latest);
        m_expiry_ = std::max(m_expiry_, ev.time + std::min(m.sigma, m.dpat));

        ++in_system_;
        if (n + 1 < scn_.horizon_customers) calendar_.push({ev.time + m.xi, EventClass::arrival, n + 1});

        const auto server = idle_server();
        if (server) {
            start_service(n, *server);
            if (scn_.model == ImpatienceModel::end) calendar_.push({deadline, EventClass::deadline, n});
        } else {
            queue_.push_back(n);
            ++waiting_;
            calendar_.push({deadline, EventClass::deadline, n});
        }
    }

    void on_completion(const Event& ev) {
        const auto idx = static_cast<std::size_t>(ev.customer);
        if (status_[idx] != Status::in_service) return;  // aborted earlier
        CustomerRecord& rec = out_.customers[idx];
        rec.outcome = Outcome::served;
        rec.departure = ev.time;
        rec.rendered_service = rec.sigma;
        depart(idx);
        busy_[*rec.server] = false;
        dispatch();
    }

    void on_deadline(const Event& ev) {
        const auto idx = static_cast<std::size_t>(ev.customer);
        CustomerRecord& rec = out_.customers[idx];
        if (status_[idx] == Status::waiting) {
            rec.outcome = Outcome::abandoned_queue;
            rec.departure = ev.time;
            --waiting_;
            depart(idx);
        } else if (status_[idx] == Status::in_service && scn_.model == ImpatienceModel::end) {
            rec.outcome = Outcome::aborted_in_service;
            rec.departure = ev.time;
            rec.rendered_service = ev.time - *rec.service_start;
            depart(idx);
            busy_[*rec.server] = false;
            dispatch();
        }
    }

    void depart(std::size_t idx) {
        status_[idx] = Status::done;
        --in_system_;
    }

    void start_service(std::int64_t n, unsigned server) {
        const auto idx = static_cast<std::size_t>(n);
        CustomerRecord& rec = out_.customers[idx];
        rec.service_start = now_;
        rec.server = server;
        status_[idx] = Status::in_service;
        busy_[server] = true;
        calendar_.push({now_ + rec.sigma, EventClass::completion, n});
    }

    void dispatch() {
        while (!queue_.empty()) {
            const auto server = idle_server();
            if (!server) return;
            const std::int64_t n = queue_.front();
            queue_.pop_front();
            if (status_[static_cast<std::size_t>(n)] != Status::waiting) continue;
            --waiting_;
            start_service(n, *server);
        }
    }

    std::optional<unsigned> idle_server() const {
        for (unsigned s = 0; s < busy_.size(); ++s) {
            if (!busy_[s]) return s;
        }
        return std::nullopt;
    }

    void check_state(double t) {
        const bool l_zero = t >= l_expiry_;
        const bool m_zero = t >= m_expiry_;
        const bool empty = in_system_ == 0;
        if ((l_zero && !empty) || (empty && !m_zero)) ++out_.stats.inclusion_violations;
        if (waiting_ > 0 && idle_server()) ++out_.stats.idle_with_queue;
        if (empty && was_occupied_) ++out_.stats.empty_epoch_count;
        was_occupied_ = !empty;
    }

    void finish() {
        PathStatistics& st = out_.stats;
        st.final_time = now_;
        st.time_average_congestion = now_ > 0.0 ? area_ / now_ : 0.0;
        st.in_system_at_end = in_system_;
        st.arrivals = out_.customers.size();
        for (const auto& rec : out_.customers) {
            switch (rec.outcome) {
                case Outcome::served: ++st.served; break;
                case Outcome::abandoned_queue: ++st.abandoned; break;
                case Outcome::aborted_in_service: ++st.aborted; break;
            }
            if (!sojourn_within_bounds(rec)) ++st.sojourn_violations;
        }
        for (std::size_t i = 0; i < out_.lrmst_before_arrival.size(); ++i) {
            st.arrivals_seeing_l_zero += out_.lrmst_before_arrival[i] == 0.0 ? 1 : 0;
            st.arrivals_seeing_m_zero += out_.lrmst_min_before_arrival[i] == 0.0 ? 1 : 0;
            st.arrivals_seeing_empty += out_.congestion_before_arrival[i] == 0 ? 1 : 0;
        }
    }

    bool sojourn_within_bounds(const CustomerRecord& rec) const {
        const double deadline = rec.arrival + rec.dpat;
        const double earliest = rec.arrival + std::min(rec.sigma, rec.dpat);
        const double latest = scn_.model == ImpatienceModel::begin ? deadline + rec.sigma : deadline;
        if (rec.departure < earliest || rec.departure > latest) return false;
        if (rec.service_start) {
            if (*rec.service_start < rec.arrival) return false;
            if (scn_.model == ImpatienceModel::begin && *rec.service_start > deadline) return false;
        }
        return true;
    }

    static double positive(double x) noexcept { return x > 0.0 ? x : 0.0; }

    const Scenario& scn_;
    SimulationResult out_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> calendar_;
    std::vector<bool> busy_;
    std::vector<Status> status_;
    std::deque<std::int64_t> queue_;
    std::size_t waiting_ = 0;
    std::size_t in_system_ = 0;
    double now_ = 0.0;
    double area_ = 0.0;
    double l_expiry_ = 0.0;
    double m_expiry_ = 0.0;
    bool was_occupied_ = false;
};

}  // namespace

SimulationResult simulate(const Scenario& scn) {
    if (scn.servers < 1) throw ArgumentError("scenario needs at least one server");
    if (scn.horizon_customers < 1) throw ArgumentError("scenario needs horizon_customers >= 1");
    return Engine(scn).run();
}

RegenerationReport regeneration_stats(const SimulationResult& run, const Scenario& scn, std::size_t replicas,
                                      std::int64_t max_depth, unsigned workers) {
    RegenerationReport rep;
    rep.path = run.stats;
    const std::size_t n = std::max<std::size_t>(run.stats.arrivals, 1);
    rep.l_zero_at_arrivals = wilson_estimate(run.stats.arrivals_seeing_l_zero, n);
    rep.m_zero_at_arrivals = wilson_estimate(run.stats.arrivals_seeing_m_zero, n);
    rep.empty_at_arrivals = wilson_estimate(run.stats.arrivals_seeing_empty, n);
    const auto dominating =
        scn.model == ImpatienceModel::begin ? RecursionSpec::sigma_plus_d() : RecursionSpec::d_only();
    rep.sufficient = prob_zero_estimate(dominating, scn.source, replicas, max_depth, workers);
    rep.necessary = prob_zero_estimate(RecursionSpec::sigma_min_d(), scn.source, replicas, max_depth, workers);
    return rep;
}

std::vector<double> workload_before_arrivals(const SimulationResult& run) {
    std::vector<double> out;
    out.reserve(run.customers.size());
    double last_service_end = 0.0;
    for (const auto& rec : run.customers) {
        const double w = last_service_end - rec.arrival;
        out.push_back(w > 0.0 ? w : 0.0);
        if (rec.service_start) last_service_end = std::max(last_service_end, rec.departure);
    }
    return out;
}

double cross_validate_recursion(const Scenario& scn) {
    if (scn.servers != 1) throw CapabilityError("recursion cross-validation is defined for a single server only");
    const SimulationResult run = simulate(scn);
    const std::vector<double> des = workload_before_arrivals(run);
    double w = 0.0;
    double worst = 0.0;
    for (std::int64_t n = 0; n < scn.horizon_customers; ++n) {
        worst = std::max(worst, std::abs(des[static_cast<std::size_t>(n)] - w));
        const MarkTriple m = scn.source.mark_at(n);
        w = scn.model == ImpatienceModel::begin ? fifo_step(w, m) : end_step(w, m);
    }
    return worst;
}

}  // namespace impatience
