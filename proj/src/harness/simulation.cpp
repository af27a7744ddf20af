#include "accflow/harness/simulation.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>

#include "accflow/defense/controller.hpp"
#include "accflow/net/link.hpp"
#include "accflow/net/router.hpp"
#include "accflow/sim/rng.hpp"
#include "accflow/sim/scheduler.hpp"
#include "accflow/traffic/tcp.hpp"

namespace accflow::harness {

using metrics::FlowReport;
using metrics::FlowRole;
using net::Packet;
using sim::EventKind;

net::Address legitimate_address(size_t index) {
    const auto host = static_cast<uint32_t>(index + 1);
    return net::make_address(10, 1, static_cast<uint8_t>(host >> 8), static_cast<uint8_t>(host & 0xff));
}

net::Address attacker_address(const traffic::AttackProfile& profile, uint32_t subflow) {
    const uint32_t host = profile.spoof_sources ? subflow + 1 : 1;
    return net::make_address(10, 2, static_cast<uint8_t>(host >> 8), static_cast<uint8_t>(host & 0xff));
}

net::Address periodic_address() { return net::make_address(10, 4, 0, 1); }

namespace {

// Application data rate realised as one socket write per packet.
SimTime app_write_offset(uint64_t k, uint64_t rate_bps) {
    return SimTime::us(static_cast<uint64_t>(static_cast<unsigned __int128>(k) * net::kPacketBits * 1'000'000 /
                                             rate_bps));
}

struct Connection {
    uint32_t flow_id = 0;
    size_t flow = 0;  // index into World::flows_
    net::Address src = 0;
    net::Link* access = nullptr;
    SimTime access_delay;
    net::Link rx{1, SimTime{}};
    std::unique_ptr<traffic::TcpSender> sender;
    std::vector<bool> received;

    uint64_t emitted = 0;
    uint64_t in_access = 0;
    uint64_t queued = 0;
    uint64_t in_service = 0;
    uint64_t in_egress = 0;
    uint64_t delivered = 0;
    uint64_t dropped_tail = 0;
    uint64_t dropped_defense = 0;
    uint64_t blocked = 0;

    uint64_t accounted() const {
        return in_access + queued + in_service + in_egress + delivered + dropped_tail + dropped_defense + blocked;
    }
};

class World {
public:
    World(const Scenario& s, const RunOptions& opt)
        : s_(s),
          controller_(s.defense, sim::RngStream(s.seed, "early-drop")),
          queue_(s.topology.buffer_packets, &controller_),
          bottleneck_(s.topology.bottleneck_bps, s.topology.bottleneck_delay) {
        sched_.attach_log(opt.event_log);
    }

    metrics::RunReport run();

private:
    size_t add_flow(std::string label, FlowRole role, uint64_t desired_bps) {
        FlowReport f;
        f.label = std::move(label);
        f.role = role;
        f.desired_rate_bps = desired_bps;
        f.series = metrics::ThroughputSeries(f.label, s_.metrics.bin_width, s_.duration);
        flows_.push_back(std::move(f));
        return flows_.size() - 1;
    }

    net::Link* add_access_link() {
        access_links_.emplace_back(s_.topology.access_bps, s_.topology.access_delay);
        return &access_links_.back();
    }

    Connection& add_connection(size_t flow, net::Address src, net::Link* access, SimTime access_delay) {
        auto c = std::make_unique<Connection>();
        c->flow_id = static_cast<uint32_t>(conns_.size() + 1);
        c->flow = flow;
        c->src = src;
        c->access = access;
        c->access_delay = access_delay;
        c->rx = net::Link(s_.topology.access_bps, s_.topology.receiver_delay);
        flows_[flow].connections += 1;
        conns_.push_back(std::move(c));
        return *conns_.back();
    }

    Connection& conn(uint32_t flow_id) { return *conns_[flow_id - 1]; }

    void attach_tcp(Connection& c) {
        const uint32_t id = c.flow_id;
        c.sender = std::make_unique<traffic::TcpSender>(sched_, s_.tcp, id, c.src,
                                                        [this, id](const Packet& p) { emit(conn(id), p); });
    }

    void emit(Connection& c, const Packet& pkt);
    void router_arrival(uint32_t flow_id, const Packet& pkt);
    void start_service();
    void finish_service(const Packet& pkt);
    void deliver(const Packet& pkt);
    void period_boundary(uint64_t k);
    void check_conservation() const;

    void build_legitimate();
    void build_attack(const traffic::AttackProfile& p);
    void build_sstf(const traffic::SstfProfile& p);
    void build_periodic(const PeriodicFlowSpec& spec);

    const Scenario& s_;
    sim::Scheduler sched_;
    defense::AccFlowController controller_;
    net::RouterQueue queue_;
    net::Link bottleneck_;
    bool serving_ = false;

    // Self-rescheduling source loops; deque keeps their addresses stable.
    std::deque<std::function<void(uint64_t)>> loops_;
    std::deque<net::Link> access_links_;
    std::vector<std::unique_ptr<Connection>> conns_;
    std::vector<FlowReport> flows_;
};

void World::emit(Connection& c, const Packet& pkt) {
    ++c.emitted;
    ++c.in_access;
    if (sched_.logging()) sched_.note("tx=" + std::to_string(pkt.seq) + "/" + std::to_string(pkt.data_seq));
    const auto tr = c.access->transmit(sched_.now(), pkt.size_bytes);
    sched_.schedule(tr.arrival, EventKind::PacketArrival, [this, pkt] { router_arrival(pkt.flow_id, pkt); },
                    pkt.flow_id);
}

void World::router_arrival(uint32_t flow_id, const Packet& pkt) {
    Connection& c = conn(flow_id);
    --c.in_access;
    const net::Admission a = queue_.admit(pkt, sched_.now());
    std::string outcome;
    if (a.blocked) {
        ++c.blocked;
        outcome = "blocked";
    } else {
        switch (a.result) {
        case net::AdmitResult::Enqueued: ++c.queued; break;
        case net::AdmitResult::DroppedTail: ++c.dropped_tail; break;
        case net::AdmitResult::DroppedByDefense: ++c.dropped_defense; break;
        }
        outcome = net::to_string(a.result);
    }
    if (sched_.logging()) {
        sched_.note("at=router src=" + net::format_address(pkt.src_addr) + " seq=" + std::to_string(pkt.seq) +
                    " dseq=" + std::to_string(pkt.data_seq) + " outcome=" + outcome +
                    " occ=" + std::to_string(queue_.occupancy()));
    }
    if (!serving_) start_service();
}

void World::start_service() {
    auto pkt = queue_.dequeue();
    if (!pkt) {
        serving_ = false;
        return;
    }
    serving_ = true;
    Connection& c = conn(pkt->flow_id);
    --c.queued;
    ++c.in_service;
    const auto tr = bottleneck_.transmit(sched_.now(), pkt->size_bytes);
    sched_.schedule(tr.finish, EventKind::PacketDeparture, [this, p = *pkt] { finish_service(p); }, pkt->flow_id);
}

void World::finish_service(const Packet& pkt) {
    Connection& c = conn(pkt.flow_id);
    --c.in_service;
    ++c.in_egress;
    const SimTime at_far_router = sched_.now() + bottleneck_.prop_delay();
    const auto rx = c.rx.transmit(at_far_router, pkt.size_bytes);
    sched_.schedule(rx.arrival, EventKind::PacketArrival, [this, pkt] { deliver(pkt); }, pkt.flow_id);
    start_service();
}

void World::deliver(const Packet& pkt) {
    Connection& c = conn(pkt.flow_id);
    --c.in_egress;
    ++c.delivered;
    FlowReport& f = flows_[c.flow];

    bool fresh = true;
    if (c.sender) {
        if (c.received.size() <= pkt.data_seq) c.received.resize(pkt.data_seq + 1, false);
        fresh = !c.received[pkt.data_seq];
        c.received[pkt.data_seq] = true;
    }
    if (fresh) f.series.add(sched_.now(), uint64_t{pkt.size_bytes} * 8);
    if (sched_.logging()) {
        sched_.note("at=receiver label=" + f.label + " seq=" + std::to_string(pkt.seq) +
                    " dseq=" + std::to_string(pkt.data_seq) + " new=" + (fresh ? "1" : "0") +
                    " bytes=" + std::to_string(pkt.size_bytes));
    }
    if (c.sender) {
        const SimTime ack_delay = s_.topology.receiver_delay + s_.topology.bottleneck_delay + c.access_delay;
        const uint32_t id = c.flow_id;
        const uint64_t dseq = pkt.data_seq;
        sched_.schedule_in(ack_delay, EventKind::PacketArrival,
                           [this, id, dseq] {
                               if (sched_.logging()) sched_.note("at=sender ack=" + std::to_string(dseq));
                               conn(id).sender->on_ack(dseq);
                           },
                           id);
    }
}

void World::period_boundary(uint64_t k) {
    const defense::PeriodSnapshot* snap = nullptr;
    try {
        snap = &controller_.finalize_period(sched_.now());
    } catch (const std::logic_error& e) {
        throw InvariantViolation(e.what());
    }
    if (sched_.logging()) {
        sched_.note("index=" + std::to_string(snap->index) + " arrivals=" + std::to_string(snap->arrivals) +
                    " drops=" + std::to_string(snap->drops) + " agg_loss=" + std::to_string(snap->aggregate_loss));
    }
    check_conservation();
    const SimTime next = s_.defense.detection_period * (k + 1);
    if (next <= s_.duration) {
        sched_.schedule(next, EventKind::PeriodBoundary, [this, k] { period_boundary(k + 1); });
    }
}

void World::check_conservation() const {
    for (const auto& c : conns_) {
        if (c->emitted != c->accounted()) {
            throw InvariantViolation("packet conservation violated for flow " + std::to_string(c->flow_id) + " at t=" +
                                     std::to_string(sched_.now().count()) + "us");
        }
    }
    if (queue_.occupancy() > queue_.capacity()) throw InvariantViolation("router occupancy exceeds capacity");
}

void World::build_legitimate() {
    for (size_t i = 0; i < s_.legitimate.size(); ++i) {
        const LegitFlowSpec& spec = s_.legitimate[i];
        const size_t flow = add_flow(spec.label, FlowRole::Legitimate, spec.rate_bps);
        const SimTime delay = spec.access_delay.value_or(s_.topology.access_delay);
        access_links_.emplace_back(s_.topology.access_bps, delay);
        Connection& c = add_connection(flow, legitimate_address(i), &access_links_.back(), delay);
        attach_tcp(c);

        const uint32_t id = c.flow_id;
        auto* tick = &loops_.emplace_back();
        *tick = [this, id, spec, tick](uint64_t k) {
            conn(id).sender->offer(1);
            const SimTime next = spec.start + app_write_offset(k + 1, spec.rate_bps);
            if (next < s_.duration) {
                sched_.schedule(next, EventKind::SourceWakeup, [tick, k] { (*tick)(k + 1); }, id);
            }
        };
        if (spec.start < s_.duration) {
            sched_.schedule(spec.start, EventKind::SourceWakeup, [tick] { (*tick)(0); }, id);
        }
    }
}

void World::build_attack(const traffic::AttackProfile& p) {
    for (uint32_t j = 0; j < p.n_subflows; ++j) {
        const size_t flow = add_flow("attack-" + std::to_string(j + 1), FlowRole::Attacker, 0);
        Connection& c = add_connection(flow, attacker_address(p, j), add_access_link(), s_.topology.access_delay);
        const uint32_t id = c.flow_id;

        auto next_at = [p, j](SimTime now) -> std::optional<SimTime> {
            if (p.kind == traffic::AttackKind::ConstantRate) return traffic::constant_rate_emission(p, j, now);
            return traffic::squarewave_next_emission(p, j, now).next_send_time;
        };
        auto rng = std::make_shared<sim::RngStream>(s_.seed, "attack-" + std::to_string(j + 1));
        // The loop argument is the nominal (unjittered) slot of the packet being sent.
        auto* fire = &loops_.emplace_back();
        *fire = [this, id, p, next_at, rng, fire](uint64_t nominal_us) {
            Connection& cc = conn(id);
            Packet pkt;
            pkt.flow_id = id;
            pkt.src_addr = cc.src;
            pkt.seq = pkt.data_seq = cc.emitted;
            pkt.emitted_at = sched_.now();
            emit(cc, pkt);
            const auto next = next_at(SimTime::us(nominal_us + 1));
            if (!next) return;
            const SimTime at = traffic::jittered_send_time(p, *next, rng->uniform());
            if (at < s_.duration) {
                sched_.schedule(at, EventKind::SourceWakeup, [fire, n = next->count()] { (*fire)(n); }, id);
            }
        };
        const auto first = next_at(p.start);
        if (first) {
            const SimTime at = traffic::jittered_send_time(p, *first, rng->uniform());
            if (at < s_.duration) {
                sched_.schedule(at, EventKind::SourceWakeup, [fire, n = first->count()] { (*fire)(n); }, id);
            }
        }
    }
}

void World::build_sstf(const traffic::SstfProfile& p) {
    std::vector<size_t> flow_of(p.n_attackers);
    std::map<net::Address, net::Link*> host_links;
    for (uint32_t k = 0; k < p.n_attackers; ++k) {
        flow_of[k] = add_flow("sstf-" + std::to_string(k + 1), FlowRole::Attacker, 0);
    }
    auto* spawn_tick = &loops_.emplace_back();
    *spawn_tick = [this, p, flow_of, host_links, spawn_tick](uint64_t) mutable {
        for (const traffic::SpawnRequest& req : traffic::sstf_spawner_tick(p, sched_.now())) {
            net::Link*& link = host_links[req.src_addr];
            if (link == nullptr) link = add_access_link();
            Connection& c = add_connection(flow_of[req.attacker], req.src_addr, link, s_.topology.access_delay);
            attach_tcp(c);
            const uint32_t id = c.flow_id;
            auto* write = &loops_.emplace_back();
            const SimTime t0 = sched_.now();
            *write = [this, id, p, t0, write](uint64_t i) {
                traffic::TcpSender& snd = *conn(id).sender;
                snd.offer(1);
                if (i + 1 >= p.flow_payload) {
                    snd.close();
                    return;
                }
                const SimTime next = t0 + app_write_offset(i + 1, p.per_flow_rate_bps);
                if (next < s_.duration) sched_.schedule(next, EventKind::SourceWakeup, [write, i] { (*write)(i + 1); }, id);
            };
            (*write)(0);
        }
        const SimTime next = sched_.now() + p.spawn_interval;
        if (p.n_attackers > 0 && next < s_.duration) {
            sched_.schedule(next, EventKind::SourceWakeup, [spawn_tick] { (*spawn_tick)(0); });
        }
    };
    if (p.n_attackers > 0 && p.start < s_.duration) {
        sched_.schedule(p.start, EventKind::SourceWakeup, [spawn_tick] { (*spawn_tick)(0); });
    }
}

void World::build_periodic(const PeriodicFlowSpec& spec) {
    const auto& p = spec.profile;
    const uint64_t desired =
        static_cast<uint64_t>(static_cast<double>(p.chunk_packets() * net::kPacketBits) / p.period.seconds());
    const size_t flow = add_flow(spec.label, FlowRole::Periodic, desired);
    Connection& c = add_connection(flow, periodic_address(), add_access_link(), s_.topology.access_delay);
    attach_tcp(c);
    const uint32_t id = c.flow_id;
    auto* tick = &loops_.emplace_back();
    *tick = [this, id, p, tick](uint64_t) {
        conn(id).sender->offer(traffic::periodic_benign_tick(p, sched_.now()));
        const SimTime next = sched_.now() + p.period;
        if (next < s_.duration) sched_.schedule(next, EventKind::SourceWakeup, [tick] { (*tick)(0); }, id);
    };
    if (p.start < s_.duration) sched_.schedule(p.start, EventKind::SourceWakeup, [tick] { (*tick)(0); }, id);
}

metrics::RunReport World::run() {
    build_legitimate();
    if (s_.benign_periodic) build_periodic(*s_.benign_periodic);
    if (s_.attack) {
        if (const auto* a = std::get_if<traffic::AttackProfile>(&*s_.attack)) {
            build_attack(*a);
        } else {
            build_sstf(std::get<traffic::SstfProfile>(*s_.attack));
        }
    }
    if (s_.defense.detection_period <= s_.duration) {
        sched_.schedule(s_.defense.detection_period, EventKind::PeriodBoundary, [this] { period_boundary(1); });
    }

    sched_.run_until(s_.duration);
    check_conservation();

    metrics::RunReport report;
    report.scenario = scenario_to_json(s_);
    report.duration = s_.duration;
    report.attack_start = s_.attack_start();
    report.periods = controller_.history();
    report.events_dispatched = sched_.dispatched();
    report.early_drop_draws = controller_.rng().draws();

    for (const auto& c : conns_) {
        FlowReport& f = flows_[c->flow];
        const defense::FlowKey key =
            s_.defense.aggregation == defense::AggregationMode::PerConnection
                ? defense::FlowKey{defense::AggregationMode::PerConnection, c->flow_id}
                : defense::FlowKey{defense::AggregationMode::PerSourceAddress, c->src};
        if (std::find(f.keys.begin(), f.keys.end(), key) == f.keys.end()) f.keys.push_back(key);
        f.emitted += c->emitted;
        f.delivered += c->delivered;
        f.dropped_tail += c->dropped_tail;
        f.dropped_defense += c->dropped_defense + c->blocked;
        if (c->sender) f.timeouts += c->sender->timeouts();
    }
    report.flows = std::move(flows_);
    report.convergence_time =
        metrics::convergence_time(report, report.attack_start.value_or(SimTime{}), s_.metrics.convergence_hold);
    return report;
}

}  // namespace

metrics::RunReport run_scenario(const Scenario& scenario, const RunOptions& options) {
    scenario.validate();
    World world(scenario, options);
    return world.run();
}

}  // namespace accflow::harness
