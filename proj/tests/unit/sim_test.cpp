#include <doctest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "accflow/sim/rng.hpp"
#include "accflow/sim/scheduler.hpp"
#include "../support/event_log.hpp"

using namespace accflow::sim;

TEST_CASE("simtime conversions and serialization") {
    CHECK(SimTime::ms(3).count() == 3000);
    CHECK(SimTime::from_seconds(0.5) == SimTime::ms(500));
    CHECK(SimTime::from_millis(66.9999999) == SimTime::ms(67));
    CHECK_THROWS(SimTime::from_seconds(-1.0));
    CHECK_THROWS(SimTime::ms(1) - SimTime::ms(2));
    // 1000 B at 10 Mbps
    CHECK(serialization_time(1000, 10'000'000) == SimTime::us(800));
    // 1000 B at 60 Mbps is 133.33 us, rounded up
    CHECK(serialization_time(1000, 60'000'000) == SimTime::us(134));
}

TEST_CASE("rng known answers") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(mix64(0) == 0xe220a8397b1dcdafULL);

    std::mt19937_64 ref;
    ref.discard(9999);
    CHECK(ref() == 9981545732273789042ULL);
}

TEST_CASE("rng streams are reproducible and isolated") {
    RngStream a(42, "early-drop"), b(42, "early-drop"), c(42, "attack-1"), d(43, "early-drop");
    std::vector<uint64_t> va, vb, vc, vd;
    for (int i = 0; i < 64; ++i) {
        va.push_back(a.next_u64());
        vb.push_back(b.next_u64());
        vc.push_back(c.next_u64());
        vd.push_back(d.next_u64());
    }
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(va != vd);
    CHECK(a.draws() == 64);

    RngStream u(7, "u");
    double lo = 1, hi = 0, sum = 0;
    for (int i = 0; i < 20000; ++i) {
        const double x = u.uniform();
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        sum += x;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("bernoulli uses one draw") {
    RngStream r(1, "x");
    r.bernoulli(0.3);
    r.bernoulli(0.0);
    CHECK(r.draws() == 2);
    int hits = 0;
    for (int i = 0; i < 10000; ++i) hits += r.bernoulli(0.7);
    CHECK(hits == doctest::Approx(7000).epsilon(0.04));
}

TEST_CASE("empty queue advances the clock") {
    Scheduler s;
    CHECK(s.run_until(SimTime::sec(10)) == 0);
    CHECK(s.now() == SimTime::sec(10));
}

TEST_CASE("ties dispatch in insertion order") {
    Scheduler s;
    std::vector<int> order;
    s.schedule(SimTime::us(2), EventKind::SourceWakeup, [&] { order.push_back(3); });
    s.schedule(SimTime::us(1), EventKind::SourceWakeup, [&] { order.push_back(1); });
    s.schedule(SimTime::us(1), EventKind::SourceWakeup, [&] { order.push_back(2); });
    CHECK(s.run_until(SimTime::us(5)) == 3);
    CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("event scheduled at now runs after the current handler") {
    Scheduler s;
    std::vector<std::string> order;
    s.schedule(SimTime{}, EventKind::SourceWakeup, [&] {
        s.schedule(s.now(), EventKind::TimerExpiry, [&] { order.push_back("timer"); });
        order.push_back("first");
    });
    s.run_until(SimTime{});
    CHECK(order == std::vector<std::string>{"first", "timer"});
}

TEST_CASE("scheduling in the past fails loudly") {
    Scheduler s;
    s.run_until(SimTime::ms(5));
    CHECK_THROWS_AS(s.schedule(SimTime::ms(4), EventKind::TimerExpiry, [] {}), std::logic_error);
}

TEST_CASE("event just before a period boundary fires first") {
    Scheduler s;
    std::ostringstream log;
    s.attach_log(&log);
    s.schedule(SimTime::us(500'000), EventKind::PeriodBoundary, [] {});
    s.schedule(SimTime::us(499'999), EventKind::TimerExpiry, [] {}, 3);
    s.run_until(SimTime::sec(1));
    const auto lines = accflow::testing::parse_log(log.str());
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].kind == "timer-expiry");
    CHECK(lines[0].time_us == 499'999);
    CHECK(lines[0].flow == 3);
    CHECK(lines[1].kind == "period-boundary");
}

TEST_CASE("cancel semantics") {
    Scheduler s;
    int fired = 0;
    auto h1 = s.schedule(SimTime::ms(1), EventKind::TimerExpiry, [&] { ++fired; });
    CHECK(s.cancel(h1) == CancelResult::Cancelled);
    auto h2 = s.schedule(SimTime::ms(1), EventKind::TimerExpiry, [&] { ++fired; });
    s.run_until(SimTime::ms(2));
    CHECK(fired == 1);
    CHECK(s.cancel(h2) == CancelResult::AlreadyFired);
    CHECK_THROWS_AS(s.cancel(EventHandle{}), std::logic_error);
    CHECK_THROWS_AS(s.cancel(EventHandle{999}), std::logic_error);
}

TEST_CASE("cancel then reschedule: only the new timer is in the log") {
    Scheduler s;
    std::ostringstream log;
    s.attach_log(&log);
    EventHandle h;
    for (int i = 1; i <= 5; ++i) {
        if (h.valid()) s.cancel(h);
        h = s.schedule(SimTime::ms(10 * i), EventKind::TimerExpiry, [&s] { s.note("fired"); }, 1);
    }
    s.run_until(SimTime::sec(1));
    const auto lines = accflow::testing::parse_log(log.str());
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].time_us == 50'000);
    CHECK(lines[0].detail == "fired");
    CHECK(s.pending() == 0);
}

TEST_CASE("dispatch order is the (fire_at, seq) total order") {
    Scheduler s;
    std::ostringstream log;
    s.attach_log(&log);
    RngStream r(3, "times");
    std::function<void()> spawn = [&] {
        if (s.now() < SimTime::ms(50)) {
            s.schedule(s.now() + SimTime::us(r.next_u64() % 300), EventKind::SourceWakeup, spawn);
        }
    };
    for (int i = 0; i < 200; ++i) s.schedule(SimTime::us(r.next_u64() % 1000), EventKind::SourceWakeup, spawn);
    const uint64_t n = s.run_until(SimTime::ms(60));
    const auto lines = accflow::testing::parse_log(log.str());
    CHECK(lines.size() == n);
    for (size_t i = 1; i < lines.size(); ++i) {
        const bool ordered = lines[i - 1].time_us < lines[i].time_us ||
                             (lines[i - 1].time_us == lines[i].time_us && lines[i - 1].seq < lines[i].seq);
        REQUIRE(ordered);
    }
}
