#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "reheat/errors.hpp"
#include "reheat/rng.hpp"
#include "reheat/schedules.hpp"

using namespace reheat;

namespace {

const Process kDdpm = build_linear_alphabar();
const Process kEdm = EdmRange{};
const Process kFm = FlowRange{};

bool rows_with_reheat(const std::string& csv) {
    return csv.find(",1\n") != std::string::npos;
}

}  // namespace

TEST_CASE("monotonic spot values in all families") {
    const auto d = base_monotonic(kDdpm, 10);
    CHECK(d.values.size() == 11);
    CHECK(d.values[0] == 999);
    CHECK(d.values[1] == 899);
    CHECK(d.values[10] == 0);

    const auto e = base_monotonic(kEdm, 10);
    CHECK(e.values[0] == doctest::Approx(80.0).epsilon(1e-12));
    CHECK(e.values[9] == doctest::Approx(0.002).epsilon(1e-12));
    CHECK(e.values[10] == 0.0);

    const auto f = base_monotonic(kFm, 2);
    CHECK(f.values == std::vector<double>{0.001, 0.5, 0.999});
    CHECK_THROWS_AS(base_monotonic(kFm, 1), Error);
    CHECK_THROWS_AS(single_reheat(base_monotonic(kDdpm, 4)), Error);
}

TEST_CASE("monotonic schedules never reheat and have zero overhead") {
    for (const Process* p : {&kDdpm, &kEdm, &kFm}) {
        for (int N = 5; N <= 300; N += 7) {
            const auto s = base_monotonic(*p, N);
            CHECK(reheat_indices(s).empty());
            CHECK(overhead(s) == 0.0);
            const auto level = s.sigma_hats();
            for (std::size_t i = 1; i < level.size(); ++i) REQUIRE(level[i] < level[i - 1]);
        }
    }
}

TEST_CASE("single reheat DDPM defaults at N = 25") {
    const auto s = single_reheat(base_monotonic(kDdpm, 25));
    CHECK(s.values.size() == 26);
    CHECK(s.values[9] == 639);
    CHECK(s.values[10] == 688);
    CHECK(s.values[25] == 0);
    CHECK(reheat_indices(s) == std::vector<int>{9});
    for (int i = 10; i < 25; ++i) CHECK(s.values[static_cast<std::size_t>(i) + 1] < s.values[static_cast<std::size_t>(i)]);
}

TEST_CASE("single reheat with a vanishing magnitude clamps to a unit jump") {
    const auto mono = base_monotonic(kDdpm, 25);
    const auto s = single_reheat(mono, {0.4, 1e-9});
    CHECK(s.values[10] == mono.values[10] + 1);
    for (std::size_t i = 0; i < s.values.size(); ++i) CHECK(std::abs(s.values[i] - mono.values[i]) <= 1.0);
    CHECK_THROWS_AS(single_reheat(mono, {0.4, 0.0}), Error);
    CHECK_THROWS_AS(single_reheat(s, {0.4, 0.15}), Error);
}

TEST_CASE("single reheat in EDM and FM space") {
    const auto em = base_monotonic(kEdm, 10);
    const auto es = single_reheat(em, {0.4, 0.2});
    CHECK(es.values[4] == em.values[3]);
    CHECK(reheat_indices(es).empty());  // the stutter repeats a level, it does not raise it

    const auto fm = base_monotonic(kFm, 25);
    const auto fs = single_reheat(fm);
    CHECK(fs.values[10] == doctest::Approx(fm.values[10] * 0.85));
    CHECK(reheat_indices(fs) == std::vector<int>{9});
}

TEST_CASE("sawtooth DDPM at N = 50 touches only the first period index") {
    const auto mono = base_monotonic(kDdpm, 50);
    const auto s = sawtooth(mono, {25, 0.08});
    int changed = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) changed += s.values[i] != mono.values[i];
    CHECK(changed == 1);
    CHECK(mono.values[25] == 500);
    CHECK(s.values[25] == 540);
}

TEST_CASE("sawtooth guards near-terminal entries and clamps tiny jumps") {
    const auto mono = base_monotonic(kDdpm, 999);  // tau_i = 999 - i
    REQUIRE(mono.values[996] == 3);
    CHECK(sawtooth(mono, {996, 0.08}).values == mono.values);
    const auto s = sawtooth(mono, {498, 0.08});
    CHECK(s.values[498] == 501 + 40);
    CHECK(s.values[996] == 3);

    const auto tiny = sawtooth(base_monotonic(kDdpm, 50), {25, 1e-9});
    CHECK(tiny.values[25] == 501);
    CHECK_THROWS_AS(sawtooth(base_monotonic(kFm, 50)), Error);
}

TEST_CASE("sawtooth in EDM looks back by ceil(N delta / 2)") {
    const auto mono = base_monotonic(kEdm, 100);
    const auto s = sawtooth(mono, {25, 0.08});
    for (int i : {25, 50, 75}) CHECK(s.values[static_cast<std::size_t>(i)] == mono.values[static_cast<std::size_t>(i) - 4]);
}

TEST_CASE("damped oscillation DDPM spot values") {
    const auto s100 = damped_osc(kDdpm, 100);
    CHECK(s100.values[50] == 500);
    CHECK(s100.values[0] == 999);
    CHECK(s100.values[100] == 0);
    const auto r = reheat_indices(s100);
    CHECK(!r.empty());
    for (int i : r) CHECK((i >= 10 && i <= 90));

    const auto s16 = damped_osc(kDdpm, 16);
    CHECK(s16.values[1] == 999);

    for (const Process* p : {&kDdpm, &kEdm, &kFm}) {
        for (int N : {10, 25, 100}) {
            const auto flat = damped_osc(*p, N, {0.0, 2.5, 4.0});
            const auto mono = base_monotonic(*p, N);
            for (std::size_t i = 0; i < flat.values.size(); ++i) {
                CHECK(flat.values[i] == doctest::Approx(mono.values[i]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("overhead hand examples") {
    const std::vector<double> a{1.0, 0.5, 0.7, 0.0};
    const std::vector<double> b{1.0, 0.2, 0.6, 0.1, 0.3, 0.0};
    CHECK(overhead(a) == doctest::Approx(0.2));
    CHECK(overhead(b) == doctest::Approx(0.6));
    CHECK(reheat_indices(b) == std::vector<int>{1, 3});
    const std::vector<double> flat{0.5, 0.7, 0.5};
    CHECK_THROWS_AS(overhead(flat), Error);
}

TEST_CASE("overhead is additive over disjoint reheat segments") {
    CounterRng rng(3, Stream::Schedule, 0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> first{1.0}, second;
        double x = 1.0;
        for (int i = 0; i < 10; ++i) first.push_back(x = std::max(0.0, x - 0.2 * rng.uniform() + 0.1 * rng.uniform()));
        for (int i = 0; i < 10; ++i) second.push_back(x = std::max(0.0, x - 0.2 * rng.uniform() + 0.1 * rng.uniform()));
        second.back() = 0.0;
        std::vector<double> joined = first;
        joined.insert(joined.end(), second.begin(), second.end());
        double part = 0.0;
        for (std::size_t i = 0; i + 1 < joined.size(); ++i) part += std::max(0.0, joined[i + 1] - joined[i]);
        CHECK(overhead(joined) == doctest::Approx(part / 1.0));
        CHECK(overhead(joined) >= 0.0);
    }
}

TEST_CASE("randomised parameters always give valid schedules") {
    CounterRng rng(11, Stream::Schedule, 1);
    for (int trial = 0; trial < 300; ++trial) {
        const int N = 5 + static_cast<int>(rng.next_u64() % 200);
        for (const Process* p : {&kDdpm, &kEdm, &kFm}) {
            const auto mono = base_monotonic(*p, N);
            std::vector<Schedule> built{
                mono,
                single_reheat(mono, {0.01 + 0.98 * rng.uniform(), 0.01 + rng.uniform()}),
                damped_osc(*p, N, {rng.uniform(), 5.0 * rng.uniform() + 0.01, 10.0 * rng.uniform() + 0.1}),
            };
            if (family_of(*p) != Family::Fm) {
                built.push_back(sawtooth(mono, {2 + static_cast<int>(rng.next_u64() % 40), 0.5 * rng.uniform() + 1e-3}));
            }
            for (const auto& s : built) {
                REQUIRE(s.values.size() == static_cast<std::size_t>(N) + 1);
                REQUIRE_NOTHROW(validate(s));
                REQUIRE(overhead(s) >= 0.0);
            }
        }
    }
}

TEST_CASE("custom schedules are validated against the family invariants") {
    CHECK_NOTHROW(custom_schedule(kDdpm, {999, 500, 700, 0}));
    CHECK_THROWS_AS(custom_schedule(kDdpm, {999, 500.5, 0}), Error);
    CHECK_THROWS_AS(custom_schedule(kDdpm, {998, 500, 0}), Error);
    CHECK_THROWS_AS(custom_schedule(kEdm, {80.0, 100.0, 0.0}), Error);
    CHECK_THROWS_AS(custom_schedule(kFm, {0.001, 0.5, 0.9}), Error);
}

TEST_CASE("schedule CSV") {
    const auto mono = to_csv(base_monotonic(kDdpm, 10));
    CHECK(mono.rfind("index,coordinate,sigma_hat,is_reheat\n", 0) == 0);
    CHECK(!rows_with_reheat(mono));
    CHECK(mono.find("\n1,899,") != std::string::npos);
    CHECK(rows_with_reheat(to_csv(damped_osc(kDdpm, 100))));
    CHECK(to_csv(damped_osc(kDdpm, 100)) == to_csv(damped_osc(kDdpm, 100)));
}
