#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "miriam/workload.hpp"

using namespace miriam;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = "/tmp/" + name;
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("uniform arrivals") {
    const auto times = generate_arrivals({ArrivalKind::Uniform, 10.0}, 1.0, 0);
    REQUIRE(times.size() == 10);
    for (int k = 0; k < 10; ++k) CHECK(times[k] == doctest::Approx(0.1 * k).epsilon(1e-12));
}

TEST_CASE("closed loop arrivals are simulator-driven") {
    CHECK(generate_arrivals({ArrivalKind::ClosedLoop, 0.0}, 10.0, 1).empty());
}

TEST_CASE("poisson arrival count is near rate*duration") {
    const auto times = generate_arrivals({ArrivalKind::Poisson, 10.0}, 1000.0, 7);
    CHECK(times.size() >= 10000 - 300);
    CHECK(times.size() <= 10000 + 300);
    for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i] >= times[i - 1]);
}

TEST_CASE("seeded determinism") {
    const auto a = generate_arrivals({ArrivalKind::Poisson, 5.0}, 100.0, 99);
    const auto b = generate_arrivals({ArrivalKind::Poisson, 5.0}, 100.0, 99);
    CHECK(a == b);
    const auto c = generate_arrivals({ArrivalKind::Poisson, 5.0}, 100.0, 100);
    CHECK(a != c);
}

TEST_CASE("rate must be positive") {
    CHECK_THROWS_AS(generate_arrivals({ArrivalKind::Uniform, 0.0}, 1.0, 0),
                    std::invalid_argument);
}

TEST_CASE("profile loading") {
    const TaskSpec t = load_profile("data/profiles/cifarnet-like.profile", Criticality::Normal);
    CHECK(t.name == "cifarnet-like");
    CHECK(t.criticality == Criticality::Normal);
    REQUIRE(t.kernels.size() == 1);
    CHECK(t.kernels[0].grid_size == 8);
    CHECK(t.kernels[0].block_size == 128);
    CHECK(t.kernels[0].work_per_thread == doctest::Approx(700.0));
}

TEST_CASE("profile parse errors carry line numbers") {
    const auto path = write_temp("bad.profile", "model = x\n[kernel]\ngrid = abc\n");
    try {
        load_profile(path, Criticality::Normal);
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
    const auto stray = write_temp("stray.profile", "model = x\ngrid = 4\n");
    CHECK_THROWS_AS(load_profile(stray, Criticality::Normal), std::runtime_error);
    const auto empty = write_temp("empty.profile", "model = x\n");
    CHECK_THROWS_AS(load_profile(empty, Criticality::Normal), std::runtime_error);
}

TEST_CASE("mdtb pairings") {
    const Workload a = build_mdtb('A', "data/profiles");
    CHECK(a.critical_task.name == "alexnet-like");
    CHECK(a.critical_pattern.kind == ArrivalKind::ClosedLoop);
    CHECK(a.normal_task.name == "cifarnet-like");
    CHECK(a.normal_pattern.kind == ArrivalKind::ClosedLoop);

    const Workload b = build_mdtb('B', "data/profiles");
    CHECK(b.critical_task.name == "squeezenet-like");
    CHECK(b.critical_pattern.kind == ArrivalKind::Uniform);
    CHECK(b.critical_pattern.rate == doctest::Approx(10.0));
    CHECK(b.normal_task.name == "alexnet-like");

    const Workload c = build_mdtb('C', "data/profiles");
    CHECK(c.critical_task.name == "gru-like");
    CHECK(c.critical_pattern.kind == ArrivalKind::Poisson);
    CHECK(c.critical_pattern.rate == doctest::Approx(10.0));
    CHECK(c.normal_task.name == "resnet-like");

    const Workload d = build_mdtb('D', "data/profiles");
    CHECK(d.critical_task.name == "lstm-like");
    CHECK(d.normal_task.name == "squeezenet-like");

    CHECK_THROWS_AS(build_mdtb('E', "data/profiles"), std::invalid_argument);
}

TEST_CASE("trace loading") {
    const TaskSpec crit = load_profile("data/profiles/lgsvl-critical.profile",
                                       Criticality::Critical);
    const TaskSpec norm = load_profile("data/profiles/lgsvl-normal.profile", Criticality::Normal);

    const auto small = write_temp("small.trace", "0.0 critical\n0.08 normal\n");
    const Workload w = load_trace(small, crit, norm);
    REQUIRE(w.explicit_arrivals.size() == 2);
    CHECK(w.explicit_arrivals[0].criticality == Criticality::Critical);
    CHECK(w.explicit_arrivals[1].time == doctest::Approx(0.08));

    const Workload lg = load_trace("data/traces/lgsvl.trace", crit, norm);
    int nc = 0, nn = 0;
    for (const auto& r : lg.explicit_arrivals)
        (r.criticality == Criticality::Critical ? nc : nn) += 1;
    CHECK(nc == 100);
    CHECK(nn == 125);

    const auto bad = write_temp("bad.trace", "1.0 critical\n0.5 normal\n");
    CHECK_THROWS_AS(load_trace(bad, crit, norm), std::runtime_error);
    const auto empty = write_temp("empty.trace", "# nothing\n");
    CHECK_THROWS_AS(load_trace(empty, crit, norm), std::runtime_error);
    CHECK_THROWS_AS(load_trace("/no/such/file", crit, norm), std::runtime_error);
}

TEST_CASE("kernel spec validation") {
    KernelSpec k{"k", 4, 64, 1.0, 0.5, 0};
    k.validate();
    k.mem_intensity = 1.5;
    CHECK_THROWS_AS(k.validate(), std::invalid_argument);
    k = {"k", 0, 64, 1.0, 0.5, 0};
    CHECK_THROWS_AS(k.validate(), std::invalid_argument);
}
