#include <doctest.h>

#include "sass/trace.hpp"
#include "sass/world.hpp"

using namespace sass;

namespace {

World empty_world(int w = 8, int h = 8) {
    World world;
    world.grid = Grid(w, h);
    world.rng = Rng(1);
    return world;
}

AgentState make_agent(int id, Cell pos, double energy = 10.0) {
    AgentState a;
    a.id = id;
    a.pos = pos;
    a.energy = energy;
    return a;
}

NegotiationMessage dummy_msg() { return AckMsg{SessionId{0, 0, 0}, 0, 0}; }

}  // namespace

TEST_SUITE("world") {

TEST_CASE("empty world: step only advances the tick") {
    World w = empty_world();
    w.tick = 7;
    Trace t;
    step(w, t);
    CHECK(w.tick == 8);
    CHECK(t.size() == 0);
}

TEST_CASE("moving along a 1-cell path debits move_cost") {
    World w = empty_world();
    w.cfg.move_cost = 0.5;
    w.agents[0] = make_agent(0, {2, 2}, 2.0);
    w.agents[0].activity = Moving{{{3, 2}}, 0, 0};
    Trace t;
    step(w, t);
    CHECK(w.agents[0].pos == Cell{3, 2});
    CHECK(w.agents[0].energy == doctest::Approx(1.5));
    REQUIRE(t.size() == 1);
    CHECK(t.events()[0].kind == EventKind::Move);
    CHECK(t.events()[0].get_double("cost") == doctest::Approx(0.5));
}

TEST_CASE("message sent at tick 3 with delay 2 arrives during the step into tick 5") {
    World w = empty_world();
    w.agents[0] = make_agent(0, {0, 0});
    w.agents[1] = make_agent(1, {5, 5});
    w.bus.delay = 2;
    w.tick = 3;
    Trace t;
    send(w, t, 0, 1, dummy_msg());
    step(w, t);  // into 4
    CHECK(w.inboxes[1].empty());
    step(w, t);  // into 5
    REQUIRE(w.inboxes[1].size() == 1);
    CHECK(w.inboxes[1][0].deliver_at == 5);
}

TEST_CASE("zero delay delivers next step") {
    World w = empty_world();
    w.agents[0] = make_agent(0, {0, 0});
    w.agents[1] = make_agent(1, {5, 5});
    Trace t;
    send(w, t, 0, 1, dummy_msg());
    step(w, t);
    CHECK(w.inboxes[1].size() == 1);
}

TEST_CASE("forced loss records a Drop and never delivers") {
    World w = empty_world();
    w.agents[0] = make_agent(0, {0, 0});
    w.agents[1] = make_agent(1, {5, 5});
    w.bus.loss_prob = 0.999999;
    Trace t;
    send(w, t, 0, 1, dummy_msg());
    REQUIRE(t.size() == 1);
    CHECK(t.events()[0].kind == EventKind::Drop);
    step(w, t);
    CHECK(w.inboxes[1].empty());
}

TEST_CASE("broadcast fans out to every other agent") {
    World w = empty_world();
    for (int i = 0; i < 4; ++i) w.agents[i] = make_agent(i, {i, 0});
    Trace t;
    auto seqs = send(w, t, 0, kBroadcast, dummy_msg());
    CHECK(seqs.size() == 3);
    CHECK(w.bus.in_flight.size() == 3);
}

TEST_CASE("unknown recipient is an addressing error") {
    World w = empty_world();
    w.agents[0] = make_agent(0, {0, 0});
    Trace t;
    CHECK_THROWS_AS(send(w, t, 0, 42, dummy_msg()), ValidationError);
    CHECK_THROWS_AS(send(w, t, 9, 0, dummy_msg()), ValidationError);
}

TEST_CASE("message conservation: every sent envelope is delivered exactly once on a lossless bus") {
    World w = empty_world();
    for (int i = 0; i < 3; ++i) w.agents[i] = make_agent(i, {i, 0});
    w.bus.delay = 1;
    Trace t;
    for (int k = 0; k < 5; ++k) send(w, t, 0, kBroadcast, dummy_msg());
    for (int s = 0; s < 4; ++s) step(w, t);
    int sends = 0, delivers = 0;
    for (const auto& e : t.events()) {
        if (e.kind == EventKind::Send) ++sends;
        if (e.kind == EventKind::Deliver) ++delivers;
    }
    CHECK(sends == 10);
    CHECK(delivers == 10);
    CHECK(w.bus.in_flight.empty());
}

TEST_CASE("observe radius semantics") {
    World w = empty_world();
    w.agents[0] = make_agent(0, {0, 0});
    w.agents[1] = make_agent(1, {3, 0});
    Task task;
    task.id = 0;
    task.pos = {2, 2};
    w.tasks[0] = task;
    Task co;
    co.id = 1;
    co.pos = {0, 0};
    w.tasks[1] = co;

    SUBCASE("radius 0 sees only co-located tasks, never agents") {
        Observation obs = observe(w, 0, 0);
        CHECK(obs.visible_agents.empty());
        REQUIRE(obs.visible_tasks.size() == 1);
        CHECK(obs.visible_tasks[0].id == 1);
    }
    SUBCASE("chebyshev distance 2 reaches the diagonal task") {
        Observation obs = observe(w, 0, 2);
        bool saw = false;
        for (const auto& tk : obs.visible_tasks) saw = saw || tk.id == 0;
        CHECK(saw);
    }
    SUBCASE("radius covering the grid sees everything") {
        Observation obs = observe(w, 0, 8);
        CHECK(obs.visible_agents.size() == 1);
        CHECK(obs.visible_tasks.size() == 2);
    }
    SUBCASE("unknown observer throws") { CHECK_THROWS_AS(observe(w, 9, 1), ValidationError); }
}

TEST_CASE("agents cannot stack: blocked moves wait") {
    World w = empty_world();
    w.agents[0] = make_agent(0, {1, 1});
    w.agents[1] = make_agent(1, {2, 1});
    w.agents[0].activity = Moving{{{2, 1}}, 0, 0};
    Trace t;
    step(w, t);
    CHECK(w.agents[0].pos == Cell{1, 1});
    CHECK(std::get<Moving>(w.agents[0].activity).blocked_ticks == 1);
    w.validate();
}

TEST_CASE("head-on swap is blocked for both") {
    World w = empty_world();
    w.agents[0] = make_agent(0, {1, 1});
    w.agents[1] = make_agent(1, {2, 1});
    w.agents[0].activity = Moving{{{2, 1}}, 0, 0};
    w.agents[1].activity = Moving{{{1, 1}}, 0, 0};
    Trace t;
    step(w, t);
    CHECK(w.agents[0].pos == Cell{1, 1});
    CHECK(w.agents[1].pos == Cell{2, 1});
}

TEST_CASE("zero energy forbids moving and executing") {
    World w = empty_world();
    w.agents[0] = make_agent(0, {1, 1}, 0.0);
    w.agents[0].activity = Moving{{{2, 1}}, 0, 0};
    Task task;
    task.id = 0;
    task.pos = {1, 1};
    task.status = TaskStatus::Assigned;
    task.assigned_to = 0;
    w.tasks[0] = task;
    Trace t;
    step(w, t);
    CHECK(w.agents[0].pos == Cell{1, 1});
    w.agents[0].activity = Executing{0};
    step(w, t);
    CHECK(w.tasks[0].status == TaskStatus::Assigned);
}

TEST_CASE("execution rescues an assigned task and appends a Rescue event") {
    World w = empty_world();
    w.cfg.execute_cost = 1.0;
    w.agents[0] = make_agent(0, {1, 1}, 5.0);
    Task task;
    task.id = 7;
    task.pos = {1, 1};
    task.status = TaskStatus::Assigned;
    task.assigned_to = 0;
    task.deadline = 10;
    w.tasks[7] = task;
    w.agents[0].activity = Executing{7};
    Trace t;
    step(w, t);
    CHECK(w.tasks[7].status == TaskStatus::Done);
    CHECK(w.agents[0].energy == doctest::Approx(4.0));
    REQUIRE(t.size() == 1);
    CHECK(t.events()[0].kind == EventKind::Rescue);
}

TEST_CASE("deadlines expire pending tasks and terminal states are sticky") {
    World w = empty_world();
    Task task;
    task.id = 0;
    task.pos = {3, 3};
    task.deadline = 2;
    w.tasks[0] = task;
    Trace t;
    step(w, t);  // tick 1
    step(w, t);  // tick 2 (deadline tick, still active)
    CHECK(w.tasks[0].status == TaskStatus::Open);
    step(w, t);  // tick 3 -> expired
    CHECK(w.tasks[0].status == TaskStatus::Expired);
    CHECK_THROWS_AS(set_task_status(w, 0, TaskStatus::Open), ValidationError);
}

TEST_CASE("recharging caps at energy_full and never appears as consumption") {
    World w = empty_world();
    w.cfg.recharge_rate = 3.0;
    w.cfg.energy_full = 10.0;
    w.agents[0] = make_agent(0, {1, 1}, 8.5);
    w.agents[0].activity = Recharging{};
    Trace t;
    step(w, t);
    CHECK(w.agents[0].energy == doctest::Approx(10.0));
    REQUIRE(t.size() == 1);
    CHECK(t.events()[0].get_double("cost") == doctest::Approx(-1.5));
}

TEST_CASE("avoiding steps away from the nearest adversary") {
    World w = empty_world();
    w.agents[0] = make_agent(0, {2, 2});
    AdversaryState adv;
    adv.id = 0;
    adv.pos = {1, 2};
    w.adversaries[0] = adv;
    w.agents[0].activity = Avoiding{};
    Trace t;
    step(w, t);
    CHECK(chebyshev(w.agents[0].pos, w.adversaries[0].pos) > 1);
}

TEST_CASE("energy monotonicity: only recharging gains energy") {
    World w = empty_world();
    w.agents[0] = make_agent(0, {0, 0}, 6.0);
    w.agents[0].activity = Moving{{{1, 0}, {2, 0}, {3, 0}}, 0, 0};
    Trace t;
    double prev = w.agents[0].energy;
    for (int i = 0; i < 5; ++i) {
        step(w, t);
        CHECK(w.agents[0].energy <= prev);
        prev = w.agents[0].energy;
    }
}

TEST_CASE("determinism: identical seeds yield identical traces") {
    auto run_once = [](uint64_t seed) {
        World w = empty_world();
        w.rng = Rng(seed);
        w.bus.loss_prob = 0.4;
        for (int i = 0; i < 3; ++i) {
            w.agents[i] = make_agent(i, {i, i});
        }
        Trace t;
        trace_spawns(w, t);
        for (int k = 0; k < 10; ++k) {
            send(w, t, 0, kBroadcast, AckMsg{SessionId{0, w.tick, k}, k, 0});
            step(w, t);
        }
        return t.serialize();
    };
    CHECK(run_once(5) == run_once(5));
    CHECK(run_once(5) != run_once(6));
}

TEST_CASE("no teleportation: agent positions move by at most one 4-neighborhood step") {
    World w = empty_world();
    w.agents[0] = make_agent(0, {0, 0}, 100.0);
    w.agents[0].activity = Moving{{{1, 0}, {1, 1}, {2, 1}, {2, 2}}, 0, 0};
    Trace t;
    Cell prev = w.agents[0].pos;
    for (int i = 0; i < 6; ++i) {
        step(w, t);
        CHECK(manhattan(prev, w.agents[0].pos) <= 1);
        prev = w.agents[0].pos;
    }
    CHECK(w.agents[0].pos == Cell{2, 2});
}

TEST_CASE("observation omission stub drops entities at probability 1") {
    World w = empty_world();
    w.cfg.observe_omission_prob = 0.999999;
    w.agents[0] = make_agent(0, {0, 0});
    w.agents[1] = make_agent(1, {1, 1});
    Observation obs = observe(w, 0, 5);
    CHECK(obs.visible_agents.empty());
}

}  // TEST_SUITE
