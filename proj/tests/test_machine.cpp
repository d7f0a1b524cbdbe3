#include "helpers.hpp"

#include "sv/examples.hpp"
#include "sv/machine.hpp"
#include "sv/variable.hpp"

#include <doctest.h>

using namespace sv;

namespace {

machine mod_machine(int64_t k) {
    machine m;
    m.alphabet = alphabet_spec::open();
    m.initial = value(int64_t{0});
    m.step = [k](const value& s, const event&) { return value((s.as_int() + 1) % k); };
    m.out = [](const value& s) { return s; };
    return m;
}

machine unbounded_machine() {
    machine m;
    m.alphabet = alphabet_spec::open();
    m.initial = value(int64_t{0});
    m.step = [](const value& s, const event&) { return value(s.as_int() + 1); };
    m.out = [](const value& s) { return s; };
    return m;
}

// six internal states, output mod 3: states i and i+3 are equivalent
machine redundant_machine() {
    machine m;
    m.alphabet = alphabet_spec::open();
    m.initial = value(int64_t{0});
    m.step = [](const value& s, const event&) { return value((s.as_int() + 1) % 6); };
    m.out = [](const value& s) { return value(s.as_int() % 3); };
    return m;
}

machine constant_machine(value out) {
    machine m;
    m.alphabet = alphabet_spec::open();
    m.initial = value(int64_t{0});
    m.step = [](const value& s, const event&) { return s; };
    m.out = [out](const value&) { return out; };
    return m;
}

const event tick{symbol("tick")};
const std::vector<event> tick_basis{tick};

trace ticks(size_t n) { return trace(n, tick); }

} // namespace

TEST_CASE("run folds the transition over the trace") {
    auto m3 = mod_machine(3);
    CHECK(run(m3, nulls()) == value(int64_t{0})); // initial C = 0
    CHECK(run(m3, ticks(5)) == value(int64_t{2})); // oracle: 5 mod 3
    auto cm = constant_machine(value("k"));
    CHECK(run(cm, nulls()) == cm.out(cm.initial));
}

TEST_CASE("run rejects events outside a closed alphabet") {
    machine m = mod_machine(3);
    m.alphabet = alphabet_spec::closed({tick});
    CHECK_NOTHROW(run(m, ticks(4)));
    trace w = {tick, event(symbol("other")), tick};
    CHECK_THROWS_WITH_AS(run(m, w), doctest::Contains("position 1"), alphabet_error);
    CHECK_THROWS_AS(step_state(m, m.initial, event(symbol("other"))), alphabet_error);
}

TEST_CASE("step_state agrees with run") {
    auto m3 = mod_machine(3);
    CHECK(m3.out(step_state(m3, value(int64_t{2}), tick)) == value(int64_t{0}));
    // definition unfolding on random traces
    rng g(3);
    auto basis = svt::small_basis();
    for (int i = 0; i < 200; ++i) {
        trace w = svt::random_trace(g, basis, 40);
        event e = basis[g.below(basis.size())];
        value s = m3.initial;
        for (const auto& x : w) s = step_state(m3, s, x);
        CHECK(run(m3, append(w, e)) == m3.out(step_state(m3, s, e)));
    }
}

TEST_CASE("queue machine: deq empties the single-element queue") {
    auto qm = to_machine(queue_variable());
    value st = step_state(qm, qm.initial, enq(value("a")));
    CHECK(st.map_get(value(int64_t{1})).value() == value("a"));
    value st2 = step_state(qm, st, deq());
    CHECK(!st2.map_get(value(int64_t{1})).has_value()); // Q(1) back to nullv
}

TEST_CASE("reachable closure") {
    auto r3 = reachable(mod_machine(3), tick_basis, 100);
    CHECK(r3.complete);
    CHECK(r3.states.size() == 3); // oracle: the three residues

    auto ru = reachable(unbounded_machine(), tick_basis, 10);
    CHECK(!ru.complete);
    CHECK(ru.states.size() == 10); // states 0..9 with a nonempty frontier

    auto r1 = reachable(mod_machine(3), tick_basis, 1);
    CHECK(!r1.complete);
    CHECK(r1.states.size() == 1);
    CHECK(r1.states[0] == value(int64_t{0}));

    auto rc = reachable(constant_machine(value(int64_t{9})), tick_basis, 1);
    CHECK(rc.complete); // initial is a fixed point
}

TEST_CASE("minimize: mod 3 counter has exactly 3 states") {
    auto res = minimize(mod_machine(3), tick_basis, 100);
    CHECK(res.table.states.size() == 3);
    CHECK(res.classes.classes.size() == 3);
    auto eq = equivalent(mod_machine(3), res.quotient, tick_basis, 100);
    CHECK(eq.equivalent);
}

TEST_CASE("minimize merges redundant states and preserves behavior") {
    auto m = redundant_machine();
    auto res = minimize(m, tick_basis, 100);
    CHECK(res.table.states.size() == 3); // oracle: outputs cycle mod 3
    rng g(17);
    for (int i = 0; i < 1000; ++i) {
        trace w = ticks(g.below(60));
        CHECK(run(m, w) == run(res.quotient, w));
    }
}

TEST_CASE("minimize of a one-state machine is the identity") {
    auto res = minimize(constant_machine(value("x")), tick_basis, 10);
    CHECK(res.table.states.size() == 1);
    CHECK(run(res.quotient, ticks(5)) == value("x"));
}

TEST_CASE("minimize partition: classes agree on output and successor classes") {
    for (uint64_t seed : {1u, 2u, 3u, 4u}) {
        rng g(seed);
        auto basis = svt::small_basis();
        auto m = svt::random_machine(g, 7, basis, 3);
        auto res = minimize(m, basis, 100);
        for (const auto& cls : res.classes.classes) {
            REQUIRE(!cls.empty());
            for (const auto& s : cls) {
                CHECK(m.out(s) == m.out(cls[0]));
                for (const auto& e : basis)
                    CHECK(res.classes.class_of.at(m.step(s, e)) ==
                          res.classes.class_of.at(m.step(cls[0], e)));
            }
        }
    }
}

TEST_CASE("minimize reports incompleteness") {
    CHECK_THROWS_AS(minimize(unbounded_machine(), tick_basis, 50), bound_error);
}

TEST_CASE("equivalent: mod 3 vs mod 4 differ first at length 3") {
    auto res = equivalent(mod_machine(3), mod_machine(4), tick_basis, 1000);
    CHECK(!res.equivalent);
    REQUIRE(res.witness.has_value());
    CHECK(res.witness->size() == 3); // first n with n mod 3 != n mod 4
    CHECK(run(mod_machine(3), *res.witness) != run(mod_machine(4), *res.witness));

    auto self = equivalent(mod_machine(3), mod_machine(3), tick_basis, 1000);
    CHECK(self.equivalent);
    CHECK_THROWS_AS(equivalent(unbounded_machine(), unbounded_machine(), tick_basis, 20),
                    bound_error);
}

TEST_CASE("equivalent is an equivalence relation on the fixture set") {
    std::vector<machine> fixtures;
    for (int64_t k : {1, 2, 3, 4, 6}) fixtures.push_back(mod_machine(k));
    fixtures.push_back(redundant_machine());       // behaves like mod 3
    fixtures.push_back(constant_machine(value(int64_t{0}))); // behaves like mod 1
    const size_t n = fixtures.size();
    std::vector<std::vector<bool>> eq(n, std::vector<bool>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            eq[i][j] = equivalent(fixtures[i], fixtures[j], tick_basis, 1000).equivalent;
    for (size_t i = 0; i < n; ++i) {
        CHECK(eq[i][i]); // reflexive
        for (size_t j = 0; j < n; ++j) {
            CHECK(eq[i][j] == eq[j][i]); // symmetric
            for (size_t k = 0; k < n; ++k)
                if (eq[i][j] && eq[j][k]) CHECK(eq[i][k]); // transitive
        }
    }
    // sanity against the oracle: mod j ~ mod k iff j == k
    CHECK(eq[2][5]); // mod 3 ~ redundant
    CHECK(eq[0][6]); // mod 1 ~ constant 0
    CHECK(!eq[2][3]);
}

TEST_CASE("nerode classes of len mod 3") {
    auto basis = svt::small_basis();
    auto f = [](const trace& w) { return value(static_cast<int64_t>(w.size() % 3)); };
    auto part = nerode_classes_bounded(f, basis, 4, 3);
    CHECK(part.classes.size() == 3); // brute force: residues of the length

    auto part0 = nerode_classes_bounded(f, basis, 4, 0);
    CHECK(part0.classes.size() == 3); // distinguisher 0 groups by f value

    auto constant = [](const trace&) { return value(int64_t{42}); };
    CHECK(nerode_classes_bounded(constant, basis, 3, 2).classes.size() == 1);
}

TEST_CASE("nerode refinement is monotone and meets the exact partition") {
    auto basis = svt::small_basis();
    for (uint64_t seed = 0; seed < 3; ++seed) {
        rng g(100 + seed);
        auto m = svt::random_machine(g, 5, basis, 2);
        auto f = [&m](const trace& w) { return run(m, w); };

        word_partition prev;
        for (size_t k = 0; k <= 6; ++k) {
            auto part = nerode_classes_bounded(f, basis, 4, k);
            if (k > 0) {
                // refining never merges: words together now were together before
                for (const auto& cls : part.classes) {
                    for (size_t i = 1; i < cls.size(); ++i)
                        CHECK(prev.class_of.at(cls[i]) == prev.class_of.at(cls[0]));
                }
                CHECK(part.classes.size() >= prev.classes.size());
            }
            prev = std::move(part);
        }

        // at depth 6 > |S|-1 the bounded relation matches the exact quotient
        auto res = minimize(m, basis, 100);
        auto state_of = [&](const trace& w) {
            value s = m.initial;
            for (const auto& e : w) s = m.step(s, e);
            return s;
        };
        for (const auto& [w1, c1] : prev.class_of)
            for (const auto& [w2, c2] : prev.class_of) {
                bool same_exact = res.classes.class_of.at(state_of(w1)) ==
                                  res.classes.class_of.at(state_of(w2));
                CHECK((c1 == c2) == same_exact);
            }
    }
}

TEST_CASE("machine table serialization round trip") {
    auto res = minimize(redundant_machine(), tick_basis, 100);
    auto j = res.table.to_json();
    auto t2 = machine_table::from_json(j);
    CHECK(t2.to_json() == j);
    auto m2 = t2.to_machine();
    for (size_t n = 0; n < 12; ++n) CHECK(run(m2, ticks(n)) == run(res.quotient, ticks(n)));
    CHECK_THROWS_AS(run(m2, {event(symbol("zap"))}), alphabet_error);

    auto pj = res.classes.to_json();
    CHECK(pj.at("classes").size() == 3);
}
