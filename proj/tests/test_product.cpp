#include "helpers.hpp"

#include "sv/examples.hpp"
#include "sv/product.hpp"

#include <doctest.h>

using namespace sv;

namespace {

const event tick{symbol("tick")};
trace ticks(size_t n) { return trace(n, tick); }

feedback_fn pass_through() {
    return [](const event& e, std::span<const value>) -> feedback_action { return e; };
}

feedback_fn always_hold() {
    return [](const event&, std::span<const value>) -> feedback_action { return hold; };
}

// connected-counter wiring: the outer counter ticks always, the inner one
// when the outer output reads c-1
state_variable connected_via_product(int64_t c) {
    std::vector<feedback_fn> fbs;
    fbs.push_back(pass_through());
    fbs.push_back([c](const event&, std::span<const value> outs) -> feedback_action {
        if (outs[0].as_int() == c - 1) return event(symbol("t"));
        return hold;
    });
    return general_product({mod_counter(c), mod_counter(c)}, std::move(fbs));
}

int64_t product_d(const value& tuple_out, int64_t c) {
    return tuple_out.items()[0].as_int() + c * tuple_out.items()[1].as_int();
}

} // namespace

TEST_CASE("singleton pass-through product equals the component") {
    auto p = general_product({mod_counter(5)}, {pass_through()});
    rng g(2);
    auto basis = svt::small_basis(2);
    for (int i = 0; i < 100; ++i) {
        trace w = svt::random_trace(g, basis, 40);
        CHECK(eval(p, w) == value::tup({eval(mod_counter(5), w)}));
    }
}

TEST_CASE("connected counters as a product count mod c^2") {
    for (int64_t c : {2, 3, 5}) {
        auto p = connected_via_product(c);
        size_t limit = 3 * static_cast<size_t>(c * c);
        auto st = p.instantiate();
        for (size_t n = 0; n <= limit; ++n) {
            int64_t d = product_d(st->current(), c);
            CHECK(d == svt::connected_counters_oracle(c, n)); // brute-force recursion
            CHECK(d == static_cast<int64_t>(n % static_cast<size_t>(c * c)));
            st->advance(tick);
        }
    }
}

TEST_CASE("all-hold feedback freezes every component") {
    auto p = general_product({mod_counter(3), unbounded_counter()},
                             {always_hold(), always_hold()});
    rng g(4);
    for (int i = 0; i < 50; ++i) {
        trace w = ticks(g.below(30));
        CHECK(eval(p, w) == value::tup({value(int64_t{0}), value(int64_t{0})}));
    }
    auto rep = is_finite_state(p, {tick}, 10);
    CHECK(rep.finite);
    CHECK(rep.state_count == 1);
}

TEST_CASE("multi-step actions") {
    // singleton sequences behave exactly like single events
    auto single = general_product({mod_counter(4)}, {pass_through()});
    auto seq1 = multi_step_product(
        {mod_counter(4)},
        {[](const event& e, std::span<const value>) -> feedback_action {
            return std::vector<event>{e};
        }});
    rng g(6);
    auto basis = svt::small_basis(2);
    for (int i = 0; i < 100; ++i) {
        trace w = svt::random_trace(g, basis, 30);
        CHECK(eval(seq1, w) == eval(single, w));
    }

    // a component fed two ticks per outer event counts 2n
    auto twice = multi_step_product(
        {unbounded_counter()},
        {[](const event&, std::span<const value>) -> feedback_action {
            return std::vector<event>{tick, tick};
        }});
    for (size_t n = 0; n <= 20; ++n)
        CHECK(eval(twice, ticks(n)) == value::tup({value(static_cast<int64_t>(2 * n))}));

    // the empty sequence is hold
    auto empty_act = multi_step_product(
        {unbounded_counter()},
        {[](const event&, std::span<const value>) -> feedback_action {
            return std::vector<event>{};
        }});
    for (size_t n = 0; n <= 10; ++n)
        CHECK(eval(empty_act, ticks(n)) == value::tup({value(int64_t{0})}));
}

TEST_CASE("cascade product is the slice-restricted general product") {
    // connected counters in cascade order: the inner counter is component 0
    // and reads only the outer counter's output (its slice covers 0..1)
    int64_t c = 3;
    std::vector<cascade_feedback_fn> cfbs;
    cfbs.push_back([c](const event&, std::span<const value> outs) -> feedback_action {
        // slice 0..n for component 0: outs[1] is the outer counter
        if (outs[1].as_int() == c - 1) return event(symbol("t"));
        return hold;
    });
    cfbs.push_back([](const event& e, std::span<const value>) -> feedback_action {
        return e; // sees only itself
    });
    auto cas = cascade_product({mod_counter(c), mod_counter(c)}, std::move(cfbs));

    auto ref = connected_via_product(c);
    for (size_t n = 0; n <= 3 * static_cast<size_t>(c * c); ++n) {
        auto vs = eval(cas, ticks(n)).items();
        int64_t d = vs[1].as_int() + c * vs[0].as_int(); // components swapped
        CHECK(d == product_d(eval(ref, ticks(n)), c));
    }

    // the same wiring through general_product evaluates identically
    std::vector<feedback_fn> gfbs;
    gfbs.push_back([c](const event&, std::span<const value> outs) -> feedback_action {
        if (outs[1].as_int() == c - 1) return event(symbol("t"));
        return hold;
    });
    gfbs.push_back(pass_through());
    auto gen = general_product({mod_counter(c), mod_counter(c)}, std::move(gfbs));
    rng g(8);
    for (int i = 0; i < 100; ++i) {
        trace w = ticks(g.below(50));
        CHECK(eval(cas, w) == eval(gen, w));
    }

    // single-component cascade is that component
    std::vector<cascade_feedback_fn> one;
    one.push_back([](const event& e, std::span<const value>) -> feedback_action { return e; });
    auto single = cascade_product({mod_counter(4)}, std::move(one));
    for (size_t n = 0; n <= 10; ++n)
        CHECK(eval(single, ticks(n)) == value::tup({eval(mod_counter(4), ticks(n))}));

    // all-hold cascade freezes
    std::vector<cascade_feedback_fn> holds;
    holds.push_back([](const event&, std::span<const value>) -> feedback_action { return hold; });
    holds.push_back([](const event&, std::span<const value>) -> feedback_action { return hold; });
    auto frozen = cascade_product({mod_counter(2), mod_counter(2)}, std::move(holds));
    CHECK(eval(frozen, ticks(9)) == value::tup({value(int64_t{0}), value(int64_t{0})}));
}

TEST_CASE("shift register") {
    auto r3 = shift_register(3);
    trace w;
    for (const char* s : {"a", "b", "c", "d"}) w.push_back(event(symbol("in"), value(s)));
    CHECK(eval(r3, w) == value::tup({value("d"), value("c"), value("b")}));

    auto r1 = shift_register(1);
    CHECK(eval(r1, w) == value::tup({value("d")}));

    CHECK(eval(r3, nulls()) == value::tup({nullv, nullv, nullv}));

    // random input sequences against the array oracle
    rng g(10);
    for (int i = 0; i < 200; ++i) {
        size_t n = 1 + g.below(4);
        auto reg = shift_register(n);
        svt::register_oracle oracle(n);
        auto st = reg.instantiate();
        size_t len = g.below(30);
        for (size_t j = 0; j < len; ++j) {
            value v = value(static_cast<int64_t>(g.below(3)));
            st->advance(event(symbol("in"), v));
            oracle.shift_in(v);
        }
        CHECK(st->current() == oracle.tuple());
    }

    CHECK_THROWS_AS(eval(r3, {event(symbol("in"))}), type_error); // payload required
    CHECK_THROWS_AS(shift_register(0), domain_error);
}

TEST_CASE("bidirectional register") {
    auto r3 = bidirectional_register(3);
    trace fill{shift_event(1, value("c")), shift_event(1, value("b")), shift_event(1, value("a"))};
    // cells now (a, b, c)
    CHECK(eval(r3, fill) == value::tup({value("a"), value("b"), value("c")}));
    CHECK(eval(r3, append(fill, shift_event(1, value("x")))) ==
          value::tup({value("x"), value("a"), value("b")}));
    CHECK(eval(r3, append(fill, shift_event(-1, value("x")))) ==
          value::tup({value("b"), value("c"), value("x")}));

    // n = 1: both directions load the newest input
    auto r1 = bidirectional_register(1);
    trace alt{shift_event(1, value("x")), shift_event(-1, value("y")),
              shift_event(1, value("z"))};
    CHECK(eval(r1, alt) == value::tup({value("z")}));

    // exhaustive against the oracle: n <= 4, sequences <= 6 over 2 values
    std::vector<event> evs{shift_event(1, value("p")), shift_event(1, value("q")),
                           shift_event(-1, value("p")), shift_event(-1, value("q"))};
    for (size_t n = 1; n <= 4; ++n) {
        auto reg = bidirectional_register(n);
        std::vector<trace> layer{nulls()};
        for (size_t len = 0; len <= 6; ++len) {
            std::vector<trace> next;
            for (const auto& w : layer) {
                svt::register_oracle oracle(n);
                for (const auto& e : w) {
                    const auto& p = e.payload->items();
                    oracle.shift(static_cast<int>(p[0].as_int()), p[1]);
                }
                CHECK(eval(reg, w) == oracle.tuple());
                if (len < 6)
                    for (const auto& e : evs) next.push_back(append(w, e));
            }
            layer = std::move(next);
        }
    }

    CHECK_THROWS_AS(eval(r3, {event(symbol("shift"), value(int64_t{1}))}), type_error);
    CHECK_THROWS_WITH_AS(eval(r3, {shift_event(2, value("x"))}),
                         doctest::Contains("+1 or -1"), type_error);
}

TEST_CASE("product drivers extend exactly by the feedback actions") {
    int64_t c = 3;
    auto p = connected_via_product(c);
    auto st = p.instantiate();
    rng g(12);
    size_t expected_inner = 0;
    size_t steps = 40;
    for (size_t n = 0; n < steps; ++n) {
        // compute the expected actions from the pre-event outputs
        auto outs = st->current().items();
        if (outs[0].as_int() == c - 1) expected_inner += 1;
        st->advance(tick);
        const auto* drivers = st->driver_traces();
        REQUIRE(drivers != nullptr);
        CHECK((*drivers)[0].size() == n + 1);          // outer ticks every event
        CHECK((*drivers)[1].size() == expected_inner); // inner gated by the outer
    }
}

TEST_CASE("initial driver traces pre-advance the components") {
    auto p = general_product({unbounded_counter()}, {pass_through()}, {ticks(4)});
    CHECK(eval(p, nulls()) == value::tup({value(int64_t{4})}));
    CHECK(eval(p, ticks(2)) == value::tup({value(int64_t{6})}));
}

TEST_CASE("feedback producing an out-of-alphabet event names the component") {
    auto closed = define(alphabet_spec::closed({tick}), value(int64_t{0}),
                         [](const value& v, const event&) { return v; });
    auto p = general_product({mod_counter(2), closed},
                             {pass_through(), pass_through()});
    CHECK_THROWS_WITH_AS(eval(p, {event(symbol("zap"))}), doctest::Contains("component 1"),
                         alphabet_error);
}

TEST_CASE("finite-state closure of products") {
    auto p = connected_via_product(3);
    auto rep = is_finite_state(p, {tick}, 1000);
    CHECK(rep.finite);
    CHECK(rep.state_count <= 9); // pairs of residues
    auto mini = minimize(to_machine(p), {tick}, 1000);
    CHECK(mini.table.states.size() <= 9);

    auto bad = general_product({unbounded_counter()}, {pass_through()});
    auto rep2 = is_finite_state(bad, {tick}, 1000);
    CHECK(!rep2.finite);
    CHECK(rep2.state_count == 1000);

    // closure claim on fixture products of finite-state components
    std::vector<state_variable> fixtures{connected_via_product(2), shift_register(3),
                                         bidirectional_register(2)};
    std::vector<std::vector<event>> bases{
        {tick},
        {event(symbol("in"), value("p")), event(symbol("in"), value("q"))},
        {shift_event(1, value("p")), shift_event(-1, value("q"))}};
    for (size_t i = 0; i < fixtures.size(); ++i)
        CHECK(is_finite_state(fixtures[i], bases[i], 2000).finite);
}

TEST_CASE("product lowering soundness") {
    rng g(14);
    auto p = connected_via_product(2);
    machine m = to_machine(p);
    for (int i = 0; i < 300; ++i) {
        trace w = ticks(g.below(30));
        CHECK(run(m, w) == eval(p, w));
    }

    auto reg = bidirectional_register(2);
    machine rm = to_machine(reg);
    std::vector<event> evs{shift_event(1, value("p")), shift_event(-1, value("q"))};
    for (int i = 0; i < 200; ++i) {
        trace w;
        for (size_t j = 0, n = g.below(15); j < n; ++j) w.push_back(evs[g.below(2)]);
        CHECK(run(rm, w) == eval(reg, w));
    }
}
