#include "helpers.hpp"

#include "sv/examples.hpp"

#include <doctest.h>

using namespace sv;

namespace {

const event tick{symbol("tick")};
trace ticks(size_t n) { return trace(n, tick); }

// random queue-ish op: enq with a small payload, deq, or an ignored event
event random_queue_op(rng& g) {
    switch (g.below(4)) {
    case 0: return deq();
    case 1: return event(symbol("noise"));
    default: return enq(value(static_cast<int64_t>(g.below(3))));
    }
}

size_t occupancy(const value& q) { return q.size(); }

} // namespace

TEST_CASE("mod counter") {
    CHECK(eval(mod_counter(3), nulls()) == value(int64_t{0})); // initial C = 0
    CHECK(eval(mod_counter(3), ticks(5)) == value(int64_t{2}));
    CHECK(eval(mod_counter(1), ticks(17)) == value(int64_t{0}));
    CHECK_THROWS_AS(mod_counter(0), domain_error);

    // pointwise equal to the unbounded counter reduced mod c
    rng g(1);
    auto reduced = combine(
        [](std::span<const value> vs) { return value(vs[0].as_int() % 4); },
        {unbounded_counter()});
    for (int i = 0; i < 200; ++i) {
        trace w = svt::random_trace(g, svt::small_basis(3), 60);
        CHECK(eval(mod_counter(4), w) == eval(reduced, w));
    }
}

TEST_CASE("unbounded counter") {
    CHECK(eval(unbounded_counter(), nulls()) == value(int64_t{0}));
    CHECK(eval(unbounded_counter(), ticks(17)) == value(int64_t{17}));
    // defining equation: one more event, one more count
    rng g(2);
    for (int i = 0; i < 50; ++i) {
        size_t n = g.below(40);
        CHECK(eval(unbounded_counter(), ticks(n + 1)).as_int() ==
              eval(unbounded_counter(), ticks(n)).as_int() + 1);
    }
}

TEST_CASE("connected counters: closed form checked exhaustively") {
    for (int64_t c : {1, 2, 3, 5}) {
        auto prod_form = connected_counters(c);
        auto direct_form = connected_counters_direct(c);
        size_t limit = 3 * static_cast<size_t>(c * c);
        auto ps = prod_form.instantiate();
        auto ds = direct_form.instantiate();
        for (size_t n = 0; n <= limit; ++n) {
            int64_t oracle = svt::connected_counters_oracle(c, n);
            CHECK(oracle == static_cast<int64_t>(n % static_cast<size_t>(c * c)));
            CHECK(ps->current().as_int() == oracle);
            CHECK(ds->current().as_int() == oracle);
            ps->advance(tick);
            ds->advance(tick);
        }
    }
    CHECK_THROWS_AS(connected_counters(0), domain_error);
}

TEST_CASE("queue recursion follows the written cases") {
    auto q = queue_variable();
    auto one = value::from_json(eval(q, {enq(value("a"))}).to_json());
    CHECK(one.map_get(value(int64_t{1})).value() == value("a"));
    CHECK(!one.map_get(value(int64_t{2})).has_value()); // Q(2) = nullv

    // the enq cases write position 1 and shift up: last in, first out
    auto two = eval(q, {enq(value("a")), enq(value("b"))});
    CHECK(two.map_get(value(int64_t{1})).value() == value("b"));
    CHECK(two.map_get(value(int64_t{2})).value() == value("a"));

    CHECK(eval(q, {enq(value("a")), deq()}).size() == 0);
    CHECK(eval(q, {deq()}).size() == 0); // deq of empty stays empty

    // events outside enq/deq are ignored
    CHECK(eval(q, {enq(value("a")), event(symbol("noise"))}) == eval(q, {enq(value("a"))}));

    CHECK_THROWS_AS(eval(q, {enq(nullv)}), type_error);
    CHECK_THROWS_AS(eval(q, {event(symbol("enq"))}), type_error);
}

TEST_CASE("queue matches the list oracle on random op sequences") {
    rng g(5);
    for (int i = 0; i < 1000; ++i) {
        auto st = queue_variable().instantiate();
        svt::queue_oracle oracle;
        size_t len = g.below(50);
        for (size_t j = 0; j < len; ++j) {
            event op = random_queue_op(g);
            st->advance(op);
            if (op.name == symbol("enq"))
                oracle.enq(*op.payload);
            else if (op.name == symbol("deq"))
                oracle.deq();
            value q = st->current();
            // every position agrees, including absence beyond the support
            for (size_t pos = 1; pos <= oracle.items.size() + 2; ++pos) {
                auto got = q.map_get(value(static_cast<int64_t>(pos)));
                value expect = oracle.q_at(pos);
                if (expect == nullv)
                    CHECK(!got.has_value());
                else
                    CHECK(got.value() == expect);
            }
            // support invariant: Q(i)=nullv and j>i implies Q(j)=nullv
            CHECK(q.size() == oracle.items.size());
            for (const auto& [k, v] : q.entries()) {
                CHECK(k.as_int() >= 1);
                CHECK(k.as_int() <= static_cast<int64_t>(q.size()));
                CHECK(v != nullv);
            }
        }
    }
}

TEST_CASE("bounded queue examples") {
    auto bq = bounded_queue(2);
    trace one{enq(value("a"))};
    CHECK(eval(bq.defined, one) == value(true));
    CHECK(eval(bq.cq, one) == value("a"));
    CHECK(eval(bq.high_water, one) == value(int64_t{1}));

    // over-fill: high water sticks at 3 >= c and cq stays unspecified
    trace over{enq(value("a")), enq(value("b")), enq(value("x"))};
    CHECK(eval(bq.high_water, over) == value(int64_t{3}));
    CHECK(eval(bq.cq, over) == unspecified);
    CHECK(eval(bq.defined, over) == value(false));
    trace later = over;
    for (int i = 0; i < 10; ++i) {
        later = append(later, deq());
        CHECK(eval(bq.cq, later) == unspecified);
        CHECK(eval(bq.high_water, later) == value(int64_t{3}));
    }

    // empty queue is outside the specified region
    CHECK(eval(bq.defined, nulls()) == value(false));
    CHECK(eval(bq.cq, nulls()) == unspecified);

    CHECK_THROWS_AS(bounded_queue(0), domain_error);
}

TEST_CASE("high water equals the peak prefix occupancy") {
    rng g(6);
    for (int i = 0; i < 300; ++i) {
        int64_t c = 1 + static_cast<int64_t>(g.below(3));
        auto bq = bounded_queue(c);
        auto hw = bq.high_water.instantiate();
        auto df = bq.defined.instantiate();
        auto q = queue_variable().instantiate();
        int64_t peak = 0;
        int64_t last_hw = 0;
        bool overfilled = false;
        size_t len = g.below(40);
        for (size_t j = 0; j < len; ++j) {
            event op = random_queue_op(g);
            hw->advance(op);
            df->advance(op);
            q->advance(op);
            peak = std::max(peak, static_cast<int64_t>(occupancy(q->current())));
            int64_t cur = hw->current().as_int();
            CHECK(cur == peak);      // oracle recomputed from scratch
            CHECK(cur >= last_hw);   // never decreases
            last_hw = cur;
            if (cur >= c) overfilled = true;
            if (overfilled) CHECK(df->current() == value(false)); // falsified for good
        }
    }
}
