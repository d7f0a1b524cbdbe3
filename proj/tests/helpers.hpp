#pragma once

// Shared test fixtures: deterministic random generators and the independent
// reference oracles the expected values are computed from. Oracles stay
// plain-array / plain-int code so they share nothing with the library's
// evaluation path.

#include "sv/event.hpp"
#include "sv/machine.hpp"
#include "sv/rng.hpp"
#include "sv/value.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace svt {

using namespace sv;

// ---- event/trace generators -------------------------------------------------

inline std::vector<event> small_basis(size_t n = 2) {
    std::vector<event> es;
    const char* names[] = {"a", "b", "c", "d"};
    for (size_t i = 0; i < n && i < 4; ++i) es.push_back(event(symbol(names[i])));
    return es;
}

inline trace random_trace(rng& g, const std::vector<event>& basis, size_t max_len) {
    size_t len = g.below(max_len + 1);
    trace t;
    t.reserve(len);
    for (size_t i = 0; i < len; ++i) t.push_back(basis[g.below(basis.size())]);
    return t;
}

inline value random_value(rng& g, int depth = 2) {
    switch (g.below(depth > 0 ? 8 : 5)) {
    case 0: return value(static_cast<int64_t>(g.below(100)) - 50);
    case 1: return value(symbol(std::string(1, char('a' + g.below(4)))));
    case 2: return value(g.bernoulli(0.5));
    case 3: return sv::nullv;
    case 4: return sv::nullm;
    case 5: {
        value::list xs;
        for (size_t i = 0, n = g.below(4); i < n; ++i) xs.push_back(random_value(g, depth - 1));
        return value::seq(std::move(xs));
    }
    case 6: {
        value::list xs;
        for (size_t i = 0, n = g.below(4); i < n; ++i) xs.push_back(random_value(g, depth - 1));
        return g.bernoulli(0.5) ? value::set_of(std::move(xs)) : value::tup(std::move(xs));
    }
    default: {
        value::pair_list es;
        for (size_t i = 0, n = g.below(3); i < n; ++i) {
            auto k = random_value(g, 0);
            es.emplace_back(std::move(k), random_value(g, depth - 1));
        }
        return value::map_of(std::move(es));
    }
    }
}

// ---- counter oracles ----------------------------------------------------------

inline int64_t mod_counter_oracle(int64_t c, size_t n) {
    return static_cast<int64_t>(n % static_cast<size_t>(c));
}

// literal fold of the connected-counter defining recursions with plain ints
inline int64_t connected_counters_oracle(int64_t c, size_t n) {
    int64_t outer = 0;
    size_t driver_len = 0;
    for (size_t i = 0; i < n; ++i) {
        if (outer == c - 1) driver_len += 1; // u extends exactly when C = c-1
        outer = (outer + 1) % c;
    }
    int64_t inner = static_cast<int64_t>(driver_len % static_cast<size_t>(c));
    return outer + c * inner;
}

// ---- queue oracle ---------------------------------------------------------------

// enq writes position 1 and shifts up; deq shifts down: front-of-vector ops
struct queue_oracle {
    std::vector<value> items; // items[0] is Q(1)

    void enq(const value& v) { items.insert(items.begin(), v); }
    void deq() {
        if (!items.empty()) items.erase(items.begin());
    }
    value q_at(size_t i) const { // 1-based, nullv when absent
        if (i == 0 || i > items.size()) return sv::nullv;
        return items[i - 1];
    }
};

// ---- register oracles -------------------------------------------------------------

struct register_oracle {
    std::vector<value> cells;

    explicit register_oracle(size_t n) : cells(n, sv::nullv) {}

    void shift_in(const value& v) { // shift right, newest at cell 1
        for (size_t i = cells.size(); i-- > 1;) cells[i] = cells[i - 1];
        cells[0] = v;
    }
    void shift(int dir, const value& v) { // +1 right, -1 left
        std::vector<value> next(cells.size());
        for (size_t i = 0; i < cells.size(); ++i) {
            int64_t src = static_cast<int64_t>(i) - dir;
            if (src >= 0 && src < static_cast<int64_t>(cells.size()))
                next[i] = cells[static_cast<size_t>(src)];
            else
                next[i] = v;
        }
        cells = std::move(next);
    }
    value tuple() const {
        value::list xs(cells.begin(), cells.end());
        return value::tup(std::move(xs));
    }
};

// ---- random finite machines ----------------------------------------------------------

// random total machine on `states` states over the basis, with outputs drawn
// from a small set; used by the Nerode and minimization properties
inline machine random_machine(rng& g, size_t states, const std::vector<event>& basis,
                              size_t out_range = 2) {
    auto table = std::make_shared<std::vector<std::vector<size_t>>>();
    auto outs = std::make_shared<std::vector<int64_t>>();
    for (size_t s = 0; s < states; ++s) {
        std::vector<size_t> row;
        for (size_t j = 0; j < basis.size(); ++j) row.push_back(g.below(states));
        table->push_back(std::move(row));
        outs->push_back(static_cast<int64_t>(g.below(out_range)));
    }
    auto index_of = [basis](const event& e) {
        for (size_t j = 0; j < basis.size(); ++j)
            if (basis[j] == e) return j;
        throw alphabet_error("event outside basis: " + e.str());
    };
    machine m;
    m.alphabet = alphabet_spec::closed(basis);
    m.initial = value(int64_t{0});
    m.step = [table, index_of](const value& s, const event& e) {
        return value(static_cast<int64_t>(
            (*table)[static_cast<size_t>(s.as_int())][index_of(e)]));
    };
    m.out = [outs](const value& s) { return value((*outs)[static_cast<size_t>(s.as_int())]); };
    return m;
}

} // namespace svt
