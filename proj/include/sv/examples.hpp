#pragma once

#include "sv/product.hpp"
#include "sv/variable.hpp"

namespace sv {

// Counts every event mod c. Output 0 on the empty trace.
state_variable mod_counter(int64_t c);

// Counts every event, no wraparound.
state_variable unbounded_counter();

// Two connected mod-c counters: an outer counter ticks on every event and
// gates an inner counter that ticks once per full revolution, so the pair
// counts events mod c^2. Built as a product so it lowers to a finite
// machine. Output is the combined scalar D = outer + c * inner.
state_variable connected_counters(int64_t c);

// The same composition written with the substitution operator directly:
// D = C + c * SUB{u}C where u appends exactly when C = c-1. The driver u is
// defined jointly with C's value, so this form carries an unbounded trace in
// its lowered state; it evaluates identically to connected_counters.
state_variable connected_counters_direct(int64_t c);

// Map-valued queue over events enq[v] / deq; every other event is ignored.
// The defining recursion makes enq write position 1 and shift the rest up,
// so the discipline is last-in first-out. Position i is absent from the
// value map where Q(i) would be nullv.
state_variable queue_variable();

// enq / deq event constructors for the queue examples.
event enq(value v);
event deq();

struct bounded_queue_vars {
    state_variable cq;         // front of the queue, or unspecified
    state_variable high_water; // peak occupancy ever reached
    state_variable defined;    // boolean: Q(1) != nullv and high_water < c
};

// Bounded queue of capacity c: behavior is only specified while the queue is
// nonempty and has never been over-filled; outside that region cq is the
// unspecified marker.
bounded_queue_vars bounded_queue(int64_t c);

} // namespace sv
