#include "sv/variable.hpp"

#include <algorithm>

namespace sv {

struct base_form {
    alphabet_spec alphabet;
    value init;
    transition_fn step;
};

struct combine_form {
    combine_fn op;
    std::vector<state_variable> children;
};

struct substitute_form {
    state_variable driver;
    state_variable inner;
};

struct shifted_form {
    state_variable inner;
    event shift_event;
};

struct product_form {
    std::vector<state_variable> components;
    std::vector<feedback_fn> feedbacks;
    std::vector<trace> initial_drivers;
    alphabet_spec outer;
};

struct var_node {
    std::variant<base_form, combine_form, substitute_form, shifted_form, product_form> form;
    alphabet_spec alphabet;
};

namespace {

alphabet_spec intersect(const alphabet_spec& a, const alphabet_spec& b) {
    if (a.is_open()) return b;
    if (b.is_open()) return a;
    std::vector<event> common;
    for (const auto& e : a.events())
        if (b.accepts(e)) common.push_back(e);
    return alphabet_spec::closed(std::move(common));
}

// ---- runtime states ------------------------------------------------------

class base_state final : public var_state {
public:
    base_state(std::shared_ptr<const var_node> keep, const base_form* f, value v)
        : keep_(std::move(keep)), form_(f), value_(std::move(v)) {}
    value current() const override { return value_; }
    void advance(const event& e) override { value_ = form_->step(value_, e); }
    std::unique_ptr<var_state> clone() const override {
        return std::make_unique<base_state>(keep_, form_, value_);
    }
    value encode() const override { return value_; }

private:
    std::shared_ptr<const var_node> keep_;
    const base_form* form_;
    value value_;
};

class combine_state final : public var_state {
public:
    combine_state(std::shared_ptr<const var_node> keep, const combine_form* f,
                  std::vector<std::unique_ptr<var_state>> kids)
        : keep_(std::move(keep)), form_(f), children_(std::move(kids)) {
        recompute();
    }
    value current() const override { return cache_; }
    void advance(const event& e) override {
        for (auto& c : children_) c->advance(e);
        recompute();
    }
    std::unique_ptr<var_state> clone() const override {
        std::vector<std::unique_ptr<var_state>> kids;
        kids.reserve(children_.size());
        for (const auto& c : children_) kids.push_back(c->clone());
        return std::make_unique<combine_state>(keep_, form_, std::move(kids));
    }
    value encode() const override {
        value::list xs;
        xs.reserve(children_.size());
        for (const auto& c : children_) xs.push_back(c->encode());
        return value::tup(std::move(xs));
    }

private:
    void recompute() {
        std::vector<value> vals;
        vals.reserve(children_.size());
        for (const auto& c : children_) vals.push_back(c->current());
        cache_ = form_->op(vals);
    }
    std::shared_ptr<const var_node> keep_;
    const combine_form* form_;
    std::vector<std::unique_ptr<var_state>> children_;
    value cache_;
};

class substitute_state final : public var_state {
public:
    substitute_state(std::shared_ptr<const var_node> keep, const substitute_form* f,
                     std::unique_ptr<var_state> driver, std::unique_ptr<var_state> inner,
                     bool replay_initial)
        : keep_(std::move(keep)), form_(f), driver_(std::move(driver)), inner_(std::move(inner)) {
        if (replay_initial) {
            consumed_ = 0;
            sync();
        } else {
            consumed_ = trace_from_value(driver_->current()).size();
        }
    }
    value current() const override { return inner_->current(); }
    void advance(const event& e) override {
        driver_->advance(e);
        sync();
    }
    std::unique_ptr<var_state> clone() const override {
        auto copy = std::make_unique<substitute_state>(keep_, form_, driver_->clone(),
                                                       inner_->clone(), false);
        copy->consumed_ = consumed_;
        return copy;
    }
    value encode() const override {
        return value::tup({driver_->encode(), inner_->encode()});
    }

private:
    // feed the driver's newly appended segment into the inner variable
    void sync() {
        trace t = trace_from_value(driver_->current());
        if (t.size() < consumed_)
            throw type_error("substitution driver shrank its trace");
        const auto& inner_alpha = form_->inner.alphabet();
        for (size_t i = consumed_; i < t.size(); ++i) {
            if (!inner_alpha.accepts(t[i]))
                throw alphabet_error("substitution driver produced event '" + t[i].str() +
                                     "' outside the inner alphabet");
            inner_->advance(t[i]);
        }
        consumed_ = t.size();
    }

    std::shared_ptr<const var_node> keep_;
    const substitute_form* form_;
    std::unique_ptr<var_state> driver_;
    std::unique_ptr<var_state> inner_;
    size_t consumed_ = 0;
};

class shifted_state final : public var_state {
public:
    shifted_state(std::shared_ptr<const var_node> keep, const shifted_form* f,
                  std::unique_ptr<var_state> inner)
        : keep_(std::move(keep)), form_(f), inner_(std::move(inner)) {
        recompute();
    }
    value current() const override { return cache_; }
    void advance(const event& e) override {
        inner_->advance(e);
        recompute();
    }
    std::unique_ptr<var_state> clone() const override {
        return std::make_unique<shifted_state>(keep_, form_, inner_->clone());
    }
    value encode() const override { return inner_->encode(); }

private:
    void recompute() {
        auto peek = inner_->clone();
        peek->advance(form_->shift_event);
        cache_ = peek->current();
    }
    std::shared_ptr<const var_node> keep_;
    const shifted_form* form_;
    std::unique_ptr<var_state> inner_;
    value cache_;
};

class product_state final : public var_state {
public:
    product_state(std::shared_ptr<const var_node> keep, const product_form* f,
                  std::vector<std::unique_ptr<var_state>> comps, bool replay_initial)
        : keep_(std::move(keep)), form_(f), components_(std::move(comps)) {
        drivers_.resize(components_.size());
        if (replay_initial) {
            for (size_t i = 0; i < components_.size(); ++i)
                for (const auto& e : form_->initial_drivers[i]) feed(i, e);
        } else {
            track_drivers_ = false;
        }
    }
    value current() const override {
        value::list xs;
        xs.reserve(components_.size());
        for (const auto& c : components_) xs.push_back(c->current());
        return value::tup(std::move(xs));
    }
    void advance(const event& e) override {
        std::vector<value> outs;
        outs.reserve(components_.size());
        for (const auto& c : components_) outs.push_back(c->current());
        // all feedback maps see the pre-event outputs; drivers then extend
        // simultaneously
        std::vector<feedback_action> acts;
        acts.reserve(components_.size());
        for (size_t i = 0; i < components_.size(); ++i)
            acts.push_back(form_->feedbacks[i](e, outs));
        for (size_t i = 0; i < components_.size(); ++i) {
            if (std::holds_alternative<hold_t>(acts[i])) continue;
            if (auto* ev = std::get_if<event>(&acts[i])) {
                feed(i, *ev);
            } else {
                for (const auto& ev2 : std::get<std::vector<event>>(acts[i]))
                    feed(i, ev2);
            }
        }
    }
    std::unique_ptr<var_state> clone() const override {
        std::vector<std::unique_ptr<var_state>> comps;
        comps.reserve(components_.size());
        for (const auto& c : components_) comps.push_back(c->clone());
        auto copy = std::make_unique<product_state>(keep_, form_, std::move(comps), false);
        copy->drivers_ = drivers_;
        copy->track_drivers_ = track_drivers_;
        return copy;
    }
    value encode() const override {
        value::list xs;
        xs.reserve(components_.size());
        for (const auto& c : components_) xs.push_back(c->encode());
        return value::tup(std::move(xs));
    }
    const std::vector<trace>* driver_traces() const override {
        return track_drivers_ ? &drivers_ : nullptr;
    }

private:
    void feed(size_t i, const event& e) {
        if (!form_->components[i].alphabet().accepts(e))
            throw alphabet_error("feedback for component " + std::to_string(i) +
                                 " produced out-of-alphabet event '" + e.str() + "'");
        components_[i]->advance(e);
        if (track_drivers_) drivers_[i].push_back(e);
    }

    std::shared_ptr<const var_node> keep_;
    const product_form* form_;
    std::vector<std::unique_ptr<var_state>> components_;
    std::vector<trace> drivers_;
    bool track_drivers_ = true;
};

} // namespace

// ---- description handles -------------------------------------------------

const alphabet_spec& state_variable::alphabet() const { return node_->alphabet; }

value state_variable::initial() const { return instantiate()->current(); }

state_variable state_variable::base(alphabet_spec a, value initial_value, transition_fn rule) {
    auto n = std::make_shared<var_node>();
    n->alphabet = a;
    n->form = base_form{std::move(a), std::move(initial_value), std::move(rule)};
    return state_variable(std::move(n));
}

state_variable state_variable::combined(combine_fn op, std::vector<state_variable> children) {
    if (children.empty()) throw domain_error("combine needs at least one variable");
    auto n = std::make_shared<var_node>();
    alphabet_spec a = children[0].alphabet();
    for (size_t i = 1; i < children.size(); ++i) a = intersect(a, children[i].alphabet());
    n->alphabet = a;
    n->form = combine_form{std::move(op), std::move(children)};
    return state_variable(std::move(n));
}

state_variable state_variable::substituted(state_variable driver, state_variable inner) {
    if (!driver.valid() || !inner.valid()) throw domain_error("substitute on empty variable");
    auto n = std::make_shared<var_node>();
    n->alphabet = driver.alphabet();
    n->form = substitute_form{std::move(driver), std::move(inner)};
    return state_variable(std::move(n));
}

state_variable state_variable::shifted(state_variable inner, event e) {
    if (!inner.alphabet().accepts(e))
        throw alphabet_error("after-event '" + e.str() + "' outside the variable alphabet");
    auto n = std::make_shared<var_node>();
    n->alphabet = inner.alphabet();
    n->form = shifted_form{std::move(inner), std::move(e)};
    return state_variable(std::move(n));
}

state_variable state_variable::product(std::vector<state_variable> components,
                                       std::vector<feedback_fn> feedbacks,
                                       std::vector<trace> initial_drivers,
                                       alphabet_spec outer) {
    if (components.empty()) throw domain_error("product needs at least one component");
    if (components.size() != feedbacks.size())
        throw domain_error("product needs one feedback map per component");
    if (initial_drivers.empty()) initial_drivers.resize(components.size());
    if (initial_drivers.size() != components.size())
        throw domain_error("product needs one initial driver trace per component");
    auto n = std::make_shared<var_node>();
    n->alphabet = outer;
    n->form = product_form{std::move(components), std::move(feedbacks),
                           std::move(initial_drivers), std::move(outer)};
    return state_variable(std::move(n));
}

std::unique_ptr<var_state> state_variable::instantiate() const {
    if (!valid()) throw domain_error("empty state variable");
    const auto& f = node_->form;
    if (auto* b = std::get_if<base_form>(&f))
        return std::make_unique<base_state>(node_, b, b->init);
    if (auto* c = std::get_if<combine_form>(&f)) {
        std::vector<std::unique_ptr<var_state>> kids;
        kids.reserve(c->children.size());
        for (const auto& ch : c->children) kids.push_back(ch.instantiate());
        return std::make_unique<combine_state>(node_, c, std::move(kids));
    }
    if (auto* s = std::get_if<substitute_form>(&f))
        return std::make_unique<substitute_state>(node_, s, s->driver.instantiate(),
                                                  s->inner.instantiate(), true);
    if (auto* sh = std::get_if<shifted_form>(&f))
        return std::make_unique<shifted_state>(node_, sh, sh->inner.instantiate());
    auto* p = std::get_if<product_form>(&f);
    std::vector<std::unique_ptr<var_state>> comps;
    comps.reserve(p->components.size());
    for (const auto& c : p->components) comps.push_back(c.instantiate());
    return std::make_unique<product_state>(node_, p, std::move(comps), true);
}

std::unique_ptr<var_state> state_variable::state_from_value(const value& s) const {
    if (!valid()) throw domain_error("empty state variable");
    const auto& f = node_->form;
    if (auto* b = std::get_if<base_form>(&f))
        return std::make_unique<base_state>(node_, b, s);
    if (auto* c = std::get_if<combine_form>(&f)) {
        const auto& xs = s.items();
        if (xs.size() != c->children.size())
            throw type_error("combine state tuple has wrong arity: " + s.str());
        std::vector<std::unique_ptr<var_state>> kids;
        kids.reserve(xs.size());
        for (size_t i = 0; i < xs.size(); ++i)
            kids.push_back(c->children[i].state_from_value(xs[i]));
        return std::make_unique<combine_state>(node_, c, std::move(kids));
    }
    if (auto* sub = std::get_if<substitute_form>(&f)) {
        const auto& xs = s.items();
        if (xs.size() != 2) throw type_error("substitution state needs two parts: " + s.str());
        return std::make_unique<substitute_state>(node_, sub, sub->driver.state_from_value(xs[0]),
                                                  sub->inner.state_from_value(xs[1]), false);
    }
    if (auto* sh = std::get_if<shifted_form>(&f))
        return std::make_unique<shifted_state>(node_, sh, sh->inner.state_from_value(s));
    auto* p = std::get_if<product_form>(&f);
    const auto& xs = s.items();
    if (xs.size() != p->components.size())
        throw type_error("product state tuple has wrong arity: " + s.str());
    std::vector<std::unique_ptr<var_state>> comps;
    comps.reserve(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
        comps.push_back(p->components[i].state_from_value(xs[i]));
    return std::make_unique<product_state>(node_, p, std::move(comps), false);
}

// ---- spec operations -----------------------------------------------------

state_variable define(alphabet_spec alphabet, value initial_value, transition_fn rule) {
    return state_variable::base(std::move(alphabet), std::move(initial_value), std::move(rule));
}

value eval(const state_variable& y, const trace& w) {
    auto st = y.instantiate();
    for (size_t i = 0; i < w.size(); ++i) {
        if (!y.alphabet().accepts(w[i]))
            throw alphabet_error("event '" + w[i].str() + "' at position " +
                                 std::to_string(i) + " outside the variable alphabet");
        try {
            st->advance(w[i]);
        } catch (const error&) {
            throw;
        } catch (const std::exception& ex) {
            throw error("evaluation failed at position " + std::to_string(i) + " on '" +
                        w[i].str() + "': " + ex.what());
        }
    }
    return st->current();
}

state_variable after(const state_variable& y, const event& e) {
    return state_variable::shifted(y, e);
}

state_variable substitute(const state_variable& u, const state_variable& y) {
    return state_variable::substituted(u, y);
}

state_variable combine(combine_fn op, std::vector<state_variable> children) {
    return state_variable::combined(std::move(op), std::move(children));
}

machine to_machine(const state_variable& y) {
    if (!y.valid()) throw domain_error("empty state variable");
    machine m;
    m.alphabet = y.alphabet();
    m.initial = y.instantiate()->encode();
    m.step = [y](const value& s, const event& e) {
        auto st = y.state_from_value(s);
        st->advance(e);
        return st->encode();
    };
    m.out = [y](const value& s) { return y.state_from_value(s)->current(); };
    return m;
}

} // namespace sv
