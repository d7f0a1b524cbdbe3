#include "sv/value.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace sv {

const std::string* symbol::intern(std::string_view name) {
    static std::mutex mu;
    static std::unordered_set<std::string> table;
    std::lock_guard lock(mu);
    auto [it, inserted] = table.emplace(name);
    return &*it;
}

std::string_view marker_name(marker m) {
    switch (m) {
    case marker::nullv: return "nullv";
    case marker::nullm: return "nullm";
    case marker::unspecified: return "unspecified";
    }
    return "?";
}

value value::seq(list items) {
    return value(rep{seq_box{std::make_shared<const list>(std::move(items))}});
}

value value::tup(list items) {
    return value(rep{tup_box{std::make_shared<const list>(std::move(items))}});
}

value value::set_of(list items) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    return value(rep{set_box{std::make_shared<const list>(std::move(items))}});
}

value value::map_of(pair_list entries) {
    // stable sort + keep the last entry for a repeated key
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    pair_list out;
    out.reserve(entries.size());
    for (auto& e : entries) {
        if (!out.empty() && out.back().first == e.first)
            out.back().second = std::move(e.second);
        else
            out.push_back(std::move(e));
    }
    return value(rep{map_box{std::make_shared<const pair_list>(std::move(out))}});
}

value::kind value::which() const {
    switch (rep_.index()) {
    case 0: return kind::integer;
    case 1: return kind::symbol_;
    case 2: return kind::boolean;
    case 3: return kind::sequence;
    case 4: return kind::set;
    case 5: return kind::mapping;
    case 6: return kind::tuple;
    default: return kind::marker_;
    }
}

bool value::is_marker(marker m) const {
    return std::holds_alternative<marker>(rep_) && std::get<marker>(rep_) == m;
}

int64_t value::as_int() const {
    if (auto* p = std::get_if<int64_t>(&rep_)) return *p;
    throw type_error("value is not an integer: " + str());
}

bool value::as_bool() const {
    if (auto* p = std::get_if<bool>(&rep_)) return *p;
    throw type_error("value is not a boolean: " + str());
}

symbol value::as_symbol() const {
    if (auto* p = std::get_if<symbol>(&rep_)) return *p;
    throw type_error("value is not a symbol: " + str());
}

const value::list& value::items() const {
    if (auto* p = std::get_if<seq_box>(&rep_)) return *p->p;
    if (auto* p = std::get_if<set_box>(&rep_)) return *p->p;
    if (auto* p = std::get_if<tup_box>(&rep_)) return *p->p;
    throw type_error("value has no element list: " + str());
}

const value::pair_list& value::entries() const {
    if (auto* p = std::get_if<map_box>(&rep_)) return *p->p;
    throw type_error("value is not a map: " + str());
}

bool value::set_contains(const value& v) const {
    const auto& xs = items();
    return std::binary_search(xs.begin(), xs.end(), v);
}

value value::set_insert(const value& v) const {
    const auto& xs = items();
    auto it = std::lower_bound(xs.begin(), xs.end(), v);
    if (it != xs.end() && *it == v) return *this;
    list out;
    out.reserve(xs.size() + 1);
    out.insert(out.end(), xs.begin(), it);
    out.push_back(v);
    out.insert(out.end(), it, xs.end());
    return value(rep{set_box{std::make_shared<const list>(std::move(out))}});
}

std::optional<value> value::map_get(const value& k) const {
    const auto& es = entries();
    auto it = std::lower_bound(es.begin(), es.end(), k,
                               [](const auto& e, const value& key) { return e.first < key; });
    if (it != es.end() && it->first == k) return it->second;
    return std::nullopt;
}

value value::map_set(const value& k, const value& v) const {
    const auto& es = entries();
    auto it = std::lower_bound(es.begin(), es.end(), k,
                               [](const auto& e, const value& key) { return e.first < key; });
    pair_list out;
    out.reserve(es.size() + 1);
    out.insert(out.end(), es.begin(), it);
    out.emplace_back(k, v);
    if (it != es.end() && it->first == k) ++it;
    out.insert(out.end(), it, es.end());
    return value(rep{map_box{std::make_shared<const pair_list>(std::move(out))}});
}

value value::map_erase(const value& k) const {
    const auto& es = entries();
    pair_list out;
    out.reserve(es.size());
    for (const auto& e : es)
        if (!(e.first == k)) out.push_back(e);
    return value(rep{map_box{std::make_shared<const pair_list>(std::move(out))}});
}

size_t value::size() const {
    if (std::holds_alternative<map_box>(rep_)) return entries().size();
    return items().size();
}

bool operator==(const value& a, const value& b) { return a.cmp(b) == 0; }

int value::cmp(const value& other) const {
    auto ka = which(), kb = other.which();
    if (ka != kb) return static_cast<int>(ka) < static_cast<int>(kb) ? -1 : 1;
    switch (ka) {
    case kind::integer: {
        auto x = std::get<int64_t>(rep_), y = std::get<int64_t>(other.rep_);
        return x < y ? -1 : x > y ? 1 : 0;
    }
    case kind::symbol_: {
        auto c = std::get<symbol>(rep_) <=> std::get<symbol>(other.rep_);
        return c < 0 ? -1 : c > 0 ? 1 : 0;
    }
    case kind::boolean: {
        int x = std::get<bool>(rep_), y = std::get<bool>(other.rep_);
        return x - y;
    }
    case kind::marker_: {
        int x = static_cast<int>(std::get<marker>(rep_));
        int y = static_cast<int>(std::get<marker>(other.rep_));
        return x - y;
    }
    case kind::mapping: {
        const auto& xs = entries();
        const auto& ys = other.entries();
        size_t n = std::min(xs.size(), ys.size());
        for (size_t i = 0; i < n; ++i) {
            if (int c = xs[i].first.cmp(ys[i].first)) return c;
            if (int c = xs[i].second.cmp(ys[i].second)) return c;
        }
        return xs.size() < ys.size() ? -1 : xs.size() > ys.size() ? 1 : 0;
    }
    default: {
        const auto& xs = items();
        const auto& ys = other.items();
        size_t n = std::min(xs.size(), ys.size());
        for (size_t i = 0; i < n; ++i)
            if (int c = xs[i].cmp(ys[i])) return c;
        return xs.size() < ys.size() ? -1 : xs.size() > ys.size() ? 1 : 0;
    }
    }
}

static size_t mix(size_t h, size_t x) {
    // boost::hash_combine recipe
    return h ^ (x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

size_t value::hash() const {
    size_t h = static_cast<size_t>(which()) * 0x9e3779b9u;
    switch (which()) {
    case kind::integer: return mix(h, std::hash<int64_t>{}(std::get<int64_t>(rep_)));
    case kind::symbol_: return mix(h, std::get<symbol>(rep_).hash());
    case kind::boolean: return mix(h, std::get<bool>(rep_) ? 1 : 0);
    case kind::marker_: return mix(h, static_cast<size_t>(std::get<marker>(rep_)));
    case kind::mapping: {
        for (const auto& [k, v] : entries()) {
            h = mix(h, k.hash());
            h = mix(h, v.hash());
        }
        return h;
    }
    default:
        for (const auto& x : items()) h = mix(h, x.hash());
        return h;
    }
}

json value::to_json() const {
    switch (which()) {
    case kind::integer: return json{{"int", std::get<int64_t>(rep_)}};
    case kind::symbol_: return json{{"sym", std::get<symbol>(rep_).str()}};
    case kind::boolean: return json{{"bool", std::get<bool>(rep_)}};
    case kind::marker_: return json{{"marker", std::string(marker_name(std::get<marker>(rep_)))}};
    case kind::sequence:
    case kind::set:
    case kind::tuple: {
        json arr = json::array();
        for (const auto& x : items()) arr.push_back(x.to_json());
        const char* tag = which() == kind::sequence ? "seq"
                        : which() == kind::set      ? "set"
                                                    : "tup";
        return json{{tag, std::move(arr)}};
    }
    case kind::mapping: {
        json arr = json::array();
        for (const auto& [k, v] : entries())
            arr.push_back(json::array({k.to_json(), v.to_json()}));
        return json{{"map", std::move(arr)}};
    }
    }
    return {};
}

value value::from_json(const json& j) {
    if (!j.is_object() || j.size() != 1)
        throw parse_error("malformed value: " + j.dump());
    auto it = j.begin();
    const std::string& key = it.key();
    const json& body = it.value();
    auto elems = [&](auto make) {
        list xs;
        for (const auto& e : body) xs.push_back(from_json(e));
        return make(std::move(xs));
    };
    if (key == "int") return value(body.get<int64_t>());
    if (key == "sym") return value(symbol(body.get<std::string>()));
    if (key == "bool") return value(body.get<bool>());
    if (key == "marker") {
        auto name = body.get<std::string>();
        for (marker m : {marker::nullv, marker::nullm, marker::unspecified})
            if (name == marker_name(m)) return value(m);
        throw parse_error("unknown marker: " + name);
    }
    if (key == "seq") return elems([](list xs) { return seq(std::move(xs)); });
    if (key == "set") return elems([](list xs) { return set_of(std::move(xs)); });
    if (key == "tup") return elems([](list xs) { return tup(std::move(xs)); });
    if (key == "map") {
        pair_list es;
        for (const auto& e : body) {
            if (!e.is_array() || e.size() != 2)
                throw parse_error("malformed map entry: " + e.dump());
            es.emplace_back(from_json(e[0]), from_json(e[1]));
        }
        return map_of(std::move(es));
    }
    throw parse_error("unknown value tag: " + key);
}

std::string value::str() const { return to_json().dump(); }

std::ostream& operator<<(std::ostream& os, const value& v) { return os << v.str(); }

} // namespace sv
