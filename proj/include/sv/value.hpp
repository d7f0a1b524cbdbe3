#pragma once

#include "sv/error.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sv {

using json = nlohmann::ordered_json;

// Interned name. Equality is pointer equality on the intern table entry;
// ordering is lexicographic on the name so canonical forms are stable.
class symbol {
public:
    symbol() : name_(intern("")) {}
    explicit symbol(std::string_view name) : name_(intern(name)) {}

    const std::string& str() const { return *name_; }

    friend bool operator==(symbol a, symbol b) { return a.name_ == b.name_; }
    friend bool operator!=(symbol a, symbol b) { return a.name_ != b.name_; }
    friend bool operator<(symbol a, symbol b) {
        return a.name_ != b.name_ && *a.name_ < *b.name_;
    }
    friend std::strong_ordering operator<=>(symbol a, symbol b) {
        if (a.name_ == b.name_) return std::strong_ordering::equal;
        return *a.name_ <=> *b.name_;
    }

    size_t hash() const { return std::hash<const std::string*>{}(name_); }

private:
    static const std::string* intern(std::string_view name);
    const std::string* name_;
};

enum class marker : uint8_t { nullv, nullm, unspecified };

std::string_view marker_name(marker m);

// Tagged discrete value: integer, symbol, boolean, sequence, set, map, tuple,
// or one of the three markers. Immutable; composite payloads are shared, so
// copies are cheap and values can cross threads freely. Sets keep their
// elements sorted and maps their keys, which makes structural equality
// independent of insertion order.
class value {
public:
    using list = std::vector<value>;
    using pair_list = std::vector<std::pair<value, value>>;

    enum class kind : uint8_t {
        integer, symbol_, boolean, sequence, set, mapping, tuple, marker_
    };

    value() : rep_(int64_t{0}) {}
    value(int64_t i) : rep_(i) {}
    value(int i) : rep_(int64_t{i}) {}
    value(bool b) : rep_(b) {}
    value(symbol s) : rep_(s) {}
    value(marker m) : rep_(m) {}
    explicit value(std::string_view name) : rep_(symbol(name)) {}
    // keeps string literals from landing on the bool overload
    explicit value(const char* name) : rep_(symbol(name)) {}

    static value seq(list items);
    static value tup(list items);
    static value set_of(list items);        // sorts + dedups
    static value map_of(pair_list entries); // sorts by key, later keys win

    kind which() const;
    bool is(kind k) const { return which() == k; }
    bool is_marker(marker m) const;

    int64_t as_int() const;
    bool as_bool() const;
    symbol as_symbol() const;
    const list& items() const;      // sequence, set or tuple
    const pair_list& entries() const;

    // set / map access
    bool set_contains(const value& v) const;
    value set_insert(const value& v) const;
    std::optional<value> map_get(const value& k) const;
    value map_set(const value& k, const value& v) const;
    value map_erase(const value& k) const;
    size_t size() const; // elements of a composite

    friend bool operator==(const value& a, const value& b);
    friend bool operator!=(const value& a, const value& b) { return !(a == b); }
    friend bool operator<(const value& a, const value& b) { return a.cmp(b) < 0; }

    int cmp(const value& other) const; // total order: kind rank, then content
    size_t hash() const;

    json to_json() const;
    static value from_json(const json& j);
    std::string str() const; // compact JSON rendering

private:
    struct seq_box { std::shared_ptr<const list> p; };
    struct set_box { std::shared_ptr<const list> p; };
    struct map_box { std::shared_ptr<const pair_list> p; };
    struct tup_box { std::shared_ptr<const list> p; };

    using rep = std::variant<int64_t, symbol, bool, seq_box, set_box, map_box,
                             tup_box, marker>;
    explicit value(rep r) : rep_(std::move(r)) {}
    rep rep_;
};

std::ostream& operator<<(std::ostream& os, const value& v);

inline const value nullv{marker::nullv};
inline const value nullm{marker::nullm};
inline const value unspecified{marker::unspecified};

} // namespace sv

template <> struct std::hash<sv::symbol> {
    size_t operator()(sv::symbol s) const { return s.hash(); }
};
template <> struct std::hash<sv::value> {
    size_t operator()(const sv::value& v) const { return v.hash(); }
};
