#include "verisol/values.hpp"

#include <sstream>

namespace verisol {

bool value_equal(const Value &a, const Value &b) {
    if (a.node.index() != b.node.index()) return false;
    if (auto *x = std::get_if<IntVal>(&a.node))
        return x->bits == std::get<IntVal>(b.node).bits;
    if (auto *x = std::get_if<BoolVal>(&a.node))
        return x->v == std::get<BoolVal>(b.node).v;
    if (auto *x = std::get_if<AddressVal>(&a.node))
        return x->v == std::get<AddressVal>(b.node).v;
    if (auto *x = std::get_if<Bytes32Val>(&a.node))
        return x->v == std::get<Bytes32Val>(b.node).v;
    if (auto *x = std::get_if<MappingVal>(&a.node)) {
        const auto &y = std::get<MappingVal>(b.node);
        // Absent keys equal zero entries, so compare sparse maps after
        // dropping nothing: entries are only created by writes, and writes of
        // zero still count as observable here. Keep it strict and simple.
        if (x->entries.size() != y.entries.size()) return false;
        auto it = x->entries.begin(), jt = y.entries.begin();
        for (; it != x->entries.end(); ++it, ++jt) {
            if (it->first != jt->first) return false;
            if (!value_equal(it->second, jt->second)) return false;
        }
        return true;
    }
    if (auto *x = std::get_if<ArrayVal>(&a.node)) {
        const auto &y = std::get<ArrayVal>(b.node);
        if (x->elems.size() != y.elems.size()) return false;
        for (std::size_t i = 0; i < x->elems.size(); ++i)
            if (!value_equal(x->elems[i], y.elems[i])) return false;
        return true;
    }
    const auto &x = std::get<StructVal>(a.node);
    const auto &y = std::get<StructVal>(b.node);
    if (x.struct_name != y.struct_name || x.fields.size() != y.fields.size())
        return false;
    for (std::size_t i = 0; i < x.fields.size(); ++i)
        if (!value_equal(x.fields[i], y.fields[i])) return false;
    return true;
}

std::string value_to_string(const Value &v) {
    std::ostringstream os;
    if (auto *x = std::get_if<IntVal>(&v.node)) {
        if (x->is_signed)
            os << static_cast<std::int64_t>(x->bits);
        else
            os << x->bits;
    } else if (auto *x = std::get_if<BoolVal>(&v.node)) {
        os << (x->v ? "true" : "false");
    } else if (auto *x = std::get_if<AddressVal>(&v.node)) {
        os << "0x" << std::hex << x->v;
    } else if (auto *x = std::get_if<Bytes32Val>(&v.node)) {
        os << "#" << std::hex << x->v;
    } else if (auto *x = std::get_if<MappingVal>(&v.node)) {
        os << "{";
        bool first = true;
        for (const auto &[k, val] : x->entries) {
            if (!first) os << ", ";
            first = false;
            os << k << ": " << value_to_string(val);
        }
        os << "}";
    } else if (auto *x = std::get_if<ArrayVal>(&v.node)) {
        os << "[";
        for (std::size_t i = 0; i < x->elems.size(); ++i) {
            if (i) os << ", ";
            os << value_to_string(x->elems[i]);
        }
        os << "]";
    } else {
        const auto &sv = std::get<StructVal>(v.node);
        os << sv.struct_name << "(";
        for (std::size_t i = 0; i < sv.fields.size(); ++i) {
            if (i) os << ", ";
            os << value_to_string(sv.fields[i]);
        }
        os << ")";
    }
    return os.str();
}

std::string value_encode(const Value &v) {
    std::ostringstream os;
    if (auto *x = std::get_if<IntVal>(&v.node)) {
        os << "i" << x->bits;
    } else if (auto *x = std::get_if<BoolVal>(&v.node)) {
        os << "b" << (x->v ? 1 : 0);
    } else if (auto *x = std::get_if<AddressVal>(&v.node)) {
        os << "a" << x->v;
    } else if (auto *x = std::get_if<Bytes32Val>(&v.node)) {
        os << "h" << x->v;
    } else if (auto *x = std::get_if<MappingVal>(&v.node)) {
        os << "m{";
        for (const auto &[k, val] : x->entries)
            os << k << "=" << value_encode(val) << ";";
        os << "}";
    } else if (auto *x = std::get_if<ArrayVal>(&v.node)) {
        os << "[";
        for (const auto &e : x->elems) os << value_encode(e) << ";";
        os << "]";
    } else {
        const auto &sv = std::get<StructVal>(v.node);
        os << "s" << sv.struct_name << "(";
        for (const auto &f : sv.fields) os << value_encode(f) << ";";
        os << ")";
    }
    return os.str();
}

} // namespace verisol
