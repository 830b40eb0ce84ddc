#ifndef VERISOL_VALUES_HPP
#define VERISOL_VALUES_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "verisol/ast.hpp"

namespace verisol {

// All modeled scalars are 64-bit with wrapping arithmetic. bytes32 and
// address values are carried in the low 64 bits and compared by value.
struct Value;

struct IntVal {
    std::uint64_t bits = 0;
    bool is_signed = false;
};
struct BoolVal {
    bool v = false;
};
struct AddressVal {
    std::uint64_t v = 0;
};
struct Bytes32Val {
    std::uint64_t v = 0;
};
struct MappingVal {
    // key encoded canonically; absent keys read as the zero value of the
    // mapped type.
    std::map<std::string, Value> entries;
    TypePtr value_type;
};
struct ArrayVal {
    std::vector<Value> elems;
    TypePtr elem_type;
};
struct StructVal {
    std::string struct_name;
    std::vector<Value> fields;
};

struct Value {
    std::variant<IntVal, BoolVal, AddressVal, Bytes32Val, MappingVal, ArrayVal,
                 StructVal>
        node;
};

bool value_equal(const Value &a, const Value &b);
std::string value_to_string(const Value &v);
std::string value_encode(const Value &v); // canonical key/hash encoding

struct StructTable; // forward, defined in interp.hpp

} // namespace verisol

#endif
