#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

namespace multimagic {

using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const BigInt& v) { return v.str(); }

inline BigInt big_pow(const BigInt& base, unsigned exp) { return boost::multiprecision::pow(base, exp); }

}  // namespace multimagic
