#pragma once

#include <cstdint>
#include <string>

#include "decorr/ast.hpp"

namespace decorr {

/// Loop summing 0..9; prints ("sum1", 45).
std::string sum_loop_source();

/// Loop summing 2, 4, 8, ..., 1024; prints ("sum2", 2046).
std::string powers_loop_source();

/// Benchmark pair: an n-iteration accumulation computing the average of a
/// synthetic integer list, and an n-iteration dot-product loop.
Program make_average_program(uint32_t n);
Program make_dot_product_program(uint32_t n);

} // namespace decorr
