#include "decorr/samples.hpp"

#include "decorr/frontend.hpp"

namespace decorr {

std::string sum_loop_source() {
    return R"(# sum of 0..9
int i_1
int sum_1
bool c_1
$loop_1
true : c_1 = i_1 < 10
c_1 : sum_1 = sum_1 + i_1
c_1 : i_1 = i_1 + 1
c_1 : goto(loop_1, [c_1], [true])
true : print("sum1", sum_1)
)";
}

std::string powers_loop_source() {
    return R"(# sum of 2, 4, 8, ..., 1024
int x_2
int sum_2
bool c_2
true : x_2 = 2
$loop_2
true : c_2 = x_2 <= 1024
c_2 : sum_2 = sum_2 + x_2
c_2 : x_2 = x_2 * 2
c_2 : goto(loop_2, [c_2], [true])
true : print("sum2", sum_2)
)";
}

Program make_average_program(uint32_t n) {
    // walks a synthetic arithmetic list (step 3) and prints its average
    std::string src = R"(int i
int x
int sum
int avg
bool c
$loop
true : c = i < )" + std::to_string(n) + R"(
c : sum = sum + x
c : x = x + 3
c : i = i + 1
c : goto(loop, [c], [true])
true : avg = sum / )" + std::to_string(n) + R"(
true : print("avg", avg)
)";
    return parse_program(src, "bench_avg");
}

Program make_dot_product_program(uint32_t n) {
    // a_i = i, b_i = 2i; 32-bit wrapping accumulation
    std::string src = R"(int i
int a
int b
int t
int dot
bool c
$loop
true : c = i < )" + std::to_string(n) + R"(
c : t = a * b
c : dot = dot + t
c : a = a + 1
c : b = b + 2
c : i = i + 1
c : goto(loop, [c], [true])
true : print("dot", dot)
)";
    return parse_program(src, "bench_dot");
}

} // namespace decorr
