#pragma once

#include <random>
#include <sstream>
#include <string>

namespace lpwb::testing {

// Random programs over p0..p3; p_i only calls p_j with j > i unless recursion is allowed.
inline std::string random_program(std::mt19937& rng, bool allow_recursion) {
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    const char* args[] = {"a", "b", "X", "Y", "f(X)", "[X|Y]", "[]", "f(a)"};
    std::ostringstream out;
    for (int p = 0; p < 4; ++p) {
        const int clauses = 1 + pick(3);
        for (int c = 0; c < clauses; ++c) {
            out << "p" << p << "(" << args[pick(8)] << "," << args[pick(8)] << ")";
            const int goals = p == 3 ? 0 : pick(3);
            for (int g = 0; g < goals; ++g) {
                out << (g == 0 ? " :- " : ", ");
                const int kind = pick(6);
                if (kind == 0) {
                    out << args[pick(4) + 2] << " = " << args[pick(8)];
                } else if (kind == 1) {
                    out << "dif(" << args[pick(4) + 2] << ", " << args[pick(8)] << ")";
                } else {
                    const int lo = allow_recursion ? p : p + 1;
                    const int callee = lo + pick(4 - lo);
                    out << "p" << callee << "(" << args[pick(8)] << "," << args[pick(8)] << ")";
                }
            }
            out << ".\n";
        }
    }
    return out.str();
}

}  // namespace lpwb::testing
