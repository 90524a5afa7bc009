#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace potts {

/// C(n + parts - 1, parts - 1) as a double (number of weak compositions).
double composition_count(int n, int parts);

/// Calls visit(span<const int>) for every weak composition of n into
/// `parts` ordered nonnegative parts, in lexicographic order.
template <typename Visit>
void for_each_composition(int n, int parts, Visit&& visit) {
    std::vector<int> c(parts, 0);
    if (parts == 0) {
        if (n == 0) visit(std::span<const int>(c));
        return;
    }
    // recursive fill expressed iteratively: c[0..parts-2] free, last = remainder
    auto rec = [&](auto&& self, int idx, int remaining) -> void {
        if (idx == parts - 1) {
            c[idx] = remaining;
            visit(std::span<const int>(c));
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            c[idx] = v;
            self(self, idx + 1, remaining - v);
        }
    };
    rec(rec, 0, n);
}

}  // namespace potts
