#pragma once

#include <limits>
#include <vector>

#include "ddmapd/core.hpp"

namespace ddmapd {

// Kuhn-Munkres with potentials on a square cost matrix, O(n^3).
// Returns row -> column assignment; total cost via out parameter.
inline std::vector<int> hungarian(const std::vector<std::vector<long long>>& cost,
                                  long long* total_cost = nullptr) {
    const int n = static_cast<int>(cost.size());
    const long long INF = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(static_cast<size_t>(n) + 1), v(static_cast<size_t>(n) + 1);
    std::vector<int> p(static_cast<size_t>(n) + 1), way(static_cast<size_t>(n) + 1);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<long long> minv(static_cast<size_t>(n) + 1, INF);
        std::vector<char> used(static_cast<size_t>(n) + 1, false);
        do {
            used[static_cast<size_t>(j0)] = true;
            const int i0 = p[static_cast<size_t>(j0)];
            long long delta = INF;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                const long long cur = cost[static_cast<size_t>(i0 - 1)][static_cast<size_t>(j - 1)] -
                                      u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<size_t>(j0)];
            p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> rowsol(static_cast<size_t>(n), -1);
    long long total = 0;
    for (int j = 1; j <= n; ++j) {
        if (p[static_cast<size_t>(j)] == 0) continue;
        rowsol[static_cast<size_t>(p[static_cast<size_t>(j)] - 1)] = j - 1;
        total += cost[static_cast<size_t>(p[static_cast<size_t>(j)] - 1)][static_cast<size_t>(j - 1)];
    }
    if (total_cost) *total_cost = total;
    return rowsol;
}

}  // namespace ddmapd
