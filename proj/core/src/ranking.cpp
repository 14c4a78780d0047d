#include "cig/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cig {

Edge make_edge(int a, int b) {
    if (a == b) throw std::invalid_argument("edge endpoints must differ: " + std::to_string(a));
    return a < b ? Edge{a, b} : Edge{b, a};
}

std::vector<Edge> select_top_q(const RankedEdges& ranked, int q) {
    if (q < 0) throw std::invalid_argument("q must be non-negative");
    std::vector<const RankedEdge*> pool;
    pool.reserve(ranked.entries.size());
    for (const auto& e : ranked.entries)
        if (e.selectable) pool.push_back(&e);

    std::sort(pool.begin(), pool.end(), [](const RankedEdge* a, const RankedEdge* b) {
        if (a->rank != b->rank) return a->rank < b->rank;
        return a->edge < b->edge;  // stable output order inside tied groups
    });

    std::size_t take = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(q));
    if (take < pool.size() && take > 0 && pool[take - 1]->rank == pool[take]->rank) {
        // Boundary splits a tied group: drop the entire straddling group.
        double tied = pool[take - 1]->rank;
        while (take > 0 && pool[take - 1]->rank == tied) --take;
    }

    std::vector<Edge> out;
    out.reserve(take);
    for (std::size_t k = 0; k < take; ++k) out.push_back(pool[k]->edge);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> fractional_ranks_desc(std::span<const double> scores) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    std::vector<double> ranks(n, 0.0);
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start;
        while (end + 1 < n && scores[order[end + 1]] == scores[order[start]]) ++end;
        // positions start..end (0-based) share the average 1-based rank
        double avg = 0.5 * static_cast<double>(start + end) + 1.0;
        for (std::size_t k = start; k <= end; ++k) ranks[order[k]] = avg;
        start = end + 1;
    }
    return ranks;
}

}  // namespace cig
