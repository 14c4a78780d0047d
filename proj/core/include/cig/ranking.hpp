#pragma once

#include <span>
#include <vector>

namespace cig {

/// Undirected edge between node indices, stored with i < j.
struct Edge {
    int i = 0;
    int j = 0;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Normalizes (a, b) into an Edge with i < j. a == b is invalid.
Edge make_edge(int a, int b);

struct RankedEdge {
    Edge edge;
    double rank = 0.0;     // 1 = best; meaningful only when selectable
    bool selectable = true;
};

/// Output contract of every base learner: all candidate edges with their
/// conservative ranks. Unrankable edges carry selectable = false and are
/// treated as rank +inf.
struct RankedEdges {
    int p = 0;
    std::vector<RankedEdge> entries;
};

/// The q best selectable edges by ascending rank, sorted. If the q-th
/// boundary falls inside a group of tied ranks, that whole group is dropped
/// and only strictly better edges are returned, so the result never exceeds q.
std::vector<Edge> select_top_q(const RankedEdges& ranked, int q);

/// Fractional ranks of scores where higher score = better (rank 1); exact
/// ties share their average rank.
std::vector<double> fractional_ranks_desc(std::span<const double> scores);

}  // namespace cig
