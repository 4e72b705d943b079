#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace subcon {

/// Process index, 0-based internally. File formats use 1-based indices.
using Process = int;
using ProcessSet = std::vector<Process>;

/// Bit set over processes; bit j set means process j is a member.
using ProcessMask = std::uint64_t;

inline constexpr int kMaxProcesses = 64;
/// Exhaustive broadcasting-set search enumerates up to 2^n subsets.
inline constexpr int kMaxBroadcastSearch = 20;

/// Directed communication graph on n processes. An edge (i, j) means
/// "j receives from i". Self-loops are always present.
class CommGraph {
public:
    /// Builds a graph, closing it under self-loops.
    /// Throws std::invalid_argument for n < 2, n > kMaxProcesses or
    /// out-of-range endpoints.
    CommGraph(int n, const std::vector<std::pair<Process, Process>>& edges);

    /// Self-loops only.
    static CommGraph identity(int n);
    static CommGraph complete(int n);
    /// Every process receives from `center`.
    static CommGraph star(int n, Process center);

    int size() const { return n_; }
    bool has_edge(Process from, Process to) const;
    void add_edge(Process from, Process to);

    ProcessMask out_mask(Process i) const { return out_[i]; }
    ProcessMask in_mask(Process j) const { return in_[j]; }
    ProcessMask all() const;

    /// In_j: processes j receives from, ascending.
    ProcessSet in_neighbors(Process j) const;
    int in_degree(Process j) const;

    /// Ordered edge list, lexicographic by (from, to).
    std::vector<std::pair<Process, Process>> edges() const;

    bool operator==(const CommGraph& other) const = default;

private:
    explicit CommGraph(int n);

    int n_;
    std::vector<ProcessMask> out_;
    std::vector<ProcessMask> in_;
};

/// Product graph: (i, j) iff there is u with (i, u) in first and (u, j) in second.
CommGraph compose(const CommGraph& first, const CommGraph& second);

/// Left-to-right product of a non-empty sequence.
CommGraph compose_all(const std::vector<CommGraph>& graphs);

struct RootReport {
    /// Number of strongly connected components without incoming edges from
    /// other components.
    int source_scc_count = 0;
    /// Smallest process of every source component, ascending.
    ProcessSet root_witness;
};

struct BroadcastReport {
    int min_size = 0;
    /// Lexicographically least broadcasting set of size min_size.
    ProcessSet witness;
};

RootReport root_report(const CommGraph& g);

/// Exact minimum broadcasting set by enumeration in increasing size.
/// Throws std::invalid_argument when n exceeds kMaxBroadcastSearch.
BroadcastReport broadcast_report(const CommGraph& g);

/// Lexicographically least broadcasting set of size at most max_size, or an
/// empty set if none exists.
ProcessSet find_broadcasting_set(const CommGraph& g, int max_size);

bool is_k_rooted(const CommGraph& g, int k);
bool is_k_broadcastable(const CommGraph& g, int k);

/// True when every process has an in-edge from some member of `m`.
bool covers(const CommGraph& g, const ProcessSet& m);

/// Processes reachable from `sources` (including the sources).
ProcessMask reachable_from(const CommGraph& g, ProcessMask sources);

ProcessMask to_mask(const ProcessSet& set);
ProcessSet from_mask(ProcessMask mask);

/// "1>2;2>3" with 1-based indices and self-loops omitted.
std::string format_edges(const CommGraph& g);
/// "1;3" with 1-based indices.
std::string format_set(const ProcessSet& set);

}  // namespace subcon
