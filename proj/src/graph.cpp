#include "subcon/graph.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace subcon {

namespace {

ProcessMask bit(Process i) { return ProcessMask{1} << i; }

// Advances `idx` to the next k-combination of [0, n) in lexicographic order.
bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    return true;
}

}  // namespace

CommGraph::CommGraph(int n) : n_(n), out_(n, 0), in_(n, 0) {
    if (n < 2) throw std::invalid_argument("graph needs at least 2 processes, got " + std::to_string(n));
    if (n > kMaxProcesses) {
        throw std::invalid_argument("graph supports at most " + std::to_string(kMaxProcesses) + " processes");
    }
    for (Process i = 0; i < n; ++i) add_edge(i, i);
}

CommGraph::CommGraph(int n, const std::vector<std::pair<Process, Process>>& edges) : CommGraph(n) {
    for (const auto& [from, to] : edges) {
        if (from < 0 || from >= n || to < 0 || to >= n) {
            std::ostringstream msg;
            msg << "edge (" << from << ", " << to << ") has an endpoint outside [0, " << n << ")";
            throw std::invalid_argument(msg.str());
        }
        add_edge(from, to);
    }
}

CommGraph CommGraph::identity(int n) { return CommGraph(n); }

CommGraph CommGraph::complete(int n) {
    CommGraph g(n);
    for (Process i = 0; i < n; ++i)
        for (Process j = 0; j < n; ++j) g.add_edge(i, j);
    return g;
}

CommGraph CommGraph::star(int n, Process center) {
    CommGraph g(n);
    if (center < 0 || center >= n) throw std::invalid_argument("star center out of range");
    for (Process j = 0; j < n; ++j) g.add_edge(center, j);
    return g;
}

bool CommGraph::has_edge(Process from, Process to) const { return (out_[from] & bit(to)) != 0; }

void CommGraph::add_edge(Process from, Process to) {
    out_[from] |= bit(to);
    in_[to] |= bit(from);
}

ProcessMask CommGraph::all() const { return n_ == 64 ? ~ProcessMask{0} : bit(n_) - 1; }

ProcessSet CommGraph::in_neighbors(Process j) const { return from_mask(in_[j]); }

int CommGraph::in_degree(Process j) const { return std::popcount(in_[j]); }

std::vector<std::pair<Process, Process>> CommGraph::edges() const {
    std::vector<std::pair<Process, Process>> result;
    for (Process i = 0; i < n_; ++i)
        for (Process j = 0; j < n_; ++j)
            if (has_edge(i, j)) result.emplace_back(i, j);
    return result;
}

CommGraph compose(const CommGraph& first, const CommGraph& second) {
    if (first.size() != second.size()) throw std::invalid_argument("compose: graphs have different process counts");
    CommGraph result = CommGraph::identity(first.size());
    for (Process i = 0; i < first.size(); ++i) {
        ProcessMask via = first.out_mask(i);
        while (via != 0) {
            const Process u = std::countr_zero(via);
            via &= via - 1;
            ProcessMask targets = second.out_mask(u);
            while (targets != 0) {
                const Process j = std::countr_zero(targets);
                targets &= targets - 1;
                result.add_edge(i, j);
            }
        }
    }
    return result;
}

CommGraph compose_all(const std::vector<CommGraph>& graphs) {
    if (graphs.empty()) throw std::invalid_argument("compose_all: empty sequence");
    CommGraph result = graphs.front();
    for (std::size_t r = 1; r < graphs.size(); ++r) result = compose(result, graphs[r]);
    return result;
}

ProcessMask reachable_from(const CommGraph& g, ProcessMask sources) {
    ProcessMask seen = sources;
    ProcessMask frontier = sources;
    while (frontier != 0) {
        ProcessMask next = 0;
        while (frontier != 0) {
            const Process u = std::countr_zero(frontier);
            frontier &= frontier - 1;
            next |= g.out_mask(u);
        }
        frontier = next & ~seen;
        seen |= next;
    }
    return seen;
}

RootReport root_report(const CommGraph& g) {
    const int n = g.size();
    std::vector<ProcessMask> reach(n);
    for (Process i = 0; i < n; ++i) reach[i] = reachable_from(g, bit(i));

    // Component of i: processes that reach i and are reached by i. A component
    // is a source iff every process reaching it lies inside it.
    RootReport report;
    ProcessMask assigned = 0;
    for (Process i = 0; i < n; ++i) {
        if (assigned & bit(i)) continue;
        ProcessMask reaching = 0;
        for (Process j = 0; j < n; ++j)
            if (reach[j] & bit(i)) reaching |= bit(j);
        const ProcessMask component = reaching & reach[i];
        assigned |= component;
        if (reaching == component) {
            ++report.source_scc_count;
            report.root_witness.push_back(std::countr_zero(component));
        }
    }
    return report;
}

bool covers(const CommGraph& g, const ProcessSet& m) {
    ProcessMask covered = 0;
    for (Process p : m) covered |= g.out_mask(p);
    return covered == g.all();
}

ProcessSet find_broadcasting_set(const CommGraph& g, int max_size) {
    const int n = g.size();
    if (n > kMaxBroadcastSearch) {
        throw std::invalid_argument("broadcasting-set search is exponential; limited to n <= " +
                                    std::to_string(kMaxBroadcastSearch));
    }
    const ProcessMask full = g.all();
    for (int size = 1; size <= std::min(max_size, n); ++size) {
        std::vector<int> idx(size);
        for (int i = 0; i < size; ++i) idx[i] = i;
        do {
            ProcessMask covered = 0;
            for (int p : idx) covered |= g.out_mask(p);
            if (covered == full) return ProcessSet(idx.begin(), idx.end());
        } while (next_combination(idx, n));
    }
    return {};
}

BroadcastReport broadcast_report(const CommGraph& g) {
    // [n] always covers every process through the self-loops.
    ProcessSet witness = find_broadcasting_set(g, g.size());
    return BroadcastReport{static_cast<int>(witness.size()), std::move(witness)};
}

bool is_k_rooted(const CommGraph& g, int k) { return root_report(g).source_scc_count <= k; }

bool is_k_broadcastable(const CommGraph& g, int k) { return !find_broadcasting_set(g, k).empty(); }

ProcessMask to_mask(const ProcessSet& set) {
    ProcessMask mask = 0;
    for (Process p : set) mask |= bit(p);
    return mask;
}

ProcessSet from_mask(ProcessMask mask) {
    ProcessSet set;
    while (mask != 0) {
        set.push_back(std::countr_zero(mask));
        mask &= mask - 1;
    }
    return set;
}

std::string format_edges(const CommGraph& g) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [from, to] : g.edges()) {
        if (from == to) continue;
        if (!first) out << ';';
        out << from + 1 << '>' << to + 1;
        first = false;
    }
    return out.str();
}

std::string format_set(const ProcessSet& set) {
    std::ostringstream out;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (i) out << ';';
        out << set[i] + 1;
    }
    return out.str();
}

}  // namespace subcon
