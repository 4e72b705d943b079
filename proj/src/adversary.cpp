#include "subcon/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace subcon {

namespace {

constexpr std::uint64_t kAdversaryStream = 0x61647672;  // "advr"

void add_extra_edges(CommGraph& g, Rng& rng, double prob) {
    if (prob <= 0.0) return;
    std::bernoulli_distribution coin(prob);
    for (Process i = 0; i < g.size(); ++i)
        for (Process j = 0; j < g.size(); ++j)
            if (i != j && coin(rng)) g.add_edge(i, j);
}

void check_k(int n, int k) {
    if (k < 1 || k > n) {
        throw std::invalid_argument("k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
}

}  // namespace

std::string to_string(AdversaryKind kind) {
    switch (kind) {
        case AdversaryKind::Explicit: return "explicit";
        case AdversaryKind::Static: return "static";
        case AdversaryKind::RandomKRooted: return "random-k-rooted";
        case AdversaryKind::RandomKBroadcastable: return "random-k-broadcastable";
    }
    return "unknown";
}

AdversaryKind parse_adversary_kind(const std::string& tag) {
    for (auto kind : {AdversaryKind::Explicit, AdversaryKind::Static, AdversaryKind::RandomKRooted,
                      AdversaryKind::RandomKBroadcastable}) {
        if (to_string(kind) == tag) return kind;
    }
    throw std::invalid_argument("unknown adversary kind '" + tag + "'");
}

void validate(const AdversarySpec& spec) {
    if (spec.n < 2) throw std::invalid_argument("adversary needs n >= 2");
    if (spec.extra_edge_prob < 0.0 || spec.extra_edge_prob > 1.0) {
        throw std::invalid_argument("extra_edge_prob must lie in [0, 1]");
    }
    switch (spec.kind) {
        case AdversaryKind::RandomKRooted:
        case AdversaryKind::RandomKBroadcastable:
            check_k(spec.n, spec.k);
            if (spec.n > kMaxBroadcastSearch) {
                throw std::invalid_argument("random adversaries are limited to n <= " +
                                            std::to_string(kMaxBroadcastSearch));
            }
            return;
        case AdversaryKind::Static:
            if (spec.graphs.size() != 1) throw std::invalid_argument("static adversary needs exactly one graph");
            break;
        case AdversaryKind::Explicit:
            if (spec.graphs.empty()) throw std::invalid_argument("explicit adversary needs a non-empty graph list");
            break;
    }
    if (spec.k != 0) check_k(spec.n, spec.k);
    for (const auto& g : spec.graphs) {
        if (g.size() != spec.n) throw std::invalid_argument("graph size differs from adversary n");
        if (spec.k != 0 && !is_k_rooted(g, spec.k)) {
            throw std::invalid_argument("graph [" + format_edges(g) + "] is not " + std::to_string(spec.k) +
                                        "-rooted");
        }
    }
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

ScheduledRound next_round(const AdversarySpec& spec, int t) {
    if (t < 1) throw std::invalid_argument("rounds are numbered from 1");
    Rng rng = make_rng(spec.seed, kAdversaryStream, static_cast<std::uint64_t>(t));
    auto graph = [&]() -> CommGraph {
        switch (spec.kind) {
            case AdversaryKind::Static: return spec.graphs.at(0);
            case AdversaryKind::Explicit: {
                std::uniform_int_distribution<std::size_t> pick(0, spec.graphs.size() - 1);
                return spec.graphs.at(pick(rng));
            }
            case AdversaryKind::RandomKRooted: return sample_k_rooted(spec.n, spec.k, rng, spec.extra_edge_prob);
            case AdversaryKind::RandomKBroadcastable:
                return sample_k_broadcastable(spec.n, spec.k, rng, spec.extra_edge_prob);
        }
        throw std::logic_error("unhandled adversary kind");
    }();
    ProcessSet m_set = find_broadcasting_set(graph, spec.broadcast_bound());
    return ScheduledRound{t, std::move(graph), std::move(m_set)};
}

CommGraph sample_k_broadcastable(int n, int k, Rng& rng, double extra_edge_prob) {
    check_k(n, k);
    std::vector<Process> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::vector<Process> members(order.begin(), order.begin() + k);

    CommGraph g = CommGraph::identity(n);
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (auto it = order.begin() + k; it != order.end(); ++it) g.add_edge(members[pick(rng)], *it);
    add_extra_edges(g, rng, extra_edge_prob);
    return g;
}

CommGraph sample_k_rooted(int n, int k, Rng& rng, double extra_edge_prob) {
    check_k(n, k);
    std::vector<Process> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int roots = std::uniform_int_distribution<int>(1, k)(rng);

    // Forest of out-arborescences: every non-root hangs below an earlier process.
    CommGraph g = CommGraph::identity(n);
    for (int pos = roots; pos < n; ++pos) {
        const int parent = std::uniform_int_distribution<int>(0, pos - 1)(rng);
        g.add_edge(order[parent], order[pos]);
    }
    // Extra edges only add incoming edges, so every source component still
    // contains a root.
    add_extra_edges(g, rng, extra_edge_prob);
    return g;
}

CommGraph imposs_graph(int n, int k) {
    if (k < 1 || n < k + 1) {
        throw std::invalid_argument("imposs_graph needs n >= k + 1 >= 2, got n=" + std::to_string(n) +
                                    " k=" + std::to_string(k));
    }
    CommGraph g = CommGraph::identity(n);
    for (Process j = k + 1; j < n; ++j) g.add_edge(0, j);
    return g;
}

int default_relay_rounds(int n) {
    const double bound = (std::numbers::pi * std::numbers::pi + 6.0) / 6.0 * n + 1.0;
    return static_cast<int>(std::ceil(bound));
}

long long pigeonhole_rounds(int n, int k) {
    long long rounds = 1;
    for (int i = 0; i <= k; ++i) rounds *= n;
    return rounds;
}

RelaySchedule::RelaySchedule(AdversarySpec spec, int relay_rounds)
    : spec_(std::move(spec)), relay_rounds_(relay_rounds) {
    if (relay_rounds_ < 1) throw std::invalid_argument("relay_rounds must be >= 1");
}

ScheduledRound RelaySchedule::macro_round(int macro_t) const {
    if (macro_t < 1) throw std::invalid_argument("rounds are numbered from 1");
    const int first = (macro_t - 1) * relay_rounds_ + 1;
    if (relay_rounds_ == 1) {
        ScheduledRound raw = next_round(spec_, first);
        raw.t = macro_t;
        return raw;
    }
    CommGraph product = next_round(spec_, first).graph;
    for (int r = 1; r < relay_rounds_; ++r) product = compose(product, next_round(spec_, first + r).graph);
    ProcessSet m_set = find_broadcasting_set(product, spec_.broadcast_bound());
    return ScheduledRound{macro_t, std::move(product), std::move(m_set)};
}

}  // namespace subcon
