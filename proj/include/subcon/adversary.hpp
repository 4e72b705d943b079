#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "subcon/graph.hpp"

namespace subcon {

using Rng = std::mt19937_64;

enum class AdversaryKind {
    Explicit,             ///< uniform choice from a fixed graph list each round
    Static,               ///< the same graph every round
    RandomKRooted,        ///< fresh random k-rooted graph every round
    RandomKBroadcastable  ///< fresh random k-broadcastable graph every round
};

std::string to_string(AdversaryKind kind);
AdversaryKind parse_adversary_kind(const std::string& tag);

/// An oblivious message adversary together with the policy that picks its
/// graph in each round.
struct AdversarySpec {
    int n = 2;
    AdversaryKind kind = AdversaryKind::Static;
    /// Declared rootedness/broadcastability bound. For Explicit and Static a
    /// value of 0 means "undeclared".
    int k = 0;
    std::uint64_t seed = 0;
    /// Graph list for Explicit; single entry for Static.
    std::vector<CommGraph> graphs;
    /// Probability of each non-witness edge in the random constructions.
    double extra_edge_prob = 0.15;

    /// Bound used when designating M(t): k if declared, otherwise n.
    int broadcast_bound() const { return k > 0 ? k : n; }
};

/// Throws std::invalid_argument if the adversary description cannot produce valid graphs or
/// an explicit graph violates the declared k-rootedness.
void validate(const AdversarySpec& spec);

struct ScheduledRound {
    int t = 1;
    CommGraph graph;
    /// Designated broadcasting set M(t); empty when no set of size
    /// broadcast_bound() exists.
    ProcessSet m_set;
};

/// Independent, reproducible stream for (seed, stream, index).
Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Round t of the adversary. Pure function of (spec, t).
ScheduledRound next_round(const AdversarySpec& spec, int t);

CommGraph sample_k_broadcastable(int n, int k, Rng& rng, double extra_edge_prob = 0.15);
CommGraph sample_k_rooted(int n, int k, Rng& rng, double extra_edge_prob = 0.15);

/// Static graph with k+1 isolated source processes 0..k; every other process
/// receives from process 0. Not k-rooted.
CommGraph imposs_graph(int n, int k);

/// ceil((pi^2 + 6)/6 * n + 1): products of this many k-rooted graphs are
/// k-broadcastable.
int default_relay_rounds(int n);

/// n^(k+1): length after which the pigeonhole argument guarantees a
/// k-broadcastable product.
long long pigeonhole_rounds(int n, int k);

/// Groups consecutive adversary rounds into macro-rounds whose graph is the
/// product of the grouped graphs.
class RelaySchedule {
public:
    RelaySchedule(AdversarySpec spec, int relay_rounds);

    int relay_rounds() const { return relay_rounds_; }
    const AdversarySpec& spec() const { return spec_; }

    /// Raw adversary rounds (T-1)R+1 .. TR composed; M recomputed on the product.
    ScheduledRound macro_round(int macro_t) const;

private:
    AdversarySpec spec_;
    int relay_rounds_;
};

}  // namespace subcon
