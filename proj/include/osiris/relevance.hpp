#pragma once

#include <vector>

#include "osiris/mdp.hpp"
#include "osiris/stats.hpp"

namespace osiris {

enum class TestKind { welch, smirnov };
enum class PartitionKind { ratio_binary, return_binary };

struct RelevanceConfig {
  double alpha = 0.05;           // significance level; 0 keeps nothing, 1 keeps all visited states
  TestKind test = TestKind::welch;
  PartitionKind partition = PartitionKind::ratio_binary;
  int min_samples_per_side = 2;  // below this on either side the state stays omitted
};

// The two per-visit sample groups a state's relevance decision compares.
// Each visit to the state at step t contributes g_{t:T} * w_{t:T}: the
// return from t on, times the product of the importance ratios from t on.
struct SampleSplit {
  std::vector<double> side_a;  // visits whose partition condition held
  std::vector<double> side_b;  // everything else (ties land here)
  long long n_visits = 0;
};

struct RelevanceDecision {
  int theta = 0;           // 1 = keep the state's weight factor
  bool tested = false;     // false when a shortcut or the sample guard decided
  TestResult test;         // meaningful only when tested
  long long n_visits = 0;
};

// Partition conditions, applied per visit:
//   ratio_binary:  the visit's own ratio pi_e/pi_b exceeds 1
//   return_binary: the trajectory's total return strictly exceeds the batch
//                  mean return
SampleSplit collect_split(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                          const PolicySpec& pi_b, double gamma, int state, PartitionKind kind);

// Decide one state. alpha = 0 omits unconditionally and alpha = 1 keeps
// every visited state unconditionally; otherwise the configured two-sample
// test must reject equality of the two groups (p < alpha) for the state to
// be kept. Unvisited or under-sampled states are never kept.
RelevanceDecision estimate_relevance(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                                     const PolicySpec& pi_b, double gamma, int state,
                                     const RelevanceConfig& cfg);

// estimate_relevance applied to every state.
RelevanceMapping estimate_relevance_map(const TrajectoryBatch& batch, const PolicySpec& pi_e,
                                        const PolicySpec& pi_b, double gamma,
                                        const RelevanceConfig& cfg);

// Uniform binning of d-dimensional points into a single tabular state code.
// Each dimension gets bins_per_dim[d] equal-width bins spanning [min, max]
// of that dimension; the top edge is closed. A zero-range dimension
// collapses to one bin. Codes are mixed-radix with dimension 0 most
// significant.
struct DiscretizeResult {
  std::vector<int> codes;                  // one per point
  std::vector<std::vector<double>> edges;  // per dimension, bins + 1 edges
  int n_cells = 0;
};

DiscretizeResult discretize(const std::vector<std::vector<double>>& points,
                            const std::vector<int>& bins_per_dim);

}  // namespace osiris
