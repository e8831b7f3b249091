#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "osiris/estimators.hpp"
#include "osiris/mdp.hpp"
#include "osiris/rng.hpp"

using namespace osiris;

namespace {

Trajectory make_traj(std::vector<int> states, std::vector<int> actions,
                     std::vector<double> rewards) {
  Trajectory t;
  t.states = std::move(states);
  t.actions = std::move(actions);
  t.rewards = std::move(rewards);
  return t;
}

// Two-step episodes over 3 states: the hand-checked numbers in the tests
// below assume pi_b uniform and these pi_e rows.
PolicySpec pi_e_small() { return {3, 2, {0.9, 0.1, 0.8, 0.2, 0.5, 0.5}}; }
PolicySpec pi_b_small() { return {3, 2, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}}; }

TrajectoryBatch two_episode_batch() {
  TrajectoryBatch batch;
  batch.trajectories.push_back(make_traj({0, 1, 2}, {0, 0}, {0.0, 1.0}));
  batch.trajectories.push_back(make_traj({0, 1, 2}, {1, 1}, {0.0, -1.0}));
  return batch;
}

// 4-state MDP with stochastic branching used for the per-reward oracle:
// s0 pays 1 under action 0, s1 branches to s2 or termination with
// action-dependent odds, s2 pays 2 and terminates.
MdpSpec branching_mdp() {
  MdpSpec m;
  m.n_states = 4;
  m.n_actions = 2;
  m.gamma = 0.9;
  m.t_max = 20;
  m.initial_dist = {1.0, 0.0, 0.0, 0.0};
  m.terminal = {0, 0, 0, 1};
  m.transition.assign(4 * 2 * 4, 0.0);
  m.reward.assign(4 * 2, 0.0);
  m.p(0, 0, 1) = 1.0;
  m.p(0, 1, 1) = 1.0;
  m.r(0, 0) = 1.0;
  m.p(1, 0, 2) = 0.9;
  m.p(1, 0, 3) = 0.1;
  m.p(1, 1, 2) = 0.2;
  m.p(1, 1, 3) = 0.8;
  m.p(2, 0, 3) = 1.0;
  m.p(2, 1, 3) = 1.0;
  m.r(2, 0) = 2.0;
  m.r(2, 1) = 2.0;
  m.p(3, 0, 3) = 1.0;
  m.p(3, 1, 3) = 1.0;
  return m;
}

PolicySpec flat_policy(int n_states, double p0) {
  PolicySpec pi;
  pi.n_states = n_states;
  pi.n_actions = 2;
  for (int s = 0; s < n_states; ++s) {
    pi.prob.push_back(p0);
    pi.prob.push_back(1.0 - p0);
  }
  return pi;
}

// Straight-from-the-definition per-reward weighting, written independently
// of the library implementation.
double stepwise_by_hand(const Trajectory& traj, const PolicySpec& pi_e, const PolicySpec& pi_b,
                        const TimedRelevanceMapping& theta, double gamma) {
  double total = 0.0;
  for (int tr = 0; tr < traj.length(); ++tr) {
    double w = 1.0;
    for (int t = 0; t < traj.length(); ++t) {
      const int s = traj.states[static_cast<std::size_t>(t)];
      const int a = traj.actions[static_cast<std::size_t>(t)];
      if (theta.keeps(s, tr - t)) w *= pi_e.at(s, a) / pi_b.at(s, a);
    }
    total += std::pow(gamma, tr) * traj.rewards[static_cast<std::size_t>(tr)] * w;
  }
  return total;
}

}  // namespace

TEST_CASE("hand-checked two-episode estimates") {
  const auto batch = two_episode_batch();
  const PolicySpec pe = pi_e_small();
  const PolicySpec pb = pi_b_small();
  RelevanceMapping keep_s1 = RelevanceMapping::no_states(3);
  keep_s1.keep[1] = 1;

  const auto is = is_estimate(batch, pe, pb, 1.0);
  CHECK(is.estimate == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(is.per_traj_weight[0] == doctest::Approx(2.88).epsilon(1e-14));
  CHECK(is.per_traj_weight[1] == doctest::Approx(0.08).epsilon(1e-14));
  CHECK(is.per_traj_return[0] == 1.0);
  CHECK(is.per_traj_return[1] == -1.0);
  CHECK(is.effective_length[0] == 2);
  CHECK(is.estimator_id == "is");

  const auto wis = wis_estimate(batch, pe, pb, 1.0);
  CHECK(wis.estimate == doctest::Approx(2.8 / 2.96).epsilon(1e-14));
  CHECK(wis.estimator_id == "wis");

  const auto os = osiris_estimate(batch, {pe, pb, keep_s1}, 1.0);
  CHECK(os.estimate == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(os.per_traj_weight[0] == doctest::Approx(1.6).epsilon(1e-14));
  CHECK(os.per_traj_weight[1] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(os.per_traj_omitted_weight[0] == doctest::Approx(1.8).epsilon(1e-14));
  CHECK(os.per_traj_omitted_weight[1] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(os.effective_length[0] == 1);
  CHECK(os.estimator_id == "osiris");

  const auto ow = osirwis_estimate(batch, {pe, pb, keep_s1}, 1.0);
  CHECK(ow.estimate == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(ow.estimator_id == "osirwis");

  const auto mc = mc_estimate(batch, 1.0);
  CHECK(mc.estimate == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(mc.per_traj_weight[0] == 1.0);
  CHECK(mc.per_traj_omitted_weight[1] == 1.0);
  CHECK(mc.estimator_id == "mc");
}

TEST_CASE("keeping every state reproduces plain importance sampling factor for factor") {
  const MdpSpec m = branching_mdp();
  const PolicySpec pe = flat_policy(4, 0.7);
  const PolicySpec pb = flat_policy(4, 0.4);
  const auto batch = sample_batch(m, pb, 60, 2024);
  const RelevanceMapping all = RelevanceMapping::all_states(4);

  const auto is = is_estimate(batch, pe, pb, m.gamma);
  const auto os = osiris_estimate(batch, {pe, pb, all}, m.gamma);
  CHECK(os.estimate == is.estimate);  // bitwise: identical factor order
  for (int i = 0; i < batch.size(); ++i) {
    CHECK(os.per_traj_weight[i] == is.per_traj_weight[i]);
    CHECK(os.per_traj_omitted_weight[i] == 1.0);  // empty omitted product
    CHECK(os.effective_length[i] == batch.trajectories[i].length());
  }
  const auto wis = wis_estimate(batch, pe, pb, m.gamma);
  const auto ow = osirwis_estimate(batch, {pe, pb, all}, m.gamma);
  CHECK(ow.estimate == wis.estimate);
}

TEST_CASE("kept and omitted factors multiply back to the full weight") {
  const MdpSpec m = branching_mdp();
  const PolicySpec pe = flat_policy(4, 0.7);
  const PolicySpec pb = flat_policy(4, 0.4);
  const auto batch = sample_batch(m, pb, 40, 555);
  const auto is = is_estimate(batch, pe, pb, m.gamma);
  SplitMix64 g(9);
  for (int rep = 0; rep < 8; ++rep) {
    RelevanceMapping mask = RelevanceMapping::no_states(4);
    for (int s = 0; s < 4; ++s) mask.keep[static_cast<std::size_t>(s)] = g.next() & 1;
    const auto os = osiris_estimate(batch, {pe, pb, mask}, m.gamma);
    for (int i = 0; i < batch.size(); ++i) {
      const double recombined = os.per_traj_weight[i] * os.per_traj_omitted_weight[i];
      CHECK(recombined == doctest::Approx(is.per_traj_weight[i]).epsilon(1e-12));
      int kept_steps = 0;
      for (int t = 0; t < batch.trajectories[i].length(); ++t) {
        if (mask.keeps(batch.trajectories[i].states[static_cast<std::size_t>(t)])) ++kept_steps;
      }
      CHECK(os.effective_length[i] == kept_steps);
    }
  }
}

TEST_CASE("zero behavior probability is an error only when the factor is kept") {
  // pi_b never takes action 0 in state 0, but the logged data contains it.
  const PolicySpec pe{2, 2, {1.0, 0.0, 0.5, 0.5}};
  const PolicySpec pb{2, 2, {0.0, 1.0, 0.5, 0.5}};
  TrajectoryBatch batch;
  batch.trajectories.push_back(make_traj({0, 1}, {0}, {1.0}));

  CHECK_THROWS_WITH_AS(
      is_estimate(batch, pe, pb, 1.0),
      "behavior policy has zero probability for observed action (s=0, a=0) inside the "
      "evaluation policy's support",
      std::domain_error);

  RelevanceMapping drop_s0 = RelevanceMapping::no_states(2);
  drop_s0.keep[1] = 1;
  const auto os = osiris_estimate(batch, {pe, pb, drop_s0}, 1.0);
  CHECK(os.per_traj_weight[0] == 1.0);  // no kept factors in this episode
  CHECK(std::isnan(os.per_traj_omitted_weight[0]));
  CHECK(os.estimate == doctest::Approx(1.0).epsilon(1e-14));

  // Same pair with zero probability under both policies.
  const PolicySpec pe2{2, 2, {0.0, 1.0, 0.5, 0.5}};
  CHECK_THROWS_WITH_AS(is_estimate(batch, pe2, pb, 1.0),
                       "observed action (s=0, a=0) has zero probability under both policies",
                       std::domain_error);
}

TEST_CASE("self-normalized estimators reject an all-zero weight batch") {
  const PolicySpec pe{2, 2, {0.0, 1.0, 0.5, 0.5}};
  const PolicySpec pb{2, 2, {1.0, 0.0, 0.5, 0.5}};
  TrajectoryBatch batch;
  batch.trajectories.push_back(make_traj({0, 1}, {0}, {2.0}));
  batch.trajectories.push_back(make_traj({0, 1}, {0}, {3.0}));
  const auto is = is_estimate(batch, pe, pb, 1.0);
  CHECK(is.estimate == 0.0);
  CHECK_THROWS_WITH_AS(wis_estimate(batch, pe, pb, 1.0),
                       "wis: every importance weight is zero, the self-normalized estimate is "
                       "undefined",
                       std::domain_error);
}

TEST_CASE("empty batches and shape mismatches are rejected") {
  TrajectoryBatch empty;
  const PolicySpec pe = pi_e_small();
  const PolicySpec pb = pi_b_small();
  CHECK_THROWS_AS(mc_estimate(empty, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(is_estimate(empty, pe, pb, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(pdis_estimate(empty, pe, pb, 1.0), std::invalid_argument);

  auto batch = two_episode_batch();
  CHECK_THROWS_AS(osiris_estimate(batch, {pe, pb, RelevanceMapping::no_states(7)}, 1.0),
                  std::invalid_argument);
  PolicySpec narrow{3, 1, {1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(is_estimate(batch, pe, narrow, 1.0), std::invalid_argument);
}

TEST_CASE("per-reward weighting matches the definition for arbitrary time-offset masks") {
  const MdpSpec m = branching_mdp();
  const PolicySpec pe = flat_policy(4, 0.7);
  const PolicySpec pb = flat_policy(4, 0.4);
  const auto batch = sample_batch(m, pb, 50, 31);
  SplitMix64 g(77);
  for (int rep = 0; rep < 6; ++rep) {
    TimedRelevanceMapping theta;
    theta.n_states = 4;
    theta.window_lo = -2;
    theta.window_hi = 2;
    theta.default_before = static_cast<std::uint8_t>(g.next() & 1);
    theta.default_after = static_cast<std::uint8_t>(g.next() & 1);
    theta.bits.assign(4 * 5, 0);
    for (auto& b : theta.bits) b = static_cast<std::uint8_t>(g.next() & 1);

    const auto rep_sw = stepwise_osiris_estimate(batch, pe, pb, theta, m.gamma);
    CHECK(rep_sw.estimator_id == "stepwise_osiris");
    double sum = 0.0;
    for (int i = 0; i < batch.size(); ++i) {
      const double by_hand = stepwise_by_hand(batch.trajectories[i], pe, pb, theta, m.gamma);
      CHECK(rep_sw.per_traj_weight[i] == doctest::Approx(by_hand).epsilon(1e-13));
      CHECK(rep_sw.effective_length[i] == batch.trajectories[i].length());
      sum += by_hand;
    }
    CHECK(rep_sw.estimate == doctest::Approx(sum / batch.size()).epsilon(1e-13));
    CHECK(rep_sw.per_traj_omitted_weight.empty());
  }
}

TEST_CASE("per-decision weighting uses exactly the prefix ratio products") {
  const MdpSpec m = branching_mdp();
  const PolicySpec pe = flat_policy(4, 0.7);
  const PolicySpec pb = flat_policy(4, 0.4);
  const auto batch = sample_batch(m, pb, 80, 808);
  const auto rep = pdis_estimate(batch, pe, pb, m.gamma);
  CHECK(rep.estimator_id == "pdis");
  double sum = 0.0;
  for (int i = 0; i < batch.size(); ++i) {
    const auto& traj = batch.trajectories[i];
    double acc = 1.0;
    double summand = 0.0;
    for (int t = 0; t < traj.length(); ++t) {
      const int s = traj.states[static_cast<std::size_t>(t)];
      const int a = traj.actions[static_cast<std::size_t>(t)];
      acc *= pe.at(s, a) / pb.at(s, a);
      summand += std::pow(m.gamma, t) * traj.rewards[static_cast<std::size_t>(t)] * acc;
    }
    CHECK(rep.per_traj_weight[i] == doctest::Approx(summand).epsilon(1e-13));
    sum += summand;
  }
  CHECK(rep.estimate == doctest::Approx(sum / batch.size()).epsilon(1e-13));

  // The same mask expressed explicitly gives the identical estimate.
  const auto rep_sw = stepwise_osiris_estimate(batch, pe, pb,
                                               TimedRelevanceMapping::per_decision(4), m.gamma);
  CHECK(rep_sw.estimate == rep.estimate);
}

TEST_CASE("likelihood ratio basics") {
  const PolicySpec pe = pi_e_small();
  const PolicySpec pb = pi_b_small();
  CHECK(likelihood_ratio(pe, pb, 0, 0) == doctest::Approx(1.8).epsilon(1e-14));
  CHECK(likelihood_ratio(pe, pb, 1, 1) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK_THROWS_AS(likelihood_ratio(pe, pb, 3, 0), std::invalid_argument);  // out of range
  CHECK_THROWS_AS(likelihood_ratio(pe, pb, 0, 2), std::invalid_argument);
}

