#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace scnet {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// One downlink transmission slot: SCBS-local pairing of a subcarrier with
// the user it serves.  Slots are kept sorted by subcarrier index.
struct SlotAssignment {
  int subcarrier = -1;
  int user = -1;
};

// Per-SCBS service description: which users are frequent (known QoS demand)
// vs occasional, and the subcarrier map pi_i.
struct ServedSet {
  std::vector<int> frequent;
  std::vector<int> occasional;
  std::vector<SlotAssignment> slots;
  std::vector<double> qos_target;  // parallel to `frequent`, power units
};

// A full problem instance: geometry, channels, subcarrier assignments, user
// categories, QoS targets and the common power budget.  Immutable once
// sealed; all member queries are safe for concurrent reads.
class Scenario {
 public:
  int num_scbs = 0;         // M
  int num_ues = 0;          // N
  int num_subcarriers = 0;  // K, must be >= N
  std::vector<Point> positions_scbs;
  std::vector<Point> positions_ues;
  double path_loss_exponent = 3.0;
  // Channel amplitude h_ij[k], flat [i*N*K + j*K + k].  SINR uses |h|^2.
  std::vector<double> channel_gain;
  // Noise variance sigma_j^2[k], flat [j*K + k]; strictly positive.
  std::vector<double> noise_var;
  std::vector<ServedSet> served;
  double p_max = 1.0;
  std::uint64_t rng_seed = 0;

  // Validates every structural invariant and (re)builds the derived lookup
  // tables.  Must be called before any query below and again after any
  // field mutation; throws std::invalid_argument / std::domain_error on
  // violations.
  void seal();
  bool sealed() const { return sealed_; }

  double channel(int i, int j, int k) const {
    return channel_gain[(static_cast<std::size_t>(i) * num_ues + j) * num_subcarriers + k];
  }
  double noise(int j, int k) const {
    return noise_var[static_cast<std::size_t>(j) * num_subcarriers + k];
  }
  double distance(int i, int j) const {
    return distance_[static_cast<std::size_t>(i) * num_ues + j];
  }

  int num_slots(int i) const { return static_cast<int>(served[i].slots.size()); }
  // Slot index of subcarrier k at SCBS i, or -1 when k is not in K_i.
  int slot_of_subcarrier(int i, int k) const {
    return slot_index_[static_cast<std::size_t>(i) * num_subcarriers + k];
  }
  // Slots of SCBS i that serve user j (>= 1 entry iff j is served by i).
  const std::vector<int>& slots_of_user(int i, int j) const {
    return user_slots_[static_cast<std::size_t>(i) * num_ues + j];
  }
  bool serves(int i, int j) const { return !slots_of_user(i, j).empty(); }
  bool is_frequent(int i, int j) const {
    return frequent_mask_[static_cast<std::size_t>(i) * num_ues + j] != 0;
  }
  // QoS target u-bar for a frequent pair (i, j); throws otherwise.
  double qos(int i, int j) const;

  // SCBSs transmitting on subcarrier k, as (scbs, slot) pairs.
  struct Transmitter {
    int scbs;
    int slot;
  };
  const std::vector<Transmitter>& transmitters(int k) const {
    return transmitters_[k];
  }

  // Effective gain of the slot's own link, cached at seal time.
  double slot_gain(int i, int s) const {
    return slot_beta_[slot_offset_[i] + s];
  }
  int slot_offset(int i) const { return slot_offset_[i]; }
  int total_slots() const { return total_slots_; }

 private:
  bool sealed_ = false;
  std::vector<double> distance_;
  std::vector<int> slot_index_;
  std::vector<std::vector<int>> user_slots_;
  std::vector<std::uint8_t> frequent_mask_;
  std::vector<double> qos_by_user_;  // NaN when not frequent
  std::vector<std::vector<Transmitter>> transmitters_;
  std::vector<double> slot_beta_;
  std::vector<int> slot_offset_;
  int total_slots_ = 0;
};

// Joint strategy u = (u_1, ..., u_M), one power vector per SCBS indexed by
// that SCBS's slot order.
struct PowerProfile {
  std::vector<Eigen::VectorXd> u;

  static PowerProfile zero(const Scenario& sc);
  // Default solver start: interior point, budget half-used.
  static PowerProfile uniform(const Scenario& sc);

  bool feasible(const Scenario& sc, double tol = 0.0) const;
  double sup_distance(const PowerProfile& other) const;
};

// Total power SCBS i allocates to user j (sum over j's slots at i).
double user_power(const Scenario& sc, const PowerProfile& profile, int i, int j);

// beta_ij[k] = |h_ij[k]|^2 d_ij^{-alpha}; throws std::domain_error when the
// SCBS and UE are co-located (d = 0).
double effective_gain(const Scenario& sc, int i, int j, int k);

// Aggregate interference at user j on subcarrier k, excluding SCBS i.
double interference(const Scenario& sc, const PowerProfile& profile, int i,
                    int j, int k);

// Downlink SINR of the (i -> j) link on subcarrier k.
double sinr(const Scenario& sc, const PowerProfile& profile, int i, int j,
            int k);

// R_ij = sum over assigned subcarriers of log(1 + SINR), in nats.
double rate(const Scenario& sc, const PowerProfile& profile, int i, int j);

// JSON (de)serialization.  Round-trips bit-exactly.
std::string scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const Scenario& sc, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace scnet
