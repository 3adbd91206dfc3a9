#include "scnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "scnet/errors.hpp"

namespace scnet {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("scenario: " + msg);
}

}  // namespace

void Scenario::seal() {
  if (num_scbs < 1) fail("num_scbs must be >= 1");
  if (num_ues < 1) fail("num_ues must be >= 1");
  if (num_subcarriers < num_ues)
    fail("num_subcarriers must be >= num_ues (no inter-user interference)");
  if (static_cast<int>(positions_scbs.size()) != num_scbs)
    fail("positions_scbs size mismatch");
  if (static_cast<int>(positions_ues.size()) != num_ues)
    fail("positions_ues size mismatch");
  if (!(path_loss_exponent > 0.0)) fail("path_loss_exponent must be > 0");
  if (!(p_max > 0.0)) fail("p_max must be > 0");
  const std::size_t gain_count =
      static_cast<std::size_t>(num_scbs) * num_ues * num_subcarriers;
  if (channel_gain.size() != gain_count) fail("channel_gain size mismatch");
  for (double h : channel_gain)
    if (!std::isfinite(h)) fail("channel gains must be finite");
  if (noise_var.size() != static_cast<std::size_t>(num_ues) * num_subcarriers)
    fail("noise_var size mismatch");
  for (double s2 : noise_var)
    if (!(s2 > 0.0) || !std::isfinite(s2))
      fail("noise variances must be strictly positive and finite");
  if (static_cast<int>(served.size()) != num_scbs) fail("served size mismatch");

  sealed_ = false;
  total_slots_ = 0;
  distance_.assign(static_cast<std::size_t>(num_scbs) * num_ues, 0.0);
  for (int i = 0; i < num_scbs; ++i) {
    for (int j = 0; j < num_ues; ++j) {
      const double dx = positions_scbs[i].x - positions_ues[j].x;
      const double dy = positions_scbs[i].y - positions_ues[j].y;
      const double d = std::hypot(dx, dy);
      if (d == 0.0)
        throw std::domain_error("scenario: degenerate geometry, SCBS " +
                                std::to_string(i) + " co-located with UE " +
                                std::to_string(j));
      distance_[static_cast<std::size_t>(i) * num_ues + j] = d;
    }
  }

  slot_index_.assign(static_cast<std::size_t>(num_scbs) * num_subcarriers, -1);
  user_slots_.assign(static_cast<std::size_t>(num_scbs) * num_ues, {});
  frequent_mask_.assign(static_cast<std::size_t>(num_scbs) * num_ues, 0);
  qos_by_user_.assign(static_cast<std::size_t>(num_scbs) * num_ues,
                      std::numeric_limits<double>::quiet_NaN());
  transmitters_.assign(num_subcarriers, {});
  slot_offset_.assign(num_scbs + 1, 0);

  // Network-wide subcarrier -> user consistency: a subcarrier may carry
  // traffic for a single UE only, regardless of which SCBS transmits.
  std::vector<int> subcarrier_user(num_subcarriers, -1);

  for (int i = 0; i < num_scbs; ++i) {
    const ServedSet& s = served[i];
    std::set<int> n1(s.frequent.begin(), s.frequent.end());
    std::set<int> n2(s.occasional.begin(), s.occasional.end());
    if (n1.size() != s.frequent.size() || n2.size() != s.occasional.size())
      fail("duplicate user in served set of SCBS " + std::to_string(i));
    for (int j : n1)
      if (n2.count(j))
        fail("user " + std::to_string(j) + " is both frequent and occasional at SCBS " +
             std::to_string(i));
    std::set<int> ni = n1;
    ni.insert(n2.begin(), n2.end());
    if (ni.empty()) fail("SCBS " + std::to_string(i) + " serves no users");
    for (int j : ni)
      if (j < 0 || j >= num_ues) fail("served user index out of range");
    if (s.qos_target.size() != s.frequent.size())
      fail("qos_target size must match frequent set at SCBS " + std::to_string(i));
    for (double q : s.qos_target)
      if (!(q >= 0.0) || !std::isfinite(q)) fail("qos_target must be >= 0");

    if (s.slots.empty()) fail("SCBS " + std::to_string(i) + " has no subcarriers");
    std::set<int> own_subcarriers;
    std::set<int> mapped_users;
    for (const SlotAssignment& a : s.slots) {
      if (a.subcarrier < 0 || a.subcarrier >= num_subcarriers)
        fail("subcarrier index out of range");
      if (!ni.count(a.user))
        fail("subcarrier map targets unserved user at SCBS " + std::to_string(i));
      if (!own_subcarriers.insert(a.subcarrier).second)
        fail("subcarrier reused within SCBS " + std::to_string(i));
      mapped_users.insert(a.user);
      int& owner = subcarrier_user[a.subcarrier];
      if (owner == -1) {
        owner = a.user;
      } else if (owner != a.user) {
        fail("subcarrier " + std::to_string(a.subcarrier) +
             " mapped to different users by different SCBSs");
      }
    }
    // pi_i must be onto N_i (bijective when one subcarrier per user).
    if (mapped_users != ni)
      fail("subcarrier map of SCBS " + std::to_string(i) +
           " does not cover its served set");

    for (std::size_t t = 0; t < s.frequent.size(); ++t) {
      frequent_mask_[static_cast<std::size_t>(i) * num_ues + s.frequent[t]] = 1;
      qos_by_user_[static_cast<std::size_t>(i) * num_ues + s.frequent[t]] =
          s.qos_target[t];
    }
  }

  for (int i = 0; i < num_scbs; ++i) {
    auto& slots = served[i].slots;
    std::sort(slots.begin(), slots.end(),
              [](const SlotAssignment& a, const SlotAssignment& b) {
                return a.subcarrier < b.subcarrier;
              });
    slot_offset_[i] = total_slots_;
    for (int sidx = 0; sidx < static_cast<int>(slots.size()); ++sidx) {
      slot_index_[static_cast<std::size_t>(i) * num_subcarriers +
                  slots[sidx].subcarrier] = sidx;
      user_slots_[static_cast<std::size_t>(i) * num_ues + slots[sidx].user]
          .push_back(sidx);
      transmitters_[slots[sidx].subcarrier].push_back({i, sidx});
    }
    total_slots_ += static_cast<int>(slots.size());
  }
  slot_offset_[num_scbs] = total_slots_;

  sealed_ = true;
  slot_beta_.assign(total_slots_, 0.0);
  for (int i = 0; i < num_scbs; ++i)
    for (int s = 0; s < num_slots(i); ++s)
      slot_beta_[slot_offset_[i] + s] =
          effective_gain(*this, i, served[i].slots[s].user,
                         served[i].slots[s].subcarrier);
}

double Scenario::qos(int i, int j) const {
  const double q = qos_by_user_[static_cast<std::size_t>(i) * num_ues + j];
  if (std::isnan(q))
    throw std::invalid_argument("qos: user " + std::to_string(j) +
                                " is not a frequent user of SCBS " +
                                std::to_string(i));
  return q;
}

PowerProfile PowerProfile::zero(const Scenario& sc) {
  PowerProfile p;
  p.u.reserve(sc.num_scbs);
  for (int i = 0; i < sc.num_scbs; ++i)
    p.u.push_back(Eigen::VectorXd::Zero(sc.num_slots(i)));
  return p;
}

PowerProfile PowerProfile::uniform(const Scenario& sc) {
  PowerProfile p;
  p.u.reserve(sc.num_scbs);
  for (int i = 0; i < sc.num_scbs; ++i) {
    const int n = sc.num_slots(i);
    p.u.push_back(Eigen::VectorXd::Constant(n, sc.p_max / (2.0 * n)));
  }
  return p;
}

bool PowerProfile::feasible(const Scenario& sc, double tol) const {
  if (static_cast<int>(u.size()) != sc.num_scbs) return false;
  for (int i = 0; i < sc.num_scbs; ++i) {
    if (u[i].size() != sc.num_slots(i)) return false;
    if ((u[i].array() < -tol).any()) return false;
    if (u[i].sum() > sc.p_max + tol) return false;
  }
  return true;
}

double PowerProfile::sup_distance(const PowerProfile& other) const {
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    d = std::max(d, (u[i] - other.u[i]).cwiseAbs().maxCoeff());
  return d;
}

double user_power(const Scenario& sc, const PowerProfile& profile, int i, int j) {
  double total = 0.0;
  for (int s : sc.slots_of_user(i, j)) total += profile.u[i][s];
  return total;
}

double effective_gain(const Scenario& sc, int i, int j, int k) {
  const double h = sc.channel(i, j, k);
  const double dx = sc.positions_scbs[i].x - sc.positions_ues[j].x;
  const double dy = sc.positions_scbs[i].y - sc.positions_ues[j].y;
  const double d = std::hypot(dx, dy);
  if (d == 0.0)
    throw std::domain_error("effective_gain: degenerate geometry (d = 0)");
  return h * h * std::pow(d, -sc.path_loss_exponent);
}

double interference(const Scenario& sc, const PowerProfile& profile, int i,
                    int j, int k) {
  double acc = 0.0;
  for (const Scenario::Transmitter& t : sc.transmitters(k)) {
    if (t.scbs == i) continue;
    acc += sc.slot_gain(t.scbs, t.slot) * profile.u[t.scbs][t.slot];
  }
  return acc;
}

double sinr(const Scenario& sc, const PowerProfile& profile, int i, int j,
            int k) {
  const int s = sc.slot_of_subcarrier(i, k);
  if (s < 0 || sc.served[i].slots[s].user != j)
    throw std::invalid_argument("sinr: subcarrier not assigned to this user");
  const double num = sc.slot_gain(i, s) * profile.u[i][s];
  const double den = interference(sc, profile, i, j, k) + sc.noise(j, k);
  return num / den;
}

double rate(const Scenario& sc, const PowerProfile& profile, int i, int j) {
  double r = 0.0;
  for (int s : sc.slots_of_user(i, j)) {
    const int k = sc.served[i].slots[s].subcarrier;
    const double num = sc.slot_gain(i, s) * profile.u[i][s];
    const double den = interference(sc, profile, i, j, k) + sc.noise(j, k);
    r += std::log1p(num / den);
  }
  return r;
}

namespace {

using nlohmann::json;

json point_list(const std::vector<Point>& pts) {
  json arr = json::array();
  for (const Point& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

std::vector<Point> parse_points(const json& arr) {
  std::vector<Point> pts;
  for (const auto& e : arr) pts.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
  return pts;
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["num_scbs"] = sc.num_scbs;
  j["num_ues"] = sc.num_ues;
  j["num_subcarriers"] = sc.num_subcarriers;
  j["positions_scbs"] = point_list(sc.positions_scbs);
  j["positions_ues"] = point_list(sc.positions_ues);
  j["path_loss_exponent"] = sc.path_loss_exponent;
  {
    json gains = json::array();
    for (int i = 0; i < sc.num_scbs; ++i) {
      json per_ue = json::array();
      for (int u = 0; u < sc.num_ues; ++u) {
        json per_k = json::array();
        for (int k = 0; k < sc.num_subcarriers; ++k)
          per_k.push_back(sc.channel(i, u, k));
        per_ue.push_back(std::move(per_k));
      }
      gains.push_back(std::move(per_ue));
    }
    j["channel_gain"] = std::move(gains);
  }
  {
    json noise = json::array();
    for (int u = 0; u < sc.num_ues; ++u) {
      json per_k = json::array();
      for (int k = 0; k < sc.num_subcarriers; ++k) per_k.push_back(sc.noise(u, k));
      noise.push_back(std::move(per_k));
    }
    j["noise_var"] = std::move(noise);
  }
  {
    json served = json::array();
    for (const ServedSet& s : sc.served) {
      json e;
      e["frequent"] = s.frequent;
      e["occasional"] = s.occasional;
      json map = json::array();
      for (const SlotAssignment& a : s.slots)
        map.push_back({a.subcarrier, a.user});
      e["subcarrier_map"] = std::move(map);
      e["qos_target"] = s.qos_target;
      served.push_back(std::move(e));
    }
    j["served"] = std::move(served);
  }
  j["p_max"] = sc.p_max;
  j["rng_seed"] = sc.rng_seed;
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
  json j = json::parse(text);
  Scenario sc;
  sc.num_scbs = j.at("num_scbs").get<int>();
  sc.num_ues = j.at("num_ues").get<int>();
  sc.num_subcarriers = j.at("num_subcarriers").get<int>();
  sc.positions_scbs = parse_points(j.at("positions_scbs"));
  sc.positions_ues = parse_points(j.at("positions_ues"));
  sc.path_loss_exponent = j.at("path_loss_exponent").get<double>();
  for (const auto& per_ue : j.at("channel_gain"))
    for (const auto& per_k : per_ue)
      for (const auto& h : per_k) sc.channel_gain.push_back(h.get<double>());
  for (const auto& per_k : j.at("noise_var"))
    for (const auto& s2 : per_k) sc.noise_var.push_back(s2.get<double>());
  for (const auto& e : j.at("served")) {
    ServedSet s;
    s.frequent = e.at("frequent").get<std::vector<int>>();
    s.occasional = e.at("occasional").get<std::vector<int>>();
    for (const auto& a : e.at("subcarrier_map"))
      s.slots.push_back({a.at(0).get<int>(), a.at(1).get<int>()});
    s.qos_target = e.at("qos_target").get<std::vector<double>>();
    sc.served.push_back(std::move(s));
  }
  sc.p_max = j.at("p_max").get<double>();
  sc.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  sc.seal();
  return sc;
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << scenario_to_json(sc) << "\n";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

}  // namespace scnet
