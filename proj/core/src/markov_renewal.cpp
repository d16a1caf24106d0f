#include "harqmac/markov_renewal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <queue>

#include "harqmac/error.hpp"
#include "harqmac/special_math.hpp"

namespace harqmac {
namespace {

constexpr double kRowTolerance = 1e-12;
constexpr double kResidualTolerance = 1e-12;

std::vector<std::vector<std::size_t>> adjacency(const Matrix& t) {
  std::vector<std::vector<std::size_t>> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (t[i][j] > 0.0) out[i].push_back(j);
    }
  }
  return out;
}

std::vector<bool> reachable_from(const std::vector<std::vector<std::size_t>>& adj, std::size_t from) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

// Returns the states of the unique closed class; throws if there is more than one.
std::vector<bool> closed_class(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  std::vector<std::vector<bool>> reach(n);
  for (std::size_t i = 0; i < n; ++i) reach[i] = reachable_from(adj, i);

  // i is recurrent iff every state reachable from i can reach i back.
  std::vector<bool> recurrent(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j] && !reach[j][i]) {
        recurrent[i] = false;
        break;
      }
    }
  }
  const auto first = std::find(recurrent.begin(), recurrent.end(), true);
  const std::size_t root = static_cast<std::size_t>(first - recurrent.begin());
  std::vector<bool> cls(n, false);
  for (std::size_t j = 0; j < n; ++j) cls[j] = recurrent[j] && reach[root][j];
  for (std::size_t j = 0; j < n; ++j) {
    if (recurrent[j] && !cls[j]) throw ModelError("stationary_distribution: chain is reducible");
  }
  return cls;
}

std::size_t period(const std::vector<std::vector<std::size_t>>& adj, const std::vector<bool>& cls) {
  const std::size_t n = adj.size();
  const std::size_t root = static_cast<std::size_t>(std::find(cls.begin(), cls.end(), true) - cls.begin());
  std::vector<long> level(n, -1);
  std::queue<std::size_t> queue;
  level[root] = 0;
  queue.push(root);
  std::size_t g = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop();
    for (std::size_t v : adj[u]) {
      if (!cls[v]) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push(v);
      } else {
        g = std::gcd(g, static_cast<std::size_t>(std::abs(level[u] + 1 - level[v])));
      }
    }
  }
  return g;
}

}  // namespace

void FsmModel::validate() const {
  const std::size_t n = transition.size();
  if (n == 0) throw ModelError("FsmModel: no states");
  if (states.size() != n || reward.size() != n || power.size() != n) {
    throw ModelError("FsmModel: state, transition, reward and power tables disagree in size");
  }
  if (renewal_state >= n) throw ModelError("FsmModel: renewal state out of range");
  if (users < 1) throw ModelError("FsmModel: users must be >= 1");
  for (std::size_t i = 0; i < n; ++i) {
    if (transition[i].size() != n || reward[i].size() != n || power[i].size() != n) {
      throw ModelError("FsmModel: tables must be square");
    }
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(transition[i][j] >= 0.0)) throw ModelError("FsmModel: negative transition probability");
      if (!(reward[i][j] >= 0.0) || !(power[i][j] >= 0.0)) {
        throw ModelError("FsmModel: rewards and powers must be non-negative");
      }
      row += transition[i][j];
    }
    if (std::abs(row - 1.0) > kRowTolerance) {
      throw ModelError(fmt::format("FsmModel: row {} sums to {}", states[i], row));
    }
  }
}

std::vector<double> stationary_distribution(const FsmModel& fsm) {
  fsm.validate();
  const auto adj = adjacency(fsm.transition);
  const auto cls = closed_class(adj);
  if (period(adj, cls) != 1) throw ModelError("stationary_distribution: chain is periodic");

  const auto n = static_cast<Eigen::Index>(fsm.transition.size());
  Eigen::MatrixXd t(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) t(i, j) = fsm.transition[i][j];
  }
  // (T^T - I) pi = 0 with the last balance equation replaced by sum(pi) = 1.
  Eigen::MatrixXd a = t.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd pi = lu.solve(b);
  pi += lu.solve(b - a * pi);  // one step of iterative refinement

  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[i] = std::max(pi(i), 0.0);
  const double residual = (pi.transpose() * t - pi.transpose()).cwiseAbs().maxCoeff();
  if (residual > kResidualTolerance) {
    throw ModelError(fmt::format("stationary_distribution: residual {} exceeds tolerance", residual));
  }
  return out;
}

FsmAnalysis analyze(const FsmModel& fsm) {
  FsmAnalysis result;
  result.stationary = stationary_distribution(fsm);
  double reward_rate = 0.0;
  double power_rate = 0.0;
  for (std::size_t i = 0; i < fsm.transition.size(); ++i) {
    for (std::size_t j = 0; j < fsm.transition.size(); ++j) {
      const double flow = result.stationary[i] * fsm.transition[i][j];
      reward_rate += flow * fsm.reward[i][j];
      power_rate += flow * fsm.power[i][j];
    }
  }
  const double pi_renewal = result.stationary[fsm.renewal_state];
  if (!(pi_renewal > 0.0)) throw ModelError("analyze: renewal state is transient");
  result.mean_cycle_length = 1.0 / pi_renewal;
  result.reward_per_cycle = reward_rate / pi_renewal;
  result.power_per_cycle = power_rate / pi_renewal;
  result.throughput = reward_rate;
  result.power_per_user = power_rate / fsm.users;
  return result;
}

AloRenewal alo_renewal_quantities(double p, double rate) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("alo_renewal_quantities: p must lie in [0, 1]");
  if (!(rate >= 0.0)) throw DomainError("alo_renewal_quantities: rate must be >= 0");
  AloRenewal out;
  out.mean_cycle_length = 4.0 - p;
  out.reward_right_branch = rate * p * (1.0 - p);
  out.reward_left_branch = 3.0 * p * rate;
  out.reward_per_cycle = rate * p * (4.0 - p);
  return out;
}

double alo_left_branch_series(double p, double rate) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("alo_left_branch_series: p must lie in (0, 1]");
  const double q = 1.0 - 0.5 * p;
  const double half = 0.5 * p;
  double sum = 0.0;
  double power = 1.0;  // q^(tau - 2)
  for (long n = 0;; ++n) {
    // 2 q^n + n q^(n-1) (p/2), n = tau - 2
    const double term = 2.0 * power + (n > 0 ? n * (power / q) * half : 0.0);
    sum += term;
    if (n > 0 && term <= 1e-18 * sum) break;
    power *= q;
  }
  return 2.0 * rate * half * half * sum;
}

FsmModel build_alo_fsm(double threshold, double per_user_power) {
  if (!(threshold >= 0.0)) throw DomainError("build_alo_fsm: threshold must be >= 0");
  if (!(per_user_power >= 0.0)) throw DomainError("build_alo_fsm: power must be >= 0");
  constexpr int kUsers = 2;
  const double p = max_fading_ccdf(kUsers, threshold);
  const double on_power = p > 0.0 ? kUsers * per_user_power / p : 0.0;
  const double rate = std::log1p(threshold * on_power);
  const double half = 0.5 * p;
  const double idle = 1.0 - p;

  enum : std::size_t { s11, s12, s21, s22 };
  FsmModel fsm;
  fsm.states = {"(1,1)", "(1,2)", "(2,1)", "(2,2)"};
  fsm.transition.assign(4, std::vector<double>(4, 0.0));
  fsm.reward.assign(4, std::vector<double>(4, 0.0));
  fsm.power.assign(4, std::vector<double>(4, 0.0));
  fsm.renewal_state = s11;
  fsm.users = kUsers;

  auto arc = [&](std::size_t from, std::size_t to, double prob, double decoded_prob) {
    fsm.transition[from][to] += prob;
    if (prob > 0.0) {
      // decoded_prob is the part of `prob` in which a scheduled user decodes.
      fsm.reward[from][to] = rate * decoded_prob / prob;
      fsm.power[from][to] = on_power * decoded_prob / prob;
    }
  };

  // (1,1): the scheduled user restarts, the other moves to its last attempt.
  arc(s11, s12, half, half);
  arc(s11, s21, half, half);
  arc(s11, s22, idle, 0.0);
  // (1,2): user 1 decoding drops user 2's last attempt; otherwise user 2
  // either decodes or loses its packet while user 1 advances.
  arc(s12, s11, half, half);
  arc(s12, s21, half + idle, half);
  arc(s21, s11, half, half);
  arc(s21, s12, half + idle, half);
  // (2,2): every outcome returns to (1,1).
  arc(s22, s11, 1.0, p);
  return fsm;
}

}  // namespace harqmac
