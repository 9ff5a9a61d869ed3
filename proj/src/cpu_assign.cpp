#include "okpi/cpu_assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace okpi {
namespace {

constexpr double kEps = 1e-12;

// Water-filling split of `slack` CPU units across the instances of one
// saturated group: a_i - b_i proportional to sqrt(w_i), which minimizes the
// group's total processing time for a fixed total assignment.
double group_min_time(const CpuProblem& p, const std::vector<int>& members,
                      double slack, std::vector<double>* a_out) {
  double sum_sqrt_w = 0.0;
  for (int i : members) sum_sqrt_w += std::sqrt(p.instances[static_cast<size_t>(i)].weight);
  double time = sum_sqrt_w * sum_sqrt_w / slack;
  if (a_out != nullptr)
    for (int i : members) {
      const auto& inst = p.instances[static_cast<size_t>(i)];
      (*a_out)[static_cast<size_t>(i)] =
          inst.base_load + std::sqrt(inst.weight) * slack / sum_sqrt_w;
    }
  return time;
}

}  // namespace

CpuSolution solve_cpu(const CpuProblem& p) {
  CpuSolution sol;
  const size_t n = p.instances.size();
  sol.assigned.assign(n, 0.0);
  if (p.budget_ms <= 0.0) {
    sol.reason = CpuInfeasibility::kDelay;
    return sol;
  }
  if (n == 0) {
    sol.feasible = true;
    return sol;
  }

  const size_t n_groups = p.group_cap.size();
  std::vector<std::vector<int>> members(n_groups);
  std::vector<double> group_slack(n_groups, 0.0);
  for (size_t g = 0; g < n_groups; ++g) group_slack[g] = p.group_cap[g];
  for (size_t i = 0; i < n; ++i) {
    const auto& inst = p.instances[i];
    members[static_cast<size_t>(inst.group)].push_back(static_cast<int>(i));
    group_slack[static_cast<size_t>(inst.group)] -= inst.base_load;
  }
  for (size_t g = 0; g < n_groups; ++g)
    if (!members[g].empty() && group_slack[g] <= kEps) {
      sol.reason = CpuInfeasibility::kCpuCapacity;
      return sol;
    }

  std::vector<bool> saturated(n_groups, false);
  for (int iter = 0; iter < static_cast<int>(4 * n_groups + 8); ++iter) {
    // Budget left after pinned groups run at their water-filled optimum.
    double t_left = p.budget_ms;
    for (size_t g = 0; g < n_groups; ++g)
      if (saturated[g] && !members[g].empty())
        t_left -= group_min_time(p, members[g], group_slack[g], nullptr);

    double sum_sqrt_wc = 0.0;
    bool any_free = false;
    for (size_t g = 0; g < n_groups; ++g)
      if (!saturated[g])
        for (int i : members[g]) {
          const auto& inst = p.instances[static_cast<size_t>(i)];
          sum_sqrt_wc += std::sqrt(inst.weight * inst.unit_cost);
          any_free = true;
        }

    if (any_free && t_left <= kEps) {
      sol.reason = CpuInfeasibility::kCpuCapacity;
      return sol;
    }

    double sqrt_mu = any_free ? sum_sqrt_wc / t_left : 0.0;

    bool changed = false;
    // Pin any free group whose KKT assignment exceeds its residual.
    for (size_t g = 0; g < n_groups; ++g) {
      if (saturated[g] || members[g].empty()) continue;
      double extra = 0.0;
      for (int i : members[g]) {
        const auto& inst = p.instances[static_cast<size_t>(i)];
        extra += std::sqrt(inst.weight / inst.unit_cost) * sqrt_mu;
      }
      if (extra > group_slack[g] + kEps) {
        saturated[g] = true;
        changed = true;
      }
    }
    if (changed) continue;
    // Release any pinned group the current multiplier no longer pushes
    // against its cap.
    for (size_t g = 0; g < n_groups; ++g) {
      if (!saturated[g] || members[g].empty()) continue;
      double extra = 0.0;
      for (int i : members[g]) {
        const auto& inst = p.instances[static_cast<size_t>(i)];
        extra += std::sqrt(inst.weight / inst.unit_cost) * sqrt_mu;
      }
      if (any_free && extra < group_slack[g] - kEps) {
        saturated[g] = false;
        changed = true;
      }
    }
    if (changed) continue;

    // Fixed point: assemble the solution.
    for (size_t g = 0; g < n_groups; ++g) {
      if (members[g].empty()) continue;
      if (saturated[g]) {
        group_min_time(p, members[g], group_slack[g], &sol.assigned);
      } else {
        for (int i : members[g]) {
          const auto& inst = p.instances[static_cast<size_t>(i)];
          sol.assigned[static_cast<size_t>(i)] =
              inst.base_load + std::sqrt(inst.weight / inst.unit_cost) * sqrt_mu;
        }
      }
    }
    sol.proc_delay_ms = 0.0;
    sol.cost = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const auto& inst = p.instances[i];
      double margin = sol.assigned[i] - inst.base_load;
      if (margin <= 0.0) {
        sol.reason = CpuInfeasibility::kCpuCapacity;
        return sol;
      }
      sol.proc_delay_ms += inst.weight / margin;
      sol.cost += inst.unit_cost * sol.assigned[i];
    }
    if (sol.proc_delay_ms > p.budget_ms + 1e-9) {
      sol.reason = CpuInfeasibility::kCpuCapacity;
      return sol;
    }
    sol.feasible = true;
    return sol;
  }
  sol.reason = CpuInfeasibility::kCpuCapacity;  // no fixed point within bound
  return sol;
}

int bottleneck_instance(const CpuProblem& p) {
  const size_t n_groups = p.group_cap.size();
  std::vector<double> group_slack(n_groups);
  for (size_t g = 0; g < n_groups; ++g) group_slack[g] = p.group_cap[g];
  for (const auto& inst : p.instances)
    group_slack[static_cast<size_t>(inst.group)] -= inst.base_load;

  int best = 0;
  double best_time = -1.0;
  for (size_t i = 0; i < p.instances.size(); ++i) {
    const auto& inst = p.instances[i];
    double slack = group_slack[static_cast<size_t>(inst.group)];
    double time = slack <= 0.0 ? std::numeric_limits<double>::infinity()
                               : inst.weight / slack;
    if (time > best_time + kEps) {
      best_time = time;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace okpi
