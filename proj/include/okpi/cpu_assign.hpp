#pragma once

#include <vector>

namespace okpi {

// One VNF instance in the CPU sizing problem. `weight` is the sum of flow
// fractions whose processing hits this instance (1 per traversal for unsplit
// flows); `base_load` is r_cpu(v) * lambda in service-rate units. Instances
// placed on the same node share that node's residual CPU through `group`.
struct CpuInstance {
  double unit_cost = 1.0;  // currency per CPU unit, > 0
  double base_load = 0.0;  // b_i
  double weight = 1.0;     // w_i > 0
  int group = 0;
};

struct CpuProblem {
  std::vector<CpuInstance> instances;
  std::vector<double> group_cap;  // residual CPU units per group
  double budget_ms = 0.0;         // T = D(s) - d_net
};

enum class CpuInfeasibility { kNone, kDelay, kCpuCapacity };

struct CpuSolution {
  bool feasible = false;
  CpuInfeasibility reason = CpuInfeasibility::kNone;
  std::vector<double> assigned;  // a_i per instance
  double proc_delay_ms = 0.0;    // sum of w_i / (a_i - b_i)
  double cost = 0.0;             // sum of c_i * a_i
};

// Minimum-cost CPU assignment subject to
//   sum_i w_i / (a_i - b_i) <= T,   a_i > b_i,   sum_{i in g} a_i <= cap_g.
// Solved in closed form via the KKT conditions: unconstrained groups get
// a_i = b_i + sqrt(w_i * mu / c_i) with sqrt(mu) = sum_j sqrt(w_j c_j) / T,
// which makes the delay constraint active; groups that would exceed their cap
// are pinned to it and the remainder is re-solved with the budget reduced by
// the pinned groups' (water-filled) processing time.
CpuSolution solve_cpu(const CpuProblem& p);

// Instance with the largest best-achievable processing time (ties: lowest
// index). Used to pick the VNF to replicate when every candidate is
// CPU-capacity infeasible.
int bottleneck_instance(const CpuProblem& p);

}  // namespace okpi
