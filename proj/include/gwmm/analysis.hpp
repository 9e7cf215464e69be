#pragma once

#include <optional>
#include <vector>

#include "gwmm/distribution.hpp"

namespace gwmm {

enum class Stability { stable, unstable_left, unstable_right, unstable_both };
const char* stability_name(Stability s);

struct FixedPointRecord {
  double q = 0;
  double xi = 0;  // f'(q); +inf when the derivative diverges
  std::optional<int> order_k;
  Stability stability = Stability::stable;
  double q_minus = 0;
  double q_plus = 0;
  bool touchpoint = false;  // found as a tangency rather than a sign change

  bool unstable() const { return stability != Stability::stable; }
};

struct AnalysisOptions {
  int grid = 10000;
  double tol = 1e-11;
  double touch_threshold = 1e-8;
  double identity_tol = 1e-10;
  int identity_grid = 1001;
  int max_order = 12;
};

struct FixedPointSet {
  bool identity = false;
  std::vector<FixedPointRecord> points;
};

struct Atom {
  double location;
  double mass;
};

struct LimitLaw {
  bool identity_uniform = false;
  std::vector<Atom> atoms;
};

enum class EndpointCriterion { no_endpoint_atoms, endpoint_atoms, boundary_case };
const char* endpoint_criterion_name(EndpointCriterion c);

bool is_identity(const OffspringDistribution& d, int grid_size = 1001, double tol = 1e-10);
double max_identity_deviation(const OffspringDistribution& d, int grid_size);

FixedPointSet find_fixed_points(const OffspringDistribution& d, const AnalysisOptions& opt = {});
LimitLaw limit_law(const OffspringDistribution& d, const AnalysisOptions& opt = {});
LimitLaw limit_law(const FixedPointSet& fps);
EndpointCriterion endpoint_atom_criterion(const OffspringDistribution& d);

// The unique fixed point of R.
double r_fixed_point(const OffspringDistribution& d);

}  // namespace gwmm
