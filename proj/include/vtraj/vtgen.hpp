#pragma once

#include <vector>

#include "vtraj/asm.hpp"
#include "vtraj/trajectory.hpp"

namespace vtraj {

/// Tensor-product monotone cubic interpolation of a smoothed field at cell
/// centers: along x within the four nearest time rows, then along t. Queries
/// outside the hull are clamped to the boundary; results to [0, max field speed].
class FieldSampler {
public:
  explicit FieldSampler(const SmoothedField& field);

  double operator()(double t, double x) const;

  const SmoothedField& field() const { return *m_field; }

private:
  double row_value(Eigen::Index row, double x) const;

  const SmoothedField* m_field;
  double m_vmax;
};

double sample_speed(const SmoothedField& field, double t, double x);

/// Forward Euler through the field: p_{k+1} = p_k + step * max(0, v(t_k, p_k)).
/// Completes when p reaches x_end (last step shortened to land on x_end);
/// stops incomplete once t reaches t_max. Throws DataError("degenerate route")
/// when x0 >= x_end.
VirtualTrajectory integrate(const FieldSampler& sampler, double t0, double x0, double step, double x_end,
                            double t_max, int lane = 1);
VirtualTrajectory integrate(const SmoothedField& field, double t0, double x0, double step, double x_end,
                            double t_max, int lane = 1);

struct SweepParams {
  double t_start{0.0};
  double t_end{0.0};
  double interval{15.0};
  double origin{0.0};
  double destination{0.0};
  double step{0.1};
  double t_max{0.0};
  int lane{1};
};

/// floor((t_end - t_start) / interval) + 1, tolerant to round-off in the ratio.
std::size_t departure_count(double t_start, double t_end, double interval);

/// One trajectory per departure t_start + k * interval <= t_end.
std::vector<VirtualTrajectory> departure_sweep(const SmoothedField& field, const SweepParams& sweep,
                                               int jobs = 1);

}  // namespace vtraj
