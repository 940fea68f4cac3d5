#pragma once

#include <memory>
#include <string>

#include "specamp/csv.hpp"
#include "specamp/evolve.hpp"
#include "specamp/grid.hpp"

namespace specamp {

// Scalar field on grid x time as CSV, time-major rows, then axis order:
// columns time, x0[, x1, x2], value.
void write_scalar_field_csv(const std::string& path, const TorusGrid& grid,
                            const TimeGrid& time_grid, const ScalarTimeField& field);

// Trajectory dump: one row per snapshot with header
// time, log_offset, re_<i>, im_<i> per grid point. Usable as a StepObserver.
class TrajectoryCsv {
  public:
    TrajectoryCsv(const std::string& path, const TorusGrid& grid);
    void operator()(const FieldState& state);

  private:
    std::shared_ptr<CsvWriter> out_;
    int total_;
};

// Probe-point time series: time, re, im, log_offset.
class ProbeSeriesCsv {
  public:
    ProbeSeriesCsv(const std::string& path, int probe_point);
    void operator()(const FieldState& state);

  private:
    std::shared_ptr<CsvWriter> out_;
    int probe_;
};

}  // namespace specamp
