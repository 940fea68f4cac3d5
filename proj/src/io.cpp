#include "specamp/io.hpp"

namespace specamp {

void write_scalar_field_csv(const std::string& path, const TorusGrid& grid,
                            const TimeGrid& time_grid, const ScalarTimeField& field) {
    std::vector<std::string> header = {"time"};
    for (int a = 0; a < grid.dim(); ++a) header.push_back("x" + std::to_string(a));
    header.push_back("value");
    CsvWriter out(path, header);
    const int n_slices = field.frozen ? 1 : time_grid.n_nodes();
    for (int j = 0; j < n_slices; ++j) {
        const auto& slice = field.slice(j);
        for (int p = 0; p < grid.total_points(); ++p) {
            std::vector<double> row = {time_grid.node(j)};
            const auto x = grid.point(p);
            for (int a = 0; a < grid.dim(); ++a) row.push_back(x[a]);
            row.push_back(slice[p]);
            out.row_values(row);
        }
    }
}

TrajectoryCsv::TrajectoryCsv(const std::string& path, const TorusGrid& grid)
    : total_(grid.total_points()) {
    std::vector<std::string> header = {"time", "log_offset"};
    for (int p = 0; p < total_; ++p) {
        header.push_back("re_" + std::to_string(p));
        header.push_back("im_" + std::to_string(p));
    }
    out_ = std::make_shared<CsvWriter>(path, header);
}

void TrajectoryCsv::operator()(const FieldState& state) {
    std::vector<double> row = {state.time, state.log_offset};
    for (int p = 0; p < total_; ++p) {
        row.push_back(state.values[p].real());
        row.push_back(state.values[p].imag());
    }
    out_->row_values(row);
}

ProbeSeriesCsv::ProbeSeriesCsv(const std::string& path, int probe_point)
    : probe_(probe_point) {
    const std::vector<std::string> header = {"time", "re", "im", "log_offset"};
    out_ = std::make_shared<CsvWriter>(path, header);
}

void ProbeSeriesCsv::operator()(const FieldState& state) {
    out_->row_values({state.time, state.values[probe_].real(),
                      state.values[probe_].imag(), state.log_offset});
}

}  // namespace specamp
