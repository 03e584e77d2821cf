#ifndef EESIM_TRAJECTORY_HPP
#define EESIM_TRAJECTORY_HPP

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace eesim {

// Sampled observable time series plus run metadata.
struct Trajectory {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::map<std::string, std::string> meta;

    int col(const std::string &name) const;
    double last(const std::string &name) const;
    double max_of(const std::string &name) const;

    // RFC-4180 style, header row, full double precision.
    void write_csv(std::ostream &os) const;
    void write_csv_file(const std::string &path) const;
};

} // namespace eesim

#endif
