#include "eesim/trajectory.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "eesim/errors.hpp"

namespace eesim {

int Trajectory::col(const std::string &name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end())
        throw IoError("trajectory has no column '" + name + "'");
    return static_cast<int>(it - columns.begin());
}

double Trajectory::last(const std::string &name) const {
    if (rows.empty())
        throw IoError("trajectory is empty");
    return rows.back()[col(name)];
}

double Trajectory::max_of(const std::string &name) const {
    const int c = col(name);
    double m = -1e300;
    for (const auto &r : rows)
        m = std::max(m, r[c]);
    return m;
}

void Trajectory::write_csv(std::ostream &os) const {
    for (size_t i = 0; i < columns.size(); ++i)
        os << columns[i] << (i + 1 < columns.size() ? "," : "\r\n");
    char buf[32];
    for (const auto &r : rows) {
        for (size_t i = 0; i < r.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", r[i]);
            os << buf << (i + 1 < r.size() ? "," : "\r\n");
        }
    }
}

void Trajectory::write_csv_file(const std::string &path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open '" + path + "' for writing");
    write_csv(os);
}

} // namespace eesim
