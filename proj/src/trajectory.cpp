#include "sips/trajectory.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sips/errors.hpp"

namespace sips {

std::vector<double> uniform_grid(double horizon, int points) {
  if (points < 2) throw std::invalid_argument("a grid needs at least two points");
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k) grid[k] = horizon * k / (points - 1);
  grid.back() = horizon;
  return grid;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  const int n = traj.nodes();
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",I_" << i;
  for (int i = 1; i <= n; ++i) out << ",P_" << i;
  out << ",I_agg,P_agg\n";
  out.precision(std::numeric_limits<double>::max_digits10);
  const Eigen::VectorXd i_mean = traj.infected_mean();
  const Eigen::VectorXd p_mean = traj.patched_mean();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    out << traj.times[k];
    for (int i = 0; i < n; ++i) out << ',' << traj.infected(i, col);
    for (int i = 0; i < n; ++i) out << ',' << traj.patched(i, col);
    out << ',' << i_mean[col] << ',' << p_mean[col] << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_csv(out, traj);
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

Trajectory read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trajectory file");
  int columns = 1;
  for (char c : line) columns += (c == ',');
  if (columns < 5 || (columns - 3) % 2 != 0) throw ParseError("unexpected trajectory header", 1, 1);
  const int n = (columns - 3) / 2;

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError("bad number '" + cell + "'", line_no, static_cast<int>(row.size()) + 1);
      }
    }
    if (static_cast<int>(row.size()) != columns)
      throw ParseError("wrong number of columns", line_no, 1);
    rows.push_back(std::move(row));
  }

  Trajectory traj;
  traj.resize(n, rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    traj.times[k] = rows[k][0];
    for (int i = 0; i < n; ++i) {
      traj.infected(i, static_cast<Eigen::Index>(k)) = rows[k][1 + i];
      traj.patched(i, static_cast<Eigen::Index>(k)) = rows[k][1 + n + i];
    }
  }
  return traj;
}

}  // namespace sips
