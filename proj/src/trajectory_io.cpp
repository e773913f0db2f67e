#include "ddrobust/trajectory_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "ddrobust/error.hpp"

namespace ddrobust {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  return fields;
}

double parse_number(const std::string& text, Index line_no) {
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::Io, "line " + std::to_string(line_no) +
                                   ": not a number: '" + text + "'");
  }
  return value;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_trajectory_csv(std::ostream& out, const TrajectoryData& data) {
  out << "k";
  for (Index i = 0; i < data.inputs(); ++i) out << ",u_" << i + 1;
  for (Index i = 0; i < data.outputs(); ++i) out << ",y_" << i + 1;
  out << '\n';
  for (Index k = 0; k < data.length(); ++k) {
    out << k;
    for (Index i = 0; i < data.inputs(); ++i) out << ',' << format_number(data.u(i, k));
    for (Index i = 0; i < data.outputs(); ++i) out << ',' << format_number(data.y(i, k));
    out << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryData& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  write_trajectory_csv(out, data);
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

TrajectoryData read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, "empty trajectory CSV");
  const auto header = split_fields(line);
  if (header.empty() || header[0] != "k") {
    throw Error(ErrorKind::Io, "trajectory CSV header must start with 'k'");
  }
  Index m = 0;
  Index p = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "u_" + std::to_string(m + 1) && p == 0) {
      ++m;
    } else if (name == "y_" + std::to_string(p + 1)) {
      ++p;
    } else {
      throw Error(ErrorKind::Io, "unexpected trajectory CSV column '" + name + "'");
    }
  }
  if (m == 0 || p == 0) throw Error(ErrorKind::Io, "trajectory CSV needs u_ and y_ columns");

  std::vector<std::vector<double>> rows;
  Index line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (static_cast<Index>(fields.size()) != 1 + m + p) {
      throw Error(ErrorKind::Io, "line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(1 + m + p) + " fields");
    }
    std::vector<double> values;
    for (std::size_t c = 1; c < fields.size(); ++c) values.push_back(parse_number(fields[c], line_no));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(ErrorKind::Io, "trajectory CSV has no samples");

  const Index length = static_cast<Index>(rows.size());
  Matrix u(m, length);
  Matrix y(p, length);
  for (Index k = 0; k < length; ++k) {
    for (Index i = 0; i < m; ++i) u(i, k) = rows[k][i];
    for (Index i = 0; i < p; ++i) y(i, k) = rows[k][m + i];
  }
  return TrajectoryData(std::move(u), std::move(y));
}

TrajectoryData read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_trajectory_csv(in);
}

}  // namespace ddrobust
