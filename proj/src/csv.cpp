#include "qwitness/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "qwitness/error.hpp"

namespace qwitness {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view field, std::size_t line, std::string_view column) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end)
    throw ParseError("line " + std::to_string(line) + ": invalid " + std::string(column) +
                         " value '" + std::string(field) + "'",
                     line);
  return v;
}

}  // namespace

QuadratureDataset parse_quadrature_csv(std::istream& in, double convention_variance) {
  std::string raw;
  std::size_t line_no = 0;
  int columns = 0;
  std::vector<double> values, phases;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (columns == 0) {
      if (line == "quadrature") {
        columns = 1;
      } else if (line == "quadrature,phase") {
        columns = 2;
      } else {
        throw ParseError("line " + std::to_string(line_no) +
                             ": expected header 'quadrature' or 'quadrature,phase', got '" +
                             std::string(line) + "'",
                         line_no);
      }
      continue;
    }
    const auto comma = line.find(',');
    if (columns == 1) {
      if (comma != std::string_view::npos)
        throw ParseError("line " + std::to_string(line_no) + ": expected one column", line_no);
      const double v = parse_number(line, line_no, "quadrature");
      if (!std::isfinite(v))
        throw ParseError("line " + std::to_string(line_no) + ": non-finite quadrature", line_no);
      values.push_back(v);
    } else {
      if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
        throw ParseError("line " + std::to_string(line_no) + ": expected two columns", line_no);
      const double v = parse_number(line.substr(0, comma), line_no, "quadrature");
      const double p = parse_number(line.substr(comma + 1), line_no, "phase");
      if (!std::isfinite(v) || !std::isfinite(p))
        throw ParseError("line " + std::to_string(line_no) + ": non-finite value", line_no);
      values.push_back(v);
      phases.push_back(p);
    }
  }
  if (columns == 0) throw ParseError("empty input: missing 'quadrature' header", line_no);
  if (values.empty()) throw ParseError("no data rows after header", line_no);
  if (columns == 2)
    return QuadratureDataset::tagged(std::move(values), std::move(phases), convention_variance);
  return QuadratureDataset::randomized(std::move(values), convention_variance);
}

QuadratureDataset read_quadrature_csv(const std::filesystem::path& path,
                                      double convention_variance) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io_error, "cannot open '" + path.string() + "' for reading");
  return parse_quadrature_csv(in, convention_variance);
}

std::string format_quadrature_csv(const QuadratureDataset& data, const CsvComments& comments) {
  std::string out;
  out.reserve(data.size() * 24 + 256);
  for (const auto& [k, v] : comments) out += "# " + k + ": " + v + "\n";
  const bool tagged = data.phase_mode() == PhaseMode::tagged;
  out += tagged ? "quadrature,phase\n" : "quadrature\n";
  char buf[64];
  const auto raw = data.raw_values();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto r = std::to_chars(buf, buf + sizeof buf, raw[i]);
    out.append(buf, r.ptr);
    if (tagged) {
      out += ',';
      r = std::to_chars(buf, buf + sizeof buf, data.phase(i));
      out.append(buf, r.ptr);
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io_error, "cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) fail(ErrorKind::io_error, "failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::io_error, "cannot move output into place at '" + path.string() + "'");
  }
}

}  // namespace qwitness
