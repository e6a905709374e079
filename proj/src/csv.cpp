#include "lpocv/csv.hpp"

#include "lpocv/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace lpocv {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text, std::size_t line_no) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw InputError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(text) +
                     "' as a number");
  }
  return v;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header_line = line;
      break;
    }
  }
  if (header_line.empty()) throw InputError("empty CSV input");
  header = split(trim(header_line));
  if (header.size() < 2 || trim(header.back()) != "label") {
    throw InputError("CSV header must end with a 'label' column");
  }
  const std::size_t d = header.size() - 1;
  for (std::size_t c = 0; c < d; ++c) {
    if (trim(header[c]) != "f" + std::to_string(c + 1)) {
      throw InputError("CSV header column " + std::to_string(c + 1) + " must be named f" +
                       std::to_string(c + 1));
    }
  }

  std::vector<double> coords;
  std::vector<Label> labels;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto fields = split(body);
    if (fields.size() != d + 1) {
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(d + 1) +
                       " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < d; ++c) coords.push_back(parse_double(trim(fields[c]), line_no));
    const auto lab = trim(fields[d]);
    if (lab != "0" && lab != "1") {
      throw InputError("line " + std::to_string(line_no) + ": label must be 0 or 1");
    }
    labels.push_back(lab == "1" ? 1 : 0);
  }
  Matrix x(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = coords[r * d + c];
    }
  }
  return {std::move(x), std::move(labels)};
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
  const std::size_t d = dataset.dimension();
  for (std::size_t c = 0; c < d; ++c) out << 'f' << (c + 1) << ',';
  out << "label\n";
  char buf[64];
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double v = dataset.features()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << dataset.label(r) << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_dataset_csv(out, dataset);
}

}  // namespace lpocv
