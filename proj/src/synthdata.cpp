#include "dapien/synthdata.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "dapien/error.hpp"
#include "dapien/random.hpp"

namespace dapien {
namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view to_string(NoiseKind noise) {
  switch (noise) {
    case NoiseKind::ConditionalWhite: return "conditional_white";
    case NoiseKind::ScaledWhite: return "scaled_white";
    case NoiseKind::ScaledGamma: return "scaled_gamma";
  }
  return "unknown";
}

GeneratorSpec dataset_spec(char name, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.seed = seed;
  switch (name) {
    case 'A': spec.noise = NoiseKind::ConditionalWhite; break;
    case 'B': spec.noise = NoiseKind::ScaledWhite; break;
    case 'C': spec.noise = NoiseKind::ScaledGamma; break;
    default: throw Error(ErrorKind::ConfigError, std::string("unknown dataset '") + name + "'");
  }
  return spec;
}

std::vector<Sample> generate(const GeneratorSpec& spec) {
  if (spec.d < 1 || spec.d > 24) throw Error(ErrorKind::DomainError, "d must lie in [1, 24]");
  if (spec.replicates < 1) throw Error(ErrorKind::DomainError, "replicates must be positive");
  Rng rng(spec.seed);
  const std::uint64_t count = std::uint64_t{1} << spec.d;
  std::vector<Sample> samples;
  samples.reserve(count * static_cast<std::uint64_t>(spec.replicates));
  for (std::uint64_t index = 0; index < count; ++index) {
    BitVector x(static_cast<std::size_t>(spec.d));
    int f = 0;
    for (int j = 0; j < spec.d; ++j) {
      x[j] = static_cast<std::uint8_t>((index >> j) & 1U);
      f += x[j];
    }
    const double fx = f;
    for (int r = 0; r < spec.replicates; ++r) {
      double err = 0.0;
      switch (spec.noise) {
        case NoiseKind::ConditionalWhite:
          if (f % 2 != 0) err = rng.normal(0.0, 0.2);
          break;
        case NoiseKind::ScaledWhite:
          err = fx * rng.normal(0.0, 0.1);
          break;
        case NoiseKind::ScaledGamma:
          err = fx * rng.gamma(1.0, 1.0);
          break;
      }
      samples.push_back({x, fx + err});
    }
  }
  return samples;
}

Split group_split(std::span<const Sample> samples, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw Error(ErrorKind::DomainError, "test_fraction must lie in (0, 1)");
  }
  std::vector<std::string> keys;
  std::unordered_set<std::string> seen;
  for (const Sample& s : samples) {
    std::string key = bit_key(s.x);
    if (seen.insert(key).second) keys.push_back(std::move(key));
  }
  if (keys.size() < 2) throw Error(ErrorKind::TooFewGroups, "need at least 2 distinct inputs to split");

  Rng rng(spec.seed);
  for (std::size_t i = keys.size(); i > 1; --i) std::swap(keys[i - 1], keys[rng.bounded(i)]);
  auto n_test = static_cast<std::size_t>(std::ceil(spec.test_fraction * static_cast<double>(keys.size())));
  n_test = std::min(n_test, keys.size() - 1);
  const std::unordered_set<std::string> test_keys(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n_test));

  Split split;
  for (const Sample& s : samples) {
    (test_keys.contains(bit_key(s.x)) ? split.test : split.train).push_back(s);
  }
  return split;
}

void write_csv(std::ostream& out, std::span<const Sample> samples) {
  const std::size_t d = samples.empty() ? 0 : samples.front().x.size();
  for (std::size_t j = 0; j < d; ++j) out << "x_" << j << ',';
  out << "y\n";
  for (const Sample& s : samples) {
    for (auto bit : s.x) out << static_cast<int>(bit) << ',';
    out << format_double(s.y) << '\n';
  }
}

std::vector<Sample> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "missing CSV header");
  const auto header = split_fields(line);
  if (header.empty() || trim(header.back()) != "y") {
    throw Error(ErrorKind::ParseError, "CSV header must end with column 'y'");
  }
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (trim(header[j]) != "x_" + std::to_string(j)) {
      throw Error(ErrorKind::ParseError, "CSV header column " + std::to_string(j) + " must be x_" + std::to_string(j));
    }
  }
  std::vector<Sample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != d + 1) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + " has " +
                                             std::to_string(fields.size()) + " fields, expected " +
                                             std::to_string(d + 1));
    }
    Sample s;
    s.x.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      const std::string f = trim(fields[j]);
      if (f != "0" && f != "1") {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": feature must be 0 or 1");
      }
      s.x[j] = static_cast<std::uint8_t>(f[0] - '0');
    }
    const std::string y = trim(fields[d]);
    auto [ptr, ec] = std::from_chars(y.data(), y.data() + y.size(), s.y);
    if (ec != std::errc() || ptr != y.data() + y.size() || !std::isfinite(s.y)) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": bad target '" + y + "'");
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw Error(ErrorKind::EmptyDataset, "CSV has no data rows");
  return samples;
}

}  // namespace dapien
