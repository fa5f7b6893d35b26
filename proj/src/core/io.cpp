#include "dyadic/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dyadic::io {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

constexpr const char* kMagic = "dyadic-grid";
constexpr int kVersion = 1;

const Shape& shape_of(const GridData& d) {
  return std::visit([](const auto& x) -> const Shape& { return x.shape(); }, d);
}

std::span<const double> data_of(const GridData& d) {
  if (const auto* s = std::get_if<GridSignal>(&d)) return s->values();
  return std::get<HaarExpansion>(d).coeffs();
}

double parse_double(const std::string& tok, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw FormatError("trailing characters in " + what + ": '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("cannot parse " + what + ": '" + tok + "'");
  }
}

long parse_int(const std::string& tok, const std::string& what) {
  long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) throw FormatError("cannot parse " + what + ": '" + tok + "'");
  return v;
}

std::string expect_key(std::istream& is, const std::string& key) {
  std::string k;
  if (!(is >> k) || k != key) throw FormatError("expected header field '" + key + "', got '" + k + "'");
  return k;
}

}  // namespace

void write_grid(std::ostream& os, const GridData& data) {
  const Shape& shape = shape_of(data);
  os << kMagic << ' ' << kVersion << '\n';
  os << "kind " << (std::holds_alternative<GridSignal>(data) ? "signal" : "coefficients") << '\n';
  os << "n_params " << shape.n_params() << '\n';
  os << "depths";
  for (int d : shape.depths()) os << ' ' << d;
  os << '\n';
  os << "count " << shape.size() << '\n';
  for (double v : data_of(data)) os << format_double(v) << '\n';
}

GridData read_grid(std::istream& is) {
  std::string tok;
  if (!(is >> tok) || tok != kMagic) throw FormatError("missing '" + std::string(kMagic) + "' header");
  if (!(is >> tok) || parse_int(tok, "version") != kVersion) throw FormatError("unsupported grid file version");
  expect_key(is, "kind");
  std::string kind;
  is >> kind;
  if (kind != "signal" && kind != "coefficients") throw FormatError("unknown kind '" + kind + "'");
  expect_key(is, "n_params");
  is >> tok;
  const long n = parse_int(tok, "n_params");
  if (n < 1 || n > 16) throw FormatError("n_params out of range");
  expect_key(is, "depths");
  std::vector<int> depths;
  for (long a = 0; a < n; ++a) {
    if (!(is >> tok)) throw FormatError("truncated depths line");
    depths.push_back(static_cast<int>(parse_int(tok, "depth")));
  }
  expect_key(is, "count");
  is >> tok;
  const long count = parse_int(tok, "count");
  Shape shape = [&] {
    try {
      return Shape(depths);
    } catch (const ShapeError& e) {
      throw FormatError(e.what());
    }
  }();
  if (count != static_cast<long>(shape.size()))
    throw FormatError("count " + std::to_string(count) + " does not match depths (" + std::to_string(shape.size()) + ")");
  std::vector<double> values;
  values.reserve(shape.size());
  for (long i = 0; i < count; ++i) {
    if (!(is >> tok)) throw FormatError("file ends after " + std::to_string(i) + " of " + std::to_string(count) + " values");
    values.push_back(parse_double(tok, "value " + std::to_string(i)));
  }
  if (is >> tok) throw FormatError("unexpected data after the last value");
  if (kind == "signal") return GridSignal(std::move(shape), std::move(values));
  return HaarExpansion(std::move(shape), std::move(values));
}

void save_grid(const std::string& path, const GridData& data) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  write_grid(os, data);
}

GridData load_grid(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open '" + path + "'");
  return read_grid(is);
}

void write_csv(std::ostream& os, const GridData& data) {
  const Shape& shape = shape_of(data);
  const auto values = data_of(data);
  for (std::size_t a = 0; a < shape.n_params(); ++a) os << 'i' << a << ',';
  os << "value\n";
  for_each_index(shape, [&](std::span<const std::int64_t> idx, std::size_t f) {
    for (auto i : idx) os << i << ',';
    os << format_double(values[f]) << '\n';
  });
}

GridData read_csv(std::istream& is, bool coefficients) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty CSV");
  std::size_t n = 0;
  {
    std::stringstream hs(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(hs, col, ',')) cols.push_back(col);
    if (cols.size() < 2 || cols.back() != "value") throw FormatError("CSV header must be i0,...,value");
    n = cols.size() - 1;
    for (std::size_t a = 0; a < n; ++a)
      if (cols[a] != "i" + std::to_string(a)) throw FormatError("CSV header column " + std::to_string(a) + " must be i" + std::to_string(a));
  }
  std::vector<std::vector<std::int64_t>> rows;
  std::vector<double> vals;
  std::vector<std::int64_t> max_idx(n, 0);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<std::int64_t> idx;
    for (std::size_t a = 0; a < n; ++a) {
      if (!std::getline(ls, cell, ',')) throw FormatError("line " + std::to_string(lineno) + ": too few columns");
      const long v = parse_int(cell, "index on line " + std::to_string(lineno));
      if (v < 0) throw FormatError("line " + std::to_string(lineno) + ": negative index");
      idx.push_back(v);
      max_idx[a] = std::max<std::int64_t>(max_idx[a], v);
    }
    if (!std::getline(ls, cell, ',')) throw FormatError("line " + std::to_string(lineno) + ": missing value");
    vals.push_back(parse_double(cell, "value on line " + std::to_string(lineno)));
    rows.push_back(std::move(idx));
  }
  std::vector<int> depths(n);
  for (std::size_t a = 0; a < n; ++a) {
    int d = 0;
    while ((std::int64_t{1} << d) <= max_idx[a]) ++d;
    depths[a] = d;
  }
  Shape shape(depths);
  if (rows.size() != shape.size()) throw FormatError("CSV has " + std::to_string(rows.size()) + " rows, grid needs " + std::to_string(shape.size()));
  std::vector<double> values(shape.size(), 0.0);
  std::vector<bool> seen(shape.size(), false);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto f = shape.flat(rows[r]);
    if (seen[f]) throw FormatError("duplicate CSV row for flat index " + std::to_string(f));
    seen[f] = true;
    values[f] = vals[r];
  }
  if (coefficients) return HaarExpansion(std::move(shape), std::move(values));
  return GridSignal(std::move(shape), std::move(values));
}

}  // namespace dyadic::io
