#include "rtswe/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>

#include <Eigen/SVD>
#include <json.hpp>

namespace rtswe::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace {

constexpr char kSnapMagic[4] = {'R', 'T', 'S', 'W'};
constexpr char kBasisMagic[4] = {'P', 'O', 'D', 'B'};
constexpr char kDeimMagic[4] = {'D', 'E', 'I', 'M'};
constexpr char kRomMagic[4] = {'R', 'O', 'M', 'T'};

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::binary) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

void check_written(std::ostream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

template <class T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

void put_doubles(std::ostream& out, const double* data, Index count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

void put_matrix(std::ostream& out, const Matrix& m) { put_doubles(out, m.data(), m.size()); }

void put_preamble(std::ostream& out, const char (&magic)[4]) {
  out.write(magic, 4);
  put(out, kFormatVersion);
}

class Reader {
 public:
  explicit Reader(const fs::path& path) : path_(path), in_(open_in(path)) {}

  template <class T>
  T get() {
    T value;
    raw(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
  }

  void doubles(double* data, Index count) {
    raw(reinterpret_cast<char*>(data), static_cast<std::size_t>(count) * sizeof(double));
  }

  Matrix matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    doubles(m.data(), m.size());
    return m;
  }

  void preamble(const char (&magic)[4]) {
    char got[4];
    raw(got, 4);
    if (std::memcmp(got, magic, 4) != 0) {
      throw FormatError(path_.string() + ": bad magic, expected " + std::string(magic, 4));
    }
    const auto version = get<std::uint32_t>();
    if (version != kFormatVersion) {
      throw FormatError(path_.string() + ": unsupported format version " + std::to_string(version));
    }
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw FormatError(path_.string() + ": trailing bytes after payload");
    }
  }

  /// Bytes left from the current position; guards allocations against
  /// corrupt headers.
  std::uint64_t remaining() {
    const auto here = in_.tellg();
    in_.seekg(0, std::ios::end);
    const auto end = in_.tellg();
    in_.seekg(here);
    return static_cast<std::uint64_t>(end - here);
  }

  void require_payload(std::uint64_t doubles_needed) {
    if (remaining() < doubles_needed * sizeof(double)) {
      throw FormatError(path_.string() + ": truncated payload");
    }
  }

  const fs::path& path() const { return path_; }

 private:
  void raw(char* data, std::size_t bytes) {
    in_.read(data, static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in_.gcount()) != bytes) {
      throw FormatError(path_.string() + ": truncated file");
    }
  }

  fs::path path_;
  std::ifstream in_;
};

void put_snapshot_header(std::ostream& out, const SnapshotHeader& h) {
  put_preamble(out, kSnapMagic);
  put(out, h.n);
  put(out, h.N);
  put(out, h.K);
  put(out, h.dt);
  put(out, h.layout);
}

SnapshotHeader get_snapshot_header(Reader& in) {
  in.preamble(kSnapMagic);
  SnapshotHeader h;
  h.n = in.get<std::uint64_t>();
  h.N = in.get<std::uint64_t>();
  h.K = in.get<std::uint64_t>();
  h.dt = in.get<double>();
  h.layout = in.get<std::uint32_t>();
  if (h.layout != kLayoutBlocked) {
    throw FormatError(in.path().string() + ": unknown record layout " + std::to_string(h.layout));
  }
  if (h.n * h.n != h.N || h.N == 0) {
    throw FormatError(in.path().string() + ": inconsistent grid header");
  }
  return h;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// snapshots.bin

SnapshotWriter::SnapshotWriter(const fs::path& path, const SnapshotHeader& header)
    : path_(path), out_(open_out(path)), header_(header) {
  put_snapshot_header(out_, header_);
  check_written(out_, path_);
}

void SnapshotWriter::append(const Vector& z) {
  if (static_cast<std::uint64_t>(z.size()) != 4 * header_.N) {
    throw ConfigError("snapshot record length does not match 4N");
  }
  if (records_ == header_.K + 1) throw ConfigError("more than K+1 snapshot records");
  put_doubles(out_, z.data(), z.size());
  ++records_;
}

void SnapshotWriter::finish() {
  check_written(out_, path_);
  if (records_ != header_.K + 1) {
    throw ConfigError("snapshot stream ended after " + std::to_string(records_) + " of " +
                      std::to_string(header_.K + 1) + " records");
  }
  out_.close();
}

void write_snapshots(const fs::path& path, const Matrix& states, int n, double dt) {
  SnapshotHeader h;
  h.n = static_cast<std::uint64_t>(n);
  h.N = static_cast<std::uint64_t>(n) * n;
  h.K = static_cast<std::uint64_t>(states.cols() - 1);
  h.dt = dt;
  if (states.rows() != static_cast<Index>(4 * h.N) || states.cols() < 1) {
    throw ConfigError("trajectory shape does not match the grid");
  }
  SnapshotWriter w(path, h);
  for (Index k = 0; k < states.cols(); ++k) w.append(states.col(k));
  w.finish();
}

SnapshotHeader read_snapshot_header(const fs::path& path) {
  Reader in(path);
  return get_snapshot_header(in);
}

SnapshotFile read_snapshots(const fs::path& path) {
  Reader in(path);
  SnapshotFile out;
  out.header = get_snapshot_header(in);
  const std::uint64_t rows = 4 * out.header.N;
  const std::uint64_t cols = out.header.K + 1;
  in.require_payload(rows * cols);
  out.states = in.matrix(static_cast<Index>(rows), static_cast<Index>(cols));
  in.expect_end();
  return out;
}

// ---------------------------------------------------------------------------
// basis.bin

void write_basis(const fs::path& path, const PodBasis& basis, int n) {
  auto out = open_out(path);
  put_preamble(out, kBasisMagic);
  put(out, static_cast<std::uint64_t>(n));
  put(out, static_cast<std::uint64_t>(basis.N()));
  put(out, static_cast<std::uint64_t>(basis.r));
  for (int w = 0; w < 4; ++w) {
    put_doubles(out, basis.mean[w].data(), basis.mean[w].size());
    put_matrix(out, basis.V[w]);
  }
  check_written(out, path);
}

BasisFile read_basis(const fs::path& path) {
  Reader in(path);
  in.preamble(kBasisMagic);
  BasisFile out;
  out.n = in.get<std::uint64_t>();
  const auto N = in.get<std::uint64_t>();
  const auto r = in.get<std::uint64_t>();
  if (out.n * out.n != N || N == 0 || r == 0 || r > N) {
    throw FormatError(path.string() + ": inconsistent basis header");
  }
  in.require_payload(4 * N * (r + 1));
  out.basis.r = static_cast<int>(r);
  for (int w = 0; w < 4; ++w) {
    out.basis.mean[w] = in.matrix(static_cast<Index>(N), 1);
    out.basis.V[w] = in.matrix(static_cast<Index>(N), static_cast<Index>(r));
  }
  in.expect_end();
  return out;
}

// ---------------------------------------------------------------------------
// deim.bin

void write_deim(const fs::path& path, const DeimSet& deim) {
  auto out = open_out(path);
  put_preamble(out, kDeimMagic);
  const auto N = static_cast<std::uint64_t>(deim.op[0].phi.rows());
  put(out, N);
  put(out, static_cast<std::uint64_t>(deim.p));
  for (const auto& op : deim.op) {
    for (Index i : op.indices) put(out, static_cast<std::uint64_t>(i));
    put_matrix(out, op.phi);
    put_matrix(out, op.psi);
  }
  check_written(out, path);
}

DeimSet read_deim(const fs::path& path) {
  Reader in(path);
  in.preamble(kDeimMagic);
  const auto N = in.get<std::uint64_t>();
  const auto p = in.get<std::uint64_t>();
  if (N == 0 || p == 0 || p > N) throw FormatError(path.string() + ": inconsistent DEIM header");
  in.require_payload(kNumNonlinear * p * (2 * N + 1));
  DeimSet set;
  set.p = static_cast<int>(p);
  for (auto& op : set.op) {
    op.indices.resize(p);
    for (auto& i : op.indices) {
      const auto k = in.get<std::uint64_t>();
      if (k >= N) throw FormatError(path.string() + ": DEIM index out of range");
      i = static_cast<Index>(k);
    }
    op.phi = in.matrix(static_cast<Index>(N), static_cast<Index>(p));
    op.psi = in.matrix(static_cast<Index>(N), static_cast<Index>(p));
    Matrix pt_phi(p, p);
    for (Index i = 0; i < static_cast<Index>(p); ++i) pt_phi.row(i) = op.phi.row(op.indices[i]);
    const Vector sv = Eigen::JacobiSVD<Matrix>(pt_phi).singularValues();
    op.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                            : std::numeric_limits<double>::infinity();
  }
  in.expect_end();
  return set;
}

// ---------------------------------------------------------------------------
// romops.bin

void write_rom_matrices(const fs::path& path, const RomMatrices& m) {
  auto out = open_out(path);
  put_preamble(out, kRomMagic);
  put(out, static_cast<std::uint64_t>(m.r));
  put(out, static_cast<std::uint64_t>(m.p));
  for (const auto& a : m.A) put_matrix(out, a);
  put_matrix(out, m.L_h5);
  put_matrix(out, m.L_h6);
  put_matrix(out, m.L_u4);
  put_matrix(out, m.L_v4);
  for (const auto& g : m.G) put_matrix(out, g);
  check_written(out, path);
}

RomMatrices read_rom_matrices(const fs::path& path) {
  Reader in(path);
  in.preamble(kRomMagic);
  const auto r = in.get<std::uint64_t>();
  const auto p = in.get<std::uint64_t>();
  if (r == 0 || p == 0 || r > (1u << 20) || p > (1u << 20)) {
    throw FormatError(path.string() + ": inconsistent ROM header");
  }
  in.require_payload(4 * r * r + 4 * r * p + 6 * r * p * p);
  RomMatrices m;
  m.r = static_cast<int>(r);
  m.p = static_cast<int>(p);
  const auto R = static_cast<Index>(r);
  const auto P = static_cast<Index>(p);
  for (auto& a : m.A) a = in.matrix(R, R);
  m.L_h5 = in.matrix(R, P);
  m.L_h6 = in.matrix(R, P);
  m.L_u4 = in.matrix(R, P);
  m.L_v4 = in.matrix(R, P);
  for (auto& g : m.G) g = in.matrix(R, P * P);
  in.expect_end();
  return m;
}

// ---------------------------------------------------------------------------
// CSV

void write_invariants_csv(const fs::path& path, const std::vector<InvariantValues>& series,
                          double dt) {
  auto out = open_out(path, std::ios::out);
  out << "step,time,H,M,Q,B\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& v = series[k];
    out << k << ',' << fmt(static_cast<double>(k) * dt) << ',' << fmt(v.H) << ',' << fmt(v.M)
        << ',' << fmt(v.Q) << ',' << fmt(v.B) << '\n';
  }
  check_written(out, path);
}

void write_spectra_csv(const fs::path& path, const std::vector<std::string>& names,
                       const std::vector<Vector>& spectra) {
  if (names.size() != spectra.size()) throw ConfigError("one name per spectrum required");
  auto out = open_out(path, std::ios::out);
  out << "index";
  Index rows = 0;
  for (std::size_t c = 0; c < names.size(); ++c) {
    out << ',' << names[c];
    rows = std::max(rows, spectra[c].size());
  }
  out << '\n';
  for (Index i = 0; i < rows; ++i) {
    out << i + 1;
    for (const auto& s : spectra) {
      out << ',';
      if (i < s.size() && s(0) > 0.0) out << fmt(s(i) / s(0));
    }
    out << '\n';
  }
  check_written(out, path);
}

void write_trajectory_csv(const fs::path& path, const Matrix& coeffs, double dt) {
  auto out = open_out(path, std::ios::out);
  out << "step,time";
  for (Index i = 0; i < coeffs.rows(); ++i) out << ",c" << i;
  out << '\n';
  for (Index k = 0; k < coeffs.cols(); ++k) {
    out << k << ',' << fmt(static_cast<double>(k) * dt);
    for (Index i = 0; i < coeffs.rows(); ++i) out << ',' << fmt(coeffs(i, k));
    out << '\n';
  }
  check_written(out, path);
}

Matrix read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("step,time", 0) != 0) {
    throw FormatError(path.string() + ": missing trajectory header");
  }
  const Index rows = static_cast<Index>(std::count(line.begin(), line.end(), ',')) - 1;
  std::vector<std::vector<double>> cols;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw FormatError(path.string() + ": bad number '" + cell + "'");
      }
    }
    if (static_cast<Index>(values.size()) != rows + 2) {
      throw FormatError(path.string() + ": ragged trajectory row");
    }
    values.erase(values.begin(), values.begin() + 2);
    cols.push_back(std::move(values));
  }
  if (cols.empty()) throw FormatError(path.string() + ": empty trajectory");
  Matrix out(rows, static_cast<Index>(cols.size()));
  for (Index k = 0; k < out.cols(); ++k) {
    for (Index i = 0; i < rows; ++i) out(i, k) = cols[k][i];
  }
  return out;
}

void write_errors_csv(const fs::path& path, const std::vector<ErrorRow>& rows) {
  auto out = open_out(path, std::ios::out);
  out << "method,h,u,v,s,H,M,Q,B\n";
  for (const auto& row : rows) {
    out << row.method;
    for (double e : row.state) out << ',' << fmt(e);
    for (double e : row.invariant) out << ',' << fmt(e);
    out << '\n';
  }
  check_written(out, path);
}

void write_field_csv(const fs::path& path, const Eigen::Ref<const Vector>& field, int n) {
  if (field.size() != static_cast<Index>(n) * n) throw ConfigError("field length must be n*n");
  auto out = open_out(path, std::ios::out);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) out << ',';
      out << fmt(field(static_cast<Index>(i) * n + j));
    }
    out << '\n';
  }
  check_written(out, path);
}

void write_report(const fs::path& path, const Report& report) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report) j[key] = value;
  auto out = open_out(path, std::ios::out);
  out << j.dump(2) << '\n';
  check_written(out, path);
}

Report read_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw FormatError(path.string() + ": report must be a flat object");
  Report out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number()) {
      throw FormatError(path.string() + ": report value for '" + it.key() + "' is not a number");
    }
    out[it.key()] = it.value().get<double>();
  }
  return out;
}

Report read_report_or_empty(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return {};
  return read_report(path);
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }
}

}  // namespace rtswe::io
