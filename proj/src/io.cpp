#include "contact/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>

#include "contact/errors.hpp"

namespace contact {

std::string format_double(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), width_(header.size()) {
  if (!out_) throw Error("cannot open " + path + " for writing");
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw DomainError("CsvWriter: row width does not match the header");
  for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
  out_ << '\n';
  if (!out_) throw Error("CsvWriter: write failed");
}

namespace {

constexpr char kMagic[8] = {'C', 'T', 'K', 'E', 'R', 'N', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& o, const T& v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error("kernel dump: truncated file");
  return v;
}

void put_grid(std::ofstream& o, const ProductGrid& g) {
  put<std::uint32_t>(o, static_cast<std::uint32_t>(g.axes.size()));
  for (const auto& a : g.axes) {
    put<std::uint64_t>(o, a.size());
    o.write(reinterpret_cast<const char*>(a.x.data()), static_cast<std::streamsize>(a.size() * sizeof(double)));
    o.write(reinterpret_cast<const char*>(a.w.data()), static_cast<std::streamsize>(a.size() * sizeof(double)));
  }
}

ProductGrid get_grid(std::ifstream& in) {
  ProductGrid g;
  const auto dims = get<std::uint32_t>(in);
  if (dims > 8) throw Error("kernel dump: corrupt grid header");
  for (std::uint32_t d = 0; d < dims; ++d) {
    const auto n = get<std::uint64_t>(in);
    if (n > (1u << 26)) throw Error("kernel dump: corrupt axis size");
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    in.read(reinterpret_cast<char*>(r.x.data()), static_cast<std::streamsize>(n * sizeof(double)));
    in.read(reinterpret_cast<char*>(r.w.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw Error("kernel dump: truncated grid");
    g.axes.push_back(std::move(r));
  }
  return g;
}

}  // namespace

void write_kernel_binary(const KernelOperator& K, const std::string& path) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw Error("cannot open " + path + " for writing");
  o.write(kMagic, sizeof kMagic);
  put(o, kVersion);
  put<std::int32_t>(o, static_cast<std::int32_t>(K.meta.cls));
  put(o, K.meta.eps);
  put(o, K.meta.z);
  put(o, K.meta.Q);
  put<std::uint32_t>(o, static_cast<std::uint32_t>(K.meta.potential.size()));
  o.write(K.meta.potential.data(), static_cast<std::streamsize>(K.meta.potential.size()));
  put_grid(o, K.target);
  put_grid(o, K.source);
  put<std::uint64_t>(o, static_cast<std::uint64_t>(K.M.rows()));
  put<std::uint64_t>(o, static_cast<std::uint64_t>(K.M.cols()));
  for (Eigen::Index i = 0; i < K.M.rows(); ++i)
    for (Eigen::Index j = 0; j < K.M.cols(); ++j) put(o, K.M(i, j));
  if (!o) throw Error("kernel dump: write failed");
}

KernelOperator read_kernel_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || !std::equal(magic, magic + sizeof magic, kMagic)) throw Error("kernel dump: bad magic");
  if (get<std::uint32_t>(in) != kVersion) throw Error("kernel dump: unsupported version");
  KernelOperator K;
  K.meta.cls = static_cast<KernelClass>(get<std::int32_t>(in));
  K.meta.eps = get<double>(in);
  K.meta.z = get<double>(in);
  K.meta.Q = get<double>(in);
  const auto len = get<std::uint32_t>(in);
  K.meta.potential.resize(len);
  in.read(K.meta.potential.data(), len);
  K.target = get_grid(in);
  K.source = get_grid(in);
  const auto rows = get<std::uint64_t>(in), cols = get<std::uint64_t>(in);
  if (rows != K.target.size() || cols != K.source.size()) throw Error("kernel dump: table does not match the grids");
  K.M.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < K.M.rows(); ++i)
    for (Eigen::Index j = 0; j < K.M.cols(); ++j) K.M(i, j) = get<double>(in);
  return K;
}

void write_kernel_csv(const KernelOperator& K, const std::string& path, std::size_t max_entries) {
  if (static_cast<std::size_t>(K.M.size()) > max_entries) throw MemoryBudgetError("kernel CSV: table too large");
  CsvWriter w(path, {"i", "j", "value"});
  for (Eigen::Index i = 0; i < K.M.rows(); ++i)
    for (Eigen::Index j = 0; j < K.M.cols(); ++j)
      w.row({std::to_string(i), std::to_string(j), format_double(K.M(i, j))});
}

void write_resolvent_csv(const ResolventReport& R, const std::string& path) {
  CsvWriter w(path, {"i", "j", "value"});
  for (Eigen::Index i = 0; i < R.R.rows(); ++i)
    for (Eigen::Index j = 0; j < R.R.cols(); ++j)
      w.row({std::to_string(i), std::to_string(j), format_double(R.R(i, j))});
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  CsvWriter w(path, {"target", "eps", "z", "error_hs", "error_op", "grid_n", "grid_L", "disc_err_est"});
  for (const auto& r : rows)
    w.row({r.target, format_double(r.eps), format_double(r.z), format_double(r.error_hs), format_double(r.error_op),
           std::to_string(r.grid_n), format_double(r.grid_L), format_double(r.disc_err_est)});
}

void write_eigen_csv(const EigenReport& rep, const std::string& path) {
  CsvWriter w(path, {"eps", "energy", "reference", "error", "under_resolved"});
  for (std::size_t i = 0; i < rep.eps.size(); ++i)
    w.row({format_double(rep.eps[i]), format_double(rep.energy[i]), format_double(rep.reference),
           format_double(rep.error[i]), rep.under_resolved[i] ? "1" : "0"});
}

}  // namespace contact
