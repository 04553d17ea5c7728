#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "contact/experiments.hpp"
#include "contact/kernels.hpp"
#include "contact/krein.hpp"

namespace contact {

// Shortest round-trip decimal form; NaN prints as an empty field.
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  std::size_t width_;
};

// Binary dump: magic, version, class, ε, z, Q, grid axes (nodes and weights), then the table row-major.
void write_kernel_binary(const KernelOperator& K, const std::string& path);
KernelOperator read_kernel_binary(const std::string& path);
// Long-format CSV (i, j, value) for tables of at most max_entries entries.
void write_kernel_csv(const KernelOperator& K, const std::string& path, std::size_t max_entries = 1'000'000);

void write_resolvent_csv(const ResolventReport& R, const std::string& path);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);
void write_eigen_csv(const EigenReport& rep, const std::string& path);

}  // namespace contact
