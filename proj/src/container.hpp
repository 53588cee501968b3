#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "matcore.hpp"

namespace lrsense {

// Flat binary container shared by ensembles, datasets, and cached matrices.
// Layout: 8-byte magic "LRSENSE1", then m, n, kind, seed as little-endian
// unsigned 64-bit fields, then a payload of little-endian IEEE 754 doubles.
// kind 0/1 tags Gaussian/Rademacher ensembles; kind 2 tags plain matrix
// stacks (n square m x m matrices, row-major).
inline constexpr char kContainerMagic[8] = {'L', 'R', 'S', 'E', 'N', 'S', 'E', '1'};
inline constexpr uint64_t kKindMatrixStack = 2;

struct ContainerHeader {
  uint64_t m = 0;
  uint64_t n = 0;
  uint64_t kind = 0;
  uint64_t seed = 0;
};

class ContainerWriter {
 public:
  ContainerWriter(const std::string& path, const ContainerHeader& header);
  void write_u64(uint64_t v);
  void write_double(double v);
  void write_doubles(const double* p, size_t count);
  void close();

 private:
  std::ofstream out_;
  std::string path_;
};

class ContainerReader {
 public:
  explicit ContainerReader(const std::string& path);
  const ContainerHeader& header() const { return header_; }
  uint64_t read_u64();
  double read_double();
  void read_doubles(double* p, size_t count);
  void expect_eof();

 private:
  std::ifstream in_;
  std::string path_;
  ContainerHeader header_;
};

void save_matrix_stack(const std::string& path, const std::vector<DenseMatrix>& mats,
                       uint64_t seed = 0);
std::vector<DenseMatrix> load_matrix_stack(const std::string& path);

// Single square matrix, stored as a stack of one.
void save_matrix(const std::string& path, const DenseMatrix& m, uint64_t seed = 0);
DenseMatrix load_matrix(const std::string& path);

}  // namespace lrsense
