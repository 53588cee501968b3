#include "container.hpp"

#include <array>
#include <bit>
#include <cstring>

#include "errors.hpp"

namespace lrsense {

namespace {

void store_le_u64(uint64_t v, unsigned char out[8]) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

uint64_t load_le_u64(const unsigned char in[8]) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(in[i]) << (8 * i);
  return v;
}

constexpr size_t kChunk = 8192;  // doubles per buffered write

}  // namespace

ContainerWriter::ContainerWriter(const std::string& path, const ContainerHeader& header)
    : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw IoError("cannot open for writing: " + path);
  out_.write(kContainerMagic, sizeof(kContainerMagic));
  write_u64(header.m);
  write_u64(header.n);
  write_u64(header.kind);
  write_u64(header.seed);
}

void ContainerWriter::write_u64(uint64_t v) {
  unsigned char buf[8];
  store_le_u64(v, buf);
  out_.write(reinterpret_cast<const char*>(buf), 8);
  if (!out_) throw IoError("write failure: " + path_);
}

void ContainerWriter::write_double(double v) {
  write_u64(std::bit_cast<uint64_t>(v));
}

void ContainerWriter::write_doubles(const double* p, size_t count) {
  std::array<unsigned char, kChunk * 8> buf;
  while (count > 0) {
    const size_t take = std::min(count, kChunk);
    for (size_t i = 0; i < take; ++i) {
      store_le_u64(std::bit_cast<uint64_t>(p[i]), buf.data() + 8 * i);
    }
    out_.write(reinterpret_cast<const char*>(buf.data()),
               static_cast<std::streamsize>(take * 8));
    if (!out_) throw IoError("write failure: " + path_);
    p += take;
    count -= take;
  }
}

void ContainerWriter::close() {
  out_.flush();
  if (!out_) throw IoError("flush failure: " + path_);
  out_.close();
}

ContainerReader::ContainerReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw IoError("cannot open for reading: " + path);
  char magic[8];
  in_.read(magic, 8);
  if (!in_ || std::memcmp(magic, kContainerMagic, 8) != 0) {
    throw IoError("bad container magic: " + path);
  }
  header_.m = read_u64();
  header_.n = read_u64();
  header_.kind = read_u64();
  header_.seed = read_u64();
}

uint64_t ContainerReader::read_u64() {
  unsigned char buf[8];
  in_.read(reinterpret_cast<char*>(buf), 8);
  if (!in_) throw IoError("truncated container: " + path_);
  return load_le_u64(buf);
}

double ContainerReader::read_double() {
  return std::bit_cast<double>(read_u64());
}

void ContainerReader::read_doubles(double* p, size_t count) {
  std::array<unsigned char, kChunk * 8> buf;
  while (count > 0) {
    const size_t take = std::min(count, kChunk);
    in_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(take * 8));
    if (!in_) throw IoError("truncated container: " + path_);
    for (size_t i = 0; i < take; ++i) {
      p[i] = std::bit_cast<double>(load_le_u64(buf.data() + 8 * i));
    }
    p += take;
    count -= take;
  }
}

void ContainerReader::expect_eof() {
  in_.peek();
  if (!in_.eof()) throw IoError("trailing bytes in container: " + path_);
}

void save_matrix_stack(const std::string& path, const std::vector<DenseMatrix>& mats,
                       uint64_t seed) {
  if (mats.empty()) throw DomainError("save_matrix_stack: empty stack");
  const Eigen::Index m = mats.front().rows();
  for (const auto& a : mats) {
    require_square(a, "save_matrix_stack");
    if (a.rows() != m) throw DimensionError("save_matrix_stack: mixed sizes");
  }
  ContainerWriter w(path, {static_cast<uint64_t>(m), mats.size(), kKindMatrixStack, seed});
  for (const auto& a : mats) {
    w.write_doubles(a.data(), static_cast<size_t>(a.size()));
  }
  w.close();
}

std::vector<DenseMatrix> load_matrix_stack(const std::string& path) {
  ContainerReader r(path);
  const auto& h = r.header();
  if (h.kind != kKindMatrixStack) throw IoError("not a matrix container: " + path);
  if (h.m < 1 || h.n < 1) throw IoError("bad matrix container dimensions: " + path);
  std::vector<DenseMatrix> mats;
  mats.reserve(h.n);
  for (uint64_t j = 0; j < h.n; ++j) {
    DenseMatrix a(h.m, h.m);
    r.read_doubles(a.data(), static_cast<size_t>(a.size()));
    mats.push_back(std::move(a));
  }
  r.expect_eof();
  return mats;
}

void save_matrix(const std::string& path, const DenseMatrix& m, uint64_t seed) {
  save_matrix_stack(path, {m}, seed);
}

DenseMatrix load_matrix(const std::string& path) {
  auto mats = load_matrix_stack(path);
  if (mats.size() != 1) throw IoError("expected a single matrix: " + path);
  return std::move(mats.front());
}

}  // namespace lrsense
