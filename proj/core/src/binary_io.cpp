#include "binary_io.hpp"

#include <bit>
#include <istream>
#include <ostream>

#include "rgnn/errors.hpp"

namespace rgnn::binary {

void put_le32(std::uint32_t value, unsigned char* out) noexcept {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<unsigned char>(value >> (8 * i));
}

std::uint32_t get_le32(const unsigned char* in) noexcept {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[i]) << (8 * i);
  return v;
}

void put_le64(std::uint64_t value, unsigned char* out) noexcept {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(value >> (8 * i));
}

std::uint64_t get_le64(const unsigned char* in) noexcept {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

namespace {

void write_bytes(std::ostream& out, const unsigned char* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void read_bytes(std::istream& in, unsigned char* data, std::size_t n) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw CorruptCheckpointError("unexpected end of stream");
}

}  // namespace

void write_u8(std::ostream& out, std::uint8_t value) { write_bytes(out, &value, 1); }

void write_u32(std::ostream& out, std::uint32_t value) {
  unsigned char buf[4];
  put_le32(value, buf);
  write_bytes(out, buf, 4);
}

void write_u64(std::ostream& out, std::uint64_t value) {
  unsigned char buf[8];
  put_le64(value, buf);
  write_bytes(out, buf, 8);
}

void write_f64(std::ostream& out, double value) { write_u64(out, std::bit_cast<std::uint64_t>(value)); }

void write_f64s(std::ostream& out, std::span<const double> values) {
  std::vector<unsigned char> buf(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) put_le64(std::bit_cast<std::uint64_t>(values[i]), &buf[8 * i]);
  write_bytes(out, buf.data(), buf.size());
}

std::uint8_t read_u8(std::istream& in) {
  unsigned char b = 0;
  read_bytes(in, &b, 1);
  return b;
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char buf[4];
  read_bytes(in, buf, 4);
  return get_le32(buf);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  read_bytes(in, buf, 8);
  return get_le64(buf);
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

std::vector<double> read_f64s(std::istream& in, std::size_t count) {
  std::vector<unsigned char> buf(count * 8);
  read_bytes(in, buf.data(), buf.size());
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = std::bit_cast<double>(get_le64(&buf[8 * i]));
  return values;
}

void write_matrix_block(std::ostream& out, const Matrix& m) {
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  write_u32(out, static_cast<std::uint32_t>(m.cols()));
  RowMajorMatrix rm = m;
  write_f64s(out, std::span<const double>(rm.data(), static_cast<std::size_t>(rm.size())));
}

Matrix read_matrix_block(std::istream& in) {
  const std::uint32_t rows = read_u32(in);
  const std::uint32_t cols = read_u32(in);
  // 2^28 doubles is far beyond any model here; reject before allocating.
  if (static_cast<std::uint64_t>(rows) * cols > (1ULL << 28)) throw CorruptCheckpointError("matrix block too large");
  const std::vector<double> values = read_f64s(in, static_cast<std::size_t>(rows) * cols);
  Matrix m(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r)
    for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r) * cols + c];
  return m;
}

}  // namespace rgnn::binary
