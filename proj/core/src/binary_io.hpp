#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rgnn/linalg.hpp"

namespace rgnn::binary {

void write_u8(std::ostream& out, std::uint8_t value);
void write_u32(std::ostream& out, std::uint32_t value);
void write_u64(std::ostream& out, std::uint64_t value);
void write_f64(std::ostream& out, double value);
void write_f64s(std::ostream& out, std::span<const double> values);

// Readers throw CorruptCheckpointError on short reads; callers rethrow with context.
std::uint8_t read_u8(std::istream& in);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
std::vector<double> read_f64s(std::istream& in, std::size_t count);

/// u32 rows, u32 cols, then rows*cols f64 in row-major order.
void write_matrix_block(std::ostream& out, const Matrix& m);
Matrix read_matrix_block(std::istream& in);

void put_le32(std::uint32_t value, unsigned char* out) noexcept;
std::uint32_t get_le32(const unsigned char* in) noexcept;
void put_le64(std::uint64_t value, unsigned char* out) noexcept;
std::uint64_t get_le64(const unsigned char* in) noexcept;

}  // namespace rgnn::binary
