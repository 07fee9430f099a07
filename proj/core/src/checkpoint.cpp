#include "rgnn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "rgnn/errors.hpp"

namespace rgnn {

namespace {

constexpr char kMagic[8] = {'R', 'G', 'N', 'N', 'C', 'K', 'P', 'T'};

void write_param_blocks(std::ostream& out, const ParamSet& p, bool adjacency_as_matrix) {
  if (adjacency_as_matrix) {
    const auto upper = p.adjacency.upper();
    Matrix row(1, static_cast<Eigen::Index>(upper.size()));
    for (std::size_t i = 0; i < upper.size(); ++i) row(0, static_cast<Eigen::Index>(i)) = upper[i];
    binary::write_matrix_block(out, row);
  } else {
    write_adjacency(out, p.adjacency);
  }
  binary::write_matrix_block(out, p.w);
  binary::write_matrix_block(out, p.w_out);
  binary::write_matrix_block(out, p.w_domain);
}

ParamSet read_moment_blocks(std::istream& in, const ParamSet& like) {
  ParamSet p;
  const Matrix row = binary::read_matrix_block(in);
  if (row.rows() != 1) throw CorruptCheckpointError("optimizer adjacency moment must be a single row");
  p.adjacency = SymmetricAdjacency::from_upper(like.adjacency.size(),
                                               std::vector<double>(row.data(), row.data() + row.size()));
  p.w = binary::read_matrix_block(in);
  p.w_out = binary::read_matrix_block(in);
  p.w_domain = binary::read_matrix_block(in);
  p.require_same_shape(like);
  return p;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  nlohmann::json header = {
      {"format", "rgnn-checkpoint"},
      {"model", ckpt.model},
      {"channel_names", ckpt.channel_names},
      {"global_pairs", nlohmann::json::array()},
  };
  for (const auto& [a, b] : ckpt.global_pairs.pairs) header["global_pairs"].push_back({a, b});
  const std::string text = header.dump();

  out.write(kMagic, sizeof kMagic);
  binary::write_u32(out, kCheckpointVersion);
  binary::write_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_param_blocks(out, ckpt.params, false);
  binary::write_u8(out, ckpt.optimizer ? 1 : 0);
  if (ckpt.optimizer) {
    binary::write_u64(out, ckpt.optimizer->step);
    write_param_blocks(out, ckpt.optimizer->first_moment, true);
    write_param_blocks(out, ckpt.optimizer->second_moment, true);
  }
  if (!out) throw Error("checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  try {
    char magic[8];
    in.read(magic, sizeof magic);
    if (in.gcount() != sizeof magic || std::memcmp(magic, kMagic, sizeof magic) != 0)
      throw CorruptCheckpointError("not an rgnn checkpoint (bad magic)");
    const std::uint32_t version = binary::read_u32(in);
    if (version != kCheckpointVersion)
      throw CorruptCheckpointError("unsupported checkpoint version " + std::to_string(version));
    const std::uint32_t header_len = binary::read_u32(in);
    if (header_len > (1u << 24)) throw CorruptCheckpointError("implausible header length");
    std::string text(header_len, '\0');
    in.read(text.data(), header_len);
    if (static_cast<std::uint32_t>(in.gcount()) != header_len) throw CorruptCheckpointError("truncated header");

    Checkpoint ckpt;
    const auto header = nlohmann::json::parse(text);
    ckpt.model = header.at("model").get<ModelConfig>();
    ckpt.channel_names = header.at("channel_names").get<std::vector<std::string>>();
    for (const auto& pair : header.at("global_pairs"))
      ckpt.global_pairs.pairs.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());

    ckpt.params.adjacency = read_adjacency(in);
    ckpt.params.w = binary::read_matrix_block(in);
    ckpt.params.w_out = binary::read_matrix_block(in);
    ckpt.params.w_domain = binary::read_matrix_block(in);

    const auto& m = ckpt.model;
    if (ckpt.params.adjacency.size() != m.channels || ckpt.params.w.rows() != static_cast<Eigen::Index>(m.bands) ||
        ckpt.params.w.cols() != static_cast<Eigen::Index>(m.hidden) ||
        ckpt.params.w_out.rows() != static_cast<Eigen::Index>(m.hidden) ||
        ckpt.params.w_out.cols() != static_cast<Eigen::Index>(m.classes) ||
        ckpt.params.w_domain.rows() != static_cast<Eigen::Index>(m.hidden) || ckpt.params.w_domain.cols() != 2)
      throw CorruptCheckpointError("parameter shapes disagree with the header model config");
    if (!ckpt.channel_names.empty() && ckpt.channel_names.size() != m.channels)
      throw CorruptCheckpointError("channel name count disagrees with the model config");

    if (binary::read_u8(in)) {
      AdamState state;
      state.step = binary::read_u64(in);
      state.first_moment = read_moment_blocks(in, ckpt.params);
      state.second_moment = read_moment_blocks(in, ckpt.params);
      ckpt.optimizer = std::move(state);
    }
    if (in.peek() != std::char_traits<char>::eof()) throw CorruptCheckpointError("trailing bytes after checkpoint");
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpointError(std::string("checkpoint header: ") + e.what());
  } catch (const ShapeError& e) {
    throw CorruptCheckpointError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  write_checkpoint(out, checkpoint);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptCheckpointError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace rgnn
