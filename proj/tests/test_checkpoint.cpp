#include <gtest/gtest.h>

#include <sstream>

#include "rgnn/checkpoint.hpp"
#include "rgnn/errors.hpp"

using namespace rgnn;

namespace {

Checkpoint sample(bool with_optimizer) {
  ModelConfig m;
  m.channels = 5;
  m.bands = 3;
  m.hidden = 4;
  m.classes = 3;
  Checkpoint c;
  c.model = m;
  const auto layout = layout_prefix(seed62_layout(), 5);
  c.params = xavier_init(m, 3, init_local_adjacency(pairwise_distances(layout), 5.0));
  c.channel_names = layout.names;
  c.global_pairs = GlobalPairSet{{{"FP1", "FP2"}}};
  if (with_optimizer) {
    AdamState s = AdamState::zeros_for(c.params);
    s.step = 17;
    s.first_moment.add_scaled(c.params, 0.5);
    s.second_moment.add_scaled(c.params, 2.0);
    c.optimizer = s;
  }
  return c;
}

std::string bytes_of(const Checkpoint& c) {
  std::ostringstream out;
  write_checkpoint(out, c);
  return out.str();
}

}  // namespace

TEST(Checkpoint, RoundTripIsExact) {
  for (bool opt : {false, true}) {
    const Checkpoint c = sample(opt);
    std::istringstream in(bytes_of(c));
    const Checkpoint back = read_checkpoint(in);
    EXPECT_EQ(back.params, c.params);
    EXPECT_EQ(back.channel_names, c.channel_names);
    EXPECT_EQ(back.global_pairs.pairs, c.global_pairs.pairs);
    EXPECT_EQ(back.model.hidden, c.model.hidden);
    ASSERT_EQ(back.optimizer.has_value(), opt);
    if (opt) {
      EXPECT_EQ(back.optimizer->step, 17u);
      EXPECT_EQ(back.optimizer->first_moment, c.optimizer->first_moment);
      EXPECT_EQ(back.optimizer->second_moment, c.optimizer->second_moment);
    }
  }
}

TEST(Checkpoint, SerializationIsDeterministic) { EXPECT_EQ(bytes_of(sample(true)), bytes_of(sample(true))); }

TEST(Checkpoint, StartsWithMagicAndVersion) {
  const std::string b = bytes_of(sample(false));
  EXPECT_EQ(b.substr(0, 8), "RGNNCKPT");
  EXPECT_EQ(static_cast<unsigned char>(b[8]), kCheckpointVersion);
}

TEST(Checkpoint, EveryTruncationIsDetected) {
  const std::string b = bytes_of(sample(true));
  for (std::size_t len = 0; len < b.size(); len += 7) {
    std::istringstream in(b.substr(0, len));
    EXPECT_THROW(read_checkpoint(in), CorruptCheckpointError) << "length " << len;
  }
}

TEST(Checkpoint, TrailingBytesBadMagicAndVersion) {
  const std::string b = bytes_of(sample(false));
  std::istringstream trailing(b + "x");
  EXPECT_THROW(read_checkpoint(trailing), CorruptCheckpointError);
  std::string magic = b;
  magic[0] = 'X';
  std::istringstream bad(magic);
  EXPECT_THROW(read_checkpoint(bad), CorruptCheckpointError);
  std::string version = b;
  version[8] = 9;
  std::istringstream v(version);
  EXPECT_THROW(read_checkpoint(v), CorruptCheckpointError);
}

TEST(Checkpoint, HeaderShapeMismatchIsCorrupt) {
  Checkpoint c = sample(false);
  c.model.hidden = 5;
  std::istringstream in(bytes_of(c));
  EXPECT_THROW(read_checkpoint(in), CorruptCheckpointError);
}
