#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace rgnn::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2 };

struct SynthArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct TrainArgs {
  std::string data;
  std::string config;
  std::string out;
  std::optional<std::string> protocol;
  std::optional<std::string> bands;  // comma-separated
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::size_t> epochs;
};

struct InspectArgs {
  std::string checkpoint;
  std::size_t top_k = 10;
  bool exclude_global = false;
};

struct GradcheckArgs {
  std::uint64_t seed = 0;
  std::string size = "small";
  bool corrupt_adjoint = false;
};

/// Each command writes its JSON result to `out` and throws rgnn errors on failure.
int cmd_synth(const SynthArgs& args, std::ostream& out);
int cmd_train(const TrainArgs& args, std::ostream& out);
int cmd_inspect(const InspectArgs& args, std::ostream& out);
/// Returns kRuntime when the max relative error exceeds 1e-4.
int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out);

/// Parses argv, dispatches, and maps exceptions to exit codes with a JSON error on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rgnn::cli
