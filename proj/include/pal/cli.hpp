#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace pal::cli {

inline constexpr int kSchemaVersion = 1;

/// Exit codes: every check passed / a check failed / bad usage or config.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitUsage = 1;

enum class Format { kJson, kCsv };

struct CommonOptions {
  std::uint64_t seed = 1;
  std::uint64_t reps = 0;  // 0: subcommand default
  std::string out;         // empty: stdout
  Format format = Format::kJson;
  int threads = 0;         // 0: PAL_THREADS, else OpenMP default
};

/// Bad flags or model files; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a model file, checks "schema_version" and the allowed top-level keys,
/// and returns the object without "schema_version".
nlohmann::json load_model(const std::string& path, const std::vector<std::string>& allowed,
                          const std::vector<std::string>& required);

/// "a:b:n" -> n evenly spaced values from a to b inclusive.
std::vector<double> parse_grid(const std::string& spec);
/// "random:K" -> K
int parse_random_count(const std::string& spec);

/// JSON text with every floating-point number written to 17 significant digits.
std::string dump_json(const nlohmann::json& j);
std::string format_number(double v);

/// Writes the result to opt.out (or stdout) and, when writing a file, the
/// timing sidecar <out>.meta.json; volatile data never enters the result.
void emit(const CommonOptions& opt, const std::string& text, const nlohmann::json& meta);

int run(int argc, char** argv);

}  // namespace pal::cli
