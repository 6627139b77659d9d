#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reports.hpp"

namespace gwl::cli {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "gwl_out";
  std::optional<std::filesystem::path> config;
  bool trace = false;
};

enum class Status { Ok, NotConverged };

/// Bundle file names inside the output directory.
namespace files {
inline constexpr const char* config = "config.txt";
inline constexpr const char* series = "series.csv";
inline constexpr const char* split = "split.txt";
inline constexpr const char* loadings = "loadings.txt";
inline constexpr const char* sn_table = "sn_table.txt";
inline constexpr const char* model = "model.txt";
inline constexpr const char* trace = "trace.txt";
inline constexpr const char* metrics = "metrics.txt";
inline constexpr const char* uq = "uq.txt";
inline constexpr const char* band = "uq_band.csv";
inline constexpr const char* bundle = "bundle.txt";
inline constexpr const char* log = "run.log";
}  // namespace files

/// Writes the synthetic series to `file`, or to <out>/series.csv.
void cmd_synth(const GlobalOptions& opts, const std::optional<std::filesystem::path>& file);
/// Resolves the config, ingests or synthesizes the series and splits the rows.
void cmd_prepare(const GlobalOptions& opts, const std::optional<std::filesystem::path>& data);
void cmd_select(const GlobalOptions& opts);
void cmd_tune(const GlobalOptions& opts);
Status cmd_train(const GlobalOptions& opts, const std::optional<std::string>& family,
                 const std::optional<std::string>& optimizer);
void cmd_eval(const GlobalOptions& opts, const std::optional<std::filesystem::path>& model);
void cmd_uq(const GlobalOptions& opts, const std::vector<std::filesystem::path>& models,
            const std::optional<std::string>& band);
/// prepare, select, tune (when enabled), train, eval, uq (when enabled), then bundle.txt.
Status cmd_pipeline(const GlobalOptions& opts);
/// Runs every config under every seed in <out>/cfg<i>/seed<s> and writes <out>/compare.txt.
std::vector<CompareRow> cmd_compare(const GlobalOptions& opts, const std::vector<std::filesystem::path>& configs,
                                    const std::vector<std::uint64_t>& seeds);

/// Runs `body` and maps failures to exit codes; stage errors already carry the stage name.
int guarded(const std::function<Status()>& body);

}  // namespace gwl::cli
