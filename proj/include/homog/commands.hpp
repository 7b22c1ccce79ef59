#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "homog/config.hpp"

namespace homog {

inline constexpr const char* kToolName = "homog";
inline constexpr const char* kToolVersion = "0.1.0";

/// Writes to `<path>.partial` and renames on commit(). If the writer is
/// destroyed without commit() the partial file stays behind.
class OutputFile {
public:
    explicit OutputFile(std::filesystem::path path);
    std::ostream& stream() { return out_; }
    void commit();
    const std::filesystem::path& path() const noexcept { return path_; }
    const std::filesystem::path& partial_path() const noexcept { return partial_; }

private:
    std::filesystem::path path_;
    std::filesystem::path partial_;
    std::ofstream out_;
    bool committed_ = false;
};

/// `<file>.manifest.json` next to an output: tool, version, command, full
/// config, seed, start and finish timestamps.
void write_manifest(const std::filesystem::path& output, const std::string& command, const RunConfig& config,
                    const std::string& started_at);

std::string utc_timestamp();

/// Each command writes into config.output and returns the files it produced.
std::vector<std::filesystem::path> cmd_sample_field(const RunConfig& config);
std::vector<std::filesystem::path> cmd_estimate(const RunConfig& config);
std::vector<std::filesystem::path> cmd_rate_study(const RunConfig& config);
std::vector<std::filesystem::path> cmd_decay_study(const RunConfig& config);
std::vector<std::filesystem::path> cmd_sweep(const RunConfig& config);

} // namespace homog
