#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace zeno {

// Hex digest of the SHA-256 of `data`.
std::string sha256_hex(const std::string& data);

struct OutputFile {
  std::string name;  // relative to the run directory
  std::size_t bytes = 0;
  std::string sha256;
};

// Single funnel for a run's file output: every payload goes through write(),
// which records size and digest for the manifest.  Creates the directory on
// construction.
class RunWriter {
 public:
  explicit RunWriter(std::string directory);

  const std::string& directory() const { return directory_; }

  // Writes `content` to `<directory>/<name>` and records it.
  void write(const std::string& name, const std::string& content);

  const std::vector<OutputFile>& files() const { return files_; }

 private:
  std::string directory_;
  std::vector<OutputFile> files_;
};

// Current time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace zeno
