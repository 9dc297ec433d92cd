#pragma once

#include <string>
#include <vector>

namespace iqn {

struct ProcessResult {
  int exitCode = -1;
  std::string output;  // stdout and stderr interleaved
};

// Runs argv[0] with the given arguments, no shell involved. Throws
// ExternalCodecError when the process cannot be spawned.
ProcessResult run_process(const std::vector<std::string>& argv);

// Creates a unique scratch directory under $IQNET_TMPDIR (or the system temp
// dir) and removes it on destruction.
class TempDir {
public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

}  // namespace iqn
