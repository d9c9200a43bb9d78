#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>

#include "pqassure/corpus.hpp"

namespace pqtest {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("pq-assure-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// One generated corpus per test process.
inline const fs::path& shared_corpus() {
  static TempDir dir("corpus");
  static const bool generated = (pqassure::corpus::generate_corpus(dir.path()), true);
  (void)generated;
  return dir.path();
}

inline pqassure::Bytes hex(std::string_view h) { return pqassure::from_hex(h); }

}  // namespace pqtest
