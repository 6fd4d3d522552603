#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vlmprobe/ingest.hpp"
#include "vlmprobe/lexres.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return VLMPROBE_TEST_DATA; }
inline std::filesystem::path resource_dir() { return data_dir() / "resources"; }

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const vlmprobe::lexres::Resources& fixture_resources() {
  static const vlmprobe::lexres::Resources res =
      vlmprobe::lexres::load_resources(vlmprobe::lexres::ResourcePaths::in_directory(resource_dir()));
  return res;
}

inline vlmprobe::ingest::BenchmarkInstance make_instance(std::string id, vlmprobe::ingest::Triplet pos,
                                                         vlmprobe::ingest::Slot neg_type, std::string replacement,
                                                         double p, double n) {
  vlmprobe::ingest::BenchmarkInstance inst;
  inst.id = std::move(id);
  inst.sentence = "a " + pos.subject + " " + pos.verb + " the " + pos.object;
  inst.pos_triplet = pos;
  inst.neg_triplet = pos;
  switch (neg_type) {
    case vlmprobe::ingest::Slot::subject: inst.neg_triplet.subject = replacement; break;
    case vlmprobe::ingest::Slot::verb: inst.neg_triplet.verb = replacement; break;
    case vlmprobe::ingest::Slot::object: inst.neg_triplet.object = replacement; break;
  }
  inst.neg_type = neg_type;
  inst.p = p;
  inst.n = n;
  return inst;
}

/// Temporary directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("vlmprobe-" + tag + "-" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
