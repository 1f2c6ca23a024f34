#pragma once

#include <string>

#include "datacopy/sampler.hpp"

namespace datacopy {

// Sampler backed by a child process speaking a line protocol: each batch is
// requested with "SAMPLE <n> <d>\n" on the child's stdin, answered by exactly
// n lines of d space-separated decimal floats on its stdout. The same process
// serves repeated batches and is terminated on destruction.
class SubprocessSampler final : public SamplerOracle {
 public:
  SubprocessSampler(std::string command, int dim, double timeout_seconds = 60.0);
  ~SubprocessSampler() override;

  SubprocessSampler(const SubprocessSampler&) = delete;
  SubprocessSampler& operator=(const SubprocessSampler&) = delete;

  int dim() const override { return dim_; }
  PointSet draw(std::size_t n) override;
  // External processes own their randomness; reseeding is a no-op.
  void reseed(std::uint64_t) override {}

 private:
  void spawn();
  void terminate();
  std::string read_line();

  std::string command_;
  int dim_;
  double timeout_seconds_;
  long pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  long lines_read_ = 0;  // protocol line counter for error messages
};

}  // namespace datacopy
