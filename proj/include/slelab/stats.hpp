#pragma once

// Streaming moment accumulation (Welford) with an associative merge, so
// chunked/parallel accumulation reproduces the serial result exactly enough
// for reporting (merge order is fixed by the caller).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace slelab {

class RunningStat {
 public:
  void add(double x) {
    n_ += 1;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  void merge(const RunningStat& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double d = o.mean_ - mean_;
    const double n = na + nb;
    mean_ += d * nb / n;
    m2_ += o.m2_ + d * d * na * nb / n;
    n_ += o.n_;
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  // Standard error of the sample mean.
  double stderr_mean() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0;
  double m2_ = 0;
};

// A Monte Carlo estimate together with enough metadata to reproduce it.
struct McEstimate {
  double mean = 0;
  double stderr_mean = 0;
  std::uint64_t n = 0;
  std::uint64_t master_seed = 0;
  std::string experiment_id;
};

inline McEstimate make_estimate(const RunningStat& s, std::uint64_t master_seed,
                                std::string experiment_id) {
  McEstimate e;
  e.mean = s.mean();
  e.stderr_mean = s.stderr_mean();
  e.n = s.count();
  e.master_seed = master_seed;
  e.experiment_id = std::move(experiment_id);
  return e;
}

}  // namespace slelab
