#pragma once

// Seeded, reproducible sampling of stationary chains.

#include "bryc/kernel.hpp"
#include "bryc/measure.hpp"
#include "bryc/params.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace bryc {

struct SamplerConfig {
  double rho = 0.5;
  /// Required for ExistsScaledTwoPoint.
  std::optional<RadialLaw> radial;
  /// Cosine-spaced conditioning nodes of the q-Gaussian conditional quantile grid.
  int y_nodes = 129;
  int conditional_points = 1025;
  int marginal_points = 4097;
  double table_tol = 1e-11;
  KernelOptions kernel;
  double stationarity_tol = 1e-6;
};

/// Conditional quantiles x(u, y) of a Mehler kernel. One CDF table per node
/// y_j = c cos(pi j / (J-1)); between nodes the quantile is interpolated in the
/// angle of y by a monotone (Fritsch-Carlson limited) cubic Hermite.
class ConditionalQuantiles {
 public:
  ConditionalQuantiles(const MehlerKernel& kernel, int y_nodes, int points, double tol);

  double quantile(double u, double y) const;
  /// Exact table inversion at node j.
  double node_quantile(double u, int j) const;
  double node(int j) const;
  int nodes() const { return static_cast<int>(tables_.size()); }

 private:
  double c_;
  double h_;
  std::vector<CdfTable> tables_;
};

class ChainSampler {
 public:
  const TransitionKernel& kernel() const { return kernel_; }
  const MeasureSpec& initial() const { return marginal_.spec(); }
  const Classification& classification() const { return classification_; }
  double rho() const { return kernel_rho(kernel_); }

  double draw_initial(CounterStream& stream) const;
  /// One transition from state x; consumes exactly one uniform.
  double step(double x, CounterStream& stream) const;

 private:
  friend ChainSampler make_sampler(const Classification& c, const SamplerConfig& cfg);
  ChainSampler(TransitionKernel kernel, MarginalSampler marginal, Classification c);

  TransitionKernel kernel_;
  MarginalSampler marginal_;
  Classification classification_;
  std::shared_ptr<const ConditionalQuantiles> conditional_;
};

/// Dispatches an Exists* verdict to its kernel. Throws std::invalid_argument for
/// every other verdict, and when the initial law fails the stationarity check.
ChainSampler make_sampler(const Classification& c, const SamplerConfig& cfg);

struct Chain {
  std::uint64_t id = 0;
  std::vector<double> values;
};

struct Ensemble {
  std::uint64_t master_seed = 0;
  std::vector<Chain> chains;

  std::size_t steps() const { return chains.empty() ? 0 : chains.front().values.size(); }
};

/// Worker count from BRYC_THREADS, else the hardware concurrency.
unsigned default_workers();

/// Chain i uses the counter stream (master_seed, i) and starts from a stationary
/// draw; the result does not depend on the worker count.
Ensemble sample_ensemble(const ChainSampler& s, std::size_t n_chains, std::size_t n_steps,
                         std::uint64_t master_seed, unsigned workers = 0);

/// Header `chain,t,x`, rows ordered by (chain, t), 17 significant digits.
void write_csv(const Ensemble& e, std::ostream& out);
void write_csv(const Ensemble& e, const std::filesystem::path& path);

Ensemble read_csv(std::istream& in);
Ensemble read_csv(const std::filesystem::path& path);

}  // namespace bryc
