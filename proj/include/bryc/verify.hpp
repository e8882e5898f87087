#pragma once

// Statistical checks of sampled ensembles against the defining identities.
// Every statistic is averaged per chain; chains are independent, so the
// standard error comes from the spread of the chain means.

#include "bryc/params.hpp"
#include "bryc/simulate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bryc {

struct VerifyOptions {
  double threshold = 4.0;
  /// Statistics with no sampling spread (e.g. X^2 - Q(x, y) on +-1 chains) are
  /// reported with this stderr, so they pass only when numerically zero.
  double stderr_floor = 1e-12;
  int bootstrap_resamples = 400;
};

struct Entry {
  std::string test_id;
  std::string statistic;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double threshold_multiplier = 4.0;
  bool pass = false;
};

/// Gates one statistic: estimate = mean of batch means, stderr their standard
/// error (floored), pass iff |estimate| <= threshold * stderr.
Entry gate_batches(std::string id, std::string statistic, const std::vector<double>& batch_means,
                   const VerifyOptions& opt);

/// rho_hat_k - rho^k for k = 1..k_max; rho_hat_k is the pooled lag-k
/// autocorrelation and the stderr comes from a chain bootstrap.
std::vector<Entry> empirical_corr(const Ensemble& e, double rho, int k_max,
                                  const VerifyOptions& opt = {});

/// E[(X_k - a(x + y)) x^i y^j] and E[(X_k^2 - Q(x, y)) x^i y^j] over interior
/// triples (x, X_k, y) = (X_{k-1}, X_k, X_{k+1}), i + j <= degree (<= 4).
std::vector<Entry> weak_form_residuals(const Ensemble& e, const FieldParams& p, int degree,
                                       const VerifyOptions& opt = {});

/// E[(Q_n(X_{t+1}) - rho^n Q_n(X_t)) Q_m(X_t)] for n = 1..N, m = 0..M (<= 8).
std::vector<Entry> martingale_residuals(const Ensemble& e, double rho, double q, int N, int M,
                                        const VerifyOptions& opt = {});

/// E X and E X^3.
std::vector<Entry> symmetry_checks(const Ensemble& e, const VerifyOptions& opt = {});

struct ReportMeta {
  std::uint64_t seed = 0;
  std::size_t n_chains = 0;
  std::size_t n_steps = 0;
  FieldParams params;
  std::vector<std::string> notes;
};

struct VerificationReport {
  ReportMeta meta;
  std::vector<Entry> tests;

  int n_fail() const;
  std::vector<std::string> failed_ids() const;
};

VerificationReport build_report(std::vector<Entry> entries, ReportMeta meta);

/// {"meta": {...}, "tests": [{"id", "statistic", "estimate", "stderr", "k", "pass"}],
///  "summary": {"n_tests", "n_fail", "failed"}} with a fixed key order.
std::string to_json(const VerificationReport& r);

/// Parses to_json output; throws std::runtime_error on schema violations.
VerificationReport read_report(const std::string& json_text);

}  // namespace bryc
