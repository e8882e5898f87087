#include "bryc/verify.hpp"

#include "bryc/qpoly.hpp"
#include "bryc/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace bryc {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kSingleChainBatches = 10;
constexpr std::uint64_t kBootstrapStream = 0xB0075EEDULL << 32;

struct Span {
  const std::vector<double>* values;
  std::size_t begin;
  std::size_t end;
};

// Batches are the chains themselves; a single chain is cut into contiguous blocks.
std::vector<Span> batches(const Ensemble& e) {
  std::vector<Span> out;
  if (e.chains.size() >= 2) {
    for (const Chain& c : e.chains) out.push_back({&c.values, 0, c.values.size()});
    return out;
  }
  if (e.chains.empty()) return out;
  const auto& v = e.chains.front().values;
  const std::size_t n = v.size();
  for (std::size_t b = 0; b < kSingleChainBatches; ++b) {
    out.push_back({&v, n * b / kSingleChainBatches, n * (b + 1) / kSingleChainBatches});
  }
  return out;
}

// Mean of stat(x, t) over t in [begin + lead, end - lag) for every batch.
std::vector<double> batch_means(const std::vector<Span>& spans, std::size_t lead, std::size_t lag,
                                const std::function<double(const std::vector<double>&, std::size_t)>& stat) {
  std::vector<double> out;
  out.reserve(spans.size());
  for (const Span& s : spans) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = s.begin + lead; t + lag < s.end; ++t) {
      sum += stat(*s.values, t);
      ++count;
    }
    if (count > 0) out.push_back(sum / static_cast<double>(count));
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Entry gate_batches(std::string id, std::string statistic, const std::vector<double>& means,
                   const VerifyOptions& opt) {
  Entry e;
  e.test_id = std::move(id);
  e.statistic = std::move(statistic);
  e.threshold_multiplier = opt.threshold;
  e.estimate = mean_of(means);
  double se = 0.0;
  if (means.size() >= 2) {
    double ss = 0.0;
    for (double m : means) ss += (m - e.estimate) * (m - e.estimate);
    se = std::sqrt(ss / static_cast<double>(means.size() - 1) / static_cast<double>(means.size()));
  }
  e.stderr_ = std::max(se, opt.stderr_floor);
  e.pass = std::abs(e.estimate) <= e.threshold_multiplier * e.stderr_;
  return e;
}

std::vector<Entry> empirical_corr(const Ensemble& e, double rho, int k_max,
                                  const VerifyOptions& opt) {
  const auto spans = batches(e);
  std::vector<Entry> out;
  if (spans.empty()) return out;

  std::vector<double> sq(spans.size());
  std::vector<double> sq_n(spans.size());
  for (std::size_t b = 0; b < spans.size(); ++b) {
    const Span& s = spans[b];
    for (std::size_t t = s.begin; t < s.end; ++t) sq[b] += (*s.values)[t] * (*s.values)[t];
    sq_n[b] = static_cast<double>(s.end - s.begin);
  }

  for (int k = 1; k <= k_max; ++k) {
    const auto lag = static_cast<std::size_t>(k);
    std::vector<double> cross(spans.size());
    std::vector<double> cross_n(spans.size());
    for (std::size_t b = 0; b < spans.size(); ++b) {
      const Span& s = spans[b];
      const auto& v = *s.values;
      for (std::size_t t = s.begin; t + lag < s.end; ++t) cross[b] += v[t] * v[t + lag];
      cross_n[b] = static_cast<double>(s.end - s.begin > lag ? s.end - s.begin - lag : 0);
    }
    auto estimate = [&](const std::vector<std::size_t>& pick) {
      double c = 0.0, cn = 0.0, v = 0.0, vn = 0.0;
      for (std::size_t b : pick) {
        c += cross[b];
        cn += cross_n[b];
        v += sq[b];
        vn += sq_n[b];
      }
      return (cn > 0.0 && v > 0.0) ? (c / cn) / (v / vn) : 0.0;
    };
    std::vector<std::size_t> all(spans.size());
    for (std::size_t b = 0; b < all.size(); ++b) all[b] = b;
    const double target = ipow(rho, k);
    const double point = estimate(all) - target;

    CounterStream stream(e.master_seed, kBootstrapStream + static_cast<std::uint64_t>(k));
    std::vector<std::size_t> pick(spans.size());
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < opt.bootstrap_resamples; ++r) {
      for (auto& p : pick) {
        p = std::min(spans.size() - 1,
                     static_cast<std::size_t>(stream.uniform() * static_cast<double>(spans.size())));
      }
      const double val = estimate(pick);
      sum += val;
      sum2 += val * val;
    }
    const double n = static_cast<double>(std::max(opt.bootstrap_resamples, 2));
    const double var = std::max(0.0, (sum2 - sum * sum / n) / (n - 1.0));

    Entry entry;
    entry.test_id = "corr.lag" + std::to_string(k);
    entry.statistic = "corr(X_t, X_{t+" + std::to_string(k) + "}) - " + fmt(target);
    entry.estimate = point;
    entry.threshold_multiplier = opt.threshold;
    entry.stderr_ = std::max(std::sqrt(var), opt.stderr_floor);
    entry.pass = std::abs(entry.estimate) <= entry.threshold_multiplier * entry.stderr_;
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<Entry> weak_form_residuals(const Ensemble& e, const FieldParams& p, int degree,
                                       const VerifyOptions& opt) {
  if (degree < 0 || degree > 4) {
    throw std::invalid_argument("weak_form_residuals: degree must be in 0..4");
  }
  const auto spans = batches(e);
  const double a = p.rho / (1.0 + p.rho * p.rho);
  std::vector<Entry> out;
  for (int kind = 0; kind < 2; ++kind) {
    for (int total = 0; total <= degree; ++total) {
      for (int i = total; i >= 0; --i) {
        const int j = total - i;
        auto stat = [&](const std::vector<double>& v, std::size_t t) {
          const double x = v[t - 1];
          const double z = v[t];
          const double y = v[t + 1];
          const double g = ipow(x, i) * ipow(y, j);
          if (kind == 0) return (z - a * (x + y)) * g;
          const double q = p.A * (x * x + y * y) + p.B * x * y + p.D * (x + y) + p.C;
          return (z * z - q) * g;
        };
        const std::string mono = "x^" + std::to_string(i) + " y^" + std::to_string(j);
        const std::string id = std::string(kind == 0 ? "weak.lin" : "weak.quad") + "[" +
                               std::to_string(i) + "," + std::to_string(j) + "]";
        const std::string what = kind == 0 ? "E[(X_k - a(x+y)) " + mono + "]"
                                           : "E[(X_k^2 - Q(x,y)) " + mono + "]";
        out.push_back(gate_batches(id, what, batch_means(spans, 1, 1, stat), opt));
      }
    }
  }
  return out;
}

std::vector<Entry> martingale_residuals(const Ensemble& e, double rho, double q, int N, int M,
                                        const VerifyOptions& opt) {
  if (N < 1 || N > 8 || M < 0 || M > 8) {
    throw std::invalid_argument("martingale_residuals: need 1 <= N <= 8 and 0 <= M <= 8");
  }
  const int deg = std::max(N, M);
  const auto stride = static_cast<std::size_t>(deg + 1);
  const auto spans = batches(e);

  // Q_0..Q_deg at every sample, per chain
  std::vector<std::vector<double>> table(e.chains.size());
  for (std::size_t c = 0; c < e.chains.size(); ++c) {
    const auto& v = e.chains[c].values;
    auto& tab = table[c];
    tab.resize(v.size() * stride);
    for (std::size_t t = 0; t < v.size(); ++t) {
      const auto qs = qhermite_all(v[t], q, deg);
      std::copy(qs.begin(), qs.end(), tab.begin() + static_cast<std::ptrdiff_t>(t * stride));
    }
  }
  auto table_of = [&](const std::vector<double>* values) -> const std::vector<double>& {
    for (std::size_t c = 0; c < e.chains.size(); ++c) {
      if (&e.chains[c].values == values) return table[c];
    }
    throw std::logic_error("martingale_residuals: unknown batch");
  };

  std::vector<Entry> out;
  for (int n = 1; n <= N; ++n) {
    const double rn = ipow(rho, n);
    for (int m = 0; m <= M; ++m) {
      std::vector<double> means;
      for (const Span& s : spans) {
        const auto& tab = table_of(s.values);
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t t = s.begin; t + 1 < s.end; ++t) {
          const double now = tab[t * stride + static_cast<std::size_t>(n)];
          const double next = tab[(t + 1) * stride + static_cast<std::size_t>(n)];
          sum += (next - rn * now) * tab[t * stride + static_cast<std::size_t>(m)];
          ++count;
        }
        if (count > 0) means.push_back(sum / static_cast<double>(count));
      }
      const std::string id =
          "mart.n" + std::to_string(n) + ".m" + std::to_string(m);
      const std::string what = "E[(Q_" + std::to_string(n) + "(X_{t+1}) - rho^" +
                               std::to_string(n) + " Q_" + std::to_string(n) + "(X_t)) Q_" +
                               std::to_string(m) + "(X_t)], q=" + fmt(q);
      out.push_back(gate_batches(id, what, means, opt));
    }
  }
  return out;
}

std::vector<Entry> symmetry_checks(const Ensemble& e, const VerifyOptions& opt) {
  const auto spans = batches(e);
  std::vector<Entry> out;
  out.push_back(gate_batches("sym.mean", "E X",
                             batch_means(spans, 0, 0,
                                         [](const std::vector<double>& v, std::size_t t) {
                                           return v[t];
                                         }),
                             opt));
  out.push_back(gate_batches("sym.third", "E X^3",
                             batch_means(spans, 0, 0,
                                         [](const std::vector<double>& v, std::size_t t) {
                                           return v[t] * v[t] * v[t];
                                         }),
                             opt));
  return out;
}

// ---------------------------------------------------------------------------
// Reports

int VerificationReport::n_fail() const {
  return static_cast<int>(std::count_if(tests.begin(), tests.end(),
                                        [](const Entry& e) { return !e.pass; }));
}

std::vector<std::string> VerificationReport::failed_ids() const {
  std::vector<std::string> ids;
  for (const Entry& e : tests) {
    if (!e.pass) ids.push_back(e.test_id);
  }
  return ids;
}

VerificationReport build_report(std::vector<Entry> entries, ReportMeta meta) {
  VerificationReport r;
  r.meta = std::move(meta);
  r.tests = std::move(entries);
  return r;
}

std::string to_json(const VerificationReport& r) {
  ordered_json meta;
  meta["seed"] = r.meta.seed;
  meta["n_chains"] = r.meta.n_chains;
  meta["n_steps"] = r.meta.n_steps;
  meta["params"] = ordered_json{{"rho", r.meta.params.rho},
                                {"A", r.meta.params.A},
                                {"B", r.meta.params.B},
                                {"C", r.meta.params.C},
                                {"D", r.meta.params.D}};
  meta["notes"] = r.meta.notes;

  ordered_json tests = ordered_json::array();
  for (const Entry& e : r.tests) {
    tests.push_back(ordered_json{{"id", e.test_id},
                                 {"statistic", e.statistic},
                                 {"estimate", e.estimate},
                                 {"stderr", e.stderr_},
                                 {"k", e.threshold_multiplier},
                                 {"pass", e.pass}});
  }

  ordered_json doc;
  doc["meta"] = std::move(meta);
  doc["tests"] = std::move(tests);
  doc["summary"] = ordered_json{
      {"n_tests", r.tests.size()}, {"n_fail", r.n_fail()}, {"failed", r.failed_ids()}};
  return doc.dump(2) + "\n";
}

VerificationReport read_report(const std::string& json_text) {
  try {
    const auto doc = ordered_json::parse(json_text);
    VerificationReport r;
    const auto& meta = doc.at("meta");
    r.meta.seed = meta.at("seed").get<std::uint64_t>();
    r.meta.n_chains = meta.at("n_chains").get<std::size_t>();
    r.meta.n_steps = meta.at("n_steps").get<std::size_t>();
    const auto& p = meta.at("params");
    r.meta.params = {p.at("rho").get<double>(), p.at("A").get<double>(), p.at("B").get<double>(),
                     p.at("C").get<double>(), p.at("D").get<double>()};
    if (meta.contains("notes")) r.meta.notes = meta.at("notes").get<std::vector<std::string>>();
    for (const auto& t : doc.at("tests")) {
      Entry e;
      e.test_id = t.at("id").get<std::string>();
      e.statistic = t.value("statistic", std::string{});
      e.estimate = t.at("estimate").get<double>();
      e.stderr_ = t.at("stderr").get<double>();
      e.threshold_multiplier = t.at("k").get<double>();
      e.pass = t.at("pass").get<bool>();
      r.tests.push_back(std::move(e));
    }
    const int n_fail = doc.at("summary").at("n_fail").get<int>();
    if (n_fail != r.n_fail()) {
      throw std::runtime_error("summary.n_fail disagrees with the test entries");
    }
    return r;
  } catch (const nlohmann::json::exception& err) {
    throw std::runtime_error(std::string("report: ") + err.what());
  }
}

}  // namespace bryc
