#include "bryc/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace bryc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// monotone cubic Hermite through (0, v1), (1, v2) with neighbours v0, v3
double monotone_cubic(double v0, double v1, double v2, double v3, double s) {
  const double delta = v2 - v1;
  double m1 = 0.5 * (v2 - v0);
  double m2 = 0.5 * (v3 - v1);
  if (delta == 0.0) {
    m1 = 0.0;
    m2 = 0.0;
  } else {
    if (m1 * delta < 0.0) m1 = 0.0;
    if (m2 * delta < 0.0) m2 = 0.0;
    const double a = m1 / delta;
    const double b = m2 / delta;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      m1 = tau * a * delta;
      m2 = tau * b * delta;
    }
  }
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * v1 + (s3 - 2.0 * s2 + s) * m1 + (-2.0 * s3 + 3.0 * s2) * v2 +
         (s3 - s2) * m2;
}

}  // namespace

// ---------------------------------------------------------------------------
// ConditionalQuantiles

ConditionalQuantiles::ConditionalQuantiles(const MehlerKernel& kernel, int y_nodes, int points,
                                           double tol)
    : c_(kernel.marginal().half_width()) {
  if (y_nodes < 4) {
    throw std::invalid_argument("ConditionalQuantiles: need at least 4 nodes");
  }
  h_ = std::numbers::pi / (y_nodes - 1);
  const auto& f = kernel.marginal();
  tables_.reserve(static_cast<std::size_t>(y_nodes));
  for (int j = 0; j < y_nodes; ++j) {
    // x = -c cos t has angle pi - t; the kernel is invariant under
    // (a, b) -> (pi - a, pi - b), so evaluate at (t, pi - b) and keep t unrounded
    const double b_reflected = h_ * (y_nodes - 1 - j);
    tables_.emplace_back(
        c_, [&](double t) { return f.theta_weight(t) * kernel.ratio_theta(t, b_reflected); },
        points, tol);
  }
}

double ConditionalQuantiles::node(int j) const { return c_ * std::cos(h_ * j); }

double ConditionalQuantiles::node_quantile(double u, int j) const {
  return tables_[static_cast<std::size_t>(j)].quantile(u);
}

double ConditionalQuantiles::quantile(double u, double y) const {
  const int last = nodes() - 1;
  const double b = std::acos(std::clamp(y / c_, -1.0, 1.0));
  const double pos = b / h_;
  const int j = std::clamp(static_cast<int>(pos), 0, last - 1);
  const double s = std::clamp(pos - j, 0.0, 1.0);
  const double v1 = node_quantile(u, j);
  const double v2 = node_quantile(u, j + 1);
  if (s == 0.0) return v1;
  // y = c cos b is even in b about 0 and pi, so ghost nodes mirror
  const double v0 = j > 0 ? node_quantile(u, j - 1) : v2;
  const double v3 = j + 2 <= last ? node_quantile(u, j + 2) : v1;
  return std::clamp(monotone_cubic(v0, v1, v2, v3, s), -c_, c_);
}

// ---------------------------------------------------------------------------
// ChainSampler

ChainSampler::ChainSampler(TransitionKernel kernel, MarginalSampler marginal, Classification c)
    : kernel_(std::move(kernel)), marginal_(std::move(marginal)), classification_(std::move(c)) {}

double ChainSampler::draw_initial(CounterStream& stream) const { return marginal_.draw(stream); }

double ChainSampler::step(double x, CounterStream& stream) const {
  const double u = stream.uniform();
  return std::visit(overloaded{
                        [&](const MehlerKernel&) { return conditional_->quantile(u, x); },
                        [&](const GaussianAR1& g) {
                          return g.rho * x + std::sqrt(1.0 - g.rho * g.rho) * normal_quantile(u);
                        },
                        [&](const TwoPointChain& t) { return u < 0.5 * (1.0 + t.rho) ? x : -x; },
                        [&](const ScaledTwoPointChain& t) {
                          return u < 0.5 * (1.0 + t.rho) ? x : -x;
                        },
                    },
                    kernel_);
}

ChainSampler make_sampler(const Classification& c, const SamplerConfig& cfg) {
  if (!exists(c)) {
    if (std::holds_alternative<verdict::OpenLatticeB3>(c)) {
      throw std::invalid_argument("cannot sample " + describe(c) +
                                  ": existence open (B3 lattice problem)");
    }
    throw std::invalid_argument("cannot sample " + describe(c) + ": no such field exists");
  }
  const double rho = cfg.rho;
  if (!(std::abs(rho) < 1.0) || rho == 0.0) {
    throw std::invalid_argument("make_sampler: need 0 < |rho| < 1");
  }

  auto certify = [&](const TransitionKernel& k, const MeasureSpec& spec,
                     std::initializer_list<double> xs) {
    for (double x : xs) {
      const double r = stationarity_residual(k, spec, x);
      if (!(r <= cfg.stationarity_tol)) {
        throw std::invalid_argument("make_sampler: initial law not stationary (residual " +
                                    std::to_string(r) + ")");
      }
    }
  };

  if (const auto* g = std::get_if<verdict::ExistsQGaussian>(&c)) {
    MehlerKernel kernel(rho, g->q, cfg.kernel);
    const MeasureSpec spec = law::QGaussian{g->q};
    const double h = kernel.marginal().half_width();
    certify(kernel, spec, {-0.5 * h, 0.1 * h, 0.7 * h});
    ChainSampler s(kernel, MarginalSampler(spec, cfg.marginal_points), c);
    s.conditional_ = std::make_shared<const ConditionalQuantiles>(
        kernel, cfg.y_nodes, cfg.conditional_points, cfg.table_tol);
    return s;
  }
  if (std::holds_alternative<verdict::ExistsGaussian>(c)) {
    const TransitionKernel kernel = GaussianAR1{rho};
    const MeasureSpec spec = law::StdGaussian{};
    certify(kernel, spec, {-1.0, 0.3});
    return ChainSampler(kernel, MarginalSampler(spec), c);
  }
  if (std::holds_alternative<verdict::ExistsTwoPointSymmetric>(c)) {
    const TransitionKernel kernel = TwoPointChain{rho};
    const MeasureSpec spec = law::TwoPointSym{};
    certify(kernel, spec, {0.0});
    return ChainSampler(kernel, MarginalSampler(spec), c);
  }
  if (!cfg.radial) {
    throw std::invalid_argument("make_sampler: scaled two-point case needs a radial law");
  }
  const TransitionKernel kernel = ScaledTwoPointChain{rho, *cfg.radial};
  const MeasureSpec spec = law::ScaledTwoPoint{*cfg.radial};
  certify(kernel, spec, {0.0});
  return ChainSampler(kernel, MarginalSampler(spec), c);
}

// ---------------------------------------------------------------------------
// Ensembles

unsigned default_workers() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BRYC_THREADS")) {
    unsigned v = 0;
    const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
    if (ec == std::errc() && v > 0) return v;
  }
  return hw;
}

Ensemble sample_ensemble(const ChainSampler& s, std::size_t n_chains, std::size_t n_steps,
                         std::uint64_t master_seed, unsigned workers) {
  if (n_steps < 1) {
    throw std::invalid_argument("sample_ensemble: n_steps must be >= 1");
  }
  Ensemble e;
  e.master_seed = master_seed;
  e.chains.resize(n_chains);

  auto run_chain = [&](std::size_t i) {
    Chain& chain = e.chains[i];
    chain.id = i;
    chain.values.resize(n_steps);
    CounterStream stream(master_seed, i);
    double x = s.draw_initial(stream);
    chain.values[0] = x;
    for (std::size_t t = 1; t < n_steps; ++t) {
      x = s.step(x, stream);
      chain.values[t] = x;
    }
  };

  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n_chains, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_chains; ++i) run_chain(i);
    return e;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n_chains; i = next++) run_chain(i);
    });
  }
  pool.clear();
  return e;
}

void write_csv(const Ensemble& e, std::ostream& out) {
  out << "chain,t,x\n";
  char buf[64];
  for (const Chain& chain : e.chains) {
    for (std::size_t t = 0; t < chain.values.size(); ++t) {
      const auto res = std::to_chars(buf, buf + sizeof buf, chain.values[t],
                                     std::chars_format::general, 17);
      out << chain.id << ',' << t << ',';
      out.write(buf, res.ptr - buf);
      out << '\n';
    }
  }
}

void write_csv(const Ensemble& e, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing: " +
                             std::strerror(errno));
  }
  write_csv(e, out);
  out.flush();
  if (!out) {
    throw std::runtime_error("write to '" + path.string() + "' failed");
  }
}

Ensemble read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || (line != "chain,t,x" && line != "chain,t,x\r")) {
    throw std::runtime_error("csv: expected header 'chain,t,x'");
  }
  Ensemble e;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    std::uint64_t id = 0;
    std::size_t t = 0;
    double x = 0.0;
    auto fail = [&] {
      throw std::runtime_error("csv: malformed row at line " + std::to_string(line_no));
    };
    auto r1 = std::from_chars(p, end, id);
    if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != ',') fail();
    auto r2 = std::from_chars(r1.ptr + 1, end, t);
    if (r2.ec != std::errc() || r2.ptr == end || *r2.ptr != ',') fail();
    auto r3 = std::from_chars(r2.ptr + 1, end, x);
    if (r3.ec != std::errc() || r3.ptr != end) fail();

    if (e.chains.empty() || e.chains.back().id != id) {
      e.chains.push_back(Chain{id, {}});
    }
    Chain& chain = e.chains.back();
    if (t != chain.values.size()) {
      throw std::runtime_error("csv: rows of chain " + std::to_string(id) +
                               " out of order at line " + std::to_string(line_no));
    }
    chain.values.push_back(x);
  }
  for (const Chain& c : e.chains) {
    if (c.values.size() != e.chains.front().values.size()) {
      throw std::runtime_error("csv: chain " + std::to_string(c.id) + " has " +
                               std::to_string(c.values.size()) + " rows, expected " +
                               std::to_string(e.chains.front().values.size()));
    }
  }
  return e;
}

Ensemble read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path.string() + "' for reading: " +
                             std::strerror(errno));
  }
  try {
    return read_csv(in);
  } catch (const std::runtime_error& err) {
    throw std::runtime_error(path.string() + ": " + err.what());
  }
}

}  // namespace bryc
