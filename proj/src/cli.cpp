#include "bryc/cli.hpp"

#include "bryc/kernel.hpp"
#include "bryc/measure.hpp"
#include "bryc/params.hpp"
#include "bryc/qpoly.hpp"
#include "bryc/simulate.hpp"
#include "bryc/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bryc::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Failure of a parameter vector or of an input file's contents.
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat JSON objects as configuration files: {"rho": 0.5, "chains": 100, ...}.
// CLI11 reads config files only on the top-level app, so every key is routed
// to one subcommand.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::string section) : section_(std::move(section)) {}

  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    ordered_json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        j[name] = opt->results().size() == 1 ? ordered_json(opt->results().front())
                                             : ordered_json(opt->results());
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    ordered_json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_boolean()) {
        item.inputs = {value.get<bool>() ? "true" : "false"};
      } else if (value.is_string()) {
        item.inputs = {value.get<std::string>()};
      } else if (value.is_number()) {
        item.inputs = {value.dump()};
      } else {
        throw CLI::ConversionError("config key '" + key + "' must be a scalar");
      }
      item.parents = {section_};
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  std::string section_;
};

void emit(std::ostream& out, const ordered_json& j) { out << j.dump(2) << "\n"; }

ordered_json params_json(const FieldParams& p) {
  return ordered_json{{"rho", p.rho}, {"A", p.A}, {"B", p.B}, {"C", p.C}, {"D", p.D}};
}

ordered_json verdict_json(const Classification& c) {
  ordered_json j{{"verdict", std::string(verdict_name(c))}, {"detail", describe(c)},
                 {"exists", exists(c)}};
  std::visit(overloaded{
                 [&](const verdict::ExistsQGaussian& v) { j["q"] = v.q; },
                 [&](const verdict::OpenLatticeB3& v) { j["m"] = v.m; },
                 [&](const verdict::NonexistentDegenerateB1& v) { j["caveat"] = v.caveat; },
                 [&](const verdict::ExistsScaledTwoPoint& v) { j["note"] = v.note; },
                 [&](const verdict::ExistsTwoPointSymmetric& v) { j["note"] = v.note; },
                 [&](const verdict::Nonexistent& v) { j["reason"] = v.reason; },
                 [&](const verdict::InvalidParams& v) { j["reason"] = v.reason; },
                 [](const verdict::ExistsGaussian&) {},
             },
             c);
  return j;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

const auto kRho = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) return "rho must be a number";
      return (std::abs(v) < 1.0 && v != 0.0) ? std::string{} : "rho must satisfy 0 < |rho| < 1";
    },
    "0<|RHO|<1");

struct Flags {
  bool json = false;
  FieldParams p{0.5, 0.0, 0.0, 0.0, 0.0};
  std::optional<double> B;
  std::optional<double> q;
  int m_max = 5;
  int n_max = 100;
  int points = 401;
  std::string out;
  std::string in;
  std::string report;
  std::string sample_case;
  std::string radial;
  std::size_t chains = 200;
  std::size_t steps = 5000;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  int degree = 4;
  int N = 4;
  int M = 4;
  int k_max = 5;
  double threshold = 4.0;
};

void add_params(CLI::App* sub, Flags& f) {
  sub->add_option("--rho", f.p.rho, "lag-one correlation")->capture_default_str()->check(kRho);
  sub->add_option("--A", f.p.A, "coefficient of x^2 + y^2")->capture_default_str();
  sub->add_option("--B", f.p.B, "coefficient of x y")->capture_default_str();
  sub->add_option("--C", f.p.C, "constant term")->capture_default_str();
  sub->add_option("--D", f.p.D, "coefficient of x + y")->capture_default_str();
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_classify(const Flags& f, std::ostream& out) {
  const Classification c = classify(f.p);
  if (f.json) {
    ordered_json j{{"command", "classify"}, {"params", params_json(f.p)}};
    j.update(verdict_json(c));
    if (!std::holds_alternative<verdict::InvalidParams>(c)) {
      j["boundary_distance"] = boundary_distance(f.p, f.m_max);
    }
    emit(out, j);
  } else {
    out << verdict_name(c) << "\n";
    const std::string d = describe(c);
    if (d != verdict_name(c)) out << "  " << d << "\n";
  }
  return std::holds_alternative<verdict::InvalidParams>(c) ? kValidation : kOk;
}

int cmd_derive(const Flags& f, std::ostream& out) {
  const double rho = f.p.rho;
  double B = 0.0;
  if (f.q) {
    try {
      B = b_of_q(rho, *f.q);
    } catch (const std::domain_error& e) {
      throw ValidationFailure(e.what());
    }
  } else if (f.B) {
    B = *f.B;
  } else {
    throw CLI::ValidationError("give exactly one of --B or --q");
  }
  const FieldParams p = mystic_params(rho, B);
  const DerivedParams d = derive(p);
  const Classification c = classify(p);
  if (f.json) {
    ordered_json j{{"command", "derive"}, {"params", params_json(p)}, {"a", d.a}, {"R", d.R}};
    j["q"] = d.q ? ordered_json(*d.q) : ordered_json(nullptr);
    j["mystic_residual"] = d.mystic_residual;
    j.update(verdict_json(c));
    emit(out, j);
  } else {
    out << "rho=" << num(p.rho) << " A=" << num(p.A) << " B=" << num(p.B) << " C=" << num(p.C)
        << " D=" << num(p.D) << "\n";
    out << "a=" << num(d.a) << " R=" << num(d.R) << " q=" << (d.q ? num(*d.q) : "undefined")
        << "\n";
    out << describe(c) << "\n";
  }
  return std::holds_alternative<verdict::InvalidParams>(c) ? kValidation : kOk;
}

int cmd_boundary(const Flags& f, std::ostream& out) {
  const Boundaries b = boundary_values(f.p.rho, f.m_max);
  if (f.json) {
    emit(out, ordered_json{{"command", "boundary"},
                           {"rho", f.p.rho},
                           {"B1", b.B1},
                           {"B2_sup", b.B2_sup},
                           {"B3", b.B3}});
  } else {
    out << "B1 = " << num(b.B1) << "\n";
    out << "B2 = (0, " << num(b.B2_sup) << ")\n";
    for (std::size_t m = 0; m < b.B3.size(); ++m) {
      out << "B3[m=" << m + 1 << "] = " << num(b.B3[m]) << "\n";
    }
  }
  return kOk;
}

int cmd_coeffs(const Flags& f, std::ostream& out) {
  if (const auto v = validate(f.p); !v) throw ValidationFailure(v.violation);
  RegressionCoeffs rc;
  try {
    rc = regression_coeffs(f.p);
  } catch (const std::domain_error& e) {
    throw ValidationFailure(e.what());
  }
  const ConsistencyResiduals r = consistency_residuals(f.p);
  if (f.json) {
    emit(out, ordered_json{{"command", "coeffs"},
                           {"params", params_json(f.p)},
                           {"alpha1", rc.alpha1},
                           {"alpha2", rc.alpha2},
                           {"beta1", rc.beta1},
                           {"beta2", rc.beta2},
                           {"gamma1", rc.gamma1},
                           {"gamma2", rc.gamma2},
                           {"r1", r.r1},
                           {"r2", r.r2},
                           {"r3", r.r3},
                           {"drift_constraint", r.drift_constraint},
                           {"mystic_constraint", r.mystic_constraint}});
  } else {
    out << "alpha1=" << num(rc.alpha1) << " beta1=" << num(rc.beta1) << " gamma1=" << num(rc.gamma1)
        << "\n";
    out << "alpha2=" << num(rc.alpha2) << " beta2=" << num(rc.beta2) << " gamma2=" << num(rc.gamma2)
        << "\n";
    out << "r1=" << num(r.r1) << " r2=" << num(r.r2) << " r3=" << num(r.r3) << "\n";
    out << "drift_constraint=" << num(r.drift_constraint)
        << " mystic_constraint=" << num(r.mystic_constraint) << "\n";
  }
  return kOk;
}

int cmd_favard(const Flags& f, std::ostream& out) {
  const FavardVerdict v = favard_scan(f.p.rho, *f.q, f.n_max);
  ordered_json j{{"command", "favard"}, {"rho", f.p.rho}, {"q", *f.q}, {"n_max", f.n_max}};
  std::string text;
  std::visit(overloaded{
                 [&](const favard::AllPositive&) {
                   j["verdict"] = "AllPositive";
                   text = "AllPositive up to n=" + std::to_string(f.n_max);
                 },
                 [&](const favard::TerminatesAt& t) {
                   j["verdict"] = "TerminatesAt";
                   j["n"] = t.n0;
                   j["lattice_m"] = t.m ? ordered_json(*t.m) : ordered_json(nullptr);
                   text = "TerminatesAt n=" + std::to_string(t.n0);
                   if (t.m) text += " (lattice m=" + std::to_string(*t.m) + ")";
                 },
                 [&](const favard::FailsAt& t) {
                   j["verdict"] = "FailsAt";
                   j["n"] = t.n0;
                   text = "FailsAt n=" + std::to_string(t.n0);
                 },
             },
             v);
  if (f.json) {
    emit(out, j);
  } else {
    out << text << "\n";
  }
  return kOk;
}

int cmd_density(const Flags& f, std::ostream& out) {
  const double q = *f.q;
  if (!(q > -1.0 && q <= 1.0)) throw ValidationFailure("density needs -1 < q <= 1");
  const MeasureSpec spec = q == 1.0 ? MeasureSpec{law::StdGaussian{}} : law::QGaussian{q};
  const CdfTable table = cdf_table(spec);
  const double h = q == 1.0 ? 6.0 : QGaussDensity(q).half_width();

  std::ostringstream csv;
  csv << "x,density,cdf\n";
  char buf[3][64];
  for (int i = 0; i < f.points; ++i) {
    const double x = -h + 2.0 * h * i / (f.points - 1);
    const double vals[3] = {x, density(spec, x), table.cdf(x)};
    for (int k = 0; k < 3; ++k) {
      const auto r = std::to_chars(buf[k], buf[k] + 64, vals[k], std::chars_format::general, 17);
      csv.write(buf[k], r.ptr - buf[k]);
      csv << (k < 2 ? ',' : '\n');
    }
  }
  if (!f.out.empty() && f.out != "-") {
    std::ofstream file(f.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + f.out + "' for writing");
    file << csv.str();
  } else if (!f.json) {
    out << csv.str();
  }
  if (f.json) {
    emit(out, ordered_json{{"command", "density"},
                           {"q", q},
                           {"points", f.points},
                           {"support", ordered_json::array({-h, h})},
                           {"out", f.out.empty() ? "-" : f.out}});
  }
  return kOk;
}

int cmd_kernel_check(const Flags& f, std::ostream& out) {
  const double rho = f.p.rho;
  const double q = *f.q;
  if (!(q > -1.0 && q <= 1.0)) throw ValidationFailure("kernel-check needs -1 < q <= 1");
  constexpr double kTol = 1e-6;
  const bool gaussian = q == 1.0;
  const TransitionKernel k =
      gaussian ? TransitionKernel{GaussianAR1{rho}} : TransitionKernel{MehlerKernel(rho, q)};
  const MeasureSpec spec = stationary_law(k);
  const double h = gaussian ? 2.0 : QGaussDensity(q).half_width();
  const double ys[] = {-0.8 * h, -0.3 * h, 0.0, 0.45 * h, 0.9 * h};

  double eigen = 0.0, stat = 0.0, ck = 0.0;
  for (double y : ys) {
    for (int n = 0; n <= 8; ++n) eigen = std::max(eigen, eigen_residual(k, n, y));
    stat = std::max(stat, stationarity_residual(k, spec, y));
  }
  if (const auto* m = std::get_if<MehlerKernel>(&k)) {
    for (double x : {-0.6 * h, 0.2 * h, 0.7 * h}) {
      for (double y : {-0.5 * h, 0.4 * h}) ck = std::max(ck, chapman_kolmogorov_residual(*m, x, y));
    }
  }
  const bool pass = eigen <= kTol && stat <= kTol && ck <= kTol;
  if (f.json) {
    emit(out, ordered_json{{"command", "kernel-check"},
                           {"rho", rho},
                           {"q", q},
                           {"eigen_residual", eigen},
                           {"stationarity_residual", stat},
                           {"chapman_kolmogorov_residual", ck},
                           {"tolerance", kTol},
                           {"pass", pass}});
  } else {
    out << "eigen_residual (n<=8)       " << num(eigen) << "\n";
    out << "stationarity_residual       " << num(stat) << "\n";
    out << "chapman_kolmogorov_residual " << num(ck) << "\n";
    out << (pass ? "PASS" : "FAIL") << " at tolerance " << num(kTol) << "\n";
  }
  return pass ? kOk : kVerification;
}

int cmd_sample(const Flags& f, std::ostream& out, std::ostream& err) {
  const double rho = f.p.rho;
  SamplerConfig cfg;
  cfg.rho = rho;
  Classification c;
  FieldParams p;
  std::string label;
  if (f.q) {
    const double q = *f.q;
    p = mystic_params(rho, b_of_q(rho, q));
    c = classify(p);
    label = "q=" + num(q);
  } else if (f.sample_case == "gaussian") {
    p = mystic_params(rho, b_of_q(rho, 1.0));
    c = verdict::ExistsGaussian{};
    label = "gaussian";
  } else if (f.sample_case == "two-point") {
    p = mystic_params(rho, 0.0);
    c = classify(p);
    label = "two-point";
  } else if (f.sample_case == "scaled-two-point") {
    p = {rho, 0.5, 0.0, 0.0, 0.0};
    c = classify(p);
    label = "scaled-two-point";
  } else {
    throw CLI::ValidationError("give exactly one of --q or --case");
  }
  if (!f.radial.empty()) {
    if (f.sample_case != "scaled-two-point") {
      throw CLI::ValidationError("--radial", "only valid with --case scaled-two-point");
    }
    try {
      cfg.radial = RadialLaw::parse(f.radial);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("--radial", e.what());
    }
  } else if (f.sample_case == "scaled-two-point") {
    throw CLI::ValidationError("--radial", "required with --case scaled-two-point");
  }

  ChainSampler sampler = [&] {
    try {
      return make_sampler(c, cfg);
    } catch (const std::invalid_argument& e) {
      throw ValidationFailure(e.what());
    }
  }();
  const Ensemble e = sample_ensemble(sampler, f.chains, f.steps, f.seed,
                                     f.threads == 0 ? default_workers() : f.threads);
  const bool to_stdout = f.out.empty() || f.out == "-";
  if (to_stdout) {
    write_csv(e, out);
  } else {
    write_csv(e, std::filesystem::path(f.out));
  }
  if (f.json) {
    ordered_json j{{"command", "sample"}, {"case", label}, {"params", params_json(p)}};
    j.update(verdict_json(c));
    j["chains"] = f.chains;
    j["steps"] = f.steps;
    j["seed"] = f.seed;
    j["out"] = to_stdout ? "-" : f.out;
    emit(to_stdout ? err : out, j);
  }
  return kOk;
}

int cmd_verify(const Flags& f, std::ostream& out) {
  if (const auto v = validate(f.p); !v) throw ValidationFailure(v.violation);
  Ensemble e = read_csv(std::filesystem::path(f.in));
  if (e.chains.empty()) throw ValidationFailure(f.in + ": no samples");
  e.master_seed = f.seed;

  VerifyOptions opt;
  opt.threshold = f.threshold;
  ReportMeta meta;
  meta.seed = f.seed;
  meta.n_chains = e.chains.size();
  meta.n_steps = e.steps();
  meta.params = f.p;

  std::vector<Entry> tests = weak_form_residuals(e, f.p, f.degree, opt);
  const DerivedParams d = derive(f.p);
  if (d.mystic_residual <= 1e-9 && d.q && *d.q >= -1.0 && *d.q <= 1.0) {
    auto m = martingale_residuals(e, f.p.rho, *d.q, f.N, f.M, opt);
    tests.insert(tests.end(), m.begin(), m.end());
  } else {
    meta.notes.push_back(
        "martingale tests skipped: the mystic constraint fails, so the q-Hermite "
        "eigenfunctions are not defined for these parameters");
  }
  auto corr = empirical_corr(e, f.p.rho, f.k_max, opt);
  tests.insert(tests.end(), corr.begin(), corr.end());
  auto sym = symmetry_checks(e, opt);
  tests.insert(tests.end(), sym.begin(), sym.end());

  const VerificationReport report = build_report(std::move(tests), std::move(meta));
  const std::string json = to_json(report);
  if (!f.report.empty()) {
    std::ofstream file(f.report, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + f.report + "' for writing");
    file << json;
  }
  if (f.json) {
    out << json;
  } else {
    out << report.tests.size() - static_cast<std::size_t>(report.n_fail()) << "/"
        << report.tests.size() << " tests pass\n";
    for (const auto& id : report.failed_ids()) out << "FAIL " << id << "\n";
    for (const auto& n : report.meta.notes) out << "note: " << n << "\n";
  }
  return report.n_fail() > 0 ? kVerification : kOk;
}

int cmd_report(const Flags& f, std::ostream& out) {
  std::ifstream file(f.in, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + f.in + "' for reading");
  std::stringstream buf;
  buf << file.rdbuf();
  ordered_json doc;
  try {
    doc = ordered_json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationFailure(f.in + ": not JSON: " + e.what());
  }
  if (!doc.contains("tests")) {
    // output of another subcommand: echo it in canonical form
    emit(out, doc);
    return kOk;
  }
  VerificationReport r;
  try {
    r = read_report(buf.str());
  } catch (const std::runtime_error& e) {
    throw ValidationFailure(f.in + ": " + e.what());
  }
  if (f.json) {
    out << to_json(r);
  } else {
    out << "seed=" << r.meta.seed << " chains=" << r.meta.n_chains << " steps=" << r.meta.n_steps
        << "\n";
    for (const Entry& e : r.tests) {
      out << (e.pass ? "pass " : "FAIL ") << e.test_id << "  est=" << num(e.estimate)
          << " se=" << num(e.stderr_) << "\n";
    }
    out << r.n_fail() << " of " << r.tests.size() << " tests fail\n";
  }
  return r.n_fail() > 0 ? kVerification : kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stationary fields with linear regressions and quadratic conditional variances"};
  app.name("bryc");
  app.require_subcommand(1);
  Flags f;

  auto* classify_cmd = app.add_subcommand("classify", "classify a parameter vector");
  add_params(classify_cmd, f);
  classify_cmd->add_option("--mmax", f.m_max, "lattice orders used for boundary_distance")
      ->capture_default_str()
      ->check(CLI::Range(1, 64));

  auto* derive_cmd = app.add_subcommand("derive", "fill A, C from (rho, B) or (rho, q)");
  derive_cmd->add_option("--rho", f.p.rho, "lag-one correlation")->capture_default_str()->check(kRho);
  auto* derive_b = derive_cmd->add_option("--B", f.B, "coefficient of x y");
  auto* derive_q = derive_cmd->add_option("--q", f.q, "q parameter");
  derive_b->excludes(derive_q);

  auto* boundary_cmd = app.add_subcommand("boundary", "B1, the B2 interval and the B3 lattice");
  boundary_cmd->add_option("--rho", f.p.rho, "lag-one correlation")->capture_default_str()->check(kRho);
  boundary_cmd->add_option("--mmax", f.m_max, "largest lattice order")
      ->capture_default_str()
      ->check(CLI::Range(1, 64));

  auto* coeffs_cmd = app.add_subcommand("coeffs", "one- and two-step regression coefficients");
  add_params(coeffs_cmd, f);

  auto* favard_cmd = app.add_subcommand("favard", "positivity scan of the conditional recurrence");
  favard_cmd->add_option("--rho", f.p.rho, "lag-one correlation")->capture_default_str()->check(kRho);
  favard_cmd->add_option("--q", f.q, "q parameter")->required();
  favard_cmd->add_option("--nmax", f.n_max, "number of coefficients scanned")
      ->capture_default_str()
      ->check(CLI::Range(1, 10000));

  auto* density_cmd = app.add_subcommand("density", "q-Gaussian density and CDF as CSV");
  density_cmd->add_option("--q", f.q, "q in (-1, 1]; 1 is the standard normal")->required();
  density_cmd->add_option("--out", f.out, "CSV path, '-' for stdout")->capture_default_str();
  density_cmd->add_option("--points", f.points, "grid points")
      ->capture_default_str()
      ->check(CLI::Range(2, 1000000));

  auto* kernel_cmd = app.add_subcommand("kernel-check", "eigen, stationarity and two-step checks");
  kernel_cmd->add_option("--rho", f.p.rho, "lag-one correlation")->capture_default_str()->check(kRho);
  kernel_cmd->add_option("--q", f.q, "q in (-1, 1]")->required();

  auto* sample_cmd = app.add_subcommand("sample", "sample stationary chains to CSV");
  sample_cmd->add_option("--rho", f.p.rho, "lag-one correlation")->capture_default_str()->check(kRho);
  auto* sample_q = sample_cmd->add_option("--q", f.q, "q-Gaussian chain with this q");
  auto* sample_case = sample_cmd->add_option("--case", f.sample_case, "named case")
                          ->check(CLI::IsMember({"gaussian", "two-point", "scaled-two-point"}));
  sample_q->excludes(sample_case);
  sample_cmd->add_option("--radial", f.radial, "radial law 'v:p,...' for scaled-two-point");
  sample_cmd->add_option("--chains", f.chains, "number of chains")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 32));
  sample_cmd->add_option("--steps", f.steps, "values per chain, including the initial draw")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 40));
  sample_cmd->add_option("--seed", f.seed, "master seed")->capture_default_str();
  sample_cmd->add_option("--out", f.out, "CSV path, '-' for stdout")->capture_default_str();
  sample_cmd->add_option("--threads", f.threads, "workers, 0 = BRYC_THREADS or all cores")
      ->capture_default_str();
  sample_cmd->fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>("sample"));
  app.set_config("--config", "", "JSON object of sample options (bryc sample --config FILE)");

  auto* verify_cmd = app.add_subcommand("verify", "statistical checks of a sampled CSV");
  verify_cmd->add_option("--in", f.in, "CSV produced by sample")->required();
  add_params(verify_cmd, f);
  verify_cmd->add_option("--report", f.report, "write the JSON report here");
  verify_cmd->add_option("--seed", f.seed, "seed of the bootstrap stream")->capture_default_str();
  verify_cmd->add_option("--degree", f.degree, "max total degree of weak-form test functions")
      ->capture_default_str()
      ->check(CLI::Range(0, 4));
  verify_cmd->add_option("--N", f.N, "largest eigenfunction degree")
      ->capture_default_str()
      ->check(CLI::Range(1, 8));
  verify_cmd->add_option("--M", f.M, "largest test-polynomial degree")
      ->capture_default_str()
      ->check(CLI::Range(0, 8));
  verify_cmd->add_option("--kmax", f.k_max, "largest correlation lag")
      ->capture_default_str()
      ->check(CLI::Range(1, 100));
  verify_cmd->add_option("--threshold", f.threshold, "gate multiple of the standard error")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* report_cmd = app.add_subcommand("report", "summarize a JSON report");
  report_cmd->add_option("--in", f.in, "JSON file")->required();

  for (auto* sub : app.get_subcommands({})) {
    sub->add_flag("--json", f.json, "machine-readable output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "bryc: " << e.what() << "\n";
    err << "hint: run 'bryc --help' or 'bryc <subcommand> --help'\n";
    return kUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    if (name == "classify") return cmd_classify(f, out);
    if (name == "derive") return cmd_derive(f, out);
    if (name == "boundary") return cmd_boundary(f, out);
    if (name == "coeffs") return cmd_coeffs(f, out);
    if (name == "favard") return cmd_favard(f, out);
    if (name == "density") return cmd_density(f, out);
    if (name == "kernel-check") return cmd_kernel_check(f, out);
    if (name == "sample") return cmd_sample(f, out, err);
    if (name == "verify") return cmd_verify(f, out);
    if (name == "report") return cmd_report(f, out);
  } catch (const CLI::ParseError& e) {
    err << "bryc " << name << ": " << e.what() << "\n";
    err << "hint: run 'bryc " << name << " --help'\n";
    return kUsage;
  } catch (const ValidationFailure& e) {
    err << "bryc " << name << ": " << e.what() << "\n";
    return kValidation;
  } catch (const std::invalid_argument& e) {
    err << "bryc " << name << ": " << e.what() << "\n";
    return kValidation;
  } catch (const std::domain_error& e) {
    err << "bryc " << name << ": " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "bryc " << name << ": " << e.what() << "\n";
    err << "hint: check file paths and permissions\n";
    return kUsage;
  }
  return kUsage;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace bryc::cli
