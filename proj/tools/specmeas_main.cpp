// specmeas CLI: reproducible sampling, theorem-suite verification, and LDP
// tail experiments. Every output file embeds the full run configuration and
// the code version; reruns with the same seed are byte-identical.
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure,
// 4 statistical failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "specmeas/json_io.hpp"
#include "specmeas/ldp.hpp"
#include "specmeas/matrix_models.hpp"
#include "specmeas/samplers.hpp"
#include "specmeas/suites.hpp"
#include "specmeas/version.hpp"

namespace {

using specmeas::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitStatistical = 4;

struct RunConfig {
  std::string command;
  std::string ensemble;
  std::string suite;
  std::string f_name = "re-z";
  std::uint64_t seed = 0;
  long long samples = 0;
  int n = 0;
  std::vector<int> n_list;
  double beta = 2.0;
  double a = 1.0;
  double b = 1.0;
  int bizth_case = 1;
  double x = 0.0;
  double alpha = 1e-3;
  int grid_size = 4096;
  std::string out;
  std::string format = "json";
  bool negative_control = false;

  json to_json() const {
    json j{{"command", command},    {"seed", seed},
           {"samples", samples},    {"alpha", alpha},
           {"format", format},      {"version", specmeas::kVersion}};
    if (!ensemble.empty()) j["ensemble"] = ensemble;
    if (!suite.empty()) j["suite"] = suite;
    if (command == "ldp") {
      j["f"] = f_name;
      j["x"] = x;
      j["n_list"] = n_list;
      j["grid_size"] = grid_size;
    }
    if (n > 0) j["n"] = n;
    j["beta"] = beta;
    j["a"] = a;
    j["b"] = b;
    if (ensemble == "bizth") j["case"] = bizth_case;
    if (negative_control) j["negative_control"] = true;
    return j;
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

int run_sample(const RunConfig& cfg) {
  specmeas::RngStream rng(cfg.seed);
  json records = json::array();
  std::ostringstream csv;

  const bool circle = cfg.ensemble == "cbe" || cfg.ensemble == "sun" ||
                      cfg.ensemble == "so2n" || cfg.ensemble == "jtilde" ||
                      cfg.ensemble == "cue-matrix" || cfg.ensemble == "unif2";
  if (circle)
    csv << "draw,atom,angle,weight\n";
  else if (cfg.ensemble == "jacobi" || cfg.ensemble == "bizth")
    csv << "draw,atom,point,weight\n";
  else
    csv << "draw,k,re,im\n";

  for (long long s = 0; s < cfg.samples; ++s) {
    json rec{{"index", s}};
    if (cfg.ensemble == "cbe" || cfg.ensemble == "sun" ||
        cfg.ensemble == "so2n" || cfg.ensemble == "jtilde") {
      specmeas::CircleSample cs =
          cfg.ensemble == "cbe"
              ? specmeas::sample_cbe_spectral(rng, cfg.n, cfg.beta)
          : cfg.ensemble == "sun" ? specmeas::sample_sun_spectral(rng, cfg.n)
          : cfg.ensemble == "so2n"
              ? specmeas::sample_so2n_spectral(rng, cfg.n)
              : specmeas::sample_jtilde_spectral(rng, cfg.n, cfg.beta, cfg.a,
                                                 cfg.b);
      rec["measure"] = specmeas::to_json(cs.measure);
      rec["coefficients"] = specmeas::to_json(cs.coefficients);
      for (std::size_t k = 0; k < cs.measure.size(); ++k)
        csv << s << ',' << k << ',' << cs.measure.angles()[k] << ','
            << cs.measure.weights()[k] << '\n';
    } else if (cfg.ensemble == "cue-matrix") {
      specmeas::CircleAtomicMeasure mu =
          specmeas::sample_cue_matrix_spectral(rng, cfg.n);
      rec["measure"] = specmeas::to_json(mu);
      for (std::size_t k = 0; k < mu.size(); ++k)
        csv << s << ',' << k << ',' << mu.angles()[k] << ','
            << mu.weights()[k] << '\n';
    } else if (cfg.ensemble == "unif2") {
      specmeas::CircleAtomicMeasure mu =
          specmeas::sample_unif2_spectral(rng, cfg.n);
      rec["measure"] = specmeas::to_json(mu);
      for (std::size_t k = 0; k < mu.size(); ++k)
        csv << s << ',' << k << ',' << mu.angles()[k] << ','
            << mu.weights()[k] << '\n';
    } else if (cfg.ensemble == "jacobi") {
      specmeas::IntervalAtomicMeasure gamma =
          specmeas::sample_jacobi_gamma(rng, cfg.n, cfg.beta, cfg.a, cfg.b);
      rec["measure"] = specmeas::to_json(gamma);
      for (std::size_t k = 0; k < gamma.size(); ++k)
        csv << s << ',' << k << ',' << gamma.points()[k] << ','
            << gamma.weights()[k] << '\n';
    } else if (cfg.ensemble == "bizth") {
      specmeas::IntervalAtomicMeasure gamma =
          specmeas::sample_bizth(rng, cfg.bizth_case, cfg.n);
      rec["measure"] = specmeas::to_json(gamma);
      for (std::size_t k = 0; k < gamma.size(); ++k)
        csv << s << ',' << k << ',' << gamma.points()[k] << ','
            << gamma.weights()[k] << '\n';
    } else if (cfg.ensemble == "uniform-circle") {
      specmeas::MomentVectorT t =
          specmeas::sample_uniform_moments_circle(rng, cfg.n);
      std::vector<double> re, im;
      for (const specmeas::Complex& z : t.entries) {
        re.push_back(z.real());
        im.push_back(z.imag());
      }
      rec["moments_re"] = re;
      rec["moments_im"] = im;
      for (std::size_t k = 0; k < re.size(); ++k)
        csv << s << ',' << (k + 1) << ',' << re[k] << ',' << im[k] << '\n';
    } else if (cfg.ensemble == "uniform-interval") {
      specmeas::MomentVectorI m =
          specmeas::sample_uniform_moments_interval(rng, cfg.n);
      rec["moments"] = m.entries;
      for (std::size_t k = 0; k < m.entries.size(); ++k)
        csv << s << ',' << (k + 1) << ',' << m.entries[k] << ",0\n";
    } else {
      std::cerr << "unknown ensemble: " << cfg.ensemble << '\n';
      return kExitConfig;
    }
    records.push_back(std::move(rec));
  }

  json doc{{"config", cfg.to_json()}, {"records", records}};
  write_file(cfg.out, doc.dump(2) + "\n");
  if (cfg.format == "csv") write_file(cfg.out + ".csv", csv.str());
  return kExitOk;
}

int run_verify(const RunConfig& cfg) {
  specmeas::RngStream rng(cfg.seed);
  std::vector<specmeas::TestReport> reports;
  const int samples = static_cast<int>(cfg.samples);
  const bool nc = cfg.negative_control;

  if (cfg.suite == "theorem-c")
    reports = specmeas::suites::suite_theorem_c(rng, cfg.n, samples, cfg.alpha, nc);
  else if (cfg.suite == "cross-validation")
    reports = specmeas::suites::suite_cross_validation(rng, cfg.n, samples,
                                                       cfg.alpha, nc);
  else if (cfg.suite == "uniform-moments-circle")
    reports = specmeas::suites::suite_uniform_moments_circle(rng, cfg.n, samples,
                                                             cfg.alpha, nc);
  else if (cfg.suite == "uniform-moments-interval")
    reports = specmeas::suites::suite_uniform_moments_interval(
        rng, cfg.n, samples, cfg.alpha, nc);
  else if (cfg.suite == "so2n")
    reports = specmeas::suites::suite_so2n(rng, cfg.n, samples, cfg.alpha, nc);
  else if (cfg.suite == "jacobi-oneof")
    reports = specmeas::suites::suite_jacobi_oneof(rng, cfg.n, cfg.beta,
                                                   samples, cfg.alpha, nc);
  else if (cfg.suite == "bizth")
    reports = specmeas::suites::suite_bizth(rng, cfg.bizth_case, cfg.n, samples,
                                            cfg.alpha, nc);
  else if (cfg.suite == "unif2")
    reports = specmeas::suites::suite_unif2(rng, cfg.n, samples, cfg.alpha, nc);
  else if (cfg.suite == "eta")
    reports = specmeas::suites::suite_eta(rng, samples, cfg.alpha, nc);
  else if (cfg.suite == "sun")
    reports = specmeas::suites::suite_sun(rng, cfg.n, samples, cfg.alpha, nc);
  else if (cfg.suite == "cbe-weights")
    reports = specmeas::suites::suite_cbe_weights(rng, cfg.n, cfg.beta, samples,
                                                  cfg.alpha, nc);
  else {
    std::cerr << "unknown suite: " << cfg.suite << '\n';
    return kExitConfig;
  }

  json jreports = json::array();
  bool all_pass = true;
  std::ostringstream csv;
  csv << "name,statistic,p_value,sample_size,alpha,pass\n";
  for (const specmeas::TestReport& r : reports) {
    jreports.push_back(specmeas::to_json(r));
    csv << r.name << ',' << r.statistic << ',' << r.p_value << ','
        << r.sample_size << ',' << r.alpha << ',' << (r.pass ? 1 : 0) << '\n';
    all_pass = all_pass && r.pass;
    std::cout << (r.pass ? "pass " : "FAIL ") << r.name
              << "  p=" << r.p_value << '\n';
  }
  json doc{{"config", cfg.to_json()},
           {"reports", jreports},
           {"all_pass", all_pass}};
  if (!cfg.out.empty()) {
    write_file(cfg.out, doc.dump(2) + "\n");
    if (cfg.format == "csv") write_file(cfg.out + ".csv", csv.str());
  }
  return all_pass ? kExitOk : kExitStatistical;
}

int run_ldp(const RunConfig& cfg) {
  specmeas::RngStream rng(cfg.seed);
  specmeas::EnsembleSpec spec;
  if (cfg.ensemble == "cbe")
    spec.family = specmeas::EnsembleFamily::CBetaE;
  else if (cfg.ensemble == "jacobi")
    spec.family = specmeas::EnsembleFamily::Jacobi;
  else {
    std::cerr << "ldp supports ensembles: cbe, jacobi\n";
    return kExitConfig;
  }
  spec.beta = cfg.beta;
  spec.a = cfg.a;
  spec.b = cfg.b;

  specmeas::TestFunction f =
      cfg.f_name == "re-z"
          ? specmeas::TestFunction::re_z(cfg.grid_size)
          : specmeas::TestFunction::identity_x(cfg.grid_size);
  if (cfg.f_name != "re-z" && cfg.f_name != "x") {
    std::cerr << "unknown test function: " << cfg.f_name << '\n';
    return kExitConfig;
  }

  const long long per_n =
      cfg.samples / static_cast<long long>(cfg.n_list.size());
  specmeas::RateEstimate est =
      specmeas::mc_tail(rng, spec, f, cfg.x, cfg.n_list, per_n);

  json doc{{"config", cfg.to_json()}, {"estimate", specmeas::to_json(est)}};
  write_file(cfg.out, doc.dump(2) + "\n");

  std::ostringstream csv;
  csv << "inv_N,rate_estimate\n";
  for (const specmeas::RatePoint& p : est.points)
    if (!p.dropped) csv << (1.0 / p.N) << ',' << p.rate << '\n';
  write_file(cfg.out + ".csv", csv.str());

  std::cout << "fitted rate " << est.fitted_rate << " (se " << est.fitted_se
            << "), theory " << est.theory_rate << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random spectral measures toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "RNG seed")->required();
    sub->add_option("--samples", cfg.samples, "number of draws")->required();
    sub->add_option("--out", cfg.out, "output file (JSON)");
    sub->add_option("--format", cfg.format, "json or csv (csv adds <out>.csv)")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* sample = app.add_subcommand("sample", "draw spectral measures");
  add_common(sample);
  sample->add_option("--ensemble", cfg.ensemble,
                     "cbe|sun|so2n|jtilde|jacobi|bizth|uniform-circle|"
                     "uniform-interval|cue-matrix|unif2")
      ->required();
  sample->add_option("--n", cfg.n, "dimension parameter N")->required();
  sample->add_option("--beta", cfg.beta, "beta parameter");
  sample->add_option("--a", cfg.a, "Jacobi a parameter");
  sample->add_option("--b", cfg.b, "Jacobi b parameter");
  sample->add_option("--case", cfg.bizth_case, "uniform-moment model case 1..4");

  CLI::App* verify = app.add_subcommand("verify", "run a statistical suite");
  add_common(verify);
  verify->add_option("--suite", cfg.suite,
                     "theorem-c|cross-validation|uniform-moments-circle|"
                     "uniform-moments-interval|so2n|jacobi-oneof|bizth|unif2|"
                     "eta|sun|cbe-weights")
      ->required();
  verify->add_option("--n", cfg.n, "dimension parameter N");
  verify->add_option("--beta", cfg.beta, "beta parameter");
  verify->add_option("--case", cfg.bizth_case, "bizth case 1..4");
  verify->add_option("--alpha", cfg.alpha, "family alpha (Bonferroni)");
  verify->add_flag("--negative-control", cfg.negative_control,
                   "perturb the sampled parameter; the suite must fail");

  CLI::App* ldp = app.add_subcommand("ldp", "Monte Carlo tail experiment");
  add_common(ldp);
  ldp->add_option("--ensemble", cfg.ensemble, "cbe|jacobi")->required();
  ldp->add_option("--beta", cfg.beta, "beta parameter");
  ldp->add_option("--a", cfg.a, "Jacobi a parameter");
  ldp->add_option("--b", cfg.b, "Jacobi b parameter");
  ldp->add_option("--f", cfg.f_name, "test function: re-z or x");
  ldp->add_option("--x", cfg.x, "tail threshold")->required();
  ldp->add_option("--n-list", cfg.n_list, "increasing N values")
      ->required()
      ->delimiter(',');
  ldp->add_option("--grid-size", cfg.grid_size, "quadrature grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (sample->parsed()) {
      cfg.command = "sample";
      if (cfg.out.empty()) {
        std::cerr << "--out is required for sample\n";
        return kExitConfig;
      }
      return run_sample(cfg);
    }
    if (verify->parsed()) {
      cfg.command = "verify";
      return run_verify(cfg);
    }
    cfg.command = "ldp";
    if (cfg.out.empty()) {
      std::cerr << "--out is required for ldp\n";
      return kExitConfig;
    }
    return run_ldp(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const specmeas::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
