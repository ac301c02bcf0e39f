#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "linhyp/asymptotics.hpp"
#include "linhyp/exact.hpp"
#include "linhyp/io.hpp"
#include "linhyp/montecarlo.hpp"
#include "linhyp/switching.hpp"
#include "linhyp/verify.hpp"

namespace linhyp {

using nlohmann::json;

struct RunConfig {
  int threads = 0;  // 0 = resolve from env/hardware
  std::uint64_t seed = 20240901;
  double tolerance_multiplier = 5.0;
  Budget budget;
  std::string output = "json";  // json | csv | text

  int resolved_threads() const {
    if (threads >= 1) return threads;
    if (const char* env = std::getenv("LINHYP_THREADS")) {
      int t = std::atoi(env);
      if (t >= 1) return t;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), errc::usage_error, "cannot open config " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      auto eq = line.find('=');
      require(eq != std::string::npos, errc::usage_error, "config line needs key=value: " + line);
      std::string key = line.substr(0, eq), val = line.substr(eq + 1);
      if (key == "threads")
        threads = std::stoi(val);
      else if (key == "seed")
        seed = std::stoull(val);
      else if (key == "tolerance_multiplier")
        tolerance_multiplier = std::stod(val);
      else if (key == "dfs_node_cap")
        budget.dfs_node_cap = std::stoull(val);
      else if (key == "census_cap")
        budget.census_cap = std::stoull(val);
      else if (key == "output")
        output = val;
      else
        fail(errc::usage_error, "unknown config key: " + key);
    }
  }
};

namespace cli_detail {

inline std::string fmtd(double v) { return detail::fmt(v); }

inline json error_scale_json(const ErrorScale& s) {
  json terms = json::object();
  for (const auto& [k, v] : s.terms) terms[k] = v;
  return terms;
}

inline json estimate_json(const Estimate& e) {
  json j;
  j["point"] = e.point;
  j["stderr"] = e.stderr_;
  j["ci95"] = {e.ci_lo, e.ci_hi};
  j["trials"] = e.trials;
  j["seed"] = e.seed;
  if (e.successes >= 0) j["successes"] = e.successes;
  return j;
}

inline json report_json(const VerifyReport& rep) {
  json out;
  out["suite"] = "all";
  out["seed"] = rep.seed;
  out["tolerance_multiplier"] = rep.tolerance_multiplier;
  out["all_passed"] = rep.all_passed;
  json arr = json::array();
  for (const auto& c : rep.criteria) {
    json jc;
    jc["id"] = c.id;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    json checks = json::array();
    for (const auto& k : c.checks) {
      json jk;
      jk["name"] = k.name;
      jk["passed"] = k.passed;
      jk["detail"] = k.detail;
      checks.push_back(jk);
    }
    jc["checks"] = checks;
    arr.push_back(jc);
  }
  out["criteria"] = arr;
  return out;
}

inline Regime parse_regime(const std::string& s, long n, long r, long m) {
  if (s == "auto") return auto_regime(n, r, m);
  if (s == "dense") return Regime::dense;
  if (s == "mid") return Regime::mid;
  if (s == "sparse") return Regime::sparse;
  fail(errc::usage_error, "regime must be auto|dense|mid|sparse");
}

inline void emit(std::ostream& out, const std::string& mode, const json& j,
                 const std::string& text_form) {
  if (mode == "json")
    out << j.dump(2) << "\n";
  else
    out << text_form << "\n";
}

}  // namespace cli_detail

/// Subcommand dispatcher. Exit codes: 0 success, 1 a verification or
/// acceptance check failed, 2 usage or input error.
inline int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"linear hypergraph enumeration toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--threads", cfg.threads, "worker threads (env LINHYP_THREADS)");
  app.add_option("--seed", cfg.seed, "base RNG seed");
  app.add_option("--tolerance-multiplier", cfg.tolerance_multiplier,
                 "error-scale multiplier for verification");
  app.add_option("--dfs-cap", cfg.budget.dfs_node_cap, "DFS node budget");
  app.add_option("--census-cap", cfg.budget.census_cap, "exhaustive census budget");
  app.add_option("--output", cfg.output, "json | csv | text");

  // count
  long c_n = 0, c_r = 0, c_m = 0;
  std::string c_method = "both", c_form = "binomial";
  auto* count_cmd = app.add_subcommand("count", "count linear hypergraphs");
  count_cmd->add_option("--n", c_n)->required();
  count_cmd->add_option("--r", c_r)->required();
  count_cmd->add_option("--m", c_m)->required();
  count_cmd->add_option("--method", c_method, "exact | asym | both");
  count_cmd->add_option("--form", c_form, "binomial | poisson");

  // prob-linear
  long p_n = 0, p_r = 0;
  double p_p = -1, p_m0 = -1;
  std::string p_method = "asym";
  auto* prob_cmd = app.add_subcommand("prob-linear", "linearity probability of H_r(n,p)");
  prob_cmd->add_option("--n", p_n)->required();
  prob_cmd->add_option("--r", p_r)->required();
  prob_cmd->add_option("--p", p_p);
  prob_cmd->add_option("--m0", p_m0, "expected edge count p*C(n,r)");
  prob_cmd->add_option("--method", p_method, "asym | exact");

  // contain
  long t_n = 0, t_r = 0, t_m = 0, t_trials = 100000;
  std::string t_kfile, t_method = "asym";
  auto* contain_cmd = app.add_subcommand("contain", "subhypergraph containment probability");
  contain_cmd->add_option("--n", t_n)->required();
  contain_cmd->add_option("--r", t_r)->required();
  contain_cmd->add_option("--m", t_m)->required();
  contain_cmd->add_option("--k-file", t_kfile, ".lh file holding K")->required();
  contain_cmd->add_option("--method", t_method, "exact | asym | mc");
  contain_cmd->add_option("--trials", t_trials);

  // clusters
  std::string cl_in, cl_regime = "auto";
  auto* clusters_cmd = app.add_subcommand("clusters", "cluster profile and property report");
  clusters_cmd->add_option("--in", cl_in, ".lh file")->required();
  clusters_cmd->add_option("--regime", cl_regime, "auto | dense | mid | sparse");

  // sample
  long s_n = 0, s_r = 0, s_m = -1, s_count = 1;
  double s_p = -1;
  bool s_linear_only = false;
  std::string s_out = ".";
  auto* sample_cmd = app.add_subcommand("sample", "write random hypergraphs as .lh files");
  sample_cmd->add_option("--n", s_n)->required();
  sample_cmd->add_option("--r", s_r)->required();
  sample_cmd->add_option("--m", s_m);
  sample_cmd->add_option("--p", s_p);
  sample_cmd->add_option("--count", s_count);
  sample_cmd->add_flag("--linear-only", s_linear_only);
  sample_cmd->add_option("--out", s_out, "output directory");

  // estimate
  std::string e_what = "linearity", e_kfile, e_regime = "auto";
  long e_n = 0, e_r = 0, e_m = -1, e_trials = 100000;
  double e_p = -1;
  auto* estimate_cmd = app.add_subcommand("estimate", "Monte Carlo estimators");
  estimate_cmd->add_option("--what", e_what, "linearity | profile | moments | containment");
  estimate_cmd->add_option("--n", e_n)->required();
  estimate_cmd->add_option("--r", e_r)->required();
  estimate_cmd->add_option("--m", e_m);
  estimate_cmd->add_option("--p", e_p);
  estimate_cmd->add_option("--trials", e_trials);
  estimate_cmd->add_option("--k-file", e_kfile);
  estimate_cmd->add_option("--regime", e_regime);

  // audit
  long a_n = 0, a_r = 0, a_m = 0;
  int a_kind = 4;
  std::string a_profile = "0,0,0,1", a_report;
  auto* audit_cmd = app.add_subcommand("audit", "switching double-count audit");
  audit_cmd->add_option("--n", a_n)->required();
  audit_cmd->add_option("--r", a_r)->required();
  audit_cmd->add_option("--m", a_m)->required();
  audit_cmd->add_option("--kind", a_kind, "cluster kind 1..4")->required();
  audit_cmd->add_option("--profile", a_profile, "h1,h2,h3,h4");
  audit_cmd->add_option("--report", a_report, "write JSON report here");

  // golden
  std::string g_out = "data/golden";
  auto* golden_cmd = app.add_subcommand("golden", "regenerate committed golden CSV files");
  golden_cmd->add_option("--out", g_out, "output directory");

  // verify
  std::string v_suite = "all", v_report;
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance battery");
  verify_cmd->add_option("--suite", v_suite, "all");
  verify_cmd->add_option("--report", v_report, "write JSON report here");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (!config_path.empty()) cfg.load_file(config_path);
    const int threads = cfg.resolved_threads();

    if (*count_cmd) {
      json j;
      std::string text;
      if (c_method == "exact" || c_method == "both") {
        BigCount exact = count_linear(c_n, c_r, c_m, cfg.budget, threads);
        j["exact"] = to_string(exact);
        text += "exact " + to_string(exact);
      }
      if (c_method == "asym" || c_method == "both") {
        CountForm form = c_form == "poisson" ? CountForm::poisson : CountForm::binomial;
        require(c_form == "poisson" || c_form == "binomial", errc::usage_error,
                "--form must be binomial|poisson");
        auto res = theorem11_log_count(c_n, c_r, c_m, form);
        if (c_method == "asym") {
          j["value_ln"] = res.value.ln_mag;
          j["error_scale"] = res.scale.value;
          j["case"] = c_form;
          j["terms"] = cli_detail::error_scale_json(res.scale);
          j["exponent"] = res.exponent;
        } else {
          j["asym_ln"] = res.value.ln_mag;
          j["error_scale"] = res.scale.value;
        }
        text += (text.empty() ? "" : "  ") + std::string("asym_ln ") +
                cli_detail::fmtd(res.value.ln_mag) + " error_scale " +
                cli_detail::fmtd(res.scale.value);
      }
      if (c_method != "exact" && c_method != "asym" && c_method != "both")
        fail(errc::usage_error, "--method must be exact|asym|both");
      if (cfg.output == "csv") {
        out << "n,r,m,exact,asym_ln\n"
            << c_n << ',' << c_r << ',' << c_m << ','
            << (j.contains("exact") ? j["exact"].get<std::string>() : "") << ','
            << (j.contains("asym_ln") ? std::to_string(j["asym_ln"].get<double>())
                                      : (j.contains("value_ln")
                                             ? std::to_string(j["value_ln"].get<double>())
                                             : ""))
            << "\n";
      } else {
        cli_detail::emit(out, cfg.output, j, text);
      }
      return 0;
    }

    if (*prob_cmd) {
      require((p_p >= 0) != (p_m0 >= 0), errc::usage_error, "give exactly one of --p or --m0");
      if (p_method == "exact") {
        double p = p_p >= 0 ? p_p : p_m0 / to_double(BigRat(big_binomial(p_n, p_r)));
        auto res = exact_binomial_linearity(p_n, p_r, p, cfg.budget);
        json j;
        j["probability"] = res.probability;
        j["truncated"] = res.truncated;
        j["m_cut"] = res.m_cut;
        j["tail_bound"] = res.tail_bound;
        cli_detail::emit(out, cfg.output, j, "probability " + cli_detail::fmtd(res.probability));
        return 0;
      }
      require(p_method == "asym", errc::usage_error, "--method must be asym|exact");
      auto res = p_p >= 0 ? theorem13_log_prob(p_n, p_r, p_p) : theorem13_from_m0(p_n, p_r, p_m0);
      json j;
      j["value_ln"] = res.ln_prob;
      j["error_scale"] = res.scale.value;
      j["case"] = res.which == ProbCase::large_m0 ? "large_m0" : "small_m0";
      j["terms"] = cli_detail::error_scale_json(res.scale);
      cli_detail::emit(out, cfg.output, j,
                       "ln_prob " + cli_detail::fmtd(res.ln_prob) + " case " +
                           j["case"].get<std::string>());
      return 0;
    }

    if (*contain_cmd) {
      Hypergraph K = read_lh_file(t_kfile);
      json j;
      if (t_method == "exact") {
        BigCount num = count_linear_containing(t_n, t_r, t_m, K, cfg.budget);
        BigCount den = count_linear(t_n, t_r, t_m, cfg.budget, threads);
        j["containing"] = to_string(num);
        j["linear"] = to_string(den);
        j["probability"] = den == 0 ? 0.0 : to_double(BigRat(num, den));
      } else if (t_method == "asym") {
        auto res = theorem15_log_prob(t_n, t_r, t_m, K.m());
        j["value_ln"] = res.ln_prob;
        j["error_scale"] = res.scale.value;
        j["terms"] = cli_detail::error_scale_json(res.scale);
      } else if (t_method == "mc") {
        auto est = estimate_containment(static_cast<int>(t_n), static_cast<int>(t_r), t_m, K,
                                        t_trials, cfg.seed, threads);
        j = cli_detail::estimate_json(est);
      } else {
        fail(errc::usage_error, "--method must be exact|asym|mc");
      }
      cli_detail::emit(out, cfg.output, j, j.dump());
      return 0;
    }

    if (*clusters_cmd) {
      Hypergraph h = read_lh_file(cl_in);
      Regime reg = cli_detail::parse_regime(cl_regime, h.n(), h.r(), h.m());
      auto th = ThresholdSet::for_regime(reg, h.n(), h.r(), h.m());
      auto prof = cluster_profile(h);
      auto rep = property_report(h, reg, th);
      json j;
      j["n"] = h.n();
      j["r"] = h.r();
      j["m"] = h.m();
      j["regime"] = regime_name(reg);
      j["profile"] = {{"h1", prof.h1}, {"h2", prof.h2}, {"h3", prof.h3}, {"h4", prof.h4},
                      {"other", prof.other}};
      json props = json::object();
      for (const auto& [k, v] : rep.props) props[k] = v;
      j["properties"] = props;
      j["in_plus"] = rep.in_plus;
      j["in_plusplus"] = rep.in_plusplus;
      std::string text = "profile h1=" + std::to_string(prof.h1) + " h2=" +
                         std::to_string(prof.h2) + " h3=" + std::to_string(prof.h3) + " h4=" +
                         std::to_string(prof.h4) + " other=" + std::to_string(prof.other);
      cli_detail::emit(out, cfg.output, j, text);
      return 0;
    }

    if (*sample_cmd) {
      require((s_m >= 0) != (s_p >= 0), errc::usage_error, "give exactly one of --m or --p");
      require(s_count >= 1, errc::usage_error, "--count must be >= 1");
      std::filesystem::create_directories(s_out);
      long written = 0;
      for (long i = 0, stream = 0; i < s_count; ++stream) {
        require(stream < s_count * 1000000L + 1000000L, errc::acceptance_too_low,
                "rejection sampling made no progress");
        Hypergraph h = s_m >= 0 ? sample_fixed(static_cast<int>(s_n), static_cast<int>(s_r), s_m,
                                               cfg.seed, static_cast<std::uint64_t>(stream))
                                : sample_binomial(static_cast<int>(s_n), static_cast<int>(s_r),
                                                  s_p, cfg.seed,
                                                  static_cast<std::uint64_t>(stream));
        if (s_linear_only && !h.is_linear()) continue;
        char name[64];
        std::snprintf(name, sizeof name, "sample_%05ld.lh", i);
        write_lh_file((std::filesystem::path(s_out) / name).string(), h);
        ++i;
        ++written;
      }
      json j;
      j["written"] = written;
      j["dir"] = s_out;
      cli_detail::emit(out, cfg.output, j, "written " + std::to_string(written));
      return 0;
    }

    if (*estimate_cmd) {
      json j;
      if (e_what == "linearity") {
        require((e_m >= 0) != (e_p >= 0), errc::usage_error, "give exactly one of --m or --p");
        Estimate est = e_m >= 0
                           ? estimate_linearity_fixed(static_cast<int>(e_n), static_cast<int>(e_r),
                                                      e_m, e_trials, cfg.seed, threads)
                           : estimate_linearity_binomial(static_cast<int>(e_n),
                                                         static_cast<int>(e_r), e_p, e_trials,
                                                         cfg.seed, threads);
        j = cli_detail::estimate_json(est);
      } else if (e_what == "profile") {
        require(e_m >= 0, errc::usage_error, "profile estimation needs --m");
        Regime reg = cli_detail::parse_regime(e_regime, e_n, e_r, e_m);
        auto dist = estimate_profile_distribution(static_cast<int>(e_n), static_cast<int>(e_r),
                                                  e_m, e_trials, cfg.seed, reg, threads);
        json profs = json::array();
        for (const auto& [k, v] : dist.profiles) {
          json pj;
          pj["profile"] = {{"h1", k.h1}, {"h2", k.h2}, {"h3", k.h3}, {"h4", k.h4},
                           {"other", k.other}};
          pj["estimate"] = cli_detail::estimate_json(v);
          profs.push_back(pj);
        }
        j["profiles"] = profs;
        j["plus_fraction"] = cli_detail::estimate_json(dist.plus_fraction);
        j["plusplus_fraction"] = cli_detail::estimate_json(dist.plusplus_fraction);
        j["regime"] = regime_name(reg);
      } else if (e_what == "moments") {
        require(e_p >= 0, errc::usage_error, "moments estimation needs --p");
        auto mom = estimate_conditional_moments(static_cast<int>(e_n), static_cast<int>(e_r), e_p,
                                                e_trials, cfg.seed, threads);
        j["mean"] = cli_detail::estimate_json(mom.mean);
        j["variance"] = cli_detail::estimate_json(mom.variance);
        j["acceptance_rate"] = mom.acceptance_rate;
        j["accepted"] = mom.accepted;
      } else if (e_what == "containment") {
        require(e_m >= 0 && !e_kfile.empty(), errc::usage_error,
                "containment estimation needs --m and --k-file");
        Hypergraph K = read_lh_file(e_kfile);
        auto est = estimate_containment(static_cast<int>(e_n), static_cast<int>(e_r), e_m, K,
                                        e_trials, cfg.seed, threads);
        j = cli_detail::estimate_json(est);
      } else {
        fail(errc::usage_error, "--what must be linearity|profile|moments|containment");
      }
      cli_detail::emit(out, cfg.output, j, j.dump());
      return 0;
    }

    if (*audit_cmd) {
      ClusterProfile P;
      {
        std::stringstream ss(a_profile);
        std::string tok;
        int vals[4] = {0, 0, 0, 0};
        for (int i = 0; i < 4; ++i) {
          require(static_cast<bool>(std::getline(ss, tok, ',')), errc::usage_error,
                  "--profile needs h1,h2,h3,h4");
          vals[i] = std::stoi(tok);
        }
        P.h1 = vals[0];
        P.h2 = vals[1];
        P.h3 = vals[2];
        P.h4 = vals[3];
      }
      auto rep = double_count_audit(a_n, a_r, a_m, a_kind, P, cfg.budget);
      json j;
      j["forward_total"] = to_string(rep.forward_total);
      j["reverse_total"] = to_string(rep.reverse_total);
      j["equal"] = rep.equal;
      j["ratio_bounds"] = {{"lo", rep.ratio_lo}, {"observed", rep.ratio_observed},
                           {"hi", rep.ratio_hi}};
      if (!a_report.empty()) {
        std::ofstream f(a_report);
        require(f.good(), errc::usage_error, "cannot write " + a_report);
        f << j.dump(2) << "\n";
      }
      cli_detail::emit(out, cfg.output, j,
                       "forward " + to_string(rep.forward_total) + " reverse " +
                           to_string(rep.reverse_total) + (rep.equal ? " equal" : " UNEQUAL"));
      return rep.equal && rep.sandwich_ok ? 0 : 1;
    }

    if (*golden_cmd) {
      std::filesystem::create_directories(g_out);
      {
        std::ofstream f(std::filesystem::path(g_out) / "counts.csv");
        f << "n,r,m,count_linear,count_all\n";
        const std::pair<long, long> grids[] = {{5, 3}, {6, 3}, {7, 3}};
        for (auto [n, r] : grids) {
          BigCount N = big_binomial(n, r);
          for (long m = 0; BigCount(m) <= N; ++m) {
            BigCount l = count_linear(n, r, m, cfg.budget, threads);
            f << n << ',' << r << ',' << m << ',' << to_string(l) << ','
              << to_string(count_all(n, r, m)) << "\n";
            if (l == 0) break;
          }
        }
      }
      {
        std::ofstream f(std::filesystem::path(g_out) / "census.csv");
        f << "n,r,m,h1,h2,h3,h4,other,in_plus,in_plusplus,count\n";
        const std::tuple<long, long, long> grids[] = {{5, 3, 2}, {6, 3, 2}, {8, 3, 3}};
        for (auto [n, r, m] : grids) {
          Regime reg = auto_regime(n, r, m);
          auto th = ThresholdSet::for_regime(reg, n, r, m);
          auto census = profile_census(n, r, m, reg, th, cfg.budget);
          for (const auto& [k, v] : census.buckets) {
            f << n << ',' << r << ',' << m << ',' << k.profile.h1 << ',' << k.profile.h2 << ','
              << k.profile.h3 << ',' << k.profile.h4 << ',' << k.profile.other << ','
              << (k.in_plus ? 1 : 0) << ',' << (k.in_plusplus ? 1 : 0) << ',' << to_string(v)
              << "\n";
          }
        }
      }
      json j;
      j["dir"] = g_out;
      j["files"] = {"counts.csv", "census.csv"};
      cli_detail::emit(out, cfg.output, j, "golden files written to " + g_out);
      return 0;
    }

    if (*verify_cmd) {
      require(v_suite == "all", errc::usage_error, "--suite must be 'all'");
      VerifySettings vs;
      vs.seed = cfg.seed;
      vs.tolerance_multiplier = cfg.tolerance_multiplier;
      vs.threads = threads;
      vs.budget = cfg.budget;
      VerifyReport rep = run_acceptance(vs);
      for (const auto& c : rep.criteria)
        out << (c.passed ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << ": " << c.name
            << "\n";
      if (!v_report.empty()) {
        std::ofstream f(v_report);
        require(f.good(), errc::usage_error, "cannot write " + v_report);
        f << cli_detail::report_json(rep).dump(2) << "\n";
      }
      if (cfg.output == "json") out << cli_detail::report_json(rep).dump(2) << "\n";
      return rep.all_passed ? 0 : 1;
    }
  } catch (const error& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "no subcommand given\n";
  return 2;
}

}  // namespace linhyp
