#include "hubergd/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hubergd/config.hpp"
#include "hubergd/csv_io.hpp"
#include "hubergd/data.hpp"
#include "hubergd/error.hpp"
#include "hubergd/suites.hpp"
#include "hubergd/svg_plot.hpp"
#include "hubergd/verify.hpp"

namespace hubergd {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInvariant = 2;

// Everything a command produces; nothing touches disk until commit().
class Outputs {
 public:
  explicit Outputs(std::string dir) : dir_(std::move(dir)) {}
  void add(const std::string& name, std::string contents) { files_.emplace_back(name, std::move(contents)); }
  void commit(std::ostream& out) const {
    for (const auto& [name, contents] : files_) {
      const std::string path = (fs::path(dir_) / name).string();
      write_file_atomic(path, contents);
      out << "wrote " << path << "\n";
    }
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

struct CommonOptions {
  std::optional<std::string> preset;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::string out_dir;
  bool strict = false;
  bool lenient = false;
  std::vector<std::string> sets;
  std::optional<int> iterations;
};

std::vector<std::pair<std::string, std::string>> overrides_of(const CommonOptions& o) {
  std::vector<std::pair<std::string, std::string>> ov;
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::parse, "--set expects key=value, got '" + s + "'");
    std::string k = s.substr(0, eq), v = s.substr(eq + 1);
    while (!k.empty() && k.back() == ' ') k.pop_back();
    while (!v.empty() && v.front() == ' ') v.erase(v.begin());
    ov.emplace_back(k, v);
  }
  if (o.seed) ov.emplace_back("seed", std::to_string(*o.seed));
  if (o.seeds) ov.emplace_back("seeds", std::to_string(*o.seeds));
  if (o.iterations) ov.emplace_back("T", std::to_string(*o.iterations));
  if (o.strict) ov.emplace_back("strict", "true");
  if (o.lenient) ov.emplace_back("strict", "false");
  if (!o.out_dir.empty()) ov.emplace_back("out_dir", o.out_dir);
  return ov;
}

ExperimentConfig load_config(const CommonOptions& o, const std::optional<std::string>& preset_override = {}) {
  std::vector<ConfigEntry> file;
  if (!o.config_path.empty()) file = read_config_file(o.config_path);
  ExperimentConfig ec = resolve_config(preset_override ? preset_override : o.preset, file, overrides_of(o));
  if (ec.out_dir.empty()) {
    const char* env = std::getenv("HUBERGD_OUT_DIR");
    ec.out_dir = env && *env ? env : "out";
  }
  return ec;
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void print_table(std::ostream& out, const std::vector<VerdictRow>& rows) {
  for (const auto& r : rows) {
    char line[512];
    std::snprintf(line, sizeof line, "%-4s %-42s %-12s worst=%-13.6g threshold=%-13.6g %s\n",
                  r.passed ? "ok" : "FAIL", r.check.c_str(), r.scope.c_str(), r.worst_value, r.threshold,
                  r.witness.c_str());
    out << line;
  }
}

// Counts records where a flag failed and where it was applicable.
VerdictRow flag_row(const std::string& name, const std::string& scope, const std::vector<IterationRecord>& recs,
                    Verdict InvariantFlags::*flag) {
  std::size_t fails = 0, applicable = 0;
  std::optional<int> first;
  for (const auto& r : recs) {
    const Verdict v = r.flags.*flag;
    if (v == Verdict::na) continue;
    ++applicable;
    if (v == Verdict::fail) {
      ++fails;
      if (!first) first = r.t;
    }
  }
  std::string w = std::to_string(applicable) + " applicable records";
  if (first) w += "; first violation t = " + std::to_string(*first);
  return {name, scope, fails == 0, static_cast<double>(fails), 0.0, w};
}

struct RunOutput {
  TrainResult result;
  std::vector<VerdictRow> rows;
};

std::vector<VerdictRow> summarize(const std::string& tag, const TrainResult& tr) {
  std::vector<VerdictRow> rows;
  rows.push_back({tag + ".completed", "hard", !tr.abort_reason, tr.abort_reason ? 1.0 : 0.0, 0.0,
                  tr.abort_reason.value_or("")});
  rows.push_back(flag_row(tag + ".lemma4", "hard", tr.records, &InvariantFlags::lemma4));
  rows.push_back(flag_row(tag + ".lemma5", "hard", tr.records, &InvariantFlags::lemma5));
  rows.push_back(flag_row(tag + ".lemma12", "hard", tr.records, &InvariantFlags::lemma12));
  rows.push_back(flag_row(tag + ".lemma6", "monitor", tr.records, &InvariantFlags::lemma6));
  if (tr.records.size() >= 2) {
    double worst_rise = -std::numeric_limits<double>::infinity();
    std::string at;
    for (std::size_t k = 2; k < tr.records.size(); ++k) {
      const double rise = tr.records[k].loss - tr.records[k - 1].loss;
      if (rise > worst_rise) {
        worst_rise = rise;
        at = "t = " + std::to_string(tr.records[k].t);
      }
    }
    if (tr.records.size() > 2) {
      rows.push_back({tag + ".monotone_after_first", "monitor", worst_rise <= 0.0, worst_rise, 0.0, at});
    }
    const double ratio = tr.records.back().loss / tr.records.front().loss;
    rows.push_back({tag + ".final_over_initial", "monitor", ratio < 0.1, ratio, 0.1, ""});
  }
  return rows;
}

RunOutput execute_run(const ExperimentConfig& ec, int k) {
  RunOutput ro;
  const std::string tag = "run" + std::to_string(k);
  if (ec.data == DataSource::curated) {
    if (ec.train.schedule.policy != StepPolicy::theorem1) {
      throw Error(ErrorKind::invalid_input, "curated data is only used with policy = theorem1");
    }
    const Theorem1Start st =
        curated_theorem1_start(run_init_seed(ec, k), ec.train.p, ec.train.d, ec.n, ec.target_loss);
    ro.result = run_theorem1(st, ec.train.T, ec.train.c1, ec.train.lemma5_slack);
    ro.rows = summarize(tag, ro.result);
    const auto verdict = judge_theorem1(ro.result.records, st.Q1, st.Q2, st.L1, st.V1_norm, st.data.size(),
                                        ec.train.c1, ec.train.p);
    for (auto r : verdict.rows) {
      r.check = tag + "." + r.check;
      ro.rows.push_back(r);
    }
    return ro;
  }
  const Dataset raw = make_dataset(ec, k);
  const TrainConfig tc = ec.train_config(k);
  ro.result = train(tc, raw);
  ro.rows = summarize(tag, ro.result);
  if (ec.data == DataSource::clusters && ro.result.after_first) {
    const ClusterSpec spec = ClusterSpec::orthogonal(ec.train.d, ec.radius, ec.separation, ec.balance, ec.n);
    const WorkingProblem wp = make_working_problem(tc, raw);
    const auto rep = concentration_report(ro.result.initial, *ro.result.after_first, wp.data, tc, spec);
    for (auto r : rep.rows) {
      r.check = tag + "." + r.check;
      ro.rows.push_back(r);
    }
  }
  return ro;
}

PlotSeries loss_series(const std::string& label, const TrainResult& tr, const std::string& color = "") {
  PlotSeries s{label, {}, {}, color};
  for (const auto& r : tr.records) {
    s.x.push_back(r.t);
    s.y.push_back(r.loss);
  }
  return s;
}

std::string name_of(const ExperimentConfig& ec) { return ec.preset.empty() ? "run" : ec.preset; }

bool is_relu(const ExperimentConfig& ec) { return ec.train.activation == Activation::Kind::standard_relu; }

int cmd_run(const CommonOptions& opts, const std::string& compare_flag, std::ostream& out) {
  const ExperimentConfig ec = load_config(opts);
  const std::string name = name_of(ec);
  Outputs outputs(ec.out_dir);
  std::vector<VerdictRow> rows;
  std::vector<PlotSeries> curves;
  std::vector<TrainResult> main_results;
  for (int k = 0; k < ec.seeds; ++k) {
    RunOutput ro = execute_run(ec, k);
    out << name << " seed " << k << ": L0 = " << fmt(ro.result.records.front().loss)
        << ", final = " << fmt(ro.result.records.back().loss) << " after " << ro.result.records.back().t
        << " iterations\n";
    outputs.add(name + "_seed" + std::to_string(k) + ".csv", telemetry_to_csv(ro.result.records));
    curves.push_back(loss_series("seed " + std::to_string(k), ro.result));
    rows.insert(rows.end(), ro.rows.begin(), ro.rows.end());
    main_results.push_back(std::move(ro.result));
  }
  PlotSpec spec{name + ": training loss", "iteration", "loss (log scale)"};
  outputs.add(name + "_loss.svg", render_line_plot(spec, curves));

  const std::string compare = compare_flag.empty() ? ec.compare : compare_flag;
  if (!compare.empty()) {
    ExperimentConfig other = load_config(opts, compare);
    other.seeds = ec.seeds;
    other.out_dir = ec.out_dir;
    std::vector<PlotSeries> overlay;
    const std::string main_color = is_relu(ec) ? "#1f77b4" : "#2ca02c";
    const std::string other_color = is_relu(other) ? "#1f77b4" : "#2ca02c";
    for (int k = 0; k < ec.seeds; ++k) {
      overlay.push_back(loss_series(name + " seed " + std::to_string(k), main_results[k], main_color));
    }
    double worst_orders = 0.0;
    for (int k = 0; k < other.seeds; ++k) {
      RunOutput ro = execute_run(other, k);
      outputs.add(compare + "_seed" + std::to_string(k) + ".csv", telemetry_to_csv(ro.result.records));
      const double a = main_results[k].records.back().loss, b = ro.result.records.back().loss;
      worst_orders = std::max(worst_orders, std::abs(std::log10(a / b)));
      for (auto r : ro.rows) {
        r.check = compare + "." + r.check;
        rows.push_back(r);
      }
      overlay.push_back(loss_series(compare + " seed " + std::to_string(k), ro.result, other_color));
    }
    rows.push_back({"compare.final_loss_orders", "monitor", worst_orders <= 1.0, worst_orders, 1.0,
                    name + " vs " + compare + ", |log10 ratio| of final losses"});
    PlotSpec ospec{name + " vs " + compare, "iteration", "loss (log scale)"};
    outputs.add(name + "_vs_" + compare + ".svg", render_line_plot(ospec, overlay));
  }
  outputs.add(name + "_verdicts.csv", verdicts_to_csv(rows));
  outputs.add(name + "_config.txt", to_config_text(ec));
  outputs.commit(out);
  const bool ok = hard_passed(rows);
  if (!ok) {
    out << "hard invariant failures:\n";
    std::vector<VerdictRow> bad;
    std::copy_if(rows.begin(), rows.end(), std::back_inserter(bad),
                 [](const VerdictRow& r) { return r.scope == "hard" && !r.passed; });
    print_table(out, bad);
  }
  return ok ? kExitOk : kExitInvariant;
}

const std::map<std::string, std::string>& sweep_keys() {
  static const std::map<std::string, std::string> keys{
      {"p", "p"}, {"beta", "beta"}, {"r", "radius"}, {"delta", "separation"}, {"epsilon", "balance"}, {"n", "n"}};
  return keys;
}

int cmd_sweep(CommonOptions opts, std::string param, const std::optional<std::string>& values_text,
              std::ostream& out) {
  if (!opts.preset && opts.config_path.empty()) opts.preset = "theorem2";
  ExperimentConfig ec = load_config(opts);
  if (param.empty()) param = ec.sweep_param;
  if (values_text) apply_setting(ec, "sweep_values", *values_text);
  const auto key = sweep_keys().find(param);
  if (key == sweep_keys().end()) {
    throw Error(ErrorKind::invalid_input, "sweep parameter must be one of p, beta, r, delta, epsilon, n; got '" +
                                              param + "'");
  }
  if (ec.sweep_values.empty()) throw Error(ErrorKind::invalid_input, "sweep needs at least one value");
  if (ec.data == DataSource::curated) throw Error(ErrorKind::invalid_input, "sweeps do not support curated data");

  std::vector<SweepRow> table;
  std::vector<VerdictRow> rows;
  std::vector<PlotSeries> curves;
  for (int k = 0; k < ec.seeds; ++k) curves.push_back({"seed " + std::to_string(k), {}, {}, ""});
  for (double v : ec.sweep_values) {
    ExperimentConfig run = ec;
    apply_setting(run, key->second, format_double(v));
    for (int k = 0; k < ec.seeds; ++k) {
      const auto t0 = std::chrono::steady_clock::now();
      const Dataset raw = make_dataset(run, k);
      const TrainResult tr = train(run.train_config(k), raw);
      const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const double L1 = tr.records.size() > 1 ? tr.records[1].loss : tr.records.front().loss;
      table.push_back({v, L1, std::log(1.0 / L1), tr.records.back().loss, runtime});
      curves[k].x.push_back(v);
      curves[k].y.push_back(std::log(1.0 / L1));
      auto s = summarize(param + "=" + format_double(v) + ".run" + std::to_string(k), tr);
      rows.insert(rows.end(), s.begin(), s.end());
      out << param << " = " << format_double(v) << " seed " << k << ": L1 = " << fmt(L1)
          << ", log(1/L1) = " << fmt(std::log(1.0 / L1)) << "\n";
    }
  }
  for (int k = 0; k < ec.seeds; ++k) {
    bool increasing = true;
    for (std::size_t i = 1; i < curves[k].y.size(); ++i) increasing = increasing && curves[k].y[i] > curves[k].y[i - 1];
    rows.push_back({"sweep.seed" + std::to_string(k) + ".log_inv_L1_increasing", "monitor", increasing, 0.0, 0.0, ""});
  }
  Outputs outputs(ec.out_dir);
  outputs.add("sweep_" + param + ".csv", sweep_to_csv(table));
  PlotSpec spec{"log(1/L1) vs " + param, param, "log(1/L1)"};
  spec.log_x = true;
  outputs.add("sweep_" + param + ".svg", render_line_plot(spec, curves));
  outputs.add("sweep_" + param + "_verdicts.csv", verdicts_to_csv(rows));
  outputs.commit(out);
  return hard_passed(rows) ? kExitOk : kExitInvariant;
}

int cmd_check(const CommonOptions& opts, const std::string& scope, std::ostream& out) {
  const std::uint64_t seed = opts.seed.value_or(1);
  const auto results = run_check_scope(scope, seed);
  std::vector<VerdictRow> rows;
  bool ok = true;
  for (const auto& r : results) {
    out << "== " << r.name << " (" << r.instances << " instances, " << fmt(r.runtime_s, "%.2f") << " s)\n";
    print_table(out, r.rows);
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    ok = ok && r.passed();
  }
  std::string dir = opts.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("HUBERGD_OUT_DIR");
    dir = env && *env ? env : "out";
  }
  Outputs outputs(dir);
  outputs.add("check_" + scope + ".csv", verdicts_to_csv(rows));
  outputs.commit(out);
  out << (ok ? "all hard assertions pass\n" : "hard assertion failures\n");
  return ok ? kExitOk : kExitInvariant;
}

std::vector<double> parse_vector(const std::string& key, const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    while (end && *end == ' ') ++end;
    if (end == item.c_str() || (end && *end != '\0')) {
      throw Error(ErrorKind::parse, "bad number '" + item + "' in " + key);
    }
    v.push_back(x);
  }
  return v;
}

int cmd_gen_data(const std::string& spec_path, std::string out_path, std::uint64_t seed, const std::string& out_dir,
                 std::ostream& out) {
  std::ifstream in(spec_path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open spec file '" + spec_path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  std::map<std::string, std::string> kv;
  for (const auto& e : parse_key_values(ss.str(), spec_path)) kv[e.key] = e.value;
  auto num = [&](const std::string& k, double dflt) {
    const auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    const auto v = parse_vector(k, it->second);
    if (v.size() != 1) throw Error(ErrorKind::parse, spec_path + ": " + k + " expects one number");
    return v[0];
  };
  const std::string kind = kv.count("kind") ? kv["kind"] : "clusters";
  const auto n = static_cast<std::size_t>(num("n", 128));
  if (n == 0) throw Error(ErrorKind::invalid_input, "n must be positive");
  if (out_path.empty()) out_path = (fs::path(out_dir) / "dataset.csv").string();

  Dataset D;
  if (kind == "clusters") {
    ClusterSpec spec = ClusterSpec::orthogonal(static_cast<std::size_t>(num("d", 10)), num("radius", 0.05),
                                               num("separation", 0.05), num("balance", 0.05), n);
    for (int k = 0; k < 4; ++k) {
      const std::string key = "center" + std::to_string(k + 1);
      if (kv.count(key)) spec.centers[k] = parse_vector(key, kv[key]);
    }
    D = generate_clusters(spec, seed);
    const ValidationReport rep = validate_assumptions(D, spec);
    for (const auto& c : rep.checks) {
      char line[512];
      std::snprintf(line, sizeof line, "%-4s %-40s worst=%-13.6g threshold=%-13.6g %s\n", c.passed ? "ok" : "FAIL",
                    c.name.c_str(), c.worst_value, c.threshold, c.witness.c_str());
      out << line;
    }
    if (!rep.all_passed()) throw Error(ErrorKind::spec_validation, "generated data violates the cluster assumptions");
  } else if (kind == "xor" || kind == "shoulders") {
    MixtureSpec spec = kind == "xor" ? MixtureSpec::xor_preset(n) : MixtureSpec::shoulders_preset(n);
    spec.covariance_scale = num("covariance", spec.covariance_scale);
    bool normalize = false;
    if (kv.count("normalize")) normalize = kv["normalize"] == "true" || kv["normalize"] == "1";
    D = generate_mixture(spec, seed, normalize);
    out << "mixture data: no cluster assumptions to validate\n";
  } else {
    throw Error(ErrorKind::parse, spec_path + ": kind must be clusters, xor or shoulders");
  }
  write_dataset_csv(out_path, D);
  out << "wrote " << out_path << " (" << D.size() << " rows)\n";
  return kExitOk;
}

void add_common(CLI::App* app, CommonOptions& o, bool with_preset = true) {
  if (with_preset) {
    app->add_option("--preset", o.preset, "xor, shoulders, xor-relu, shoulders-relu, theorem1, theorem2");
    app->add_option("--config", o.config_path, "flat key = value config file");
    app->add_option("--seeds", o.seeds, "number of runs");
    app->add_option("--set", o.sets, "override one config key (key=value)");
    app->add_option("-T,--iterations", o.iterations, "number of updates");
    auto* strict = app->add_flag("--strict", o.strict, "error when L_t >= 1 under a loss-dependent schedule");
    auto* lenient = app->add_flag("--lenient", o.lenient, "cap the step when L_t >= 1 (default)");
    strict->excludes(lenient);
  }
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--out-dir", o.out_dir, "output directory (default $HUBERGD_OUT_DIR, else ./out)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient descent for two-layer Huberized-ReLU networks, with invariant checks"};
  app.require_subcommand(1);
  CommonOptions run_opts, sweep_opts, check_opts, gen_opts;
  std::string compare, param, scope, spec_path, out_path;
  std::optional<std::string> values;
  std::uint64_t gen_seed = 1;

  auto* run = app.add_subcommand("run", "train one preset or config, one run per seed");
  add_common(run, run_opts);
  run->add_option("--compare", compare, "also run this preset and overlay the curves");

  auto* sweep = app.add_subcommand("sweep", "one-step loss over a parameter grid");
  add_common(sweep, sweep_opts);
  sweep->add_option("--param", param, "p, beta, r, delta, epsilon or n");
  sweep->add_option("--values", values, "comma-separated values");

  auto* check = app.add_subcommand("check", "run a verification suite");
  add_common(check, check_opts, false);
  check->add_option("scope", scope, "grad, hvp, lemmas, concentration, equivalence or all")->required();

  auto* gen = app.add_subcommand("gen-data", "write a dataset CSV from a data spec");
  gen->add_option("spec", spec_path, "data spec file (key = value)")->required();
  gen->add_option("--out", out_path, "output CSV path");
  gen->add_option("--seed", gen_seed, "data seed");
  gen->add_option("--out-dir", gen_opts.out_dir, "directory for the default output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts, compare, out);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, param, values, out);
    if (check->parsed()) return cmd_check(check_opts, scope, out);
    if (gen->parsed()) {
      std::string dir = gen_opts.out_dir;
      if (dir.empty()) {
        const char* env = std::getenv("HUBERGD_OUT_DIR");
        dir = env && *env ? env : "out";
      }
      return cmd_gen_data(spec_path, out_path, gen_seed, dir, out);
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace hubergd
