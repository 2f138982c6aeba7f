#include "hubergd/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hubergd/csv_io.hpp"
#include "hubergd/data.hpp"
#include "hubergd/error.hpp"
#include "hubergd/rng.hpp"

namespace hubergd {

const char* to_string(DataSource s) {
  switch (s) {
    case DataSource::xor_mixture: return "xor";
    case DataSource::shoulders: return "shoulders";
    case DataSource::clusters: return "clusters";
    case DataSource::curated: return "curated";
    case DataSource::file: return "file";
  }
  return "xor";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw Error(ErrorKind::parse, "bad value '" + value + "' for " + key + " (expected " + want + ")");
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v, "a number");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    // Accept integral floating forms such as 1e4 or 16384.0.
    const double d = parse_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 9e15) bad_value(key, v, "an integer");
    return static_cast<long long>(d);
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "an unsigned integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true or false");
}

int positive_int(const std::string& key, const std::string& v) {
  const long long x = parse_int(key, v);
  if (x < 1 || x > (1LL << 30)) bad_value(key, v, "a positive integer");
  return static_cast<int>(x);
}

std::string format(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"xor", "shoulders", "xor-relu", "shoulders-relu", "theorem1", "theorem2"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  TrainConfig& t = c.train;
  if (name == "xor" || name == "shoulders" || name == "xor-relu" || name == "shoulders-relu") {
    c.data = name.starts_with("xor") ? DataSource::xor_mixture : DataSource::shoulders;
    c.n = 128;
    c.width_factor = 4.0;
    t.p = 100;
    t.d = 2;
    t.beta = 0.25;
    t.T = 100;
    t.with_bias = true;
    t.schedule.policy = StepPolicy::log_squared;
    t.activation = name.ends_with("-relu") ? Activation::Kind::standard_relu : Activation::Kind::huberized;
    if (name == "shoulders") c.compare = "shoulders-relu";
    return c;
  }
  if (name == "theorem1") {
    c.data = DataSource::curated;
    c.n = 4;
    t.p = 32;
    t.d = 3;
    t.T = 10000;
    t.with_bias = false;
    t.schedule.policy = StepPolicy::theorem1;
    t.schedule.strict = true;
    return c;
  }
  if (name == "theorem2") {
    c.data = DataSource::clusters;
    c.n = 128;
    t.p = 1024;
    t.d = 10;
    t.beta = 0.25;
    t.T = 1;
    t.with_bias = false;
    t.schedule.policy = StepPolicy::log_squared;
    c.seeds = 3;
    c.sweep_param = "p";
    c.sweep_values = {1024, 4096, 16384};
    return c;
  }
  throw Error(ErrorKind::invalid_input, "unknown preset '" + name + "'");
}

std::vector<std::string> config_keys() {
  return {"preset",   "p",          "d",         "beta",         "sigma",       "alpha0",
          "h",        "width_factor", "activation", "policy",     "q1",          "q2",
          "c5",       "fixed_alpha", "alpha_max", "strict",      "T",           "seed",
          "seeds",    "with_bias",  "c1",        "lemma5_slack", "data",        "n",
          "radius",   "separation", "balance",   "data_file",    "data_seed",   "target_loss",
          "compare",  "sweep_param", "sweep_values", "out_dir"};
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  TrainConfig& t = c.train;
  if (key == "preset") {
    c.preset = v;
  } else if (key == "p") {
    t.p = positive_int(key, v);
  } else if (key == "d") {
    t.d = static_cast<std::size_t>(positive_int(key, v));
  } else if (key == "beta") {
    t.beta = parse_double(key, v);
  } else if (key == "sigma") {
    t.sigma = parse_double(key, v);
  } else if (key == "alpha0") {
    t.alpha0 = parse_double(key, v);
  } else if (key == "h") {
    t.h = parse_double(key, v);
  } else if (key == "width_factor") {
    c.width_factor = parse_double(key, v);
    if (!(c.width_factor > 0.0)) bad_value(key, v, "a positive number");
  } else if (key == "activation") {
    if (v == "huberized") {
      t.activation = Activation::Kind::huberized;
    } else if (v == "relu") {
      t.activation = Activation::Kind::standard_relu;
    } else {
      bad_value(key, v, "huberized or relu");
    }
  } else if (key == "policy") {
    if (v == "theorem1") {
      t.schedule.policy = StepPolicy::theorem1;
    } else if (v == "log_squared") {
      t.schedule.policy = StepPolicy::log_squared;
    } else if (v == "fixed") {
      t.schedule.policy = StepPolicy::fixed;
    } else {
      bad_value(key, v, "theorem1, log_squared or fixed");
    }
  } else if (key == "q1") {
    t.schedule.q1 = parse_double(key, v);
  } else if (key == "q2") {
    t.schedule.q2 = parse_double(key, v);
  } else if (key == "c5") {
    t.schedule.c5 = parse_double(key, v);
  } else if (key == "fixed_alpha") {
    t.schedule.fixed_alpha = parse_double(key, v);
  } else if (key == "alpha_max") {
    t.schedule.alpha_max = parse_double(key, v);
  } else if (key == "strict") {
    t.schedule.strict = parse_bool(key, v);
  } else if (key == "T" || key == "iterations") {
    const long long x = parse_int(key, v);
    if (x < 0 || x > (1LL << 30)) bad_value(key, v, "a nonnegative integer");
    t.T = static_cast<int>(x);
  } else if (key == "seed") {
    t.seed = parse_u64(key, v);
  } else if (key == "seeds") {
    c.seeds = positive_int(key, v);
  } else if (key == "with_bias") {
    t.with_bias = parse_bool(key, v);
  } else if (key == "c1") {
    t.c1 = parse_double(key, v);
  } else if (key == "lemma5_slack") {
    t.lemma5_slack = parse_double(key, v);
  } else if (key == "data") {
    if (v == "xor") {
      c.data = DataSource::xor_mixture;
    } else if (v == "shoulders") {
      c.data = DataSource::shoulders;
    } else if (v == "clusters") {
      c.data = DataSource::clusters;
    } else if (v == "curated") {
      c.data = DataSource::curated;
    } else if (v == "file") {
      c.data = DataSource::file;
    } else {
      bad_value(key, v, "xor, shoulders, clusters, curated or file");
    }
  } else if (key == "n") {
    c.n = static_cast<std::size_t>(positive_int(key, v));
  } else if (key == "radius") {
    c.radius = parse_double(key, v);
  } else if (key == "separation") {
    c.separation = parse_double(key, v);
  } else if (key == "balance") {
    c.balance = parse_double(key, v);
  } else if (key == "data_file") {
    c.data_file = v;
    c.data = DataSource::file;
  } else if (key == "data_seed") {
    c.data_seed = parse_u64(key, v);
  } else if (key == "target_loss") {
    c.target_loss = parse_double(key, v);
    if (!(c.target_loss > 0.0 && c.target_loss < 1.0)) bad_value(key, v, "a number in (0, 1)");
  } else if (key == "compare") {
    c.compare = v;
  } else if (key == "sweep_param") {
    c.sweep_param = v;
  } else if (key == "sweep_values") {
    c.sweep_values.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) c.sweep_values.push_back(parse_double(key, item));
    }
  } else if (key == "out_dir") {
    c.out_dir = v;
  } else {
    throw Error(ErrorKind::parse, "unknown key '" + key + "'");
  }
}

std::vector<ConfigEntry> parse_key_values(const std::string& text, const std::string& origin) {
  std::vector<ConfigEntry> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::parse, origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    ConfigEntry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
    if (e.key.empty()) throw Error(ErrorKind::parse, origin + ":" + std::to_string(lineno) + ": empty key");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& origin) {
  auto out = parse_key_values(text, origin);
  const auto keys = config_keys();
  for (const auto& e : out) {
    if (e.key != "iterations" && std::find(keys.begin(), keys.end(), e.key) == keys.end()) {
      throw Error(ErrorKind::parse, origin + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
  }
  return out;
}

std::vector<ConfigEntry> read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

ExperimentConfig resolve_config(const std::optional<std::string>& preset_flag,
                                const std::vector<ConfigEntry>& file_entries,
                                const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::string preset = "xor";
  for (const auto& e : file_entries) {
    if (e.key == "preset") preset = e.value;
  }
  if (preset_flag) preset = *preset_flag;
  ExperimentConfig c = preset_config(preset);
  for (const auto& e : file_entries) {
    if (e.key == "preset") continue;
    try {
      apply_setting(c, e.key, e.value);
    } catch (const Error& err) {
      throw Error(ErrorKind::parse, "line " + std::to_string(e.line) + ": " + err.what());
    }
  }
  for (const auto& [k, v] : overrides) {
    if (k == "preset") continue;
    apply_setting(c, k, v);
  }
  c.preset = preset;
  return c;
}

std::uint64_t run_data_seed(const ExperimentConfig& c, int k) {
  if (c.data_seed) return *c.data_seed;
  return derive_seed(c.train.seed, 2 * static_cast<std::uint64_t>(k));
}

std::uint64_t run_init_seed(const ExperimentConfig& c, int k) {
  return derive_seed(c.train.seed, 2 * static_cast<std::uint64_t>(k) + 1);
}

TrainConfig ExperimentConfig::train_config(int k) const {
  TrainConfig t = train;
  t.seed = run_init_seed(*this, k);
  const double wp = width_factor * static_cast<double>(t.p);
  if (!t.sigma) t.sigma = std::pow(wp, -(0.5 + t.beta / 2.0));
  if (!t.alpha0) t.alpha0 = std::pow(wp, -(0.5 + t.beta));
  return t;
}

Dataset make_dataset(const ExperimentConfig& c, int k) {
  const std::uint64_t seed = run_data_seed(c, k);
  switch (c.data) {
    case DataSource::xor_mixture:
      return generate_mixture(MixtureSpec::xor_preset(c.n), seed);
    case DataSource::shoulders:
      return generate_mixture(MixtureSpec::shoulders_preset(c.n), seed);
    case DataSource::clusters:
      return generate_clusters(ClusterSpec::orthogonal(c.train.d, c.radius, c.separation, c.balance, c.n),
                               seed);
    case DataSource::curated:
      return random_unit_points(c.train.d, c.n, seed);
    case DataSource::file:
      if (c.data_file.empty()) throw Error(ErrorKind::invalid_input, "data = file needs data_file");
      return read_dataset_csv(c.data_file);
  }
  throw Error(ErrorKind::invalid_input, "unknown data source");
}

std::string to_config_text(const ExperimentConfig& c) {
  const TrainConfig& t = c.train;
  std::ostringstream os;
  os << "preset = " << c.preset << "\n";
  os << "p = " << t.p << "\nd = " << t.d << "\nbeta = " << format(t.beta) << "\n";
  if (t.sigma) os << "sigma = " << format(*t.sigma) << "\n";
  if (t.alpha0) os << "alpha0 = " << format(*t.alpha0) << "\n";
  if (t.h) os << "h = " << format(*t.h) << "\n";
  os << "width_factor = " << format(c.width_factor) << "\n";
  os << "activation = " << (t.activation == Activation::Kind::standard_relu ? "relu" : "huberized") << "\n";
  const char* pol = t.schedule.policy == StepPolicy::theorem1 ? "theorem1"
                    : t.schedule.policy == StepPolicy::fixed  ? "fixed"
                                                               : "log_squared";
  os << "policy = " << pol << "\n";
  os << "q1 = " << format(t.schedule.q1) << "\nq2 = " << format(t.schedule.q2) << "\n";
  os << "c5 = " << format(t.schedule.c5) << "\nfixed_alpha = " << format(t.schedule.fixed_alpha) << "\n";
  os << "alpha_max = " << format(t.schedule.alpha_max) << "\n";
  os << "strict = " << (t.schedule.strict ? "true" : "false") << "\n";
  os << "T = " << t.T << "\nseed = " << t.seed << "\nseeds = " << c.seeds << "\n";
  os << "with_bias = " << (t.with_bias ? "true" : "false") << "\n";
  os << "c1 = " << format(t.c1) << "\nlemma5_slack = " << format(t.lemma5_slack) << "\n";
  os << "data = " << to_string(c.data) << "\nn = " << c.n << "\n";
  os << "radius = " << format(c.radius) << "\nseparation = " << format(c.separation)
     << "\nbalance = " << format(c.balance) << "\n";
  if (!c.data_file.empty()) os << "data_file = " << c.data_file << "\n";
  if (c.data_seed) os << "data_seed = " << *c.data_seed << "\n";
  os << "target_loss = " << format(c.target_loss) << "\n";
  if (!c.compare.empty()) os << "compare = " << c.compare << "\n";
  if (!c.sweep_param.empty()) os << "sweep_param = " << c.sweep_param << "\n";
  if (!c.sweep_values.empty()) {
    os << "sweep_values = ";
    for (std::size_t i = 0; i < c.sweep_values.size(); ++i) os << (i ? ", " : "") << format(c.sweep_values[i]);
    os << "\n";
  }
  return os.str();
}

}  // namespace hubergd
