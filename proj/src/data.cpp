#include "hubergd/data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hubergd/error.hpp"
#include "hubergd/rng.hpp"

namespace hubergd {

namespace {

constexpr double kNormTol = 1e-12;

double norm(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc);
}

double inner(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(acc);
}

[[noreturn]] void spec_error(const std::string& assumption, const std::string& detail) {
  throw Error(ErrorKind::spec_validation, "cluster assumption violated (" + assumption + "): " + detail);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

ClusterSpec ClusterSpec::orthogonal(std::size_t d, double r, double delta, double eps,
                                    std::size_t n) {
  if (d < 4) throw Error(ErrorKind::invalid_parameter, "orthogonal centers need d >= 4");
  ClusterSpec spec;
  for (std::size_t k = 0; k < 4; ++k) {
    spec.centers[k].assign(d, 0.0);
    spec.centers[k][k] = 1.0;
  }
  spec.radius = r;
  spec.separation = delta;
  spec.balance = eps;
  spec.n = n;
  return spec;
}

MixtureSpec MixtureSpec::xor_preset(std::size_t n) {
  const double a = std::sqrt(0.5);
  MixtureSpec spec;
  spec.components = {{{a, -a}, 1}, {{-a, a}, 1}, {{a, a}, -1}, {{-a, -a}, -1}};
  spec.covariance_scale = 0.01;
  spec.n = n;
  return spec;
}

MixtureSpec MixtureSpec::shoulders_preset(std::size_t n) {
  const double a = std::sqrt(0.5);
  MixtureSpec spec;
  spec.components = {{{1.0, 0.0}, 1}, {{0.0, 1.0}, 1}, {{a, a}, -1}, {{-a, -a}, -1}};
  spec.covariance_scale = 0.01;
  spec.n = n;
  return spec;
}

std::array<std::size_t, 4> cluster_sizes(std::size_t n) {
  std::array<std::size_t, 4> sizes{};
  for (std::size_t k = 0; k < 4; ++k) sizes[k] = n / 4 + (k < n % 4 ? 1 : 0);
  return sizes;
}

void check_cluster_spec(const ClusterSpec& spec) {
  const std::size_t d = spec.dim();
  if (d == 0) spec_error("center norms", "centers are empty");
  for (std::size_t k = 0; k < 4; ++k) {
    if (spec.centers[k].size() != d) spec_error("center norms", "centers differ in dimension");
    const double nk = norm(spec.centers[k]);
    if (std::abs(nk - 1.0) > kNormTol) {
      spec_error("center norms", "||mu_" + std::to_string(k + 1) + "|| = " + fmt(nk));
    }
  }
  if (!(spec.radius >= 0.0) || !(spec.radius < 1.0)) {
    spec_error("cluster radius", "need 0 <= r < 1, got r = " + fmt(spec.radius));
  }
  if (spec.radius > 0.0 && d < 2) spec_error("cluster radius", "r > 0 needs d >= 2");
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t l = k + 1; l < 4; ++l) {
      if (ClusterSpec::labels[k] == ClusterSpec::labels[l]) continue;
      const double ip = inner(spec.centers[k], spec.centers[l]);
      if (ip > spec.separation) {
        spec_error("separation", "mu_" + std::to_string(k + 1) + " . mu_" + std::to_string(l + 1) +
                                     " = " + fmt(ip) + " > Delta = " + fmt(spec.separation));
      }
    }
  }
  if (!(spec.balance >= 0.0)) spec_error("cluster balance", "epsilon must be >= 0");
  if (spec.n == 0) spec_error("cluster balance", "n must be positive");
  const double n = static_cast<double>(spec.n);
  for (std::size_t nk : cluster_sizes(spec.n)) {
    const double lo = (0.25 - spec.balance) * n;
    const double hi = (0.25 + spec.balance) * n;
    if (static_cast<double>(nk) < lo || static_cast<double>(nk) > hi) {
      spec_error("cluster balance", "cluster size " + std::to_string(nk) + " outside [" + fmt(lo) +
                                        ", " + fmt(hi) + "]");
    }
  }
}

Dataset generate_clusters(const ClusterSpec& spec, std::uint64_t seed) {
  check_cluster_spec(spec);
  const std::size_t d = spec.dim();
  Rng rng(seed);
  Dataset D;
  D.dim = d;
  std::vector<double> x(d), t(d);
  for (std::size_t s = 0; s < spec.n; ++s) {
    const std::size_t k = s % 4;
    const auto& mu = spec.centers[k];
    if (spec.radius == 0.0) {
      x = mu;
    } else {
      for (;;) {
        // Uniform direction in the tangent space at mu.
        double tn = 0.0;
        do {
          for (auto& v : t) v = rng.normal();
          const double proj = inner(t, mu);
          for (std::size_t j = 0; j < d; ++j) t[j] -= proj * mu[j];
          tn = norm(t);
        } while (tn < 1e-12);
        const double rho = spec.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d - 1));
        for (std::size_t j = 0; j < d; ++j) x[j] = mu[j] + rho * t[j] / tn;
        const double xn = norm(x);
        for (auto& v : x) v /= xn;
        if (distance(x, mu) <= spec.radius) break;
      }
    }
    D.push_back(x, ClusterSpec::labels[k], static_cast<int>(k + 1));
  }
  return D;
}

Dataset generate_mixture(const MixtureSpec& spec, std::uint64_t seed, bool normalize) {
  if (spec.n == 0) throw Error(ErrorKind::invalid_input, "mixture sample count must be positive");
  if (!(spec.covariance_scale > 0.0)) {
    throw Error(ErrorKind::invalid_parameter, "covariance_scale must be positive");
  }
  std::vector<const MixtureComponent*> pos, neg;
  for (const auto& c : spec.components) {
    if (c.mean.size() != spec.components.front().mean.size() || c.mean.empty()) {
      throw Error(ErrorKind::invalid_parameter, "mixture means differ in dimension");
    }
    (c.label == 1 ? pos : neg).push_back(&c);
  }
  if (pos.empty() || neg.empty()) {
    throw Error(ErrorKind::invalid_parameter, "mixture needs at least one component per label");
  }
  const std::size_t d = spec.components.front().mean.size();
  const double sd = std::sqrt(spec.covariance_scale);
  Rng rng(seed);
  Dataset D;
  D.dim = d;
  std::vector<double> x(d);
  // Labels alternate; components cycle within each label.
  for (std::size_t s = 0; s < spec.n; ++s) {
    const bool positive = s % 2 == 0;
    const auto& comps = positive ? pos : neg;
    const MixtureComponent& c = *comps[(s / 2) % comps.size()];
    for (std::size_t j = 0; j < d; ++j) x[j] = c.mean[j] + sd * rng.normal();
    if (normalize) {
      const double xn = norm(x);
      if (xn == 0.0) throw Error(ErrorKind::invalid_input, "cannot normalize a zero sample");
      for (auto& v : x) v /= xn;
    }
    D.push_back(x, c.label);
  }
  return D;
}

Dataset random_unit_points(std::size_t d, std::size_t n, std::uint64_t seed) {
  if (d == 0 || n == 0) throw Error(ErrorKind::invalid_input, "need d >= 1 and n >= 1");
  Rng rng(seed);
  Dataset D;
  D.dim = d;
  std::vector<double> x(d);
  for (std::size_t s = 0; s < n; ++s) {
    double nn = 0.0;
    while (nn < 1e-12) {
      for (double& v : x) v = rng.normal();
      nn = norm(x);
    }
    for (double& v : x) v /= nn;
    D.push_back(x, s % 2 == 0 ? 1 : -1);
  }
  return D;
}

Dataset append_constant(const Dataset& D, double scale, double constant) {
  Dataset out;
  out.dim = D.dim + 1;
  out.labels = D.labels;
  out.cluster_of = D.cluster_of;
  out.features.reserve(D.size() * out.dim);
  for (std::size_t s = 0; s < D.size(); ++s) {
    for (double v : D.feature(s)) out.features.push_back(scale * v);
    out.features.push_back(scale * constant);
  }
  return out;
}

Dataset lift_dataset(const Dataset& D) {
  for (std::size_t s = 0; s < D.size(); ++s) {
    double acc = 0.0;
    for (double v : D.feature(s)) acc += v * v;
    if (std::abs(std::sqrt(acc) - 1.0) > kNormTol) {
      throw Error(ErrorKind::invalid_input,
                  "lifting needs unit-norm features; sample " + std::to_string(s) +
                      " has norm " + fmt(std::sqrt(acc)));
    }
  }
  const double c = 1.0 / std::sqrt(2.0);
  Dataset out = append_constant(D, c, 1.0);
  out.lifted = true;
  return out;
}

std::vector<double> lift_point(const std::vector<double>& x) {
  const double c = 1.0 / std::sqrt(2.0);
  std::vector<double> out;
  out.reserve(x.size() + 1);
  for (double v : x) out.push_back(v * c);
  out.push_back(c);
  return out;
}

LiftedSchedule lift_init_and_steps(double sigma, const std::vector<double>& steps) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::invalid_parameter, "sigma must be positive");
  LiftedSchedule out;
  out.sigma = std::sqrt(2.0) * sigma;
  out.steps.reserve(steps.size());
  for (double a : steps) out.steps.push_back(2.0 * a);
  return out;
}

bool ValidationReport::all_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AssumptionCheck* ValidationReport::find(const std::string& name) const noexcept {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ValidationReport validate_assumptions(const Dataset& D, const ClusterSpec& spec) {
  ValidationReport report;
  if (!D.has_clusters()) throw Error(ErrorKind::invalid_input, "dataset lacks cluster memberships");
  const std::size_t n = D.size();
  const double sqrt2 = std::sqrt(2.0);

  // Centers in the dataset's space.
  std::array<std::vector<double>, 4> mu;
  for (std::size_t k = 0; k < 4; ++k) mu[k] = D.lifted ? lift_point(spec.centers[k]) : spec.centers[k];
  const double radius = D.lifted ? spec.radius / sqrt2 : spec.radius;
  const double separation = D.lifted ? (1.0 + spec.separation) / 2.0 : spec.separation;

  {
    AssumptionCheck c{"unit norms", true, 0.0, kNormTol, ""};
    for (std::size_t s = 0; s < n; ++s) {
      double acc = 0.0;
      for (double v : D.feature(s)) acc += v * v;
      const double dev = std::abs(std::sqrt(acc) - 1.0);
      if (dev > c.worst_value) {
        c.worst_value = dev;
        c.witness = "sample " + std::to_string(s);
      }
    }
    c.passed = c.worst_value <= c.threshold;
    report.checks.push_back(c);
  }
  {
    AssumptionCheck c{"center norms", true, 0.0, kNormTol, ""};
    for (std::size_t k = 0; k < 4; ++k) {
      const double dev = std::abs(norm(spec.centers[k]) - 1.0);
      if (dev > c.worst_value) {
        c.worst_value = dev;
        c.witness = "mu_" + std::to_string(k + 1);
      }
    }
    c.passed = c.worst_value <= c.threshold;
    report.checks.push_back(c);
  }
  {
    AssumptionCheck c{"cluster radius", true, 0.0, radius, ""};
    for (std::size_t s = 0; s < n; ++s) {
      const int k = D.cluster_of[s];
      if (mu[k - 1].size() != D.dim) throw Error(ErrorKind::shape, "center dimension mismatch");
      const double dist = distance(D.feature(s), mu[k - 1]);
      if (dist > c.worst_value) {
        c.worst_value = dist;
        c.witness = "sample " + std::to_string(s) + " (cluster " + std::to_string(k) + ")";
      }
    }
    // Rounding in the renormalization can exceed r by an ulp or two.
    c.passed = c.worst_value <= c.threshold + 1e-12;
    report.checks.push_back(c);
  }
  {
    AssumptionCheck c{"separation", true, -std::numeric_limits<double>::infinity(), separation, ""};
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t l = k + 1; l < 4; ++l) {
        if (ClusterSpec::labels[k] == ClusterSpec::labels[l]) continue;
        const double ip = inner(mu[k], mu[l]);
        if (ip > c.worst_value) {
          c.worst_value = ip;
          c.witness = "mu_" + std::to_string(k + 1) + " . mu_" + std::to_string(l + 1);
        }
      }
    }
    c.passed = c.worst_value <= c.threshold + 1e-15;
    report.checks.push_back(c);
  }
  {
    std::array<std::size_t, 4> sizes{};
    for (int k : D.cluster_of) ++sizes[k - 1];
    const double lo = (0.25 - spec.balance) * static_cast<double>(n);
    const double hi = (0.25 + spec.balance) * static_cast<double>(n);
    AssumptionCheck c{"cluster balance", true, 0.0, spec.balance, ""};
    for (std::size_t k = 0; k < 4; ++k) {
      const double frac_dev = std::abs(static_cast<double>(sizes[k]) / static_cast<double>(n) - 0.25);
      if (frac_dev >= c.worst_value) {
        c.worst_value = frac_dev;
        c.witness = "cluster " + std::to_string(k + 1) + " has " + std::to_string(sizes[k]);
      }
      if (static_cast<double>(sizes[k]) < lo || static_cast<double>(sizes[k]) > hi) c.passed = false;
    }
    report.checks.push_back(c);
  }
  {
    AssumptionCheck c{"label consistency", true, 0.0, 0.0, ""};
    for (std::size_t s = 0; s < n; ++s) {
      if (D.labels[s] != ClusterSpec::labels[D.cluster_of[s] - 1]) {
        c.passed = false;
        c.worst_value += 1.0;
        if (c.witness.empty()) c.witness = "sample " + std::to_string(s);
      }
    }
    report.checks.push_back(c);
  }

  // Pairwise bounds on the lifted points.
  const Dataset lifted = D.lifted ? D : append_constant(D, 1.0 / sqrt2, 1.0);
  const double r = spec.radius;
  AssumptionCheck opp{"lifted opposite-label inner product", true,
                      -std::numeric_limits<double>::infinity(),
                      (1.0 + spec.separation) / 2.0 + 2.0 * r, ""};
  AssumptionCheck same{"lifted same-cluster inner product", true,
                       std::numeric_limits<double>::infinity(), 1.0 - 2.0 * r, ""};
  AssumptionCheck nonneg{"lifted inner products nonnegative", true,
                         std::numeric_limits<double>::infinity(), 0.0, ""};
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t q = s + 1; q < n; ++q) {
      const double ip = inner(lifted.feature(s), lifted.feature(q));
      const std::string pair = "(" + std::to_string(s) + ", " + std::to_string(q) + ")";
      if (ip < nonneg.worst_value) {
        nonneg.worst_value = ip;
        nonneg.witness = pair;
      }
      if (D.labels[s] != D.labels[q] && ip > opp.worst_value) {
        opp.worst_value = ip;
        opp.witness = pair;
      }
      if (D.cluster_of[s] == D.cluster_of[q] && ip < same.worst_value) {
        same.worst_value = ip;
        same.witness = pair;
      }
    }
  }
  // The 1/sqrt2 scaling costs an ulp or two at r = 0.
  opp.passed = !(opp.worst_value > opp.threshold + 1e-12);
  same.passed = !(same.worst_value < same.threshold - 1e-12);
  nonneg.passed = !(nonneg.worst_value < -1e-15);
  report.checks.push_back(opp);
  report.checks.push_back(same);
  report.checks.push_back(nonneg);
  return report;
}

}  // namespace hubergd
