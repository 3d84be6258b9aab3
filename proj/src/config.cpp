#include <chebfit/csv.hpp>
#include <chebfit/experiments.hpp>
#include <chebfit/random.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace chebfit {

namespace {

const std::set<std::string> kFamilies = {"gaussian", "rademacher", "sphere", "orthonormal",
                                         "cauchy"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Parser {
  int line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
  }

  double real(const std::string& v) const {
    try {
      return csv::parse_real(v, "config");
    } catch (const InvalidInputError&) {
      fail("expected a number, got '" + v + "'");
    }
  }

  Index count(const std::string& v) const {
    long long x = 0;
    try {
      x = csv::parse_integer(v, "config");
    } catch (const InvalidInputError&) {
      fail("expected an integer, got '" + v + "'");
    }
    if (x < 0) fail("expected a nonnegative integer, got '" + v + "'");
    return static_cast<Index>(x);
  }

  bool boolean(const std::string& v) const {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail("expected true or false, got '" + v + "'");
  }

  // Comma-separated integers; an item `a:b:step` expands to a, a+step, ..., <= b.
  std::vector<Index> list(const std::string& v) const {
    std::vector<Index> out;
    if (v.empty()) return out;
    for (const std::string& raw : csv::split_line(v)) {
      const std::string item = trim(raw);
      const auto c1 = item.find(':');
      if (c1 == std::string::npos) {
        out.push_back(count(item));
        continue;
      }
      const auto c2 = item.find(':', c1 + 1);
      if (c2 == std::string::npos) fail("range must be start:stop:step, got '" + item + "'");
      const Index start = count(item.substr(0, c1));
      const Index stop = count(item.substr(c1 + 1, c2 - c1 - 1));
      const Index step = count(item.substr(c2 + 1));
      if (step == 0 || stop < start) fail("empty or invalid range '" + item + "'");
      for (Index x = start; x <= stop; x += step) out.push_back(x);
    }
    return out;
  }
};

std::string join(const std::vector<Index>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i]);
  }
  return out;
}

ExperimentKind kind_from(const Parser& ps, const std::string& v) {
  for (auto k : {ExperimentKind::RateCurve, ExperimentKind::LassoCompare, ExperimentKind::OlsVsCheb,
                 ExperimentKind::Containment, ExperimentKind::BoundCheck}) {
    if (v == to_string(k)) return k;
  }
  ps.fail("unknown experiment kind '" + v + "'");
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void validate_config(const ExperimentConfig& c) {
  check(kFamilies.count(c.design_family) == 1, "unknown design family '" + c.design_family + "'");
  check(c.a > 0.0 && std::isfinite(c.a), "noise radius a must be > 0");
  check(c.reps >= 1, "reps must be >= 1");
  check(c.design_rho > -1.0 && c.design_rho < 1.0, "design rho must be in (-1, 1)");
  const auto positive = [](const std::vector<Index>& g) {
    return std::all_of(g.begin(), g.end(), [](Index x) { return x > 0; });
  };
  check(positive(c.n_grid) && positive(c.p_grid) && positive(c.s_grid) && positive(c.m_grid),
        "grid values must be positive");
  const auto even_p = [&] {
    return std::all_of(c.p_grid.begin(), c.p_grid.end(), [](Index p) { return p % 2 == 0; });
  };
  switch (c.experiment) {
    case ExperimentKind::RateCurve:
      check(c.design_family == "gaussian" || c.design_family == "rademacher" ||
                c.design_family == "sphere",
            "rate curves support gaussian, rademacher and sphere designs");
      [[fallthrough]];
    case ExperimentKind::OlsVsCheb:
    case ExperimentKind::BoundCheck:
      check(!c.n_grid.empty() && !c.p_grid.empty(), "grid.n and grid.p must be nonempty");
      check(even_p(), "grid.p values must be even");
      if (c.experiment != ExperimentKind::RateCurve) {
        check(c.p_grid.size() == 1, "this experiment takes a single grid.p value");
        check(c.n_grid.size() >= 2 || c.experiment == ExperimentKind::BoundCheck,
              "grid.n needs at least two values");
      }
      break;
    case ExperimentKind::LassoCompare:
      check(!c.n_grid.empty() && !c.s_grid.empty(), "grid.n and grid.s must be nonempty");
      check(std::all_of(c.s_grid.begin(), c.s_grid.end(), [](Index s) { return s % 2 == 0; }),
            "grid.s values must be even");
      check(c.lambda_grid.count >= 1 && c.lasso_count >= 1, "lambda counts must be >= 1");
      check(c.lambda_grid.low_mult > 0.0 && c.lambda_grid.high_mult >= c.lambda_grid.low_mult,
            "lambda multipliers must satisfy 0 < low_mult <= high_mult");
      check(c.lasso_ratio > 0.0 && c.lasso_ratio <= 1.0, "lasso_ratio must be in (0, 1]");
      break;
    case ExperimentKind::Containment:
      check(!c.p_grid.empty() && !c.m_grid.empty(), "grid.p and grid.m must be nonempty");
      check(std::all_of(c.p_grid.begin(), c.p_grid.end(), [](Index p) { return p >= 2; }),
            "containment needs p >= 2");
      check(!c.xi || *c.xi > 0.0, "containment.xi must be > 0");
      break;
  }
  check(c.gamma > 0.0 && c.gamma < 1.0, "bounds.gamma must be in (0, 1)");
  check(c.L > 0.0, "bounds.L must be > 0");
  check(c.cell_budget_ms >= 0.0, "cell_budget_ms must be >= 0");
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::RateCurve: return "rate";
    case ExperimentKind::LassoCompare: return "lasso-compare";
    case ExperimentKind::OlsVsCheb: return "ols-vs-cheb";
    case ExperimentKind::Containment: return "containment";
    case ExperimentKind::BoundCheck: return "bound-check";
  }
  return "unknown";
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  Parser ps;
  bool have_kind = false;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"experiment.kind", [&](auto& v) { c.experiment = kind_from(ps, v); have_kind = true; }},
      {"experiment.reps", [&](auto& v) { c.reps = ps.count(v); }},
      {"experiment.seed", [&](auto& v) {
         try {
           c.seed = std::stoull(v, nullptr, 0);
         } catch (const std::exception&) {
           ps.fail("bad seed '" + v + "'");
         }
       }},
      {"experiment.output_dir", [&](auto& v) { c.output_dir = v; }},
      {"experiment.record_timing", [&](auto& v) { c.record_timing = ps.boolean(v); }},
      {"experiment.cell_budget_ms", [&](auto& v) { c.cell_budget_ms = ps.real(v); }},
      {"design.family", [&](auto& v) { c.design_family = v; }},
      {"design.rho", [&](auto& v) { c.design_rho = ps.real(v); }},
      {"noise.family", [&](auto& v) {
         if (v != "uniform") ps.fail("only uniform noise is configurable");
       }},
      {"noise.a", [&](auto& v) { c.a = ps.real(v); }},
      {"grid.n", [&](auto& v) { c.n_grid = ps.list(v); }},
      {"grid.p", [&](auto& v) { c.p_grid = ps.list(v); }},
      {"grid.s", [&](auto& v) { c.s_grid = ps.list(v); }},
      {"grid.m", [&](auto& v) { c.m_grid = ps.list(v); }},
      {"grid.p_offset", [&](auto& v) { c.p_offset = ps.count(v); }},
      {"lambda.count", [&](auto& v) { c.lambda_grid.count = ps.count(v); }},
      {"lambda.low_mult", [&](auto& v) { c.lambda_grid.low_mult = ps.real(v); }},
      {"lambda.high_mult", [&](auto& v) { c.lambda_grid.high_mult = ps.real(v); }},
      {"lambda.exponent", [&](auto& v) { c.lambda_grid.exponent = ps.real(v); }},
      {"lambda.lasso_count", [&](auto& v) { c.lasso_count = ps.count(v); }},
      {"lambda.lasso_ratio", [&](auto& v) { c.lasso_ratio = ps.real(v); }},
      {"containment.xi", [&](auto& v) { c.xi = ps.real(v); }},
      {"containment.directions", [&](auto& v) { c.directions = ps.count(v); }},
      {"bounds.gamma", [&](auto& v) { c.gamma = ps.real(v); }},
      {"bounds.L", [&](auto& v) { c.L = ps.real(v); }},
  };

  std::string section;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++ps.line;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') ps.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) ps.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = setters.find(full);
    if (it == setters.end()) ps.fail("unknown key '" + full + "'");
    if (!seen.insert(full).second) ps.fail("duplicate key '" + full + "'");
    it->second(trim(line.substr(eq + 1)));
  }
  if (!have_kind) throw ConfigError("config is missing experiment.kind");
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const ExperimentConfig& c) {
  using csv::format_real;
  std::ostringstream o;
  o << "[experiment]\n"
    << "kind = " << to_string(c.experiment) << "\n"
    << "reps = " << c.reps << "\n"
    << "seed = " << c.seed << "\n"
    << "output_dir = " << c.output_dir.string() << "\n"
    << "record_timing = " << (c.record_timing ? "true" : "false") << "\n"
    << "cell_budget_ms = " << format_real(c.cell_budget_ms) << "\n"
    << "[design]\n"
    << "family = " << c.design_family << "\n"
    << "rho = " << format_real(c.design_rho) << "\n"
    << "[noise]\n"
    << "family = uniform\n"
    << "a = " << format_real(c.a) << "\n"
    << "[grid]\n"
    << "n = " << join(c.n_grid) << "\n"
    << "p = " << join(c.p_grid) << "\n"
    << "s = " << join(c.s_grid) << "\n"
    << "m = " << join(c.m_grid) << "\n"
    << "p_offset = " << c.p_offset << "\n"
    << "[lambda]\n"
    << "count = " << c.lambda_grid.count << "\n"
    << "low_mult = " << format_real(c.lambda_grid.low_mult) << "\n"
    << "high_mult = " << format_real(c.lambda_grid.high_mult) << "\n"
    << "exponent = " << format_real(c.lambda_grid.exponent) << "\n"
    << "lasso_count = " << c.lasso_count << "\n"
    << "lasso_ratio = " << format_real(c.lasso_ratio) << "\n"
    << "[containment]\n";
  if (c.xi) o << "xi = " << format_real(*c.xi) << "\n";
  o << "directions = " << c.directions << "\n"
    << "[bounds]\n"
    << "gamma = " << format_real(c.gamma) << "\n"
    << "L = " << format_real(c.L) << "\n";
  return o.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig copy = cfg;
  copy.output_dir.clear();
  return rng::fnv1a(to_text(copy));
}

DesignSpec design_for(const ExperimentConfig& cfg, Index p) {
  const std::string& f = cfg.design_family;
  if (f == "gaussian") {
    Matrix sigma = Matrix::Constant(p, p, cfg.design_rho);
    sigma.diagonal().setOnes();
    return GaussianDesign{sigma};
  }
  if (f == "rademacher") return RademacherDesign{p};
  if (f == "sphere") return SphereDesign{p};
  if (f == "orthonormal") return OrthonormalDesign{Matrix::Identity(p, p)};
  if (f == "cauchy") return CauchyDesign{p};
  throw ConfigError("unknown design family '" + f + "'");
}

std::vector<double> chebyshev_lasso_grid(const LambdaGridSpec& spec, Index n, Index p) {
  if (spec.count < 1 || n < 1 || p < 2) throw InvalidInputError("lambda grid: bad arguments");
  const double base = std::sqrt(std::log(static_cast<double>(p)) /
                                std::pow(static_cast<double>(n), spec.exponent));
  const double lo = spec.low_mult * base;
  const double hi = spec.high_mult * base;
  std::vector<double> out(static_cast<std::size_t>(spec.count));
  for (Index k = 0; k < spec.count; ++k) {
    out[static_cast<std::size_t>(k)] =
        spec.count == 1 ? lo
                        : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(spec.count - 1);
  }
  return out;
}

}  // namespace chebfit
