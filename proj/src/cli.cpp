#include "dyadlab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dyadlab/circle.hpp"
#include "dyadlab/dyadic.hpp"
#include "dyadlab/errors.hpp"
#include "dyadlab/modulation.hpp"
#include "dyadlab/norms.hpp"
#include "dyadlab/toss.hpp"

namespace dyadlab::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

/// Every record is self-describing: it opens with the resolved configuration.
void echo_config(Record& r, const std::string& subcommand, const Config& cfg) {
  r.put("experiment", subcommand);
  for (const auto& [k, v] : cfg.values) r.put("cfg_" + k, v);
}

dyadic::HaarExpansion random_expansion(int depth, int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  dyadic::HaarExpansion e(depth, dim);
  for (int i = 0; i < dim; ++i) e.mean()[i] = unif(rng);
  for (std::uint32_t id = 1; id < e.cell_count(); ++id) {
    auto c = e.coeff_by_id(id);
    for (int i = 0; i < dim; ++i) c[i] = unif(rng);
  }
  return e;
}

SpaceDescriptor parse_space(const std::string& name, double p) {
  if (name == "scalar") return SpaceDescriptor::scalar(p);
  // l<q>x<d>, e.g. l2x2 or l3x4
  if (name.size() >= 4 && name[0] == 'l') {
    std::size_t xpos = name.find('x');
    if (xpos != std::string::npos) {
      double q = std::stod(name.substr(1, xpos - 1));
      int d = std::stoi(name.substr(xpos + 1));
      return SpaceDescriptor::lq(p, q, d);
    }
  }
  throw MalformedInputError("cannot parse space name: " + name +
                            " (expected 'scalar' or 'l<q>x<d>')");
}

RunResult run_verify_lemma(const Config& cfg) {
  RunResult out;
  Stopwatch clock;
  const double tol = cfg.get_double("tol", 1e-9);
  circle::QuadratureOptions quad{.abs_tol = cfg.get_double("quad_tol", 1e-11)};

  double c0_quad = circle::integrate_split(
                       [](double x) { return circle::eval_H_phi(circle::Sign::plus, x); }, 0.0,
                       circle::kPi / 2.0, {}, quad) /
                   (circle::kPi / 2.0);
  double c0_ser = circle::c0_series(1e-12);
  double route_gap = std::abs(c0_quad - c0_ser);

  auto hp = circle::project_quarters(
      circle::CircleFunction::named(circle::CircleFunction::Named::H_phi_plus), quad);
  auto hm = circle::project_quarters(
      circle::CircleFunction::named(circle::CircleFunction::Named::H_phi_minus), quad);
  double res_plus = 0.0, res_minus = 0.0;
  for (int qtr = 0; qtr < 4; ++qtr) {
    res_plus = std::max(res_plus,
                        std::abs(hp[qtr] - c0_ser * circle::quarter_sign(circle::Sign::minus, qtr)));
    res_minus = std::max(
        res_minus, std::abs(hm[qtr] + c0_ser * circle::quarter_sign(circle::Sign::plus, qtr)));
  }
  bool pass = route_gap < tol && res_plus < tol && res_minus < tol;

  Record r;
  echo_config(r, "verify-lemma", cfg);
  r.put("c0", c0_ser);
  r.put("c0_quadrature", c0_quad);
  r.put("route_gap", route_gap);
  r.put("residual_projection_plus", res_plus);
  r.put("residual_projection_minus", res_minus);
  r.put("pass", pass);
  r.put("wall_ms", clock.ms());
  out.records.push_back(std::move(r));

  std::ostringstream line;
  line.precision(10);
  line << std::fixed << "c0 = " << c0_ser << "  (projection residuals "
       << std::scientific << res_plus << ", " << res_minus << "; route gap " << route_gap << ")";
  out.summary.push_back(line.str());
  out.exit_code = pass ? 0 : 1;
  return out;
}

RunResult run_verify_weak_form(const Config& cfg) {
  RunResult out;
  const int depth = static_cast<int>(cfg.get_int("depth", 4));
  const int vec_depth = static_cast<int>(cfg.get_int("vector_depth", 3));
  const int trials = static_cast<int>(cfg.get_int("trials", 50));
  const double tol = cfg.get_double("tol", 1e-9);
  circle::QuadratureOptions quad{.abs_tol = cfg.get_double("quad_tol", 1e-12)};
  std::mt19937_64 rng(cfg.get_int("seed", 1));

  struct Batch {
    const char* label;
    int depth;
    int dim;
  };
  const Batch batches[] = {{"scalar", depth, 1}, {"l3x2-vs-dual", vec_depth, 2}};
  bool all_pass = true;
  for (const Batch& b : batches) {
    Stopwatch clock;
    double max_res = 0.0;
    for (int t = 0; t < trials; ++t) {
      auto f = dyadic::reduce_tilde(random_expansion(b.depth, b.dim, rng));
      auto g = random_expansion(b.depth, b.dim, rng);
      auto r = toss::weak_form_check(f, g, quad);
      max_res = std::max(max_res, r.residual);
    }
    bool pass = max_res < tol;
    all_pass = all_pass && pass;
    Record r;
    echo_config(r, "verify-weak-form", cfg);
    r.put("batch", b.label);
    r.put("depth", static_cast<long long>(b.depth));
    r.put("dim", static_cast<long long>(b.dim));
    r.put("trials", static_cast<long long>(trials));
    r.put("max_residual", max_res);
    r.put("pass", pass);
    r.put("wall_ms", clock.ms());
    out.records.push_back(std::move(r));
    std::ostringstream line;
    line << "weak form [" << b.label << "] max residual " << max_res << " over " << trials
         << " trials";
    out.summary.push_back(line.str());
  }
  out.exit_code = all_pass ? 0 : 1;
  return out;
}

RunResult run_verify_modulation(const Config& cfg) {
  RunResult out;
  Stopwatch clock;
  const int depth = static_cast<int>(cfg.get_int("depth", 2));
  const int order = static_cast<int>(cfg.get_int("order", 3));
  const double tol = cfg.get_double("tol", 1e-10);
  const double pair_tol = cfg.get_double("pair_tol", 1e-9);
  std::mt19937_64 rng(cfg.get_int("seed", 1));
  std::vector<double> psis = cfg.get_doubles("psis", "0,0.3,1.7");

  auto f = random_expansion(depth, 1, rng);
  std::vector<std::vector<double>> thetas;
  std::uniform_real_distribution<double> unif(-circle::kPi, circle::kPi);
  for (int i = 0; i < static_cast<int>(cfg.get_int("theta_probes", 3)); ++i) {
    std::vector<double> t(depth + 1);
    for (double& x : t) x = unif(rng);
    thetas.push_back(std::move(t));
  }

  auto report = modulation::verify_modulation_identity(f, order, thetas, psis);
  bool identity_pass = report.max_residual < tol;

  // An undersized schedule must be rejected through the dominance check.
  bool undersized_rejected = false;
  try {
    std::vector<std::int64_t> tiny(std::max(depth, 1), 1);
    auto bad = modulation::build_schedule(tiny);
    modulation::verify_modulation_identity(f, order, bad, thetas, psis);
  } catch (const DominanceError&) {
    undersized_rejected = true;
  }

  // psi / schedule independence of the modulated pairing.
  toss::TossFunction F = toss::lift(dyadic::reduce_tilde(f));
  toss::TossFunction G = toss::lift(random_expansion(depth, 1, rng));
  auto fh = modulation::truncate_lift(F, order, true);
  auto gm = modulation::truncate_lift(G, order, false);
  auto bounds = modulation::spectrum_bounds(F, order);
  auto sched_a = modulation::build_schedule(bounds);
  for (auto& b : bounds) b += 3;
  auto sched_b = modulation::build_schedule(bounds);
  const int grid = static_cast<int>(cfg.get_int("grid_per_var", 4 * order + 4));
  double reference = modulation::modulated_pairing(fh, gm, sched_a.n, psis.empty() ? 0.0 : psis[0],
                                                   grid);
  double pair_spread = 0.0;
  for (double psi : psis) {
    for (const auto& sched : {sched_a, sched_b}) {
      double v = modulation::modulated_pairing(fh, gm, sched.n, psi, grid);
      pair_spread = std::max(pair_spread, std::abs(v - reference));
    }
  }
  double psi_avg = modulation::psi_averaged_pairing(fh, gm, sched_a.n, grid);
  double avg_gap = std::abs(psi_avg - reference);
  bool invariance_pass = pair_spread < pair_tol && avg_gap < pair_tol;

  bool pass = identity_pass && undersized_rejected && invariance_pass;
  Record r;
  echo_config(r, "verify-modulation", cfg);
  r.put("identity_residual", report.max_residual);
  r.put("terms_checked", static_cast<long long>(report.terms_checked));
  r.put("undersized_rejected", undersized_rejected);
  r.put("pairing_spread", pair_spread);
  r.put("psi_average_gap", avg_gap);
  r.put("pass", pass);
  r.put("wall_ms", clock.ms());
  out.records.push_back(std::move(r));

  std::ostringstream line;
  line << "modulation identity residual " << report.max_residual << ", pairing spread "
       << pair_spread << ", undersized schedule rejected: " << (undersized_rejected ? "yes" : "no");
  out.summary.push_back(line.str());
  out.exit_code = pass ? 0 : 1;
  return out;
}

RunResult run_verify_distribution(const Config& cfg) {
  RunResult out;
  const int max_depth = static_cast<int>(cfg.get_int("depth", 6));
  const int trials = static_cast<int>(cfg.get_int("trials", 3));
  std::mt19937_64 rng(cfg.get_int("seed", 1));
  bool all_pass = true;
  for (int depth = 0; depth <= max_depth; ++depth) {
    Stopwatch clock;
    bool pass = true;
    std::size_t atoms = 0;
    for (int t = 0; t < trials; ++t) {
      int dim = (t % 2 == 0) ? 1 : 2;
      auto e = random_expansion(depth, dim, rng);
      auto report = toss::distribution_check(e);
      pass = pass && report.equal;
      atoms = std::max(atoms, report.distinct_state);
    }
    all_pass = all_pass && pass;
    Record r;
    echo_config(r, "verify-distribution", cfg);
    r.put("depth", static_cast<long long>(depth));
    r.put("trials", static_cast<long long>(trials));
    r.put("distinct_atoms", static_cast<long long>(atoms));
    r.put("pass", pass);
    r.put("wall_ms", clock.ms());
    out.records.push_back(std::move(r));
  }
  std::ostringstream line;
  line << "distribution equality " << (all_pass ? "holds" : "FAILS") << " up to depth "
       << max_depth;
  out.summary.push_back(line.str());
  out.exit_code = all_pass ? 0 : 1;
  return out;
}

RunResult run_estimate_norms(const Config& cfg) {
  RunResult out;
  norms::NormEstimateOptions opts;
  opts.restarts = static_cast<int>(cfg.get_int("restarts", 8));
  opts.iters = static_cast<int>(cfg.get_int("iters", 400));
  opts.tol = cfg.get_double("tol", 1e-10);
  opts.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  const double slack = cfg.get_double("slack", 1.10);
  const int depth = static_cast<int>(cfg.get_int("depth", 5));
  const int grid = static_cast<int>(cfg.get_int("grid", 512));
  const int vector_grid = static_cast<int>(cfg.get_int("vector_grid", 256));

  std::vector<norms::ComparisonCase> cases;
  for (double p : cfg.get_doubles("p_list", "1.5,2,3,4")) {
    for (const std::string& name : cfg.get_strings("space_list", "scalar,l2x2,l3x4")) {
      SpaceDescriptor space = parse_space(name, p);
      cases.push_back({space, depth, space.is_scalar() ? grid : vector_grid});
    }
  }
  Stopwatch clock;
  auto rows = norms::comparison_experiment(cases, opts, slack);
  bool all_pass = true;
  for (const auto& row : rows) {
    all_pass = all_pass && !row.violated;
    Record r;
    echo_config(r, "estimate-norms", cfg);
    r.put("p", row.p);
    r.put("space", row.space_name);
    r.put("depth", static_cast<long long>(row.depth));
    r.put("grid", static_cast<long long>(row.grid_size));
    r.put("s_lower", row.s_lower);
    r.put("h_lower", row.h_lower);
    r.put("ratio", row.ratio);
    r.put("c0", row.c0);
    r.put("inv_c0", row.inv_c0);
    r.put("envelope", row.envelope);
    r.put("pass", !row.violated);
    r.put("wall_ms", clock.ms());
    out.records.push_back(std::move(r));
    std::ostringstream line;
    line << "p=" << row.p << " " << row.space_name << ": s>=" << row.s_lower
         << " h>=" << row.h_lower << " ratio " << row.ratio << (row.violated ? "  VIOLATION" : "");
    out.summary.push_back(line.str());
  }
  out.exit_code = all_pass ? 0 : 1;
  return out;
}

RunResult run_materialize(const Config& cfg) {
  RunResult out;
  Stopwatch clock;
  const int depth = static_cast<int>(cfg.get_int("depth", 3));
  const std::string op_name = cfg.get("op", "s0");
  norms::NamedOp op = norms::parse_op(op_name);

  std::vector<int> alpha(std::size_t{1} << (depth + 1), 1);
  if (op == norms::NamedOp::T_alpha) {
    std::mt19937_64 rng(cfg.get_int("seed", 1));
    std::uniform_int_distribution<int> coin(0, 1);
    for (std::size_t i = 1; i < alpha.size(); ++i) alpha[i] = coin(rng) ? 1 : -1;
  }
  auto mat = norms::materialize(op, depth, &alpha);

  Record r;
  echo_config(r, "materialize", cfg);
  r.put("op", mat.name);
  r.put("rows", static_cast<long long>(mat.m.rows()));
  r.put("norm2", norms::norm_2_exact(mat.m));
  for (Eigen::Index i = 0; i < mat.m.rows(); ++i) {
    std::ostringstream rowtxt;
    for (Eigen::Index j = 0; j < mat.m.cols(); ++j) {
      if (j) rowtxt << ";";
      rowtxt << format_double(mat.m(i, j));
    }
    r.put("row" + std::to_string(i), rowtxt.str());
  }
  r.put("pass", true);
  r.put("wall_ms", clock.ms());
  out.records.push_back(std::move(r));
  out.summary.push_back("materialized " + mat.name + " at depth " + std::to_string(depth));
  out.exit_code = 0;
  return out;
}

}  // namespace

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    throw MalformedInputError("config key '" + key + "' is not an integer: " + it->second);
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw MalformedInputError("config key '" + key + "' is not a number: " + it->second);
  }
}

std::vector<double> Config::get_doubles(const std::string& key, const std::string& fallback) const {
  std::vector<double> out;
  for (const std::string& tok : split(get(key, fallback), ',')) out.push_back(std::stod(tok));
  return out;
}

std::vector<std::string> Config::get_strings(const std::string& key,
                                             const std::string& fallback) const {
  return split(get(key, fallback), ',');
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInputError("cannot open config file: " + path);
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw MalformedInputError("config line " + std::to_string(lineno) +
                                " is not key=value: " + line);
    cfg.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return cfg;
}

void Record::put(const std::string& key, const std::string& value) {
  fields.emplace_back(key, value);
}
void Record::put(const std::string& key, double value) { fields.emplace_back(key, format_double(value)); }
void Record::put(const std::string& key, long long value) {
  fields.emplace_back(key, std::to_string(value));
}
void Record::put(const std::string& key, bool value) {
  fields.emplace_back(key, value ? "1" : "0");
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string to_csv(const std::vector<Record>& records) {
  if (records.empty()) return "";
  std::ostringstream out;
  const Record& head = records.front();
  for (std::size_t i = 0; i < head.fields.size(); ++i) {
    if (i) out << ",";
    out << csv_escape(head.fields[i].first);
  }
  out << "\n";
  for (const Record& r : records) {
    for (std::size_t i = 0; i < r.fields.size(); ++i) {
      if (i) out << ",";
      out << csv_escape(r.fields[i].second);
    }
    out << "\n";
  }
  return out.str();
}

std::string to_json(const std::vector<Record>& records) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const Record& r : records) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.fields) row[k] = v;
    rows.push_back(std::move(row));
  }
  return rows.dump(2) + "\n";
}

std::vector<std::string> subcommands() {
  return {"verify-lemma",        "verify-weak-form", "verify-modulation",
          "verify-distribution", "estimate-norms",   "materialize"};
}

Config defaults_for(const std::string& subcommand) {
  Config cfg;
  cfg.set("seed", "1");
  cfg.set("format", "csv");
  if (subcommand == "verify-lemma") {
    cfg.set("tol", "1e-9");
    cfg.set("quad_tol", "1e-11");
  } else if (subcommand == "verify-weak-form") {
    cfg.set("depth", "4");
    cfg.set("vector_depth", "3");
    cfg.set("trials", "50");
    cfg.set("tol", "1e-9");
    cfg.set("quad_tol", "1e-12");
  } else if (subcommand == "verify-modulation") {
    cfg.set("depth", "2");
    cfg.set("order", "3");
    cfg.set("tol", "1e-10");
    cfg.set("pair_tol", "1e-9");
    cfg.set("psis", "0,0.3,1.7");
    cfg.set("theta_probes", "3");
  } else if (subcommand == "verify-distribution") {
    cfg.set("depth", "6");
    cfg.set("trials", "3");
  } else if (subcommand == "estimate-norms") {
    cfg.set("p_list", "1.5,2,3,4");
    cfg.set("space_list", "scalar,l2x2,l3x4");
    cfg.set("depth", "5");
    cfg.set("grid", "512");
    cfg.set("vector_grid", "256");
    cfg.set("restarts", "8");
    cfg.set("iters", "400");
    cfg.set("tol", "1e-10");
    cfg.set("slack", "1.10");
  } else if (subcommand == "materialize") {
    cfg.set("op", "s0");
    cfg.set("depth", "3");
  } else {
    throw MalformedInputError("unknown subcommand: " + subcommand);
  }
  return cfg;
}

RunResult run(const std::string& subcommand, const Config& config) {
  if (subcommand == "verify-lemma") return run_verify_lemma(config);
  if (subcommand == "verify-weak-form") return run_verify_weak_form(config);
  if (subcommand == "verify-modulation") return run_verify_modulation(config);
  if (subcommand == "verify-distribution") return run_verify_distribution(config);
  if (subcommand == "estimate-norms") return run_estimate_norms(config);
  if (subcommand == "materialize") return run_materialize(config);
  throw MalformedInputError("unknown subcommand: " + subcommand);
}

}  // namespace dyadlab::cli
