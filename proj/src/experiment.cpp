#include "otdro/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "otdro/rng.hpp"

namespace otdro {

namespace {

constexpr std::uint64_t kReferenceStream = 0xffffffffffULL;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Dataset draw_sample(const ExperimentConfig& cfg, std::uint64_t stream, std::size_t n) {
  return synthesize_dataset(cfg.mixture, SplitMix64::substream(cfg.seed, stream).next_u64(), n,
                            cfg.fam.box_b());
}

double dual_value(const ExperimentConfig& cfg, const std::vector<double>& theta,
                  const Dataset& data) {
  DualProblem p;
  p.fam = cfg.fam;
  p.theta = theta;
  p.cost = cfg.cost;
  p.divergence = cfg.divergence;
  p.r = cfg.r;
  p.sample = data;
  p.inner = cfg.inner;
  p.outer_tol = cfg.outer_tol;
  if (!cfg.divergence) return ot_dro_dual(p).value;
  if (cfg.divergence->family() == FDivergence::Family::KL) return kl_dro_dual(p).value;
  return otreg_fdiv_dual(p).value;
}

std::vector<std::vector<double>> theta_grid(int k, int points_per_axis) {
  std::vector<std::vector<double>> grid;
  std::vector<int> idx(k, 0);
  while (true) {
    std::vector<double> th(k);
    for (int j = 0; j < k; ++j)
      th[j] = points_per_axis == 1
                  ? 0.0
                  : -1.0 + 2.0 * idx[j] / static_cast<double>(points_per_axis - 1);
    double nrm = 0.0;
    for (double c : th) nrm += c * c;
    nrm = std::sqrt(nrm);
    if (nrm > 1.0)
      for (auto& c : th) c /= nrm;
    grid.push_back(th);
    int j = 0;
    while (j < k && ++idx[j] == points_per_axis) idx[j++] = 0;
    if (j == k) break;
  }
  return grid;
}

double grid_min_value(const ExperimentConfig& cfg, const std::vector<std::vector<double>>& grid,
                      const Dataset& data) {
  double best = HUGE_VAL;
  for (const auto& th : grid) best = std::min(best, dual_value(cfg, th, data));
  return best;
}

double compute_envelope(const ExperimentConfig& cfg, double* eps_tail_C2) {
  const double n = static_cast<double>(cfg.n_train);
  if (cfg.scenario == Scenario::OtValues || cfg.scenario == Scenario::OtErm) {
    const double dn = dn_bound(cfg.fam, cfg.cost, n, cfg.bounds);
    *eps_tail_C2 = 1.0;
    return (cfg.scenario == Scenario::OtValues ? 2.0 : 4.0) * dn;
  }
  if (!cfg.divergence)
    throw std::invalid_argument("experiment: OT-regularized scenario requires a divergence");
  const DivergenceConstants consts = cfg.divergence->constants(cfg.bounds.p0, cfg.cost.M);
  const double rn = rn_bound(cfg.fam, cfg.cost, *cfg.divergence, n, cfg.bounds);
  const double rnt =
      rn_tilde_bound(cfg.fam, cfg.cost, *cfg.divergence, n, cfg.bounds, consts);
  *eps_tail_C2 = consts.C2;
  return (cfg.scenario == Scenario::OtRegValues ? 1.0 : 2.0) * std::max(rn, rnt);
}

int derive_theta_grid_points(const ExperimentConfig& cfg, double envelope) {
  if (cfg.theta_grid_points > 0) return cfg.theta_grid_points;
  // Grid fine enough that the discretization error L_Theta * h / 2 stays
  // below envelope / 20, within sane limits.
  const double target = std::max(envelope / 20.0, 1e-4);
  const double h = 2.0 * target / cfg.fam.L_Theta();
  int pts = static_cast<int>(std::ceil(2.0 / h)) + 1;
  return std::clamp(pts, 9, 129);
}

void for_each_trial(int trials, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, trials);
  if (threads <= 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&]() {
      while (true) {
        const int t = next.fetch_add(1);
        if (t >= trials) return;
        body(t);
      }
    });
  for (auto& th : pool) th.join();
}

Theorem theorem_of(Scenario s) {
  switch (s) {
    case Scenario::OtValues: return Theorem::OtValues;
    case Scenario::OtErm: return Theorem::OtErm;
    case Scenario::OtRegValues: return Theorem::OtRegValues;
    case Scenario::OtRegErm: return Theorem::OtRegErm;
  }
  throw std::logic_error("theorem_of: unreachable");
}

ExperimentSummary summarize(const ExperimentConfig& cfg, double envelope, double C2,
                            double reference_value, const std::vector<TrialRecord>& records,
                            bool erm, double mean_delta_opt) {
  ExperimentSummary s;
  s.scenario = cfg.scenario;
  s.envelope = envelope;
  s.reference_value = reference_value;
  TailConstants tc;
  tc.beta = cfg.fam.beta();
  tc.C2 = C2;
  tc.p_y = {cfg.mixture.p_pos, 1.0 - cfg.mixture.p_pos};
  tc.p0 = cfg.bounds.p0;
  tc.delta_opt = mean_delta_opt;
  const double n = static_cast<double>(cfg.n_train);
  for (double eps : cfg.eps_grid) {
    EpsSummary row;
    row.eps = eps;
    row.tail = tail_probability(theorem_of(cfg.scenario), n, eps, tc).value;
    int exceed = 0;
    for (const auto& rec : records) {
      const double threshold = envelope + (erm ? rec.erm_eps_opt : 0.0) + eps;
      const double dev = erm ? rec.erm_excess : std::fabs(rec.deviation);
      if (dev >= threshold) ++exceed;
    }
    row.empirical_freq = static_cast<double>(exceed) / records.size();
    row.binom_stderr = std::sqrt(row.tail * (1.0 - row.tail) / records.size());
    row.consistent =
        row.tail > 0.5 || row.empirical_freq <= row.tail + 3.0 * row.binom_stderr;
    if (!row.consistent) s.all_consistent = false;
    s.rows.push_back(row);
  }
  return s;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_reference < 50 * n_train)
    throw std::invalid_argument("experiment: n_reference must be >= 50 * n_train");
  if (trials < 100)
    throw std::invalid_argument("experiment: trials must be >= 100 for frequency estimates");
  if (eps_grid.empty()) throw std::invalid_argument("experiment: eps_grid must be non-empty");
  if (scenario == Scenario::OtRegValues || scenario == Scenario::OtRegErm) {
    if (!divergence) throw std::invalid_argument("experiment: scenario requires a divergence");
    const double min_py = std::min(mixture.p_pos, 1.0 - mixture.p_pos);
    if (!(bounds.p0 < min_py))
      throw std::invalid_argument("experiment: p0 must be below the smallest class probability");
  }
}

ExperimentOutput run_concentration(const ExperimentConfig& cfg) {
  cfg.validate();
  double C2 = 1.0;
  const double envelope = compute_envelope(cfg, &C2);
  const auto grid = theta_grid(cfg.fam.param_dim(), derive_theta_grid_points(cfg, envelope));

  const Dataset reference = draw_sample(cfg, kReferenceStream, cfg.n_reference);
  const double ref_value = grid_min_value(cfg, grid, reference);

  std::vector<TrialRecord> records(cfg.trials);
  for_each_trial(cfg.trials, cfg.threads, [&](int t) {
    const double t0 = now_seconds();
    const Dataset data = draw_sample(cfg, static_cast<std::uint64_t>(t), cfg.n_train);
    TrialRecord rec;
    rec.trial = t;
    rec.empirical_value = grid_min_value(cfg, grid, data);
    rec.reference_value = ref_value;
    rec.deviation = ref_value - rec.empirical_value;
    if (!std::isfinite(rec.deviation))
      throw std::runtime_error("run_concentration: non-finite deviation");
    rec.wall_time = now_seconds() - t0;
    records[t] = std::move(rec);
  });

  ExperimentOutput out;
  out.records = std::move(records);
  out.summary = summarize(cfg, envelope, C2, ref_value, out.records, /*erm=*/false, 0.0);
  return out;
}

ExperimentOutput run_erm_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  double C2 = 1.0;
  const double envelope = compute_envelope(cfg, &C2);
  const auto grid = theta_grid(cfg.fam.param_dim(), derive_theta_grid_points(cfg, envelope));

  const Dataset reference = draw_sample(cfg, kReferenceStream, cfg.n_reference);
  const double ref_opt = grid_min_value(cfg, grid, reference);

  std::vector<TrialRecord> records(cfg.trials);
  for_each_trial(cfg.trials, cfg.threads, [&](int t) {
    const double t0 = now_seconds();
    const Dataset data = draw_sample(cfg, static_cast<std::uint64_t>(t), cfg.n_train);
    DualProblem p;
    p.fam = cfg.fam;
    p.cost = cfg.cost;
    p.divergence = cfg.divergence;
    p.r = cfg.r;
    p.sample = data;
    p.inner = cfg.inner;
    p.outer_tol = cfg.outer_tol;
    p.theta.assign(cfg.fam.param_dim(), 0.0);
    const ErmResult erm = erm_minimize(p, cfg.erm_search, cfg.erm_budget);

    TrialRecord rec;
    rec.trial = t;
    rec.empirical_value = erm.value;
    rec.reference_value = ref_opt;
    rec.erm_theta = erm.theta;
    rec.erm_eps_opt = erm.eps_opt;
    // Population robust risk of the empirical minimizer, against the
    // reference optimum.
    rec.erm_excess = dual_value(cfg, erm.theta, reference) - ref_opt;
    rec.deviation = rec.erm_excess;
    rec.wall_time = now_seconds() - t0;
    records[t] = std::move(rec);
  });

  ExperimentOutput out;
  out.records = std::move(records);
  out.summary = summarize(cfg, envelope, C2, ref_opt, out.records, /*erm=*/true, 0.0);
  return out;
}

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& records,
                      int theta_dim) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_trials_csv: cannot open " + path);
  f << "trial,empirical_value,reference_value,deviation";
  for (int j = 0; j < theta_dim; ++j) f << ",erm_theta_" << j;
  f << ",erm_excess,erm_eps_opt,wall_time\n";
  for (const auto& r : records) {
    f << r.trial << "," << fmt(r.empirical_value) << "," << fmt(r.reference_value) << ","
      << fmt(r.deviation);
    for (int j = 0; j < theta_dim; ++j)
      f << "," << fmt(j < static_cast<int>(r.erm_theta.size()) ? r.erm_theta[j] : 0.0);
    // wall time is intentionally zeroed: output bytes must not depend on
    // machine load.
    f << "," << fmt(r.erm_excess) << "," << fmt(r.erm_eps_opt) << ",0\n";
  }
}

std::vector<TrialRecord> read_trials_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_trials_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("read_trials_csv: empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 7 || header[0] != "trial")
    throw std::runtime_error("read_trials_csv: malformed header");
  const int theta_dim = static_cast<int>(header.size()) - 7;
  std::vector<TrialRecord> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size())
      throw std::runtime_error("read_trials_csv: malformed row");
    TrialRecord r;
    r.trial = std::stoi(cells[0]);
    r.empirical_value = std::stod(cells[1]);
    r.reference_value = std::stod(cells[2]);
    r.deviation = std::stod(cells[3]);
    for (int j = 0; j < theta_dim; ++j) r.erm_theta.push_back(std::stod(cells[4 + j]));
    r.erm_excess = std::stod(cells[4 + theta_dim]);
    r.erm_eps_opt = std::stod(cells[5 + theta_dim]);
    r.wall_time = std::stod(cells[6 + theta_dim]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_summary_csv(const std::string& path, const ExperimentSummary& s) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_summary_csv: cannot open " + path);
  f << "scenario,envelope,reference_value\n";
  f << scenario_name(s.scenario) << "," << fmt(s.envelope) << "," << fmt(s.reference_value)
    << "\n";
  f << "eps,tail,empirical_freq,binom_stderr,consistent\n";
  for (const auto& row : s.rows)
    f << fmt(row.eps) << "," << fmt(row.tail) << "," << fmt(row.empirical_freq) << ","
      << fmt(row.binom_stderr) << "," << (row.consistent ? 1 : 0) << "\n";
}

ExperimentSummary read_summary_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_summary_csv: cannot open " + path);
  ExperimentSummary s;
  std::string line;
  std::getline(f, line);  // header
  std::getline(f, line);
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    s.scenario = scenario_from_name(cell);
    std::getline(ss, cell, ',');
    s.envelope = std::stod(cell);
    std::getline(ss, cell, ',');
    s.reference_value = std::stod(cell);
  }
  std::getline(f, line);  // eps header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    EpsSummary row;
    std::getline(ss, cell, ',');
    row.eps = std::stod(cell);
    std::getline(ss, cell, ',');
    row.tail = std::stod(cell);
    std::getline(ss, cell, ',');
    row.empirical_freq = std::stod(cell);
    std::getline(ss, cell, ',');
    row.binom_stderr = std::stod(cell);
    std::getline(ss, cell, ',');
    row.consistent = cell == "1";
    if (!row.consistent) s.all_consistent = false;
    s.rows.push_back(row);
  }
  return s;
}

void write_summary_json(const std::string& path, const ExperimentSummary& s) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_summary_json: cannot open " + path);
  f << "{\n  \"scenario\": \"" << scenario_name(s.scenario) << "\",\n";
  f << "  \"envelope\": " << fmt(s.envelope) << ",\n";
  f << "  \"reference_value\": " << fmt(s.reference_value) << ",\n";
  f << "  \"all_consistent\": " << (s.all_consistent ? "true" : "false") << ",\n";
  f << "  \"rows\": [\n";
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const auto& r = s.rows[i];
    f << "    {\"eps\": " << fmt(r.eps) << ", \"tail\": " << fmt(r.tail)
      << ", \"empirical_freq\": " << fmt(r.empirical_freq)
      << ", \"binom_stderr\": " << fmt(r.binom_stderr)
      << ", \"consistent\": " << (r.consistent ? "true" : "false") << "}"
      << (i + 1 < s.rows.size() ? "," : "") << "\n";
  }
  f << "  ]\n}\n";
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::OtValues: return "ot_values";
    case Scenario::OtErm: return "ot_erm";
    case Scenario::OtRegValues: return "otreg_values";
    case Scenario::OtRegErm: return "otreg_erm";
  }
  throw std::logic_error("scenario_name: unreachable");
}

Scenario scenario_from_name(const std::string& name) {
  if (name == "ot_values") return Scenario::OtValues;
  if (name == "ot_erm") return Scenario::OtErm;
  if (name == "otreg_values") return Scenario::OtRegValues;
  if (name == "otreg_erm") return Scenario::OtRegErm;
  throw std::invalid_argument("unknown scenario: " + name);
}

}  // namespace otdro
