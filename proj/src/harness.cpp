#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "random_matrices.hpp"
#include "rng.hpp"

namespace lrsense::harness {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& msg) {
  throw ConfigError("experiment config: " + msg);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      config_fail("unknown key \"" + key + "\" in " + where);
    }
  }
}

std::vector<int> int_list(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) config_fail(key + " must be a nonempty array");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) config_fail(key + " must contain integers");
    out.push_back(v.get<int>());
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string schatten_label(const SchattenQ& q) {
  if (q.is_inf()) return "inf";
  std::ostringstream os;
  os << q.value();
  return os.str();
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) config_fail("top level must be an object");
  reject_unknown_keys(j,
                      {"m_values", "r_values", "n_rule", "n_values", "trials", "sigma_xi",
                       "ensemble_kind", "lambda_variant", "C2", "admm", "master_seed",
                       "output_dir", "threads"},
                      "config");

  ExperimentConfig cfg;
  if (!j.contains("m_values") || !j.contains("r_values") || !j.contains("trials") ||
      !j.contains("sigma_xi") || !j.contains("master_seed") || !j.contains("output_dir")) {
    config_fail("required keys: m_values, r_values, trials, sigma_xi, master_seed, output_dir");
  }
  cfg.m_values = int_list(j["m_values"], "m_values");
  cfg.r_values = int_list(j["r_values"], "r_values");
  cfg.trials = j["trials"].get<int>();
  cfg.sigma_xi = j["sigma_xi"].get<double>();
  cfg.master_seed = j["master_seed"].get<uint64_t>();
  cfg.output_dir = j["output_dir"].get<std::string>();

  if (j.contains("n_rule")) {
    const std::string rule = j["n_rule"].get<std::string>();
    if (rule == "five_m_r") {
      cfg.n_rule = NRule::five_m_r;
    } else if (rule == "explicit") {
      cfg.n_rule = NRule::explicit_list;
    } else {
      config_fail("n_rule must be \"five_m_r\" or \"explicit\"");
    }
  }
  if (cfg.n_rule == NRule::explicit_list) {
    if (!j.contains("n_values")) config_fail("explicit n_rule requires n_values");
    cfg.n_values = int_list(j["n_values"], "n_values");
    if (cfg.n_values.size() != cfg.r_values.size()) {
      config_fail("n_values must be parallel to r_values");
    }
  } else if (j.contains("n_values")) {
    config_fail("n_values only allowed with n_rule \"explicit\"");
  }

  if (j.contains("ensemble_kind")) {
    const std::string kind = j["ensemble_kind"].get<std::string>();
    if (kind == "gaussian") {
      cfg.ensemble_kind = sensing::EnsembleKind::gaussian;
    } else if (kind == "rademacher") {
      cfg.ensemble_kind = sensing::EnsembleKind::rademacher;
    } else {
      config_fail("ensemble_kind must be \"gaussian\" or \"rademacher\"");
    }
  }
  if (j.contains("lambda_variant")) {
    const std::string variant = j["lambda_variant"].get<std::string>();
    if (variant == "experiment") {
      cfg.lambda_variant = solvers::LambdaVariant::experiment;
    } else if (variant == "theorem") {
      cfg.lambda_variant = solvers::LambdaVariant::theorem;
    } else {
      config_fail("lambda_variant must be \"experiment\" or \"theorem\"");
    }
  }
  if (j.contains("C2")) cfg.C2 = j["C2"].get<double>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();

  if (j.contains("admm")) {
    const json& a = j["admm"];
    if (!a.is_object()) config_fail("admm must be an object");
    reject_unknown_keys(
        a, {"rho", "max_iterations", "tolerance", "cg_tolerance", "cg_max_iterations"},
        "admm");
    if (a.contains("rho")) cfg.admm.rho = a["rho"].get<double>();
    if (a.contains("max_iterations")) cfg.admm.max_iterations = a["max_iterations"].get<int>();
    if (a.contains("tolerance")) cfg.admm.tolerance = a["tolerance"].get<double>();
    if (a.contains("cg_tolerance")) cfg.admm.cg_tolerance = a["cg_tolerance"].get<double>();
    if (a.contains("cg_max_iterations")) {
      cfg.admm.cg_max_iterations = a["cg_max_iterations"].get<int>();
    }
  }

  // Grid invariants.
  if (cfg.trials < 1) config_fail("trials must be >= 1");
  if (!(cfg.sigma_xi >= 0.0)) config_fail("sigma_xi must be >= 0");
  const int min_m = *std::min_element(cfg.m_values.begin(), cfg.m_values.end());
  for (int m : cfg.m_values) {
    if (m < 2) config_fail("every m must be >= 2");
  }
  for (int r : cfg.r_values) {
    if (r < 1 || r > min_m) config_fail("every r must satisfy 1 <= r <= min(m_values)");
  }
  for (int n : cfg.n_values) {
    if (n < 1) config_fail("every explicit n must be >= 1");
  }
  if (cfg.output_dir.empty()) config_fail("output_dir must be nonempty");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

DenseMatrix ground_truth(int m, int r, uint64_t seed) {
  if (r < 1 || r > m) throw DomainError("ground_truth: need 1 <= r <= m");
  Rng rng(seed);
  const DenseMatrix g1 = gaussian_matrix(m, r, rng);
  const DenseMatrix g2 = gaussian_matrix(r, m, rng);
  return g1 * g2;
}

int default_n(int m, int r) { return 5 * m * r; }

uint64_t trial_seed(uint64_t master_seed, int m, int r, int trial_index) {
  return mix64(master_seed, static_cast<uint64_t>(m), static_cast<uint64_t>(r),
               static_cast<uint64_t>(trial_index));
}

namespace {

struct Cell {
  int m, r, n, trial;
};

TrialRecord run_cell(const ExperimentConfig& cfg, const Cell& cell) {
  TrialRecord rec;
  rec.m = cell.m;
  rec.r = cell.r;
  rec.n = cell.n;
  rec.trial_index = cell.trial;
  rec.seed = trial_seed(cfg.master_seed, cell.m, cell.r, cell.trial);

  const auto t0 = std::chrono::steady_clock::now();

  DenseMatrix a0 = ground_truth(cell.m, cell.r, mix64(rec.seed, 1));
  auto ensemble = sensing::sample_ensemble(
      {cfg.ensemble_kind, cell.m, cell.n, mix64(rec.seed, 2)});
  auto ds = sensing::generate_dataset(a0, std::move(ensemble), cfg.sigma_xi,
                                      sensing::NoiseKind::gaussian, mix64(rec.seed, 3));

  rec.lambda = solvers::lambda_rule(cell.m, cell.n, cfg.sigma_xi, cfg.lambda_variant,
                                    cfg.C2);
  solvers::AdmmConfig admm;
  admm.lambda = rec.lambda;
  admm.rho = cfg.admm.rho;
  if (cfg.admm.max_iterations) admm.max_iterations = *cfg.admm.max_iterations;
  admm.tolerance = cfg.admm.tolerance;
  if (cfg.admm.cg_tolerance) admm.cg_tolerance = *cfg.admm.cg_tolerance;
  if (cfg.admm.cg_max_iterations) admm.cg_max_iterations = *cfg.admm.cg_max_iterations;

  const auto result = solvers::admm_lasso(ds, admm, mix64(rec.seed, 4));
  rec.rho = result.rho;
  rec.iterations = result.iterations_used;
  rec.converged = result.converged;

  const auto report =
      theory::error_report(result.estimate, ds.A0, cell.n, cfg.sigma_xi, cell.r);
  rec.spectral_error = report.spectral;
  rec.frobenius_error = report.frobenius;
  rec.nuclear_error = report.nuclear;
  rec.ratio_spectral = report.ratio_spectral;
  rec.kyfan_errors = report.kyfan;
  rec.schatten_errors = report.schatten;

  const double w_norm = sensing::w_spectral_norm(ds.ensemble, ds.noise);
  rec.lambda_ge_2W = rec.lambda >= 2.0 * w_norm;
  rec.cone_ok = cone_membership(result.estimate - ds.A0, cell.r, 3.01).is_member;

  const double obj_est = solvers::lasso_objective(ds, result.estimate, rec.lambda);
  const double obj_a0 = solvers::lasso_objective(ds, ds.A0, rec.lambda);
  const double obj_zero =
      solvers::lasso_objective(ds, DenseMatrix::Zero(cell.m, cell.m), rec.lambda);
  rec.objective_ok =
      obj_est <= obj_a0 + 1e-6 * std::abs(obj_a0) && obj_est <= obj_zero;

  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

std::string csv_header(const std::vector<TrialRecord>& records) {
  int k_max = records.empty() ? 0 : std::numeric_limits<int>::max();
  for (const auto& rec : records) {
    k_max = std::min(k_max, static_cast<int>(rec.kyfan_errors.size()));
  }
  std::ostringstream os;
  os << "m,r,n,trial,seed,lambda,rho,iterations,converged,spectral_error,"
        "frobenius_error,nuclear_error,ratio_spectral,lambda_ge_2W,cone_ok,wall_time_ms";
  for (int k = 1; k <= k_max; ++k) os << ",kyfan_k" << k;
  if (!records.empty()) {
    for (const auto& [q, value] : records.front().schatten_errors) {
      os << ",schatten_q" << schatten_label(q);
    }
  }
  return os.str();
}

std::string csv_row(const TrialRecord& rec, int k_max) {
  std::ostringstream os;
  os << rec.m << ',' << rec.r << ',' << rec.n << ',' << rec.trial_index << ','
     << rec.seed << ',' << format_double(rec.lambda) << ',' << format_double(rec.rho)
     << ',' << rec.iterations << ',' << (rec.converged ? "true" : "false") << ','
     << format_double(rec.spectral_error) << ',' << format_double(rec.frobenius_error)
     << ',' << format_double(rec.nuclear_error) << ','
     << format_double(rec.ratio_spectral) << ',' << (rec.lambda_ge_2W ? "true" : "false")
     << ',' << (rec.cone_ok ? "true" : "false") << ','
     << format_double(rec.wall_time_ms);
  for (int k = 1; k <= k_max; ++k) os << ',' << format_double(rec.kyfan_errors.at(k));
  for (const auto& [q, value] : rec.schatten_errors) os << ',' << format_double(value);
  return os.str();
}

}  // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (int m : config.m_values) {
    for (size_t ri = 0; ri < config.r_values.size(); ++ri) {
      const int r = config.r_values[ri];
      const int n = config.n_rule == NRule::five_m_r ? default_n(m, r)
                                                     : config.n_values[ri];
      for (int t = 0; t < config.trials; ++t) {
        cells.push_back(Cell{m, r, n, t});
      }
    }
  }

  std::filesystem::create_directories(config.output_dir);
  const std::string csv_path = config.output_dir + "/trials.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot open for writing: " + csv_path);

  // Shared Ky-Fan window; every row of a validated grid covers at least this.
  int k_max = std::numeric_limits<int>::max();
  for (const auto& cell : cells) {
    k_max = std::min(k_max, std::min(cell.m, 2 * cell.r + 2));
  }
  {
    std::ostringstream head;
    head << "m,r,n,trial,seed,lambda,rho,iterations,converged,spectral_error,"
            "frobenius_error,nuclear_error,ratio_spectral,lambda_ge_2W,cone_ok,"
            "wall_time_ms";
    for (int k = 1; k <= k_max; ++k) head << ",kyfan_k" << k;
    for (const char* label : {"1", "1.5", "2", "3", "4", "inf"}) {
      head << ",schatten_q" << label;
    }
    csv << head.str() << "\n";
    csv.flush();
  }

  const size_t total = cells.size();
  std::vector<TrialRecord> records(total);
  std::vector<char> done(total, 0);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<size_t> next_cell{0};
  std::exception_ptr failure;

  unsigned hw = std::thread::hardware_concurrency();
  size_t n_workers = config.threads > 0 ? static_cast<size_t>(config.threads)
                                        : (hw > 0 ? hw : 1);
  n_workers = std::min(n_workers, total);

  auto worker = [&]() {
    for (;;) {
      const size_t i = next_cell.fetch_add(1);
      if (i >= total) return;
      try {
        TrialRecord rec = run_cell(config, cells[i]);
        std::lock_guard<std::mutex> lock(mu);
        records[i] = std::move(rec);
        done[i] = 1;
        cv.notify_all();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        done[i] = 1;
        cv.notify_all();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);

  // Rows are committed in grid order as soon as the prefix is complete, so a
  // partially finished run leaves a readable CSV behind.
  size_t written = 0;
  {
    std::unique_lock<std::mutex> lock(mu);
    while (written < total) {
      cv.wait(lock, [&] { return done[written] || failure; });
      if (failure) break;
      csv << csv_row(records[written], k_max) << "\n";
      csv.flush();
      if (!csv) {
        failure = std::make_exception_ptr(IoError("write failure: " + csv_path));
        break;
      }
      ++written;
    }
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  emit_plot_data(records, config.output_dir,
                 config.ensemble_kind == sensing::EnsembleKind::gaussian ? "fig1" : "fig2");
  return records;
}

void write_csv(const std::string& path, const std::vector<TrialRecord>& records) {
  if (records.empty()) throw DomainError("write_csv: no records");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  int k_max = std::numeric_limits<int>::max();
  for (const auto& rec : records) {
    k_max = std::min(k_max, static_cast<int>(rec.kyfan_errors.size()));
  }
  out << csv_header(records) << "\n";
  for (const auto& rec : records) out << csv_row(rec, k_max) << "\n";
  if (!out) throw IoError("write failure: " + path);
}

void emit_plot_data(const std::vector<TrialRecord>& records, const std::string& output_dir,
                    const std::string& prefix) {
  if (records.empty()) throw DomainError("emit_plot_data: no records");
  std::filesystem::create_directories(output_dir);

  std::vector<int> ms;
  for (const auto& rec : records) {
    if (std::find(ms.begin(), ms.end(), rec.m) == ms.end()) ms.push_back(rec.m);
  }
  for (int m : ms) {
    std::vector<int> rs;
    for (const auto& rec : records) {
      if (rec.m == m && std::find(rs.begin(), rs.end(), rec.r) == rs.end()) {
        rs.push_back(rec.r);
      }
    }
    std::sort(rs.begin(), rs.end());

    const std::string acc_path =
        output_dir + "/" + prefix + "_accuracy_m" + std::to_string(m) + ".dat";
    const std::string ratio_path =
        output_dir + "/" + prefix + "_ratio_m" + std::to_string(m) + ".dat";
    std::ofstream acc(acc_path), ratio(ratio_path);
    if (!acc || !ratio) throw IoError("cannot open plot data files in " + output_dir);
    acc << "# r mean_spectral_error std\n";
    ratio << "# r mean_ratio_spectral std\n";
    for (int r : rs) {
      std::vector<double> errs, ratios;
      for (const auto& rec : records) {
        if (rec.m == m && rec.r == r) {
          errs.push_back(rec.spectral_error);
          ratios.push_back(rec.ratio_spectral);
        }
      }
      auto mean_std = [](const std::vector<double>& v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double std_dev = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
        return std::make_pair(mean, std_dev);
      };
      const auto [em, es] = mean_std(errs);
      const auto [rm, rstd] = mean_std(ratios);
      acc << r << ' ' << format_double(em) << ' ' << format_double(es) << "\n";
      ratio << r << ' ' << format_double(rm) << ' ' << format_double(rstd) << "\n";
    }
    if (!acc || !ratio) throw IoError("write failure for plot data in " + output_dir);
  }
}

}  // namespace lrsense::harness
