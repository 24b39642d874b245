// Command-line front end: plan, bound, sample, figure1, validate.
// Thin adapters over the library; all numeric output uses 17 significant
// digits so runs are byte-reproducible.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "langevin_kit/langevin_kit.hpp"

namespace {

using namespace langevin;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Bound evaluation shared by `bound` and `validate`.
bounds::BoundValue eval_bound_spec(const std::string& kind,
                                   const bounds::BoundQuery& q) {
  if (kind == "thm1") return bounds::bound_thm1(q);
  if (kind == "thm2") {
    const long long K1 = compute_K1(q.m, q.M, q.p, q.w2_0);
    return bounds::bound_thm2(q.m, q.M, q.p, q.K, K1);
  }
  if (kind == "thm3") return bounds::bound_thm3(q);
  if (kind == "thm4") return bounds::bound_thm4(q);
  if (kind == "thm5_lmco")
    return bounds::bound_thm5(q, bounds::SecondOrderVariant::Exact);
  if (kind == "thm5_lmco_prime")
    return bounds::bound_thm5(q, bounds::SecondOrderVariant::SqrtFree);
  if (kind == "propB") {
    if (!q.M2) throw std::invalid_argument("propB requires M2");
    return bounds::bound_propB(q.m, q.M, *q.M2, q.p, q.h,
                               static_cast<int>(q.K), q.w2_0);
  }
  if (kind == "dm") return bounds::bound_dm(q);
  throw std::invalid_argument("unknown bound kind: " + kind);
}

int cmd_plan(const config::ExperimentConfig& cfg) {
  const auto kind = planner::bound_kind_from_string(cfg.bound.kind);
  const auto res = planner::min_iterations(kind, cfg.bound.eps,
                                           cfg.bound.query());
  ordered_json j;
  if (!res.feasible) {
    j["error"] = "infeasible precision";
    j["bound"] = res.bound;
    j["floor"] = res.floor;
    j["note"] = res.floor_note;
    std::cout << j.dump(2) << "\n";
    return 2;
  }
  j["bound"] = res.bound;
  j["eps"] = cfg.bound.eps;
  j["K"] = res.K;
  j["h"] = res.h;
  j["achieved"] = res.achieved;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_bound(const config::ExperimentConfig& cfg) {
  const auto v = eval_bound_spec(cfg.bound.kind, cfg.bound.query());
  ordered_json j;
  j["value"] = v.value;
  j["tag"] = v.tag;
  j["hypothesis_ok"] = v.hypothesis_ok;
  j["note"] = v.note;
  std::cout << j.dump(2) << "\n";
  return 0;
}

std::string trace_csv_text(const ChainTrace& trace, Eigen::Index p) {
  std::string text = "k,h_k";
  for (Eigen::Index i = 0; i < p; ++i)
    text += ",theta_" + std::to_string(i);
  text += "\n";
  for (const auto& rec : trace.records) {
    text += std::to_string(rec.k) + "," + fmt(rec.h);
    for (Eigen::Index i = 0; i < p; ++i) text += "," + fmt(rec.theta[i]);
    text += "\n";
  }
  return text;
}

int cmd_sample(const config::ExperimentConfig& cfg, const fs::path& out_dir) {
  const Target target = config::make_target(cfg.target);
  const auto& s = cfg.sampler;
  const VectorXd theta0 = config::to_vector(s.theta0);
  target.check_dim(theta0);
  const double m = target.certificate.m;
  const double M = target.certificate.M;

  RunResult run;
  if (s.algorithm == "lmc") {
    run = lmc_run(target, theta0, config::make_schedule(s.schedule, m, M),
                  s.K, s.seed, s.stride);
  } else if (s.algorithm == "nlmc") {
    run = nlmc_run(target, theta0, s.schedule.h, s.K,
                   config::make_noise(s.noise, target), s.seed, s.stride);
  } else if (s.algorithm == "lmco") {
    run = lmco_run(target, theta0, s.schedule.h, s.K, s.seed, s.stride);
  } else if (s.algorithm == "lmco_prime") {
    run = lmco_prime_run(target, theta0, s.schedule.h, s.K, s.seed, s.stride);
  } else if (s.algorithm == "mlmc") {
    // mixture of shifted copies of the configured target's quadratic form
    if (!target.quadratic)
      throw std::invalid_argument("mlmc needs a quadratic base target");
    MixtureTarget mix;
    mix.certificate = target.certificate;
    const QuadraticForm qf = *target.quadratic;
    mix.draw_eta = [p = target.certificate.p](Rng& rng) {
      return normal_vector(rng, p);
    };
    mix.component = [qf](const VectorXd& eta) {
      return diagonal_gaussian(qf.curvature, qf.mean + eta);
    };
    const double w2_0 =
        s.w2_0 > 0.0 ? s.w2_0 : initial_w2_bound(target, theta0);
    auto mres = mlmc_run(mix, theta0, s.K, w2_0, s.seed, s.stride);
    run.state = std::move(mres.state);
    run.trace = std::move(mres.trace);
    run.warnings = std::move(mres.warnings);
  } else {
    throw std::invalid_argument("unknown algorithm: " + s.algorithm);
  }

  write_text(out_dir / cfg.output.trace_csv,
             trace_csv_text(run.trace, theta0.size()));

  ordered_json j;
  j["k"] = run.state.k;
  std::vector<double> theta(run.state.theta.data(),
                            run.state.theta.data() + run.state.theta.size());
  j["theta"] = theta;
  j["warnings"] = run.warnings;
  write_text(out_dir / cfg.output.final_json, j.dump(2) + "\n");
  std::cout << "wrote " << (out_dir / cfg.output.trace_csv).string() << " and "
            << (out_dir / cfg.output.final_json).string() << "\n";
  return 0;
}

int cmd_figure1(const config::ExperimentConfig& cfg, const fs::path& out_dir) {
  const auto& f = cfg.figure1;
  const auto rows = planner::figure1_table(f.m, f.M, f.eps_list, f.p_grid);
  std::string text = "p,epsilon,logK_thm1,logK_thm2,logK_dm\n";
  for (const auto& row : rows) {
    text += fmt(row.p) + "," + fmt(row.eps) + "," +
            fmt(std::log10(static_cast<double>(row.K_thm1))) + "," +
            fmt(std::log10(static_cast<double>(row.K_thm2))) + "," +
            fmt(std::log10(static_cast<double>(row.K_dm))) + "\n";
  }
  write_text(out_dir / cfg.output.table_csv, text);
  std::cout << "wrote " << (out_dir / cfg.output.table_csv).string() << "\n";
  return 0;
}

int cmd_validate(const config::ExperimentConfig& cfg, const fs::path& out_dir) {
  const Target target = config::make_target(cfg.target);
  if (!target.quadratic)
    throw std::invalid_argument(
        "validate uses closed-form laws and needs a quadratic target");
  const auto& s = cfg.sampler;
  const VectorXd theta0 = config::to_vector(s.theta0);
  target.check_dim(theta0);
  const double m = target.certificate.m;
  const double M = target.certificate.M;
  const StepSchedule schedule = config::make_schedule(s.schedule, m, M);
  const GaussianLaw pi = target_law(target);
  const double w2_0 = s.w2_0 > 0.0
                          ? s.w2_0
                          : gaussian_w2(dirac_law(theta0), pi);

  bounds::BoundQuery base;
  base.m = m;
  base.M = M;
  base.M2 = target.certificate.M2;
  base.p = target.certificate.p;
  base.w2_0 = w2_0;
  base.delta = cfg.bound.delta;
  base.sigma = cfg.bound.sigma;

  const long long K1 = compute_K1(m, M, base.p, w2_0);
  std::string text = "k,w2_exact,bound,ok\n";
  for (long long k = 0; k <= s.K; k += s.stride) {
    GaussianLaw law =
        s.algorithm == "lmco"
            ? lmco_pushforward(target, theta0, s.schedule.h, k)
            : lmc_pushforward(target, theta0, schedule, k);
    const double w2 = gaussian_w2(law, pi);
    bounds::BoundQuery q = base;
    q.h = schedule.step(k > 0 ? k - 1 : 0);
    q.K = k;
    double bound;
    if (cfg.bound.kind == "thm2") {
      if (k < K1) continue;  // guarantee starts after the warmup
      bound = bounds::bound_thm2(m, M, q.p, k, K1).value;
    } else {
      bound = eval_bound_spec(cfg.bound.kind, q).value;
    }
    const bool ok = w2 <= bound;
    text += std::to_string(k) + "," + fmt(w2) + "," + fmt(bound) + "," +
            (ok ? "1" : "0") + "\n";
  }
  write_text(out_dir / cfg.output.table_csv, text);
  std::cout << "wrote " << (out_dir / cfg.output.table_csv).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Langevin sampling toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "JSON experiment config")
      ->required();
  app.add_option("--seed", seed_override, "override the config seed");
  app.add_option("--out", out_dir, "output directory");

  auto* plan = app.add_subcommand("plan", "smallest iteration budget for eps");
  auto* bound = app.add_subcommand("bound", "evaluate a guarantee");
  auto* sample = app.add_subcommand("sample", "run a chain, write the trace");
  auto* figure1 = app.add_subcommand("figure1", "iteration budget table");
  auto* validate = app.add_subcommand("validate", "bounds vs exact laws");

  CLI11_PARSE(app, argc, argv);

  try {
    config::ExperimentConfig cfg = config::load_file(config_path);
    if (seed_override) cfg.sampler.seed = *seed_override;
    fs::path out(out_dir);
    fs::create_directories(out);
    if (plan->parsed()) return cmd_plan(cfg);
    if (bound->parsed()) return cmd_bound(cfg);
    if (sample->parsed()) return cmd_sample(cfg, out);
    if (figure1->parsed()) return cmd_figure1(cfg, out);
    if (validate->parsed()) return cmd_validate(cfg, out);
  } catch (const std::exception& e) {
    nlohmann::ordered_json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
