#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bounds.hpp"
#include "model.hpp"
#include "noise.hpp"
#include "samplers.hpp"

namespace langevin::config {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config sections. Every section is always present in the serialized form so
// that parse(serialize(c)) == c holds field by field.

struct TargetSpec {
  std::string kind = "isotropic_gaussian";  // isotropic_gaussian,
                                            // diagonal_gaussian,
                                            // ridge_logistic,
                                            // finite_sum_quadratic
  double m = 1.0;                           // isotropic curvature
  std::vector<double> mean;                 // isotropic / diagonal
  std::vector<double> curvature;            // diagonal
  double lambda = 1.0;                      // ridge penalty
  std::string dataset_path;                 // ridge CSV (label first column)
  double a = 1.0;                           // finite-sum curvature
  std::vector<std::vector<double>> centers; // finite-sum component centers

  bool operator==(const TargetSpec&) const = default;
};

struct ScheduleSpec {
  std::string kind = "constant";  // constant | decaying
  double h = 0.1;                 // constant kind
  long long K1 = 0;               // decaying kind warmup

  bool operator==(const ScheduleSpec&) const = default;
};

struct NoiseSpec {
  std::string kind = "none";  // none | gaussian | state_bias | subsample
  std::vector<double> bias;   // gaussian kind
  double sigma = 0.0;         // gaussian kind
  double delta = 0.0;         // state_bias kind
  long long batch = 1;        // subsample kind

  bool operator==(const NoiseSpec&) const = default;
};

struct SamplerSpec {
  std::string algorithm = "lmc";  // lmc | nlmc | lmco | lmco_prime | mlmc
  ScheduleSpec schedule;
  NoiseSpec noise;
  std::uint64_t seed = 0;
  long long K = 100;
  std::vector<double> theta0;
  long long stride = 1;
  double w2_0 = 0.0;  // initial distance fed to mlmc / validate

  bool operator==(const SamplerSpec&) const = default;
};

struct BoundSpec {
  std::string kind = "thm1";
  double eps = 0.1;  // planner target precision
  double m = 1.0;
  double M = 1.0;
  double M2 = -1.0;  // negative means "absent"
  double p = 1.0;
  double h = 0.1;
  long long K = 100;
  double w2_0 = 0.0;
  double delta = 0.0;
  double sigma = 0.0;

  bool operator==(const BoundSpec&) const = default;

  bounds::BoundQuery query() const {
    bounds::BoundQuery q;
    q.m = m;
    q.M = M;
    if (M2 >= 0.0) q.M2 = M2;
    q.p = p;
    q.h = h;
    q.K = K;
    q.w2_0 = w2_0;
    q.delta = delta;
    q.sigma = sigma;
    return q;
  }
};

struct Figure1Spec {
  double m = 10.0;
  double M = 20.0;
  std::vector<double> eps_list = {0.001, 0.005, 0.02};
  std::vector<double> p_grid;

  bool operator==(const Figure1Spec&) const = default;
};

struct OutputSpec {
  std::string trace_csv = "trace.csv";
  std::string final_json = "final.json";
  std::string table_csv = "table.csv";

  bool operator==(const OutputSpec&) const = default;
};

struct ExperimentConfig {
  TargetSpec target;
  SamplerSpec sampler;
  BoundSpec bound;
  Figure1Spec figure1;
  OutputSpec output;

  bool operator==(const ExperimentConfig&) const = default;
};

// ---------------------------------------------------------------------------
// JSON serialization (fixed key order; all keys always emitted)

inline void to_json(json& j, const TargetSpec& t) {
  j = json{{"kind", t.kind},       {"m", t.m},
           {"mean", t.mean},       {"curvature", t.curvature},
           {"lambda", t.lambda},   {"dataset_path", t.dataset_path},
           {"a", t.a},             {"centers", t.centers}};
}

inline void from_json(const json& j, TargetSpec& t) {
  j.at("kind").get_to(t.kind);
  j.at("m").get_to(t.m);
  j.at("mean").get_to(t.mean);
  j.at("curvature").get_to(t.curvature);
  j.at("lambda").get_to(t.lambda);
  j.at("dataset_path").get_to(t.dataset_path);
  j.at("a").get_to(t.a);
  j.at("centers").get_to(t.centers);
}

inline void to_json(json& j, const ScheduleSpec& s) {
  j = json{{"kind", s.kind}, {"h", s.h}, {"K1", s.K1}};
}

inline void from_json(const json& j, ScheduleSpec& s) {
  j.at("kind").get_to(s.kind);
  j.at("h").get_to(s.h);
  j.at("K1").get_to(s.K1);
}

inline void to_json(json& j, const NoiseSpec& n) {
  j = json{{"kind", n.kind},
           {"bias", n.bias},
           {"sigma", n.sigma},
           {"delta", n.delta},
           {"batch", n.batch}};
}

inline void from_json(const json& j, NoiseSpec& n) {
  j.at("kind").get_to(n.kind);
  j.at("bias").get_to(n.bias);
  j.at("sigma").get_to(n.sigma);
  j.at("delta").get_to(n.delta);
  j.at("batch").get_to(n.batch);
}

inline void to_json(json& j, const SamplerSpec& s) {
  j = json{{"algorithm", s.algorithm}, {"schedule", s.schedule},
           {"noise", s.noise},         {"seed", s.seed},
           {"K", s.K},                 {"theta0", s.theta0},
           {"stride", s.stride},       {"w2_0", s.w2_0}};
}

inline void from_json(const json& j, SamplerSpec& s) {
  j.at("algorithm").get_to(s.algorithm);
  j.at("schedule").get_to(s.schedule);
  j.at("noise").get_to(s.noise);
  j.at("seed").get_to(s.seed);
  j.at("K").get_to(s.K);
  j.at("theta0").get_to(s.theta0);
  j.at("stride").get_to(s.stride);
  j.at("w2_0").get_to(s.w2_0);
}

inline void to_json(json& j, const BoundSpec& b) {
  j = json{{"kind", b.kind}, {"eps", b.eps},     {"m", b.m},
           {"M", b.M},       {"M2", b.M2},       {"p", b.p},
           {"h", b.h},       {"K", b.K},         {"w2_0", b.w2_0},
           {"delta", b.delta}, {"sigma", b.sigma}};
}

inline void from_json(const json& j, BoundSpec& b) {
  j.at("kind").get_to(b.kind);
  j.at("eps").get_to(b.eps);
  j.at("m").get_to(b.m);
  j.at("M").get_to(b.M);
  j.at("M2").get_to(b.M2);
  j.at("p").get_to(b.p);
  j.at("h").get_to(b.h);
  j.at("K").get_to(b.K);
  j.at("w2_0").get_to(b.w2_0);
  j.at("delta").get_to(b.delta);
  j.at("sigma").get_to(b.sigma);
}

inline void to_json(json& j, const Figure1Spec& f) {
  j = json{{"m", f.m},
           {"M", f.M},
           {"eps_list", f.eps_list},
           {"p_grid", f.p_grid}};
}

inline void from_json(const json& j, Figure1Spec& f) {
  j.at("m").get_to(f.m);
  j.at("M").get_to(f.M);
  j.at("eps_list").get_to(f.eps_list);
  j.at("p_grid").get_to(f.p_grid);
}

inline void to_json(json& j, const OutputSpec& o) {
  j = json{{"trace_csv", o.trace_csv},
           {"final_json", o.final_json},
           {"table_csv", o.table_csv}};
}

inline void from_json(const json& j, OutputSpec& o) {
  j.at("trace_csv").get_to(o.trace_csv);
  j.at("final_json").get_to(o.final_json);
  j.at("table_csv").get_to(o.table_csv);
}

inline void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"target", c.target},
           {"sampler", c.sampler},
           {"bound", c.bound},
           {"figure1", c.figure1},
           {"output", c.output}};
}

inline void from_json(const json& j, ExperimentConfig& c) {
  j.at("target").get_to(c.target);
  j.at("sampler").get_to(c.sampler);
  j.at("bound").get_to(c.bound);
  j.at("figure1").get_to(c.figure1);
  j.at("output").get_to(c.output);
}

inline std::string serialize(const ExperimentConfig& c) {
  return json(c).dump(2) + "\n";
}

inline ExperimentConfig parse(const std::string& text) {
  return json::parse(text).get<ExperimentConfig>();
}

inline ExperimentConfig load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

// ---------------------------------------------------------------------------
// Materialization

// Ridge dataset CSV: one observation per row, label (+-1) in the first
// column, features in the rest.
inline std::pair<MatrixXd, VectorXd> load_ridge_dataset(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged dataset row");
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().size() < 2)
    throw std::runtime_error("dataset needs rows of [label, features...]");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(rows.front().size()) - 1;
  MatrixXd X(n, p);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = rows[i][0];
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rows[i][j + 1];
  }
  return {X, y};
}

inline VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(),
                                    static_cast<Eigen::Index>(v.size()));
}

inline Target make_target(const TargetSpec& spec) {
  if (spec.kind == "isotropic_gaussian")
    return isotropic_gaussian(spec.m, to_vector(spec.mean));
  if (spec.kind == "diagonal_gaussian")
    return diagonal_gaussian(to_vector(spec.curvature), to_vector(spec.mean));
  if (spec.kind == "ridge_logistic") {
    auto [X, y] = load_ridge_dataset(spec.dataset_path);
    return ridge_logistic(X, y, spec.lambda);
  }
  if (spec.kind == "finite_sum_quadratic") {
    std::vector<VectorXd> centers;
    centers.reserve(spec.centers.size());
    for (const auto& c : spec.centers) centers.push_back(to_vector(c));
    if (centers.empty()) throw std::invalid_argument("need >= 1 center");
    // scalar a means isotropic curvature a * I; an explicit curvature vector
    // overrides it
    const VectorXd a = spec.curvature.empty()
                           ? VectorXd::Constant(centers.front().size(), spec.a)
                           : to_vector(spec.curvature);
    return finite_sum_quadratic(a, centers);
  }
  throw std::invalid_argument("unknown target kind: " + spec.kind);
}

inline StepSchedule make_schedule(const ScheduleSpec& spec, double m,
                                  double M) {
  if (spec.kind == "constant") return StepSchedule::constant(spec.h);
  if (spec.kind == "decaying") return StepSchedule::decaying(m, M, spec.K1);
  throw std::invalid_argument("unknown schedule kind: " + spec.kind);
}

inline NoiseModel make_noise(const NoiseSpec& spec, const Target& target) {
  const int p = target.certificate.p;
  if (spec.kind == "none") return zero_noise(p);
  if (spec.kind == "gaussian")
    return gaussian_noise(to_vector(spec.bias), spec.sigma);
  if (spec.kind == "state_bias") return state_dependent_bias(spec.delta, p);
  if (spec.kind == "subsample") {
    // sigma certified over a probe set around the origin
    std::vector<VectorXd> probes;
    probes.push_back(VectorXd::Zero(p));
    probes.push_back(VectorXd::Ones(p));
    return subsampled_gradient(target, static_cast<int>(spec.batch), probes);
  }
  throw std::invalid_argument("unknown noise kind: " + spec.kind);
}

}  // namespace langevin::config
