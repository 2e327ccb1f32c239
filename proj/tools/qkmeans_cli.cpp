// Copyright 2026 The qkmeans Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qkmeans-cli: data generation, clustering and classification runs,
// distance-estimation sweeps and resource tables. Every output file gets a
// sibling <file>.manifest.json from which `replay` re-runs the command.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qkmeans/qkmeans.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace qkmeans;

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string default_out_dir() {
  const char* env = std::getenv("QKMEANS_OUT_DIR");
  return env && *env ? env : ".";
}

struct Common {
  std::string out_dir = default_out_dir();
  std::string name;
  std::string profile = "ideal";
  std::string profiles_file;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::size_t threads = 0;

  backend::Executor executor() const {
    std::vector<backend::BackendProfile> extra;
    if (!profiles_file.empty()) extra = backend::load_profiles(profiles_file);
    return {backend::find_profile(profile, extra), workers,
            backend::SubmitOptions{false, threads}};
  }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out-dir", c.out_dir,
                  "Output directory (default $QKMEANS_OUT_DIR or .)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--name", c.name, "Output file stem (default: the command name)");
  sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sub->add_option("--profile", c.profile, "Backend profile name")->capture_default_str();
  sub->add_option("--profiles", c.profiles_file, "INI file with extra backend profiles")
      ->check(CLI::ExistingFile);
  sub->add_option("--workers", c.workers,
                  "Submit one request per circuit with N workers (0: batched jobs)")
      ->capture_default_str();
  sub->add_option("--threads", c.threads, "Simulation threads (0: all cores)")
      ->capture_default_str();
}

struct EstimatorFlags {
  std::string estimator = "full";
  std::string embedding = "amplitude";
  std::string mode = "sampled";
  std::uint64_t shots = 8192;
  std::size_t reps = 1;
  std::size_t block = 2;
  bool mitigate = false;
  bool pack = false;

  bool classical() const { return estimator == "classical"; }

  dist::EstimatorConfig config() const {
    dist::EstimatorConfig cfg;
    cfg.embedding = embed::parse_embedding(embedding);
    cfg.mode = dist::parse_mode(mode);
    cfg.shots = shots;
    cfg.repetitions = reps;
    if (estimator == "subspace") cfg.block_size = block;
    cfg.mitigate = mitigate;
    cfg.pack = pack;
    cfg.validate();
    return cfg;
  }
};

void add_estimator(CLI::App* sub, EstimatorFlags& e, std::uint64_t default_shots,
                   std::size_t default_reps, bool allow_classical) {
  e.shots = default_shots;
  e.reps = default_reps;
  std::vector<std::string> kinds{"full", "subspace"};
  if (allow_classical) kinds.push_back("classical");
  sub->add_option("--estimator", e.estimator, "Distance estimator")
      ->check(CLI::IsMember(kinds))
      ->capture_default_str();
  sub->add_option("--embedding", e.embedding, "amplitude or angle")
      ->check(CLI::IsMember({"amplitude", "angle"}))
      ->capture_default_str();
  sub->add_option("--mode", e.mode, "sampled or analytic")
      ->check(CLI::IsMember({"sampled", "analytic"}))
      ->capture_default_str();
  sub->add_option("--shots", e.shots, "Shots per swap test")->capture_default_str();
  sub->add_option("--reps", e.reps, "Repetitions averaged per distance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--block", e.block, "Block size of the subspace estimator")
      ->capture_default_str();
  sub->add_flag("--mitigate", e.mitigate, "Invert the readout error matrix");
  sub->add_flag("--pack", e.pack, "Pack block swap tests onto shared circuits");
}

/// Tracks the files a command writes and drops a manifest next to each one.
class Recorder {
 public:
  Recorder(std::string command, std::vector<std::string> argv, const Common& common,
           const CLI::App* sub)
      : command_(std::move(command)), argv_(std::move(argv)), common_(common),
        sub_(sub), started_(utc_now()) {
    fs::create_directories(common_.out_dir);
  }

  std::string path(const std::string& suffix) const {
    return (fs::path(common_.out_dir) / (common_.name + suffix)).string();
  }

  void write(const std::string& file, const std::function<void(std::ostream&)>& body) {
    const std::string partial = file + ".partial";
    try {
      std::ofstream out(partial, std::ios::binary);
      if (!out) throw Error("cannot write '" + file + "'");
      body(out);
      out.close();
      if (!out) throw Error("error while writing '" + file + "'");
      fs::rename(partial, file);
    } catch (...) {
      std::error_code ignored;
      fs::remove(partial, ignored);
      throw;
    }
    outputs_.push_back(file);
  }

  void write_json(const std::string& file, const json& j) {
    write(file, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  }

  void finish() {
    json m{{"command", command_},
           {"argv", argv_},
           {"cwd", fs::current_path().string()},
           {"config", config_echo()},
           {"seed", common_.seed},
           {"profile", common_.profile},
           {"started", started_},
           {"finished", utc_now()},
           {"outputs", outputs_}};
    for (const auto& file : outputs_) {
      const auto manifest = file + ".manifest.json";
      std::ofstream out(manifest, std::ios::binary);
      out << m.dump(2) << '\n';
      if (!out) throw Error("cannot write '" + manifest + "'");
    }
  }

 private:
  json config_echo() const {
    json cfg = json::object();
    for (const CLI::Option* opt : sub_->get_options()) {
      if (opt->get_lnames().empty()) continue;
      const auto& key = opt->get_lnames().front();
      if (key == "help") continue;
      if (opt->get_items_expected_max() == 0) {
        cfg[key] = opt->count() > 0;
      } else if (opt->count() > 0) {
        const auto& r = opt->results();
        cfg[key] = r.size() == 1 ? json(r.front()) : json(r);
      } else {
        cfg[key] = opt->get_default_str();
      }
    }
    cfg["out-dir"] = common_.out_dir;
    cfg["name"] = common_.name;
    return cfg;
  }

  std::string command_;
  std::vector<std::string> argv_;
  const Common& common_;
  const CLI::App* sub_;
  std::string started_;
  std::vector<std::string> outputs_;
};

void write_labels(std::ostream& out, const Labels& labels) {
  out << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

void write_points(std::ostream& out, const Points& points) {
  data::Dataset ds;
  ds.points = points;
  ds.dim = points.empty() ? 0 : points.front().size();
  data::write_csv(out, ds);
}

/// The `label` column of a CSV with a header row (dataset or labels file).
Labels read_labels(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open '" + file + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line) && (line.empty() || line == "\r")) ++line_no;
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = data::detail::split(line);
  std::size_t col = header.size();
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == "label") col = j;
  if (col == header.size())
    throw data::FormatError(file + ": no 'label' column in header");
  Labels out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (line.back() == '\r') line.pop_back();
    const auto fields = data::detail::split(line);
    if (fields.size() != header.size())
      throw data::FormatError(file + ": line " + std::to_string(line_no) +
                              ": expected " + std::to_string(header.size()) +
                              " fields, found " + std::to_string(fields.size()));
    out.push_back(data::detail::parse_number<std::size_t>(fields[col], line_no));
  }
  return out;
}

json scores_json(const Labels& truth, const Labels& pred, std::size_t classes,
                 metrics::ConfusionMatrix& cm_out) {
  const auto perm = metrics::align_labels(truth, pred);
  const auto aligned = metrics::apply_permutation(pred, perm);
  cm_out = metrics::confusion(truth, aligned, classes);
  json j = metrics::to_json(metrics::score(cm_out));
  j["confusion"] = metrics::to_json(cm_out);
  j["permutation"] = perm;
  return j;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      throw InvalidArgument("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("empty list");
  return out;
}

void mean_stddev(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  for (double x : v) mean += x;
  mean /= double(v.size());
  sd = 0.0;
  if (v.size() < 2) return;
  for (double x : v) sd += (x - mean) * (x - mean);
  sd = std::sqrt(sd / double(v.size() - 1));
}

std::string fmt(double v) { return data::format_double(v); }

// ---------------------------------------------------------------------------

int run(std::vector<std::string> args);

int dispatch(std::vector<std::string> args) {
  CLI::App app{"Quantum k-means via swap-test distance estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qkmeans-cli 1.0.0");
  Common common;
  std::function<void(Recorder&)> action;
  std::string command;

  // gen ---------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate Gaussian blobs.\n"
                                        "Writes <name>.csv (f0..f{d-1},label) and "
                                        "<name>.centers.csv (f0..f{d-1});\n"
                                        "the default name is 'dataset'.");
  add_common(gen, common);
  data::GenConfig g;
  gen->add_option("--k", g.k, "Number of clusters")->capture_default_str();
  gen->add_option("--per", g.points_per, "Points per cluster")->capture_default_str();
  gen->add_option("--dim", g.dim, "Dimension")->capture_default_str();
  gen->add_option("--variance", g.variance, "Per-dimension variance")->capture_default_str();
  gen->add_option("--min-sep", g.min_sep, "Minimum center separation")->capture_default_str();
  gen->add_option("--box-lo", g.box_lo, "Lower corner of the center box")->capture_default_str();
  gen->add_option("--box-hi", g.box_hi, "Upper corner of the center box")->capture_default_str();
  gen->callback([&] {
    command = "gen";
    action = [&](Recorder& rec) {
      g.seed = common.seed;
      const auto out = data::gen_clusters(g);
      rec.write(rec.path(".csv"), [&](std::ostream& o) { data::write_csv(o, out.dataset); });
      rec.write(rec.path(".centers.csv"), [&](std::ostream& o) { write_points(o, out.centers); });
    };
  });

  // cluster -----------------------------------------------------------------
  auto* clu = app.add_subcommand(
      "cluster",
      "Run k-means with estimated distances.\n"
      "Writes <name>.labels.csv (index,label), <name>.centroids.csv (f0..),\n"
      "<name>.run.json and, with --baseline, <name>.confusion.csv\n"
      "(true\\pred,p0..) and <name>.scores.json.");
  add_common(clu, common);
  EstimatorFlags clu_est;
  add_estimator(clu, clu_est, 8192, 1, true);
  std::string clu_data, clu_baseline;
  cluster::ClusterConfig ccfg;
  clu->add_option("--data", clu_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  clu->add_option("--k", ccfg.k, "Number of clusters")->capture_default_str();
  clu->add_option("--epsilon", ccfg.epsilon, "Minimum initial centroid separation")
      ->capture_default_str();
  clu->add_option("--max-iter", ccfg.max_iterations, "Iteration limit")->capture_default_str();
  clu->add_option("--tol", ccfg.convergence_tol, "Convergence tolerance")->capture_default_str();
  clu->add_option("--baseline", clu_baseline,
                  "Labels to score against: 'truth', 'classical' or a labels CSV");
  clu->callback([&] {
    command = "cluster";
    action = [&](Recorder& rec) {
      const auto ds = data::load_csv(clu_data);
      ccfg.seed = common.seed;
      if (!clu_est.classical()) ccfg.estimator = clu_est.config();
      ccfg.validate();
      const auto init = cluster::init_centroids(ds.points, ccfg.k, ccfg.epsilon, ccfg.seed);
      const auto res =
          clu_est.classical()
              ? cluster::kmeans_classical(ds.points, ccfg, init)
              : cluster::kmeans_quantum(ds.points, ccfg, common.executor(), init);

      std::optional<Labels> baseline;
      if (clu_baseline == "truth") {
        if (!ds.true_labels) throw InvalidArgument("--baseline truth: dataset has no labels");
        baseline = ds.true_labels;
      } else if (clu_baseline == "classical") {
        baseline = cluster::kmeans_classical(ds.points, ccfg, init).labels;
      } else if (!clu_baseline.empty()) {
        baseline = read_labels(clu_baseline);
        if (baseline->size() != ds.size())
          throw InvalidArgument("baseline has " + std::to_string(baseline->size()) +
                                " labels for " + std::to_string(ds.size()) + " points");
      }

      rec.write(rec.path(".labels.csv"), [&](std::ostream& o) { write_labels(o, res.labels); });
      rec.write(rec.path(".centroids.csv"), [&](std::ostream& o) { write_points(o, res.centroids); });
      json run{{"labels", res.labels},
               {"centroids", res.centroids},
               {"initial_centroids", init},
               {"iterations", res.iterations},
               {"converged", res.converged},
               {"history", res.history},
               {"circuits_per_iteration", res.circuits_per_iteration}};
      rec.write_json(rec.path(".run.json"), run);
      if (baseline) {
        metrics::ConfusionMatrix cm;
        const auto scores = scores_json(*baseline, res.labels, ccfg.k, cm);
        rec.write(rec.path(".confusion.csv"), [&](std::ostream& o) { metrics::write_csv(o, cm); });
        rec.write_json(rec.path(".scores.json"), scores);
      }
    };
  });

  // classify ----------------------------------------------------------------
  auto* cls = app.add_subcommand(
      "classify",
      "Nearest-centroid classification with estimated distances.\n"
      "Writes <name>.labels.csv (index,label) and <name>.scores.json\n"
      "(scores null when the data carries no labels) plus <name>.confusion.csv\n"
      "when it does.");
  add_common(cls, common);
  EstimatorFlags cls_est;
  add_estimator(cls, cls_est, 8192, 5, true);
  std::string cls_data, cls_centroids, cls_train;
  std::size_t cls_k = 4, cls_iter = 100;
  cls->add_option("--data", cls_data, "Points to classify (CSV)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* copt = cls->add_option("--centroids", cls_centroids, "Centroid CSV (f0..)")
                   ->check(CLI::ExistingFile);
  auto* topt = cls->add_option("--train", cls_train,
                               "Fit centroids with classical k-means on this CSV")
                   ->check(CLI::ExistingFile);
  copt->excludes(topt);
  cls->add_option("--k", cls_k, "Clusters fitted on --train")->capture_default_str();
  cls->add_option("--max-iter", cls_iter, "Iteration limit of the --train fit")
      ->capture_default_str();
  cls->callback([&] {
    command = "classify";
    if (cls_centroids.empty() && cls_train.empty())
      throw CLI::ValidationError("classify", "one of --centroids or --train is required");
    action = [&](Recorder& rec) {
      const auto ds = data::load_csv(cls_data);
      Points centroids;
      if (!cls_centroids.empty()) {
        centroids = data::load_csv(cls_centroids).points;
      } else {
        cluster::ClusterConfig fit;
        fit.k = cls_k;
        fit.max_iterations = cls_iter;
        fit.seed = common.seed;
        centroids = cluster::kmeans_classical(data::load_csv(cls_train).points, fit).centroids;
      }
      const Labels labels =
          cls_est.classical()
              ? cluster::assign(cluster::euclidean_sq_matrix(ds.points, centroids))
              : cluster::nn_classify(ds.points, centroids, cls_est.config(),
                                     common.executor(), derive_seed(common.seed, 0xc1));
      rec.write(rec.path(".labels.csv"), [&](std::ostream& o) { write_labels(o, labels); });
      json scores{{"scores", nullptr}, {"centroids", centroids}};
      if (ds.true_labels) {
        metrics::ConfusionMatrix cm;
        scores["scores"] = scores_json(*ds.true_labels, labels, centroids.size(), cm);
        rec.write(rec.path(".confusion.csv"), [&](std::ostream& o) { metrics::write_csv(o, cm); });
      }
      rec.write_json(rec.path(".scores.json"), scores);
    };
  });

  // pca ---------------------------------------------------------------------
  auto* pca = app.add_subcommand("pca",
                                 "Principal component projection.\n"
                                 "Writes <name>.model.json and <name>.csv (f0..[,label]).");
  add_common(pca, common);
  std::string pca_data, pca_model;
  std::size_t pca_dim = 2;
  pca->add_option("--data", pca_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  pca->add_option("--dim", pca_dim, "Output dimension")->capture_default_str();
  pca->add_option("--model", pca_model, "Apply this model instead of fitting")
      ->check(CLI::ExistingFile);
  pca->callback([&] {
    command = "pca";
    action = [&](Recorder& rec) {
      const auto ds = data::load_csv(pca_data);
      data::PCAModel model;
      if (pca_model.empty()) {
        model = data::pca_fit(ds, pca_dim);
      } else {
        std::ifstream in(pca_model);
        model = data::pca_from_json(json::parse(in));
      }
      const auto out = data::pca_transform(model, ds);
      rec.write_json(rec.path(".model.json"), data::to_json(model));
      rec.write(rec.path(".csv"), [&](std::ostream& o) { data::write_csv(o, out); });
    };
  });

  // elbow -------------------------------------------------------------------
  auto* elb = app.add_subcommand("elbow", "WCSS against k.\nWrites <name>.csv (k,wcss).");
  add_common(elb, common);
  std::string elb_data;
  std::size_t elb_kmax = 10, elb_restarts = 5, elb_iter = 100;
  elb->add_option("--data", elb_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  elb->add_option("--k-max", elb_kmax, "Largest k")->capture_default_str();
  elb->add_option("--restarts", elb_restarts, "Initialisations per k")->capture_default_str();
  elb->add_option("--max-iter", elb_iter, "Iteration limit per run")->capture_default_str();
  elb->callback([&] {
    command = "elbow";
    action = [&](Recorder& rec) {
      const auto ds = data::load_csv(elb_data);
      const auto curve = data::elbow_curve(ds, elb_kmax, common.seed, elb_restarts, elb_iter);
      rec.write(rec.path(".csv"), [&](std::ostream& o) {
        o << "k,wcss\n";
        for (std::size_t k = 0; k < curve.size(); ++k) o << k + 1 << ',' << fmt(curve[k]) << '\n';
      });
    };
  });

  // resources ---------------------------------------------------------------
  auto* res = app.add_subcommand(
      "resources",
      "Swap-test circuit resources per dimension.\n"
      "Writes <name>.csv (dim,embedding,width,depth,nonlocal,gates,fits_profile).");
  add_common(res, common);
  std::string res_dims = "2,4,8,16,32", res_emb = "both";
  res->add_option("--dims", res_dims, "Comma-separated dimensions")->capture_default_str();
  res->add_option("--embedding", res_emb, "amplitude, angle or both")
      ->check(CLI::IsMember({"amplitude", "angle", "both"}))
      ->capture_default_str();
  res->callback([&] {
    command = "resources";
    action = [&](Recorder& rec) {
      const auto profile = common.executor().profile;
      std::vector<embed::Embedding> embs;
      if (res_emb != "angle") embs.push_back(embed::Embedding::amplitude);
      if (res_emb != "amplitude") embs.push_back(embed::Embedding::angle);
      rec.write(rec.path(".csv"), [&](std::ostream& o) {
        o << "dim,embedding,width,depth,nonlocal,gates,fits_profile\n";
        for (double d : parse_list(res_dims)) {
          const auto n = std::size_t(d);
          if (double(n) != d || n < 2) throw InvalidArgument("dimensions must be integers >= 2");
          for (auto e : embs) {
            const auto c = dist::build_swap_test({Point(n, 1.0), Point(n, 2.0)}, e);
            const auto s = qsim::resources(c);
            o << n << ',' << embed::to_string(e) << ',' << s.width << ',' << s.depth << ','
              << s.nonlocal << ',' << s.gates << ',' << (s.width <= profile.qubits) << '\n';
          }
        }
      });
    };
  });

  // report ------------------------------------------------------------------
  auto* rep = app.add_subcommand("report",
                                 "Score predicted labels against reference labels.\n"
                                 "Writes <name>.scores.json and <name>.confusion.csv.");
  add_common(rep, common);
  std::string rep_truth, rep_pred;
  rep->add_option("--truth", rep_truth, "CSV with a label column")
      ->required()
      ->check(CLI::ExistingFile);
  rep->add_option("--pred", rep_pred, "CSV with a label column")
      ->required()
      ->check(CLI::ExistingFile);
  rep->callback([&] {
    command = "report";
    action = [&](Recorder& rec) {
      const auto truth = read_labels(rep_truth);
      const auto pred = read_labels(rep_pred);
      metrics::ConfusionMatrix cm;
      const auto scores = scores_json(truth, pred, 0, cm);
      rec.write(rec.path(".confusion.csv"), [&](std::ostream& o) { metrics::write_csv(o, cm); });
      rec.write_json(rec.path(".scores.json"), scores);
    };
  });

  // bench -------------------------------------------------------------------
  auto* ben = app.add_subcommand(
      "bench",
      "Distance-estimation sweeps over shots, coordinate or dimension.\n"
      "Writes <name>.csv with columns\n"
      "sweep_value,mean,stddev,trials,shots,embedding,mode,analytic\n"
      "where mean/stddev summarise the estimated squared distance over trials\n"
      "and analytic is the exact squared distance of the same estimator.");
  add_common(ben, common);
  EstimatorFlags ben_est;
  add_estimator(ben, ben_est, 2048, 1, false);
  std::string kind, values, pair_a = "1,0", pair_b = "1,1";
  std::size_t trials = 100, ben_dim = 2;
  ben->add_option("--kind", kind, "shots, distance or dimension")
      ->required()
      ->check(CLI::IsMember({"shots", "distance", "dimension"}));
  ben->add_option("--values", values, "Comma-separated sweep values");
  ben->add_option("--trials", trials, "Independent estimates per value")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ben->add_option("--dim", ben_dim, "Dimension of the distance sweep")->capture_default_str();
  ben->add_option("--a", pair_a, "First vector of the shots sweep")->capture_default_str();
  ben->add_option("--b", pair_b, "Second vector of the shots sweep")->capture_default_str();
  ben->callback([&] {
    command = "bench";
    action = [&](Recorder& rec) {
      const auto executor = common.executor();
      auto cfg = ben_est.config();
      std::vector<double> sweep;
      if (!values.empty()) {
        sweep = parse_list(values);
      } else if (kind == "shots") {
        sweep = {10, 50, 100, 250, 500, 1000, 2048, 4096, 8192, 12000, 16000, 24000, 32000};
      } else if (kind == "distance") {
        sweep = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      } else if (cfg.embedding == embed::Embedding::amplitude) {
        sweep = {2, 4, 8, 16, 32};
      } else {
        for (int n = 2; n <= 26; n += 2) sweep.push_back(n);
      }
      auto analytic_cfg = cfg;
      analytic_cfg.mode = dist::Mode::analytic;
      rec.write(rec.path(".csv"), [&](std::ostream& o) {
        o << "sweep_value,mean,stddev,trials,shots,embedding,mode,analytic\n";
        for (std::size_t i = 0; i < sweep.size(); ++i) {
          const double v = sweep[i];
          std::optional<embed::VectorPair> pair;
          if (kind == "shots") {
            if (v < 1 || v != std::floor(v)) throw InvalidArgument("shot counts must be positive integers");
            cfg.shots = std::uint64_t(v);
            pair.emplace(parse_list(pair_a), parse_list(pair_b));
          } else if (kind == "distance") {
            pair.emplace(Point(ben_dim, 1.0), Point(ben_dim, v));
          } else {
            if (v < 2 || v != std::floor(v)) throw InvalidArgument("dimensions must be integers >= 2");
            pair.emplace(Point(std::size_t(v), 1.0), Point(std::size_t(v), 2.0));
          }
          const auto width = cfg.block_size
                                 ? embed::circuit_width(std::min(*cfg.block_size, pair->dim()),
                                                        cfg.embedding)
                                 : embed::circuit_width(pair->dim(), cfg.embedding);
          if (width > executor.profile.qubits)
            throw backend::CircuitTooWide(executor.profile.qubits, width,
                                          executor.profile.name);
          const std::size_t n = cfg.mode == dist::Mode::analytic ? 1 : trials;
          const std::vector<embed::VectorPair> batch(n, *pair);
          const auto est = dist::estimate_many(batch, cfg, executor, derive_seed(common.seed, i));
          std::vector<double> sq;
          for (const auto& e : est) sq.push_back(e.sq_distance);
          double mean = 0.0, sd = 0.0;
          mean_stddev(sq, mean, sd);
          const auto exact = dist::estimate_many(std::vector{*pair}, analytic_cfg, executor, 0);
          o << fmt(v) << ',' << fmt(mean) << ',' << fmt(sd) << ',' << n << ','
            << (cfg.mode == dist::Mode::analytic ? 0 : cfg.shots) << ','
            << embed::to_string(cfg.embedding) << ',' << dist::to_string(cfg.mode) << ','
            << fmt(exact.front().sq_distance) << '\n';
        }
      });
    };
  });

  // replay ------------------------------------------------------------------
  auto* rpl = app.add_subcommand("replay", "Re-run the command recorded in a manifest.");
  std::string manifest_file, replay_out;
  rpl->add_option("--manifest", manifest_file, "Manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  rpl->add_option("--out-dir", replay_out, "Write outputs here instead");
  bool replaying = false;
  rpl->callback([&] { replaying = true; });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (replaying) {
    std::ifstream in(manifest_file);
    const auto m = json::parse(in);
    auto argv = m.at("argv").get<std::vector<std::string>>();
    if (!argv.empty() && argv.front() == "replay")
      throw InvalidArgument("manifest records a replay");
    if (!replay_out.empty()) {
      argv.push_back("--out-dir");
      argv.push_back(fs::absolute(replay_out).string());
    }
    if (m.contains("cwd")) fs::current_path(m["cwd"].get<std::string>());
    return run(argv);
  }

  CLI::App* sub = app.get_subcommands().front();
  if (common.name.empty()) common.name = command == "gen" ? "dataset" : command;
  Recorder rec(command, args, common, sub);
  action(rec);
  rec.finish();
  return 0;
}

int run(std::vector<std::string> args) {
  try {
    return dispatch(std::move(args));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  return run(std::vector<std::string>(argv + 1, argv + argc));
}
