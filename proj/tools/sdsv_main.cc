// tools/sdsv_main.cc

// Copyright 2026  SDSV Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Single command-line entry point: corpus synthesis, training, embedding
// extraction, scoring, clustering, evaluation, and report aggregation.
// Exit codes: 0 success, 2 configuration/input error, 3 numerical divergence.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdsv/backend.hh"
#include "sdsv/checkpoint.hh"
#include "sdsv/cluster.hh"
#include "sdsv/config.hh"
#include "sdsv/dino.hh"
#include "sdsv/eval.hh"
#include "sdsv/supervised.hh"
#include "sdsv/synth.hh"
#include "sdsv/textio.hh"
#include "sdsv/wav.hh"

namespace fs = std::filesystem;
using namespace sdsv;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;  // -1: keep the config's seed
};

void add_common(CLI::App* cmd, CommonArgs* args, bool out_required = true) {
  cmd->add_option("--config", args->config_path, "run configuration file");
  auto* out = cmd->add_option("--out", args->out_dir, "output directory");
  if (out_required) out->required();
  cmd->add_option("--seed", args->seed, "override the configured seed");
}

RunConfig make_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = load_run_config(args.config_path);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  cfg.resolve();
  return cfg;
}

void prepare_out(const RunConfig& cfg) {
  SDSV_CHECK(!cfg.out_dir.empty(), "no output directory given");
  fs::create_directories(cfg.out_dir);
  write_run_config((fs::path(cfg.out_dir) / "config.resolved.ini").string(),
                   cfg);
}

std::string hash_str(const RunConfig& cfg) {
  return std::to_string(config_hash(cfg));
}

std::vector<CorpusUtterance> load_corpus(const std::string& manifest) {
  const auto entries = read_manifest(manifest);
  const fs::path base = fs::path(manifest).parent_path();
  std::vector<CorpusUtterance> corpus;
  corpus.reserve(entries.size());
  for (const auto& e : entries) {
    CorpusUtterance u;
    u.utt_id = e.utt_id;
    u.speaker_id = e.speaker_id;
    u.attr_class = e.attr_class;
    fs::path p(e.path);
    if (p.is_relative()) p = base / p;
    u.wave = read_wav(p.string());
    corpus.push_back(std::move(u));
  }
  return corpus;
}

std::vector<int> speaker_labels(const std::vector<CorpusUtterance>& corpus,
                                int* n_classes) {
  std::map<std::string, int> ids;
  std::vector<int> out;
  for (const auto& u : corpus) {
    auto it = ids.find(u.speaker_id);
    if (it == ids.end())
      it = ids.emplace(u.speaker_id, static_cast<int>(ids.size())).first;
    out.push_back(it->second);
  }
  *n_classes = static_cast<int>(ids.size());
  return out;
}

std::vector<int> attr_labels(const std::vector<CorpusUtterance>& corpus,
                             int* n_classes) {
  std::vector<int> out;
  int mx = -1;
  for (const auto& u : corpus) {
    SDSV_CHECK(u.attr_class >= 0, "negative attribute class in manifest");
    out.push_back(u.attr_class);
    mx = std::max(mx, u.attr_class);
  }
  *n_classes = mx + 1;
  return out;
}

std::vector<ParamRef> with_prefix(std::vector<ParamRef> refs,
                                  const std::string& prefix) {
  for (auto& r : refs) r.name = prefix + r.name;
  return refs;
}

// Rebuild an encoder from checkpoint blocks under prefix ("enc." names
// included); shapes come from the file so the encoder may be wider than the
// current config.
EncoderParams encoder_from_ckpt(const CheckpointFile& f,
                                const std::string& prefix) {
  EncoderConfig cfg;
  cfg.hidden_dims.clear();
  int i = 0;
  while (f.has(prefix + "enc.w" + std::to_string(i))) {
    const Matrix& w = f.at(prefix + "enc.w" + std::to_string(i));
    if (i == 0) cfg.input_dim = static_cast<int>(w.cols());
    cfg.hidden_dims.push_back(static_cast<int>(w.rows()));
    ++i;
  }
  SDSV_CHECK(i > 0, "checkpoint holds no encoder blocks under prefix '" +
                        prefix + "'");
  const Matrix& w_emb = f.at(prefix + "enc.w_emb");
  cfg.embedding_dim = static_cast<int>(w_emb.rows());
  EncoderParams p;
  p.cfg = cfg;
  for (int k = 0; k < i; ++k) {
    p.w.push_back(f.at(prefix + "enc.w" + std::to_string(k)));
    p.b.push_back(f.at(prefix + "enc.b" + std::to_string(k)).col(0));
  }
  p.w_emb = w_emb;
  p.b_emb = f.at(prefix + "enc.b_emb").col(0);
  return p;
}

// A checkpoint from train-dino stores student.* / teacher.*; trainers store
// bare enc.*.  Inference prefers the distilled teacher.
EncoderParams encoder_from_any_ckpt(const std::string& path) {
  const CheckpointFile f = read_checkpoint(path);
  if (f.has("enc.w0")) return encoder_from_ckpt(f, "");
  if (f.has("teacher.enc.w0")) return encoder_from_ckpt(f, "teacher.");
  if (f.has("student.enc.w0")) return encoder_from_ckpt(f, "student.");
  throw InputError("no encoder found in checkpoint: " + path);
}

void write_supervised_history(const std::string& path,
                              const std::vector<SupervisedEpochStats>& h) {
  std::ofstream os(path);
  SDSV_CHECK(os.good(), "cannot write history: " + path);
  os << "epoch,loss,accuracy,margin,lr\n";
  for (const auto& e : h)
    os << e.epoch << ',' << format_double(e.loss) << ','
       << format_double(e.accuracy) << ',' << format_double(e.margin) << ','
       << format_double(e.lr) << '\n';
}

std::map<std::string, Vector> embedding_map(const std::string& path) {
  std::map<std::string, Vector> out;
  for (auto& [id, v] : read_embeddings(path)) out.emplace(id, std::move(v));
  return out;
}

const Vector& lookup(const std::map<std::string, Vector>& m,
                     const std::string& id) {
  auto it = m.find(id);
  SDSV_CHECK(it != m.end(), "no embedding for utterance " + id);
  return it->second;
}

// ---------------------------------------------------------------------------

int cmd_synth(const CommonArgs& args) {
  RunConfig cfg = make_config(args);
  prepare_out(cfg);
  const auto corpus = synth_corpus(cfg.synth);
  const fs::path out(cfg.out_dir);
  fs::create_directories(out / "wav");
  std::vector<ManifestEntry> entries;
  for (const auto& u : corpus) {
    const std::string rel = "wav/" + u.utt_id + ".wav";
    write_wav((out / rel).string(), u.wave);
    entries.push_back({u.utt_id, u.speaker_id, u.attr_class, rel});
  }
  write_manifest((out / "manifest.txt").string(), entries);
  std::cout << "wrote " << entries.size() << " utterances to " << cfg.out_dir
            << "\n";
  return 0;
}

int cmd_train_dino(const CommonArgs& args, const std::string& manifest) {
  RunConfig cfg = make_config(args);
  prepare_out(cfg);
  const auto corpus = load_corpus(manifest);
  DinoResult res = train_dino(corpus, cfg.dino, cfg.seed);

  const fs::path out(cfg.out_dir);
  {
    std::ofstream os(out / "history.csv");
    os << "epoch,loss,entropy,max_prob,center_norm,lambda,lr\n";
    for (const auto& e : res.history)
      os << e.epoch << ',' << format_double(e.loss) << ','
         << format_double(e.teacher_entropy) << ','
         << format_double(e.teacher_max_prob) << ','
         << format_double(e.center_norm) << ',' << format_double(e.lambda)
         << ',' << format_double(e.lr) << '\n';
  }
  std::vector<ParamRef> blocks;
  auto add = [&blocks](std::vector<ParamRef> v) {
    blocks.insert(blocks.end(), v.begin(), v.end());
  };
  add(with_prefix(res.state.student_enc.param_refs(), "student."));
  add(with_prefix(res.state.student_head.param_refs(), "student."));
  add(with_prefix(res.state.teacher_enc.param_refs(), "teacher."));
  add(with_prefix(res.state.teacher_head.param_refs(), "teacher."));
  blocks.push_back({"center", res.state.center.data(),
                    res.state.center.size(), 1});
  save_checkpoint((out / "dino.ckpt").string(), hash_str(cfg), blocks);
  std::cout << "final loss " << format_double(res.history.back().loss)
            << "\n";
  return 0;
}

int cmd_train_xvector(const CommonArgs& args, const std::string& manifest,
                      const std::string& labels_path) {
  RunConfig cfg = make_config(args);
  prepare_out(cfg);
  const auto corpus = load_corpus(manifest);
  int n_classes = 0;
  std::vector<int> labels;
  if (labels_path.empty()) {
    labels = speaker_labels(corpus, &n_classes);
  } else {
    std::map<std::string, int> by_id;
    for (const auto& [id, l] : read_pseudo_labels(labels_path)) by_id[id] = l;
    for (const auto& u : corpus) {
      auto it = by_id.find(u.utt_id);
      SDSV_CHECK(it != by_id.end(), "no label for utterance " + u.utt_id);
      labels.push_back(it->second);
      n_classes = std::max(n_classes, it->second + 1);
    }
  }
  SupervisedResult res =
      train_supervised(corpus, labels, n_classes, cfg.supervised, cfg.seed);

  const fs::path out(cfg.out_dir);
  write_supervised_history((out / "history.csv").string(), res.history);
  std::vector<ParamRef> blocks = res.model.param_refs();
  save_checkpoint((out / "xvector.ckpt").string(), hash_str(cfg), blocks);
  std::cout << "final accuracy "
            << format_double(res.history.back().accuracy) << "\n";
  return 0;
}

int cmd_finetune(const CommonArgs& args, const std::string& manifest,
                 const std::string& model_path, const std::string& strategy,
                 const std::string& loss, double chunk_len,
                 const std::string& pad, const std::string& augment) {
  RunConfig cfg = make_config(args);
  if (!strategy.empty()) {
    if (strategy == "ft1") cfg.finetune.strategy = FinetuneStrategy::kFT1;
    else if (strategy == "ft2") cfg.finetune.strategy = FinetuneStrategy::kFT2;
    else throw InputError("bad --strategy: " + strategy + " (ft1|ft2)");
  }
  if (!loss.empty()) {
    if (loss == "ce") cfg.finetune.loss = LossKind::kCrossEntropy;
    else if (loss == "aam") cfg.finetune.loss = LossKind::kAAM;
    else throw InputError("bad --loss: " + loss + " (ce|aam)");
  }
  if (chunk_len > 0) cfg.finetune.chunk_len_s = chunk_len;
  if (!pad.empty()) {
    if (pad == "zero") cfg.finetune.pad_mode = PadMode::kZero;
    else if (pad == "repeat") cfg.finetune.pad_mode = PadMode::kRepeat;
    else throw InputError("bad --pad: " + pad + " (zero|repeat)");
  }
  if (!augment.empty()) {
    if (augment == "on") cfg.finetune.augment = true;
    else if (augment == "off") cfg.finetune.augment = false;
    else throw InputError("bad --augment: " + augment + " (on|off)");
  }
  prepare_out(cfg);

  const auto corpus = load_corpus(manifest);
  const EncoderParams pretrained = encoder_from_any_ckpt(model_path);
  int n_classes = 0;
  const std::vector<int> labels = attr_labels(corpus, &n_classes);
  FinetuneResult res =
      finetune(pretrained, corpus, labels, n_classes, cfg.finetune, cfg.seed);

  const fs::path out(cfg.out_dir);
  write_supervised_history((out / "history.csv").string(), res.history);
  std::vector<ParamRef> blocks = res.model.param_refs();
  save_checkpoint((out / "finetune.ckpt").string(), hash_str(cfg), blocks);

  // Utterance-level accuracy on the training corpus, for report tables.
  std::vector<int> preds;
  for (const auto& u : corpus)
    preds.push_back(predict_class(res.model, u.wave, cfg.finetune.features,
                                  cfg.finetune.loss));
  const double acc = accuracy(preds, labels);
  {
    std::ofstream os(out / "summary.csv");
    os << "strategy,loss,chunk_len_s,pad_mode,accuracy\n"
       << (cfg.finetune.strategy == FinetuneStrategy::kFT1 ? "ft1" : "ft2")
       << ',' << (cfg.finetune.loss == LossKind::kCrossEntropy ? "ce" : "aam")
       << ',' << format_double(cfg.finetune.chunk_len_s) << ','
       << (cfg.finetune.pad_mode == PadMode::kZero ? "zero" : "repeat") << ','
       << format_double(acc) << '\n';
  }
  std::cout << "accuracy " << format_double(acc) << "\n";
  return 0;
}

int cmd_extract(const CommonArgs& args, const std::string& manifest,
                const std::string& model_path) {
  RunConfig cfg = make_config(args);
  prepare_out(cfg);
  const auto corpus = load_corpus(manifest);
  const EncoderParams enc = encoder_from_any_ckpt(model_path);
  std::vector<std::pair<std::string, Vector>> embs;
  for (const auto& u : corpus)
    embs.emplace_back(u.utt_id,
                      utterance_embedding(enc, u.wave, cfg.features));
  write_embeddings((fs::path(cfg.out_dir) / "embeddings.txt").string(), embs);
  std::cout << "extracted " << embs.size() << " embeddings\n";
  return 0;
}

int cmd_train_plda(const CommonArgs& args, const std::string& emb_path,
                   const std::string& manifest) {
  RunConfig cfg = make_config(args);
  prepare_out(cfg);
  const auto embs = read_embeddings(emb_path);
  SDSV_CHECK(!embs.empty(), "no embeddings in " + emb_path);
  std::map<std::string, std::string> spk;
  for (const auto& e : read_manifest(manifest)) spk[e.utt_id] = e.speaker_id;
  std::map<std::string, int> ids;
  Matrix x(embs.size(), embs[0].second.size());
  std::vector<int> labels;
  for (std::size_t i = 0; i < embs.size(); ++i) {
    auto it = spk.find(embs[i].first);
    SDSV_CHECK(it != spk.end(),
               "utterance " + embs[i].first + " not in manifest");
    auto id = ids.find(it->second);
    if (id == ids.end())
      id = ids.emplace(it->second, static_cast<int>(ids.size())).first;
    labels.push_back(id->second);
    x.row(i) = embs[i].second;
  }
  const PLDAModel model =
      plda_fit(x, labels, cfg.backend.plda_dim, cfg.backend.plda_iters);
  save_plda((fs::path(cfg.out_dir) / "plda.txt").string(), model);
  std::cout << "trained PLDA on " << x.rows() << " embeddings, "
            << ids.size() << " speakers\n";
  return 0;
}

int cmd_score(const CommonArgs& args, const std::string& emb_path,
              const std::string& trials_path, const std::string& backend,
              const std::string& model_path) {
  RunConfig cfg = make_config(args);
  if (!backend.empty()) {
    if (backend == "cosine") cfg.backend.kind = BackendKind::kCosine;
    else if (backend == "plda") cfg.backend.kind = BackendKind::kPLDA;
    else throw InputError("bad --backend: " + backend + " (cosine|plda)");
  }
  prepare_out(cfg);
  const auto embs = embedding_map(emb_path);
  const auto trials = read_trials(trials_path);
  std::vector<ScoredTrial> scored;
  if (cfg.backend.kind == BackendKind::kCosine) {
    for (const auto& t : trials)
      scored.push_back({t.enroll_id, t.test_id,
                        cosine_score(lookup(embs, t.enroll_id),
                                     lookup(embs, t.test_id))});
  } else {
    SDSV_CHECK(!model_path.empty(), "--backend plda requires --model");
    const PLDAModel model = load_plda(model_path);
    const PLDAScorer scorer = make_plda_scorer(model);
    for (const auto& t : trials)
      scored.push_back({t.enroll_id, t.test_id,
                        plda_llr(scorer, lookup(embs, t.enroll_id),
                                 lookup(embs, t.test_id))});
  }
  write_scores((fs::path(cfg.out_dir) / "scores.txt").string(), scored);
  std::cout << "scored " << scored.size() << " trials\n";
  return 0;
}

int cmd_cluster_iterate(const CommonArgs& args, const std::string& manifest,
                        const std::string& heldout_manifest,
                        const std::string& model_path) {
  RunConfig cfg = make_config(args);
  prepare_out(cfg);
  const auto train = load_corpus(manifest);
  const auto heldout = load_corpus(heldout_manifest);
  const EncoderParams initial = encoder_from_any_ckpt(model_path);
  IterateResult res = iterate_pipeline(train, heldout, initial, cfg.cluster,
                                       cfg.seed);

  const fs::path out(cfg.out_dir);
  {
    std::ofstream os(out / "metrics.csv");
    os << "cycle,eer,purity,pairwise_f1,n_pseudo_classes\n";
    for (const auto& m : res.metrics)
      os << m.cycle << ',' << format_double(m.eer) << ','
         << format_double(m.purity) << ',' << format_double(m.pairwise_f1)
         << ',' << m.n_pseudo_classes << '\n';
  }
  EncoderParams final_enc = res.final_encoder;
  save_checkpoint((out / "encoder.ckpt").string(), hash_str(cfg),
                  final_enc.param_refs());
  // Final-model pseudo labels, for reuse as training targets.
  const int kmeans_k = cfg.cluster.kmeans_k > 0
                           ? cfg.cluster.kmeans_k
                           : 4 * cfg.cluster.ahc_clusters;
  const PseudoLabelResult pl =
      pseudo_label(train, final_enc, cfg.features, kmeans_k,
                   cfg.cluster.ahc_clusters, cfg.seed);
  write_pseudo_labels((out / "pseudo_labels.txt").string(), pl.labels);
  if (!res.metrics.empty())
    std::cout << "final held-out EER "
              << format_double(res.metrics.back().eer) << "\n";
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& scores_path,
             const std::string& trials_path) {
  RunConfig cfg = make_config(args);
  prepare_out(cfg);
  const auto trials = read_trials(trials_path);
  std::map<std::pair<std::string, std::string>, int> label_of;
  for (const auto& t : trials) {
    SDSV_CHECK(t.label >= 0, "eval needs labeled trials: " + t.enroll_id +
                                 " " + t.test_id);
    label_of[{t.enroll_id, t.test_id}] = t.label;
  }
  std::vector<double> tgt, non;
  for (const auto& s : read_scores(scores_path)) {
    auto it = label_of.find({s.enroll_id, s.test_id});
    SDSV_CHECK(it != label_of.end(), "scored pair not in trial list: " +
                                         s.enroll_id + " " + s.test_id);
    (it->second == 1 ? tgt : non).push_back(s.score);
  }
  const double e = eer(tgt, non);
  const double dcf =
      min_dcf(tgt, non, cfg.eval.p_target, cfg.eval.c_miss, cfg.eval.c_fa);

  const fs::path out(cfg.out_dir);
  {
    std::ofstream os(out / "metrics.json");
    os << "{\n"
       << "  \"eer\": " << format_double(e) << ",\n"
       << "  \"min_dcf\": " << format_double(dcf) << ",\n"
       << "  \"n_target\": " << tgt.size() << ",\n"
       << "  \"n_nontarget\": " << non.size() << "\n"
       << "}\n";
  }
  {
    std::ofstream os(out / "det.csv");
    os << "threshold,p_fa,p_miss\n";
    for (const auto& p : det_sweep(tgt, non))
      os << format_double(p.threshold) << ',' << format_double(p.p_fa) << ','
         << format_double(p.p_miss) << '\n';
  }
  std::cout << "eer " << format_double(e) << " min_dcf " << format_double(dcf)
            << "\n";
  return 0;
}

int cmd_report(const CommonArgs& args, const std::vector<std::string>& inputs) {
  RunConfig cfg = make_config(args);
  prepare_out(cfg);
  SDSV_CHECK(!inputs.empty(), "report needs at least one input CSV");
  // Group inputs by header so runs with the same schema land in one table.
  std::map<std::string, std::vector<std::pair<std::string, std::string>>>
      tables;  // header -> (source, row)
  for (const auto& in : inputs) {
    std::ifstream is(in);
    SDSV_CHECK(is.good(), "cannot open report input: " + in);
    std::string header;
    SDSV_CHECK(static_cast<bool>(std::getline(is, header)),
               "empty report input: " + in);
    std::string row;
    while (std::getline(is, row))
      if (!row.empty()) tables[header].emplace_back(in, row);
  }
  std::ofstream os(fs::path(cfg.out_dir) / "report.csv");
  bool first = true;
  for (const auto& [header, rows] : tables) {
    if (!first) os << '\n';
    first = false;
    os << "source," << header << '\n';
    for (const auto& [src, row] : rows) os << src << ',' << row << '\n';
  }
  std::cout << "aggregated " << inputs.size() << " files into "
            << tables.size() << " tables\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale speaker embedding toolkit"};
  app.require_subcommand(1);

  CommonArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  add_common(synth, &synth_args);

  CommonArgs dino_args;
  std::string dino_manifest;
  auto* dino = app.add_subcommand("train-dino", "self-supervised training");
  add_common(dino, &dino_args);
  dino->add_option("--corpus", dino_manifest, "training manifest")->required();

  CommonArgs xvec_args;
  std::string xvec_manifest, xvec_labels;
  auto* xvec = app.add_subcommand("train-xvector", "supervised training");
  add_common(xvec, &xvec_args);
  xvec->add_option("--corpus", xvec_manifest, "training manifest")->required();
  xvec->add_option("--labels", xvec_labels,
                   "pseudo-label file (default: manifest speaker ids)");

  CommonArgs ft_args;
  std::string ft_manifest, ft_model, ft_strategy, ft_loss, ft_pad, ft_augment;
  double ft_chunk = 0.0;
  auto* ft = app.add_subcommand("finetune", "transfer to the attribute task");
  add_common(ft, &ft_args);
  ft->add_option("--corpus", ft_manifest, "labeled manifest")->required();
  ft->add_option("--model", ft_model, "pretrained checkpoint")->required();
  ft->add_option("--strategy", ft_strategy, "ft1|ft2");
  ft->add_option("--loss", ft_loss, "ce|aam");
  ft->add_option("--chunk-len", ft_chunk, "training chunk length, seconds");
  ft->add_option("--pad", ft_pad, "zero|repeat");
  ft->add_option("--augment", ft_augment, "on|off");

  CommonArgs ex_args;
  std::string ex_manifest, ex_model;
  auto* ex = app.add_subcommand("extract", "utterance embeddings");
  add_common(ex, &ex_args);
  ex->add_option("--corpus", ex_manifest, "manifest")->required();
  ex->add_option("--model", ex_model, "model checkpoint")->required();

  CommonArgs plda_args;
  std::string plda_embs, plda_manifest;
  auto* plda = app.add_subcommand("train-plda", "fit the PLDA back-end");
  add_common(plda, &plda_args);
  plda->add_option("--embeddings", plda_embs, "embedding file")->required();
  plda->add_option("--corpus", plda_manifest, "manifest with speaker labels")
      ->required();

  CommonArgs score_args;
  std::string score_embs, score_trials, score_backend, score_model;
  auto* score = app.add_subcommand("score", "score a trial list");
  add_common(score, &score_args);
  score->add_option("--embeddings", score_embs, "embedding file")->required();
  score->add_option("--trials", score_trials, "trial list")->required();
  score->add_option("--backend", score_backend, "cosine|plda");
  score->add_option("--model", score_model, "PLDA model file");

  CommonArgs ci_args;
  std::string ci_manifest, ci_heldout, ci_model;
  auto* ci = app.add_subcommand("cluster-iterate",
                                "iterative pseudo-label training");
  add_common(ci, &ci_args);
  ci->add_option("--corpus", ci_manifest, "training manifest")->required();
  ci->add_option("--heldout", ci_heldout, "held-out manifest")->required();
  ci->add_option("--model", ci_model, "initial encoder checkpoint")
      ->required();

  CommonArgs eval_args;
  std::string eval_scores, eval_trials;
  auto* ev = app.add_subcommand("eval", "EER / minDCF from scores");
  add_common(ev, &eval_args);
  ev->add_option("--scores", eval_scores, "score file")->required();
  ev->add_option("--trials", eval_trials, "labeled trial list")->required();

  CommonArgs report_args;
  std::vector<std::string> report_inputs;
  auto* rep = app.add_subcommand("report", "aggregate CSVs across runs");
  add_common(rep, &report_args);
  rep->add_option("inputs", report_inputs, "CSV files to aggregate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_args);
    if (dino->parsed()) return cmd_train_dino(dino_args, dino_manifest);
    if (xvec->parsed())
      return cmd_train_xvector(xvec_args, xvec_manifest, xvec_labels);
    if (ft->parsed())
      return cmd_finetune(ft_args, ft_manifest, ft_model, ft_strategy,
                          ft_loss, ft_chunk, ft_pad, ft_augment);
    if (ex->parsed()) return cmd_extract(ex_args, ex_manifest, ex_model);
    if (plda->parsed())
      return cmd_train_plda(plda_args, plda_embs, plda_manifest);
    if (score->parsed())
      return cmd_score(score_args, score_embs, score_trials, score_backend,
                       score_model);
    if (ci->parsed())
      return cmd_cluster_iterate(ci_args, ci_manifest, ci_heldout, ci_model);
    if (ev->parsed()) return cmd_eval(eval_args, eval_scores, eval_trials);
    if (rep->parsed()) return cmd_report(report_args, report_inputs);
  } catch (const DivergedError& e) {
    std::cerr << "sdsv: numerical divergence: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "sdsv: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
