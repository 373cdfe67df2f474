// core/config.cc

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

#include "sdsv/config.hh"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sdsv/textio.hh"

namespace sdsv {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& origin, const std::string& what) {
  throw InputError("config error (" + origin + "): " + what);
}

double to_double(const std::string& v, const std::string& origin,
                 const std::string& key) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    bad(origin, "bad numeric value for " + key + ": '" + v + "'");
  return d;
}

long long to_ll(const std::string& v, const std::string& origin,
                const std::string& key) {
  char* end = nullptr;
  const long long n = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    bad(origin, "bad integer value for " + key + ": '" + v + "'");
  return n;
}

int to_int(const std::string& v, const std::string& origin,
           const std::string& key) {
  return static_cast<int>(to_ll(v, origin, key));
}

std::uint64_t to_u64(const std::string& v, const std::string& origin,
                     const std::string& key) {
  char* end = nullptr;
  const unsigned long long n = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    bad(origin, "bad integer value for " + key + ": '" + v + "'");
  return n;
}

bool to_bool(const std::string& v, const std::string& origin,
             const std::string& key) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  bad(origin, "bad boolean value for " + key + ": '" + v + "'");
}

std::vector<int> to_int_list(const std::string& v, const std::string& origin,
                             const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) bad(origin, "empty list element for " + key);
    out.push_back(to_int(item, origin, key));
  }
  if (out.empty()) bad(origin, "empty list for " + key);
  return out;
}

PadMode to_pad(const std::string& v, const std::string& origin,
               const std::string& key) {
  if (v == "zero") return PadMode::kZero;
  if (v == "repeat") return PadMode::kRepeat;
  bad(origin, "bad pad mode for " + key + ": '" + v + "' (zero|repeat)");
}

LossKind to_loss(const std::string& v, const std::string& origin,
                 const std::string& key) {
  if (v == "ce") return LossKind::kCrossEntropy;
  if (v == "aam") return LossKind::kAAM;
  bad(origin, "bad loss for " + key + ": '" + v + "' (ce|aam)");
}

std::string int_list_str(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

const char* bool_str(bool b) { return b ? "on" : "off"; }
const char* pad_str(PadMode m) { return m == PadMode::kZero ? "zero" : "repeat"; }
const char* loss_str(LossKind l) {
  return l == LossKind::kCrossEntropy ? "ce" : "aam";
}

}  // namespace

void RunConfig::resolve() {
  synth.seed = seed;
  encoder.input_dim = features.n_mels;
  head.input_dim = encoder.embedding_dim;

  dino.crop = crop;
  dino.policy = augment;
  dino.features = features;
  dino.encoder = encoder;
  dino.head = head;
  dino.adam = adam;

  supervised.features = features;
  supervised.policy = augment;
  supervised.encoder = encoder;
  supervised.adam = adam;

  finetune.features = features;
  finetune.policy = augment;
  finetune.adam = adam;

  cluster.train = supervised;
}

RunConfig parse_run_config(const std::string& text,
                           const std::string& origin) {
  RunConfig c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') bad(where, "malformed section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(where, "expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) bad(where, "empty key");
    const std::string full = "[" + section + "] " + key;

    if (section == "global") {
      if (key == "seed") c.seed = to_u64(val, where, full);
      else if (key == "out_dir") c.out_dir = val;
      else bad(where, "unknown config key: " + full);
    } else if (section == "synth") {
      if (key == "n_speakers") c.synth.n_speakers = to_int(val, where, full);
      else if (key == "utts_per_speaker")
        c.synth.utts_per_speaker = to_int(val, where, full);
      else if (key == "dur_lo_s") c.synth.dur_lo_s = to_double(val, where, full);
      else if (key == "dur_hi_s") c.synth.dur_hi_s = to_double(val, where, full);
      else if (key == "n_attr_classes")
        c.synth.n_attr_classes = to_int(val, where, full);
      else if (key == "sample_rate")
        c.synth.sample_rate = to_int(val, where, full);
      else bad(where, "unknown config key: " + full);
    } else if (section == "features") {
      if (key == "n_mels") c.features.n_mels = to_int(val, where, full);
      else if (key == "frame_len_s")
        c.features.frame_len_s = to_double(val, where, full);
      else if (key == "hop_s") c.features.hop_s = to_double(val, where, full);
      else if (key == "mvn_window")
        c.features.mvn_window = to_int(val, where, full);
      else if (key == "vad_offset_db")
        c.features.vad_offset_db = to_double(val, where, full);
      else bad(where, "unknown config key: " + full);
    } else if (section == "crop") {
      if (key == "n_long") c.crop.n_long = to_int(val, where, full);
      else if (key == "len_long_s")
        c.crop.len_long_s = to_double(val, where, full);
      else if (key == "n_short") c.crop.n_short = to_int(val, where, full);
      else if (key == "len_short_s")
        c.crop.len_short_s = to_double(val, where, full);
      else bad(where, "unknown config key: " + full);
    } else if (section == "augment") {
      if (key == "reverb_prob")
        c.augment.reverb_prob = to_double(val, where, full);
      else if (key == "noise_prob")
        c.augment.noise_prob = to_double(val, where, full);
      else if (key == "snr_white_lo")
        c.augment.snr_ranges[0].lo_db = to_double(val, where, full);
      else if (key == "snr_white_hi")
        c.augment.snr_ranges[0].hi_db = to_double(val, where, full);
      else if (key == "snr_pink_lo")
        c.augment.snr_ranges[1].lo_db = to_double(val, where, full);
      else if (key == "snr_pink_hi")
        c.augment.snr_ranges[1].hi_db = to_double(val, where, full);
      else if (key == "snr_babble_lo")
        c.augment.snr_ranges[2].lo_db = to_double(val, where, full);
      else if (key == "snr_babble_hi")
        c.augment.snr_ranges[2].hi_db = to_double(val, where, full);
      else if (key == "rir_pool") c.augment.rir_pool = to_int(val, where, full);
      else if (key == "noise_pool")
        c.augment.noise_pool = to_int(val, where, full);
      else bad(where, "unknown config key: " + full);
    } else if (section == "encoder") {
      if (key == "hidden_dims")
        c.encoder.hidden_dims = to_int_list(val, where, full);
      else if (key == "embedding_dim")
        c.encoder.embedding_dim = to_int(val, where, full);
      else bad(where, "unknown config key: " + full);
    } else if (section == "head") {
      if (key == "hidden_dims")
        c.head.hidden_dims = to_int_list(val, where, full);
      else if (key == "bottleneck_dim")
        c.head.bottleneck_dim = to_int(val, where, full);
      else if (key == "out_dim") c.head.out_dim = to_int(val, where, full);
      else bad(where, "unknown config key: " + full);
    } else if (section == "adam") {
      if (key == "beta1") c.adam.beta1 = to_double(val, where, full);
      else if (key == "beta2") c.adam.beta2 = to_double(val, where, full);
      else if (key == "eps") c.adam.eps = to_double(val, where, full);
      else if (key == "weight_decay")
        c.adam.weight_decay = to_double(val, where, full);
      else if (key == "amsgrad") c.adam.amsgrad = to_bool(val, where, full);
      else bad(where, "unknown config key: " + full);
    } else if (section == "dino") {
      if (key == "tau_s") c.dino.tau_s = to_double(val, where, full);
      else if (key == "tau_t") c.dino.tau_t = to_double(val, where, full);
      else if (key == "center_momentum")
        c.dino.center_momentum = to_double(val, where, full);
      else if (key == "teacher_momentum_start")
        c.dino.teacher_momentum_start = to_double(val, where, full);
      else if (key == "teacher_momentum_end")
        c.dino.teacher_momentum_end = to_double(val, where, full);
      else if (key == "epochs") c.dino.epochs = to_int(val, where, full);
      else if (key == "batch_size")
        c.dino.batch_size = to_int(val, where, full);
      else if (key == "lr") c.dino.lr = to_double(val, where, full);
      else if (key == "lr_min") c.dino.lr_min = to_double(val, where, full);
      else if (key == "warmup_epochs")
        c.dino.warmup_epochs = to_int(val, where, full);
      else if (key == "freeze_last_epochs")
        c.dino.freeze_last_epochs = to_int(val, where, full);
      else if (key == "centering")
        c.dino.centering = to_bool(val, where, full);
      else if (key == "augment") c.dino.augment = to_bool(val, where, full);
      else bad(where, "unknown config key: " + full);
    } else if (section == "supervised") {
      if (key == "epochs") c.supervised.epochs = to_int(val, where, full);
      else if (key == "batch_size")
        c.supervised.batch_size = to_int(val, where, full);
      else if (key == "lr") c.supervised.lr = to_double(val, where, full);
      else if (key == "chunk_len_s")
        c.supervised.chunk_len_s = to_double(val, where, full);
      else if (key == "pad_mode")
        c.supervised.pad_mode = to_pad(val, where, full);
      else if (key == "augment")
        c.supervised.augment = to_bool(val, where, full);
      else if (key == "loss") c.supervised.loss = to_loss(val, where, full);
      else if (key == "scale")
        c.supervised.aam.scale = to_double(val, where, full);
      else if (key == "margin")
        c.supervised.aam.margin = to_double(val, where, full);
      else if (key == "margin_warmup_epochs")
        c.supervised.aam.margin_warmup_epochs = to_int(val, where, full);
      else bad(where, "unknown config key: " + full);
    } else if (section == "finetune") {
      if (key == "strategy") {
        if (val == "ft1") c.finetune.strategy = FinetuneStrategy::kFT1;
        else if (val == "ft2") c.finetune.strategy = FinetuneStrategy::kFT2;
        else bad(where, "bad strategy for " + full + ": '" + val + "' (ft1|ft2)");
      } else if (key == "loss") {
        c.finetune.loss = to_loss(val, where, full);
      } else if (key == "chunk_len_s") {
        c.finetune.chunk_len_s = to_double(val, where, full);
      } else if (key == "pad_mode") {
        c.finetune.pad_mode = to_pad(val, where, full);
      } else if (key == "augment") {
        c.finetune.augment = to_bool(val, where, full);
      } else if (key == "epochs") {
        c.finetune.epochs = to_int(val, where, full);
      } else if (key == "batch_size") {
        c.finetune.batch_size = to_int(val, where, full);
      } else if (key == "lr") {
        c.finetune.lr = to_double(val, where, full);
      } else if (key == "plateau_patience") {
        c.finetune.plateau_patience = to_int(val, where, full);
      } else if (key == "plateau_factor") {
        c.finetune.plateau_factor = to_double(val, where, full);
      } else if (key == "plateau_min_delta") {
        c.finetune.plateau_min_delta = to_double(val, where, full);
      } else if (key == "valid_fraction") {
        c.finetune.valid_fraction = to_double(val, where, full);
      } else if (key == "scale") {
        c.finetune.aam.scale = to_double(val, where, full);
      } else if (key == "margin") {
        c.finetune.aam.margin = to_double(val, where, full);
      } else if (key == "margin_warmup_epochs") {
        c.finetune.aam.margin_warmup_epochs = to_int(val, where, full);
      } else {
        bad(where, "unknown config key: " + full);
      }
    } else if (section == "backend") {
      if (key == "kind") {
        if (val == "cosine") c.backend.kind = BackendKind::kCosine;
        else if (val == "plda") c.backend.kind = BackendKind::kPLDA;
        else bad(where, "bad backend for " + full + ": '" + val + "' (cosine|plda)");
      } else if (key == "plda_dim") {
        c.backend.plda_dim = to_int(val, where, full);
      } else if (key == "plda_iters") {
        c.backend.plda_iters = to_int(val, where, full);
      } else {
        bad(where, "unknown config key: " + full);
      }
    } else if (section == "cluster") {
      if (key == "cycles") c.cluster.cycles = to_int(val, where, full);
      else if (key == "kmeans_k")
        c.cluster.kmeans_k = to_int(val, where, full);
      else if (key == "ahc_clusters")
        c.cluster.ahc_clusters = to_int(val, where, full);
      else if (key == "width_multiplier")
        c.cluster.width_multiplier = to_double(val, where, full);
      else if (key == "robust_epochs")
        c.cluster.robust_epochs = to_int(val, where, full);
      else if (key == "robust_margin")
        c.cluster.robust_margin = to_double(val, where, full);
      else bad(where, "unknown config key: " + full);
    } else if (section == "eval") {
      if (key == "p_target") c.eval.p_target = to_double(val, where, full);
      else if (key == "c_miss") c.eval.c_miss = to_double(val, where, full);
      else if (key == "c_fa") c.eval.c_fa = to_double(val, where, full);
      else bad(where, "unknown config key: " + full);
    } else if (section.empty()) {
      bad(where, "key outside any section: " + key);
    } else {
      bad(where, "unknown config section: [" + section + "]");
    }
  }
  c.resolve();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config error (" + path + "): cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path);
}

std::string serialize_run_config(const RunConfig& cfg) {
  std::ostringstream o;
  const auto d = [](double x) { return format_double(x); };
  o << "[global]\n"
    << "seed = " << cfg.seed << "\n"
    << "out_dir = " << cfg.out_dir << "\n\n";
  o << "[synth]\n"
    << "n_speakers = " << cfg.synth.n_speakers << "\n"
    << "utts_per_speaker = " << cfg.synth.utts_per_speaker << "\n"
    << "dur_lo_s = " << d(cfg.synth.dur_lo_s) << "\n"
    << "dur_hi_s = " << d(cfg.synth.dur_hi_s) << "\n"
    << "n_attr_classes = " << cfg.synth.n_attr_classes << "\n"
    << "sample_rate = " << cfg.synth.sample_rate << "\n\n";
  o << "[features]\n"
    << "n_mels = " << cfg.features.n_mels << "\n"
    << "frame_len_s = " << d(cfg.features.frame_len_s) << "\n"
    << "hop_s = " << d(cfg.features.hop_s) << "\n"
    << "mvn_window = " << cfg.features.mvn_window << "\n"
    << "vad_offset_db = " << d(cfg.features.vad_offset_db) << "\n\n";
  o << "[crop]\n"
    << "n_long = " << cfg.crop.n_long << "\n"
    << "len_long_s = " << d(cfg.crop.len_long_s) << "\n"
    << "n_short = " << cfg.crop.n_short << "\n"
    << "len_short_s = " << d(cfg.crop.len_short_s) << "\n\n";
  o << "[augment]\n"
    << "reverb_prob = " << d(cfg.augment.reverb_prob) << "\n"
    << "noise_prob = " << d(cfg.augment.noise_prob) << "\n"
    << "snr_white_lo = " << d(cfg.augment.snr_ranges[0].lo_db) << "\n"
    << "snr_white_hi = " << d(cfg.augment.snr_ranges[0].hi_db) << "\n"
    << "snr_pink_lo = " << d(cfg.augment.snr_ranges[1].lo_db) << "\n"
    << "snr_pink_hi = " << d(cfg.augment.snr_ranges[1].hi_db) << "\n"
    << "snr_babble_lo = " << d(cfg.augment.snr_ranges[2].lo_db) << "\n"
    << "snr_babble_hi = " << d(cfg.augment.snr_ranges[2].hi_db) << "\n"
    << "rir_pool = " << cfg.augment.rir_pool << "\n"
    << "noise_pool = " << cfg.augment.noise_pool << "\n\n";
  o << "[encoder]\n"
    << "hidden_dims = " << int_list_str(cfg.encoder.hidden_dims) << "\n"
    << "embedding_dim = " << cfg.encoder.embedding_dim << "\n\n";
  o << "[head]\n"
    << "hidden_dims = " << int_list_str(cfg.head.hidden_dims) << "\n"
    << "bottleneck_dim = " << cfg.head.bottleneck_dim << "\n"
    << "out_dim = " << cfg.head.out_dim << "\n\n";
  o << "[adam]\n"
    << "beta1 = " << d(cfg.adam.beta1) << "\n"
    << "beta2 = " << d(cfg.adam.beta2) << "\n"
    << "eps = " << d(cfg.adam.eps) << "\n"
    << "weight_decay = " << d(cfg.adam.weight_decay) << "\n"
    << "amsgrad = " << bool_str(cfg.adam.amsgrad) << "\n\n";
  o << "[dino]\n"
    << "tau_s = " << d(cfg.dino.tau_s) << "\n"
    << "tau_t = " << d(cfg.dino.tau_t) << "\n"
    << "center_momentum = " << d(cfg.dino.center_momentum) << "\n"
    << "teacher_momentum_start = " << d(cfg.dino.teacher_momentum_start) << "\n"
    << "teacher_momentum_end = " << d(cfg.dino.teacher_momentum_end) << "\n"
    << "epochs = " << cfg.dino.epochs << "\n"
    << "batch_size = " << cfg.dino.batch_size << "\n"
    << "lr = " << d(cfg.dino.lr) << "\n"
    << "lr_min = " << d(cfg.dino.lr_min) << "\n"
    << "warmup_epochs = " << cfg.dino.warmup_epochs << "\n"
    << "freeze_last_epochs = " << cfg.dino.freeze_last_epochs << "\n"
    << "centering = " << bool_str(cfg.dino.centering) << "\n"
    << "augment = " << bool_str(cfg.dino.augment) << "\n\n";
  o << "[supervised]\n"
    << "epochs = " << cfg.supervised.epochs << "\n"
    << "batch_size = " << cfg.supervised.batch_size << "\n"
    << "lr = " << d(cfg.supervised.lr) << "\n"
    << "chunk_len_s = " << d(cfg.supervised.chunk_len_s) << "\n"
    << "pad_mode = " << pad_str(cfg.supervised.pad_mode) << "\n"
    << "augment = " << bool_str(cfg.supervised.augment) << "\n"
    << "loss = " << loss_str(cfg.supervised.loss) << "\n"
    << "scale = " << d(cfg.supervised.aam.scale) << "\n"
    << "margin = " << d(cfg.supervised.aam.margin) << "\n"
    << "margin_warmup_epochs = " << cfg.supervised.aam.margin_warmup_epochs
    << "\n\n";
  o << "[finetune]\n"
    << "strategy = "
    << (cfg.finetune.strategy == FinetuneStrategy::kFT1 ? "ft1" : "ft2")
    << "\n"
    << "loss = " << loss_str(cfg.finetune.loss) << "\n"
    << "chunk_len_s = " << d(cfg.finetune.chunk_len_s) << "\n"
    << "pad_mode = " << pad_str(cfg.finetune.pad_mode) << "\n"
    << "augment = " << bool_str(cfg.finetune.augment) << "\n"
    << "epochs = " << cfg.finetune.epochs << "\n"
    << "batch_size = " << cfg.finetune.batch_size << "\n"
    << "lr = " << d(cfg.finetune.lr) << "\n"
    << "plateau_patience = " << cfg.finetune.plateau_patience << "\n"
    << "plateau_factor = " << d(cfg.finetune.plateau_factor) << "\n"
    << "plateau_min_delta = " << d(cfg.finetune.plateau_min_delta) << "\n"
    << "valid_fraction = " << d(cfg.finetune.valid_fraction) << "\n"
    << "scale = " << d(cfg.finetune.aam.scale) << "\n"
    << "margin = " << d(cfg.finetune.aam.margin) << "\n"
    << "margin_warmup_epochs = " << cfg.finetune.aam.margin_warmup_epochs
    << "\n\n";
  o << "[backend]\n"
    << "kind = " << (cfg.backend.kind == BackendKind::kCosine ? "cosine" : "plda")
    << "\n"
    << "plda_dim = " << cfg.backend.plda_dim << "\n"
    << "plda_iters = " << cfg.backend.plda_iters << "\n\n";
  o << "[cluster]\n"
    << "cycles = " << cfg.cluster.cycles << "\n"
    << "kmeans_k = " << cfg.cluster.kmeans_k << "\n"
    << "ahc_clusters = " << cfg.cluster.ahc_clusters << "\n"
    << "width_multiplier = " << d(cfg.cluster.width_multiplier) << "\n"
    << "robust_epochs = " << cfg.cluster.robust_epochs << "\n"
    << "robust_margin = " << d(cfg.cluster.robust_margin) << "\n\n";
  o << "[eval]\n"
    << "p_target = " << d(cfg.eval.p_target) << "\n"
    << "c_miss = " << d(cfg.eval.c_miss) << "\n"
    << "c_fa = " << d(cfg.eval.c_fa) << "\n";
  return o.str();
}

void write_run_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write config: " + path);
  out << serialize_run_config(cfg);
}

std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string s = serialize_run_config(cfg);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace sdsv
