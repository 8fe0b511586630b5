// Copyright (c) 2026 The lip2speech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Stages run through the lip2speech CLI entry point on the
// default synthetic corpus.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "grad_check.h"
#include "l2s/cli/commands.h"
#include "l2s/content/content_encoder.h"
#include "l2s/corpus/corpus.h"
#include "l2s/crossmodal/crossmodal.h"
#include "l2s/dsp/align.h"
#include "l2s/dsp/griffin_lim.h"
#include "l2s/dsp/stft.h"
#include "l2s/eval/metrics.h"
#include "l2s/eval/pipeline.h"
#include "l2s/synthesis/decoder.h"
#include "l2s/synthesis/elbo.h"
#include "l2s/synthesis/postnet.h"
#include "oracles.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace l2s {
namespace {

using nn::Var;
using testing::RandomMat;

constexpr uint64_t kCorpusSeed = 7;
constexpr uint64_t kRunSeed = 1;

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

class Reporter {
 public:
  void Line(int id, bool pass, const std::string& detail) {
    all_pass_ &= pass;
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
  }
  bool all_pass() const { return all_pass_; }

 private:
  bool all_pass_ = true;
};

std::string Fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// Runs the CLI in-process; failures abort the acceptance run.
void Tool(std::vector<std::string> args, const std::string& log) {
  args.insert(args.begin(), "lip2speech");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ofstream out(log, std::ios::app);
  std::ostringstream err;
  const int code = cli::Run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != cli::kExitOk) {
    throw std::runtime_error(args[1] + " exited " + std::to_string(code) + ": " + err.str());
  }
}

json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return json::parse(in);
}

std::vector<std::string> HeadLines(const std::string& path, int n) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (static_cast<int>(lines.size()) < n && std::getline(in, line)) lines.push_back(line);
  return lines;
}

// ---------------------------------------------------------------------------
// Criterion 1: numerical correctness.

void NumericalSuite(Reporter& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);

  double kl_worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    content::ContentPosterior p{RandomMat(3, 4, rng), Mat(3, 4)};
    std::uniform_real_distribution<double> lv(-2.0, 1.0);
    for (Index i = 0; i < p.logvar.size(); ++i) p.logvar.data()[i] = lv(rng);
    const double closed = content::KlToStandardNormal(p);
    const double mc = testing::MonteCarloKl(p, 100000, 1000 + trial);
    kl_worst = std::max(kl_worst, std::abs(mc - closed) / closed);
  }

  double grad_worst = 0;
  for (int n = 3; n <= 6; ++n) {
    std::vector<corpus::Gender> g(n);
    for (int i = 0; i < n; ++i) g[i] = i % 2 ? corpus::Gender::kFemale : corpus::Gender::kMale;
    std::vector<corpus::Gender> gu = g;
    std::swap(gu[0], gu[1]);
    const auto gc = testing::CheckGradients(
        [&](const std::vector<Var>& l) {
          return crossmodal::GenderContrastiveLoss(l[0], l[1], g, gu);
        },
        {Var::Leaf(RandomMat(n, 5, rng, 0.5)), Var::Leaf(RandomMat(n, 5, rng, 0.5))}, 1e-6);
    const auto cs = testing::CheckGradients(
        [](const std::vector<Var>& l) { return crossmodal::CosineSimilarityLoss(l[0], l[1]); },
        {Var::Leaf(RandomMat(n, 5, rng)), Var::Leaf(RandomMat(n, 5, rng))}, 1e-6);
    grad_worst = std::max({grad_worst, gc.max_rel_error, cs.max_rel_error});
  }
  {
    const Mat gm = RandomMat(8, 80, rng), gl = RandomMat(8, 321, rng).cwiseAbs();
    const auto direct = testing::CheckGradients(
        [&](const std::vector<Var>& l) {
          return synthesis::ElboLoss(l[0], l[1], gm, gl, l[2], l[3], 0.001).total;
        },
        {Var::Leaf(RandomMat(8, 80, rng)), Var::Leaf(RandomMat(8, 321, rng)),
         Var::Leaf(RandomMat(2, 16, rng)), Var::Leaf(RandomMat(2, 16, rng, 0.3))},
        1e-6);
    grad_worst = std::max(grad_worst, direct.max_rel_error);
    // Through the decoder and postnet from the posterior.
    const synthesis::ConformerDecoder dec(synthesis::DecoderConfig::Toy(), 11);
    const synthesis::Postnet post(synthesis::PostnetConfig::Toy(), 12);
    const Mat eps = RandomMat(6, 16, rng);
    const Mat gm2 = RandomMat(24, 80, rng), gl2 = RandomMat(24, 321, rng).cwiseAbs();
    Var mu = Var::Leaf(RandomMat(6, 16, rng)), lv = Var::Leaf(RandomMat(6, 16, rng, 0.3));
    const Var spk = Var::Constant(RandomMat(1, 16, rng).cwiseAbs());
    auto f = [&]() {
      const Var mel = dec.Forward(nn::RepeatRows(content::Reparameterize(mu, lv, eps), 4), spk);
      return synthesis::ElboLoss(mel, post.Forward(mel, {24}, false), gm2, gl2, mu, lv, 0.001)
          .total;
    };
    const auto deep = testing::CheckSampledGradients(f, {mu, lv}, 30, 5, 1e-6);
    grad_worst = std::max(grad_worst, deep.max_rel_error);
  }

  double gc_oracle_worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> pick_n(2, 8);
    const int n = pick_n(rng);
    std::vector<corpus::Gender> gv(n), gu(n);
    for (int i = 0; i < n; ++i) {
      gv[i] = (rng() & 1) ? corpus::Gender::kFemale : corpus::Gender::kMale;
      gu[i] = (rng() & 1) ? corpus::Gender::kFemale : corpus::Gender::kMale;
    }
    if (crossmodal::GcPairingDegenerate(gv, gu)) continue;
    const Mat v = RandomMat(n, 6, rng, 0.5), u = RandomMat(n, 6, rng, 0.5);
    gc_oracle_worst = std::max(gc_oracle_worst,
                               std::abs(crossmodal::GenderContrastiveLoss(v, u, gv, gu) -
                                        testing::BruteForceGc(v, u, gv, gu)));
  }

  int eer_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> n(1, 30), q(0, 20);
    eval::ScoreSet s;
    const int ng = n(rng), ni = n(rng);
    for (int i = 0; i < ng; ++i) s.genuine.push_back(q(rng) / 20.0 + 0.2);
    for (int i = 0; i < ni; ++i) s.impostor.push_back(q(rng) / 20.0);
    eer_mismatch += eval::ComputeEer(s) != testing::BruteForceEer(s);
  }

  const double secs = Seconds(t0);
  const bool pass = kl_worst <= 0.02 && grad_worst <= 1e-3 && gc_oracle_worst <= 1e-9 &&
                    eer_mismatch == 0 && secs < 60;
  std::ostringstream d;
  d << "KL MC max rel err " << Fmt("%.4f", kl_worst) << " (<= 0.02); grad max rel err "
    << Fmt("%.2e", grad_worst) << " (<= 1e-3); GC oracle max abs diff "
    << Fmt("%.1e", gc_oracle_worst) << " (<= 1e-9); EER oracle mismatches " << eer_mismatch
    << "/100; " << Fmt("%.1f", secs) << " s (< 60)";
  rep.Line(1, pass, d.str());
}

// ---------------------------------------------------------------------------
// Criterion 2: DSP.

void DspSuite(Reporter& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  const dsp::DspConfig cfg;
  bool frames_ok = true;
  const corpus::SyntheticSpeaker spk = corpus::MakeSpeaker(3, corpus::Gender::kFemale);
  for (int t : {8, 16, 40}) {
    corpus::Utterance utt;
    utt.frames_per_token = 8;
    for (int k = 0; k < t / 8; ++k) utt.tokens.push_back(k % 8);
    const dsp::SpectrogramPair p =
        dsp::ExtractTargets(corpus::RenderAudio(spk, utt, cfg), utt.NumFrames(), cfg);
    frames_ok &= p.mel.frames.rows() == 4 * t && p.linear.frames.rows() == 4 * t;
  }

  dsp::Waveform sine;
  for (int i = 0; i < 16000; ++i) sine.samples.push_back(std::sin(2 * M_PI * 440 * i / 16000.0));
  const dsp::LinearSpectrogram s = dsp::StftMagnitude(sine, cfg);
  std::vector<double> res;
  dsp::GriffinLim(s, cfg, 60, 1, &res);
  // Spectral SNR against the estimate's own phase, on the two-sided spectrum
  // the residual is measured on.
  double energy = 0;
  for (Index c = 0; c < s.frames.cols(); ++c) {
    const double w = (c == 0 || c == s.frames.cols() - 1) ? 1.0 : 2.0;
    energy += w * s.frames.col(c).squaredNorm();
  }
  const double snr = 20 * std::log10(std::sqrt(energy) / res.back());

  bool monotone = true;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Mat m(20, cfg.NumBins());
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    std::vector<double> r;
    dsp::GriffinLim(dsp::LinearSpectrogram{m}, cfg, 30, trial, &r);
    for (size_t i = 1; i < r.size(); ++i) monotone &= r[i] <= r[i - 1] * (1 + 1e-12);
  }
  const double secs = Seconds(t0);
  std::ostringstream d;
  d << "4T frames for T in {8,16,40}: " << (frames_ok ? "yes" : "no")
    << "; Griffin-Lim 440 Hz SNR " << Fmt("%.2f", snr) << " dB (>= 20)"
    << "; residual non-increasing on 20 inputs: " << (monotone ? "yes" : "no") << "; "
    << Fmt("%.1f", secs) << " s (< 60)";
  rep.Line(2, frames_ok && snr >= 20 && monotone && secs < 60, d.str());
}

// ---------------------------------------------------------------------------
// Criteria 3-7: trained stages.

struct Stage1Result {
  double seconds = 0;
  json verification;
};

struct Stage2Result {
  double seconds = 0;
  json report_03, report_00;  // lambda = 0.001 and lambda = 0
};

Stage1Result RunStage1(const std::string& corpus_dir, const std::string& dir,
                       const std::string& log) {
  fs::create_directories(dir);
  const std::string ckpt = dir + "/identity.ckpt";
  const auto t0 = std::chrono::steady_clock::now();
  Tool({"train-identity", "--corpus", corpus_dir, "--out", ckpt, "--seed",
        std::to_string(kRunSeed)},
       log);
  Stage1Result r;
  r.seconds = Seconds(t0);
  const corpus::Corpus c = corpus::LoadCorpus(corpus_dir);
  const auto ids = synthesis::IdentityModel::Load(ckpt);
  r.verification = eval::EvaluateVerification(c, c.ItemsIn(corpus::Split::kUnseen), *ids).ToJson();
  std::ofstream(dir + "/verification.json") << r.verification.dump(2) << "\n";
  return r;
}

Stage2Result RunStage2(const std::string& corpus_dir, const std::string& identity_dir,
                       const std::string& dir, const std::string& log) {
  Stage2Result r;
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* lambda : {"0.001", "0.0"}) {
    const std::string sub = dir + "/lambda_" + lambda;
    fs::create_directories(sub);
    fs::copy_file(identity_dir + "/identity.ckpt", sub + "/identity.ckpt",
                  fs::copy_options::overwrite_existing);
    fs::copy_file(identity_dir + "/identity.ckpt.json", sub + "/identity.ckpt.json",
                  fs::copy_options::overwrite_existing);
    Tool({"train-lip2speech", "--corpus", corpus_dir, "--face-ckpt", sub + "/identity.ckpt",
          "--out", sub + "/lip2speech.ckpt", "--seed", std::to_string(kRunSeed), "--set",
          std::string("stage2.kl_weight=") + lambda},
         log);
    Tool({"evaluate", "--corpus", corpus_dir, "--ckpts", sub, "--report", sub + "/report.json",
          "--seed", std::to_string(kRunSeed)},
         log);
    (std::string(lambda) == "0.0" ? r.report_00 : r.report_03) = ReadJson(sub + "/report.json");
  }
  r.seconds = Seconds(t0);
  return r;
}

void Stage1Criterion(Reporter& rep, const Stage1Result& s1) {
  const json& v = s1.verification;
  const double eer = v.at("eer").get<double>();
  const double gap =
      v.at("mean_matched_cosine").get<double>() - v.at("mean_mismatched_cosine").get<double>();
  std::ostringstream d;
  d << "unseen EER " << Fmt("%.4f", eer) << " (<= 0.15); matched-mismatched cosine gap "
    << Fmt("%.4f", gap) << " (>= 0.2); train-identity " << Fmt("%.1f", s1.seconds)
    << " s (<= 180)";
  rep.Line(3, eer <= 0.15 && gap >= 0.2 && s1.seconds <= 180, d.str());
}

void Stage2Criteria(Reporter& rep, const Stage2Result& s2) {
  const json &a = s2.report_03, &b = s2.report_00;
  const double pa = a.at("probe_accuracy"), pb = b.at("probe_accuracy");
  const double chance = a.at("probe_chance");
  std::ostringstream d4;
  d4 << "probe(0.001) " << Fmt("%.4f", pa) << ", probe(0) " << Fmt("%.4f", pb)
     << ": need <= 0.5x (" << Fmt("%.4f", 0.5 * pb) << ") and <= chance+0.15 ("
     << Fmt("%.4f", chance + 0.15) << "); two stage-2 runs " << Fmt("%.1f", s2.seconds)
     << " s (<= 600)";
  rep.Line(4, pa <= 0.5 * pb && pa <= chance + 0.15 && s2.seconds <= 600, d4.str());

  const double ga = a.at("gender_match_rate"), gb = b.at("gender_match_rate");
  std::ostringstream d5;
  d5 << "gender match (0.001) " << Fmt("%.4f", ga) << " (>= 0.90), (0) " << Fmt("%.4f", gb)
     << ", difference " << Fmt("%.4f", ga - gb) << " (>= 0.10)";
  rep.Line(5, ga >= 0.9 && ga - gb >= 0.10, d5.str());

  const double la = a.at("l1_mel"), lb = b.at("l1_mel");
  std::ostringstream d6;
  d6 << "seen-test l1_mel(0) " << Fmt("%.4f", lb) << " < l1_mel(0.001) " << Fmt("%.4f", la);
  rep.Line(6, lb < la, d6.str());
}

void DeterminismCriterion(Reporter& rep, const std::string& first, const std::string& second,
                          const Stage1Result& s1a, const Stage1Result& s1b,
                          const Stage2Result& s2a, const Stage2Result& s2b) {
  std::vector<std::string> logs = {"/stage1/identity.ckpt.log.jsonl",
                                   "/stage2/lambda_0.001/lip2speech.ckpt.log.jsonl",
                                   "/stage2/lambda_0.0/lip2speech.ckpt.log.jsonl"};
  bool logs_equal = true;
  for (const std::string& l : logs) {
    const auto a = HeadLines(first + l, 10), b = HeadLines(second + l, 10);
    logs_equal &= a.size() == 10 && a == b;
  }
  const bool reports_equal = s1a.verification == s1b.verification &&
                             s2a.report_03 == s2b.report_03 && s2a.report_00 == s2b.report_00;
  std::ostringstream d;
  d << "first 10 logged steps identical: " << (logs_equal ? "yes" : "no")
    << "; final reports identical: " << (reports_equal ? "yes" : "no");
  rep.Line(7, logs_equal && reports_equal, d.str());
}

int Main(int argc, char** argv) {
  CLI::App app{"Acceptance run"};
  std::string work = "acceptance_work";
  app.add_option("--work-dir", work, "Scratch directory for corpus, checkpoints and reports");
  CLI11_PARSE(app, argc, argv);
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string log = work + "/tool_output.txt";

  Reporter rep;
  NumericalSuite(rep);
  DspSuite(rep);

  const std::string corpus_dir = work + "/corpus";
  Tool({"make-data", "--out", corpus_dir, "--seed", std::to_string(kCorpusSeed)}, log);
  const std::string run_a = work + "/run_a", run_b = work + "/run_b";
  const Stage1Result s1a = RunStage1(corpus_dir, run_a + "/stage1", log);
  Stage1Criterion(rep, s1a);
  const Stage2Result s2a = RunStage2(corpus_dir, run_a + "/stage1", run_a + "/stage2", log);
  Stage2Criteria(rep, s2a);

  const Stage1Result s1b = RunStage1(corpus_dir, run_b + "/stage1", log);
  const Stage2Result s2b = RunStage2(corpus_dir, run_b + "/stage1", run_b + "/stage2", log);
  DeterminismCriterion(rep, run_a, run_b, s1a, s1b, s2a, s2b);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace
}  // namespace l2s

int main(int argc, char** argv) {
  try {
    return l2s::Main(argc, argv);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance run aborted: %s\n", e.what());
    return 1;
  }
}
