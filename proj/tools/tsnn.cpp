// Copyright 2026 The tsnn Authors
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


// tsnn command-line tool: encode, train, infer, eval, oracle-check and a
// helper that turns an IDX digit corpus into a labeled event dataset.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tsnn/coding.hpp"
#include "tsnn/config.hpp"
#include "tsnn/dataset.hpp"
#include "tsnn/model_io.hpp"
#include "tsnn/oracle.hpp"
#include "tsnn/presets.hpp"
#include "tsnn/runtime.hpp"
#include "tsnn/training.hpp"

namespace fs = std::filesystem;
using namespace tsnn;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed: " + path.string());
}

struct EncodeArgs {
  std::string config, data, out;
};

int run_encode(const EncodeArgs& a) {
  auto kv = KeyValues::parse(read_file(a.config));
  const auto settings = EncoderSettings::take_from(kv);
  kv.reject_unused();
  const auto stream = parse_event_file(read_file(a.data));
  write_file(a.out, write_spikes(encode_stream(stream, settings)));
  return 0;
}

struct TrainArgs {
  std::string config, data, preset, out;
  std::uint64_t seed = 0;
};

int run_train(const TrainArgs& a) {
  auto kv = KeyValues::parse(read_file(a.config));
  const auto settings = EncoderSettings::take_from(kv);
  auto config = TrainConfig::take_from(kv);
  kv.reject_unused();
  config.seed = a.seed;

  Model model;
  model.net = make_preset(a.preset);
  model.encoder = settings;
  model.normalization = settings.normalization();
  const auto streams = load_dataset_dir(a.data);
  const auto samples = encode_dataset(streams, settings);
  init_weights(model.net, config.init, a.seed);

  std::cout << "epoch,learning_rate,loss,train_accuracy,clamped\n";
  fit(model.net, samples, config, [](const EpochStats& s) {
    std::printf("%d,%.17g,%.17g,%.17g,%zu\n", s.epoch, s.learning_rate, s.loss, s.accuracy,
                s.clamped);
    std::fflush(stdout);
  });
  save_model_file(model, a.out);
  return 0;
}

struct InferArgs {
  std::string model, data;
  bool batch = false;
};

int run_infer(const InferArgs& a) {
  const auto model = load_model_file(a.model);
  const auto stream = parse_event_file(read_file(a.data));
  const auto d = a.batch ? batch_infer(model, stream) : stream_infer(model, stream);
  std::cout << decision_csv(d) << "\n";
  return 0;
}

struct EvalArgs {
  std::string model, data, out_dir = ".";
  double ref_acc = 0;
  int bins = 10;
  bool batch = false;
};

int run_eval(const EvalArgs& a) {
  const auto model = load_model_file(a.model);
  const auto data = load_dataset_dir(a.data);
  EvalOptions options;
  options.mode = a.batch ? InferMode::kBatch : InferMode::kStream;
  options.ref_accuracy = a.ref_acc;
  options.bins = a.bins;
  const auto report = evaluate(model, data, options);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  std::string decisions = decision_csv_header() + "\n";
  for (const auto& d : report.decisions) decisions += decision_csv(d) + "\n";
  write_file(dir / "decisions.csv", decisions);
  write_file(dir / "r_event_histogram.csv", histogram_csv(report.r_event_histogram));
  write_file(dir / "delay_histogram.csv", histogram_csv(report.delay_histogram));
  const auto summary = report_csv(report);
  write_file(dir / "report.csv", summary);
  std::cout << summary;
  return 0;
}

struct OracleArgs {
  int n = 1000;
  int nets = 100;
  double dt = 1e-4;
  std::uint64_t seed = 0;
};

int run_oracle(const OracleArgs& a) {
  NeuronOracleConfig nc;
  nc.neurons = a.n;
  nc.dt = a.dt;
  nc.seed = a.seed;
  const auto ns = check_neuron_oracle(nc);
  std::printf("neuron oracle: %d checked, %d silent in both, %d failures, max |dt| %.3g\n",
              ns.checked, ns.both_silent, ns.failures, ns.max_abs_error);
  for (const auto& c : ns.failed) {
    std::printf("  closed form %.9g, simulated %.9g\n", c.closed_form, c.simulated);
  }

  GradientOracleConfig gc;
  gc.networks = a.nets;
  gc.seed = a.seed;
  const auto gs = check_gradient_oracle(gc);
  std::printf("gradient check: %d networks, %zu checked, %zu skipped, %zu failures, "
              "max rel error %.3g\n",
              gs.networks, gs.checked, gs.skipped, gs.failures, gs.max_rel_error);
  return ns.passed() && (a.nets == 0 || gs.passed()) ? 0 : 1;
}

struct DigitsArgs {
  std::string images, labels, out;
  std::size_t begin = 0, end = 0;
  double events_per_unit = 10.0 / 255.0;
  std::uint64_t seed = 0;
};

int run_digits(const DigitsArgs& a) {
  const auto digits = load_idx(a.images, a.labels);
  const std::size_t end = a.end == 0 ? digits.images.size() : a.end;
  if (a.begin >= end || end > digits.images.size()) throw ConfigError("bad --begin/--end range");
  DigitStreamConfig config;
  config.events_per_unit = a.events_per_unit;
  config.seed = a.seed;
  write_dataset_dir(a.out, digit_streams(digits, a.begin, end, config));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal-coded spiking neural networks for event streams"};
  app.require_subcommand(1);

  EncodeArgs ea;
  auto* encode = app.add_subcommand("encode", "Encode one event file into input spike times");
  encode->add_option("--config", ea.config, "Encoder config (key = value)")->required();
  encode->add_option("--data", ea.data, "Event file")->required();
  encode->add_option("--out", ea.out, "Output spike file")->required();

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a preset network on a labeled dataset");
  train->add_option("--config", ta.config, "Encoder and training config")->required();
  train->add_option("--data", ta.data, "Dataset directory with labels.csv")->required();
  train->add_option("--preset", ta.preset, "Network preset")->required();
  train->add_option("--seed", ta.seed, "Seed for init and shuffling")->required();
  train->add_option("--out", ta.out, "Model file")->required();

  InferArgs ia;
  auto* infer = app.add_subcommand("infer", "Classify one event file");
  infer->add_option("--model", ia.model, "Model file")->required();
  infer->add_option("--data", ia.data, "Event file")->required();
  auto* stream_flag = infer->add_flag("--stream", "Event-by-event engine (default)");
  infer->add_flag("--batch", ia.batch, "Encode the whole stream first")->excludes(stream_flag);

  EvalArgs va;
  auto* eval = app.add_subcommand("eval", "Evaluate a model on a labeled dataset");
  eval->add_option("--model", va.model, "Model file")->required();
  eval->add_option("--data", va.data, "Dataset directory with labels.csv")->required();
  eval->add_option("--ref-acc", va.ref_acc, "Reference accuracy for the accuracy gain");
  eval->add_option("--out-dir", va.out_dir, "Directory for the CSV outputs");
  eval->add_option("--bins", va.bins, "Histogram bins")->check(CLI::PositiveNumber);
  eval->add_flag("--batch", va.batch, "Use batch inference instead of streaming");

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle-check", "Neuron and gradient self-checks");
  oracle->add_option("--n", oa.n, "Random neurons")->check(CLI::NonNegativeNumber);
  oracle->add_option("--dt", oa.dt, "Simulation step")->check(CLI::PositiveNumber);
  oracle->add_option("--nets", oa.nets, "Random networks")->check(CLI::NonNegativeNumber);
  oracle->add_option("--seed", oa.seed, "Seed")->required();

  DigitsArgs da;
  auto* digits = app.add_subcommand("digits", "Convert IDX digit images to an event dataset");
  digits->add_option("--images", da.images, "IDX image file (optionally gzipped)")->required();
  digits->add_option("--labels", da.labels, "IDX label file (optionally gzipped)")->required();
  digits->add_option("--begin", da.begin, "First image");
  digits->add_option("--end", da.end, "One past the last image (0 = all)");
  digits->add_option("--events-per-unit", da.events_per_unit, "Events per unit intensity");
  digits->add_option("--seed", da.seed, "Seed")->required();
  digits->add_option("--out", da.out, "Output dataset directory")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*encode) return run_encode(ea);
    if (*train) return run_train(ta);
    if (*infer) return run_infer(ia);
    if (*eval) return run_eval(va);
    if (*oracle) return run_oracle(oa);
    if (*digits) return run_digits(da);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
