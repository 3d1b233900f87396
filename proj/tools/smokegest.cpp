// smokegest: synthesize recordings, train networks, evaluate and run detection.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "smokegest/cli.hpp"

namespace sc = smokegest::cli;

int main(int argc, char** argv) {
  CLI::App app{"Smoking-gesture recognition from wrist accelerometer data"};
  app.set_version_flag("--version", std::string(sc::kToolVersion));
  app.require_subcommand(1);

  sc::SynthOptions synth;
  bool dump_config = false;
  auto* s = app.add_subcommand("synth", "Generate synthetic recordings and sessions");
  s->add_option("--corpus", synth.corpus, "Preset corpus (table1)");
  s->add_option("--gestures", synth.gestures, "Isolated gestures as class=count,...");
  s->add_option("--sessions", synth.sessions, "Continuous sessions as kind=count,...");
  s->add_option("--device", synth.device, "Device profile")->capture_default_str();
  s->add_option("--config", synth.config, "Generator config JSON (overlays the defaults)");
  s->add_flag("--dump-config", dump_config, "Print the effective generator config and exit");
  s->add_option("--seed", synth.seed, "Master seed")->capture_default_str();
  s->add_option("--out", synth.out, "Output directory")->capture_default_str();

  sc::TrainOptions train;
  auto* t = app.add_subcommand("train", "Train one network per channel mode");
  t->add_option("--data", train.data, "Directory of labeled recording CSVs")->required();
  t->add_option("--modes", train.modes, "Comma-separated channel modes")->capture_default_str();
  t->add_option("--restarts", train.restarts, "Independent restarts per mode")->capture_default_str();
  t->add_option("--seed", train.seed, "Master seed")->capture_default_str();
  t->add_option("--width", train.width, "Resampled points per axis")->capture_default_str();
  t->add_option("--hidden", train.hidden, "Hidden units")->capture_default_str();
  t->add_option("--max-epochs", train.max_epochs, "Epoch limit per restart")->capture_default_str();
  t->add_option("--threshold", train.threshold, "Decision threshold stored in the model")->capture_default_str();
  t->add_option("--out", train.out, "Output directory")->capture_default_str();

  sc::EvalOptions eval;
  auto* e = app.add_subcommand("eval", "Evaluate a model on labeled recordings");
  e->add_option("--model", eval.model, "Model JSON")->required();
  e->add_option("--data", eval.data, "Directory of labeled recording CSVs")->required();
  e->add_option("--threshold", eval.threshold, "Decision threshold")->capture_default_str();
  e->add_option("--out", eval.out, "Output directory")->capture_default_str();

  sc::DetectOptions detect;
  auto* d = app.add_subcommand("detect", "Run rolling-window detection over a session");
  d->add_option("--model", detect.model, "Model JSON")->required();
  d->add_option("--session", detect.session, "Session CSV")->required();
  d->add_option("--ranges", detect.ranges, "Ground-truth ranges JSON");
  d->add_option("--width", detect.width, "Window width in samples")->capture_default_str();
  d->add_option("--stride", detect.stride, "Window stride in samples")->capture_default_str();
  d->add_option("--threshold", detect.threshold, "Decision threshold")->capture_default_str();
  d->add_flag("--plot", detect.plot, "Also write the per-sample plot CSV");
  d->add_option("--out", detect.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s) {
      if (dump_config) {
        std::cout << smokegest::to_json(sc::load_synth_config(synth.config)).dump(2) << '\n';
        return 0;
      }
      return sc::cmd_synth(synth);
    }
    if (*t) return sc::cmd_train(train);
    if (*e) return sc::cmd_eval(eval);
    if (*d) return sc::cmd_detect(detect);
  } catch (const sc::UsageError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 2;
}
