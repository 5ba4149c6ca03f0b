#include "ransomnet/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

#include "ransomnet/detect.hpp"
#include "ransomnet/eval.hpp"
#include "ransomnet/fingerprint.hpp"
#include "text_util.hpp"

namespace ransomnet::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const std::string& path, const std::string& data, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << data;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::Io, "cannot write " + path);
  file << data;
  if (!file) throw Error(ErrorCode::Io, "failed writing " + path);
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  std::string value(text.substr(first, last - first + 1));
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
  return value;
}

struct Options {
  std::string pcap;
  std::string packets;
  std::string out;
  std::string data;
  std::string model;
  std::string alerts;
  std::string format = "csv";
  std::string kind;
  std::vector<std::string> kinds;
  std::vector<std::string> ransomware;
  std::vector<std::string> benign;
  double holdout = 0.8;
  std::uint32_t kfold = 0;
  double interval = kDefaultWindowSeconds;
  bool lenient = false;
  bool quiet = false;
  bool no_bootstrap = false;
  Hyperparams hp;
};

void add_hyperparam_flags(CLI::App& app, Options& o) {
  app.add_option("--k", o.hp.knn.k, "KNN neighbours")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--hidden", o.hp.mlp.hidden, "MLP hidden units")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--learning-rate", o.hp.mlp.learning_rate, "MLP learning rate")->capture_default_str();
  app.add_option("--epochs", o.hp.mlp.epochs, "MLP full-batch epochs")->capture_default_str();
  app.add_option("--min-leaf", o.hp.tree.min_leaf, "tree: smallest splittable node")->capture_default_str();
  app.add_option("--trees", o.hp.forest.trees, "forest size")->capture_default_str();
  app.add_flag("--no-bootstrap", o.no_bootstrap, "forest: train every tree on the full set");
  app.add_option("--features-per-split", o.hp.forest.features_per_split, "forest: features per split (0 = 4)")
      ->capture_default_str();
  app.add_option("--threads", o.hp.forest.threads, "forest: worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--svm-c", o.hp.svm.c, "SVM soft-margin C")->capture_default_str();
  app.add_option("--svm-iterations", o.hp.svm.iterations, "SVM subgradient steps")->capture_default_str();
  app.add_option("--var-smoothing", o.hp.bayes.var_smoothing, "Bayes variance smoothing")->capture_default_str();
  app.add_flag("--zero-addresses", o.hp.zero_address_features, "zero both address features");
}

void add_split_flags(CLI::App& app, Options& o) {
  auto* holdout = app.add_option("--holdout", o.holdout, "stratified holdout train fraction")->capture_default_str();
  app.add_option("--kfold", o.kfold, "stratified k-fold instead of holdout")->excludes(holdout);
}

SplitSpec split_spec(const Options& o) {
  return o.kfold > 0 ? SplitSpec::kfold(o.kfold, o.hp.seed) : SplitSpec::holdout(o.holdout, o.hp.seed);
}

std::vector<ClassifierKind> resolve_kinds(const std::vector<std::string>& names) {
  std::vector<ClassifierKind> kinds;
  for (const std::string& name : names) {
    if (name == "all") {
      kinds.insert(kinds.end(), kAllClassifierKinds.begin(), kAllClassifierKinds.end());
      continue;
    }
    auto kind = parse_classifier_kind(name);
    if (!kind) throw Error(ErrorCode::InvalidHyperparams, "unknown classifier kind '" + name + "'");
    kinds.push_back(*kind);
  }
  return kinds;
}

Dataset load_dataset(const Options& o, std::ostream& err) {
  std::vector<std::string> warnings;
  std::ifstream in(o.data, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + o.data);
  Dataset dataset = csv_to_dataset(in, o.lenient ? Validation::Lenient : Validation::Strict, &warnings);
  for (const std::string& w : warnings) err << "warning: " << o.data << ": " << w << '\n';
  return dataset;
}

// Resolved configuration, one key=value per line, prefixed for stderr.
void echo_config(const CLI::App& sub, std::ostream& err) {
  err << "# ransomnet " << sub.get_name() << '\n';
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const std::string& r : opt->results()) value += (value.empty() ? "" : " ") + r;
    } else {
      value = opt->get_default_str();
    }
    if (opt->get_expected_max() == 0) value = opt->count() > 0 ? "true" : "false";
    if (value.empty()) continue;
    err << "# " << opt->get_lnames().front() << '=' << value << '\n';
  }
}

int cmd_extract(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<PacketRecord> packets;
  CaptureSummary summary;
  if (!o.pcap.empty()) {
    PcapParseResult parsed = read_pcap_file(o.pcap);
    if (parsed.truncation) {
      err << "warning: " << o.pcap << ": " << to_string(*parsed.truncation) << " after "
          << parsed.summary.records_seen() << " records; keeping the packets read so far\n";
    }
    packets = std::move(parsed.packets);
    summary = parsed.summary;
  } else {
    std::ifstream in(o.packets, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + o.packets);
    for (const PacketRecord& p : parse_packet_csv(in)) {
      if (!is_transport_protocol(p.protocol)) {
        ++summary.packets_skipped_unsupported_protocol;
        continue;
      }
      packets.push_back(p);
    }
    summary.packets_read = packets.size();
  }
  const std::vector<Conversation> conversations = aggregate(packets);
  write_output(o.out, conversations_to_csv(conversations), out);
  err << "packets_read=" << summary.packets_read << " skipped_non_ip=" << summary.packets_skipped_non_ip
      << " skipped_unsupported_protocol=" << summary.packets_skipped_unsupported_protocol
      << " conversations=" << conversations.size() << '\n';
  return kOk;
}

int cmd_label(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::vector<Conversation>, Label>> sets;
  auto load = [&](const std::vector<std::string>& paths, Label label) {
    for (const std::string& path : paths) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
      ConversationCsvResult parsed = csv_to_conversations(in, o.lenient ? Validation::Lenient : Validation::Strict);
      for (const std::string& w : parsed.warnings) err << "warning: " << path << ": " << w << '\n';
      sets.emplace_back(std::move(parsed.conversations), label);
    }
  };
  load(o.ransomware, Label::Ransomware);
  load(o.benign, Label::Benign);
  const Dataset dataset = label_and_merge(sets);
  write_output(o.out, dataset_to_csv(dataset), out);
  err << "samples=" << dataset.size() << " ransomware=" << dataset.count(Label::Ransomware)
      << " benign=" << dataset.count(Label::Benign) << '\n';
  return kOk;
}

int cmd_train(const Options& o, std::ostream& err) {
  const auto kind = parse_classifier_kind(o.kind);
  if (!kind) throw Error(ErrorCode::InvalidHyperparams, "unknown classifier kind '" + o.kind + "'");
  Dataset dataset = load_dataset(o, err);
  if (o.kfold > 0) throw Error(ErrorCode::InvalidHyperparams, "train accepts --holdout, not --kfold");
  Dataset train_part = o.holdout < 1.0 && o.holdout > 0.0 ? subset(dataset, split(dataset, split_spec(o)).front().train)
                                                           : dataset;
  const TrainedModel model = train(*kind, o.hp, train_part);
  save_model_file(model, o.out);
  err << "kind=" << to_string(model.kind) << " samples=" << train_part.size()
      << " training_time_s=" << detail::format_fixed(model.training_time, 6)
      << " model_fingerprint=" << to_hex(model_fingerprint(model)) << '\n';
  return kOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  const Dataset dataset = load_dataset(o, err);
  const SplitSpec spec = split_spec(o);
  std::vector<MetricsReport> reports;
  if (!o.model.empty()) {
    if (spec.mode != SplitSpec::Mode::Holdout) {
      throw Error(ErrorCode::InvalidHyperparams, "a saved model can only be scored on a holdout split");
    }
    const TrainedModel model = load_model_file(o.model);
    reports.push_back(evaluate_model(model, dataset, split(dataset, spec).front().test));
  } else {
    for (ClassifierKind kind : resolve_kinds(o.kinds)) reports.push_back(evaluate(kind, o.hp, dataset, spec).summary);
  }
  const std::string rendered =
      o.format == "json" ? render_report_json(reports, o.hp.seed) : render_report_csv(reports);
  write_output(o.out, rendered, out);
  return kOk;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  const Dataset dataset = load_dataset(o, err);
  const auto kinds = resolve_kinds(o.kinds);
  write_output(o.out, render_timing_csv(benchmark(kinds, o.hp, dataset, split_spec(o))), out);
  return kOk;
}

int cmd_detect(const Options& o, std::ostream& out, std::ostream& err) {
  const TrainedModel model = load_detection_model(o.model);
  WindowSpec spec;
  spec.interval = o.interval;

  std::ofstream alert_file;
  std::ostream* alert_out = &out;
  if (!o.alerts.empty() && o.alerts != "-") {
    alert_file.open(o.alerts, std::ios::binary | std::ios::trunc);
    if (!alert_file) throw Error(ErrorCode::Io, "cannot write " + o.alerts);
    alert_out = &alert_file;
  }
  const AlertSink sink = [&](const Alert& alert) {
    *alert_out << alert_to_json(alert) << '\n';
    if (!*alert_out) throw Error(ErrorCode::Io, "alert output failed");
    if (!o.quiet) err << alert_to_warning(alert) << '\n';
  };

  std::ifstream in(o.pcap.empty() ? o.packets : o.pcap, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + (o.pcap.empty() ? o.packets : o.pcap));
  std::unique_ptr<PacketSource> source;
  if (!o.pcap.empty()) source = std::make_unique<PcapPacketSource>(in);
  else source = std::make_unique<CsvPacketSource>(in);

  RunSummary summary;
  try {
    summary = detect_stream(*source, model, spec, sink);
  } catch (const DetectionAborted& e) {
    summary = e.summary();
    err << "error: " << e.what() << '\n';
    err << "windows=" << summary.windows << " conversations=" << summary.conversations
        << " alerts=" << summary.alerts << '\n';
    return kInputError;
  }
  err << "windows=" << summary.windows << " conversations=" << summary.conversations << " alerts=" << summary.alerts
      << " packets=" << summary.packets << " skipped=" << summary.skipped_packets
      << " late=" << summary.late_packets << '\n';
  return kOk;
}

}  // namespace

std::vector<std::string> merge_config(const std::vector<std::string>& args, const std::string& config_text) {
  std::vector<std::string> extra;
  std::istringstream in(config_text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#' || stripped.front() == ';' || stripped.front() == '[') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::SchemaMismatch, "config line without '=': " + stripped);
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    const std::string flag = "--" + key;
    bool given = false;
    for (const std::string& a : args) given = given || a == flag || a.starts_with(flag + "=");
    if (given) continue;
    if (value == "true") {
      extra.push_back(flag);
    } else if (value == "false") {
      continue;
    } else {
      extra.push_back(flag);
      std::istringstream words(value);
      std::string word;
      while (words >> word) extra.push_back(word);
    }
  }
  std::vector<std::string> merged = args;
  // Insert right after the subcommand name so the flags bind to it.
  const auto insert_at = merged.empty() ? merged.end() : merged.begin() + 1;
  merged.insert(insert_at, extra.begin(), extra.end());
  return merged;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args = raw_args;
  Options o;

  CLI::App app{"ransomnet: ransomware traffic detection from bidirectional conversations", "ransomnet"};
  app.set_version_flag("--version", "ransomnet " + std::string(kVersion) + " (model format " +
                                        std::to_string(kModelFormatVersion) + ")");
  app.require_subcommand(1, 1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.hp.seed, "seed for every stochastic choice")->capture_default_str();
    sub->add_option("--config", "key=value file mirroring the flags (flags win)");
  };

  auto* extract = app.add_subcommand("extract", "packets -> conversation CSV");
  auto* ex_pcap = extract->add_option("--pcap", o.pcap, "classic pcap input");
  auto* ex_csv = extract->add_option("--packets", o.packets, "packet CSV input");
  ex_pcap->excludes(ex_csv);
  extract->add_option("--out", o.out, "conversation CSV output")->required();
  add_common(extract);

  auto* label = app.add_subcommand("label", "labelled conversation CSVs -> dataset CSV");
  label->add_option("--ransomware", o.ransomware, "conversation CSVs of ransomware traffic");
  label->add_option("--benign", o.benign, "conversation CSVs of benign traffic");
  label->add_option("--out", o.out, "dataset CSV output")->required();
  label->add_flag("--lenient", o.lenient, "recompute inconsistent totals instead of failing");
  add_common(label);

  auto* train_cmd = app.add_subcommand("train", "fit one classifier and save the model");
  train_cmd->add_option("--kind", o.kind, "knn|mlp|j48|rf|svm|bayes")->required();
  train_cmd->add_option("--data", o.data, "dataset CSV")->required();
  train_cmd->add_option("--out", o.out, "model file")->required();
  train_cmd->add_option("--holdout", o.holdout, "train only on this stratified train fraction (1 = all data)")
      ->capture_default_str();
  train_cmd->add_option("--kfold", o.kfold, "rejected for train");
  train_cmd->add_flag("--lenient", o.lenient, "recompute inconsistent totals instead of failing");
  add_hyperparam_flags(*train_cmd, o);
  add_common(train_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "metrics report (CSV or JSON)");
  eval_cmd->add_option("--data", o.data, "dataset CSV")->required();
  auto* eval_kinds = eval_cmd->add_option("--kinds", o.kinds, "classifier kinds or 'all'")->delimiter(',');
  auto* eval_model = eval_cmd->add_option("--model", o.model, "score a saved model on the holdout test part");
  eval_kinds->excludes(eval_model);
  eval_cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  eval_cmd->add_option("--out", o.out, "report output (default stdout)");
  eval_cmd->add_flag("--lenient", o.lenient, "recompute inconsistent totals instead of failing");
  add_split_flags(*eval_cmd, o);
  add_hyperparam_flags(*eval_cmd, o);
  add_common(eval_cmd);

  auto* bench_cmd = app.add_subcommand("bench", "training-time table");
  bench_cmd->add_option("--data", o.data, "dataset CSV")->required();
  bench_cmd->add_option("--kinds", o.kinds, "classifier kinds or 'all'")->delimiter(',')->default_val("all");
  bench_cmd->add_option("--out", o.out, "timing CSV output (default stdout)");
  bench_cmd->add_flag("--lenient", o.lenient, "recompute inconsistent totals instead of failing");
  add_split_flags(*bench_cmd, o);
  add_hyperparam_flags(*bench_cmd, o);
  add_common(bench_cmd);

  auto* detect_cmd = app.add_subcommand("detect", "windowed replay with alerts");
  detect_cmd->add_option("--model", o.model, "model file")->required();
  auto* det_pcap = detect_cmd->add_option("--pcap", o.pcap, "classic pcap replay source");
  auto* det_csv = detect_cmd->add_option("--packets", o.packets, "packet CSV replay source");
  det_pcap->excludes(det_csv);
  detect_cmd->add_option("--interval", o.interval, "window length in seconds")->capture_default_str();
  detect_cmd->add_option("--alerts", o.alerts, "JSON-lines alert output (default stdout)");
  detect_cmd->add_flag("--quiet", o.quiet, "no human-readable warnings on stderr");
  add_common(detect_cmd);

  try {
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") {
        const std::string text = read_file(args[i + 1]);
        std::vector<std::string> without(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(i));
        without.insert(without.end(), args.begin() + static_cast<std::ptrdiff_t>(i) + 2, args.end());
        args = merge_config(without, text);
        break;
      }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return kOk;
    } catch (const CLI::CallForVersion&) {
      out << app.version() << '\n';
      return kOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      const auto subs = app.get_subcommands();
      err << (subs.empty() ? app.help() : subs.front()->help());
      return kInputError;
    }

    if (o.no_bootstrap) o.hp.forest.bootstrap = false;
    CLI::App* sub = app.get_subcommands().front();
    echo_config(*sub, err);

    if (sub == extract) {
      if (o.pcap.empty() && o.packets.empty()) throw Error(ErrorCode::EmptyInput, "extract needs --pcap or --packets");
      return cmd_extract(o, out, err);
    }
    if (sub == label) {
      if (o.ransomware.empty() || o.benign.empty()) {
        throw Error(ErrorCode::EmptyInput, "label needs --ransomware and --benign inputs");
      }
      return cmd_label(o, out, err);
    }
    if (sub == train_cmd) return cmd_train(o, err);
    if (sub == eval_cmd) {
      if (o.kinds.empty() && o.model.empty()) throw Error(ErrorCode::EmptyInput, "eval needs --kinds or --model");
      return cmd_eval(o, out, err);
    }
    if (sub == bench_cmd) return cmd_bench(o, out, err);
    if (sub == detect_cmd) {
      if (o.pcap.empty() && o.packets.empty()) throw Error(ErrorCode::EmptyInput, "detect needs --pcap or --packets");
      return cmd_detect(o, out, err);
    }
    return kInternalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace ransomnet::cli
