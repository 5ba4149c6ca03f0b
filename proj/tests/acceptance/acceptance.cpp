// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ransomnet/cli.hpp"
#include "ransomnet/detect.hpp"
#include "ransomnet/eval.hpp"
#include "ransomnet/learners.hpp"
#include "support/test_support.hpp"

using namespace ransomnet;
using testsupport::packet;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---- 1 ---------------------------------------------------------------------

Outcome metric_oracle() {
  Outcome o;
  Rng rng(1001);
  auto close = [](const Metric& got, std::optional<double> want) {
    if (got.has_value() != want.has_value()) return false;
    return !want || std::abs(*got - *want) <= 1e-12;
  };
  for (int i = 0; i < 1000; ++i) {
    ConfusionCounts c;
    // Every fifth vector zeroes a random subset of cells to hit the undefined cases.
    const bool sparse = i % 5 == 0;
    auto cell = [&] { return sparse && rng.below(2) ? 0 : rng.below(5000); };
    c.tp = cell();
    c.fp = cell();
    c.tn = cell();
    c.fn = cell();
    if (c.total() == 0) c.tn = 1;
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp), tn = static_cast<double>(c.tn),
                 fn = static_cast<double>(c.fn);
    std::optional<double> tpr, fpr, precision, f;
    if (tp + fn > 0) tpr = tp / (tp + fn);
    if (fp + tn > 0) fpr = fp / (fp + tn);
    if (tp + fp > 0) precision = tp / (tp + fp);
    if (precision && tpr && *precision + *tpr > 0) f = 2 * (*tpr * *precision) / (*tpr + *precision);
    const double accuracy = (tp + tn) / (tp + fn + tn + fp);

    const Metrics m = metrics(c);
    o.require(close(m.tpr, tpr), "tpr");
    o.require(close(m.fpr, fpr), "fpr");
    o.require(close(m.precision, precision), "precision");
    o.require(close(m.recall, tpr), "recall");
    o.require(close(m.f_measure, f), "f-measure");
    o.require(close(m.accuracy, accuracy), "accuracy");
  }
  return o;
}

// ---- 2 ---------------------------------------------------------------------

Outcome conversation_oracle() {
  Outcome o;
  testsupport::PcapBuilder b;
  const std::string h1 = "10.0.0.1", h2 = "10.0.0.2", h3 = "10.0.0.3", h4 = "10.0.0.4", mc = "224.0.0.251";
  b.ipv4(100.0, h1, 40000, h2, 445, 6, 60);
  b.ipv4(100.5, h2, 445, h1, 40000, 6, 60);
  b.arp(100.75);
  b.ipv4(101.0, h1, 40000, h2, 445, 6, 54);
  b.ipv4(101.25, h1, 80, h3, 50000, 6, 200);
  b.ipv4(101.5, h4, 5353, mc, 5353, 17, 100);
  b.ipv4(102.0, h1, 40000, h2, 445, 6, 1514);
  b.ipv4(102.0, h2, 445, h1, 40000, 6, 1514);
  b.ipv4(102.5, h3, 50000, h1, 80, 6, 66);
  b.ipv4(103.0, h4, 5353, mc, 5353, 17, 120);
  b.ipv4(103.25, h1, 40000, h2, 445, 6, 1000);
  b.ipv4(103.5, h1, 80, h3, 50000, 6, 300);
  b.ipv4(104.0, h2, 445, h1, 40000, 6, 66);
  b.ipv4(104.0, mc, 5353, h4, 5353, 17, 80);
  b.ipv4(105.0, h3, 50000, h1, 80, 6, 70);
  b.ipv4(105.5, h1, 40000, h2, 445, 6, 60);
  b.ipv4(106.0, h1, 80, h3, 50000, 6, 400);
  b.ipv4(106.25, h4, 5353, mc, 5353, 17, 90);
  b.ipv4(107.0, h2, 445, h1, 40000, 6, 54);
  b.ipv4(108.0, h3, 50000, h1, 80, 6, 54);

  const PcapParseResult parsed = parse_pcap(std::as_bytes(std::span(b.bytes())));
  o.require(parsed.packets.size() == 19 && parsed.summary.packets_skipped_non_ip == 1, "packet counts");
  const auto cs = aggregate(parsed.packets);

  auto conv = [](const std::string& a, std::uint16_t pa, const std::string& bb, std::uint16_t pb, std::uint8_t proto,
                 double rel, double dur, std::uint64_t nab, std::uint64_t bab, std::uint64_t nba, std::uint64_t bba) {
    Conversation c;
    c.address_a = *Ipv4Address::parse(a);
    c.port_a = pa;
    c.address_b = *Ipv4Address::parse(bb);
    c.port_b = pb;
    c.protocol = proto;
    c.rel_start = rel;
    c.duration = dur;
    c.packets_ab = nab;
    c.bytes_ab = bab;
    c.packets_ba = nba;
    c.bytes_ba = bba;
    c.packets_total = nab + nba;
    c.bytes_total = bab + bba;
    return c;
  };
  const std::vector<Conversation> expected = {
      conv(h1, 40000, h2, 445, 6, 0.0, 7.0, 5, 2688, 4, 1694),
      conv(h1, 80, h3, 50000, 6, 1.25, 6.75, 3, 900, 3, 190),
      conv(h4, 5353, mc, 5353, 17, 1.5, 4.75, 3, 310, 1, 80),
  };
  o.require(cs == expected, "crafted capture conversations differ from the hand-computed table");

  const auto row = aggregate(testsupport::table3_row1_packets());
  const std::vector<Conversation> row1 = {row.at(1)};
  o.require(conversations_to_csv(row1) == std::string(kConversationCsvHeader) +
                                              "\n6,192.168.1.4,49252,192.168.1.5,5357,20,15137,8,1396,12,13741,"
                                              "1.841135,0.026054\n",
            "sample row reconstruction");

  Rng rng(2002);
  for (int stream = 0; stream < 10000 && o.ok; ++stream) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<PacketRecord> ps(n);
    std::uint64_t bytes = 0;
    std::map<std::tuple<std::uint32_t, std::uint16_t, std::uint32_t, std::uint16_t, std::uint8_t>,
             std::pair<std::uint64_t, std::uint64_t>>
        oracle;
    for (auto& p : ps) {
      p.timestamp = rng.uniform(0, 50);
      p.src_addr = Ipv4Address(static_cast<std::uint32_t>(rng.below(4)));
      p.dst_addr = Ipv4Address(static_cast<std::uint32_t>(rng.below(4)));
      p.src_port = static_cast<std::uint16_t>(rng.below(3));
      p.dst_port = static_cast<std::uint16_t>(rng.below(3));
      p.protocol = rng.below(2) ? 6 : 17;
      p.wire_bytes = static_cast<std::uint32_t>(42 + rng.below(1473));
      bytes += p.wire_bytes;
      auto x = std::pair(p.src_addr.value(), p.src_port);
      auto y = std::pair(p.dst_addr.value(), p.dst_port);
      if (y < x) std::swap(x, y);
      auto& slot = oracle[{x.first, x.second, y.first, y.second, p.protocol}];
      slot.first += 1;
      slot.second += p.wire_bytes;
    }
    const auto got = aggregate(ps);
    std::uint64_t sum_p = 0, sum_b = 0;
    for (const auto& c : got) {
      o.require(c.packets_ab + c.packets_ba == c.packets_total, "direction packet sum");
      o.require(c.bytes_ab + c.bytes_ba == c.bytes_total, "direction byte sum");
      const auto k = c.key();
      const auto it = oracle.find({k.low.address.value(), k.low.port, k.high.address.value(), k.high.port, k.protocol});
      o.require(it != oracle.end() && it->second == std::pair(c.packets_total, c.bytes_total), "per-key totals");
      sum_p += c.packets_total;
      sum_b += c.bytes_total;
    }
    o.require(got.size() == oracle.size(), "conversation count");
    o.require(sum_p == n && sum_b == bytes, "packet/byte conservation");
  }
  return o;
}

// ---- 3 ---------------------------------------------------------------------

Outcome classifier_suite(std::string& summary) {
  Outcome o;
  const Dataset d = testsupport::gaussian_clusters(396, 420, 42);
  const Hyperparams hp;  // defaults, seed 42
  for (ClassifierKind kind : kAllClassifierKinds) {
    const auto e = evaluate(kind, hp, d, SplitSpec::holdout(0.8, 42));
    const double acc = e.summary.metrics.accuracy.value_or(0.0);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%s=%.2f%%", summary.empty() ? "" : " ", std::string(short_name(kind)).c_str(),
                  100 * acc);
    summary += buf;
    o.require(acc >= 0.95, std::string(to_string(kind)) + " below 95%");
  }
  return o;
}

// ---- 4 ---------------------------------------------------------------------

Outcome gradient_check(double& worst) {
  Outcome o;
  Rng rng(404);
  auto state = mlp_init(13, 4, 0.5, 404);
  std::vector<double> rows;
  std::vector<Label> labels;
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 13; ++j) rows.push_back(rng.uniform(0, 1));
    labels.push_back(rng.below(2) ? Label::Ransomware : Label::Benign);
  }
  const MlpState grad = mlp_gradient(state, rows, labels);
  const double h = 1e-5;
  worst = 0;
  auto probe = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = mlp_loss(state, rows, labels);
    param = saved - h;
    const double down = mlp_loss(state, rows, labels);
    param = saved;
    const double numeric = (up - down) / (2 * h);
    const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-12});
    worst = std::max(worst, rel);
  };
  for (std::size_t i = 0; i < state.w1.size(); ++i) probe(state.w1[i], grad.w1[i]);
  for (std::size_t i = 0; i < state.b1.size(); ++i) probe(state.b1[i], grad.b1[i]);
  for (std::size_t i = 0; i < state.w2.size(); ++i) probe(state.w2[i], grad.w2[i]);
  probe(state.b2, grad.b2);
  o.require(state.w1.size() == 52 && state.w2.size() == 4, "network shape");
  o.require(worst < 1e-4, "relative error too large");
  return o;
}

// ---- 5 ---------------------------------------------------------------------

Outcome structural() {
  Outcome o;
  const Dataset d = testsupport::gaussian_clusters(150, 150, 55, 1.0);
  Hyperparams hp;
  hp.forest.trees = 1;
  hp.forest.bootstrap = false;
  hp.forest.features_per_split = 13;
  const auto tree = train(ClassifierKind::DecisionTreeJ48, hp, d);
  const auto forest = train(ClassifierKind::RandomForest, hp, d);
  Rng rng(505);
  FeatureVector lo = d.samples[0].features, hi = lo;
  for (const auto& s : d.samples) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      lo[j] = std::min(lo[j], s.features[j]);
      hi[j] = std::max(hi[j], s.features[j]);
    }
  }
  for (int i = 0; i < 500; ++i) {
    FeatureVector q;
    for (std::size_t j = 0; j < kFeatureCount; ++j) q[j] = rng.uniform(lo[j], hi[j]);
    o.require(predict(tree, q) == predict(forest, q), "forest and tree disagree");
  }
  std::size_t right = 0;
  for (const auto& s : d.samples) right += predict(tree, s.features).label == s.label;
  o.require(right == d.size(), "tree training accuracy below 100%");
  return o;
}

// ---- 6 ---------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const Dataset d = testsupport::gaussian_clusters(100, 110, 66, 2.0);
  Hyperparams hp;
  hp.forest.trees = 20;
  hp.mlp.epochs = 200;
  Rng rng(606);
  for (ClassifierKind kind : kAllClassifierKinds) {
    const auto a = train(kind, hp, d);
    const auto b = train(kind, hp, d);
    const std::string bytes = save_model(a);
    o.require(bytes == save_model(b), std::string(to_string(kind)) + " model files differ");
    const auto loaded = load_model(bytes);
    for (int i = 0; i < 1000; ++i) {
      FeatureVector q;
      const auto& base = d.samples[rng.below(d.size())].features;
      for (std::size_t j = 0; j < kFeatureCount; ++j) q[j] = base[j] * rng.uniform(0.7, 1.3);
      o.require(predict(loaded, q) == predict(a, q), std::string(to_string(kind)) + " round trip changed a prediction");
    }
  }
  return o;
}

// ---- 7 ---------------------------------------------------------------------

std::vector<PacketRecord> synthetic_capture(std::uint64_t seed, double span) {
  Rng rng(seed);
  std::vector<PacketRecord> ps;
  const double t0 = 1700000000.0 + static_cast<double>(seed);
  for (int flow = 0; flow < 60; ++flow) {
    const bool noisy = rng.below(3) == 0;
    const double start = rng.uniform(0, span);
    const auto sport = static_cast<std::uint16_t>(30000 + rng.below(30000));
    const std::string host = "10.1.0." + std::to_string(1 + rng.below(50));
    const std::string server = noisy ? "10.1.9.9" : "172.16.0." + std::to_string(1 + rng.below(20));
    const std::uint16_t dport = noisy ? 445 : (rng.below(2) ? 443 : 53);
    const std::uint8_t proto = dport == 53 ? 17 : 6;
    const std::size_t packets = noisy ? 10 + rng.below(40) : 1 + rng.below(6);
    double t = start;
    for (std::size_t i = 0; i < packets; ++i) {
      t += rng.uniform(0, noisy ? 0.5 : 5.0);
      const bool forward = rng.below(4) != 0;
      const auto size = static_cast<std::uint32_t>(noisy ? 1000 + rng.below(500) : 60 + rng.below(400));
      ps.push_back(forward ? packet(t0 + t, host, sport, server, dport, proto, size)
                           : packet(t0 + t, server, dport, host, sport, proto, size));
    }
  }
  std::stable_sort(ps.begin(), ps.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  return ps;
}

Dataset capture_training_set() {
  Dataset d;
  for (std::uint64_t seed = 900; seed < 904; ++seed) {
    for (const auto& c : aggregate(synthetic_capture(seed, 600))) {
      LabeledSample s;
      s.features = encode(c);
      s.label = c.port_b == 445 ? Label::Ransomware : Label::Benign;
      d.samples.push_back(s);
    }
  }
  return d;
}

Outcome detection_equivalence(std::string& summary) {
  Outcome o;
  const Dataset d = capture_training_set();
  Hyperparams hp;
  hp.forest.trees = 25;
  std::vector<TrainedModel> models;
  for (auto kind : {ClassifierKind::DecisionTreeJ48, ClassifierKind::RandomForest, ClassifierKind::BayesNetwork}) {
    models.push_back(train(kind, hp, d));
  }
  std::size_t total_alerts = 0, total_convs = 0;
  for (std::uint64_t capture = 0; capture < 3; ++capture) {
    const std::string capture_file = write_pcap(synthetic_capture(10 + capture, 400));
    const auto ps = parse_pcap(std::as_bytes(std::span(capture_file))).packets;
    WindowSpec spec;
    spec.interval = 60;
    for (const auto& model : models) {
      const std::uint64_t fp = model_fingerprint(model);
      std::vector<Alert> offline;
      for (const auto& batch : window_packets(ps, spec)) {
        for (const auto& c : aggregate_window(batch)) {
          ++total_convs;
          const FeatureVector f = encode(c);
          const Prediction p = predict(model, f);
          if (p.label != Label::Ransomware) continue;
          Alert a;
          a.window_index = batch.index;
          a.conversation = c;
          a.features = f;
          a.prediction = p;
          a.model_fingerprint = fp;
          a.emitted_at = ps.front().timestamp + static_cast<double>(batch.index + 1) * spec.interval;
          offline.push_back(a);
        }
      }
      std::string first, second;
      for (std::string* out : {&first, &second}) {
        std::istringstream pcap(capture_file);
        PcapPacketSource source(pcap);
        detect_stream(source, model, spec, [&](const Alert& a) { *out += alert_to_json(a) + "\n"; });
      }
      std::sort(offline.begin(), offline.end(), [](const Alert& a, const Alert& b) {
        return std::pair(a.window_index, a.conversation.key()) < std::pair(b.window_index, b.conversation.key());
      });
      std::string expected;
      for (const auto& a : offline) expected += alert_to_json(a) + "\n";
      if (first != expected) {
        std::istringstream a(first), b(expected);
        std::string la, lb;
        while (std::getline(a, la) && std::getline(b, lb) && la == lb) {
        }
        o.require(false, std::string(to_string(model.kind)) + " alert set differs from the offline pipeline: stream '" +
                             la + "' vs offline '" + lb + "'");
      }
      o.require(first == second, "repeated replay differs");
      total_alerts += offline.size();
    }
  }
  o.require(total_alerts > 0 && total_alerts < total_convs, "degenerate fixture: all or no conversations flagged");
  summary = std::to_string(total_alerts) + " alerts over " + std::to_string(total_convs) + " window conversations";
  return o;
}

// ---- 8 ---------------------------------------------------------------------

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cl(line);
    std::string cell;
    while (std::getline(cl, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

Outcome report_shape(std::string& summary) {
  Outcome o;
  testsupport::ScratchDir dir("acceptance_report");
  testsupport::write_text(dir.file("set.csv"), dataset_to_csv(testsupport::gaussian_conversations(396, 420, 42)));
  std::ostringstream out, err;
  const int eval_code = cli::run({"eval", "--data", dir.file("set.csv"), "--kinds", "all"}, out, err);
  o.require(eval_code == 0, "eval failed: " + err.str());
  const auto table = csv_rows(out.str());
  o.require(table.size() == 7, "eval table does not have 6 rows");
  if (!table.empty()) {
    const std::vector<std::string> want = {"classifier", "TPR(%)",   "FPR(%)",         "Precision",
                                           "Recall",     "F-measure", "Accuracy score", "training_time_s"};
    o.require(table[0] == want, "eval column set");
  }
  for (std::size_t i = 1; i < table.size(); ++i) {
    o.require(table[i].size() == 8 && table[i][0] == to_string(kAllClassifierKinds[i - 1]), "eval row order");
  }

  std::ostringstream bout, berr;
  const int bench_code = cli::run({"bench", "--data", dir.file("set.csv"), "--kinds", "all"}, bout, berr);
  o.require(bench_code == 0, "bench failed: " + berr.str());
  const auto timing = csv_rows(bout.str());
  o.require(timing.size() == 7 && timing[0] == std::vector<std::string>{"classifier", "training_time_s"},
            "timing table shape");
  if (timing.size() == 7) {
    const double knn = std::stod(timing[1][1]);
    const double mlp = std::stod(timing[2][1]);
    o.require(timing[1][0] == "KNearestNeighbor" && timing[2][0] == "MultilayerPerceptron", "timing row order");
    o.require(knn < mlp, "KNN fit not faster than MLP fit");
    summary = "knn=" + timing[1][1] + "s mlp=" + timing[2][1] + "s";
  }
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome(std::string&)>& body,
                    double time_limit) {
    std::string note;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = body(note);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double elapsed = seconds_since(t0);
    if (o.ok && time_limit > 0 && elapsed >= time_limit) {
      o.ok = false;
      o.detail = "over the time limit";
    }
    failures += !o.ok;
    std::printf("%s [%d] %s (%.3f s%s%s%s%s)\n", o.ok ? "PASS" : "FAIL", id, name.c_str(), elapsed,
                time_limit > 0 ? ", limit " : "", time_limit > 0 ? std::to_string(static_cast<int>(time_limit)).append(" s").c_str() : "",
                note.empty() ? "" : "; ", (o.ok ? note : o.detail).c_str());
    std::fflush(stdout);
  };

  report(1, "metric oracle: 1000 random confusion counts, tolerance 1e-12", [](std::string&) { return metric_oracle(); }, 1);
  report(2, "conversation oracle: crafted 20-packet capture, 10000 random streams",
         [](std::string&) { return conversation_oracle(); }, 5);
  report(3, "six classifiers >= 95% holdout accuracy on 396+420 Gaussian clusters", classifier_suite, 60);
  report(4, "MLP 13-4-1 gradient check, step 1e-5, relative error < 1e-4",
         [](std::string& note) {
           double worst = 0;
           auto o = gradient_check(worst);
           char buf[48];
           std::snprintf(buf, sizeof buf, "worst %.2e", worst);
           note = buf;
           return o;
         },
         0);
  report(5, "forest(1 tree, no bootstrap, all features) == J48 on 500 queries; 100% training accuracy",
         [](std::string&) { return structural(); }, 0);
  report(6, "byte-identical model files; round trip keeps 1000 predictions", [](std::string&) { return determinism(); },
         0);
  report(7, "streaming alerts == offline positives, 3 models x 3 captures, repeat byte-identical",
         detection_equivalence, 0);
  report(8, "eval/bench report shape, KNN fit < MLP fit", report_shape, 0);
  return failures == 0 ? 0 : 1;
}
