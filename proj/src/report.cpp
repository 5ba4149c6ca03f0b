#include <json.hpp>

#include "ransomnet/eval.hpp"
#include "text_util.hpp"

namespace ransomnet {

namespace {

using nlohmann::ordered_json;

std::string percent(const Metric& m) { return m ? detail::format_fixed(*m * 100.0, 2) : "n/a"; }

ordered_json metric_json(const Metric& m) { return m ? ordered_json(*m) : ordered_json(nullptr); }

Metric metric_from(const ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string render_report_csv(std::span<const MetricsReport> reports) {
  std::string out(kReportCsvHeader);
  out += '\n';
  for (const MetricsReport& r : reports) {
    const Metrics& m = r.metrics;
    out += to_string(r.classifier);
    for (const Metric* metric : {&m.tpr, &m.fpr, &m.precision, &m.recall, &m.f_measure, &m.accuracy}) {
      out += ',';
      out += percent(*metric);
    }
    out += ',';
    out += detail::format_fixed(r.training_time, 6);
    out += '\n';
  }
  return out;
}

std::string render_report_json(std::span<const MetricsReport> reports, std::uint64_t seed) {
  ordered_json doc;
  doc["seed"] = seed;
  doc["units"] = "fractions in [0,1]; null = undefined (zero denominator)";
  doc["reports"] = ordered_json::array();
  for (const MetricsReport& r : reports) {
    ordered_json row;
    row["classifier"] = std::string(to_string(r.classifier));
    row["tpr"] = metric_json(r.metrics.tpr);
    row["fpr"] = metric_json(r.metrics.fpr);
    row["precision"] = metric_json(r.metrics.precision);
    row["recall"] = metric_json(r.metrics.recall);
    row["f_measure"] = metric_json(r.metrics.f_measure);
    row["accuracy"] = metric_json(r.metrics.accuracy);
    row["training_time_s"] = r.training_time;
    row["counts"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}};
    doc["reports"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

std::vector<MetricsReport> parse_report_json(std::string_view text) {
  std::vector<MetricsReport> reports;
  try {
    const ordered_json doc = ordered_json::parse(text);
    for (const ordered_json& row : doc.at("reports")) {
      MetricsReport r;
      const auto kind = parse_classifier_kind(row.at("classifier").get<std::string>());
      if (!kind) throw Error(ErrorCode::SchemaMismatch, "unknown classifier in report");
      r.classifier = *kind;
      r.metrics.tpr = metric_from(row.at("tpr"));
      r.metrics.fpr = metric_from(row.at("fpr"));
      r.metrics.precision = metric_from(row.at("precision"));
      r.metrics.recall = metric_from(row.at("recall"));
      r.metrics.f_measure = metric_from(row.at("f_measure"));
      r.metrics.accuracy = metric_from(row.at("accuracy"));
      r.training_time = row.at("training_time_s").get<double>();
      const ordered_json& counts = row.at("counts");
      r.counts = {counts.at("tp").get<std::uint64_t>(), counts.at("fp").get<std::uint64_t>(),
                  counts.at("tn").get<std::uint64_t>(), counts.at("fn").get<std::uint64_t>()};
      reports.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("bad report JSON: ") + e.what());
  }
  return reports;
}

std::string render_timing_csv(std::span<const TimingRow> rows) {
  std::string out(kTimingCsvHeader);
  out += '\n';
  for (const TimingRow& row : rows) {
    out += to_string(row.classifier);
    out += ',';
    out += detail::format_fixed(row.training_time, 6);
    out += '\n';
  }
  return out;
}

}  // namespace ransomnet
