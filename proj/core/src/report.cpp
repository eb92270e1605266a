#include "brainclust/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace brainclust {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string fixed(double v) {
  if (!std::isfinite(v)) return format_number(v);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Messages go on a single TSV line.
std::string flatten(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return s;
}

void pad(std::ostringstream& out, const std::string& s, std::size_t width) {
  out << s;
  for (std::size_t i = s.size(); i < width; ++i) out << ' ';
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + p.string());
}

}  // namespace

std::string format_report_table(const MetricsReport& r) {
  const auto& names = metric_names();
  std::ostringstream out;
  out << "mode: " << (r.mode == EvaluationMode::kGroundTruth ? "ground-truth" : "reference-segmentation") << "\n\n";

  std::size_t id_width = 10;
  for (const auto& p : r.patients) id_width = std::max(id_width, p.id.size());
  id_width += 2;
  constexpr std::size_t kCol = 13;

  pad(out, "patient_id", id_width);
  for (const auto& n : names) pad(out, n, kCol);
  out << '\n';
  for (const auto& p : r.patients) {
    pad(out, p.id, id_width);
    for (const auto& n : names) {
      const auto v = metric_value(p, n);
      pad(out, v ? fixed(*v) : "-", kCol);
    }
    out << '\n';
  }

  out << "\nsummary\n";
  pad(out, "metric", 14);
  pad(out, "count", 8);
  pad(out, "mean", kCol);
  pad(out, "median", kCol);
  out << "std\n";
  for (const auto& s : r.summary) {
    pad(out, s.metric, 14);
    pad(out, std::to_string(s.count), 8);
    pad(out, s.count ? fixed(s.mean) : "-", kCol);
    pad(out, s.count ? fixed(s.median) : "-", kCol);
    out << (s.count ? fixed(s.stddev) : "-") << '\n';
  }

  out << "\nfailures: " << r.failures.size() << '\n';
  for (const auto& f : r.failures) out << "  " << f.id << ": " << flatten(f.message) << '\n';

  std::string text = out.str();
  std::string trimmed;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::size_t last = end;
    while (last > start && text[last - 1] == ' ') --last;
    trimmed.append(text, start, last - start);
    if (end < text.size()) trimmed += '\n';
    start = end + 1;
  }
  return trimmed;
}

std::string format_patient_tsv(const MetricsReport& r) {
  std::ostringstream out;
  out << "patient_id\tmetric\tvalue\n";
  for (const auto& p : r.patients) {
    for (const auto& n : metric_names()) {
      if (const auto v = metric_value(p, n)) out << p.id << '\t' << n << '\t' << format_number(*v) << '\n';
    }
  }
  return out.str();
}

std::string format_summary_tsv(const MetricsReport& r) {
  std::ostringstream out;
  out << "metric\tcount\tmean\tmedian\tstd\n";
  for (const auto& s : r.summary) {
    out << s.metric << '\t' << s.count << '\t' << format_number(s.mean) << '\t' << format_number(s.median) << '\t'
        << format_number(s.stddev) << '\n';
  }
  return out.str();
}

std::string format_failures_tsv(const MetricsReport& r) {
  std::ostringstream out;
  out << "patient_id\terror\n";
  for (const auto& f : r.failures) out << f.id << '\t' << flatten(f.message) << '\n';
  return out.str();
}

void write_report(const MetricsReport& r, const std::filesystem::path& prefix) {
  const std::string base = prefix.string();
  write_file(base + ".txt", format_report_table(r));
  write_file(base + ".tsv", format_patient_tsv(r));
  write_file(base + "_summary.tsv", format_summary_tsv(r));
  write_file(base + "_failures.tsv", format_failures_tsv(r));
}

}  // namespace brainclust
