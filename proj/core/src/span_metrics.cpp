#include "propspan/span_metrics.hpp"

#include <algorithm>

#include "propspan/errors.hpp"

namespace propspan {

double match_score(const LabeledSpan& s, const LabeledSpan& t, std::int64_t h) {
  if (h < 1) throw DataError("match_score: h must be >= 1");
  if (s.technique != t.technique) return 0.0;
  const std::int64_t lo = std::max(s.start, t.start);
  const std::int64_t hi = std::min(s.end, t.end);
  if (hi <= lo) return 0.0;
  return static_cast<double>(hi - lo) / static_cast<double>(h);
}

ParagraphScores paragraph_scores(const std::vector<LabeledSpan>& preds,
                                 const std::vector<LabeledSpan>& golds,
                                 bool clamp) {
  ParagraphScores out;
  out.p_den = static_cast<std::int64_t>(preds.size());
  out.r_den = static_cast<std::int64_t>(golds.size());
  for (const auto& s : preds) {
    if (s.length() < 1) continue;  // degenerate prediction earns nothing
    double credit = 0;
    for (const auto& t : golds) credit += match_score(s, t, s.length());
    out.p_num += clamp ? std::min(1.0, credit) : credit;
  }
  for (const auto& t : golds) {
    if (t.length() < 1) continue;
    double credit = 0;
    for (const auto& s : preds) credit += match_score(s, t, t.length());
    out.r_num += clamp ? std::min(1.0, credit) : credit;
  }
  return out;
}

namespace {

const std::vector<LabeledSpan>& spans_or_empty(const AnnotationSet& set,
                                               const std::string& pid) {
  static const std::vector<LabeledSpan> empty;
  const auto* spans = set.spans_for(pid);
  return spans ? *spans : empty;
}

void require_known_paragraphs(const AnnotationSet& set, const Corpus& corpus) {
  for (const auto& [pid, spans] : set.spans) {
    if (!corpus.contains(pid))
      throw DataError("annotation set \"" + set.annotator_id +
                      "\" references paragraph not in corpus: " + pid);
  }
}

struct Totals {
  double p_num = 0;
  std::int64_t p_den = 0;
  double r_num = 0;
  std::int64_t r_den = 0;

  void add(const ParagraphScores& s) {
    p_num += s.p_num;
    p_den += s.p_den;
    r_num += s.r_num;
    r_den += s.r_den;
  }

  // Empty-vs-empty counts as perfect so all-negative corpora score 1.
  double precision() const {
    if (p_den == 0) return r_den == 0 ? 1.0 : 0.0;
    return p_num / static_cast<double>(p_den);
  }
  double recall() const {
    if (r_den == 0) return p_den == 0 ? 1.0 : 0.0;
    return r_num / static_cast<double>(r_den);
  }
};

std::vector<LabeledSpan> filter_technique(const std::vector<LabeledSpan>& spans,
                                          Technique t) {
  std::vector<LabeledSpan> out;
  for (const auto& s : spans) {
    if (s.technique == t) out.push_back(s);
  }
  return out;
}

}  // namespace

ScoreReport micro_f1(const AnnotationSet& pred_set,
                     const AnnotationSet& gold_set, const Corpus& corpus,
                     const MatchConfig& cfg) {
  require_known_paragraphs(pred_set, corpus);
  require_known_paragraphs(gold_set, corpus);

  Totals overall;
  std::map<Technique, Totals> per_technique;
  for (const auto& pid : corpus.sorted_ids()) {
    const auto& preds = spans_or_empty(pred_set, pid);
    const auto& golds = spans_or_empty(gold_set, pid);
    if (preds.empty() && golds.empty()) continue;
    overall.add(paragraph_scores(preds, golds, cfg.clamp));

    std::set<Technique> present;
    for (const auto& s : preds) present.insert(s.technique);
    for (const auto& t : golds) present.insert(t.technique);
    for (Technique tech : present) {
      per_technique[tech].add(paragraph_scores(filter_technique(preds, tech),
                                               filter_technique(golds, tech),
                                               cfg.clamp));
    }
  }

  ScoreReport report;
  report.precision = overall.precision();
  report.recall = overall.recall();
  report.f1 = f1_of(report.precision, report.recall);
  report.pred_count = overall.p_den;
  report.gold_count = overall.r_den;
  for (const auto& [tech, totals] : per_technique) {
    TechniqueScore ts;
    ts.precision = totals.precision();
    ts.recall = totals.recall();
    ts.f1 = f1_of(ts.precision, ts.recall);
    ts.support = totals.r_den;
    ts.pred_count = totals.p_den;
    report.per_technique.emplace(tech, ts);
  }
  return report;
}

ScoreReport macro_f1(const AnnotationSet& pred_set,
                     const AnnotationSet& gold_set, const Corpus& corpus,
                     const MatchConfig& cfg) {
  ScoreReport micro = micro_f1(pred_set, gold_set, corpus, cfg);

  ScoreReport report;
  report.per_technique = micro.per_technique;
  report.pred_count = micro.pred_count;
  report.gold_count = micro.gold_count;

  std::vector<TechniqueScore> domain;
  if (cfg.macro_domain == MatchConfig::MacroDomain::all_23) {
    for (Technique tech : Technique::all()) {
      auto it = report.per_technique.find(tech);
      if (it != report.per_technique.end()) {
        domain.push_back(it->second);
      } else {
        // Technique absent from both sides: vacuously perfect, consistent
        // with the empty-vs-empty micro convention.
        domain.push_back({1.0, 1.0, 1.0, 0, 0});
      }
    }
  } else {
    for (const auto& [tech, ts] : report.per_technique) domain.push_back(ts);
  }

  if (domain.empty()) {
    // No technique had gold or predicted support anywhere.
    report.precision = report.recall = report.f1 = 1.0;
    return report;
  }
  for (const auto& ts : domain) {
    report.precision += ts.precision;
    report.recall += ts.recall;
    report.f1 += ts.f1;
  }
  const double n = static_cast<double>(domain.size());
  report.precision /= n;
  report.recall /= n;
  report.f1 /= n;
  return report;
}

}  // namespace propspan
