#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "propspan/corpus.hpp"

namespace propspan {

/// Partial-match scoring knobs. `clamp` caps each span's summed overlap
/// credit at 1 so P,R stay in [0,1] even when same-label gold spans overlap;
/// turning it off reproduces the raw pairwise sum.
struct MatchConfig {
  enum class MacroDomain { present_techniques, all_23 };
  MacroDomain macro_domain = MacroDomain::present_techniques;
  bool clamp = true;
};

struct TechniqueScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::int64_t support = 0;  // gold span count
  std::int64_t pred_count = 0;
};

struct ScoreReport {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::map<Technique, TechniqueScore> per_technique;
  std::int64_t pred_count = 0;
  std::int64_t gold_count = 0;
};

/// Overlap credit of prediction-vs-gold normalized by h: |s ∩ t| / h when
/// the techniques agree, 0 otherwise. h is the length of whichever span the
/// caller is scoring (len(s) on the precision side, len(t) on recall).
double match_score(const LabeledSpan& s, const LabeledSpan& t, std::int64_t h);

/// Per-paragraph partial-match accumulators.
struct ParagraphScores {
  double p_num = 0;
  std::int64_t p_den = 0;
  double r_num = 0;
  std::int64_t r_den = 0;
};

ParagraphScores paragraph_scores(const std::vector<LabeledSpan>& preds,
                                 const std::vector<LabeledSpan>& golds,
                                 bool clamp = true);

/// Micro-averaged corpus F1: numerators/denominators summed over paragraphs
/// in sorted-id order. When nothing was predicted and nothing was gold,
/// P = R = F1 = 1 (vacuous perfection). per_technique carries restricted
/// micro scores per technique with gold support.
ScoreReport micro_f1(const AnnotationSet& pred_set,
                     const AnnotationSet& gold_set, const Corpus& corpus,
                     const MatchConfig& cfg = {});

/// Macro-averaged scores: unweighted mean of per-technique micro P/R/F1 over
/// the configured domain (techniques present in gold or pred, or all 23).
ScoreReport macro_f1(const AnnotationSet& pred_set,
                     const AnnotationSet& gold_set, const Corpus& corpus,
                     const MatchConfig& cfg = {});

inline double f1_of(double p, double r) {
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

}  // namespace propspan
