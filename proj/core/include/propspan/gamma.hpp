#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "propspan/corpus.hpp"

namespace propspan::gamma {

/// One annotator's one span on a continuum.
struct Unit {
  std::string annotator_id;
  LabeledSpan span;
};

/// All units of all annotators over one paragraph. Spans must be valid
/// within [0, text_length); gamma is defined for >= 2 annotators.
struct Continuum {
  std::string paragraph_id;
  std::int64_t text_length = 0;  // scalar units
  std::vector<std::string> annotators;
  std::vector<Unit> units;
};

enum class Aggregate { unit_weighted, unweighted, pooled_disorder };

std::string_view to_string(Aggregate a);
std::optional<Aggregate> aggregate_from_string(std::string_view s);

struct GammaConfig {
  double alpha = 1.0;        // positional weight
  double beta = 1.0;         // categorical weight
  double delta_empty = 1.0;  // cost of pairing against an empty slot
  int n_samples = 30;        // chance resamples per continuum
  std::uint64_t seed = 0;
  enum class CategoricalDistance { zero_one } categorical_distance =
      CategoricalDistance::zero_one;
  Aggregate aggregate = Aggregate::unit_weighted;
};

struct GammaResult {
  double gamma = 0;
  double observed_disorder = 0;
  double expected_disorder = 0;
  int n_samples_used = 0;
  std::optional<std::map<Technique, double>> per_technique;
};

struct ParagraphGamma {
  std::string paragraph_id;
  double gamma = 0;
  double observed_disorder = 0;
  double expected_disorder = 0;
  std::size_t unit_count = 0;
};

struct CorpusGammaResult {
  GammaResult corpus;
  std::vector<ParagraphGamma> per_paragraph;  // sorted by paragraph id
  std::size_t skipped_empty_paragraphs = 0;
  std::size_t skipped_invalid_spans = 0;
};

/// Squared boundary-distance ratio: delta_empty * ((|ds| + |de|) / (lu + lv))^2.
/// Symmetric, zero iff identical boundaries, invariant under scaling all
/// offsets by a positive factor.
double positional_dissimilarity(const Unit& u, const Unit& v,
                                const GammaConfig& cfg);

/// alpha * positional + beta * categorical (zero/one times delta_empty).
double unit_dissimilarity(const Unit& u, const Unit& v, const GammaConfig& cfg);

/// A unitary alignment: one slot per annotator, holding a unit index into
/// Continuum::units or -1 for an empty slot.
struct AlignmentTuple {
  std::vector<std::int32_t> slots;
  double cost = 0;  // mean pairwise dissimilarity over annotator pairs
};

struct Alignment {
  std::vector<AlignmentTuple> tuples;
  double disorder = 0;  // sum of tuple costs / average units per annotator
};

/// Exact minimum-disorder alignment (branch-and-bound exact cover over
/// candidate tuples pruned at cost > |annotators| * delta_empty).
/// An empty continuum yields an empty alignment with disorder 0.
/// Throws DataError for fewer than 2 annotators.
Alignment best_alignment(const Continuum& c, const GammaConfig& cfg);

/// Mean best-alignment disorder over cfg.n_samples chance continua. The
/// sampler fills each annotator slot with a uniformly chosen real
/// annotator's units, each span cyclically shifted by an independent
/// uniform offset; shifts that would wrap are re-drawn (up to 100 tries,
/// then the span is clamped against the end of the text). Deterministic in
/// (continuum, cfg.seed); `threads` only schedules the samples.
double expected_disorder(const Continuum& c, const GammaConfig& cfg,
                         unsigned threads = 1);

/// gamma = 1 - observed/expected. Both zero -> 1; expected zero with
/// observed > 0 is a degenerate continuum -> DataError.
GammaResult compute_gamma(const Continuum& c, const GammaConfig& cfg,
                          unsigned threads = 1);

/// Builds the per-paragraph continuum for a family of annotation sets.
/// Spans that are invalid within the paragraph (sentinel or out-of-bounds)
/// cannot be placed on the continuum; they are skipped and counted.
Continuum make_continuum(const std::vector<AnnotationSet>& sets,
                         const Corpus& corpus, std::string_view paragraph_id,
                         std::size_t* skipped_invalid = nullptr);

/// Corpus-level gamma: per-paragraph gamma on every continuum with at least
/// one unit, aggregated per cfg.aggregate (default: unit-count-weighted mean).
/// Paragraphs where no annotator produced a span are skipped.
CorpusGammaResult corpus_gamma(const std::vector<AnnotationSet>& sets,
                               const Corpus& corpus, const GammaConfig& cfg,
                               unsigned threads = 1);

/// Per-technique gamma: every set restricted to spans of one technique,
/// paragraphs with no remaining units dropped. Techniques with no units
/// anywhere are absent from the map.
std::map<Technique, GammaResult> per_technique_gamma(
    const std::vector<AnnotationSet>& sets, const Corpus& corpus,
    const GammaConfig& cfg, unsigned threads = 1);

}  // namespace propspan::gamma
