#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "propspan/taxonomy.hpp"

namespace propspan {

enum class Split { train, dev, test };

std::string_view to_string(Split s);
std::optional<Split> split_from_string(std::string_view s);

/// One annotated character range. start/end count Unicode scalar values of
/// the paragraph text; -1/-1 is the "offsets unknown" sentinel used for LLM
/// output before index repair.
struct LabeledSpan {
  Technique technique;
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::string text;

  std::int64_t length() const { return end - start; }
  bool has_sentinel_offsets() const { return start == -1 && end == -1; }

  friend bool operator==(const LabeledSpan&, const LabeledSpan&) = default;
};

struct Paragraph {
  std::string id;
  std::string text;  // UTF-8
  std::optional<Split> split;
  std::optional<std::string> topic;

  /// Length in Unicode scalar values (what span offsets refer to).
  std::int64_t scalar_length() const;

  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

/// True when 0 <= start < end <= |text| and text[start..end) == span.text.
bool index_consistent(const Paragraph& p, const LabeledSpan& s);

enum class AnnotatorKind {
  human_annotator,
  human_consolidator,
  llm_annotator,
  llm_selector,
  llm_consolidator,
  external_model,
};

std::string_view to_string(AnnotatorKind k);
std::optional<AnnotatorKind> annotator_kind_from_string(std::string_view s);

/// One annotator's spans over a corpus (human, LLM role, or external model).
struct AnnotationSet {
  std::string annotator_id;
  AnnotatorKind kind = AnnotatorKind::human_annotator;
  std::map<std::string, std::vector<LabeledSpan>> spans;  // paragraph id -> spans

  const std::vector<LabeledSpan>* spans_for(std::string_view paragraph_id) const;
  std::size_t total_spans() const;
};

/// Merged spans of all annotators for one paragraph, keeping provenance;
/// identical spans from different annotators stay as distinct entries.
struct ConsolidationPool {
  struct Entry {
    std::string annotator_id;
    LabeledSpan span;
  };
  std::string paragraph_id;
  std::vector<Entry> entries;
};

/// Per-annotator technique sets for one paragraph (the Selector's input).
struct LabelSetSummary {
  std::string paragraph_id;
  std::map<std::string, std::set<Technique>> per_annotator;

  /// Union over annotators, in canonical taxonomy order.
  std::vector<Technique> all_labels() const;
};

struct ValidationIssue {
  std::string paragraph_id;
  std::size_t span_index = 0;
  std::string code;     // e.g. index_inconsistent, offset_out_of_bounds
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool clean() const { return issues.empty(); }
};

struct Corpus {
  std::vector<Paragraph> paragraphs;
  std::vector<AnnotationSet> annotation_sets;  // sets carried in the corpus file

  const Paragraph* find(std::string_view id) const;
  const Paragraph& at(std::string_view id) const;  // throws DataError
  bool contains(std::string_view id) const;

  /// Paragraph ids in sorted order; the canonical iteration order for every
  /// corpus-level aggregation (keeps reductions bit-reproducible).
  std::vector<std::string> sorted_ids() const;

private:
  mutable std::map<std::string, std::size_t, std::less<>> index_;
  void reindex() const;
};

enum class OffsetUnit { scalar, byte };

struct LoadOptions {
  OffsetUnit offset_unit = OffsetUnit::scalar;
};

struct CorpusLoadResult {
  Corpus corpus;
  ValidationReport validation;
};

struct AnnotationLoadResult {
  std::vector<AnnotationSet> sets;
  ValidationReport validation;
};

/// Reads a UTF-8 line-delimited corpus file: one paragraph per line,
/// {"id","text","labels":[{"technique","start","end","text"}]}. Spans with
/// bad offsets or text mismatches are loaded and flagged, never dropped.
/// Malformed records and unknown technique names are hard errors naming the
/// line / value.
CorpusLoadResult load_corpus(const std::filesystem::path& path,
                             const LoadOptions& options = {});

/// Annotation-set files reuse the corpus line shape minus "text": either a
/// first-line header {"annotator_id","kind"} followed by {"id","labels"}
/// lines, or per-line "annotator" (+ optional "kind") fields for
/// multi-annotator files. Validation of offsets needs the corpus.
AnnotationLoadResult load_annotation_sets(const std::filesystem::path& path,
                                          const Corpus& corpus,
                                          const LoadOptions& options = {});

/// Canonical serialization: fixed key order, compact separators, one record
/// per line, paragraphs in input order. load(write(c)) == c byte-for-byte.
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string corpus_to_jsonl(const Corpus& corpus);

void write_annotation_set(const AnnotationSet& set,
                          const std::filesystem::path& path);
std::string annotation_set_to_jsonl(const AnnotationSet& set);

/// Deduplicated technique set of one annotation set on one paragraph.
/// Throws DataError for a paragraph id the corpus does not know.
std::set<Technique> label_summary(const AnnotationSet& set,
                                  const Corpus& corpus,
                                  std::string_view paragraph_id);

/// Builders for the role inputs, deterministic in (set order, span order).
LabelSetSummary build_label_summary(const std::vector<AnnotationSet>& sets,
                                    const Corpus& corpus,
                                    std::string_view paragraph_id);
ConsolidationPool build_pool(const std::vector<AnnotationSet>& sets,
                             std::string_view paragraph_id);

/// Re-checks span/offset consistency of a set against a corpus; used after
/// every transforming operation.
ValidationReport validate_set(const AnnotationSet& set, const Corpus& corpus);

}  // namespace propspan
