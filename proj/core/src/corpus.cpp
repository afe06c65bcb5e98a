#include "propspan/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "propspan/errors.hpp"
#include "propspan/unicode.hpp"

namespace propspan {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "";
}

std::optional<Split> split_from_string(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "dev") return Split::dev;
  if (s == "test") return Split::test;
  return std::nullopt;
}

std::string_view to_string(AnnotatorKind k) {
  switch (k) {
    case AnnotatorKind::human_annotator: return "human_annotator";
    case AnnotatorKind::human_consolidator: return "human_consolidator";
    case AnnotatorKind::llm_annotator: return "llm_annotator";
    case AnnotatorKind::llm_selector: return "llm_selector";
    case AnnotatorKind::llm_consolidator: return "llm_consolidator";
    case AnnotatorKind::external_model: return "external_model";
  }
  return "";
}

std::optional<AnnotatorKind> annotator_kind_from_string(std::string_view s) {
  for (auto k : {AnnotatorKind::human_annotator, AnnotatorKind::human_consolidator,
                 AnnotatorKind::llm_annotator, AnnotatorKind::llm_selector,
                 AnnotatorKind::llm_consolidator, AnnotatorKind::external_model}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::int64_t Paragraph::scalar_length() const {
  return static_cast<std::int64_t>(unicode::scalar_length(text));
}

bool index_consistent(const Paragraph& p, const LabeledSpan& s) {
  if (s.start < 0 || s.end <= s.start) return false;
  const std::int64_t n = p.scalar_length();
  if (s.end > n) return false;
  return unicode::slice(p.text, static_cast<std::size_t>(s.start),
                        static_cast<std::size_t>(s.end)) == s.text;
}

const std::vector<LabeledSpan>* AnnotationSet::spans_for(
    std::string_view paragraph_id) const {
  auto it = spans.find(std::string(paragraph_id));
  return it == spans.end() ? nullptr : &it->second;
}

std::size_t AnnotationSet::total_spans() const {
  std::size_t n = 0;
  for (const auto& [id, list] : spans) n += list.size();
  return n;
}

std::vector<Technique> LabelSetSummary::all_labels() const {
  std::set<Technique> merged;
  for (const auto& [annotator, labels] : per_annotator)
    merged.insert(labels.begin(), labels.end());
  return {merged.begin(), merged.end()};
}

void Corpus::reindex() const {
  index_.clear();
  for (std::size_t i = 0; i < paragraphs.size(); ++i)
    index_.emplace(paragraphs[i].id, i);
}

const Paragraph* Corpus::find(std::string_view id) const {
  if (index_.size() != paragraphs.size()) reindex();
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &paragraphs[it->second];
}

const Paragraph& Corpus::at(std::string_view id) const {
  const Paragraph* p = find(id);
  if (!p) throw DataError("unknown paragraph id: " + std::string(id));
  return *p;
}

bool Corpus::contains(std::string_view id) const { return find(id) != nullptr; }

std::vector<std::string> Corpus::sorted_ids() const {
  std::vector<std::string> ids;
  ids.reserve(paragraphs.size());
  for (const auto& p : paragraphs) ids.push_back(p.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

[[noreturn]] void line_error(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

Technique parse_technique(const json& value, const std::filesystem::path& path,
                          std::size_t line) {
  if (!value.is_string())
    line_error(path, line, "span field \"technique\" must be a string");
  const auto name = value.get<std::string>();
  auto t = Technique::from_canonical(name);
  if (!t) {
    line_error(path, line,
               "unknown technique \"" + name + "\"; canonical names are: " +
                   Technique::canonical_names_joined());
  }
  return *t;
}

std::int64_t parse_offset(const json& obj, const char* key,
                          const std::filesystem::path& path, std::size_t line) {
  if (!obj.contains(key))
    line_error(path, line, std::string("span missing \"") + key + "\" field");
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    line_error(path, line, std::string("span field \"") + key +
                               "\" must be an integer");
  return v.get<std::int64_t>();
}

LabeledSpan parse_span(const json& obj, const std::filesystem::path& path,
                       std::size_t line) {
  if (!obj.is_object()) line_error(path, line, "label entry must be an object");
  if (!obj.contains("technique"))
    line_error(path, line, "span missing \"technique\" field");
  if (!obj.contains("text") || !obj.at("text").is_string())
    line_error(path, line, "span missing string \"text\" field");
  LabeledSpan span{parse_technique(obj.at("technique"), path, line),
                   parse_offset(obj, "start", path, line),
                   parse_offset(obj, "end", path, line),
                   obj.at("text").get<std::string>()};
  return span;
}

// Byte-offset corpora are converted to scalar offsets up front; offsets that
// fall inside a multi-byte sequence are flagged and snapped backwards.
void convert_byte_offsets(const Paragraph& p, LabeledSpan& span,
                          std::size_t span_index, ValidationReport& report) {
  const auto offsets = unicode::scalar_byte_offsets(p.text);
  auto to_scalar = [&](std::int64_t byte, const char* which) -> std::int64_t {
    if (byte < 0) return byte;  // sentinel stays
    auto it = std::upper_bound(offsets.begin(), offsets.end(),
                               static_cast<std::size_t>(byte));
    std::int64_t scalar = static_cast<std::int64_t>(it - offsets.begin()) - 1;
    if (scalar >= 0 && offsets[static_cast<std::size_t>(scalar)] !=
                           static_cast<std::size_t>(byte)) {
      report.issues.push_back({p.id, span_index, "offset_not_on_boundary",
                               std::string(which) + " byte offset " +
                                   std::to_string(byte) +
                                   " is not a scalar boundary"});
    }
    return scalar;
  };
  if (static_cast<std::size_t>(std::max<std::int64_t>(span.start, 0)) >
          p.text.size() ||
      static_cast<std::size_t>(std::max<std::int64_t>(span.end, 0)) >
          p.text.size()) {
    return;  // out of byte range; bounds check below will flag it
  }
  span.start = to_scalar(span.start, "start");
  span.end = to_scalar(span.end, "end");
}

void check_span(const Paragraph& p, const LabeledSpan& span,
                std::size_t span_index, ValidationReport& report) {
  if (span.has_sentinel_offsets()) {
    report.issues.push_back({p.id, span_index, "sentinel_offsets",
                             "span offsets are the -1 sentinel (unrepaired)"});
    return;
  }
  if (span.start < 0 || span.end <= span.start ||
      span.end > p.scalar_length()) {
    report.issues.push_back(
        {p.id, span_index, "offset_out_of_bounds",
         "span [" + std::to_string(span.start) + "," +
             std::to_string(span.end) + ") outside text of length " +
             std::to_string(p.scalar_length())});
    return;
  }
  if (!index_consistent(p, span)) {
    report.issues.push_back(
        {p.id, span_index, "index_inconsistent",
         "text at [" + std::to_string(span.start) + "," +
             std::to_string(span.end) + ") does not equal span text"});
  }
}

ojson span_to_json(const LabeledSpan& span) {
  ojson s;
  s["technique"] = std::string(span.technique.canonical_name());
  s["start"] = span.start;
  s["end"] = span.end;
  s["text"] = span.text;
  return s;
}

}  // namespace

CorpusLoadResult load_corpus(const std::filesystem::path& path,
                             const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path.string());

  CorpusLoadResult result;
  AnnotationSet gold;
  gold.annotator_id = "gold";
  gold.kind = AnnotatorKind::human_consolidator;

  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) line_error(path, line_no, "record must be an object");
    if (!record.contains("id") || !record.at("id").is_string())
      line_error(path, line_no, "record missing string \"id\" field");
    if (!record.contains("text") || !record.at("text").is_string())
      line_error(path, line_no, "record missing string \"text\" field");

    Paragraph p;
    p.id = record.at("id").get<std::string>();
    p.text = record.at("text").get<std::string>();
    if (p.text.empty()) line_error(path, line_no, "paragraph text is empty");
    unicode::scalar_length(p.text);  // strict UTF-8 check, throws if ill-formed
    if (record.contains("split")) {
      auto s = split_from_string(record.at("split").get<std::string>());
      if (!s) line_error(path, line_no, "unknown split value");
      p.split = *s;
    }
    if (record.contains("topic")) p.topic = record.at("topic").get<std::string>();
    if (!seen_ids.insert(p.id).second)
      line_error(path, line_no, "duplicate paragraph id: " + p.id);

    std::vector<LabeledSpan> spans;
    if (record.contains("labels")) {
      if (!record.at("labels").is_array())
        line_error(path, line_no, "\"labels\" must be an array");
      std::size_t span_index = 0;
      for (const auto& obj : record.at("labels")) {
        LabeledSpan span = parse_span(obj, path, line_no);
        if (options.offset_unit == OffsetUnit::byte)
          convert_byte_offsets(p, span, span_index, result.validation);
        check_span(p, span, span_index, result.validation);
        spans.push_back(std::move(span));
        ++span_index;
      }
    }
    if (!spans.empty()) gold.spans.emplace(p.id, std::move(spans));
    result.corpus.paragraphs.push_back(std::move(p));
  }
  if (!gold.spans.empty())
    result.corpus.annotation_sets.push_back(std::move(gold));
  result.corpus.find("");  // build the id index once
  return result;
}

AnnotationLoadResult load_annotation_sets(const std::filesystem::path& path,
                                          const Corpus& corpus,
                                          const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open annotation file: " + path.string());

  AnnotationLoadResult result;
  std::map<std::string, std::size_t> set_index;
  auto set_for = [&](const std::string& annotator_id,
                     std::optional<AnnotatorKind> kind) -> AnnotationSet& {
    auto it = set_index.find(annotator_id);
    if (it == set_index.end()) {
      AnnotationSet s;
      s.annotator_id = annotator_id;
      s.kind = kind.value_or(AnnotatorKind::human_annotator);
      result.sets.push_back(std::move(s));
      it = set_index.emplace(annotator_id, result.sets.size() - 1).first;
    } else if (kind) {
      result.sets[it->second].kind = *kind;
    }
    return result.sets[it->second];
  };

  std::optional<std::string> file_annotator;
  std::optional<AnnotatorKind> file_kind;
  bool first_record = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) line_error(path, line_no, "record must be an object");

    // A first record without "id" is the file header carrying annotator identity.
    const bool is_header = first_record && !record.contains("id");
    first_record = false;
    if (is_header) {
      if (!record.contains("annotator_id"))
        line_error(path, line_no, "header must carry \"annotator_id\"");
      file_annotator = record.at("annotator_id").get<std::string>();
      if (record.contains("kind")) {
        file_kind =
            annotator_kind_from_string(record.at("kind").get<std::string>());
        if (!file_kind) line_error(path, line_no, "unknown annotator kind");
      }
      continue;
    }

    if (!record.contains("id") || !record.at("id").is_string())
      line_error(path, line_no, "record missing string \"id\" field");
    const auto pid = record.at("id").get<std::string>();
    const Paragraph* p = corpus.find(pid);
    if (!p)
      line_error(path, line_no, "paragraph id not in corpus: " + pid);

    std::string annotator;
    std::optional<AnnotatorKind> kind = file_kind;
    if (record.contains("annotator")) {
      annotator = record.at("annotator").get<std::string>();
      if (record.contains("kind")) {
        kind = annotator_kind_from_string(record.at("kind").get<std::string>());
        if (!kind) line_error(path, line_no, "unknown annotator kind");
      }
    } else if (file_annotator) {
      annotator = *file_annotator;
    } else {
      line_error(path, line_no,
                 "no annotator: add a file header or per-line \"annotator\"");
    }

    AnnotationSet& set = set_for(annotator, kind);
    if (!record.contains("labels") || !record.at("labels").is_array())
      line_error(path, line_no, "record missing \"labels\" array");
    auto& spans = set.spans[pid];
    for (const auto& obj : record.at("labels")) {
      LabeledSpan span = parse_span(obj, path, line_no);
      if (options.offset_unit == OffsetUnit::byte)
        convert_byte_offsets(*p, span, spans.size(), result.validation);
      check_span(*p, span, spans.size(), result.validation);
      spans.push_back(std::move(span));
    }
  }
  return result;
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  const AnnotationSet* labels =
      corpus.annotation_sets.empty() ? nullptr : &corpus.annotation_sets[0];
  std::string out;
  for (const auto& p : corpus.paragraphs) {
    ojson record;
    record["id"] = p.id;
    record["text"] = p.text;
    record["labels"] = ojson::array();
    if (labels) {
      if (const auto* spans = labels->spans_for(p.id)) {
        for (const auto& s : *spans) record["labels"].push_back(span_to_json(s));
      }
    }
    if (p.split) record["split"] = std::string(to_string(*p.split));
    if (p.topic) record["topic"] = *p.topic;
    out += record.dump();
    out += '\n';
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file: " + path.string());
  out << corpus_to_jsonl(corpus);
}

std::string annotation_set_to_jsonl(const AnnotationSet& set) {
  ojson header;
  header["annotator_id"] = set.annotator_id;
  header["kind"] = std::string(to_string(set.kind));
  std::string out = header.dump();
  out += '\n';
  for (const auto& [pid, spans] : set.spans) {
    ojson record;
    record["id"] = pid;
    record["labels"] = ojson::array();
    for (const auto& s : spans) record["labels"].push_back(span_to_json(s));
    out += record.dump();
    out += '\n';
  }
  return out;
}

void write_annotation_set(const AnnotationSet& set,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write annotation file: " + path.string());
  out << annotation_set_to_jsonl(set);
}

std::set<Technique> label_summary(const AnnotationSet& set, const Corpus& corpus,
                                  std::string_view paragraph_id) {
  corpus.at(paragraph_id);  // unknown id -> DataError
  std::set<Technique> out;
  if (const auto* spans = set.spans_for(paragraph_id)) {
    for (const auto& s : *spans) out.insert(s.technique);
  }
  return out;
}

LabelSetSummary build_label_summary(const std::vector<AnnotationSet>& sets,
                                    const Corpus& corpus,
                                    std::string_view paragraph_id) {
  LabelSetSummary summary;
  summary.paragraph_id = std::string(paragraph_id);
  for (const auto& set : sets)
    summary.per_annotator[set.annotator_id] =
        label_summary(set, corpus, paragraph_id);
  return summary;
}

ConsolidationPool build_pool(const std::vector<AnnotationSet>& sets,
                             std::string_view paragraph_id) {
  ConsolidationPool pool;
  pool.paragraph_id = std::string(paragraph_id);
  for (const auto& set : sets) {
    if (const auto* spans = set.spans_for(paragraph_id)) {
      for (const auto& s : *spans) pool.entries.push_back({set.annotator_id, s});
    }
  }
  return pool;
}

ValidationReport validate_set(const AnnotationSet& set, const Corpus& corpus) {
  ValidationReport report;
  for (const auto& [pid, spans] : set.spans) {
    const Paragraph* p = corpus.find(pid);
    if (!p) {
      report.issues.push_back({pid, 0, "unknown_paragraph",
                               "annotation references a paragraph not in the corpus"});
      continue;
    }
    for (std::size_t i = 0; i < spans.size(); ++i)
      check_span(*p, spans[i], i, report);
  }
  return report;
}

}  // namespace propspan
