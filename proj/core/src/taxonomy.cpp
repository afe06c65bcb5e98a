#include "propspan/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace propspan {

namespace {

// Canonical spellings and order of the 23-technique taxonomy.
constexpr std::array<std::string_view, Technique::kCount> kCanonicalNames = {
    "Appeal to Authority",
    "Appeal to Fear-Prejudice",
    "Appeal to Hypocrisy",
    "Appeal to Popularity",
    "Appeal to Time",
    "Appeal to Values",
    "Causal Oversimplification",
    "Consequential Oversimplification",
    "Conversation Killer",
    "Doubt",
    "Exaggeration-Minimisation",
    "False Dilemma/No Choice",
    "Flag Waving",
    "Guilt by Association",
    "Loaded Language",
    "Name Calling-Labeling",
    "Obfuscation-Vagueness-Confusion",
    "Questioning the Reputation",
    "Red Herring",
    "Repetition",
    "Slogans",
    "Straw man",
    "Whataboutism",
};

// Lowercased alphanumerics only: collapses slash/space/hyphen variants.
std::string normalize_key(std::string_view name) {
  std::string key;
  key.reserve(name.size());
  for (unsigned char c : name) {
    if (std::isalnum(c)) key.push_back(static_cast<char>(std::tolower(c)));
  }
  return key;
}

const std::unordered_map<std::string, int>& exact_table() {
  static const auto* table = [] {
    auto* m = new std::unordered_map<std::string, int>();
    for (int i = 0; i < Technique::kCount; ++i)
      m->emplace(std::string(kCanonicalNames[i]), i);
    return m;
  }();
  return *table;
}

const std::unordered_map<std::string, int>& normalized_table() {
  static const auto* table = [] {
    auto* m = new std::unordered_map<std::string, int>();
    for (int i = 0; i < Technique::kCount; ++i)
      m->emplace(normalize_key(kCanonicalNames[i]), i);
    // Variant spellings seen in the wild that normalization alone does not
    // collapse to a canonical key.
    m->emplace(normalize_key("Exaggeration/Minimisation"), 10);
    m->emplace(normalize_key("Exaggeration-Minimization"), 10);
    m->emplace(normalize_key("Appeal to fear/prejudice"), 1);
    return m;
  }();
  return *table;
}

}  // namespace

struct TechniqueTableInit {
  static std::array<Technique, Technique::kCount> make() {
    return []<std::size_t... I>(std::index_sequence<I...>) {
      return std::array<Technique, Technique::kCount>{
          Technique(static_cast<std::uint8_t>(I))...};
    }(std::make_index_sequence<Technique::kCount>{});
  }
};

std::optional<Technique> Technique::from_canonical(std::string_view name) {
  const auto& table = exact_table();
  auto it = table.find(std::string(name));
  if (it == table.end()) return std::nullopt;
  return from_index(it->second);
}

std::optional<Technique> Technique::resolve(std::string_view name) {
  if (auto t = from_canonical(name)) return t;
  const auto& table = normalized_table();
  auto it = table.find(normalize_key(name));
  if (it == table.end()) return std::nullopt;
  return from_index(it->second);
}

Technique Technique::from_index(int index) { return all()[index]; }

const std::array<Technique, Technique::kCount>& Technique::all() {
  static const std::array<Technique, kCount> techniques =
      TechniqueTableInit::make();
  return techniques;
}

std::string Technique::canonical_names_joined(std::string_view sep) {
  std::string out;
  for (int i = 0; i < kCount; ++i) {
    if (i) out += sep;
    out += kCanonicalNames[i];
  }
  return out;
}

std::string_view Technique::canonical_name() const {
  return kCanonicalNames[index_];
}

}  // namespace propspan
