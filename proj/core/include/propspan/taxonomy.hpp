#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace propspan {

/// One of the 23 propaganda techniques. The taxonomy is closed: a Technique
/// can only be obtained through from_canonical (exact spelling) or resolve
/// (case/punctuation-insensitive). Index order is the canonical taxonomy
/// order used for matrix columns and report sorting everywhere.
class Technique {
public:
  static constexpr int kCount = 23;

  /// Exact canonical-name lookup; nullopt for anything else (never guesses).
  static std::optional<Technique> from_canonical(std::string_view name);

  /// Normalizing resolver for near-miss spellings coming back from LLMs
  /// ("Name Calling /Labeling", "LoadedLanguage", case changes). Matching
  /// drops everything but alphanumerics and lowercases the rest.
  static std::optional<Technique> resolve(std::string_view name);

  static Technique from_index(int index);
  static const std::array<Technique, kCount>& all();

  /// Canonical names, one line per technique, for error messages.
  static std::string canonical_names_joined(std::string_view sep = ", ");

  std::string_view canonical_name() const;
  int index() const { return index_; }

  friend bool operator==(Technique a, Technique b) = default;
  friend auto operator<=>(Technique a, Technique b) = default;

private:
  explicit constexpr Technique(std::uint8_t index) : index_(index) {}
  std::uint8_t index_;
  friend struct TechniqueTableInit;
};

}  // namespace propspan

template <>
struct std::hash<propspan::Technique> {
  std::size_t operator()(propspan::Technique t) const noexcept {
    return static_cast<std::size_t>(t.index());
  }
};
