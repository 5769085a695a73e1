// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace attnorigin::textunits {

/// Default grid shapes for the two unitization modes (token budget 1800 each).
inline constexpr int kParagraphUnits = 30;
inline constexpr int kParagraphTokens = 60;
inline constexpr int kSentenceUnits = 60;
inline constexpr int kSentenceTokens = 30;

struct RawDocument {
  std::string doc_id;
  std::string text;
  std::vector<std::string> paragraphs;

  /// Splits `text` on blank lines; empty paragraphs are dropped.
  static RawDocument from_text(std::string doc_id, std::string_view text);
  /// Takes explicit paragraphs; whitespace-only entries are dropped.
  static RawDocument from_paragraphs(std::string doc_id, std::vector<std::string> paragraphs);
};

struct MultiDocSet {
  std::string set_id;
  std::vector<RawDocument> documents;
  std::optional<std::string> gold_summary;
};

enum class UnitMode { paragraph, sentence };

const char* to_string(UnitMode mode);
UnitMode parse_unit_mode(std::string_view name);

struct TextualUnit {
  int doc_index = 0;
  int unit_index = 0;
  std::vector<std::string> tokens;
  std::string original_text;
  bool pad = false;

  bool operator==(const TextualUnit&) const = default;
};

/// Fixed L×T token grid. Real units come first, in document order; the
/// remaining slots are padding.
struct UnitizedInput {
  std::string set_id;
  UnitMode mode = UnitMode::paragraph;
  int num_units = 0;        // L
  int tokens_per_unit = 0;  // T
  std::vector<TextualUnit> units;
  /// L×T row-major; 1 marks a padded token position.
  std::vector<std::uint8_t> pad_mask;
  /// doc_index for every non-pad unit, indexed by unit_index. Absent for
  /// externally supplied inputs that carry no document correspondence.
  std::optional<std::vector<int>> doc_boundaries;
  std::vector<std::string> doc_ids;
  std::optional<std::string> gold_summary;

  int real_units() const;
  std::size_t token_budget() const {
    return static_cast<std::size_t>(num_units) * static_cast<std::size_t>(tokens_per_unit);
  }
  bool is_pad(int unit, int token) const;
  /// One flag per unit slot, 1 for padding.
  std::vector<std::uint8_t> pad_units() const;
  /// Position of `unit` within its document (0 = leading unit), or nullopt
  /// for pad slots or when no doc_boundaries exist.
  std::optional<int> position_in_document(int unit) const;

  bool operator==(const UnitizedInput&) const = default;
};

/// Pluggable tokenizer; the rule-based one is the default everywhere.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
};

/// Lowercases ASCII letters, splits on whitespace, and emits every ASCII
/// punctuation character as its own token. Bytes >= 0x80 stay inside words.
class RuleTokenizer final : public Tokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view text) const override;
};

std::vector<std::string> tokenize(std::string_view text);

/// A boundary is one of . ! ? followed by whitespace and then an uppercase
/// ASCII letter, or by (optional whitespace and) the end of the text.
/// Sentences are returned trimmed.
std::vector<std::string> split_sentences(std::string_view text);

std::string trim(std::string_view text);

UnitizedInput unitize(const MultiDocSet& set, UnitMode mode, int num_units, int tokens_per_unit,
                      const Tokenizer& tokenizer);
UnitizedInput unitize(const MultiDocSet& set, UnitMode mode, int num_units, int tokens_per_unit);

}  // namespace attnorigin::textunits
