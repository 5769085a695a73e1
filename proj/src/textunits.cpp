// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include "attnorigin/textunits.hpp"

#include <algorithm>

#include "attnorigin/error.hpp"

namespace attnorigin::textunits {

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(unsigned char c) {
  return c < 0x80 && ((c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
                      (c >= '{' && c <= '~'));
}

bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }

bool is_terminal(unsigned char c) { return c == '.' || c == '!' || c == '?'; }

// Blank line = a line containing only whitespace.
std::vector<std::string> split_blank_lines(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, eol - pos);
    if (trim(line).empty()) {
      if (!trim(current).empty()) out.push_back(trim(current));
      current.clear();
    } else {
      if (!current.empty()) current += '\n';
      current += line;
    }
    pos = eol + 1;
  }
  if (!trim(current).empty()) out.push_back(trim(current));
  return out;
}

}  // namespace

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

RawDocument RawDocument::from_text(std::string doc_id, std::string_view text) {
  RawDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.text = std::string(text);
  doc.paragraphs = split_blank_lines(text);
  return doc;
}

RawDocument RawDocument::from_paragraphs(std::string doc_id, std::vector<std::string> paragraphs) {
  RawDocument doc;
  doc.doc_id = std::move(doc_id);
  for (auto& p : paragraphs) {
    std::string t = trim(p);
    if (t.empty()) continue;
    if (!doc.text.empty()) doc.text += "\n\n";
    doc.text += t;
    doc.paragraphs.push_back(std::move(t));
  }
  return doc;
}

const char* to_string(UnitMode mode) {
  return mode == UnitMode::paragraph ? "paragraph" : "sentence";
}

UnitMode parse_unit_mode(std::string_view name) {
  if (name == "paragraph") return UnitMode::paragraph;
  if (name == "sentence") return UnitMode::sentence;
  throw InvalidArgument("unknown unit mode '" + std::string(name) + "'");
}

int UnitizedInput::real_units() const {
  return static_cast<int>(
      std::count_if(units.begin(), units.end(), [](const TextualUnit& u) { return !u.pad; }));
}

bool UnitizedInput::is_pad(int unit, int token) const {
  return pad_mask[static_cast<std::size_t>(unit) * tokens_per_unit + token] != 0;
}

std::vector<std::uint8_t> UnitizedInput::pad_units() const {
  std::vector<std::uint8_t> out(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) out[i] = units[i].pad ? 1 : 0;
  return out;
}

std::optional<int> UnitizedInput::position_in_document(int unit) const {
  if (!doc_boundaries || unit < 0 || unit >= static_cast<int>(doc_boundaries->size())) {
    return std::nullopt;
  }
  const auto& b = *doc_boundaries;
  int first = unit;
  while (first > 0 && b[first - 1] == b[unit]) --first;
  return unit - first;
}

std::vector<std::string> RuleTokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) tokens.push_back(std::move(word));
    word.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_space(c)) {
      flush();
    } else if (is_punct(c)) {
      flush();
      tokens.emplace_back(1, ch);
    } else if (is_upper(c)) {
      word += static_cast<char>(c - 'A' + 'a');
    } else {
      word += ch;
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> tokenize(std::string_view text) { return RuleTokenizer{}.tokenize(text); }

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!is_terminal(static_cast<unsigned char>(text[i]))) continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_space(static_cast<unsigned char>(text[j]))) ++j;
    const bool at_end = j == text.size();
    const bool had_space = j > i + 1;
    if (at_end || (had_space && is_upper(static_cast<unsigned char>(text[j])))) {
      std::string s = trim(text.substr(start, i + 1 - start));
      if (!s.empty()) sentences.push_back(std::move(s));
      start = i + 1;
    }
  }
  std::string rest = trim(text.substr(std::min(start, text.size())));
  if (!rest.empty()) sentences.push_back(std::move(rest));
  return sentences;
}

UnitizedInput unitize(const MultiDocSet& set, UnitMode mode, int num_units, int tokens_per_unit,
                      const Tokenizer& tokenizer) {
  if (num_units < 1 || tokens_per_unit < 1) {
    throw InvalidArgument("unitize: L and T must be >= 1");
  }
  if (set.documents.empty()) {
    throw InvalidArgument("unitize: set '" + set.set_id + "' has no documents");
  }

  // Candidate units in document order, then unit order.
  struct Candidate {
    int doc;
    std::string text;
  };
  std::vector<Candidate> candidates;
  for (std::size_t d = 0; d < set.documents.size(); ++d) {
    for (const auto& para : set.documents[d].paragraphs) {
      if (mode == UnitMode::paragraph) {
        std::string t = trim(para);
        if (!t.empty()) candidates.push_back({static_cast<int>(d), std::move(t)});
      } else {
        for (auto& s : split_sentences(para)) candidates.push_back({static_cast<int>(d), std::move(s)});
      }
    }
  }
  if (mode == UnitMode::sentence && candidates.empty()) {
    throw InvalidArgument("unitize: sentence splitting produced no units for set '" + set.set_id + "'");
  }

  UnitizedInput out;
  out.set_id = set.set_id;
  out.mode = mode;
  out.num_units = num_units;
  out.tokens_per_unit = tokens_per_unit;
  out.gold_summary = set.gold_summary;
  for (const auto& doc : set.documents) out.doc_ids.push_back(doc.doc_id);
  out.pad_mask.assign(out.token_budget(), 1);
  out.units.resize(static_cast<std::size_t>(num_units));
  std::vector<int> boundaries;

  const std::size_t kept = std::min(candidates.size(), static_cast<std::size_t>(num_units));
  for (std::size_t i = 0; i < out.units.size(); ++i) {
    auto& unit = out.units[i];
    unit.unit_index = static_cast<int>(i);
    if (i >= kept) {
      unit.pad = true;
      continue;
    }
    unit.doc_index = candidates[i].doc;
    unit.original_text = candidates[i].text;
    unit.tokens = tokenizer.tokenize(unit.original_text);
    if (unit.tokens.size() > static_cast<std::size_t>(tokens_per_unit)) {
      unit.tokens.resize(static_cast<std::size_t>(tokens_per_unit));
    }
    for (std::size_t t = 0; t < unit.tokens.size(); ++t) {
      out.pad_mask[i * tokens_per_unit + t] = 0;
    }
    boundaries.push_back(unit.doc_index);
  }
  out.doc_boundaries = std::move(boundaries);
  return out;
}

UnitizedInput unitize(const MultiDocSet& set, UnitMode mode, int num_units, int tokens_per_unit) {
  return unitize(set, mode, num_units, tokens_per_unit, RuleTokenizer{});
}

}  // namespace attnorigin::textunits
