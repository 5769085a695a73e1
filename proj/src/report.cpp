// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include "attnorigin/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "attnorigin/error.hpp"

namespace attnorigin::report {

namespace {

using rouge::Variant;

constexpr std::array<Variant, 3> kAllVariants{Variant::r1, Variant::r2, Variant::rl};

std::size_t vidx(Variant v) { return static_cast<std::size_t>(v); }

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::optional<double> opt_from(const ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_number()) throw ParseError("report: coefficient must be a number or null");
  return j.get<double>();
}

const ordered_json& at(const ordered_json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("report: missing key '") + key + "'");
  return j.at(key);
}

void put_values(ordered_json& row, const VariantValues& values, const std::vector<Variant>& variants) {
  for (Variant v : variants) row[rouge::to_string(v)] = opt(values[vidx(v)]);
}

VariantValues get_values(const ordered_json& row, const std::vector<Variant>& variants) {
  VariantValues out;
  for (Variant v : variants) out[vidx(v)] = opt_from(at(row, rouge::to_string(v)));
  return out;
}

ordered_json matrix_json(const OptionalMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.size; ++i) {
    ordered_json row = ordered_json::array();
    for (int k = 0; k < m.size; ++k) row.push_back(opt(m.values[static_cast<std::size_t>(i) * m.size + k]));
    rows.push_back(std::move(row));
  }
  return rows;
}

OptionalMatrix matrix_from(const ordered_json& j) {
  if (!j.is_array()) throw ParseError("report: matrix must be an array");
  OptionalMatrix m;
  m.size = static_cast<int>(j.size());
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != j.size()) throw ParseError("report: matrix must be square");
    for (const auto& v : row) m.values.push_back(opt_from(v));
  }
  return m;
}

std::string num(double v) { return ordered_json(v).dump(); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : "null"; }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("report csv: bad number '" + s + "'");
  }
}

std::optional<double> parse_opt(const std::string& s) {
  if (s == "null") return std::nullopt;
  return parse_double(s);
}

std::int64_t parse_int(const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw ParseError("bad integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("report csv: bad integer '" + s + "'");
  }
}

struct CsvWriter {
  std::string out = "section,set_id,layer,head,row,col,variant,value\n";
  void row(std::string_view section, std::string_view set_id, std::string_view layer,
           std::string_view head, std::string_view r, std::string_view c, std::string_view variant,
           std::string_view value) {
    out += csv_field(section) + ',' + csv_field(set_id) + ',' + std::string(layer) + ',' +
           std::string(head) + ',' + std::string(r) + ',' + std::string(c) + ',' +
           std::string(variant) + ',' + csv_field(value) + '\n';
  }
};

std::string str(int v) { return std::to_string(v); }

void grow_matrix(OptionalMatrix& m, int size) {
  if (size <= m.size) return;
  OptionalMatrix g;
  g.size = size;
  g.values.assign(static_cast<std::size_t>(size) * size, std::nullopt);
  for (int i = 0; i < m.size; ++i) {
    for (int k = 0; k < m.size; ++k) {
      g.values[static_cast<std::size_t>(i) * size + k] = m.values[static_cast<std::size_t>(i) * m.size + k];
    }
  }
  m = std::move(g);
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

PosBiasBlock PosBiasBlock::from(const origin::PosBiasHeatmap& map, int layer) {
  return {layer, map.rows, map.cols, map.counts, map.normalized};
}

// ---------------------------------------------------------------------------
// JSON

ordered_json to_json(const Report& r) {
  ordered_json j;
  ordered_json variants = ordered_json::array();
  for (Variant v : r.variants) variants.push_back(rouge::to_string(v));
  j["variants"] = variants;
  j["sample_count"] = r.sample_count;

  ordered_json layers = ordered_json::array();
  for (const auto& row : r.layers) {
    ordered_json o{{"layer", row.layer}};
    put_values(o, row.values, r.variants);
    layers.push_back(std::move(o));
  }
  j["layers"] = layers;

  ordered_json heads = ordered_json::array();
  for (const auto& row : r.heads) {
    ordered_json o{{"layer", row.layer}, {"head", row.head}};
    put_values(o, row.values, r.variants);
    heads.push_back(std::move(o));
  }
  j["heads"] = heads;

  ordered_json hm = ordered_json::array();
  for (const auto& m : r.head_matrix) hm.push_back({{"layer", m.layer}, {"matrix", matrix_json(m.matrix)}});
  j["head_matrix"] = hm;
  j["layer_matrix"] = matrix_json(r.layer_matrix);

  if (r.posbias) {
    const auto& p = *r.posbias;
    ordered_json counts = ordered_json::array();
    ordered_json normalized = ordered_json::array();
    for (int row = 0; row < p.rows; ++row) {
      ordered_json c = ordered_json::array();
      ordered_json n = ordered_json::array();
      for (int col = 0; col < p.cols; ++col) {
        c.push_back(p.counts[static_cast<std::size_t>(row) * p.cols + col]);
        n.push_back(p.normalized[static_cast<std::size_t>(row) * p.cols + col]);
      }
      counts.push_back(std::move(c));
      normalized.push_back(std::move(n));
    }
    j["posbias"] = {{"layer", p.layer}, {"rows", p.rows}, {"cols", p.cols},
                    {"counts", counts}, {"normalized", normalized}};
  } else {
    j["posbias"] = nullptr;
  }

  ordered_json per = ordered_json::array();
  for (const auto& s : r.per_summary) {
    ordered_json ls = ordered_json::array();
    for (const auto& row : s.layers) {
      ordered_json o{{"layer", row.layer}};
      put_values(o, row.values, r.variants);
      ls.push_back(std::move(o));
    }
    per.push_back({{"set_id", s.set_id}, {"layers", ls}});
  }
  j["per_summary"] = per;

  if (r.rouge) {
    j["rouge"] = {{"label", r.rouge->label}, {"r1", r.rouge->r1}, {"r2", r.rouge->r2},
                  {"rl", r.rouge->rl}, {"count", r.rouge->count}};
  } else {
    j["rouge"] = nullptr;
  }
  return j;
}

Report report_from_json(const ordered_json& j) {
  Report r;
  try {
    r.variants.clear();
    for (const auto& v : at(j, "variants")) r.variants.push_back(rouge::parse_variant(v.get<std::string>()));
    r.sample_count = at(j, "sample_count").get<std::int64_t>();
    for (const auto& row : at(j, "layers")) {
      r.layers.push_back({at(row, "layer").get<int>(), get_values(row, r.variants)});
    }
    for (const auto& row : at(j, "heads")) {
      r.heads.push_back({at(row, "layer").get<int>(), at(row, "head").get<int>(), get_values(row, r.variants)});
    }
    for (const auto& m : at(j, "head_matrix")) {
      r.head_matrix.push_back({at(m, "layer").get<int>(), matrix_from(at(m, "matrix"))});
    }
    r.layer_matrix = matrix_from(at(j, "layer_matrix"));
    if (j.contains("posbias") && !j.at("posbias").is_null()) {
      const auto& p = j.at("posbias");
      PosBiasBlock b;
      b.layer = at(p, "layer").get<int>();
      b.rows = at(p, "rows").get<int>();
      b.cols = at(p, "cols").get<int>();
      for (const auto& row : at(p, "counts")) {
        for (const auto& v : row) b.counts.push_back(v.get<std::int64_t>());
      }
      for (const auto& row : at(p, "normalized")) {
        for (const auto& v : row) b.normalized.push_back(v.get<double>());
      }
      const auto cells = static_cast<std::size_t>(b.rows) * static_cast<std::size_t>(b.cols);
      if (b.counts.size() != cells || b.normalized.size() != cells) {
        throw ParseError("report: posbias grid does not match rows x cols");
      }
      r.posbias = std::move(b);
    }
    if (j.contains("per_summary")) {
      for (const auto& s : j.at("per_summary")) {
        SummaryCoefficients sc{at(s, "set_id").get<std::string>(), {}};
        for (const auto& row : at(s, "layers")) {
          sc.layers.push_back({at(row, "layer").get<int>(), get_values(row, r.variants)});
        }
        r.per_summary.push_back(std::move(sc));
      }
    }
    if (j.contains("rouge") && !j.at("rouge").is_null()) {
      const auto& g = j.at("rouge");
      r.rouge = RougeTableRow{at(g, "label").get<std::string>(), at(g, "r1").get<double>(),
                              at(g, "r2").get<double>(), at(g, "rl").get<double>(),
                              at(g, "count").get<std::int64_t>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  return r;
}

// ---------------------------------------------------------------------------
// CSV

std::string to_csv(const Report& r) {
  CsvWriter w;
  std::string variants;
  for (Variant v : r.variants) {
    if (!variants.empty()) variants += ' ';
    variants += rouge::to_string(v);
  }
  w.row("meta", "", "", "", "", "", "variants", variants);
  w.row("meta", "", "", "", "", "", "sample_count", std::to_string(r.sample_count));
  w.row("meta", "", "", "", "", "", "layer_matrix_size", str(r.layer_matrix.size));
  for (const auto& row : r.layers) {
    for (Variant v : r.variants) w.row("layer", "", str(row.layer), "", "", "", rouge::to_string(v), num(row.values[vidx(v)]));
  }
  for (const auto& row : r.heads) {
    for (Variant v : r.variants) {
      w.row("head", "", str(row.layer), str(row.head), "", "", rouge::to_string(v), num(row.values[vidx(v)]));
    }
  }
  for (const auto& m : r.head_matrix) {
    w.row("meta", "", str(m.layer), "", "", "", "head_matrix_size", str(m.matrix.size));
    for (int i = 0; i < m.matrix.size; ++i) {
      for (int k = 0; k < m.matrix.size; ++k) {
        w.row("head_matrix", "", str(m.layer), "", str(i + 1), str(k + 1), "",
              num(m.matrix.values[static_cast<std::size_t>(i) * m.matrix.size + k]));
      }
    }
  }
  for (int i = 0; i < r.layer_matrix.size; ++i) {
    for (int k = 0; k < r.layer_matrix.size; ++k) {
      w.row("layer_matrix", "", "", "", str(i + 1), str(k + 1), "",
            num(r.layer_matrix.values[static_cast<std::size_t>(i) * r.layer_matrix.size + k]));
    }
  }
  if (r.posbias) {
    const auto& p = *r.posbias;
    w.row("meta", "", str(p.layer), "", str(p.rows), str(p.cols), "posbias_shape", "");
    for (int row = 0; row < p.rows; ++row) {
      for (int col = 0; col < p.cols; ++col) {
        const auto k = static_cast<std::size_t>(row) * p.cols + col;
        w.row("posbias_count", "", str(p.layer), "", str(row), str(col), "", std::to_string(p.counts[k]));
        w.row("posbias_normalized", "", str(p.layer), "", str(row), str(col), "", num(p.normalized[k]));
      }
    }
  }
  for (const auto& s : r.per_summary) {
    for (const auto& row : s.layers) {
      for (Variant v : r.variants) {
        w.row("summary", s.set_id, str(row.layer), "", "", "", rouge::to_string(v), num(row.values[vidx(v)]));
      }
    }
  }
  if (r.rouge) {
    w.row("rouge", r.rouge->label, "", "", "", "", "r1", num(r.rouge->r1));
    w.row("rouge", r.rouge->label, "", "", "", "", "r2", num(r.rouge->r2));
    w.row("rouge", r.rouge->label, "", "", "", "", "rl", num(r.rouge->rl));
    w.row("rouge", r.rouge->label, "", "", "", "", "count", std::to_string(r.rouge->count));
  }
  return w.out;
}

Report report_from_csv(std::string_view csv) {
  const auto rows = parse_csv(csv);
  if (rows.empty() || rows.front() != std::vector<std::string>{"section", "set_id", "layer", "head", "row", "col", "variant", "value"}) {
    throw ParseError("report csv: missing header");
  }
  Report r;
  std::map<int, std::size_t> layer_index;
  std::map<std::pair<int, int>, std::size_t> head_index;
  std::map<int, std::size_t> matrix_index;
  std::map<std::string, std::size_t> summary_index;
  auto variant_of = [](const std::string& s) { return vidx(rouge::parse_variant(s)); };

  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 8) throw ParseError("report csv: line " + std::to_string(i + 1) + " has " + std::to_string(f.size()) + " fields");
    const std::string& section = f[0];
    try {
      if (section == "meta") {
        if (f[6] == "variants") {
          r.variants.clear();
          std::istringstream ss(f[7]);
          std::string v;
          while (ss >> v) r.variants.push_back(rouge::parse_variant(v));
        } else if (f[6] == "sample_count") {
          r.sample_count = parse_int(f[7]);
        } else if (f[6] == "layer_matrix_size") {
          grow_matrix(r.layer_matrix, static_cast<int>(parse_int(f[7])));
        } else if (f[6] == "head_matrix_size") {
          const int layer = static_cast<int>(parse_int(f[2]));
          matrix_index[layer] = r.head_matrix.size();
          r.head_matrix.push_back({layer, {}});
          grow_matrix(r.head_matrix.back().matrix, static_cast<int>(parse_int(f[7])));
        } else if (f[6] == "posbias_shape") {
          PosBiasBlock b;
          b.layer = static_cast<int>(parse_int(f[2]));
          b.rows = static_cast<int>(parse_int(f[4]));
          b.cols = static_cast<int>(parse_int(f[5]));
          b.counts.assign(static_cast<std::size_t>(b.rows) * b.cols, 0);
          b.normalized.assign(b.counts.size(), 0.0);
          r.posbias = std::move(b);
        } else {
          throw ParseError("unknown meta key '" + f[6] + "'");
        }
      } else if (section == "layer") {
        const int layer = static_cast<int>(parse_int(f[2]));
        auto [it, fresh] = layer_index.emplace(layer, r.layers.size());
        if (fresh) r.layers.push_back({layer, {}});
        r.layers[it->second].values[variant_of(f[6])] = parse_opt(f[7]);
      } else if (section == "head") {
        const int layer = static_cast<int>(parse_int(f[2]));
        const int head = static_cast<int>(parse_int(f[3]));
        auto [it, fresh] = head_index.emplace(std::make_pair(layer, head), r.heads.size());
        if (fresh) r.heads.push_back({layer, head, {}});
        r.heads[it->second].values[variant_of(f[6])] = parse_opt(f[7]);
      } else if (section == "head_matrix") {
        auto& m = r.head_matrix.at(matrix_index.at(static_cast<int>(parse_int(f[2])))).matrix;
        const auto row = parse_int(f[4]) - 1;
        const auto col = parse_int(f[5]) - 1;
        m.values.at(static_cast<std::size_t>(row * m.size + col)) = parse_opt(f[7]);
      } else if (section == "layer_matrix") {
        auto& m = r.layer_matrix;
        const auto row = parse_int(f[4]) - 1;
        const auto col = parse_int(f[5]) - 1;
        m.values.at(static_cast<std::size_t>(row * m.size + col)) = parse_opt(f[7]);
      } else if (section == "posbias_count" || section == "posbias_normalized") {
        if (!r.posbias) throw ParseError("posbias cell before its shape");
        auto& b = *r.posbias;
        const auto k = static_cast<std::size_t>(parse_int(f[4]) * b.cols + parse_int(f[5]));
        if (section == "posbias_count") {
          b.counts.at(k) = parse_int(f[7]);
        } else {
          b.normalized.at(k) = parse_double(f[7]);
        }
      } else if (section == "summary") {
        auto [it, fresh] = summary_index.emplace(f[1], r.per_summary.size());
        if (fresh) r.per_summary.push_back({f[1], {}});
        auto& layers = r.per_summary[it->second].layers;
        const int layer = static_cast<int>(parse_int(f[2]));
        if (layers.empty() || layers.back().layer != layer) layers.push_back({layer, {}});
        layers.back().values[variant_of(f[6])] = parse_opt(f[7]);
      } else if (section == "rouge") {
        if (!r.rouge) r.rouge = RougeTableRow{f[1], 0, 0, 0, 0};
        if (f[6] == "r1") r.rouge->r1 = parse_double(f[7]);
        else if (f[6] == "r2") r.rouge->r2 = parse_double(f[7]);
        else if (f[6] == "rl") r.rouge->rl = parse_double(f[7]);
        else if (f[6] == "count") r.rouge->count = parse_int(f[7]);
        else throw ParseError("unknown rouge field '" + f[6] + "'");
      } else {
        throw ParseError("unknown section '" + section + "'");
      }
    } catch (const std::out_of_range&) {
      throw ParseError("report csv: line " + std::to_string(i + 1) + ": index out of range");
    } catch (const InvalidArgument& e) {
      throw ParseError("report csv: line " + std::to_string(i + 1) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("report csv: line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Text

std::string format_triple(const VariantValues& values, int decimals) {
  std::string out;
  for (Variant v : kAllVariants) {
    if (!out.empty()) out += '/';
    const auto& x = values[vidx(v)];
    out += x ? fixed(*x, decimals) : "n/a";
  }
  return out;
}

std::string format_count(std::int64_t n) {
  std::string digits = std::to_string(n < 0 ? -n : n);
  std::string out;
  const int lead = static_cast<int>(digits.size() % 3);
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (static_cast<int>(i) - lead) % 3 == 0) out += ',';
    out += digits[i];
  }
  return n < 0 ? "-" + out : out;
}

std::string format_rouge_row(const RougeTableRow& row) {
  return row.label + " | " + format_triple({row.r1, row.r2, row.rl}) + " | " + format_count(row.count);
}

std::string format_matrix_summary(const origin::MatrixSummary& s) {
  return "average " + (s.mean ? fixed(*s.mean, 2) : std::string("n/a")) + ", minimum " +
         (s.min ? fixed(*s.min, 2) : std::string("n/a"));
}

std::string to_text(const Report& r) {
  std::string out = "decoding layer | correlation(A', R) ROUGE-F (1/2/L)\n";
  for (const auto& row : r.layers) out += std::to_string(row.layer) + " | " + format_triple(row.values) + "\n";
  auto summarize = [](const OptionalMatrix& m) {
    return format_matrix_summary(origin::off_diagonal_summary(origin::CorrelationMatrix{m.size, m.values}));
  };
  for (const auto& m : r.head_matrix) {
    out += "heads of layer " + std::to_string(m.layer) + ": " + summarize(m.matrix) + "\n";
  }
  out += "layers: " + summarize(r.layer_matrix) + "\n";
  out += "samples: " + std::to_string(r.sample_count) + "\n";
  if (r.rouge) out += "rouge: " + format_rouge_row(*r.rouge) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// ROUGE tables

ordered_json to_json(const RougeTable& table) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"label", row.label}, {"r1", row.r1}, {"r2", row.r2}, {"rl", row.rl}, {"count", row.count}});
  }
  return {{"rows", rows}};
}

RougeTable rouge_table_from_json(const ordered_json& j) {
  RougeTable t;
  try {
    for (const auto& row : at(j, "rows")) {
      t.rows.push_back({at(row, "label").get<std::string>(), at(row, "r1").get<double>(),
                        at(row, "r2").get<double>(), at(row, "rl").get<double>(),
                        at(row, "count").get<std::int64_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rouge table: ") + e.what());
  }
  return t;
}

std::string to_csv(const RougeTable& table) {
  std::string out = "label,r1,r2,rl,count\n";
  for (const auto& row : table.rows) {
    out += csv_field(row.label) + ',' + num(row.r1) + ',' + num(row.r2) + ',' + num(row.rl) + ',' +
           std::to_string(row.count) + '\n';
  }
  return out;
}

RougeTable rouge_table_from_csv(std::string_view csv) {
  const auto rows = parse_csv(csv);
  if (rows.empty() || rows.front() != std::vector<std::string>{"label", "r1", "r2", "rl", "count"}) {
    throw ParseError("rouge table csv: missing header");
  }
  RougeTable t;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 5) throw ParseError("rouge table csv: line " + std::to_string(i + 1) + " malformed");
    t.rows.push_back({f[0], parse_double(f[1]), parse_double(f[2]), parse_double(f[3]), parse_int(f[4])});
  }
  return t;
}

std::string to_text(const RougeTable& table) {
  std::string out = "textual unit | ROUGE-F (1/2/L) | count\n";
  for (const auto& row : table.rows) out += format_rouge_row(row) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// SVG

std::string render_heatmap_svg(const PosBiasBlock& block) {
  constexpr int kCell = 24;
  constexpr int kLeft = 64;
  constexpr int kTop = 48;
  const int width = kLeft + block.cols * kCell + 8;
  const int height = kTop + block.rows * kCell + 8;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + str(width) + "\" height=\"" +
         str(height) + "\" viewBox=\"0 0 " + str(width) + " " + str(height) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + str(width) + "\" height=\"" + str(height) +
         "\" fill=\"rgb(255,255,255)\"/>\n";
  out += "<text x=\"" + str(kLeft) + "\" y=\"14\" font-family=\"sans-serif\" font-size=\"12\">"
         "generated sentence (layer " + str(block.layer) + ")</text>\n";
  out += "<text x=\"4\" y=\"" + str(kTop - 4) +
         "\" font-family=\"sans-serif\" font-size=\"10\">position</text>\n";
  for (int c = 0; c < block.cols; ++c) {
    out += "<text x=\"" + str(kLeft + c * kCell + kCell / 2) + "\" y=\"" + str(kTop - 6) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" + str(c) + "</text>\n";
  }
  for (int r = 0; r < block.rows; ++r) {
    out += "<text x=\"" + str(kLeft - 6) + "\" y=\"" + str(kTop + r * kCell + kCell / 2 + 4) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" + str(r) + "</text>\n";
    for (int c = 0; c < block.cols; ++c) {
      const double v = std::clamp(block.normalized[static_cast<std::size_t>(r) * block.cols + c], 0.0, 1.0);
      const int g = static_cast<int>(std::lround(255.0 * (1.0 - v)));
      out += "<rect x=\"" + str(kLeft + c * kCell) + "\" y=\"" + str(kTop + r * kCell) + "\" width=\"" +
             str(kCell) + "\" height=\"" + str(kCell) + "\" fill=\"rgb(" + str(g) + "," + str(g) + "," +
             str(g) + ")\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace attnorigin::report
