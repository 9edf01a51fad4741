#include "iscore/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace iscore {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_int(const std::string& s, long& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stol(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

double parse_double_or_throw(const std::string& s, const std::string& context) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (...) {
    throw DataError(context + ": not a number: '" + s + "'");
  }
  if (pos != s.size()) throw DataError(context + ": not a number: '" + s + "'");
  return v;
}

}  // namespace

ParsedDataset parse_dataset(const DatasetSpec& spec) {
  std::ifstream in(spec.path);
  if (!in) throw DataError("cannot open " + spec.path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(spec.path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  char delim = spec.delimiter;
  if (delim == '\0') {
    const auto commas = std::count(line.begin(), line.end(), ',');
    const auto tabs = std::count(line.begin(), line.end(), '\t');
    if (commas == 0 && tabs == 0 && line.find(spec.label_column) == std::string::npos)
      throw DataError(spec.path + ": cannot detect delimiter (use an explicit one)");
    delim = tabs > commas ? '\t' : ',';
  }

  const auto header = split(line, delim);
  std::size_t label_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (trim(header[i]) == spec.label_column) label_col = i;
  if (label_col == header.size())
    throw DataError(spec.path + ": no label column '" + spec.label_column + "' in header");

  std::vector<std::string> names;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (i != label_col) names.push_back(trim(header[i]));
  const std::size_t n_vars = names.size();
  if (n_vars == 0) throw DataError(spec.path + ": no explanatory columns");

  std::vector<std::uint8_t> classes;
  std::vector<std::vector<std::string>> raw_cols(n_vars);
  long row_no = 1;
  ParsedDataset out;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, delim);
    if (fields.size() != header.size())
      throw DataError(spec.path + ": row " + std::to_string(row_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    const std::string label = trim(fields[label_col]);
    if (label == spec.class_d) {
      classes.push_back(1);
      ++out.n_d;
    } else if (label == spec.class_h) {
      classes.push_back(0);
      ++out.n_h;
    } else {
      throw DataError(spec.path + ": row " + std::to_string(row_no) + ": unknown label '" +
                      label + "'");
    }
    std::size_t v = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i == label_col) continue;
      raw_cols[v++].push_back(trim(fields[i]));
    }
  }
  if (classes.empty()) throw DataError(spec.path + ": no data rows");

  // integer-valued columns keep their values; anything else gets dictionary codes
  out.dictionaries.resize(n_vars);
  std::vector<int> x(classes.size() * n_vars, 0);
  for (std::size_t col = 0; col < n_vars; ++col) {
    bool all_int = true;
    for (const auto& s : raw_cols[col]) {
      long v;
      if (!parse_int(s, v) || v < 0 || v > 1 << 20) {
        all_int = false;
        break;
      }
    }
    for (std::size_t row = 0; row < raw_cols[col].size(); ++row) {
      int code;
      if (all_int) {
        long v;
        parse_int(raw_cols[col][row], v);
        code = static_cast<int>(v);
      } else {
        auto& dict = out.dictionaries[col];
        const auto [it, inserted] =
            dict.emplace(raw_cols[col][row], static_cast<int>(dict.size()));
        code = it->second;
      }
      x[row * n_vars + col] = code;
    }
  }
  out.sample = make_two_class_sample(std::move(classes), std::move(x), n_vars, names);
  return out;
}

void write_dataset_csv(const LabeledSample& sample, const std::string& path,
                       const std::string& label_column) {
  if (!sample.two_class()) throw std::invalid_argument("only two-class samples are written");
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw DataError("cannot write " + path);
  outf << label_column;
  for (std::size_t j = 0; j < sample.n_vars; ++j)
    outf << ','
         << (sample.variable_names.empty() ? "x" + std::to_string(j)
                                           : sample.variable_names[j]);
  outf << '\n';
  const auto& cls = *sample.classes;
  for (std::size_t row = 0; row < sample.n_rows(); ++row) {
    outf << (cls[row] ? 'd' : 'h');
    for (std::size_t j = 0; j < sample.n_vars; ++j) outf << ',' << sample.value(row, j);
    outf << '\n';
  }
}

namespace {

// parses `key = value` lines; values are numbers, [lists] or {"key": num} maps
struct SpecFields {
  std::map<std::string, std::vector<double>> lists;
  std::map<std::string, std::map<std::string, double>> maps;
  std::map<std::string, double> scalars;
};

std::vector<double> parse_list(const std::string& body, const std::string& context) {
  std::vector<double> out;
  for (const auto& item : split(body, ','))
    if (!trim(item).empty()) out.push_back(parse_double_or_throw(trim(item), context));
  return out;
}

std::map<std::string, double> parse_map(const std::string& body, const std::string& context) {
  std::map<std::string, double> out;
  for (const auto& item : split(body, ',')) {
    const std::string entry = trim(item);
    if (entry.empty()) continue;
    const auto colon = entry.find(':');
    if (colon == std::string::npos) throw DataError(context + ": expected 'key: value'");
    std::string key = trim(entry.substr(0, colon));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"')
      key = key.substr(1, key.size() - 2);
    out[key] = parse_double_or_throw(trim(entry.substr(colon + 1)), context);
  }
  return out;
}

void parse_spec_line(const std::string& raw, const std::string& context, SpecFields& fields) {
  const std::string line = trim(raw);
  if (line.empty() || line[0] == '#') return;
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw DataError(context + ": expected 'key = value': " + line);
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (value.empty()) throw DataError(context + ": empty value for '" + key + "'");
  if (value.front() == '[') {
    if (value.back() != ']') throw DataError(context + ": unterminated list for '" + key + "'");
    fields.lists[key] = parse_list(value.substr(1, value.size() - 2), context);
  } else if (value.front() == '{') {
    if (value.back() != '}') throw DataError(context + ": unterminated map for '" + key + "'");
    fields.maps[key] = parse_map(value.substr(1, value.size() - 2), context);
  } else {
    fields.scalars[key] = parse_double_or_throw(value, context);
  }
}

DiseaseModel model_from_fields(const SpecFields& fields, const std::string& context) {
  const auto maf_it = fields.lists.find("maf");
  if (maf_it == fields.lists.end()) throw DataError(context + ": missing 'maf' list");
  const auto infl_it = fields.lists.find("influential");
  if (infl_it == fields.lists.end()) throw DataError(context + ": missing 'influential' list");
  const auto t_it = fields.maps.find("t");
  if (t_it == fields.maps.end()) throw DataError(context + ": missing 't' map");

  std::vector<int> influential;
  for (double v : infl_it->second) {
    if (v != std::floor(v)) throw DataError(context + ": influential indices must be integers");
    influential.push_back(static_cast<int>(v));
  }
  const std::size_t k = influential.size();
  std::size_t cells = 1;
  for (std::size_t i = 0; i < k; ++i) cells *= 3;
  if (t_it->second.size() != cells)
    throw DataError(context + ": t must have " + std::to_string(cells) +
                    " entries, found " + std::to_string(t_it->second.size()));
  std::vector<double> penetrance(cells, -1.0);
  for (const auto& [label, value] : t_it->second) {
    if (label.size() != k) throw DataError(context + ": t key '" + label + "' has wrong length");
    std::size_t index = 0;
    for (char c : label) {
      if (c < '0' || c > '2') throw DataError(context + ": t key '" + label + "' not base-3");
      index = index * 3 + static_cast<std::size_t>(c - '0');
    }
    penetrance[index] = value;
  }
  for (double t : penetrance)
    if (t < 0.0) throw DataError(context + ": t does not cover all genotype tuples");
  try {
    return DiseaseModel(maf_it->second, influential, penetrance);
  } catch (const std::exception& e) {
    throw DataError(context + ": " + e.what());
  }
}

}  // namespace

DiseaseModel parse_model_spec(const std::string& path) {
  const std::string text = read_file(path);
  SpecFields fields;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) parse_spec_line(line, path, fields);
  return model_from_fields(fields, path);
}

std::vector<StudyConfigEntry> parse_study_config(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream ss(text);
  std::string line;
  std::vector<SpecFields> blocks;
  bool in_block = false;
  while (std::getline(ss, line)) {
    const std::string t = trim(line);
    if (t == "[row]") {
      blocks.emplace_back();
      in_block = true;
      continue;
    }
    if (t.empty() || t[0] == '#') continue;
    if (!in_block) throw DataError(path + ": content before the first [row] block");
    parse_spec_line(line, path, blocks.back());
  }
  if (blocks.empty()) throw DataError(path + ": no [row] blocks");
  std::vector<StudyConfigEntry> out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string context = path + " row " + std::to_string(i + 1);
    const auto m_it = blocks[i].scalars.find("m");
    const auto n_it = blocks[i].scalars.find("n");
    if (m_it == blocks[i].scalars.end() || n_it == blocks[i].scalars.end())
      throw DataError(context + ": needs scalar fields 'm' and 'n'");
    out.push_back({model_from_fields(blocks[i], context),
                   static_cast<int>(m_it->second), static_cast<long>(n_it->second)});
  }
  return out;
}

void write_table_csv(const FigureTable& table, const std::string& path) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw DataError("cannot write " + path);
  for (std::size_t i = 0; i < table.header.size(); ++i)
    outf << (i ? "," : "") << table.header[i];
  outf << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) outf << (i ? "," : "") << row[i];
    outf << '\n';
  }
}

void write_report(const Report& report, const std::string& path) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw DataError("cannot write " + path);
  for (const auto& [key, value] : report) outf << key << " = " << value << '\n';
}

void write_report_csv(const Report& report, const std::string& path) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw DataError("cannot write " + path);
  for (std::size_t i = 0; i < report.size(); ++i) outf << (i ? "," : "") << report[i].first;
  outf << '\n';
  for (std::size_t i = 0; i < report.size(); ++i) outf << (i ? "," : "") << report[i].second;
  outf << '\n';
}

std::string file_digest(const std::string& path) {
  const std::string data = read_file(path);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const RunManifest& manifest, const std::string& next_to_output,
                    bool output_is_directory) {
  nlohmann::ordered_json j;
  j["tool"] = "iscore";
  j["version"] = kVersion;
  j["command"] = manifest.command;
  j["argv"] = manifest.argv;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [key, value] : manifest.config) cfg[key] = value;
  j["config"] = cfg;
  if (manifest.has_seed) j["seed"] = manifest.seed;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [path, digest] : manifest.inputs) inputs[path] = digest;
  j["inputs"] = inputs;
  j["outputs"] = manifest.outputs;

  const std::filesystem::path base(next_to_output);
  const std::filesystem::path target =
      output_is_directory ? base / "run_manifest.json"
                          : std::filesystem::path(next_to_output + ".manifest.json");
  std::ofstream outf(target, std::ios::binary);
  if (!outf) throw DataError("cannot write " + target.string());
  outf << j.dump(2) << '\n';
}

}  // namespace iscore
