#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "iscore/disease_model.hpp"
#include "iscore/estimators.hpp"
#include "iscore/simulator.hpp"

namespace iscore {

inline constexpr const char* kVersion = "0.1.0";

/// File/parse problems; the CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetSpec {
  std::string path;
  std::string label_column = "y";
  char delimiter = '\0';  // 0 = auto-detect comma or tab
  std::string class_d = "d";
  std::string class_h = "h";
};

struct ParsedDataset {
  LabeledSample sample;
  // per-column code dictionaries for columns that needed string encoding
  std::vector<std::map<std::string, int>> dictionaries;
  long n_d = 0;
  long n_h = 0;
};

ParsedDataset parse_dataset(const DatasetSpec& spec);

/// Writes a two-class sample as CSV with the label column first.
void write_dataset_csv(const LabeledSample& sample, const std::string& path,
                       const std::string& label_column = "y");

/// Model spec file: `maf = [..]`, `influential = [..]`,
/// `t = { "00": 0.95, ... }` with genotype tuples as digit strings.
DiseaseModel parse_model_spec(const std::string& path);

/// Study config: `[row]` blocks of model-spec fields plus `m` and `n`.
struct StudyConfigEntry {
  DiseaseModel model;
  int reps;
  long n;
};
std::vector<StudyConfigEntry> parse_study_config(const std::string& path);

void write_table_csv(const FigureTable& table, const std::string& path);

using Report = std::vector<std::pair<std::string, std::string>>;
void write_report(const Report& report, const std::string& path);
void write_report_csv(const Report& report, const std::string& path);

/// FNV-1a 64 content digest, hex encoded.
std::string file_digest(const std::string& path);

/// Everything needed to replay a run byte-for-byte. No timestamps on purpose.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  Report config;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::vector<std::pair<std::string, std::string>> inputs;  // path -> digest
  std::vector<std::string> outputs;
};

/// Writes `<output>.manifest.json` (or `<dir>/run_manifest.json`).
void write_manifest(const RunManifest& manifest, const std::string& next_to_output,
                    bool output_is_directory = false);

}  // namespace iscore
