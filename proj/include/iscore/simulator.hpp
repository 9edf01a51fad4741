#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iscore/disease_model.hpp"
#include "iscore/estimators.hpp"
#include "iscore/rng.hpp"

namespace iscore {

struct SimConfig {
  DiseaseModel model;
  long n = 100;       // per-class sample size
  int reps = 25;
  std::uint64_t seed = 0;
};

/// One bias-study row: analytic parameters plus replication summaries.
struct RepSummary {
  double theta_e = 0.0;
  double b = 0.0;        // -B_e, magnitude of the training bias
  double b_o = 0.0;      // B_eo
  double theta_I0 = 0.0;
  double bound = 0.0;
  double mean_b = 0.0, sd_b = 0.0;
  double mean_b1 = 0.0, sd_b1 = 0.0;
  double mean_bo = 0.0, sd_bo = 0.0;
  bool single_rep = false;  // sds are degenerate (reps == 1)
};

/// n cases drawn from f_{X|Y}(.|d) and n controls from f_{X|Y}(.|h); the
/// influential tuple comes from f_{U|Y}, noise SNPs from their genotype laws.
LabeledSample draw_case_control(const DiseaseModel& model, long n, Rng& rng);

/// Class-conditional probabilities of every joint genotype cell, influential
/// tuples expanded against the noise SNPs. Intended for simulation-scale
/// models; refuses groups whose cell space exceeds 3^12.
CellDist full_cell_dist(const DiseaseModel& model);

RepSummary replicate_bias_study(const SimConfig& config);

/// Built-in study rows behind `reproduce --table 4` and `--table 6`.
struct StudyRow {
  std::vector<double> maf;
  std::vector<int> influential;
  std::vector<double> penetrance;  // base-3 index order
  int reps;
  long n;
};
std::span<const StudyRow> one_influential_study_rows();
std::span<const StudyRow> two_influential_study_rows();

DiseaseModel study_row_model(const StudyRow& row);

/// A curve table ready for CSV emission.
struct FigureTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// figure 1: b vs log10(lambda); figure 2: a vs log10(lambda) — both at n=500
/// for r in {1.016, 1.062, 1.25, 5, 40}. figures 3 and 4: (theta_e, theta_I0)
/// loci of the penetrance catalogs as the common MAF sweeps [0.001, 0.3],
/// plus the bound curve theta_I0 = 4 (0.5 - theta_e)^2.
FigureTable figure_curves(int figure);

/// Reference bias tables (ids 1 and 2): 4-decimal cells over the published
/// grid. Table 1's printed column labels differ from the r values that
/// generate its cells; the mapping is fixed here.
FigureTable reference_bias_table(int table);

/// Bias-study tables (ids 4 and 6) at the given seed, 3-decimal columns.
FigureTable reference_study_table(int table, std::uint64_t seed);

}  // namespace iscore
