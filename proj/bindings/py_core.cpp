#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <stdexcept>

#include "iscore/disease_model.hpp"
#include "iscore/estimators.hpp"
#include "iscore/exact_binomial.hpp"
#include "iscore/io.hpp"
#include "iscore/partition_retention.hpp"
#include "iscore/simulator.hpp"

namespace py = pybind11;
using namespace iscore;

namespace {

DiseaseModel model_from_parts(const std::vector<double>& maf,
                              const std::vector<int>& influential,
                              const std::map<std::string, double>& t) {
  std::size_t cells = 1;
  for (std::size_t i = 0; i < influential.size(); ++i) cells *= 3;
  std::vector<double> penetrance(cells, -1.0);
  for (const auto& [label, value] : t) {
    if (label.size() != influential.size())
      throw std::invalid_argument("penetrance key '" + label + "' has wrong length");
    std::size_t index = 0;
    for (char c : label) {
      if (c < '0' || c > '2')
        throw std::invalid_argument("penetrance key '" + label + "' is not base-3");
      index = index * 3 + static_cast<std::size_t>(c - '0');
    }
    penetrance[index] = value;
  }
  for (double v : penetrance)
    if (v < 0.0) throw std::invalid_argument("penetrance does not cover all genotype tuples");
  return DiseaseModel(maf, influential, penetrance);
}

LabeledSample sample_from_rows(const std::vector<int>& classes,
                               const std::vector<std::vector<int>>& rows) {
  if (rows.empty()) throw std::invalid_argument("x must be nonempty");
  const std::size_t n_vars = rows.front().size();
  std::vector<int> flat;
  flat.reserve(rows.size() * n_vars);
  for (const auto& row : rows) {
    if (row.size() != n_vars) throw std::invalid_argument("ragged x matrix");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  std::vector<std::uint8_t> cls;
  cls.reserve(classes.size());
  for (int c : classes) {
    if (c != 0 && c != 1) throw std::invalid_argument("classes must be 0 (h) or 1 (d)");
    cls.push_back(static_cast<std::uint8_t>(c));
  }
  return make_two_class_sample(std::move(cls), std::move(flat), n_vars);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Predictivity parameters, I-score statistics, bias-corrected error "
            "estimates and partition-retention selection for case-control data.";
  m.attr("__version__") = kVersion;

  m.def("expected_min",
        [](int n, double p_z, double p_w) {
          return exact_binomial::expected_min({n, p_z, p_w});
        },
        py::arg("n"), py::arg("p_z"), py::arg("p_w"),
        "E[min(Z, W)] for independent Binomial(n, p_z), Binomial(n, p_w).");
  m.def("neg_rel_bias", &exact_binomial::neg_rel_bias, py::arg("n"), py::arg("lam"),
        py::arg("r"), "b(n, lambda, r) with p_Z = lambda/n, p_W = p_Z/r.");
  m.def("tie_half_prob", &exact_binomial::tie_half_prob, py::arg("n"), py::arg("lam"),
        py::arg("r"), "Pr(Z < W) + 0.5 Pr(Z = W).");
  m.def("bias_grid",
        [](const std::vector<int>& ns, const std::vector<double>& lambdas,
           const std::vector<double>& rs) {
          py::list out;
          for (const auto& cell : exact_binomial::bias_grid(ns, lambdas, rs))
            out.append(py::make_tuple(cell.n, cell.lambda, cell.r, cell.b, cell.a));
          return out;
        },
        py::arg("ns"), py::arg("lambdas"), py::arg("rs"));

  m.def("genotype_dist",
        [](double p) {
          const auto g = genotype_dist(p);
          return py::make_tuple(g[0], g[1], g[2]);
        },
        py::arg("maf"));
  m.def("error_bound", &error_bound, py::arg("theta"));

  py::class_<DiseaseModel>(m, "DiseaseModel")
      .def(py::init(&model_from_parts), py::arg("maf"), py::arg("influential"),
           py::arg("penetrance"),
           "penetrance maps genotype tuples as digit strings ('00', '01', ...) to P(h|u)")
      .def_property_readonly("maf", &DiseaseModel::maf)
      .def_property_readonly("influential", &DiseaseModel::influential);

  m.def("oracle_params",
        [](const DiseaseModel& model) {
          const auto p = oracle_params(model);
          py::dict out;
          out["theta_e"] = p.theta_e;
          out["theta_c"] = p.theta_c;
          out["theta_I"] = p.theta_I;
          out["theta_I0"] = p.theta_I0;
          out["bound_on_theta_e"] = p.bound_on_theta_e;
          out["f_y_d"] = p.f_y_d;
          out["noise_factor"] = p.noise_factor;
          return out;
        },
        py::arg("model"));
  m.def("conditional_tables",
        [](const DiseaseModel& model) {
          const auto t = conditional_tables(model);
          py::dict out;
          out["f_y_d"] = t.f_y_d;
          out["f_u_given_d"] = t.f_u_given_d;
          out["f_u_given_h"] = t.f_u_given_h;
          out["noise_factor"] = t.noise_factor;
          return out;
        },
        py::arg("model"));

  m.def("i_score",
        [](const std::vector<int>& classes, const std::vector<std::vector<int>>& x,
           const std::vector<int>& subset) {
          return i_score(sample_from_rows(classes, x), subset);
        },
        py::arg("classes"), py::arg("x"), py::arg("subset"));
  m.def("j_score",
        [](const std::vector<int>& classes, const std::vector<std::vector<int>>& x,
           const std::vector<int>& subset) {
          return j_score(sample_from_rows(classes, x), subset);
        },
        py::arg("classes"), py::arg("x"), py::arg("subset"));
  m.def("theta_e_train",
        [](const std::vector<int>& classes, const std::vector<std::vector<int>>& x,
           const std::vector<int>& subset) {
          return theta_e_train(cell_counts(sample_from_rows(classes, x), subset));
        },
        py::arg("classes"), py::arg("x"), py::arg("subset"));

  m.def("simulate",
        [](const DiseaseModel& model, long n, std::uint64_t seed) {
          Rng rng = Rng(seed).fork(0);
          const auto sample = draw_case_control(model, n, rng);
          std::vector<int> classes(sample.n_rows());
          std::vector<std::vector<int>> rows(sample.n_rows());
          for (std::size_t i = 0; i < sample.n_rows(); ++i) {
            classes[i] = (*sample.classes)[i];
            rows[i].resize(sample.n_vars);
            for (std::size_t j = 0; j < sample.n_vars; ++j)
              rows[i][j] = sample.value(i, j);
          }
          return py::make_tuple(classes, rows);
        },
        py::arg("model"), py::arg("n"), py::arg("seed"),
        "n cases followed by n controls; returns (classes, genotype rows).");

  m.def("retention_scores",
        [](const std::vector<int>& classes, const std::vector<std::vector<int>>& x, int k,
           long groups, std::uint64_t seed) {
          RetentionConfig config;
          config.group_size = k;
          config.num_groups = groups;
          config.seed = seed;
          config.rounds = 0;
          const auto result = retention_scores(sample_from_rows(classes, x), config);
          py::dict out;
          out["frequency"] = result.retention_frequency;
          out["appearances"] = result.appearances;
          out["survivals"] = result.survivals;
          py::list modules;
          for (const auto& mod : result.modules)
            modules.append(py::make_tuple(mod.variables, mod.i_score, mod.count));
          out["modules"] = modules;
          return out;
        },
        py::arg("classes"), py::arg("x"), py::arg("k") = 6, py::arg("groups") = 0,
        py::arg("seed") = 0);
}
