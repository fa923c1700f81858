#pragma once

#include <string>
#include <variant>

#include "gds/app/config.hpp"
#include "gds/model/dataset.hpp"
#include "gds/models/cauchy_normal.hpp"
#include "gds/models/hier_gauss.hpp"
#include "gds/models/lin_reg_conjugate.hpp"

namespace gds::app {

using AnyModel = std::variant<CauchyNormalModel, HierGaussModel, LinRegConjugateModel>;

inline bool model_needs_data(const std::string& name) { return name == "hier_gauss" || name == "lin_reg"; }

/// Observations per unit: the cross-section regression design has one, every other design 25.
inline Index default_t_per_unit(const ModelParams& m) {
  if (m.t_per_unit) return *m.t_per_unit;
  return (m.name == "lin_reg" && m.design == "cross_section") ? 1 : 25;
}

/// V₀ = v0_diag·I with 0.2 for the panel design and 5 for the cross-section design.
inline LinRegHyper lin_reg_hyper(const ModelParams& m, Index p) {
  LinRegHyper h = LinRegHyper::defaults(p);
  h.v0 = m.v0_diag.value_or(m.design == "cross_section" ? 5.0 : 0.2) * Matrix::Identity(p, p);
  if (m.r) h.r = *m.r;
  if (m.alpha) h.alpha = *m.alpha;
  return h;
}

inline HierGaussHyper hier_gauss_hyper(const ModelParams& m, Index k) {
  HierGaussHyper h = HierGaussHyper::defaults(k);
  if (m.nu) h.nu = *m.nu;
  if (m.v_beta_diag) h.v_beta = *m.v_beta_diag * Matrix::Identity(k, k);
  if (m.a_diag) h.a = *m.a_diag * Matrix::Identity(k, k);
  return h;
}

/// n, k, and T default to what the dataset shows; given values must match it.
inline AnyModel build_model(const ModelParams& m, const Dataset* data) {
  if (m.name == "cauchy_normal") return CauchyNormalModel(m.y.value_or(0.0));
  if (!model_needs_data(m.name)) {
    throw ConfigError("unknown model '" + m.name + "' (expected cauchy_normal, hier_gauss, or lin_reg)");
  }
  if (data == nullptr) throw ConfigError("model '" + m.name + "' needs a dataset (--data)");
  const Index n = m.n > 0 ? m.n : data->num_units();
  if (n < 1) throw DataError("dataset has no rows");
  const Index t = m.t_per_unit ? *m.t_per_unit : data->rows() / n;
  if (m.name == "hier_gauss") {
    const Index k = m.k > 0 ? m.k : data->num_covariates();
    const HierGaussHyper hyper = hier_gauss_hyper(m, k);
    return make_hier_gauss(n, k, t, *data, &hyper);
  }
  const Index k = m.k > 0 ? m.k : data->num_covariates() - 1;
  const LinRegHyper hyper = lin_reg_hyper(m, k + 1);
  return make_lin_reg_conjugate(n, k, t, *data, &hyper);
}

}  // namespace gds::app
