#pragma once

#include <string>
#include <vector>

#include "szego/model.hpp"
#include "szego/parallel.hpp"

namespace szego::lab {

struct SuiteRow {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = true;
  std::string note;
};

struct SuiteParams {
  int gridSize = 256;
  int degree = 2000;
  int phases = 50;
};

/// Model-level checks that apply to any configured model: closed-form
/// spectrum and trace agreement when the coefficients are constant, Thouless
/// and rotation/DOS identities, the orthogonal-polynomial identity on the
/// spectrum, and vanishing Gordon defects for phase-independent models.
std::vector<SuiteRow> model_suite(const VerblunskyModel& model, const SuiteParams& params, Exec exec);

}  // namespace szego::lab
