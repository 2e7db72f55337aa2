#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dsom/lp.hpp"
#include "dsom/model.hpp"

namespace dsom {

// CPLEX-style LP text format, for cross-checking models against external
// solvers. Writes full double precision; the reader accepts the subset the
// writer emits.
void write_lp_file(std::ostream& os, const Model& model);
void write_lp_file(std::ostream& os, const BoundedLp& lp,
                   const std::vector<std::string>& col_names,
                   const std::vector<std::string>& row_names,
                   const std::vector<uint8_t>& integer_cols);

struct LpFileContents {
  BoundedLp lp;
  std::vector<std::string> col_names;
  std::vector<std::string> row_names;
  std::vector<uint8_t> integer_cols;
};

LpFileContents read_lp_file(std::istream& is);

}  // namespace dsom
