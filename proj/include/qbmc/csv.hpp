#pragma once

#include "qbmc/datagen.hpp"
#include "qbmc/linalg.hpp"

#include <string>

namespace qbmc {

// Matrix files are headerless CSV, one matrix row per line. Observation files
// carry a "row,col,value" header and 0-based indices; the reader also accepts
// headerless files. Values are written with 17 significant digits so that a
// write/read round trip reproduces every double bit for bit.

void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);

void write_observations_csv(const std::string& path, const ObservationSet& obs);

/// Reads observation triples for an n x q response. The mode is inferred:
/// every cell exactly once -> Full; distinct cells -> MaskedWithoutReplacement;
/// otherwise IidWithReplacement.
ObservationSet read_observations_csv(const std::string& path, int n, int q);

}  // namespace qbmc
