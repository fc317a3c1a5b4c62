#pragma once

#include "mortrisk/types.hpp"

#include <iosfwd>
#include <string>

namespace mortrisk {

// Canonical dataset CSV:
//   id,status,time_years,maturity_years,<covariate 1>,...,<covariate p>
// status is one of default | prepaid | active. Covariate paths are constant
// (one vector per loan), which is what ingestion and the benchmark generator emit.

void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);

void write_dataset_file(const std::string& path, const Dataset& data);
Dataset read_dataset_file(const std::string& path);

}  // namespace mortrisk
