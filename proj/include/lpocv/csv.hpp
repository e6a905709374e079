#pragma once

#include "lpocv/dataset.hpp"

#include <filesystem>
#include <iosfwd>

namespace lpocv {

// Dataset CSV: a header row `f1,...,fd,label`, then one row per point with d
// decimal coordinates and a label in {0,1}. Comma separator, '.' decimal
// point, no quoting, UTF-8. Blank lines are skipped; a trailing '\r' is
// tolerated. Values are written in shortest round-trip form.

Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::filesystem::path& path);

void write_dataset_csv(std::ostream& out, const Dataset& dataset);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);

}  // namespace lpocv
