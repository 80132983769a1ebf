#pragma once

#include <istream>
#include <string>
#include <string_view>

#include "vrszd/linalg.hpp"

namespace vrszd {

struct Dataset {
  Matrix x;       // n x d, dense
  Vector labels;  // in {0, 1}
  std::string name;
};

// LIBSVM text: `label index:value ...` with 1-based, strictly increasing
// indices; absent entries are zero and d is the largest index seen. The two
// raw label values map to {0, 1} in sorted order.
Dataset parse_libsvm(std::istream& in, std::string name = "");
Dataset parse_libsvm_text(std::string_view text, std::string name = "");
Dataset load_libsvm(const std::string& path);

// Per-column (x - mean) / std with the population standard deviation;
// columns with std < 1e-12 become zero.
Dataset standardize(const Dataset& ds);

}  // namespace vrszd
