#include "qnoise/errors.hpp"

#include <utility>

namespace qnoise {

UnstableError::UnstableError(const std::string& what,
                             std::vector<std::complex<double>> eigenvalues,
                             double max_real_part)
    : std::runtime_error(what), eigenvalues_(std::move(eigenvalues)), max_real_part_(max_real_part) {}

PoleError::PoleError(const std::string& what, double omega)
    : std::runtime_error(what), omega_(omega) {}

}  // namespace qnoise
