#include "scma/parallel.hpp"

#include <omp.h>

namespace scma {

int available_workers() { return omp_get_max_threads(); }

}  // namespace scma
