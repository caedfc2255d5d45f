#include "sbpglue/blas_env.hpp"

#include <cstdlib>

#include <unistd.h>

namespace sbpglue {

void pin_openblas_core(char** argv) {
  if (std::getenv("OPENBLAS_CORETYPE")) return;
  if (setenv("OPENBLAS_CORETYPE", "Haswell", 1) != 0) return;
  execv("/proc/self/exe", argv);
}

}  // namespace sbpglue
