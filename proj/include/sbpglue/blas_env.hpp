#pragma once

namespace sbpglue {

/// OpenBLAS 0.3.20 picks a COOPERLAKE dnrm2 kernel on some Xeons that makes
/// dgeev loop forever. The core type is read when the library loads, so when
/// OPENBLAS_CORETYPE is unset this sets it to Haswell and re-executes the
/// current binary. Returns normally if the variable was already set or the
/// re-exec failed.
void pin_openblas_core(char** argv);

}  // namespace sbpglue
