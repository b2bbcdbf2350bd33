#pragma once

namespace stdwr {

/// OpenBLAS picks its "cooperlake" kernels on some virtualized AVX-512 hosts and
/// those return NaN inside UMFPACK's dense updates. When that kernel is active and
/// OPENBLAS_CORETYPE is unset, re-execute the program with SkylakeX kernels.
/// Returns normally in every other case (including when OpenBLAS is not the BLAS).
void ensure_working_blas(char** argv);

}  // namespace stdwr
