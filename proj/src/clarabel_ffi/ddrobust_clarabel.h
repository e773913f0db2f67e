#pragma once

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  DDR_SOLVED = 0,
  DDR_PRIMAL_INFEASIBLE = 1,
  DDR_DUAL_INFEASIBLE = 2,
  DDR_INACCURATE = 3,
  DDR_LIMIT = 4,
  DDR_FAILED = 5,
};

/* minimize q'x subject to b - A x in K; K = nonnegative orthant of size
   `nonnegative` followed by one PSD cone of order `psd_dim` stored as its
   upper triangle, column by column, off-diagonals scaled by sqrt(2).
   A is m x n in compressed sparse column form. */
typedef struct {
  size_t n;
  size_t m;
  const double* q;
  const size_t* a_colptr;
  const size_t* a_rowval;
  const double* a_nzval;
  const double* b;
  size_t nonnegative;
  size_t psd_dim;
} DdrClarabelProblem;

typedef struct {
  double tolerance;
  uint32_t max_iterations;
  double time_limit; /* seconds, 0 = none */
  int32_t verbose;
} DdrClarabelSettings;

typedef struct {
  double* x; /* n entries, filled by the solver */
  double objective;
  uint32_t iterations;
  char status_text[32];
} DdrClarabelResult;

int32_t ddr_clarabel_solve(const DdrClarabelProblem* problem,
                           const DdrClarabelSettings* settings, DdrClarabelResult* result);

#ifdef __cplusplus
}
#endif
