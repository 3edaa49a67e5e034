#ifndef RYDBERG_RK_H
#define RYDBERG_RK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RkComponent {
  RK_COMPONENT_X = 0,
  RK_COMPONENT_Z = 1,
} RkComponent;

typedef enum RkLattice {
  RK_LATTICE_CHAIN = 0,
  RK_LATTICE_PERIODIC_LADDER = 1,
  RK_LATTICE_OPEN_SQUARE = 2,
} RkLattice;

typedef enum RkStatus {
  RK_STATUS_OK = 0,
  RK_STATUS_NULL_POINTER = 1,
  RK_STATUS_INVALID_ARGUMENT = 2,
  RK_STATUS_INVALID_LATTICE = 3,
  RK_STATUS_GEOMETRY = 4,
  RK_STATUS_DIMENSION = 5,
  RK_STATUS_NO_CONVERGENCE = 6,
  RK_STATUS_BUFFER_TOO_SMALL = 7,
  RK_STATUS_PANIC = 8,
  RK_STATUS_INTERNAL = 9,
} RkStatus;

// Opaque sector or full basis of dual spins.
typedef struct RkBasis RkBasis;

// Opaque sparse Hermitian operator.
typedef struct RkOperator RkOperator;

// Blockade geometry of a pair array, energies in units of `C6 / a_x^6`.
typedef struct RkGeometry {
  double eta;
  double theta;
  double d_y;
  double a_y;
  double gap;
  double lambda;
} RkGeometry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *rk_version(void);

// Copies the last error message of this thread into `buf` (NUL
// terminated, truncated to `len`). Returns the full message length
// without the terminator, or 0 when there is no error.
//
// # Safety
// `buf` must be NULL or point to `len` writable bytes.
size_t rk_last_error(char *buf, size_t len);

// Solves the ladder blockade geometry for pair length `eta`.
//
// # Safety
// `out` must be NULL or point to a writable `RkGeometry`.
enum RkStatus rk_solve_ladder_geometry(double eta, double c6, struct RkGeometry *out);

// Solves the square-lattice blockade geometry.
//
// # Safety
// `out` must be NULL or point to a writable `RkGeometry`.
enum RkStatus rk_solve_square_geometry(double eta,
                                       double theta,
                                       double d_y,
                                       double c6,
                                       struct RkGeometry *out);

// Enumerates the dual-spin sector reachable from the all-up state.
//
// # Safety
// `out` must be NULL or point to writable storage for a handle.
enum RkStatus rk_basis_sector(enum RkLattice kind, size_t nx, size_t ny, struct RkBasis **out);

// All `2^N` dual configurations.
//
// # Safety
// `out` must be NULL or point to writable storage for a handle.
enum RkStatus rk_basis_full(enum RkLattice kind, size_t nx, size_t ny, struct RkBasis **out);

// Number of basis states, 0 for NULL.
//
// # Safety
// `basis` must be NULL or a live handle.
size_t rk_basis_dim(const struct RkBasis *basis);

// Copies the configurations (bit `p` set = spin `p` up) into `buf`.
//
// # Safety
// `basis` must be a live handle; `buf` must point to `len` writable u64.
enum RkStatus rk_basis_states(const struct RkBasis *basis, uint64_t *buf, size_t len);

// # Safety
// `basis` must be NULL or a handle not yet freed.
void rk_basis_free(struct RkBasis *basis);

// Dual RK Hamiltonian with coupling `j` and RK parameter `lambda`.
//
// # Safety
// `basis` must be a live handle; `out` must point to handle storage.
enum RkStatus rk_operator_dual_rk(const struct RkBasis *basis,
                                  double j,
                                  double lambda,
                                  struct RkOperator **out);

// Rydberg RK Hamiltonian with flip amplitude `j` and potential `big_lambda`.
//
// # Safety
// `basis` must be a live handle; `out` must point to handle storage.
enum RkStatus rk_operator_rydberg_rk(const struct RkBasis *basis,
                                     double j,
                                     double big_lambda,
                                     struct RkOperator **out);

// New operator `op + delta Σ_p S^z_p`.
//
// # Safety
// `op` and `basis` must be live handles; `out` must point to handle storage.
enum RkStatus rk_operator_add_detuning(const struct RkOperator *op,
                                       const struct RkBasis *basis,
                                       double delta,
                                       struct RkOperator **out);

// Matrix dimension, 0 for NULL.
//
// # Safety
// `op` must be NULL or a live handle.
size_t rk_operator_dim(const struct RkOperator *op);

// Stored nonzeros, 0 for NULL.
//
// # Safety
// `op` must be NULL or a live handle.
size_t rk_operator_nnz(const struct RkOperator *op);

// `y = H x` for vectors of length `len` (the operator dimension).
//
// # Safety
// `x` must point to `len` readable and `y` to `len` writable doubles that do
// not overlap.
enum RkStatus rk_operator_apply(const struct RkOperator *op,
                                const double *x,
                                double *y,
                                size_t len);

// # Safety
// `op` must be NULL or a handle not yet freed.
void rk_operator_free(struct RkOperator *op);

// Lowest eigenpair by restarted Lanczos. `tol <= 0` and `max_iter == 0`
// select the defaults. The vector is written when `vector` is not NULL,
// in which case `len` must equal the operator dimension.
//
// # Safety
// `op` must be a live handle; `energy` must be writable; `vector` must be
// NULL or point to `len` writable doubles.
enum RkStatus rk_ground_state(const struct RkOperator *op,
                              double tol,
                              size_t max_iter,
                              uint64_t seed,
                              double *energy,
                              double *vector,
                              size_t len);

// Structure factor `S_k[mu]` of the real state `v` at `k = (kx, ky)`.
//
// # Safety
// `basis` must be a live handle, `v` must point to `len` readable doubles
// and `out` must be writable.
enum RkStatus rk_structure_factor(const struct RkBasis *basis,
                                  const double *v,
                                  size_t len,
                                  enum RkComponent mu,
                                  double kx,
                                  double ky,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RYDBERG_RK_H */
