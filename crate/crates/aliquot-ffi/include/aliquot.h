/* C ABI for the aliquot library: elliptic-curve aliquot cycle search,
 * point counting, and conjectural constants.
 *
 * All functions return ALIQUOT_OK (0) on success, a nonzero error code
 * otherwise.  Handles must be released with the matching _free function.
 */
#ifndef ALIQUOT_H
#define ALIQUOT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
    ALIQUOT_OK = 0,
    ALIQUOT_ERR_NULL = 1,          /* required pointer was NULL */
    ALIQUOT_ERR_PARSE = 2,         /* bad curve string or parameter */
    ALIQUOT_ERR_BAD_REDUCTION = 3, /* p divides the discriminant */
    ALIQUOT_ERR_UNSUPPORTED = 4,   /* unsupported cycle length */
    ALIQUOT_ERR_RANGE = 5,         /* index or bound out of range */
    ALIQUOT_ERR_INTERNAL = 6
};

/* Opaque handles. */
typedef struct AliquotCurve AliquotCurve;
typedef struct AliquotCycles AliquotCycles;

/* Parse "[a1,a2,a3,a4,a6]" into a curve handle. */
int aliquot_curve_parse(const char *spec, AliquotCurve **out);
void aliquot_curve_free(AliquotCurve *curve);

/* |E(F_p)| and the Frobenius trace a_p at a good prime p. */
int aliquot_order(const AliquotCurve *curve, uint64_t p, uint64_t *out);
int aliquot_trace(const AliquotCurve *curve, uint64_t p, int64_t *out);

/* Search aliquot cycles (closed != 0) or sequences (closed == 0) of
 * length l with p_1 <= x.  Cycles are normalized (p_1 minimal) and
 * reported sorted by p_1. */
int aliquot_search(const AliquotCurve *curve, uint32_t l, uint64_t x,
                   int closed, AliquotCycles **out);
void aliquot_cycles_free(AliquotCycles *cycles);

/* Accessors for a search result.  aliquot_cycles_get copies row i
 * (l primes, iteration order) into buf. */
uint64_t aliquot_cycles_count(const AliquotCycles *cycles);
uint64_t aliquot_cycles_primes_scanned(const AliquotCycles *cycles);
int aliquot_cycles_get(const AliquotCycles *cycles, uint64_t i, uint64_t *buf);

/* Conjectural constants C_L (cycle flavor) and predictions C * integral. */
int aliquot_constant_full(uint32_t l, double *out);
int aliquot_constant_serre(int64_t delta, uint32_t l, double *out);
int aliquot_predict_serre(int64_t delta, uint32_t l, double x, double *out);

#ifdef __cplusplus
}
#endif

#endif /* ALIQUOT_H */
