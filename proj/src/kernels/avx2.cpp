// Compiled with -mavx2 -mfma -ffp-contract=off; only reached through runtime
// dispatch. Fused operations appear only where written explicitly.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "pfraud/kernels.hpp"

namespace pfraud::kernels::avx2 {

namespace {

// Natural log of 4 positive doubles, after fdlibm's e_log.c: reduce
// x = m * 2^k with m in [sqrt(2)/2, sqrt(2)), then
// log(m) = f - s (f - R), s = f / (2 + f), with R a degree-14 odd minimax fit.
// Matches std::log to about 1 ulp for positive normal inputs; +inf and NaN
// lanes pass through unchanged.
inline __m256d log_pd(__m256d x) {
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    const __m256d lg1 = _mm256_set1_pd(6.666666666666735130e-01);
    const __m256d lg2 = _mm256_set1_pd(3.999999999940941908e-01);
    const __m256d lg3 = _mm256_set1_pd(2.857142874366239149e-01);
    const __m256d lg4 = _mm256_set1_pd(2.222219843214978396e-01);
    const __m256d lg5 = _mm256_set1_pd(1.818357216161805012e-01);
    const __m256d lg6 = _mm256_set1_pd(1.531383769920937332e-01);
    const __m256d lg7 = _mm256_set1_pd(1.479819860511658591e-01);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d sqrt2 = _mm256_set1_pd(1.41421356237309504880);

    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
    const __m256i one_bits = _mm256_set1_epi64x(0x3ff0000000000000LL);

    // Biased exponent as a double via the 2^52 magic-number trick.
    const __m256i exp_field = _mm256_srli_epi64(bits, 52);
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
    __m256d k = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_field, magic)),
                              _mm256_set1_pd(4503599627370496.0 + 1023.0));

    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
    const __m256d big = _mm256_cmp_pd(m, sqrt2, _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, half), big);
    k = _mm256_add_pd(k, _mm256_and_pd(big, one));

    const __m256d f = _mm256_sub_pd(m, one);
    const __m256d s = _mm256_div_pd(f, _mm256_add_pd(two, f));
    const __m256d z = _mm256_mul_pd(s, s);
    const __m256d w = _mm256_mul_pd(z, z);
    const __m256d t1 = _mm256_mul_pd(w, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, lg6, lg4), lg2));
    const __m256d t2 =
        _mm256_mul_pd(z, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, lg7, lg5), lg3), lg1));
    const __m256d r = _mm256_add_pd(t2, t1);
    const __m256d hfsq = _mm256_mul_pd(half, _mm256_mul_pd(f, f));
    // k*ln2_hi - ((hfsq - (s*(hfsq+R) + k*ln2_lo)) - f)
    const __m256d inner = _mm256_fmadd_pd(s, _mm256_add_pd(hfsq, r), _mm256_mul_pd(k, ln2_lo));
    __m256d result = _mm256_fmsub_pd(k, ln2_hi, _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f));

    const __m256d inf = _mm256_set1_pd(HUGE_VAL);
    const __m256d special = _mm256_or_pd(_mm256_cmp_pd(x, inf, _CMP_EQ_OQ), _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
    return _mm256_blendv_pd(result, x, special);
}

inline __m256d horner(__m256d t, __m256d a, __m256d b, __m256d c) {
    return _mm256_fmadd_pd(t, _mm256_fmadd_pd(t, c, b), a);
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

void evaluate(Poly p, std::span<const double> t, std::span<double> out) {
    const __m256d a = _mm256_set1_pd(p.a), b = _mm256_set1_pd(p.b), c = _mm256_set1_pd(p.c);
    std::size_t i = 0;
    for (; i + 4 <= t.size(); i += 4)
        _mm256_storeu_pd(out.data() + i, horner(_mm256_loadu_pd(t.data() + i), a, b, c));
    for (; i < t.size(); ++i) out[i] = std::fma(t[i], std::fma(t[i], p.c, p.b), p.a);
}

double sum_log_intensity(Poly p, std::span<const double> t, double floor) {
    const __m256d a = _mm256_set1_pd(p.a), b = _mm256_set1_pd(p.b), c = _mm256_set1_pd(p.c);
    const __m256d lo = _mm256_set1_pd(floor);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= t.size(); i += 8) {
        __m256d l0 = horner(_mm256_loadu_pd(t.data() + i), a, b, c);
        __m256d l1 = horner(_mm256_loadu_pd(t.data() + i + 4), a, b, c);
        // max(NaN, floor) would hide NaN; put the value in the second slot so NaN propagates.
        acc0 = _mm256_add_pd(acc0, log_pd(_mm256_max_pd(lo, l0)));
        acc1 = _mm256_add_pd(acc1, log_pd(_mm256_max_pd(lo, l1)));
    }
    for (; i + 4 <= t.size(); i += 4) {
        __m256d l0 = horner(_mm256_loadu_pd(t.data() + i), a, b, c);
        acc0 = _mm256_add_pd(acc0, log_pd(_mm256_max_pd(lo, l0)));
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < t.size(); ++i) {
        double v = std::fma(t[i], std::fma(t[i], p.c, p.b), p.a);
        sum += std::log(std::max(v, floor));
    }
    return sum;
}

void compensator_increments(Poly p, std::span<const double> from, std::span<const double> to,
                            std::span<double> out) {
    const __m256d a = _mm256_set1_pd(p.a);
    const __m256d half_b = _mm256_set1_pd(0.5 * p.b);
    const __m256d third_c = _mm256_set1_pd(p.c / 3.0);
    std::size_t i = 0;
    for (; i + 4 <= from.size(); i += 4) {
        const __m256d s = _mm256_loadu_pd(from.data() + i);
        const __m256d e = _mm256_loadu_pd(to.data() + i);
        const __m256d quad = _mm256_fmadd_pd(e, _mm256_add_pd(e, s), _mm256_mul_pd(s, s));
        const __m256d mean_rate = _mm256_fmadd_pd(third_c, quad, _mm256_fmadd_pd(half_b, _mm256_add_pd(e, s), a));
        _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(_mm256_sub_pd(e, s), mean_rate));
    }
    for (; i < from.size(); ++i) {
        const double s = from[i], e = to[i];
        const double quad = std::fma(e, e + s, s * s);
        out[i] = (e - s) * std::fma(p.c / 3.0, quad, std::fma(0.5 * p.b, e + s, p.a));
    }
}

void feasible_mask(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                   double inv_horizon, double tol, std::span<std::uint8_t> mask) {
    const __m256d neg_tol = _mm256_set1_pd(-tol);
    const __m256d inv_h = _mm256_set1_pd(inv_horizon);
    std::size_t i = 0;
    for (; i + 4 <= a.size(); i += 4) {
        const __m256d va = _mm256_loadu_pd(a.data() + i);
        const __m256d vb = _mm256_loadu_pd(b.data() + i);
        const __m256d vc = _mm256_loadu_pd(c.data() + i);
        // Separate multiply and add so boundary points classify exactly as in the scalar kernel.
        const __m256d slope = _mm256_add_pd(vb, _mm256_mul_pd(va, inv_h));
        __m256d ok = _mm256_and_pd(_mm256_cmp_pd(va, neg_tol, _CMP_GE_OQ), _mm256_cmp_pd(vc, neg_tol, _CMP_GE_OQ));
        ok = _mm256_and_pd(ok, _mm256_cmp_pd(slope, neg_tol, _CMP_GE_OQ));
        const int bits = _mm256_movemask_pd(ok);
        for (int lane = 0; lane < 4; ++lane) mask[i + lane] = static_cast<std::uint8_t>((bits >> lane) & 1);
    }
    for (; i < a.size(); ++i) {
        const bool ok = a[i] >= -tol && c[i] >= -tol && b[i] + a[i] * inv_horizon >= -tol;
        mask[i] = ok ? 1 : 0;
    }
}

}  // namespace pfraud::kernels::avx2
