"""Independent reference for the seeded vector generators and degree grouping.

Prints the values frozen into tests/unit/test_embedding.cpp and
tests/unit/test_das3.cpp. Uses exact rationals where the C++ side relies on
exact dyadic arithmetic, and mpmath for the Zipf CDF.
"""
import itertools
import math
from fractions import Fraction

import mpmath

M64 = (1 << 64) - 1


def mix64(z):
    z = (z + 0x9E3779B97F4A7C15) & M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def derive_seed(stream, label, component, salt):
    h = mix64(salt ^ stream)
    h = mix64(h ^ label)
    return mix64(h ^ component)


def unit24(bits):
    return Fraction((bits >> 40) + 1, 1 << 24)


def zipf_cdf(s, n):
    mpmath.mp.prec = 200
    w = [mpmath.mpf(r) ** (-s) for r in range(1, n + 1)]
    total = mpmath.fsum(w)
    acc, out = mpmath.mpf(0), [0.0]
    for r in range(1, n + 1):
        acc += w[r - 1]
        out.append(float(acc / total))
    out[n] = 1.0
    return out


def zipf_value(seed, s=1.2, n=1024):
    cdf = zipf_cdf(s, n)
    u = ((seed >> 11) + 1) * 2.0 ** -53
    rank = next(r for r in range(1, n + 1) if cdf[r] >= u)
    v = Fraction(rank, n)
    return Fraction(math.ceil(v * (1 << 24)), 1 << 24)


def spur(label, d, mode, salt=0):
    if mode == "cost":
        return [zipf_value(derive_seed(3, label, j, salt)) for j in range(d)]
    return [unit24(derive_seed(1, label, j, salt)) for j in range(d)]


def base(label, d, salt=0):
    raw = [float(unit24(derive_seed(2, label, j, salt))) for j in range(2 * d)]
    total = 0.0
    for r in raw:
        total += r
    return [r / total for r in raw]


def embed(x, y, z, alpha, beta):
    cat = [float(v) for v in x + y]
    return [alpha * c + beta * zz for c, zz in zip(cat, z)]


def best_groups(degrees, m):
    """Exhaustive: every contiguous split of the distinct degrees."""
    freq = {}
    for d in degrees:
        if d > 0:
            freq[d] = freq.get(d, 0) + 1
    vals = sorted(freq)
    r = min(m, len(vals))
    if r <= 1:
        return [0, "inf"]
    best = None
    for cuts in itertools.combinations(range(len(vals) - 1), r - 1):
        bounds = [vals[c] for c in cuts]
        masses, lo = [], 0
        for c in list(cuts) + [len(vals) - 1]:
            masses.append(sum(freq[v] for v in vals[lo:c + 1]))
            lo = c + 1
        cost = sum(x * x for x in masses)
        cand = (cost, bounds)
        if best is None or cand < best:
            best = cand
    return [0] + best[1] + ["inf"]


if __name__ == "__main__":
    for mode in ("uniform", "cost"):
        x = spur(7, 2, mode)
        print(mode, "spur(7) =", [float(v).hex() for v in x], [float(v) for v in x])
    z = base(7, 2)
    print("base(7) =", [v.hex() for v in z])
    # vertex labeled 7 with neighbors labeled 3 and 5, BaseOptimized defaults
    x = spur(7, 2, "uniform")
    y = [a + b for a, b in zip(spur(3, 2, "uniform"), spur(5, 2, "uniform"))]
    print("embed base-mode =", [v.hex() for v in embed(x, y, z, 0.01, 10.0)])
    x = spur(7, 2, "cost")
    y = [a + b for a, b in zip(spur(3, 2, "cost"), spur(5, 2, "cost"))]
    print("embed cost-mode =", [v.hex() for v in embed(x, y, z, 0.01, 10.0)])
    print("groups {1,1,1,2,2,3} m=3:", best_groups([1, 1, 1, 2, 2, 3], 3))
    print("groups {1,2,2,3,3,3,4,9} m=3:", best_groups([1, 2, 2, 3, 3, 3, 4, 9], 3))
    print("groups {5,5,5,5,1,2} m=2:", best_groups([5, 5, 5, 5, 1, 2], 2))
    print("groups {1..10 each once,10,10} m=4:", best_groups(list(range(1, 11)) + [10, 10], 4))
