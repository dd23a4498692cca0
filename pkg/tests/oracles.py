"""High-precision reference implementations used as test oracles.

Everything here is written straight from the closed-form definitions with
mpmath at 50 digits, deliberately without the log-domain rearrangements
used by the library.
"""

import mpmath as mp

mp.mp.dps = 50


def sinc(t):
    t = mp.mpf(t)
    return mp.mpf(1) if t == 0 else mp.sin(mp.pi * t) / (mp.pi * t)


def kernel_inside(n, x, window, nodes):
    """Closed form for an index inside the window (needs h_n != 0 or x off-lattice)."""
    x = mp.mpf(x)
    pos = {int(j): mp.mpf(t) for j, t in zip(window, nodes)}
    tn = pos[n]
    if tn == n:
        # limit of (n - t_n) / sin(pi t_n) as t_n -> n
        pre = (-1) ** (n + 1) / mp.pi * mp.sin(mp.pi * x) / (n - x)
    else:
        pre = (n - tn) * mp.sin(mp.pi * x) / ((n - x) * mp.sin(mp.pi * tn))
    prod = mp.mpf(1)
    for j, tj in pos.items():
        if j != n:
            prod *= (tj - x) * (j - tn) / ((tj - tn) * (j - x))
    return pre * prod


def kernel_outside(n, x, window, nodes):
    """Closed form for an index outside the window, sign included."""
    x = mp.mpf(x)
    prod = mp.mpf(1)
    for j, tj in zip(window, nodes):
        j, tj = int(j), mp.mpf(tj)
        prod *= (tj - x) * (j - n) / ((tj - n) * (j - x))
    return (-1) ** n * mp.sin(mp.pi * x) / (mp.pi * (x - n)) * prod


def c1(N, M, p):
    N, M, p = mp.mpf(N), mp.mpf(M), mp.mpf(p)
    inner = (
        2 ** (2 * M) * (M + mp.mpf(1) / 2) * (1 + 2 * M) ** (1 - 2 * M) / (1 - M) ** M
        * (2 * N + 1) ** (2 * N + 1) / (2 * N + 1 - M) ** (2 * N + 1 - M)
        * (N - mp.mpf(1) / 2) * ((N + M) ** (N + M) / N ** N) ** 2
        / ((N - M - mp.mpf(1) / 2) * N)
    )
    return 2 * inner ** p * (1 + N / (p - 1))


def c3(N, M):
    N, M = mp.mpf(N), mp.mpf(M)
    head = 2 ** (2 * M) * (1 - M) ** (2 * M) / (
        sinc(M) * (1 + 2 * M) ** (2 * M - 1) * (1 - 2 * M) ** (4 * M))
    a = N - 1 - 2 * M
    return head * ((a + M) ** (a + M) / a ** a) ** 2 * ((N + M) ** (N + M) / N ** N) ** 2


def c4(N, p):
    N, p = mp.mpf(N), mp.mpf(p)
    return (2 ** (p - 1) * (2 * p - 1) + p - (N - mp.mpf(1) / 2) ** (1 - p) - (N - 1) ** (1 - p)) / (p - 1)


def pp_1d(r, delta, sigma):
    r, delta, sigma = mp.mpf(r), mp.mpf(delta), mp.mpf(sigma)
    return 8 * (mp.exp(r * delta * sigma / 2) - 1) / (r * mp.pi * sigma * delta ** 2)


def k_delta_1d(N, M, delta, q):
    q = mp.mpf(q)
    p = q / (q - 1)
    b = (8 * (mp.exp(q * mp.pi * delta / 2) - 1) / (q * mp.pi ** 2 * mp.mpf(delta) ** 2)) ** (1 / q)
    return b * c1(N, M, p) ** (1 / p)


def zero_jitter_tail(f, x, N, cutoff=100_000):
    """``sum_{|n - x| > N, |n| <= cutoff} f(n) sinc(x - n)`` in double precision."""
    import math

    import numpy as np

    n = np.arange(-cutoff, cutoff + 1, dtype=float)
    n = n[np.abs(x - n) > N]
    return math.fsum(f(n) * np.sinc(x - n))
