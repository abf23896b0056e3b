"""Independent high-precision references, built on mpmath only."""

import mpmath as mp


def zeta_em(t, dps=30):
    """zeta(1/2 + it) by Euler-Maclaurin summation, written out directly."""
    with mp.workdps(dps):
        s = mp.mpc(0.5, t)
        N = int(t / 2) + 40
        total = mp.fsum(mp.power(n, -s) for n in range(1, N))
        total += mp.power(N, 1 - s) / (s - 1) + mp.power(N, -s) / 2
        rising = s
        term_pow = mp.power(N, -s - 1)
        for j in range(1, 30):
            total += mp.bernoulli(2 * j) / mp.factorial(2 * j) * rising * term_pow
            rising *= (s + 2 * j - 1) * (s + 2 * j)
            term_pow /= N * N
        return total


def abs_zeta_em(t):
    return float(abs(zeta_em(t)))


def theta_loggamma(t, dps=30):
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi."""
    with mp.workdps(dps):
        return float(mp.im(mp.loggamma(mp.mpc(0.25, t / 2))) - t / 2 * mp.log(mp.pi))


def hardy_z_ref(t):
    return float(mp.siegelz(t))


def integral(f, a, b, pieces=64, dps=20):
    """mpmath quadrature of f over [a, b], split into equal pieces."""
    with mp.workdps(dps):
        pts = mp.linspace(a, b, pieces + 1)
        return float(mp.quad(f, pts))
