# Independent reference values for the frozen constants in the test suite.
# Run with: python3 reference_values.py   (requires mpmath)
from mpmath import mp, mpf, gamma, sqrt, pi, hyp2f1, legenp, legenq, quad, cos

mp.dps = 30


def ferrers_p(nu, mu, x):
    # direct summation of the defining hypergeometric series
    w = (1 - x) / 2
    s, term, k = mpf(0), mpf(1), 0
    a, b, c = -nu, nu + 1, 1 - mu
    while abs(term) > mpf(10) ** -40 or k < 5:
        s += term
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * w
        k += 1
    return ((1 + x) / (1 - x)) ** (mu / 2) / gamma(1 - mu) * s


def ferrers_q(nu, mu, x):
    return pi / (2 * mp.sin(pi * mu)) * (
        mp.cos(pi * mu) * ferrers_p(nu, mu, x)
        - gamma(nu + mu + 1) / gamma(nu - mu + 1) * ferrers_p(nu, -mu, x)
    )


def offcut_q_pr(nu, mu, z):
    # e^{-i pi mu} Q(z) for real z > 1
    return (gamma(nu + mu + 1) * sqrt(pi) * ((z - 1) * (z + 1)) ** (mu / 2)
            / (2 ** (nu + 1) * z ** (nu + mu + 1))
            * hyp2f1((nu + mu + 2) / 2, (nu + mu + 1) / 2, nu + mpf(3) / 2, 1 / z ** 2)
            / gamma(nu + mpf(3) / 2))


def gegenbauer(n, lam, t):
    # explicit three-term recurrence in extended precision
    c0, c1 = mpf(1), 2 * lam * t
    if n == 0:
        return c0
    for k in range(2, n + 1):
        c0, c1 = c1, (2 * t * (k + lam - 1) * c1 - (k + 2 * lam - 2) * c0) / k
    return c1


def g_factor(n, lam):
    return (n + lam) * gamma(n + 2 * lam) / (mp.factorial(n) * gamma(lam + 1))


def main():
    print("P(1.3,-0.7,0.4) =", mp.nstr(ferrers_p(mpf('1.3'), mpf('-0.7'), mpf('0.4')), 20))
    print("  mpmath legenp  =", mp.nstr(legenp(mpf('1.3'), mpf('-0.7'), mpf('0.4'), type=2), 20))
    print("Q(1.3,0.4,0.4)  =", mp.nstr(ferrers_q(mpf('1.3'), mpf('0.4'), mpf('0.4')), 20))
    print("  mpmath legenq  =", mp.nstr(legenq(mpf('1.3'), mpf('0.4'), mpf('0.4'), type=2), 20))
    print("P(1.3,0.4,0.4)  =", mp.nstr(ferrers_p(mpf('1.3'), mpf('0.4'), mpf('0.4')), 20))

    nu, mu, z = mpf('1.5'), mpf('0.25'), mpf('1.5')
    print("Qpr(1.5,0.25,1.5) series =", mp.nstr(offcut_q_pr(nu, mu, z), 20))
    print("  mpmath type3 * e^{-i pi mu} =",
          mp.nstr(legenq(nu, mu, z, type=3) * mp.exp(-1j * pi * mu), 20))
    # inversion of the off-cut integral: n=1, lam=1, kappa = mu + lam
    n, lam = 1, mpf(1)
    kap = mu + lam
    lhs = (n + lam) / lam * quad(lambda t: (1 - t * t) ** (lam - mpf(1) / 2)
                                 * gegenbauer(n, lam, t) / (z - t) ** (kap + mpf(1) / 2), [-1, 1])
    pref = sqrt(pi) * g_factor(n, lam) * 2 ** (mpf(3) / 2 - lam) / gamma(kap + mpf(1) / 2) \
        * ((z - 1) * (z + 1)) ** ((lam - kap) / 2)
    print("  quadrature inversion (n=1, lam=1) =", mp.nstr(lhs / pref, 20))

    # right-hand integral, n=3 lam=1.25 kappa=-0.3 x=0.2
    n, lam, kap, x = 3, mpf('1.25'), mpf('-0.3'), mpf('0.2')
    lhs = (n + lam) / lam * quad(lambda t: (1 - t * t) ** (lam - mpf(1) / 2) * (t - x) ** (-kap - mpf(1) / 2)
                                 * gegenbauer(n, lam, t), [x, 1])
    rhs = sqrt(pi) * g_factor(n, lam) * gamma(mpf(1) / 2 - kap) / 2 ** (lam - mpf(1) / 2) \
        * (1 - x * x) ** ((lam - kap) / 2) * ferrers_p(n + lam - mpf(1) / 2, kap - lam, x)
    print("right integral (3,1.25,-0.3,0.2): quad =", mp.nstr(lhs, 20), " closed =", mp.nstr(rhs, 20))

    n, lam, kap, x = 2, mpf('0.75'), mpf('0.1'), mpf('-0.3')
    lhs = (n + lam) / lam * quad(lambda t: (1 - t * t) ** (lam - mpf(1) / 2) * (x - t) ** (-kap - mpf(1) / 2)
                                 * gegenbauer(n, lam, t), [-1, x])
    rhs = (-1) ** n * sqrt(pi) * g_factor(n, lam) * gamma(mpf(1) / 2 - kap) / 2 ** (lam - mpf(1) / 2) \
        * (1 - x * x) ** ((lam - kap) / 2) * ferrers_p(n + lam - mpf(1) / 2, kap - lam, -x)
    print("left integral (2,0.75,0.1,-0.3): quad =", mp.nstr(lhs, 20), " closed =", mp.nstr(rhs, 20))

    n, lam, kap, z = 2, mpf(1), mpf('0.25'), mpf('1.5')
    lhs = (n + lam) / lam * quad(lambda t: (1 - t * t) ** (lam - mpf(1) / 2) * (z - t) ** (-kap - mpf(1) / 2)
                                 * gegenbauer(n, lam, t), [-1, 1])
    rhs = sqrt(pi) * g_factor(n, lam) * 2 ** (mpf(3) / 2 - lam) / gamma(kap + mpf(1) / 2) \
        * ((z - 1) * (z + 1)) ** ((lam - kap) / 2) * offcut_q_pr(n + lam - mpf(1) / 2, kap - lam, z)
    print("offcut integral (2,1,0.25,1.5): quad =", mp.nstr(lhs, 20), " closed =", mp.nstr(rhs, 20))

    lam, kap, x, t = mpf('0.75'), mpf(0), mpf('0.2'), mpf('0.6')
    pref = sqrt(pi) * gamma(kap + mpf(1) / 2) / (2 ** (lam + mpf(1) / 2) * gamma(lam + 1)) * (1 - x * x) ** ((kap - lam) / 2)
    print("Q-plus rhs (0.75,0,0.2,0.6) =", mp.nstr(pref * cos(pi * (kap + mpf(1) / 2)) * (t - x) ** (-kap - mpf(1) / 2), 20))
    print("2F1(0.5,0.5,2,0.999) =", mp.nstr(hyp2f1(0.5, 0.5, 2, mpf('0.999')), 20), " 4/pi =", mp.nstr(4 / pi, 20))
    # Wronskian sanity
    nu, mu, x = mpf('1.3'), mpf('0.4'), mpf('0.4')
    P = lambda y: ferrers_p(nu, mu, y)
    Q = lambda y: ferrers_q(nu, mu, y)
    W = P(x) * mp.diff(Q, x) - mp.diff(P, x) * Q(x)
    print("Wronskian check:", mp.nstr(W, 15), mp.nstr(gamma(nu + mu + 1) / gamma(nu - mu + 1) / (1 - x * x), 15))


if __name__ == "__main__":
    main()
