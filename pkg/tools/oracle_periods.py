"""Independent oracle for hF+ via numerical quadrature of the period integrals.

hF+ = (1/2) log(2 pi^2 / A), A the covolume of the period lattice of dx/(2y + a1 x + a3)
on a globally minimal model. Uses only mpmath quadrature (no AGM, no q-series).
Run: python3 tools/oracle_periods.py
"""

import mpmath
from mpmath import mp, mpf


def b_invariants(a1, a2, a3, a4, a6):
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    return b2, b4, b6


def covolume(ainvs):
    b2, b4, b6 = b_invariants(*ainvs)
    roots = mpmath.polyroots([4, b2, 2 * b4, b6], maxsteps=200, extraprec=400)
    tiny = mpf(10) ** (-mp.dps // 2)
    real = sorted(mpmath.re(r) for r in roots if abs(mpmath.im(r)) < tiny)
    if len(real) == 3:
        # f = 4(x - e1)(x - e2)(x - e3) with e1 > e2 > e3; rectangular lattice
        e3, e2, e1 = real
        # x = e1 + t^2 on [e1, oo)
        w1 = 2 * mpmath.quad(lambda t: 1 / mpmath.sqrt((t * t + e1 - e2) * (t * t + e1 - e3)),
                             [0, 1, mpmath.inf])
        # x = e2 + (e1 - e2) sin^2 s on [e2, e1], where f < 0
        w2 = 2 * mpmath.quad(lambda s: 1 / mpmath.sqrt(e2 - e3 + (e1 - e2) * mpmath.sin(s) ** 2),
                             [0, mpmath.pi / 2])
        return w1 * w2
    e1 = real[0]
    e2 = next(r for r in roots if mpmath.im(r) > tiny)
    # f(e1 + t^2) = 4 t^2 |t^2 + e1 - e2|^2, f(e1 - t^2) = -4 t^2 |e1 - t^2 - e2|^2
    w1 = 2 * mpmath.quad(lambda t: 1 / abs(t * t + e1 - e2), [0, 1, mpmath.inf])
    w2 = 2 * mpmath.quad(lambda t: 1 / abs(e1 - t * t - e2), [0, 1, mpmath.inf])
    # basis w1, (w1 + i w2) / 2
    return w1 * w2 / 2


def hF_plus(ainvs):
    return mpmath.log(2 * mp.pi ** 2 / covolume([mpf(a) for a in ainvs])) / 2


CURVES = {
    "32a2": (0, 0, 0, -1, 0),
    "36a1": (0, 0, 0, 0, 1),
    "11a1": (0, -1, 1, -10, -20),
    "37a1": (0, 0, 1, -1, 0),
    "389a1": (0, 1, 1, -2, 0),
    "y2=x3+17": (0, 0, 0, 0, 17),
    "5077a1": (0, 0, 1, -7, 6),
}

if __name__ == "__main__":
    mp.dps = 45
    for label, a in CURVES.items():
        print(label, mpmath.nstr(hF_plus(a), 30))
    eta_i = mpmath.gamma(mpf(1) / 4) / (2 * mp.pi ** (mpf(3) / 4))
    print("closed form x3-x", mpmath.nstr(-2 * mpmath.log(eta_i), 30))
