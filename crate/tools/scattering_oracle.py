"""Independent reference values for T(xi), R(xi) of V(x) = 2/(1+x^2).

Shoots the outgoing solution from x0 with scipy's DOP853, starting from the
exact outgoing solution of 2/x^2, and reads T, R off the value at the origin
(V is even). R is cross-checked by decomposing the solution at -x0.
Output is pasted into crates/scatlab/tests/oracle_scattering.rs.
"""
import numpy as np
from scipy.integrate import solve_ivp

V = lambda x: 2 / (1 + x * x)
h = lambda u: np.exp(1j * u) * (1 + 1j / u)
hp = lambda u: np.exp(1j * u) * (1j * (1 + 1j / u) - 1j / u**2)


def shoot(xi, x0, x1):
    rhs = lambda x, y: [y[1], (V(x) - xi * xi) * y[0]]
    s = solve_ivp(rhs, [x0, x1], [h(x0 * xi) + 0j, xi * hp(x0 * xi) + 0j],
                  method="DOP853", rtol=1e-13, atol=1e-16)
    return s.y[0, -1], s.y[1, -1]


for xi in [0.05, 0.2, 1.0, 3.0, 8.0]:
    x0 = 4000.0
    f, fp = shoot(xi, x0, 0.0)
    w = -2 * f * fp
    t = -2j * xi / w
    r = -0.5 * (np.conj(fp) / fp + np.conj(f) / f)
    # at -x0: f = a conj(q) + b q with q(x) = h(-x xi)
    g, gp = shoot(xi, x0, -x0)
    u = x0 * xi
    q, qp = h(u), -xi * hp(u)
    wr = lambda a, ap, b, bp: a * bp - ap * b
    a = wr(g, gp, q, qp) / wr(np.conj(q), np.conj(qp), q, qp)
    b = wr(np.conj(q), np.conj(qp), g, gp) / wr(np.conj(q), np.conj(qp), q, qp)
    print(f"({xi!r}, [{t.real:.12e}, {t.imag:.12e}], [{r.real:.12e}, {r.imag:.12e}]),"
          f"  // |1/a - t| = {abs(1/a - t):.1e}, |b/a - r| = {abs(b/a - r):.1e}")
