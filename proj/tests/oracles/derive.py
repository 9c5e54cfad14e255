"""Reference values frozen into the unit tests.

Run with python3 (mpmath, scipy). Each block prints name = value lines that
are pasted into tests/*.cpp.
"""
import mpmath as mp
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

mp.mp.dps = 40


def show(name, v):
    print(f"{name} = {mp.nstr(mp.mpf(v), 17)}")


# comparison functions
show("a(1, 0.5)", mp.cot(0.5))
show("a(-4, 0.3)", 2 * mp.coth(0.6))
show("a(0, 0.7)", 1 / mp.mpf("0.7"))
show("b(1, 1)", mp.sin(1))
show("b(-4, 0.3)", mp.sinh(0.6) / 2)

# gaussian-like solution
def gl(n, k, t, r2):
    k, t = mp.mpf(k), mp.mpf(t)
    e = mp.e ** (2 * t * k)
    return (2 * mp.pi * (e - 1) / (k * e)) ** (-mp.mpf(n) / 2) * mp.e ** (-k * r2 / (2 * (e - 1)))

show("gl(1, 1, 0.5, 0.3)", gl(1, 1, "0.5", mp.mpf("0.3") ** 2))
show("gl(2, 0.5, 1.2, (0.4,-0.7))", gl(2, "0.5", "1.2", mp.mpf("0.4") ** 2 + mp.mpf("0.7") ** 2))
show("heat(1, 0.5, 0.3)", (4 * mp.pi * mp.mpf("0.5")) ** -0.5 * mp.e ** (-mp.mpf("0.09") / 2))
show("quadratic_cost(2, 1, 1, (1, 0.5))", mp.mpf("1.25") * mp.coth(1) / 2 - 2)
show("quadratic_cost(1, 0.5, 2, 1.5)", mp.mpf("0.5") * mp.mpf("2.25") * mp.coth(1) / 2 - 1)

# Barenblatt m = 2, n = 1, C = 1: alpha = beta = 1/3, kappa = 1/12
show("barenblatt(2, 0.5)", mp.mpf(2) ** (-mp.mpf(1) / 3) * (1 - mp.mpf(1) / 12 * mp.mpf("0.25") * mp.mpf(2) ** (-mp.mpf(2) / 3)))
show("barenblatt mass", mp.quad(lambda x: max(1 - x * x / 12, 0), [-mp.sqrt(12), mp.sqrt(12)]))

# Cost for L = v^2/2 + V, V = U'' + U'^2/2, U = 0.3 exp(-(x-0.5)^2/2), from 0 at s=0 to y at t=1,
# by shooting on the Euler-Lagrange equation x'' = V'(x).
A, c = 0.3, 0.5


def U1(x):
    return A * mp.e ** (-(x - c) ** 2 / 2)


def V(x):
    return mp.diff(U1, x, 2) + mp.diff(U1, x) ** 2 / 2


def dV(x):
    return mp.diff(V, x)


Vf = lambda x: float(V(mp.mpf(x)))
dVf = lambda x: float(dV(mp.mpf(x)))


def shoot(v0):
    sol = solve_ivp(lambda s, z: [z[1], dVf(z[0]), z[1] ** 2 / 2 + Vf(z[0])], (0, 1), [0.0, v0, 0.0],
                    rtol=1e-12, atol=1e-13, method="DOP853")
    return sol.y[0, -1], sol.y[2, -1]


for y in (-1.0, 0.7, 1.5):
    v0 = brentq(lambda v: shoot(v)[0] - y, y - 3, y + 3, xtol=1e-14)
    show(f"bump cost y={y}", shoot(v0)[1])
