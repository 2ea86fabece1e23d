"""Random samplers and small oracles shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

from flint import fmpz_poly

from nkit.algebraic import alg_add, alg_mul, irreducible_factors, rational, root_of
from nkit.chow import CurveComponent, PointComponent, ProjectiveCycle
from nkit.errors import DomainError
from nkit.heights import ProjectiveTuple


def rand_algebraic(rng: random.Random, max_deg: int = 6, coeff: int = 5):
    """A random root of a random irreducible factor of a small integer polynomial."""
    while True:
        d = rng.randint(1, max_deg)
        c = [rng.randint(-coeff, coeff) for _ in range(d)] + [rng.randint(1, 4)]
        facs = [g for g in irreducible_factors(fmpz_poly(c)) if g.degree() >= 1]
        if not facs:
            continue
        g = rng.choice(facs)
        return root_of([int(x) for x in g.coeffs()], rng.randrange(g.degree()))


def rand_point(rng: random.Random, n: int, max_deg: int):
    """A point of P^n whose coordinates are small expressions in one algebraic theta."""
    theta = rand_algebraic(rng, max_deg=max_deg, coeff=3)
    pool = [rational(q) for q in (0, 1, -1, 2, -2, 3, Fraction(1, 2))]
    pool += [theta, alg_add(theta, rational(1)), alg_mul(theta, rational(2)), alg_mul(theta, theta)]
    while True:
        coords = [rng.choice(pool) for _ in range(n + 1)]
        if any(not c.is_zero() for c in coords):
            return ProjectiveTuple(coords)


def rand_zero_cycle(rng: random.Random, max_total: int = 6):
    n = rng.randint(1, 3)
    comps = []
    budget = max_total
    seen = set()
    while budget > 0 and len(comps) < 3:
        P = rand_point(rng, n, min(budget, 3))
        comp = PointComponent(P)
        deg = comp.degree
        if deg > budget or comp.key() in seen:
            if comps:
                break
            continue
        seen.add(comp.key())
        m = rng.randint(1, budget // deg)
        comps.append((m, comp))
        budget -= m * deg
        if rng.random() < 0.4:
            break
    return ProjectiveCycle.of(n, comps)


def ternary_monomials(deg: int):
    return [(a, b, deg - a - b) for a in range(deg, -1, -1) for b in range(deg - a, -1, -1)]


def rand_curve(rng: random.Random, max_deg: int = 3, coeff: int = 3) -> CurveComponent:
    while True:
        deg = rng.randint(1, max_deg)
        poly = {}
        for e in ternary_monomials(deg):
            if rng.random() < 0.6:
                c = rng.randint(-coeff, coeff)
                if c:
                    poly[e] = c
        if not poly:
            continue
        try:
            return CurveComponent.of(poly)
        except DomainError:
            continue


def rational_roots_exist(c) -> bool:
    """Rational root test for an integer polynomial (coefficients lowest first)."""
    c = list(c)
    if c[0] == 0:
        return True
    a0, an = abs(c[0]), abs(c[-1])
    divs = lambda m: [k for k in range(1, m + 1) if m % k == 0]
    for p in divs(a0):
        for q in divs(an):
            for s in (1, -1):
                if sum(ci * Fraction(s * p, q) ** i for i, ci in enumerate(c)) == 0:
                    return True
    return False


def has_quadratic_factor(c, bound: int = 200) -> bool:
    """Exhaustive search for (a x^2 + b x + k)(d x^2 + e x + f) = quartic c."""
    c = list(c)
    lead, const = c[4], c[0]
    divs = lambda m: [k for k in range(1, abs(m) + 1) if m % k == 0]
    for a in divs(lead):
        dd = lead // a
        for k0 in divs(const):
            for sk in (1, -1):
                k = sk * k0
                f = const // k
                for b in range(-bound, bound + 1):
                    num = c[3] - b * dd
                    if num % a:
                        continue
                    e = num // a
                    if (a * f + b * e + k * dd == c[2]) and (b * f + k * e == c[1]):
                        return True
    return False


def brute_irreducible(c) -> bool:
    """Irreducibility over Q of a primitive integer polynomial of degree <= 4."""
    c = list(c)
    deg = len(c) - 1
    if deg <= 1:
        return True
    if rational_roots_exist(c):
        return False
    if deg == 4:
        return not has_quadratic_factor(c)
    return True
