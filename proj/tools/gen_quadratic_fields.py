#!/usr/bin/env python3
"""Regenerate data/quadratic_fields.txt (class data for fundamental
discriminants |D| <= 100).

Everything here is exact integer arithmetic, independent of any L-function
evaluation, so the emitted table can serve as a cross-check for the analytic
class number formula:

  - h for D < 0 counts reduced positive definite forms (a, b, c) with
    b^2 - 4ac = D, -a < b <= a <= c, and b >= 0 when a == c.
  - h for D > 0 counts cycles of reduced indefinite forms under the standard
    reduction step, then halves the cycle count when the fundamental unit has
    norm +1 (narrow vs. wide class number).
  - The fundamental unit (t + u*sqrt(D))/2 is the least u >= 1 solution of
    t^2 - D u^2 = -4 or +4 (checked in that order).

Usage: tools/gen_quadratic_fields.py > data/quadratic_fields.txt
"""

import math

LIMIT = 100


def squarefree(n: int) -> bool:
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def is_fundamental(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


def class_number_imaginary(D: int) -> int:
    h = 0
    for a in range(1, math.isqrt(abs(D) // 3) + 1):
        for b in range(-a + 1, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            h += 1
    return h


def reduced_indefinite_forms(D: int):
    """All (a, b, c) with b^2 - 4ac = D, 0 < b < sqrt(D),
    sqrt(D) - b < 2|a| < sqrt(D) + b."""
    forms = set()
    for b in range(1, math.isqrt(D) + 1):
        if (b - D) % 2:
            continue
        m = D - b * b
        if m <= 0 or m % 4:
            continue
        prod = m // 4  # = |a| * |c| with a, c of opposite sign
        for aa in range(1, prod + 1):
            if prod % aa:
                continue
            # sqrt(D) - b < 2*aa  <=>  (2*aa + b)^2 > D  (both sides positive)
            # 2*aa < sqrt(D) + b  <=>  2*aa - b < 0 or (2*aa - b)^2 < D
            if (2 * aa + b) ** 2 <= D:
                continue
            if 2 * aa - b >= 0 and (2 * aa - b) ** 2 >= D:
                continue
            cc = prod // aa
            forms.add((aa, b, -cc))
            forms.add((-aa, b, cc))
    return forms


def rho(form, D):
    """Reduction step on reduced indefinite forms."""
    _, b, c = form
    m2 = 2 * abs(c)
    base = (-b) % m2
    rd = math.isqrt(D)  # floor sqrt, D never a square here
    r = rd - ((rd - base) % m2)
    return (c, r, (r * r - D) // (4 * c))


def narrow_class_number(D: int) -> int:
    forms = reduced_indefinite_forms(D)
    seen = set()
    cycles = 0
    for start in sorted(forms):
        if start in seen:
            continue
        cycles += 1
        f = start
        while f not in seen:
            seen.add(f)
            f = rho(f, D)
            assert f in forms, (D, start, f)
    return cycles


def fundamental_unit(D: int):
    """Least (t, u), u >= 1, with t^2 - D u^2 = -4 or +4; returns
    (t, u, norm)."""
    u = 1
    while True:
        for norm in (-1, 1):
            tt = D * u * u + 4 * norm
            if tt > 0:
                t = math.isqrt(tt)
                if t * t == tt:
                    return t, u, norm
        u += 1


def main():
    print("# Fundamental discriminants D with |D| <= %d." % LIMIT)
    print("# Columns: D h w t u")
    print("#   h: class number of Q(sqrt(D))")
    print("#   w: number of roots of unity (6 for D=-3, 4 for D=-4, else 2)")
    print("#   (t + u*sqrt(D))/2: fundamental unit for D > 0 (t = u = 0 when")
    print("#   D < 0); its regulator is log((t + u*sqrt(D))/2).")
    print("# Generated by tools/gen_quadratic_fields.py from exact form-class")
    print("# counts and Pell solutions; no analytic input.")
    rows = []
    for D in range(-LIMIT, LIMIT + 1):
        if not is_fundamental(D):
            continue
        if D < 0:
            h = class_number_imaginary(D)
            w = 6 if D == -3 else 4 if D == -4 else 2
            rows.append((D, h, w, 0, 0))
        else:
            t, u, norm = fundamental_unit(D)
            hp = narrow_class_number(D)
            h = hp if norm == -1 else hp // 2
            assert norm == -1 or hp % 2 == 0, (D, hp, norm)
            rows.append((D, h, 2, t, u))
    for row in rows:
        print("%d %d %d %d %d" % row)


if __name__ == "__main__":
    main()
