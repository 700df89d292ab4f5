"""Standard fans and seeded random corpora of smooth projective toric varieties."""

from __future__ import annotations

import itertools
import random

from .fan import Fan


def projective_space(n: int) -> Fan:
    rays = [tuple(int(i == k) for i in range(n)) for k in range(n)] + [tuple([-1] * n)]
    cones = list(itertools.combinations(range(n + 1), n))
    return Fan(rays, cones, n)


def p1() -> Fan:
    return projective_space(1)


def p2() -> Fan:
    return projective_space(2)


def hirzebruch(a: int) -> Fan:
    """F_a with rays (1,0), (0,1), (-1,a), (0,-1); ray 1 is the negative section."""
    rays = [(1, 0), (0, 1), (-1, a), (0, -1)]
    return Fan(rays, [(0, 1), (1, 2), (2, 3), (3, 0)], 2)


def p1xp1() -> Fan:
    return hirzebruch(0)


def product(a: Fan, b: Fan) -> Fan:
    na, nb = a.rank, b.rank
    rays = [tuple(r) + (0,) * nb for r in a.rays] + [(0,) * na + tuple(r) for r in b.rays]
    off = a.nrays
    cones = [tuple(ca) + tuple(off + j for j in cb) for ca in a.cones for cb in b.cones]
    return Fan(rays, cones, na + nb)


def affine_plane() -> Fan:
    return Fan([(1, 0), (0, 1)], [(0, 1)], 2)


def affine_line() -> Fan:
    return Fan([(1,)], [(0,)], 1)


def circuit_3fold() -> Fan:
    """The local model v1 + v2 = v3 + v4 triangulated by {v1v2v3, v1v2v4}."""
    rays = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -1)]
    return Fan(rays, [(0, 1, 2), (0, 1, 3)], 3)


# ---------------------------------------------------------------------------
# complete smooth surfaces as cyclic ray sequences


def surface_from_cycle(rays) -> Fan:
    k = len(rays)
    return Fan(rays, [(i, (i + 1) % k) for i in range(k)], 2)


def _angle_sorted_cycle(fan: Fan) -> list[tuple[int, int]]:
    import math

    return sorted(fan.rays, key=lambda r: math.atan2(r[1], r[0]))


def blow_up_surface(fan: Fan, i: int) -> Fan:
    """Blow up the torus-fixed point of the i-th cone of the cyclic ray order."""
    cyc = _angle_sorted_cycle(fan)
    a, b = cyc[i % len(cyc)], cyc[(i + 1) % len(cyc)]
    new = (a[0] + b[0], a[1] + b[1])
    cyc.insert(i + 1, new)
    return surface_from_cycle(cyc)


def random_smooth_surface(rng: random.Random, max_blowups: int = 4) -> Fan:
    base = rng.choice(["p2", "f0", "f1", "f2", "f3"])
    if base == "p2":
        rays = [(1, 0), (0, 1), (-1, -1)]
    else:
        a = int(base[1])
        rays = [(1, 0), (0, 1), (-1, a), (0, -1)]
    fan = surface_from_cycle(sorted(rays, key=lambda r: __import__("math").atan2(r[1], r[0])))
    for _ in range(rng.randint(0, max_blowups)):
        fan = blow_up_surface(fan, rng.randrange(fan.nrays))
    return fan


def surface_corpus(seed: int, count: int = 100, max_blowups: int = 4) -> list[Fan]:
    rng = random.Random(seed)
    return [random_smooth_surface(rng, max_blowups) for _ in range(count)]


# ---------------------------------------------------------------------------
# smooth projective 3-folds by point and curve blow-ups


def random_smooth_threefold(rng: random.Random, max_blowups: int = 2) -> Fan:
    base = rng.choice(["p3", "p2xp1", "p1^3", "f1xp1"])
    if base == "p3":
        fan = projective_space(3)
    elif base == "p2xp1":
        fan = product(p2(), p1())
    elif base == "p1^3":
        fan = product(product(p1(), p1()), p1())
    else:
        fan = product(hirzebruch(1), p1())
    for _ in range(rng.randint(0, max_blowups)):
        cone = rng.choice(fan.cones)
        if rng.random() < 0.5:
            face = cone  # torus-fixed point
        else:
            face = rng.sample(list(cone), 2)  # torus-invariant curve
        v = tuple(sum(fan.rays[i][k] for i in face) for k in range(3))
        fan = fan.star_subdivide(v)
    return fan


def threefold_corpus(seed: int, count: int = 20, max_blowups: int = 2) -> list[Fan]:
    rng = random.Random(seed)
    return [random_smooth_threefold(rng, max_blowups) for _ in range(count)]
