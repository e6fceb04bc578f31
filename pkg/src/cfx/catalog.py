"""Built-in continued-fraction systems and their reference data.

Each constructor returns (system, sheet).  The sheet carries whatever
closed-form knowledge exists for the system: fiber endpoints of the known
planar invariant set, the normalized invariant density, and the total
fiber measure.  Sheets with unknown entries hold None (the attractor
engine then provides the only description).

Also here: the conjugated Farey maps on the half line (raw, non-Mobius),
the complex Hurwitz step, and the subtractive binary gcd used as a sanity
anchor for the two-dimensional continued-fraction analogy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BadInput, BadParameter
from .mobius import BranchFamily, MobiusBranch, PiecewiseSystem, normalize_branch
from .skew import hurwitz_step

__all__ = [
    "ReferenceSheet",
    "RawMap",
    "HurwitzMap",
    "gauss",
    "symmetrized_gauss",
    "farey",
    "farey_plus",
    "farey_conjugated",
    "ralston",
    "nakada",
    "rosen",
    "chan_additive",
    "chan_multiplicative",
    "hurwitz",
    "binary_gcd",
    "BUILTIN_NAMES",
    "make_system",
]

LOG2 = math.log(2.0)
LOG6 = math.log(6.0)
LOG43 = math.log(4.0 / 3.0)


@dataclass(frozen=True)
class ReferenceSheet:
    """Closed-form description of the invariant planar set, where known.

    fiber_low / fiber_high map x to the endpoints of the invariant fiber
    (None when the fibers are not an interval or not known in closed form).
    density is the normalized one-dimensional invariant density; mass is
    the total planar measure of the invariant set (None when infinite or
    unknown); finite_measure records integrability.
    """

    fiber_low: object = None
    fiber_high: object = None
    density: object = None
    mass: float = None
    finite_measure: bool = True
    note: str = ""

    @property
    def has_fibers(self):
        return self.fiber_low is not None and self.fiber_high is not None


# ---------------------------------------------------------------------------
# digit helpers


def _digit(x):
    """floor(1/x) with exact reciprocals resolved to the smaller digit.

    Branch domains [1/(n+1), 1/n] share endpoints; at x = 1/n exactly the
    first branch in enumeration order is branch n-1 (smaller digit), so the
    tie goes down.
    """
    r = 1.0 / x
    n = math.floor(r)
    if n >= 2 and r == n:
        n -= 1
    return max(n, 1)


def _shifted_digit(x, shift, minimum):
    """floor(1/|x| + shift) with the same down-going tie rule."""
    r = 1.0 / abs(x) + shift
    n = math.floor(r)
    if r == n and n > minimum:
        n -= 1
    return max(n, minimum)


# ---------------------------------------------------------------------------
# Gauss map


def _gauss_branch(n):
    return normalize_branch(-float(n), 1.0, 1.0, 0.0, 1.0 / (n + 1), 1.0 / n, str(n))


def gauss():
    """Gauss map x -> 1/x - floor(1/x) on [0,1], digits n >= 1."""
    family = BranchFamily(
        enumerate_fn=lambda level: [_gauss_branch(n) for n in range(1, level + 1)],
        locate_fn=lambda x: _gauss_branch(_digit(x)) if x > 0.0 else None,
        tail_fn=lambda level: 1.0 / level,
        k_sup=1.0,
        shift_sup=1.0,
        accumulation_fn=lambda level: (0.0,),
    )
    system = PiecewiseSystem((0.0, 1.0), family=family, name="gauss")
    sheet = ReferenceSheet(
        fiber_low=lambda x: 0.0,
        fiber_high=lambda x: 1.0 / (1.0 + x),
        density=lambda x: 1.0 / (LOG2 * (1.0 + x)),
        mass=LOG2,
        finite_measure=True,
        note="invariant fibers [0, 1/(1+x)]; density 1/(log 2 (1+x))",
    )
    return system, sheet


# ---------------------------------------------------------------------------
# symmetrized Gauss map


def _sym_branch(n, side):
    if side > 0:
        return normalize_branch(float(n), -1.0, 1.0, 0.0, 1.0 / (n + 1), 1.0 / n, f"+{n}")
    return normalize_branch(-float(n), -1.0, 1.0, 0.0, -1.0 / n, -1.0 / (n + 1), f"-{n}")


def _sym_enumerate(level):
    out = [_sym_branch(n, +1) for n in range(1, level + 1)]
    out += [_sym_branch(n, -1) for n in range(1, level + 1)]
    return out


def _sym_locate(x):
    if x == 0.0:
        return None
    return _sym_branch(_digit(abs(x)), +1 if x > 0 else -1)


def symmetrized_gauss():
    """Signed variant on [-1,1]: x -> -sign(x) * frac(1/|x|), det +1 branches."""
    family = BranchFamily(
        enumerate_fn=_sym_enumerate,
        locate_fn=_sym_locate,
        tail_fn=lambda level: 2.0 / level,
        k_sup=1.0,
        shift_sup=1.0,
        accumulation_fn=lambda level: (0.0,),
    )
    system = PiecewiseSystem((-1.0, 1.0), family=family, name="symmetrized-gauss")
    sheet = ReferenceSheet(
        note="orientation-preserving branches; invariant set computed numerically"
    )
    return system, sheet


# ---------------------------------------------------------------------------
# Farey maps


def farey():
    """Farey map: x/(1-x) on [0,1/2], 1/x - 1 on [1/2,1].

    The left branch has an indifferent (derivative +1) fixed point at 0, so
    the invariant density 1/x has infinite mass and the attractor engine
    refuses the system; the sheet records the closed-form planar set.
    """
    left = normalize_branch(-1.0, 0.0, 1.0, -1.0, 0.0, 0.5, "L")
    right = normalize_branch(-1.0, 1.0, 1.0, 0.0, 0.5, 1.0, "R")
    system = PiecewiseSystem((0.0, 1.0), branches=(left, right), name="farey")
    sheet = ReferenceSheet(
        fiber_low=lambda x: 0.0,
        fiber_high=lambda x: 1.0 / x,
        density=lambda x: 1.0 / x,
        mass=None,
        finite_measure=False,
        note="fibers [0, 1/x]; density 1/x (infinite mass; left branch is x/(1-x))",
    )
    return system, sheet


def farey_plus():
    """Doubled Farey map: x/(1-x) on [0,1/2], 2 - 1/x on [1/2,1]."""
    left = normalize_branch(-1.0, 0.0, 1.0, -1.0, 0.0, 0.5, "L")
    right = normalize_branch(2.0, -1.0, 1.0, 0.0, 0.5, 1.0, "R")
    system = PiecewiseSystem((0.0, 1.0), branches=(left, right), name="farey-plus")
    sheet = ReferenceSheet(
        fiber_low=lambda x: 1.0 / (x - 1.0),
        fiber_high=lambda x: 1.0 / x,
        density=lambda x: 1.0 / (x * (1.0 - x)),
        mass=None,
        finite_measure=False,
        note="fibers [1/(x-1), 1/x]; density 1/(x(1-x)) (infinite mass, "
        "indifferent fixed points at 0 and 1)",
    )
    return system, sheet


# ---------------------------------------------------------------------------
# Ralston map


_RALSTON_A1 = normalize_branch(-1.0, 1.0, 0.0, 1.0, 0.5, 1.0, "a1")


def _ralston_odd(n):
    # x / (1 - (n-1)x) on [1/(n+1), 1/n], n odd >= 3
    return normalize_branch(-1.0, 0.0, float(n - 1), -1.0, 1.0 / (n + 1), 1.0 / n, str(n))


def _ralston_even(n, m):
    # second Gauss step composed onto even digit n, second digit m >= 1
    lo = m / (m * n + 1.0)
    hi = (m + 1.0) / ((m + 1.0) * n + 1.0)
    return normalize_branch(
        -(m * n + 1.0), float(m), float(n), -1.0, lo, hi, f"{n}:{m}"
    )


def _ralston_enumerate(level):
    out = [_RALSTON_A1]
    bands = level // 4 + 1
    for m in range(1, bands + 1):
        top = max(2, level // (m * m))
        out.extend(_ralston_even(n, m) for n in range(2, top + 1, 2))
    out.extend(_ralston_odd(n) for n in range(3, level + 1, 2))
    return out


def _ralston_locate(x):
    if x <= 0.0:
        return None
    a = _digit(x)
    if a == 1:
        return _RALSTON_A1
    if a % 2 == 1:
        return _ralston_odd(a)
    t = 1.0 / x - a
    if t <= 0.0:
        return None
    return _ralston_even(a, _digit(t))


def _ralston_accumulation(level):
    pts = [0.0]
    pts.extend(1.0 / n for n in range(2, level + 1, 2))
    return tuple(pts)


def ralston():
    """Ralston's map: 1-x for digit 1, 1/(1+T(x)) for odd digits,
    T^2(x) for even digits (T the Gauss map)."""
    family = BranchFamily(
        enumerate_fn=_ralston_enumerate,
        locate_fn=_ralston_locate,
        tail_fn=lambda level: 6.0 / level,
        k_sup=1.0,
        shift_sup=2.0,
        accumulation_fn=_ralston_accumulation,
    )
    system = PiecewiseSystem((0.0, 1.0), family=family, name="ralston")
    c = 1.0 / LOG6

    def density(x):
        return 2.0 * c / (1.0 - x * x) if x < 0.5 else c / x

    sheet = ReferenceSheet(
        fiber_low=lambda x: 1.0 / (x - 1.0) if x < 0.5 else 0.0,
        fiber_high=lambda x: 1.0 / (1.0 + x) if x < 0.5 else 1.0 / x,
        density=density,
        mass=LOG6,
        finite_measure=True,
        note="fibers [1/(x-1), 1/(1+x)] on [0,1/2), [0, 1/x] on [1/2,1]; "
        "density 2C/(1-x^2) then C/x with C = 1/log 6",
    )
    return system, sheet


# ---------------------------------------------------------------------------
# Nakada alpha-continued fractions


def _nakada_pos(n, alpha, n_min):
    lo = 1.0 / (n + alpha)
    hi = alpha if n == n_min else 1.0 / (n - 1.0 + alpha)
    return normalize_branch(-float(n), 1.0, 1.0, 0.0, lo, min(hi, alpha), f"+{n}")


def _nakada_neg(m, alpha, m_min):
    hi = -1.0 / (m + alpha)
    lo = alpha - 1.0 if m == m_min else -1.0 / (m - 1.0 + alpha)
    return normalize_branch(-float(m), -1.0, 1.0, 0.0, max(lo, alpha - 1.0), hi, f"-{m}")


def nakada(alpha):
    """Nakada alpha-CF: x -> 1/|x| - floor(1/|x| + 1 - alpha) on [alpha-1, alpha]."""
    if not isinstance(alpha, (int, float)) or not 0.0 < alpha <= 1.0:
        raise BadParameter(f"nakada needs 0 < alpha <= 1, got {alpha!r}")
    alpha = float(alpha)
    n_min = math.floor(1.0 / alpha - alpha) + 1
    m_min = None if alpha == 1.0 else math.floor(1.0 / (1.0 - alpha) - alpha) + 1

    def enumerate_fn(level):
        out = [_nakada_pos(n, alpha, n_min) for n in range(n_min, n_min + level)]
        if m_min is not None:
            out += [_nakada_neg(m, alpha, m_min) for m in range(m_min, m_min + level)]
        return out

    def locate_fn(x):
        if x == 0.0 or (x < 0.0 and m_min is None):
            return None
        if x > 0.0:
            return _nakada_pos(_shifted_digit(x, 1.0 - alpha, n_min), alpha, n_min)
        return _nakada_neg(_shifted_digit(x, 1.0 - alpha, m_min), alpha, m_min)

    b = max(alpha, 1.0 - alpha)
    k = b * b
    tail_scale = 1.0 + (b / (1.0 - k) if k < 1.0 else 1.0)
    family = BranchFamily(
        enumerate_fn=enumerate_fn,
        locate_fn=locate_fn,
        tail_fn=lambda level: tail_scale / level,
        k_sup=k,
        shift_sup=b,
        accumulation_fn=lambda level: (0.0,),
    )
    system = PiecewiseSystem(
        (alpha - 1.0, alpha), family=family, name="nakada", params={"alpha": alpha}
    )
    sheet = ReferenceSheet(
        note="mixed-orientation branches; non-product invariant set computed numerically"
    )
    return system, sheet


# ---------------------------------------------------------------------------
# Rosen continued fractions


def rosen(q):
    """Rosen map for the Hecke group H(q): |1/x| - lambda*floor(|1/(lambda x)| + 1/2)."""
    if not isinstance(q, int) or isinstance(q, bool) or q < 3:
        raise BadParameter(f"rosen needs an integer q >= 3, got {q!r}")
    lam = 2.0 * math.cos(math.pi / q)
    if abs(lam - round(lam)) < 1e-15:
        lam = float(round(lam))
    half = lam / 2.0
    n_min = math.floor(2.0 / (lam * lam) - 0.5) + 1

    def pos(n):
        lo = 1.0 / (lam * (n + 0.5))
        hi = half if n == n_min else 1.0 / (lam * (n - 0.5))
        return normalize_branch(-lam * n, 1.0, 1.0, 0.0, lo, min(hi, half), f"+{n}")

    def neg(n):
        hi = -1.0 / (lam * (n + 0.5))
        lo = -half if n == n_min else -1.0 / (lam * (n - 0.5))
        return normalize_branch(-lam * n, -1.0, 1.0, 0.0, max(lo, -half), hi, f"-{n}")

    def enumerate_fn(level):
        out = [pos(n) for n in range(n_min, n_min + level)]
        out += [neg(n) for n in range(n_min, n_min + level)]
        return out

    def locate_fn(x):
        if x == 0.0:
            return None
        n = _shifted_digit(lam * x, 0.5, n_min)
        return pos(n) if x > 0.0 else neg(n)

    k = half * half
    family = BranchFamily(
        enumerate_fn=enumerate_fn,
        locate_fn=locate_fn,
        tail_fn=lambda level: (1.0 + half / (1.0 - k)) / (lam * level),
        k_sup=k,
        shift_sup=half,
        accumulation_fn=lambda level: (0.0,),
        max_level=10 ** 6,
    )
    system = PiecewiseSystem((-half, half), family=family, name="rosen", params={"q": q})
    sheet = ReferenceSheet(
        note=f"Hecke-group map with lambda = 2 cos(pi/{q}); planar set computed numerically"
    )
    return system, sheet


# ---------------------------------------------------------------------------
# Hei-Chi Chan maps


def chan_additive():
    """Additive Chan map: 2x on [0,1/2], 1/x - 1 on [1/2,1].

    Same invariant fibers and density as the Gauss map; the doubling branch
    has a repelling (not indifferent) fixed point at 0, so the mass is finite.
    """
    left = normalize_branch(2.0, 0.0, 0.0, 1.0, 0.0, 0.5, "L")
    right = normalize_branch(-1.0, 1.0, 1.0, 0.0, 0.5, 1.0, "R")
    system = PiecewiseSystem((0.0, 1.0), branches=(left, right), name="chan-add")
    sheet = ReferenceSheet(
        fiber_low=lambda x: 0.0,
        fiber_high=lambda x: 1.0 / (1.0 + x),
        density=lambda x: 1.0 / (LOG2 * (1.0 + x)),
        mass=LOG2,
        finite_measure=True,
        note="shares the Gauss invariant set [0, 1/(1+x)] and density",
    )
    return system, sheet


def _chan_mult_branch(n):
    p = 2.0 ** n
    return normalize_branch(-p, 1.0, p, 0.0, 0.5 / p, 1.0 / p, str(n))


def chan_multiplicative():
    """Multiplicative Chan map: x -> 1/(2^n x) - 1 with 2^n x in (1/2, 1]."""

    def locate(x):
        if x <= 0.0:
            return None
        m, e = math.frexp(x)  # x = m * 2^e with m in [0.5, 1)
        # dyadic x sits on a shared domain endpoint; the smaller digit wins
        n = max(-e, 0) if m == 0.5 else -e
        return _chan_mult_branch(n) if n >= 0 else None

    family = BranchFamily(
        enumerate_fn=lambda level: [_chan_mult_branch(n) for n in range(0, level + 1)],
        locate_fn=locate,
        tail_fn=lambda level: 2.0 ** (-level),
        k_sup=1.0,
        shift_sup=1.0,
        accumulation_fn=lambda level: (0.0,),
        max_level=1000,
    )
    system = PiecewiseSystem((0.0, 1.0), family=family, name="chan-mult")
    sheet = ReferenceSheet(
        fiber_low=lambda x: 1.0 / (2.0 + x),
        fiber_high=lambda x: 1.0 / (1.0 + x),
        density=lambda x: 1.0 / (LOG43 * (1.0 + x) * (2.0 + x)),
        mass=LOG43,
        finite_measure=True,
        note="fibers [1/(2+x), 1/(1+x)]; density c/((1+x)(2+x)), c = 1/log(4/3)",
    )
    return system, sheet


# ---------------------------------------------------------------------------
# raw (non-Mobius) adapters: conjugated Farey maps and the Hurwitz step


@dataclass(frozen=True)
class RawMap:
    """Interval map given by callables rather than Mobius branches.

    Supports orbits and Ruelle-operator checks; the attractor engine does
    not apply (no branch matrices).
    """

    name: str
    domain: tuple
    apply: object
    derivative: object
    preimages: object          # t -> ((y, |T'(y)|), ...)
    label_of: object
    default_start: float
    note: str = ""


def _conj_apply_unsigned(x):
    return abs(math.log(math.expm1(x)))


def _conj_apply_signed(x):
    return math.copysign(math.log(math.expm1(abs(x))), x)


def _conj_preimages_unsigned(t):
    # solutions of |log(e^y - 1)| = t: y = log(1 + e^(+-t))
    if t < 0.0:
        return ()
    ep = math.exp(t)
    em = math.exp(-t)
    # |T'| at the two preimages: (1+e^t)/e^t and 1+e^t
    return ((math.log1p(ep), (1.0 + ep) / ep), (math.log1p(em), 1.0 + ep))


def _conj_preimages_signed(t):
    # positive preimage log(1+e^t), negative preimage -log(1+e^-t)
    ep = math.exp(t)
    em = math.exp(-t)
    return ((math.log1p(ep), (1.0 + ep) / ep), (-math.log1p(em), 1.0 + ep))


def farey_conjugated(signed=False):
    """Farey map conjugated to the half line / the punctured line.

    Lebesgue measure is invariant (the preimage weights 1/|T'| sum to 1),
    mirroring the infinite 1/x measure of the Farey map itself.
    """
    if signed:
        raw = RawMap(
            name="farey-conj-signed",
            domain=(-math.inf, math.inf),
            apply=_conj_apply_signed,
            derivative=lambda x: math.exp(abs(x)) / math.expm1(abs(x)),
            preimages=_conj_preimages_signed,
            label_of=lambda x: "R" if x > 0 else "L",
            default_start=1.0,
            note="odd map sign(x) log(e^|x| - 1); Lebesgue invariant",
        )
    else:
        raw = RawMap(
            name="farey-conj",
            domain=(0.0, math.inf),
            apply=_conj_apply_unsigned,
            derivative=lambda x: math.exp(x) / math.expm1(x),
            preimages=_conj_preimages_unsigned,
            label_of=lambda x: "L" if x < LOG2 else "R",
            default_start=1.0,
            note="half-line map |log(e^x - 1)|; Lebesgue invariant",
        )
    sheet = ReferenceSheet(
        density=lambda x: 1.0,
        mass=None,
        finite_measure=False,
        note=raw.note,
    )
    return raw, sheet


@dataclass(frozen=True)
class HurwitzMap:
    """Complex continued fraction z -> 1/z - [1/z] with Gaussian digits."""

    name: str = "hurwitz"
    default_start: complex = 0.35 + 0.15j

    @staticmethod
    def step(pair):
        return hurwitz_step(pair)


def hurwitz():
    sheet = ReferenceSheet(
        note="digits are Gaussian integers; z stays in max(|Re|,|Im|) <= 1/2"
    )
    return HurwitzMap(), sheet


# ---------------------------------------------------------------------------
# subtractive binary gcd


def binary_gcd(p, q):
    """Binary subtractive gcd (doubling/halving steps only).

    Strips common powers of two, then repeats: halve q when 2p < q and q is
    even, double p when 2p < q and q is odd, otherwise replace (p, q) by the
    sorted pair (q - p, p), until p = 0.
    """
    if not isinstance(p, int) or not isinstance(q, int) or isinstance(p, bool) or isinstance(q, bool):
        raise BadInput(f"binary_gcd needs integers, got {p!r}, {q!r}")
    if not 0 < p < q:
        raise BadInput(f"binary_gcd needs 0 < p < q, got p={p}, q={q}")
    twos = 0
    while p % 2 == 0 and q % 2 == 0:
        p //= 2
        q //= 2
        twos += 1
    while p != 0:
        if 2 * p < q:
            if q % 2 == 0:
                q //= 2
            else:
                p *= 2
        else:
            p, q = sorted((q - p, p))
    return q * (2 ** twos)


# ---------------------------------------------------------------------------
# registry


def _need_no_params(factory):
    def build(params):
        if params:
            raise BadParameter(f"unexpected parameters {sorted(params)}")
        return factory()

    return build


def _build_nakada(params):
    extra = set(params) - {"alpha"}
    if extra or "alpha" not in params:
        raise BadParameter("nakada takes exactly one parameter: alpha")
    return nakada(params["alpha"])


def _build_rosen(params):
    extra = set(params) - {"q"}
    if extra or "q" not in params:
        raise BadParameter("rosen takes exactly one parameter: q")
    q = params["q"]
    if isinstance(q, float) and q.is_integer():
        q = int(q)
    return rosen(q)


BUILTINS = {
    "gauss": _need_no_params(gauss),
    "symmetrized-gauss": _need_no_params(symmetrized_gauss),
    "farey": _need_no_params(farey),
    "farey-plus": _need_no_params(farey_plus),
    "farey-conj": _need_no_params(lambda: farey_conjugated(signed=False)),
    "farey-conj-signed": _need_no_params(lambda: farey_conjugated(signed=True)),
    "ralston": _need_no_params(ralston),
    "nakada": _build_nakada,
    "rosen": _build_rosen,
    "chan-add": _need_no_params(chan_additive),
    "chan-mult": _need_no_params(chan_multiplicative),
    "hurwitz": _need_no_params(hurwitz),
}

BUILTIN_NAMES = tuple(BUILTINS)


def make_system(name, params=None):
    """Instantiate a builtin by CLI/JSON name; returns (object, sheet)."""
    if name not in BUILTINS:
        raise BadParameter(f"unknown builtin {name!r} (choose from {', '.join(BUILTIN_NAMES)})")
    return BUILTINS[name](dict(params or {}))
