"""Exact arithmetic in prime fields and towers of extension fields.

Elements are raw data: an element of F_p is a plain int in [0, p), an
element of an extension of degree d is a d-tuple of elements of the base
level.  All operations are methods on the field object, which keeps the
inner loops free of wrapper allocations.
"""

from __future__ import annotations

import random


class NonResidue(Exception):
    """Square root requested of a quadratic non-residue."""


class NotASubfield(Exception):
    """Trace/coercion target is not a level of the tower."""


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """Shared interface bits for PrimeField and ExtensionField."""

    char: int
    order: int
    degree: int  # absolute degree over the prime field

    def equal(self, a, b) -> bool:
        return a == b

    def is_zero(self, a) -> bool:
        return a == self.zero

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n: int):
        if n < 0:
            return self.pow(self.inv(a), -n)
        r = self.one
        b = a
        while n:
            if n & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            n >>= 1
        return r

    def sum(self, elems):
        r = self.zero
        for e in elems:
            r = self.add(r, e)
        return r

    def product(self, elems):
        r = self.one
        for e in elems:
            r = self.mul(r, e)
        return r

    # -- tower navigation ------------------------------------------------

    def tower(self):
        """Levels from the prime field up to (and including) this one."""
        levels = []
        f = self
        while isinstance(f, ExtensionField):
            levels.append(f)
            f = f.base
        levels.append(f)
        return levels[::-1]

    def contains_level(self, sub: "Field") -> bool:
        f = self
        while True:
            if f is sub:
                return True
            if isinstance(f, ExtensionField):
                f = f.base
            else:
                return False

    def embed(self, a, src: "Field"):
        """Embed an element of a lower tower level into this field.

        Walks the tower when src is a level of self; otherwise falls back
        to a cached root-of-modulus embedding (needs src.degree | degree).
        """
        if src is self:
            return a
        if not isinstance(self, ExtensionField):
            raise NotASubfield("cannot embed into the prime field")
        if self.contains_level(src):
            inner = self.base.embed(a, src) if self.base is not src else a
            return (inner,) + (self.base.zero,) * (self.rel_degree - 1)
        return make_embedding(src, self)(a)

    def project(self, a, dst: "Field"):
        """Inverse of embed; raises ValueError if a is not in dst."""
        if dst is self:
            return a
        if not isinstance(self, ExtensionField):
            raise NotASubfield("projection target above the field")
        for c in a[1:]:
            if not self.base.is_zero(c):
                raise ValueError("element does not lie in the requested subfield")
        return self.base.project(a[0], dst)

    # -- square roots ----------------------------------------------------

    def sqrt(self, a):
        """Canonical square root; raises NonResidue if none exists.

        Tonelli-Shanks over the multiplicative group of order q-1.  The
        canonical choice between r and -r is the root whose first nonzero
        coordinate over F_p lies in {0, ..., (p-1)/2}.
        """
        if self.is_zero(a):
            return self.zero
        q = self.order
        if self.pow(a, (q - 1) // 2) != self.one:
            raise NonResidue(f"{a!r} is not a square in {self}")
        m = q - 1
        e = 0
        while m % 2 == 0:
            m //= 2
            e += 1
        if e == 1:
            r = self.pow(a, (q + 1) // 4)
            return self._canonical_sign(r)
        z = self._nonresidue()
        # standard Tonelli-Shanks loop
        g = self.pow(z, m)
        r = self.pow(a, (m + 1) // 2)
        t = self.pow(a, m)
        while t != self.one:
            # find least i with t^(2^i) = 1
            i = 0
            s = t
            while s != self.one:
                s = self.mul(s, s)
                i += 1
            b = g
            for _ in range(e - i - 1):
                b = self.mul(b, b)
            r = self.mul(r, b)
            g = self.mul(b, b)
            t = self.mul(t, g)
            e = i
        return self._canonical_sign(r)

    def is_square(self, a) -> bool:
        if self.is_zero(a):
            return True
        return self.pow(a, (self.order - 1) // 2) == self.one

    def _nonresidue(self):
        if self._nonres_cache is None:
            n = 2
            while True:
                c = self.element_from_index(n)
                if not self.is_zero(c) and not self.is_square(c):
                    self._nonres_cache = c
                    break
                n += 1
        return self._nonres_cache

    def _canonical_sign(self, r):
        for v in self.canonical_key(r):
            if v:
                return r if v <= (self.char - 1) // 2 else self.neg(r)
        return r

    def canonical_sqrt_pair(self, a):
        r = self.sqrt(a)
        return r, self.neg(r)

    def canonical_extension(self, k: int) -> "ExtensionField":
        """The cached degree-k extension of this field.

        All decompositions over one base share these objects, so lifted
        function data can be cached across evaluations.
        """
        cache = getattr(self, "_canon_ext", None)
        if cache is None:
            cache = self._canon_ext = {}
        got = cache.get(k)
        if got is not None:
            return got
        from .poly import Poly
        if k == 2:
            mod = [self.neg(self._nonresidue()), self.zero, self.one]
            ext = ExtensionField(self, mod, name=f"ext2", check_irreducible=False)
        else:
            import random as _random
            rng = _random.Random(0xF1E1D + k)
            while True:
                coeffs = [self.random(rng) for _ in range(k)] + [self.one]
                p = Poly(self, coeffs)
                if p.is_irreducible():
                    ext = ExtensionField(self, coeffs, name=f"ext{k}",
                                         check_irreducible=False)
                    break
        cache[k] = ext
        return ext


class PrimeField(Field):
    def __init__(self, p: int):
        if p == 2 or not _is_probable_prime(p):
            raise ValueError(f"modulus must be an odd prime, got {p}")
        self.p = p
        self.char = p
        self.order = p
        self.degree = 1
        self.zero = 0
        self.one = 1
        self.name = "base"
        self._nonres_cache = None

    def __repr__(self):
        return f"F_{self.p}"

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, -1, self.p)

    def pow(self, a, n: int):
        return pow(a, n, self.p) if n >= 0 else pow(pow(a, -1, self.p), -n, self.p)

    def from_int(self, n: int):
        return n % self.p

    def element_from_index(self, n: int):
        return n % self.p

    def random(self, rng: random.Random):
        return rng.randrange(self.p)

    def canonical_key(self, a):
        return (a,)

    def frobenius(self, a):
        return a

    def to_json(self, a):
        return a


class ExtensionField(Field):
    """Extension of `base` by a monic irreducible polynomial.

    modulus is given by its coefficient list over base, ascending degree,
    monic, length rel_degree + 1.  Elements are tuples of length rel_degree.
    """

    def __init__(self, base: Field, modulus, name: str = "",
                 check_irreducible: bool = True):
        self.base = base
        mod = list(modulus)
        if len(mod) < 3:
            raise ValueError("extension degree must be at least 2")
        if mod[-1] != base.one:
            raise ValueError("defining polynomial must be monic")
        self.rel_degree = len(mod) - 1
        self.modulus = tuple(mod)
        # X^d = -(m_0 + m_1 X + ... + m_{d-1} X^{d-1})
        self._red = tuple(base.neg(c) for c in mod[:-1])
        self.char = base.char
        self.order = base.order ** self.rel_degree
        self.degree = base.degree * self.rel_degree
        self.zero = (base.zero,) * self.rel_degree
        self.one = (base.one,) + (base.zero,) * (self.rel_degree - 1)
        self.gen = self._monomial(1) if self.rel_degree > 1 else None
        self.name = name or f"ext{self.rel_degree}"
        self._nonres_cache = None
        self._frob_cache = None
        if check_irreducible and not self._modulus_irreducible():
            raise ValueError("defining polynomial is reducible")

    def __repr__(self):
        return f"{self.base!r}[{self.name}]/deg{self.rel_degree}"

    def _monomial(self, i):
        c = [self.base.zero] * self.rel_degree
        c[i] = self.base.one
        return tuple(c)

    def _modulus_irreducible(self) -> bool:
        from .poly import Poly
        return Poly(self.base, self.modulus).is_irreducible()

    def add(self, a, b):
        base = self.base
        return tuple(base.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        base = self.base
        return tuple(base.sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        base = self.base
        return tuple(base.neg(x) for x in a)

    def mul(self, a, b):
        base = self.base
        d = self.rel_degree
        if d == 2:
            a0, a1 = a
            b0, b1 = b
            p0 = base.mul(a0, b0)
            p1 = base.add(base.mul(a0, b1), base.mul(a1, b0))
            p2 = base.mul(a1, b1)
            r0, r1 = self._red
            return (base.add(p0, base.mul(p2, r0)),
                    base.add(p1, base.mul(p2, r1)))
        # schoolbook product then reduction by the modulus
        prod = [base.zero] * (2 * d - 1)
        for i, ai in enumerate(a):
            if base.is_zero(ai):
                continue
            for j, bj in enumerate(b):
                prod[i + j] = base.add(prod[i + j], base.mul(ai, bj))
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k]
            if base.is_zero(c):
                continue
            prod[k] = base.zero
            off = k - d
            for j, rj in enumerate(self._red):
                prod[off + j] = base.add(prod[off + j], base.mul(c, rj))
        return tuple(prod[:d])

    def scalar_mul(self, c, a):
        base = self.base
        return tuple(base.mul(c, x) for x in a)

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of 0")
        if a == self.one:
            return a
        base = self.base
        if self.rel_degree == 2:
            a0, a1 = a
            if base.is_zero(a1):
                return (base.inv(a0),) + (base.zero,)
            # norm form: (a0 + a1 X)(s0 + s1 X) = 1 with X^2 = r0 + r1 X
            r0, r1 = self._red
            n = base.sub(base.mul(a0, base.add(a0, base.mul(a1, r1))),
                         base.mul(base.mul(a1, a1), r0))
            ninv = base.inv(n)
            s0 = base.mul(base.add(a0, base.mul(a1, r1)), ninv)
            s1 = base.neg(base.mul(a1, ninv))
            return (s0, s1)
        # extended Euclid in base[X] against the modulus
        from .poly import Poly
        f = Poly(self.base, a)
        m = Poly(self.base, self.modulus)
        g, _, s = m.xgcd_with(f)  # g = gcd, s*f = g mod modulus
        if g.degree() != 0:
            raise ZeroDivisionError("element not invertible (reducible modulus?)")
        s = s.scale(self.base.inv(g.coeffs[0]))
        c = list(s.coeffs) + [self.base.zero] * self.rel_degree
        return tuple(c[: self.rel_degree])

    def from_int(self, n: int):
        return (self.base.from_int(n),) + (self.base.zero,) * (self.rel_degree - 1)

    def from_coeffs(self, coeffs):
        c = list(coeffs) + [self.base.zero] * (self.rel_degree - len(list(coeffs)))
        return tuple(c[: self.rel_degree])

    def element_from_index(self, n: int):
        digits = []
        q = self.base.order
        for _ in range(self.rel_degree):
            digits.append(self.base.element_from_index(n % q))
            n //= q
        return tuple(digits)

    def random(self, rng: random.Random):
        return tuple(self.base.random(rng) for _ in range(self.rel_degree))

    def canonical_key(self, a):
        out = []
        for c in a:
            out.extend(self.base.canonical_key(c))
        return tuple(out)

    def frobenius(self, a):
        """x -> x^p (absolute Frobenius), via linearity over F_p."""
        if self._frob_cache is None:
            images = []
            for i in range(self.rel_degree):
                images.append(self.pow(self._monomial(i), self.char))
            self._frob_cache = images
        base = self.base
        acc = self.zero
        for i, c in enumerate(a):
            if base.is_zero(c):
                continue
            acc = self.add(acc, self.scalar_mul(base.frobenius(c), self._frob_cache[i]))
        return acc

    def frobenius_power(self, a, k: int):
        r = a
        for _ in range(k % self.degree):
            r = self.frobenius(r)
        return r

    def to_json(self, a):
        return [self.base.to_json(c) for c in a]


_embedding_cache: dict = {}


def make_embedding(src: Field, dst: Field):
    """Field embedding src -> dst for finite fields with src.degree | dst.degree.

    The image of src's generator is the canonically smallest root of src's
    defining polynomial in dst, found once and cached; elements then map by
    evaluating their coefficient polynomial at that root.
    """
    key = (id(src), id(dst))
    got = _embedding_cache.get(key)
    if got is not None:
        return got
    if src is dst:
        fn = lambda a: a
    elif dst.contains_level(src):
        fn = lambda a: dst.embed(a, src)
    else:
        if dst.degree % src.degree != 0:
            raise NotASubfield(f"no embedding {src} -> {dst}")
        if not isinstance(src, ExtensionField):
            raise NotASubfield("prime field embeds along the tower only")
        base_map = make_embedding(src.base, dst)
        from .poly import Poly
        mod_in_dst = Poly(dst, [base_map(c) for c in src.modulus])
        roots = mod_in_dst.roots()
        if not roots:
            raise NotASubfield("defining polynomial has no root downstream")
        gen_img = roots[0]

        def fn(a, _bm=base_map, _g=gen_img, _dst=dst):
            acc = _dst.zero
            for c in reversed(a):
                acc = _dst.add(_dst.mul(acc, _g), _bm(c))
            return acc
    _embedding_cache[key] = fn
    return fn


def common_overfield(f1: Field, f2: Field) -> Field:
    """A field containing both towers (their compositum by degree lcm)."""
    if f1 is f2 or f1.contains_level(f2):
        return f1
    if f2.contains_level(f1):
        return f2
    d1, d2 = f1.degree, f2.degree
    g = d1
    b = d2
    while b:
        g, b = b, g % b
    lcm = d1 * d2 // g
    if lcm == d1:
        return f1
    if lcm == d2:
        return f2
    # descend to the common prime field and take one canonical extension
    base = f1
    while isinstance(base, ExtensionField):
        base = base.base
    return base.canonical_extension(lcm)


def trace_to_base(field: Field, a, sub: Field):
    """Field trace tr_{field/sub}(a); result is an element of sub."""
    if not field.contains_level(sub):
        raise NotASubfield(f"{sub} is not a level below {field}")
    if field is sub:
        return a
    k = field.degree // sub.degree
    q = sub.order
    acc = a
    frob = a
    for _ in range(k - 1):
        frob = field.pow(frob, q)
        acc = field.add(acc, frob)
    return field.project(acc, sub)


def norm_to_base(field: Field, a, sub: Field):
    if not field.contains_level(sub):
        raise NotASubfield(f"{sub} is not a level below {field}")
    if field is sub:
        return a
    k = field.degree // sub.degree
    q = sub.order
    acc = a
    frob = a
    for _ in range(k - 1):
        frob = field.pow(frob, q)
        acc = field.mul(acc, frob)
    return field.project(acc, sub)


def conjugates_over(field: Field, a, sub: Field):
    """Orbit of a under Gal(field/sub), i.e. powers of x -> x^|sub|."""
    if not field.contains_level(sub):
        raise NotASubfield(f"{sub} is not a level below {field}")
    q = sub.order
    out = [a]
    b = field.pow(a, q)
    while b != a:
        out.append(b)
        b = field.pow(b, q)
    return out


class FieldTower:
    """Named levels of a tower of finite fields, built from a description.

    levels maps name -> field object; "base" is always the prime field.
    """

    def __init__(self, p: int):
        self.base = PrimeField(p)
        self.levels: dict[str, Field] = {"base": self.base}
        self._order: list[str] = ["base"]

    def add_level(self, name: str, over: str, modulus_coeffs) -> Field:
        if name in self.levels:
            raise ValueError(f"duplicate tower level {name!r}")
        base = self.levels[over]
        mod = [self._decode(base, c) for c in modulus_coeffs]
        fld = ExtensionField(base, mod, name=name)
        self.levels[name] = fld
        self._order.append(name)
        return fld

    def _decode(self, field: Field, data):
        """Decode a JSON-ish coefficient (int or nested list) into field."""
        if isinstance(data, int):
            return field.from_int(data)
        if not isinstance(field, ExtensionField):
            raise ValueError("nested coefficient array over the prime field")
        coeffs = [self._decode(field.base, c) for c in data]
        return field.from_coeffs(coeffs)

    def decode_element(self, level: str, data):
        return self._decode(self.levels[level], data)

    def names(self):
        return list(self._order)
