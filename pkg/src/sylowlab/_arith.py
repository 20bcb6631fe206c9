"""Integer helpers: primality, factorization, valuations."""

from functools import lru_cache

# deterministic for n < 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def require_prime(n: int, what: str = "modulus") -> None:
    if not isinstance(n, int) or not is_prime(n):
        from .errors import DomainError

        raise DomainError(f"{what} {n!r} is not prime")


@lru_cache(maxsize=4096)
def prime_factors(n: int) -> tuple:
    """Distinct prime divisors of n by trial division, ascending."""
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out.append(n)
    return tuple(out)


def valuation(n: int, ell: int) -> int:
    if n < 1:
        raise ValueError(f"valuation needs n >= 1, got {n}")
    e = 0
    while n % ell == 0:
        n //= ell
        e += 1
    return e


def strip(n: int, ell: int) -> int:
    """n with every factor of ell removed."""
    while n % ell == 0:
        n //= ell
    return n


def order_from_group_order(is_identity_power, group_order: int) -> int:
    """Least n with x^n = 1, given a test for x^m = 1 and a multiple of the order."""
    n = group_order
    for q in prime_factors(group_order):
        while n % q == 0 and is_identity_power(n // q):
            n //= q
    return n
