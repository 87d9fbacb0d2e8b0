import hashlib
from fractions import Fraction

from tqdm import tqdm


def kb_digest(kb):
    """Returns a stable hex digest of a knowledge base, used to key persisted caches."""
    from .kb import normalize_kb
    from .parser import serialize_kb
    return hashlib.sha256(serialize_kb(normalize_kb(kb)).encode('utf-8')).hexdigest()


def fraction_text(value):
    """Returns an exact rational as 'n/d', or 'n' when it is an integer."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def parse_entry(text):
    """Parses a matrix coordinate written as 'k1 k2' (or a single 'k')."""
    parts = str(text).replace(',', ' ').split()
    if not 1 <= len(parts) <= 2:
        raise ValueError(f'entry must be one or two indices, got {text!r}')
    ks = tuple(int(p) for p in parts)
    if any(k < 0 for k in ks):
        raise ValueError(f'entry indices must be nonnegative, got {text!r}')
    return ks


def progress(iterable, enabled, **kwargs):
    """Wraps an iterable in a progress bar that stays silent unless enabled."""
    return tqdm(iterable, disable=not enabled, leave=False, **kwargs)


def trace(enabled, message):
    if enabled:
        tqdm.write(message)
