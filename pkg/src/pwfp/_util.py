from decimal import Decimal, ROUND_HALF_UP
import os
import tempfile
from contextlib import contextmanager


@contextmanager
def atomic_open(path, mode="w"):
    """Open a temp file next to ``path`` and rename it into place on success."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode, newline="" if "b" not in mode else None) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def format_float(x):
    """Shortest round-trip repr, empty string for NaN."""
    if x != x:
        return ""
    return repr(float(x))


def round_half_up(x):
    """Round a nonnegative number to the nearest int, halves going up.

    Goes through ``Decimal(str(x))`` so that 0.1 * 145 lands on 14.5 and not
    on the binary neighbour below it.
    """
    if not isinstance(x, Decimal):
        x = Decimal(str(x))
    return int(x.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def scaled_count(fraction, total):
    """``round_half_up(fraction * total)`` computed in decimal arithmetic."""
    return round_half_up(Decimal(str(fraction)) * Decimal(int(total)))
