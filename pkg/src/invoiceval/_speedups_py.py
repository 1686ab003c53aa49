"""Pure-Python implementations of the hot kernels.

Same contract as the compiled invoiceval._speedups module; selected by
invoiceval.kernels when the extension is unavailable or INVOICEVAL_PURE is set.
"""

from __future__ import annotations

BACKEND = "python"


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance between two strings."""
    if a == b:
        return 0
    # Trim the common prefix and suffix; they never contribute edits.
    start = 0
    la, lb = len(a), len(b)
    while start < la and start < lb and a[start] == b[start]:
        start += 1
    end_a, end_b = la, lb
    while end_a > start and end_b > start and a[end_a - 1] == b[end_b - 1]:
        end_a -= 1
        end_b -= 1
    a, b = a[start:end_a], b[start:end_b]
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a

    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a):
        current = [i + 1]
        append = current.append
        for j, cb in enumerate(b):
            cost = previous[j] if ca == cb else previous[j] + 1
            deletion = previous[j + 1] + 1
            insertion = current[j] + 1
            best = cost if cost < deletion else deletion
            append(best if best < insertion else insertion)
        previous = current
    return previous[-1]
