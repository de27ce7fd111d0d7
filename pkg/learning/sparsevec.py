"""
Sparse vectors keyed by feature index.

Examples and per-task weight vectors live here. Feature dimension is never
fixed up front: a vector only stores the indices it has touched, which keeps
memory proportional to touched features on ~3M-feature corpora.
"""
import math


class SparseVector:
    """
    Feature-index -> value map with implicit zeros.

    Canonical form: no stored value is exactly 0.0 after any mutation.
    """
    __slots__ = ('_entries',)

    def __init__(self, entries=None):
        self._entries = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for index, value in items:
                index = int(index)
                if index < 0:
                    raise ValueError(f'Feature index must be nonnegative, got {index}')
                value = float(value)
                if value != 0.0:
                    self._entries[index] = value
                else:
                    self._entries.pop(index, None)

    @classmethod
    def from_dense(cls, values):
        return cls((i, v) for i, v in enumerate(values))

    def copy(self):
        clone = SparseVector()
        clone._entries = dict(self._entries)
        return clone

    def items(self):
        return self._entries.items()

    def indices(self):
        return self._entries.keys()

    def get(self, index, default=0.0):
        return self._entries.get(index, default)

    def nnz(self):
        return len(self._entries)

    def max_index(self):
        return max(self._entries) if self._entries else -1

    def norm(self):
        return math.sqrt(math.fsum(v * v for v in self._entries.values()))

    def scaled(self, alpha):
        return SparseVector((i, alpha * v) for i, v in self._entries.items())

    def to_dense(self, dim):
        dense = [0.0] * dim
        for i, v in self._entries.items():
            dense[i] = v
        return dense

    def sorted_items(self):
        return sorted(self._entries.items())

    def __len__(self):
        return len(self._entries)

    def __bool__(self):
        return bool(self._entries)

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self):
        body = ', '.join(f'{i}: {v!r}' for i, v in self.sorted_items())
        return f'SparseVector({{{body}}})'


def dot(a, b):
    """
    Inner product, iterating over the operand with fewer stored entries.

    Summation is exactly rounded (math.fsum), so the result does not depend
    on dictionary iteration order.
    """
    if len(a._entries) > len(b._entries):
        a, b = b, a
    lookup = b._entries
    return math.fsum(v * lookup[i] for i, v in a._entries.items() if i in lookup)


def axpy_into(alpha, x, w):
    """w <- w + alpha * x, in place; returns w. Exact cancellations are pruned."""
    if alpha == 0.0:
        return w
    entries = w._entries
    for i, v in x._entries.items():
        updated = entries.get(i, 0.0) + alpha * v
        if updated == 0.0:
            entries.pop(i, None)
        else:
            entries[i] = updated
    return w


def linear_combination(coefficients, vectors):
    """
    Sum_m coefficients[m] * vectors[m] as a new canonical vector, each
    coordinate summed with math.fsum.
    """
    terms = {}
    for coefficient, vector in zip(coefficients, vectors):
        if coefficient == 0.0:
            continue
        for i, v in vector._entries.items():
            terms.setdefault(i, []).append(coefficient * v)
    return SparseVector((i, math.fsum(parts)) for i, parts in terms.items())
