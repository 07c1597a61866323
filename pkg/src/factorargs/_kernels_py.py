"""Numpy implementations of the dense-table kernels.

This is the fallback backend used when the compiled extension is not
available (or is disabled via ``FACTORARGS_PURE``).  Both backends share the
same flat-table calling convention:

* a table over k axes with cardinalities ``dims`` is a C-contiguous float64
  array of ``prod(dims)`` entries, last axis fastest;
* per-axis *element* strides address an operand whose scope is a subset of
  the result axes (stride 0 on axes the operand does not carry).
"""

import numpy as np

NAME = "python"


def _strided_view(flat: np.ndarray, dims: np.ndarray, strides: np.ndarray) -> np.ndarray:
    byte = flat.itemsize
    return np.lib.stride_tricks.as_strided(
        flat, shape=tuple(int(d) for d in dims),
        strides=tuple(int(s) * byte for s in strides), writeable=False,
    )


def multiply(dims, a, a_strides, b, b_strides):
    """Entrywise product of two tables projected onto the ``dims`` axes."""
    if len(dims) == 0:
        return np.array([a[0] * b[0]])
    av = _strided_view(a, dims, a_strides)
    bv = _strided_view(b, dims, b_strides)
    return np.multiply(av, bv).ravel()


def sum_out(dims, values, keep_mask):
    """Sum a table over the axes where ``keep_mask`` is 0, keeping axis order."""
    dropped = tuple(i for i, k in enumerate(keep_mask) if not k)
    if not dropped:
        return values.copy()
    shaped = values.reshape(tuple(int(d) for d in dims))
    return np.asarray(shaped.sum(axis=dropped), dtype=np.float64).ravel()


def divide(dims, num, den, den_strides):
    """Entrywise quotient with 0/0 = 0.

    Returns ``(table, bad)`` where ``bad`` is the flat index of the first cell
    with a positive numerator over a zero denominator, or -1 if none exists.
    """
    if len(dims) == 0:
        dv = np.array([den[0]])
    else:
        dv = _strided_view(den, dims, den_strides).ravel()
    nv = num
    zero = dv == 0.0
    bad_cells = zero & (nv != 0.0)
    bad = int(np.argmax(bad_cells)) if bad_cells.any() else -1
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(zero, 0.0, nv / np.where(zero, 1.0, dv))
    return np.asarray(out, dtype=np.float64), bad


def weighted_marginal(dims, table, incoming, keep_axis):
    """Multiply a table by one weight vector per axis, then sum out all axes
    except ``keep_axis``.  ``incoming`` is a (n_axes, max_card) padded matrix;
    an all-ones row means no weight on that axis."""
    k = len(dims)
    shaped = table.reshape(tuple(int(d) for d in dims))
    for d in range(k):
        w = incoming[d, : int(dims[d])]
        shape = [1] * k
        shape[d] = int(dims[d])
        shaped = shaped * w.reshape(shape)
    dropped = tuple(d for d in range(k) if d != keep_axis)
    if dropped:
        shaped = shaped.sum(axis=dropped)
    return np.asarray(shaped, dtype=np.float64).ravel()
