"""
Finite operator-valued random variables.

A model is a finite sample space with weights and, for each atom index,
one d x d complex matrix per sample. Averages over it are exact sums.
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class OperatorModel:
    """
    :param dim: matrix dimension d
    :param weights: sample weights (Fractions or floats), positive, summing to 1
    :param ops: dict atom index -> complex array of shape (K, d, d)
    """

    dim: int
    weights: tuple
    ops: dict
    w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        weights = tuple(self.weights)
        w = np.array([float(x) for x in weights])
        if len(w) == 0 or np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-14:
            raise ValidationError("weights must be positive and sum to 1")
        ops = {}
        for k, a in self.ops.items():
            a = np.asarray(a, dtype=complex)
            if a.shape != (len(w), self.dim, self.dim):
                raise ValidationError(f"atom {k}: expected shape {(len(w), self.dim, self.dim)}, got {a.shape}")
            a.setflags(write=False)
            ops[int(k)] = a
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "w", w)

    @property
    def n_samples(self):
        return len(self.w)

    @property
    def atoms(self):
        return sorted(self.ops)

    def is_commuting(self, tol=1e-12):
        """True when all assignments commute within every sample."""
        mats = list(self.ops.values())
        for i, a in enumerate(mats):
            for b in mats[i:]:
                if np.max(np.abs(a @ b - b @ a)) > tol:
                    return False
        return True

    def to_dict(self):
        samples = []
        for k in range(self.n_samples):
            ops = {
                str(i): [[float(z.real), float(z.imag)] for z in a[k].ravel()]
                for i, a in sorted(self.ops.items())
            }
            samples.append({"w": float(self.w[k]), "ops": ops})
        return {"dim": self.dim, "samples": samples}

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)


@dataclass(frozen=True, eq=False)
class SplitModel(OperatorModel):
    """Operator model whose atoms fall into two groups A and B."""

    group_a: tuple = ()
    group_b: tuple = ()
    correlated: bool = False


def load_model(path):
    """Read a model from the JSON layout written by OperatorModel.save."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return model_from_dict(data)


def model_from_dict(data):
    try:
        d = int(data["dim"])
        samples = data["samples"]
        weights = [s["w"] for s in samples]
        atoms = sorted({int(k) for s in samples for k in s["ops"]})
        ops = {}
        for i in atoms:
            stack = []
            for s in samples:
                if str(i) not in s["ops"]:
                    raise ValidationError(f"atom {i} missing from a sample")
                flat = np.array(s["ops"][str(i)], dtype=float)
                stack.append((flat[:, 0] + 1j * flat[:, 1]).reshape(d, d))
            ops[i] = np.array(stack)
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed model file: {exc}") from None
    total = sum(weights)
    return OperatorModel(d, tuple(w / total for w in weights), ops)


def _uniform_weights(k):
    return tuple(Fraction(1, k) for _ in range(k))


def _random_ops(rng, dim, atoms, k, commuting):
    if commuting:
        # shared eigenbasis, random spectra per sample and atom
        z = rng.uniform(-1, 1, (dim, dim)) + 1j * rng.uniform(-1, 1, (dim, dim))
        q, _ = np.linalg.qr(z)
        out = {}
        for i in atoms:
            lam = rng.uniform(-1, 1, (k, dim)) + 1j * rng.uniform(-1, 1, (k, dim))
            out[i] = np.einsum("ab,kb,cb->kac", q, lam, q.conj())
        return out
    return {
        i: rng.uniform(-1, 1, (k, dim, dim)) + 1j * rng.uniform(-1, 1, (k, dim, dim))
        for i in atoms
    }


def build_random_model(dim, n_atoms, n_samples, seed, commuting=False):
    """
    Random model with uniform weights and entries uniform in [-1, 1] (real and imaginary).

    With `commuting=True` all matrices share one eigenbasis, which gives
    the c-number limit used by the Classical map.
    """
    if dim < 1 or n_atoms < 1 or n_samples < 1:
        raise ValidationError("dim, n_atoms and n_samples must be positive")
    rng = np.random.default_rng(seed)
    ops = _random_ops(rng, dim, range(1, n_atoms + 1), n_samples, commuting)
    return OperatorModel(dim, _uniform_weights(n_samples), ops)


def build_split_model(dim, split, seeds=(0, 1), n_atoms=None, n_samples=3,
                      correlated=False, commuting=False, group_a=None):
    """
    Two-group model. Group A holds atoms 1..split (or `group_a`), group B the rest.

    The joint measure is the product of two independent sample spaces.
    With `correlated=True` the B sample is instead tied to the A sample,
    so the groups are statistically dependent.
    """
    n_atoms = n_atoms if n_atoms is not None else max(2 * split, split + 1)
    if group_a is None:
        group_a = tuple(range(1, split + 1))
    group_a = tuple(sorted(group_a))
    group_b = tuple(i for i in range(1, n_atoms + 1) if i not in group_a)
    if not group_a or not group_b:
        raise ValidationError("both groups must be non-empty")
    seed_a, seed_b = seeds
    rng_a, rng_b = np.random.default_rng(seed_a), np.random.default_rng(seed_b)
    if commuting:
        # one common eigenbasis so A and B matrices commute too
        rng = np.random.default_rng([seed_a, seed_b])
        both = _random_ops(rng, dim, range(1, n_atoms + 1), n_samples, True)
        ops_a = {i: both[i] for i in group_a}
        ops_b = {i: both[i] for i in group_b}
    else:
        ops_a = _random_ops(rng_a, dim, group_a, n_samples, False)
        ops_b = _random_ops(rng_b, dim, group_b, n_samples, False)
    k = n_samples
    if correlated:
        weights = _uniform_weights(k)
        ops = {**ops_a, **ops_b}
    else:
        weights = tuple(Fraction(1, k * k) for _ in range(k * k))
        ops = {i: np.repeat(a, k, axis=0) for i, a in ops_a.items()}
        ops.update({i: np.tile(b, (k, 1, 1)) for i, b in ops_b.items()})
    return SplitModel(dim, weights, ops, group_a=group_a, group_b=group_b, correlated=correlated)


def pauli_model():
    """Single-sample model with atoms 1, 2, 3 set to the Pauli matrices (pairwise anticommuting)."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return OperatorModel(2, (Fraction(1),), {1: sx[None], 2: sy[None], 3: sz[None]})
