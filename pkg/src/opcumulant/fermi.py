"""
Fermionic Fock-space oracle for reduced density matrices and their cumulants.

Occupation basis: bit j-1 of the basis index is orbital j, and the basis
state is a+_{j1} a+_{j2} ... |0> with j1 < j2 < ... . In bitstrings the
leftmost character is orbital 1. Operators carry the Jordan-Wigner sign
(-1)**(number of occupied orbitals below j).
"""
from fractions import Fraction
from functools import reduce
from itertools import combinations, permutations, product
from math import comb, factorial

import numpy as np

from .combinatorics import permutation_parity
from .errors import EnumerationLimitError, ValidationError
from .ordering import OrderingMapKind

MAX_ORBITALS = 12
MAX_RANK = 4
# dense storage guard: entries of an M^(2p) tensor
MAX_DENSE_ENTRIES = 1 << 24


class FockVector:
    """Vector in the 2**M dimensional Fock space, stored densely."""

    def __init__(self, n_orbitals, coeffs):
        if not 1 <= n_orbitals <= MAX_ORBITALS:
            raise EnumerationLimitError(f"n_orbitals={n_orbitals} outside 1..{MAX_ORBITALS}")
        coeffs = np.array(coeffs, dtype=complex)
        if coeffs.shape != (1 << n_orbitals,):
            raise ValidationError(f"expected {1 << n_orbitals} amplitudes, got shape {coeffs.shape}")
        coeffs.setflags(write=False)
        self.n_orbitals = n_orbitals
        self.coeffs = coeffs

    # construction

    @classmethod
    def from_dict(cls, amplitudes, n_orbitals=None):
        """Build from {bitstring: amplitude}; bitstring[k] is orbital k+1."""
        if not amplitudes:
            raise ValidationError("no amplitudes given")
        lengths = {len(b) for b in amplitudes}
        if len(lengths) != 1:
            raise ValidationError("bitstrings of different lengths")
        m = n_orbitals or lengths.pop()
        c = np.zeros(1 << m, dtype=complex)
        for bits, amp in amplitudes.items():
            c[bits_to_index(bits)] += amp
        return cls(m, c)

    @classmethod
    def slater_determinant(cls, n_orbitals, occupied):
        """Occupation basis state with the given 1-based orbitals filled."""
        c = np.zeros(1 << n_orbitals, dtype=complex)
        idx = 0
        for j in occupied:
            _check_orbital(j, n_orbitals)
            idx |= 1 << (j - 1)
        c[idx] = 1.0
        return cls(n_orbitals, c)

    @classmethod
    def rotated_determinant(cls, orbitals):
        """
        Determinant of the columns of an M x N orbital matrix.

        Builds prod_k (sum_j U[j,k] a+_j) |0> by repeated creation, then
        normalizes. Orthonormal columns give a normalized state directly.
        """
        u = np.asarray(orbitals, dtype=complex)
        m, n = u.shape
        vac = np.zeros(1 << m, dtype=complex)
        vac[0] = 1.0
        state = cls(m, vac)
        for k in reversed(range(n)):
            acc = np.zeros(1 << m, dtype=complex)
            for j in range(1, m + 1):
                if u[j - 1, k] != 0:
                    acc += u[j - 1, k] * apply_creation(state, j).coeffs
            state = cls(m, acc)
        return state.normalized()

    @classmethod
    def random_state(cls, n_orbitals, n_electrons, seed):
        """Random normalized state in the fixed particle-number sector."""
        rng = np.random.default_rng(seed)
        c = np.zeros(1 << n_orbitals, dtype=complex)
        sector = number_sector(n_orbitals, n_electrons)
        c[sector] = rng.normal(size=len(sector)) + 1j * rng.normal(size=len(sector))
        return cls(n_orbitals, c).normalized()

    @classmethod
    def product_state(cls, a, b):
        """
        Antisymmetrized product of `a` on orbitals 1..M_A and `b` on the next M_B orbitals.

        With A creators to the left of B creators no reordering sign appears.
        """
        c = np.outer(b.coeffs, a.coeffs).ravel()
        return cls(a.n_orbitals + b.n_orbitals, c)

    # queries

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def normalized(self):
        nrm = self.norm()
        if nrm == 0:
            raise ValidationError("zero vector cannot be normalized")
        return FockVector(self.n_orbitals, self.coeffs / nrm)

    def is_normalized(self, tol=1e-12):
        return abs(self.norm() - 1.0) <= tol

    def particle_numbers(self, tol=0.0):
        occ = np.nonzero(np.abs(self.coeffs) > tol)[0]
        return sorted(set(np.bitwise_count(occ.astype(np.uint64)).tolist()))

    def particle_number(self):
        """Common popcount of all occupied basis states, or None if mixed."""
        ns = self.particle_numbers()
        return ns[0] if len(ns) == 1 else None

    def to_dict(self, tol=0.0):
        out = {}
        for i in np.nonzero(np.abs(self.coeffs) > tol)[0]:
            out[index_to_bits(int(i), self.n_orbitals)] = complex(self.coeffs[i])
        return out

    def __repr__(self):
        return f"FockVector(n_orbitals={self.n_orbitals}, nnz={np.count_nonzero(self.coeffs)})"


def bits_to_index(bits):
    if any(ch not in "01" for ch in bits):
        raise ValidationError(f"bitstring {bits!r} must contain only 0 and 1")
    return sum(1 << k for k, ch in enumerate(bits) if ch == "1")


def index_to_bits(idx, m):
    return "".join("1" if idx >> k & 1 else "0" for k in range(m))


def number_sector(m, n):
    idx = np.arange(1 << m, dtype=np.uint64)
    return np.nonzero(np.bitwise_count(idx) == n)[0]


def _check_orbital(j, m):
    if not 1 <= j <= m:
        raise ValidationError(f"orbital {j} outside 1..{m}")


def _ladder(coeffs, m, j, create):
    """Apply a_j (create=False) or a+_j to a dense coefficient vector."""
    _check_orbital(j, m)
    bit = 1 << (j - 1)
    idx = np.arange(1 << m, dtype=np.uint64)
    below = np.bitwise_count(idx & np.uint64(bit - 1)).astype(np.int64)
    sign = 1 - 2 * (below & 1)
    occupied = (idx & np.uint64(bit)) != 0
    src = occupied if not create else ~occupied
    out = np.zeros_like(coeffs)
    targets = (idx[src] ^ np.uint64(bit)).astype(np.int64)
    out[targets] = sign[src] * coeffs[src]
    return out


def apply_annihilation(state, j):
    """a_j |state>, zero where orbital j is empty."""
    return FockVector(state.n_orbitals, _ladder(state.coeffs, state.n_orbitals, j, create=False))


def apply_creation(state, j):
    """a+_j |state>, zero where orbital j is filled."""
    return FockVector(state.n_orbitals, _ladder(state.coeffs, state.n_orbitals, j, create=True))


class AntisymmetricTensor:
    """
    Rank-(p, p) tensor stored densely with shape (M,)*2p.

    The first p axes are upper indices, the last p are lower indices.
    """

    def __init__(self, rank, data):
        data = np.asarray(data, dtype=complex)
        if data.ndim != 2 * rank or len(set(data.shape)) > 1:
            raise ValidationError(f"rank {rank} tensor needs {2 * rank} equal axes, got {data.shape}")
        self.rank = rank
        self.data = data

    @property
    def n_orbitals(self):
        return self.data.shape[0]

    @classmethod
    def zeros(cls, rank, m):
        return cls(rank, np.zeros((m,) * (2 * rank), dtype=complex))

    def matrix(self):
        m, p = self.n_orbitals, self.rank
        return self.data.reshape(m ** p, m ** p)

    def trace(self):
        return complex(np.trace(self.matrix()))

    def antisymmetry_error(self):
        """Largest deviation from sign flip under adjacent upper or lower swaps."""
        p, worst = self.rank, 0.0
        for k in range(p - 1):
            for off in (0, p):
                axes = list(range(2 * p))
                axes[off + k], axes[off + k + 1] = axes[off + k + 1], axes[off + k]
                worst = max(worst, float(np.max(np.abs(self.data + self.data.transpose(axes)), initial=0.0)))
        return worst

    def hermiticity_error(self):
        mat = self.matrix()
        return float(np.max(np.abs(mat - mat.conj().T), initial=0.0))

    def cross_block_max(self, group_a):
        """Largest |entry| whose indices include orbitals from both group A and its complement."""
        m, k = self.n_orbitals, 2 * self.rank
        in_a = np.zeros(m, dtype=bool)
        in_a[[j - 1 for j in group_a]] = True
        any_a = np.zeros((1,) * k, dtype=bool)
        any_b = np.zeros((1,) * k, dtype=bool)
        for ax in range(k):
            shape = [1] * k
            shape[ax] = m
            any_a = any_a | in_a.reshape(shape)
            any_b = any_b | ~in_a.reshape(shape)
        mixed = np.broadcast_to(any_a & any_b, self.data.shape)
        return float(np.max(np.abs(self.data[mixed]), initial=0.0))

    def max_abs(self):
        return float(np.max(np.abs(self.data), initial=0.0))

    def _compatible(self, other):
        if self.rank != other.rank or self.data.shape != other.data.shape:
            raise ValidationError("tensor rank or orbital count mismatch")

    def __add__(self, other):
        self._compatible(other)
        return AntisymmetricTensor(self.rank, self.data + other.data)

    def __sub__(self, other):
        self._compatible(other)
        return AntisymmetricTensor(self.rank, self.data - other.data)

    def __mul__(self, c):
        return AntisymmetricTensor(self.rank, complex(c) * self.data)

    __rmul__ = __mul__

    def nonzero_entries(self, tol=1e-14):
        """Yield (upper, lower, value) with 1-based orbitals for entries above tol."""
        p = self.rank
        for pos in zip(*np.nonzero(np.abs(self.data) > tol)):
            pos = [int(i) + 1 for i in pos]
            yield tuple(pos[:p]), tuple(pos[p:]), complex(self.data[tuple(i - 1 for i in pos)])


def _check_dense(m, p):
    if p < 1 or p > MAX_RANK:
        raise EnumerationLimitError(f"rank {p} outside 1..{MAX_RANK}")
    if m ** (2 * p) > MAX_DENSE_ENTRIES:
        raise EnumerationLimitError(f"dense rank-{p} tensor over {m} orbitals exceeds {MAX_DENSE_ENTRIES} entries")


def _scatter_map(m, p):
    """For every ordered p-tuple: position among sorted tuples (or -1) and permutation sign."""
    sorted_tuples = list(combinations(range(m), p))
    where = {t: k for k, t in enumerate(sorted_tuples)}
    pos = np.full(m ** p, -1, dtype=np.int64)
    sign = np.zeros(m ** p)
    for flat, tup in enumerate(product(range(m), repeat=p)):
        if len(set(tup)) < p:
            continue
        key = tuple(sorted(tup))
        pos[flat] = where[key]
        rank = [key.index(v) + 1 for v in tup]
        sign[flat] = permutation_parity(rank)
    return sorted_tuples, pos, sign


def compute_rdm(state, p):
    """
    p-particle reduced density matrix by brute-force operator application.

    D^{i1..ip}_{j1..jp} = (1/p!) <Psi| a+_{i1}..a+_{ip} a_{jp}..a_{j1} |Psi>
    = (1/p!) <a_{ip}..a_{i1} Psi | a_{jp}..a_{j1} Psi>.
    """
    m = state.n_orbitals
    _check_dense(m, p)
    n = state.particle_number()
    if n is not None and p > n:
        raise ValidationError(f"rank {p} exceeds particle number {n}")
    tuples, pos, sign = _scatter_map(m, p)
    vecs = np.empty((len(tuples), 1 << m), dtype=complex)
    for k, tup in enumerate(tuples):
        v = state.coeffs
        for j in tup:  # a_{jp} ... a_{j1}: a_{j1} acts first
            v = _ladder(v, m, j + 1, create=False)
        vecs[k] = v
    packed = vecs.conj() @ vecs.T / factorial(p)
    valid = pos >= 0
    dense = np.zeros((m ** p, m ** p), dtype=complex)
    sub = packed[np.ix_(pos[valid], pos[valid])] * np.outer(sign[valid], sign[valid])
    dense[np.ix_(valid, valid)] = sub
    return AntisymmetricTensor(p, dense.reshape((m,) * (2 * p)))


def _antisymmetrize(data, axes):
    """Signed sum over permutations of the listed axes."""
    out = np.zeros_like(data)
    base = list(range(data.ndim))
    for perm in permutations(range(len(axes))):
        order = base.copy()
        for k, src in enumerate(perm):
            order[axes[k]] = axes[src]
        out += permutation_parity([x + 1 for x in perm]) * data.transpose(order)
    return out


def wedge(a, b):
    """
    Grassmann product of a rank-p and a rank-q tensor.

    Outer product, antisymmetrized over upper and over lower indices,
    scaled by 1/((p+q)!)**2.
    """
    if a.n_orbitals != b.n_orbitals:
        raise ValidationError("wedge of tensors over different orbital counts")
    p, q = a.rank, b.rank
    r = p + q
    _check_dense(a.n_orbitals, r)
    outer = np.multiply.outer(a.data, b.data)
    # axes now: a_up, a_lo, b_up, b_lo -> reorder to a_up, b_up, a_lo, b_lo
    order = list(range(p)) + list(range(2 * p, 2 * p + q)) + list(range(p, 2 * p)) + list(range(2 * p + q, 2 * r))
    t = outer.transpose(order)
    t = _antisymmetrize(t, list(range(r)))
    t = _antisymmetrize(t, list(range(r, 2 * r)))
    return AntisymmetricTensor(r, t / factorial(r) ** 2)


def wedge_all(tensors):
    return reduce(wedge, tensors)


def grassmann_table(p):
    """
    D_p as a list of (coefficient, ranks) wedge terms, read off the
    Grassmann moment expansion.
    """
    from .transforms import moments_from_cumulants

    out = []
    for t in moments_from_cumulants(p, OrderingMapKind.GRASSMANN).terms:
        out.append((Fraction(t.coeff), tuple(len(f) for f in t.factors)))
    return out


def reconstruct_rdm(cumulants, p):
    """D_p rebuilt from cumulant tensors {rank: Delta} with the Grassmann table."""
    m = cumulants[1].n_orbitals
    acc = AntisymmetricTensor.zeros(p, m)
    for coeff, ranks in grassmann_table(p):
        acc = acc + float(coeff) * wedge_all([cumulants[r] for r in ranks])
    return acc


def rdm_cumulants(state, max_p):
    """
    Cumulant tensors Delta_1..Delta_max_p by triangular subtraction.

    Returns a dict rank -> AntisymmetricTensor.
    """
    if not 1 <= max_p <= MAX_RANK:
        raise EnumerationLimitError(f"max_p={max_p} outside 1..{MAX_RANK}")
    deltas = {}
    for p in range(1, max_p + 1):
        d = compute_rdm(state, p)
        for coeff, ranks in grassmann_table(p):
            if ranks == (p,):
                continue
            d = d - float(coeff) * wedge_all([deltas[r] for r in ranks])
        deltas[p] = d
    return deltas


def expected_trace(n, p):
    return comb(n, p)


def parse_state_file(text):
    """
    Read "bitstring re im" lines; '#' starts a comment.

    Errors name the offending line. The state is normalized on load.
    """
    amps, width = {}, None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValidationError(f"line {lineno}: expected 'bitstring re im', got {raw!r}")
        bits, re_s, im_s = parts
        if any(ch not in "01" for ch in bits):
            raise ValidationError(f"line {lineno}: bad bitstring {bits!r}")
        if width is None:
            width = len(bits)
        elif len(bits) != width:
            raise ValidationError(f"line {lineno}: bitstring length {len(bits)} differs from {width}")
        try:
            amp = complex(float(re_s), float(im_s))
        except ValueError:
            raise ValidationError(f"line {lineno}: amplitude is not numeric") from None
        amps[bits] = amps.get(bits, 0) + amp
    if not amps:
        raise ValidationError("state file holds no amplitudes")
    if width > MAX_ORBITALS:
        raise ValidationError(f"line 1: {width} orbitals exceeds {MAX_ORBITALS}")
    return FockVector.from_dict(amps).normalized()


def load_state(path):
    with open(path, encoding="utf-8") as fh:
        return parse_state_file(fh.read())
