"""Unipotent connections on a polydisk and their parallel transport.

A connection is written ``nabla = d - Lambda`` with
``Lambda = sum_k A_k dt_k + sum_i N_i dt_i / t_i``, where the ``A_k`` are
matrices of truncated series and the ``N_i`` constant nilpotent residue
matrices.  Horizontal sections satisfy ``dH = Lambda H``.  All series here
have rational coefficients; p-adic numbers only appear when a transport
matrix is evaluated at points of the residue disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .exactnum import DomainError
from .padic import (
    QQ,
    IntegrabilityError,
    PadicMatrix,
    PadicScalar,
    TruncSeries,
    antiderivative,
    padic_log,
)

Matrix = tuple  # tuple of tuples of TruncSeries
ConstMatrix = tuple  # tuple of tuples of Fraction


# --------------------------------------------------------------------------
# matrix helpers


def mat(rows) -> Matrix:
    return tuple(tuple(r) for r in rows)


def mat_zero(n: int, names, cap: int, logs: bool = False) -> Matrix:
    z = TruncSeries(names, cap, {}, QQ, logs)
    return mat([[z] * n for _ in range(n)])


def mat_identity(n: int, names, cap: int, logs: bool = False) -> Matrix:
    z = TruncSeries(names, cap, {}, QQ, logs)
    one = z.one()
    return mat([[one if i == j else z for j in range(n)] for i in range(n)])


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return mat([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)])


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return mat([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)])


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = A[i][0] * B[0][j]
            for l in range(1, k):
                acc = acc + A[i][l] * B[l][j]
            row.append(acc)
        out.append(row)
    return mat(out)


def mat_map(f, A: Matrix) -> Matrix:
    return mat([[f(a) for a in r] for r in A])


def mat_is_zero(A: Matrix, upto: Optional[int] = None) -> bool:
    return all(a.agrees(a.zero(), upto) if upto is not None else a.is_zero() for r in A for a in r)


def mat_max_degree(A: Matrix) -> Optional[int]:
    degs = [a.degree() for r in A for a in r if not a.is_zero()]
    return max(degs) if degs else None


def const_to_series(C: ConstMatrix, names, cap: int, logs: bool = False) -> Matrix:
    return mat([[TruncSeries.constant(c, names, cap, QQ, logs) for c in r] for r in C])


def _cmat(C) -> ConstMatrix:
    return tuple(tuple(Fraction(x) for x in r) for r in C)


def _cmul(A: ConstMatrix, B: ConstMatrix) -> ConstMatrix:
    return tuple(tuple(sum(A[i][l] * B[l][j] for l in range(len(B))) for j in range(len(B[0]))) for i in range(len(A)))


def _cis_zero(A: ConstMatrix) -> bool:
    return all(x == 0 for r in A for x in r)


def is_nilpotent(N: ConstMatrix) -> bool:
    P = N
    for _ in range(len(N)):
        P = _cmul(P, N)
    return _cis_zero(P) or _cis_zero(N)


def commute(A: ConstMatrix, B: ConstMatrix) -> bool:
    return _cmul(A, B) == _cmul(B, A)


def mat_inverse_unipotent(H: Matrix) -> Matrix:
    """Inverse of ``I + M`` with ``M`` nilpotent (e.g. strictly triangular)."""
    n = len(H)
    names, cap, logs = H[0][0].names, H[0][0].cap, H[0][0].logs
    Id = mat_identity(n, names, cap, logs)
    M = mat_sub(H, Id)
    out, term = Id, Id
    for _ in range(n + max(cap, 0) + 1):
        term = mat_map(lambda a: -a, mat_mul(term, M))
        if mat_is_zero(term):
            break
        out = mat_add(out, term)
    return out


def _exact_inverse(A: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(A)
    M = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(A)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise DomainError("singular transport matrix")
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [r[n:] for r in M]


def _fmul(A, B):
    return [[sum(A[i][l] * B[l][j] for l in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


# --------------------------------------------------------------------------
# connections


@dataclass(frozen=True)
class ConnectionForm:
    """``Lambda = sum_k A_k dt_k + sum_{i in singular} N_i dt_i / t_i``."""

    dim: int
    names: tuple[str, ...]
    components: tuple  # one Matrix per variable
    residues: Mapping[int, ConstMatrix] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        comps = tuple(mat(A) for A in self.components)
        object.__setattr__(self, "components", comps)
        res = {int(i): _cmat(N) for i, N in dict(self.residues).items()}
        object.__setattr__(self, "residues", res)
        if len(comps) != len(self.names):
            raise DomainError("need one component matrix per variable")
        for A in comps:
            if len(A) != self.dim or any(len(r) != self.dim for r in A):
                raise DomainError("component matrices must be dim x dim")
            for r in A:
                for a in r:
                    if a.names != self.names:
                        raise DomainError("component entries use the wrong variables")
                    if a.ring != QQ:
                        raise DomainError("connections take rational coefficients")
        for i, N in res.items():
            if not 0 <= i < len(self.names):
                raise DomainError(f"singular variable index {i} out of range")
            if len(N) != self.dim:
                raise DomainError("residue matrices must be dim x dim")
            if not is_nilpotent(N):
                raise DomainError(f"residue along t_{i} is not nilpotent")
        keys = sorted(res)
        for a in keys:
            for b in keys:
                if a < b and not commute(res[a], res[b]):
                    raise DomainError(f"residues along t_{a} and t_{b} do not commute")

    @property
    def m(self) -> int:
        return len(self.names)

    @property
    def cap(self) -> int:
        return min(a.cap for A in self.components for r in A for a in r)

    @property
    def singular_vars(self) -> tuple[int, ...]:
        return tuple(sorted(i for i, N in self.residues.items() if not _cis_zero(N)))

    def regular_part(self) -> "ConnectionForm":
        return ConnectionForm(self.dim, self.names, self.components, {})

    def is_strictly_lower(self) -> bool:
        return all(A[i][j].is_zero() for A in self.components for i in range(self.dim) for j in range(i, self.dim))

    def to_record(self) -> dict:
        return {
            "dim": self.dim,
            "vars": list(self.names),
            "singular": list(self.singular_vars),
            "components": [[[a.to_record() for a in r] for r in A] for A in self.components],
            "residues": {str(i): [[_fstr(x) for x in r] for r in N] for i, N in self.residues.items()},
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "ConnectionForm":
        try:
            dim = int(rec["dim"])
            names = tuple(rec["vars"])
            comps = [mat([[TruncSeries.from_record(e) for e in r] for r in A]) for A in rec["components"]]
            res = {int(i): _cmat([[Fraction(x) for x in r] for r in N]) for i, N in dict(rec.get("residues", {})).items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed connection record: {exc}") from None
        return cls(dim, names, tuple(comps), res)

    @classmethod
    def nilpotent_column(cls, forms: Sequence[Sequence[TruncSeries]]) -> "ConnectionForm":
        """``Lambda`` with the 1-forms ``omega_j`` in the first column below the diagonal."""
        k = len(forms)
        f0 = forms[0][0]
        names, m = f0.names, f0.m
        cap = min(c.cap for w in forms for c in w)
        z = TruncSeries(names, cap, {}, QQ)
        comps = []
        for v in range(m):
            rows = [[z] * (k + 1) for _ in range(k + 1)]
            for j, w in enumerate(forms):
                if len(w) != m:
                    raise DomainError("each 1-form needs one component per variable")
                rows[j + 1][0] = w[v]
            comps.append(mat(rows))
        return cls(k + 1, names, tuple(comps), {})


def _fstr(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class FlatnessReport:
    flat: bool
    residual_degree: Optional[int]
    residuals: Mapping[tuple[int, int], Matrix]

    def __bool__(self) -> bool:
        return self.flat


def flatness_check(L: ConnectionForm) -> FlatnessReport:
    """Check ``dA_k/dt_l - dA_l/dt_k = [A_l, A_k]`` at truncation order.

    Derivatives lower the cap by one, so the comparison covers degrees
    ``< cap``.  The residual degree reported is the largest degree of a
    nonzero residual term.
    """
    res = {}
    worst: Optional[int] = None
    cap = L.cap - 1
    for l in range(L.m):
        for k in range(l + 1, L.m):
            Al, Ak = L.components[l], L.components[k]
            R = mat_sub(
                mat_sub(mat_map(lambda a: a.diff(l), Ak), mat_map(lambda a: a.diff(k), Al)),
                mat_sub(mat_mul(Al, Ak), mat_mul(Ak, Al)),
            )
            R = mat_map(lambda a: a.truncate(min(a.cap, cap)) if cap >= 0 else a, R)
            if not mat_is_zero(R):
                res[(l, k)] = R
                d = mat_max_degree(R)
                worst = d if worst is None else max(worst, d)
    return FlatnessReport(not res, worst, res)


# --------------------------------------------------------------------------
# transport


@dataclass(frozen=True)
class TransportResult:
    H: Matrix
    names: tuple[str, ...]
    order: int
    basepoint: tuple = ()

    def __post_init__(self):
        if not self.basepoint:
            object.__setattr__(self, "basepoint", (Fraction(0),) * len(self.names))

    @property
    def dim(self) -> int:
        return len(self.H)

    def entry(self, i: int, j: int) -> TruncSeries:
        return self.H[i][j]

    def to_record(self) -> dict:
        return {"vars": list(self.names), "order": self.order, "H": [[a.to_record() for a in r] for r in self.H]}


def _homogeneous_parts(A: Matrix, upto: int) -> list[Matrix]:
    return [mat_map(lambda a, d=d: a.homogeneous(d), A) for d in range(upto + 1)]


def parallel_transport(L: ConnectionForm, order: Optional[int] = None, check: bool = True) -> TransportResult:
    """Solve ``dH = Lambda H``, ``H(0) = I`` degree by degree.

    Writing ``H = sum_d H_d`` in homogeneous pieces, the Euler identity
    gives ``d H_d = sum_k t_k sum_{a+b=d-1} (A_k)_a H_b``.  Flatness makes
    this radial solution the unique horizontal one.
    """
    if L.singular_vars:
        raise DomainError("parallel_transport handles regular connections; use log_singular_transport")
    cap = L.cap + 1 if order is None else order
    if cap > L.cap + 1:
        raise DomainError(f"components known to degree {L.cap} only determine H to degree {L.cap + 1}")
    if check:
        rep = flatness_check(L)
        if not rep.flat:
            raise IntegrabilityError(f"connection is not flat (residual degree {rep.residual_degree})")
    n, names = L.dim, L.names
    comps = [mat_map(lambda a: a.truncate(min(a.cap, max(cap - 1, 0))), A) for A in L.components]
    # work at cap: every product below has degree <= cap
    comps = [mat_map(lambda a: TruncSeries(names, cap, a.terms, QQ), A) for A in comps]
    parts = [_homogeneous_parts(A, cap - 1) for A in comps]
    Hs = [mat_identity(n, names, cap)]
    for d in range(1, cap + 1):
        acc = mat_zero(n, names, cap)
        for k in range(L.m):
            inner = mat_zero(n, names, cap)
            for a in range(d):
                b = d - 1 - a
                inner = mat_add(inner, mat_mul(parts[k][a], Hs[b]))
            tk = TruncSeries.variable(k, names, cap)
            acc = mat_add(acc, mat_map(lambda x: x * tk, inner))
        Hs.append(mat_map(lambda x: x.scale_div(d), acc))
    H = Hs[0]
    for Hd in Hs[1:]:
        H = mat_add(H, Hd)
    return TransportResult(H, names, cap)


def transport_residual(L: ConnectionForm, res: TransportResult) -> Matrix:
    """``dH - Lambda H`` for every variable, stacked; zero at truncation order."""
    out = []
    for k in range(L.m):
        dH = mat_map(lambda a: a.diff(k), res.H)
        R = mat_sub(dH, mat_mul(L.components[k], res.H))
        upto = res.order - 1
        out.append(mat_map(lambda a: a.truncate(min(a.cap, upto)), R))
    return tuple(out)


def check_horizontal(L: ConnectionForm, res: TransportResult) -> bool:
    return all(mat_is_zero(R) for R in transport_residual(L, res))


def sequential_transport(L: ConnectionForm, order: int, var_order: Optional[Sequence[int]] = None) -> TransportResult:
    """Transport along coordinate axes one variable at a time.

    For ``var_order = (v1, v2, ...)`` this integrates the ODE in ``v1`` with
    the other variables at 0, then in ``v2`` with the later ones at 0, and
    so on.  For flat connections every ordering agrees with
    :func:`parallel_transport`; it is used as an independent check.
    """
    n, names, m = L.dim, L.names, L.m
    order_vars = list(range(m)) if var_order is None else list(var_order)
    if sorted(order_vars) != list(range(m)):
        raise DomainError("var_order must be a permutation of the variables")
    H = mat_identity(n, names, order)
    released: list[int] = []
    for v in order_vars:
        released.append(v)
        zero = TruncSeries(names, order + 1, {}, QQ)
        subs = {j: zero for j in range(m) if j not in released}
        A = mat_map(lambda a: TruncSeries(names, order, a.truncate(min(a.cap, order)).terms, QQ).restrict(subs) if subs else TruncSeries(names, order, a.truncate(min(a.cap, order)).terms, QQ), L.components[v])
        Id = mat_identity(n, names, order)
        K = Id
        for _ in range(order + 1):
            K_new = mat_add(Id, mat_map(lambda a: a.integrate(v).truncate(order), mat_mul(A, K)))
            if K_new == K:
                break
            K = K_new
        H = mat_mul(K, H)
    return TransportResult(H, names, order)


def _eval_matrix(H: Matrix, point: Sequence, p: int, N: int) -> tuple[list[list[Fraction]], int]:
    from .padic import ilog
    from .exactnum import valuation

    pt = [Fraction(x) for x in point]
    vs = [valuation(x, p) for x in pt]
    if any(v is not None and v < 1 for v in vs):
        raise DomainError("point lies outside the residue disk (needs valuation >= 1)")
    v = min((x for x in vs if x is not None), default=None)
    cap = min(a.cap for r in H for a in r)
    prec = N if v is None else min(N, (cap + 1) * v - ilog(cap + 1, p))
    if prec <= 0:
        raise DomainError("truncation leaves no significant digits at this point")
    return [[a.evaluate_exact(pt) for a in r] for r in H], prec


def transport_evaluate(res: TransportResult, x1: Sequence, x2: Sequence, p: int, N: int) -> PadicMatrix:
    """``H(x2) H(x1)^{-1}``: transport from the fibre at x1 to the fibre at x2."""
    if len(x1) != len(res.names) or len(x2) != len(res.names):
        raise DomainError("points have the wrong dimension")
    A, pa = _eval_matrix(res.H, x1, p, N)
    B, pb = _eval_matrix(res.H, x2, p, N)
    G = _fmul(B, _exact_inverse(A))
    try:
        return PadicMatrix(G, p, min(pa, pb))
    except DomainError as exc:
        raise DomainError(f"transport matrix is not p-integral: {exc}") from None


def coleman_disk_integral(forms: Sequence, x1: Sequence, x2: Sequence, p: int, N: int) -> list[PadicScalar]:
    """Integrals ``int_{x1}^{x2} omega_j`` inside one residue disk.

    Each ``omega_j`` is a single series (one variable) or a list of
    components.  Computed as the transport of the nilpotent connection
    with the ``omega_j`` below the diagonal, and cross-checked against
    differences of antiderivatives.
    """
    ws = [[w] if isinstance(w, TruncSeries) else list(w) for w in forms]
    if not ws:
        raise DomainError("no forms given")
    L = ConnectionForm.nilpotent_column(ws)
    res = parallel_transport(L)
    G = transport_evaluate(res, x1, x2, p, N)
    out = [G.entry(j + 1, 0) for j in range(len(ws))]
    for j, w in enumerate(ws):
        F = antiderivative(w)
        direct = F.evaluate(x2, p, N) - F.evaluate(x1, p, N)
        if not direct.agrees(out[j]):
            raise ArithmeticError(f"transport and antiderivative disagree on form {j}")
    return out


def pullback_form(w: TruncSeries, phi: TruncSeries) -> TruncSeries:
    """``phi^* (w(t) dt) = w(phi(t)) phi'(t) dt`` for one variable."""
    return w.compose([phi]) * phi.diff(0)


# --------------------------------------------------------------------------
# families: the Betti square


@dataclass(frozen=True)
class BettiReport:
    ok: bool
    residual: Matrix  # bottom-left block residual
    leaf: Matrix  # H(x,s) H(0,s)^{-1}
    fibrewise: Matrix


def betti_square_check(L: ConnectionForm, fibre_var: int = 0, order: Optional[int] = None) -> BettiReport:
    """Compare the leaf of the family connection with fibrewise transport.

    The leaf through the origin, moved back to the section ``x = 0`` by the
    cocycle ``H(x,s) H(0,s)^{-1}``, must agree with transport along the
    fibre variable alone at each fixed base parameter ``s``.
    """
    if not L.is_strictly_lower():
        raise DomainError("family connection must be strictly lower triangular (unipotent)")
    rep = flatness_check(L)
    if not rep.flat:
        raise IntegrabilityError(f"family connection is not flat (residual degree {rep.residual_degree})")
    res = parallel_transport(L, order, check=False)
    cap, names, n = res.order, L.names, L.dim
    zero = TruncSeries(names, cap, {}, QQ)
    H0 = mat_map(lambda a: a.restrict({fibre_var: zero}), res.H)
    leaf = mat_mul(res.H, mat_inverse_unipotent(H0))
    # fibrewise: ODE in the fibre variable, base variables as parameters
    A = mat_map(lambda a: TruncSeries(names, cap, a.truncate(min(a.cap, cap)).terms, QQ), L.components[fibre_var])
    Id = mat_identity(n, names, cap)
    K = Id
    for _ in range(cap + 1):
        K_new = mat_add(Id, mat_map(lambda a: a.integrate(fibre_var).truncate(cap), mat_mul(A, K)))
        if K_new == K:
            break
        K = K_new
    diff = mat_sub(leaf, K)
    block = mat([[diff[i][0]] for i in range(1, n)])
    ok = mat_is_zero(diff)
    return BettiReport(ok, block, leaf, K)


# --------------------------------------------------------------------------
# logarithmic singularities


def nilpotent_exp(terms: Sequence[tuple[ConstMatrix, TruncSeries]], n: int) -> Matrix:
    """``exp(sum_i N_i s_i)`` for commuting nilpotent ``N_i``, as a finite sum."""
    s0 = terms[0][1]
    names, cap = s0.names, s0.cap
    X = mat_zero(n, names, cap, s0.logs)
    for N, s in terms:
        X = mat_add(X, mat_map(lambda a: a, mat([[s * c for c in r] for r in N])))
    out = mat_identity(n, names, cap, s0.logs)
    P = out
    for k in range(1, n + 1):
        P = mat_mul(P, X)
        if mat_is_zero(P):
            break
        out = mat_add(out, mat_map(lambda a: a.scale_div(math.factorial(k)), P))
    return out


@dataclass(frozen=True)
class LogTransport:
    H: Matrix  # exp(sum N_i L_i) G, entries carry log symbols
    exp_part: Matrix
    regular: TransportResult
    commutes_with_regular: bool

    def analytic_part(self) -> Matrix:
        """Entries with every log symbol set to zero."""
        return mat_map(lambda a: a.drop_logs(), self.H)


def log_singular_transport(Ns: Sequence, G: TransportResult, L: Optional[ConnectionForm] = None) -> LogTransport:
    """``exp(sum_i N_i L_i) . G`` with ``L_i = log t_i`` kept formal.

    ``Ns`` has one constant matrix per variable (zero for regular ones).
    When the regular connection ``L`` is supplied, the result is checked to
    satisfy ``theta_i Gt = (N_i + t_i E A_i E^{-1}) Gt`` with
    ``E = exp(sum N_j L_j)``; if the ``A_i`` commute with the ``N_j`` this
    is the connection ``sum N_i dt_i/t_i + Lambda``.
    """
    n, names, cap = G.dim, G.names, G.order
    if len(Ns) != len(names):
        raise DomainError("need one residue matrix per variable (use zeros)")
    mats = [_cmat(N) for N in Ns]
    for i, N in enumerate(mats):
        if len(N) != n or any(len(r) != n for r in N):
            raise DomainError("residue matrices must match the transport dimension")
        if not is_nilpotent(N):
            raise DomainError(f"N_{i} is not nilpotent")
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            if not commute(mats[a], mats[b]):
                raise DomainError(f"N_{a} and N_{b} do not commute")
    Ls = [TruncSeries.log_symbol(i, names, cap) for i in range(len(names))]
    E = nilpotent_exp(list(zip(mats, Ls)), n)
    Gl = mat_map(lambda a: a.with_logs(), G.H)
    Ht = mat_mul(E, Gl)
    commutes = True
    if L is not None:
        for A in L.components:
            for N in mats:
                NA = mat_mul(const_to_series(N, names, cap), A)
                AN = mat_mul(A, const_to_series(N, names, cap))
                if not mat_is_zero(mat_sub(NA, AN)):
                    commutes = False
        Einv = nilpotent_exp([(tuple(tuple(-x for x in r) for r in N), s) for N, s in zip(mats, Ls)], n)
        for i in range(len(names)):
            lhs = mat_map(lambda a: a.euler(i), Ht)
            Ai = mat_map(lambda a: a.with_logs().mul_var(i), L.components[i])
            conj = mat_mul(mat_mul(E, Ai), Einv)
            rhs = mat_mul(mat_add(const_to_series(mats[i], names, cap, True), conj), Ht)
            R = mat_map(lambda a: a.truncate(min(a.cap, cap - 1)), mat_sub(lhs, rhs))
            if not mat_is_zero(R):
                raise IntegrabilityError(f"log transport fails the horizontality check along t_{i}")
    return LogTransport(Ht, E, G, commutes)


@dataclass(frozen=True)
class ResidueFunctional:
    coefficients: tuple[Fraction, ...]
    kernel_basis: tuple[tuple[Fraction, ...], ...]
    horizontal: bool

    def __call__(self, v: Sequence) -> Fraction:
        return sum(Fraction(c) * Fraction(x) for c, x in zip(self.coefficients, v))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)

    def stoll_projection(self, log_vector: Sequence) -> tuple:
        """Pair a vector of abelian integrals with the residue-free differentials."""
        return tuple(sum(Fraction(w) * x for w, x in zip(row, log_vector)) for row in self.kernel_basis)


def _kernel_of_covector(c: Sequence[Fraction]) -> tuple[tuple[Fraction, ...], ...]:
    k = len(c)
    piv = next((i for i, x in enumerate(c) if x != 0), None)
    if piv is None:
        return tuple(tuple(Fraction(int(i == j)) for j in range(k)) for i in range(k))
    basis = []
    for j in range(k):
        if j == piv:
            continue
        v = [Fraction(0)] * k
        v[j] = Fraction(1)
        v[piv] = -c[j] / c[piv]
        basis.append(tuple(v))
    return tuple(basis)


def residue_functional(L: ConnectionForm, u: int) -> ResidueFunctional:
    """Residue map read from the bottom-left block of ``N_0``.

    ``L`` must be in normal form ``d - N_0 du/u - sum N_i dt_i/t_i``: all
    regular components vanish.  Residues along the base are constant, so
    the functional is constant on the base disk; ``horizontal`` records
    whether ``N_0`` commutes with the other residues, which keeps it
    invariant under the log transport.
    """
    if not all(a.is_zero() for A in L.components for r in A for a in r):
        raise DomainError("connection is not in normal form (nonzero regular part)")
    if u not in L.residues:
        raise DomainError(f"no residue along t_{u}")
    N0 = L.residues[u]
    coeffs = tuple(N0[i][0] for i in range(1, L.dim))
    horiz = all(commute(N0, N) for i, N in L.residues.items() if i != u)
    return ResidueFunctional(coeffs, _kernel_of_covector(coeffs), horiz)


# --------------------------------------------------------------------------
# built-in examples


def demo_family(cap: int = 12, perturbed: bool = False) -> ConnectionForm:
    """``A dx + B ds`` with ``A = [[0,0],[1+s,0]]``, ``B = [[0,0],[x,0]]``.

    ``perturbed`` replaces ``x`` by ``x^2`` in ``B``, which breaks flatness.
    """
    names = ("x", "s")
    x = TruncSeries.variable(0, names, cap)
    s = TruncSeries.variable(1, names, cap)
    z = x.zero()
    A = mat([[z, z], [1 + s, z]])
    B = mat([[z, z], [x * x if perturbed else x, z]])
    return ConnectionForm(2, names, (A, B))


def log_of_one_plus(p: int, N: int) -> PadicScalar:
    return padic_log(PadicScalar.from_rational(1 + p, p, N))
