"""Standard-form semidefinite programming over complex Hermitian blocks.

An instance asks to maximize sum_b Re Tr(C_b^dagger Z_b) over PSD Hermitian
blocks Z_b subject to equality constraints sum_b Re Tr(F_qb^dagger Z_b) =
rhs_q. Hermitian data is doubled into real symmetric form and solved by an
infeasible primal-dual interior-point method with Nesterov-Todd scaling.

Boundedness is enforced internally with a trace cap Tr(Z) + t = M_big
(slack scalar t >= 0, M_big = 10 * total dimension * rhs scale); a binding
cap is reported as unboundedness. The cap is redundant for every instance
produced by this package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    BadArgsError,
    DimensionMismatchError,
    FormatError,
    InfeasibleError,
    UnboundedError,
)

COEFF_HERMITICITY_TOL = 1e-12
DEFAULT_TOL = 1e-6
FEAS_TOL = 1e-8
PSD_SLACK = 1e-8
RESIDUAL_SCALE_TOL = 1e-7
MAX_ITERS = 120
MU_FLOOR = 1e-13

Entry = tuple[str, int, int, complex]


@dataclass(frozen=True)
class SdpConstraint:
    """sum over entries (b, r, c, v) of Re Tr(F^dagger Z_b) = rhs, where F
    has value v at (r, c) and conj(v) at (c, r); only r <= c is stored."""

    entries: tuple[Entry, ...]
    rhs: float


@dataclass(frozen=True)
class SdpInstance:
    blocks: tuple[tuple[str, int], ...]
    objective: dict[str, np.ndarray]
    constraints: tuple[SdpConstraint, ...]

    def __post_init__(self):
        labels = {}
        for label, dim in self.blocks:
            if dim < 1:
                raise BadArgsError(f"block {label!r} must have dim >= 1")
            if label in labels:
                raise BadArgsError(f"duplicate block label {label!r}")
            labels[label] = dim
        for label, c in self.objective.items():
            if label not in labels:
                raise BadArgsError(f"objective references unknown block {label!r}")
            d = labels[label]
            c = np.asarray(c, dtype=complex)
            if c.shape != (d, d):
                raise DimensionMismatchError(f"objective block {label!r} shape")
            if np.linalg.norm(c - c.conj().T) > COEFF_HERMITICITY_TOL * max(
                1.0, float(np.linalg.norm(c))
            ):
                raise BadArgsError(f"objective block {label!r} is not Hermitian")
            self.objective[label] = (c + c.conj().T) / 2
        for q, con in enumerate(self.constraints):
            for b, r, c, v in con.entries:
                if b not in labels:
                    raise BadArgsError(f"constraint {q} references block {b!r}")
                d = labels[b]
                if not (0 <= r <= c < d):
                    raise BadArgsError(f"constraint {q}: bad entry index ({r}, {c})")
                if r == c and abs(complex(v).imag) > COEFF_HERMITICITY_TOL:
                    raise BadArgsError(f"constraint {q}: diagonal entry not real")

    @property
    def block_dims(self) -> dict[str, int]:
        return dict(self.blocks)


@dataclass(frozen=True)
class SdpSolution:
    """Primal blocks, dual multipliers, objective values, and the gap."""

    blocks: dict[str, np.ndarray]
    y: np.ndarray
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    status: str  # "optimal" or "max_iterations" (best iterate, non-certified)

    @property
    def certified(self) -> bool:
        return self.status == "optimal"


def constraint_value(inst: SdpInstance, con: SdpConstraint, blocks) -> float:
    total = 0.0
    for b, r, c, v in con.entries:
        z = blocks[b][r, c]
        if r == c:
            total += float(np.real(v)) * float(np.real(z))
        else:
            total += 2.0 * float(np.real(np.conj(v) * z))
    return total


def objective_value(inst: SdpInstance, blocks) -> float:
    total = 0.0
    for label, c in inst.objective.items():
        total += float(np.real(np.trace(c.conj().T @ blocks[label])))
    return total


# --- Hermitian-to-symmetric doubling -----------------------------------------


def _embed_matrix(h: np.ndarray) -> np.ndarray:
    """H -> [[Re H, -Im H], [Im H, Re H]]; symmetric when H is Hermitian."""
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def _unembed_matrix(t: np.ndarray) -> np.ndarray:
    """Average back to the complex form: values are halved by design."""
    m = t.shape[0] // 2
    z11, z12 = t[:m, :m], t[:m, m:]
    z21, z22 = t[m:, :m], t[m:, m:]
    return ((z11 + z22) + 1j * (z21 - z12)) / 2


def _embed_entries(entries, dims) -> list[tuple[str, int, int, float]]:
    """Sparse real symmetric entries (upper triangle) of the doubled F."""
    # Expand to the full complex matrix first; each real coordinate of the
    # doubled matrix is then produced by exactly one complex coordinate.
    full_complex: dict[tuple[str, int, int], complex] = {}
    for b, r, c, v in entries:
        v = complex(v)
        full_complex[(b, r, c)] = full_complex.get((b, r, c), 0.0) + v
        if r != c:
            full_complex[(b, c, r)] = full_complex.get((b, c, r), 0.0) + v.conjugate()
    out = {}
    for (b, i, j), w in full_complex.items():
        m = dims[b]
        for ei, ej, ew in (
            (i, j, w.real),
            (i, j + m, -w.imag),
            (i + m, j, w.imag),
            (i + m, j + m, w.real),
        ):
            if ei <= ej and ew != 0.0:
                out[(b, ei, ej)] = ew
    return [(b, i, j, w) for (b, i, j), w in sorted(out.items())]


def real_embedding(inst: SdpInstance):
    """Double every complex block into a real symmetric block of twice the
    dimension. Objective and rhs values double; the returned back-map undoes
    the factor and restores complex Hermitian primal blocks."""
    dims = inst.block_dims
    blocks = tuple((label, 2 * d) for label, d in inst.blocks)
    objective = {
        label: _embed_matrix(c) for label, c in inst.objective.items()
    }
    constraints = []
    for con in inst.constraints:
        emb = _embed_entries(con.entries, dims)
        constraints.append(
            SdpConstraint(
                entries=tuple((b, i, j, complex(w)) for b, i, j, w in emb),
                rhs=2.0 * con.rhs,
            )
        )
    embedded = SdpInstance(
        blocks=blocks, objective=objective, constraints=tuple(constraints)
    )

    def back_map(sol: SdpSolution) -> SdpSolution:
        return SdpSolution(
            blocks={
                label: _unembed_matrix(sol.blocks[label]) for label, _ in inst.blocks
            },
            y=sol.y,
            primal_value=sol.primal_value / 2.0,
            dual_value=sol.dual_value / 2.0,
            gap=sol.gap / 2.0,
            iterations=sol.iterations,
            status=sol.status,
        )

    return embedded, back_map


# --- interior-point core (real symmetric data) --------------------------------


class _BlockData:
    """Per-block constraint entries in full symmetric form, CSR by owner."""

    def __init__(self, dim: int, cobj: np.ndarray):
        self.dim = dim
        self.cobj = cobj
        self.rows = np.zeros(0, dtype=np.intp)
        self.cols = np.zeros(0, dtype=np.intp)
        self.vals = np.zeros(0)
        self.owner = np.zeros(0, dtype=np.intp)
        self.q_list = np.zeros(0, dtype=np.intp)
        self.q_ptr = np.zeros(1, dtype=np.intp)

    def finalize(self, rows, cols, vals, owner):
        order = np.argsort(owner, kind="stable")
        self.rows = np.asarray(rows, dtype=np.intp)[order]
        self.cols = np.asarray(cols, dtype=np.intp)[order]
        self.vals = np.asarray(vals, dtype=float)[order]
        self.owner = np.asarray(owner, dtype=np.intp)[order]
        qs, starts = np.unique(self.owner, return_index=True)
        self.q_list = qs
        self.q_ptr = np.append(starts, self.owner.size)


def _compile_real(inst: SdpInstance) -> tuple[list[_BlockData], np.ndarray, list[str]]:
    labels = [label for label, _ in inst.blocks]
    dims = inst.block_dims
    data = {
        label: {"rows": [], "cols": [], "vals": [], "owner": []} for label in labels
    }
    for q, con in enumerate(inst.constraints):
        for b, r, c, v in con.entries:
            w = float(np.real(v))
            d = data[b]
            d["rows"].append(r)
            d["cols"].append(c)
            d["vals"].append(w)
            d["owner"].append(q)
            if r != c:
                d["rows"].append(c)
                d["cols"].append(r)
                d["vals"].append(w)
                d["owner"].append(q)
    blocks = []
    for label in labels:
        dim = dims[label]
        cobj = np.real(inst.objective.get(label, np.zeros((dim, dim)))).astype(float)
        blk = _BlockData(dim, (cobj + cobj.T) / 2)
        d = data[label]
        blk.finalize(d["rows"], d["cols"], d["vals"], d["owner"])
        blocks.append(blk)
    b_vec = np.array([con.rhs for con in inst.constraints], dtype=float)
    return blocks, b_vec, labels


def _a_of(blocks, zs, m) -> np.ndarray:
    out = np.zeros(m)
    for blk, z in zip(blocks, zs):
        if blk.owner.size:
            w = blk.vals * z[blk.rows, blk.cols]
            out += np.bincount(blk.owner, weights=w, minlength=m)
    return out


def _at_of(blocks, y) -> list[np.ndarray]:
    outs = []
    for blk in blocks:
        out = np.zeros((blk.dim, blk.dim))
        if blk.owner.size:
            np.add.at(out, (blk.rows, blk.cols), blk.vals * y[blk.owner])
        outs.append((out + out.T) / 2)
    return outs


def _chol_psd(x: np.ndarray) -> np.ndarray:
    jitter = 0.0
    base = max(float(np.trace(x)) / x.shape[0], 1e-300)
    for _ in range(12):
        try:
            return np.linalg.cholesky(
                x + jitter * np.eye(x.shape[0]) if jitter else x
            )
        except np.linalg.LinAlgError:
            jitter = max(jitter * 10.0, 1e-15 * base)
    raise np.linalg.LinAlgError("matrix not positive definite")


def _nt_scaling(z: np.ndarray, s: np.ndarray) -> np.ndarray:
    lz = _chol_psd(z)
    k = lz.T @ s @ lz
    w, q = np.linalg.eigh((k + k.T) / 2)
    w = np.clip(w, 1e-300, None)
    inv_sqrt = (q * (w**-0.5)) @ q.T
    wmat = lz @ inv_sqrt @ lz.T
    return (wmat + wmat.T) / 2


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest alpha with x + alpha dx >= 0, via L^-1 dx L^-T eigenvalues."""
    l = _chol_psd(x)
    g = scipy.linalg.solve_triangular(l, dx, lower=True)
    g = scipy.linalg.solve_triangular(l, g.T, lower=True).T
    lam = float(np.linalg.eigvalsh((g + g.T) / 2)[0])
    if lam >= -1e-14:
        return np.inf
    return -1.0 / lam


def _schur(blocks, ws, m) -> np.ndarray:
    mat = np.zeros((m, m))
    for blk, w in zip(blocks, ws):
        if not blk.q_list.size:
            continue
        for qi in range(blk.q_list.size):
            q = int(blk.q_list[qi])
            lo, hi = blk.q_ptr[qi], blk.q_ptr[qi + 1]
            k = blk.rows[lo:hi]
            l = blk.cols[lo:hi]
            v = blk.vals[lo:hi]
            h = (w[:, k] * v) @ w[l, :]
            contrib = np.bincount(
                blk.owner, weights=blk.vals * h[blk.rows, blk.cols], minlength=m
            )
            mat[:, q] += contrib
    return (mat + mat.T) / 2


def _solve_real(inst: SdpInstance, tol: float) -> SdpSolution:
    blocks, b_vec, labels = _compile_real(inst)
    m = b_vec.size
    nu = sum(blk.dim for blk in blocks)
    scale_b = 1.0 + float(np.max(np.abs(b_vec))) if m else 1.0
    scale_c = 1.0 + max(
        (float(np.linalg.norm(blk.cobj, 2)) for blk in blocks), default=0.0
    )
    zs = [10.0 * scale_b * np.eye(blk.dim) for blk in blocks]
    ss = [10.0 * scale_c * np.eye(blk.dim) for blk in blocks]
    y = np.zeros(m)

    best = None
    best_merit = np.inf
    for it in range(MAX_ITERS):
        rp = b_vec - _a_of(blocks, zs, m)
        aty = _at_of(blocks, y)
        rd = [blk.cobj + s - at for blk, s, at in zip(blocks, ss, aty)]
        mu = sum(float(np.sum(z * s)) for z, s in zip(zs, ss)) / nu
        pobj = sum(float(np.sum(blk.cobj * z)) for blk, z in zip(blocks, zs))
        dobj = float(b_vec @ y)
        rel_gap = abs(dobj - pobj) / max(1.0, abs(pobj))
        pres = float(np.linalg.norm(rp)) / scale_b
        dres = max(float(np.linalg.norm(r)) for r in rd) / scale_c
        merit = max(pres, dres, rel_gap)
        if merit < best_merit:
            best_merit = merit
            best = (zs, y.copy(), pobj, dobj, it)
        if pres <= FEAS_TOL and dres <= FEAS_TOL and (
            rel_gap <= tol or nu * mu / max(1.0, abs(pobj)) <= 0.5 * tol
        ):
            return _finish(labels, zs, y, pobj, dobj, it + 1, "optimal")
        if mu / max(1.0, abs(pobj)) < MU_FLOOR:
            break  # numerical floor: no further progress is possible

        # Divergence heuristics: Farkas certificate for infeasibility.
        ynorm = float(np.linalg.norm(y, np.inf))
        if ynorm > 1e8 * scale_b or dobj < -1e9 * scale_b:
            yhat = y / max(float(np.linalg.norm(y)), 1e-300)
            athat = _at_of(blocks, yhat)
            mineig = min(float(np.linalg.eigvalsh(a)[0]) for a in athat)
            if mineig > -1e-6 and float(b_vec @ yhat) < -1e-8:
                raise InfeasibleError(
                    "primal infeasible (dual improving ray found)", certificate=yhat
                )

        ws = [_nt_scaling(z, s) for z, s in zip(zs, ss)]
        schur = _schur(blocks, ws, m)
        diag_scale = max(float(np.max(np.diag(schur))), 1e-300)
        ridge = 1e-14 * diag_scale
        factor = None
        for _ in range(10):
            try:
                factor = scipy.linalg.cho_factor(
                    schur + ridge * np.eye(m), lower=True
                )
                break
            except np.linalg.LinAlgError:
                ridge *= 100.0
        if factor is None:
            break

        s_inv = []
        for s in ss:
            ls = _chol_psd(s)
            inv = scipy.linalg.solve_triangular(ls, np.eye(ls.shape[0]), lower=True)
            s_inv.append(inv.T @ inv)

        def newton(sigma_mu: float):
            rcs = [
                sigma_mu * si - z for si, z in zip(s_inv, zs)
            ]
            wrdw = [w @ r @ w for w, r in zip(ws, rd)]
            rhs = _a_of(blocks, rcs, m) + _a_of(blocks, wrdw, m) - rp
            dy = scipy.linalg.cho_solve(factor, rhs)
            daty = _at_of(blocks, dy)
            dss = [da - r for da, r in zip(daty, rd)]
            dzs = [
                rc - w @ ds @ w for rc, w, ds in zip(rcs, ws, dss)
            ]
            dzs = [(dz + dz.T) / 2 for dz in dzs]
            dss = [(ds + ds.T) / 2 for ds in dss]
            return dzs, dy, dss

        # Predictor (affine direction) fixes the centering weight.
        dza, dya, dsa = newton(0.0)
        ap = min((_max_step(z, dz) for z, dz in zip(zs, dza)), default=np.inf)
        ad = min((_max_step(s, ds) for s, ds in zip(ss, dsa)), default=np.inf)
        ap, ad = min(1.0, 0.99 * ap), min(1.0, 0.99 * ad)
        mu_aff = sum(
            float(np.sum((z + ap * dz) * (s + ad * ds)))
            for z, dz, s, ds in zip(zs, dza, ss, dsa)
        ) / nu
        sigma = min(1.0, max((mu_aff / mu) ** 3, 1e-10))

        dzs, dy, dss = newton(sigma * mu)
        ap = min((_max_step(z, dz) for z, dz in zip(zs, dzs)), default=np.inf)
        ad = min((_max_step(s, ds) for s, ds in zip(ss, dss)), default=np.inf)
        tau = 0.98
        ap, ad = min(1.0, tau * ap), min(1.0, tau * ad)
        zs = [z + ap * dz for z, dz in zip(zs, dzs)]
        ss = [s + ad * ds for s, ds in zip(ss, dss)]
        y = y + ad * dy

    zs, y, pobj, dobj, it = best
    return _finish(labels, zs, y, pobj, dobj, it + 1, "max_iterations")


def _finish(labels, zs, y, pobj, dobj, iters, status) -> SdpSolution:
    return SdpSolution(
        blocks={label: z for label, z in zip(labels, zs)},
        y=y,
        primal_value=pobj,
        dual_value=dobj,
        gap=dobj - pobj,
        iterations=iters,
        status=status,
    )


# --- public driver -------------------------------------------------------------

_BOUND_BLOCK = "_trace_bound"


def _with_trace_bound(inst: SdpInstance) -> tuple[SdpInstance, float]:
    total_dim = sum(d for _, d in inst.blocks)
    rhs_scale = max([1.0] + [abs(c.rhs) for c in inst.constraints])
    m_big = 10.0 * total_dim * rhs_scale
    # Written as Tr(Z)/M + t = 1 so the row is on the same scale as the rest.
    w = complex(1.0 / m_big)
    entries = [(_BOUND_BLOCK, 0, 0, 1.0 + 0.0j)]
    for label, d in inst.blocks:
        entries.extend((label, i, i, w) for i in range(d))
    bounded = SdpInstance(
        blocks=inst.blocks + ((_BOUND_BLOCK, 1),),
        objective=dict(inst.objective),
        constraints=inst.constraints
        + (SdpConstraint(entries=tuple(entries), rhs=1.0),),
    )
    return bounded, m_big


def solve(inst: SdpInstance, tol: float = DEFAULT_TOL) -> SdpSolution:
    """Solve a complex-block SDP to the requested relative gap tolerance.

    Deterministic for a fixed instance and tolerance. Raises Infeasible or
    Unbounded when detected; an iteration-capped run returns the best
    iterate with status "max_iterations" (certify() will fail it).
    """
    if tol <= 0:
        raise BadArgsError("tol must be positive")
    bounded, m_big = _with_trace_bound(inst)
    embedded, back1 = real_embedding(bounded)
    sol = _solve_real(embedded, tol)
    sol = back1(sol)
    trace_total = sum(
        float(np.real(np.trace(sol.blocks[label]))) for label, _ in inst.blocks
    )
    if trace_total >= 0.99 * m_big:
        raise UnboundedError(
            f"objective unbounded (trace cap {m_big:.3g} is active)"
        )
    return SdpSolution(
        blocks={label: sol.blocks[label] for label, _ in inst.blocks},
        y=sol.y[: len(inst.constraints)],
        primal_value=sol.primal_value,
        dual_value=sol.dual_value,
        gap=sol.gap,
        iterations=sol.iterations,
        status=sol.status,
    )


@dataclass(frozen=True)
class CertifyReport:
    passed: bool
    checks: tuple[tuple[str, float, float, bool], ...]  # (name, value, bound, ok)

    def failures(self) -> list[str]:
        return [name for name, _, _, ok in self.checks if not ok]


def certify(inst: SdpInstance, sol: SdpSolution, tol: float = DEFAULT_TOL) -> CertifyReport:
    """Recompute residuals, PSD slacks, and the duality gap of a solution."""
    checks = []
    for label, _ in inst.blocks:
        z = sol.blocks[label]
        herm = float(np.linalg.norm(z - z.conj().T))
        checks.append((f"hermitian[{label}]", herm, 1e-9 * max(1.0, float(np.linalg.norm(z))), None))
        mineig = float(np.linalg.eigvalsh((z + z.conj().T) / 2)[0])
        checks.append((f"psd[{label}]", mineig, -PSD_SLACK, None))
    rhs_scale = max([1.0] + [abs(c.rhs) for c in inst.constraints])
    worst = 0.0
    for con in inst.constraints:
        worst = max(worst, abs(constraint_value(inst, con, sol.blocks) - con.rhs))
    checks.append(("residual", worst, RESIDUAL_SCALE_TOL * rhs_scale, None))
    gap = sol.dual_value - sol.primal_value
    checks.append(("gap_nonneg", gap, -RESIDUAL_SCALE_TOL * max(1.0, abs(sol.primal_value)), None))
    checks.append(("gap_small", abs(gap), tol * max(1.0, abs(sol.primal_value)), None))

    resolved = []
    for name, value, bound, _ in checks:
        if name.startswith("psd") or name.startswith("gap_nonneg"):
            ok = value >= bound
        else:
            ok = value <= bound
        resolved.append((name, value, bound, ok))
    if sol.status != "optimal":
        resolved.append(("status_optimal", 0.0, 0.0, False))
    return CertifyReport(
        passed=all(ok for _, _, _, ok in resolved), checks=tuple(resolved)
    )


# --- xorq-sdp-v1 wire format ----------------------------------------------------

SDP_FORMAT = "xorq-sdp-v1"


def _entries_to_json(entries) -> list[dict]:
    out = []
    for b, r, c, v in entries:
        v = complex(v)
        out.append({"b": b, "r": r, "c": c, "re": v.real, "im": v.imag})
    return sorted(out, key=lambda e: (e["b"], e["r"], e["c"]))


def instance_to_dict(inst: SdpInstance) -> dict:
    obj_entries = []
    for label, c in sorted(inst.objective.items()):
        for r in range(c.shape[0]):
            for s in range(r, c.shape[1]):
                v = c[r, s]
                if v != 0:
                    obj_entries.append((label, r, s, complex(v)))
    return {
        "format": SDP_FORMAT,
        "blocks": [{"label": label, "dim": dim} for label, dim in inst.blocks],
        "objective": _entries_to_json(obj_entries),
        "constraints": [
            {"entries": _entries_to_json(con.entries), "rhs": con.rhs}
            for con in inst.constraints
        ],
    }


def instance_from_dict(data: dict) -> SdpInstance:
    if not isinstance(data, dict) or data.get("format") != SDP_FORMAT:
        raise FormatError(f"expected format {SDP_FORMAT!r}")
    try:
        blocks = tuple((str(b["label"]), int(b["dim"])) for b in data["blocks"])
        dims = dict(blocks)
        objective = {label: np.zeros((d, d), dtype=complex) for label, d in blocks}
        for e in data["objective"]:
            label, r, c = str(e["b"]), int(e["r"]), int(e["c"])
            v = complex(float(e["re"]), float(e["im"]))
            objective[label][r, c] = v
            objective[label][c, r] = v.conjugate()
        objective = {k: v for k, v in objective.items() if np.any(v)}
        constraints = []
        for con in data["constraints"]:
            entries = tuple(
                (str(e["b"]), int(e["r"]), int(e["c"]), complex(float(e["re"]), float(e["im"])))
                for e in con["entries"]
            )
            constraints.append(SdpConstraint(entries=entries, rhs=float(con["rhs"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed SDP file: {exc}") from exc
    return SdpInstance(blocks=blocks, objective=objective, constraints=tuple(constraints))


def load_instance(path) -> SdpInstance:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from exc
    return instance_from_dict(data)
