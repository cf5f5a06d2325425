"""Certificates for expansions and the checks run by ``heiscf verify``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .cf import (
    ConvergentState, DigitSeq, Expansion, InvalidDigits, a_gamma, approx_error,
    classical_identity_residual, convergent_list, fracqn_residuals, pringsheim_bound,
    qn2_residual, reconstruct, reconstruct_via_matrices, tilde_cross_residuals, tilde_report,
)
from .geometric import HPoint, IDENTITY, dist4, koranyi_inv, mul
from .lattice import lattice_gauge4
from .scalars import GaussianInt
from .siegel import IDENTITY_MATRIX, from_siegel, is_unitary, to_siegel


def _num(x) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return x
    return str(x)


def _g(g: GaussianInt) -> list[int]:
    return [g.re, g.im]


def certificates(exp: Expansion, h: HPoint | None = None) -> list[dict]:
    """Per-``n`` convergent vectors and the error certificate of each approximant."""
    out = []
    for st in convergent_list(exp.digits.digits):
        c = approx_error(exp, st, h)
        out.append({
            "n": st.n, "q": _g(st.q), "r": _g(st.r), "p": _g(st.p),
            "dist4": _num(c.dist4), "v_product2": _num(c.v_product2),
            "scaled_error": _num(c.scaled_error), "bound": f"1/{2 ** (st.n + 1)}",
            "bound_holds": bool(c.bound_holds()),
        })
    return out


def iterates_from_digits(d: DigitSeq) -> list[HPoint]:
    """``h_0 .. h_n`` of a finite digit word, computed backwards from ``h_n = 0``."""
    hs = [IDENTITY]
    for i in range(len(d.digits) - 1, -1, -1):
        acc = mul(d.digits[i], hs[-1])
        if acc == IDENTITY:
            raise InvalidDigits("continued fraction tail evaluates to 0 before inversion", i + 1)
        hs.append(koranyi_inv(acc))
    return hs[::-1]


@dataclass
class Check:
    name: str
    status: str        # PASS, FAIL or WARN
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "FAIL"


def _check(name: str, bad: list, total: int, warn_only: bool = False) -> Check:
    if not bad:
        return Check(name, "PASS", f"{total} cases")
    status = "WARN" if warn_only else "FAIL"
    return Check(name, status, f"{len(bad)}/{total} violations, first at n={bad[0]}")


def verify_digits(d: DigitSeq, point: HPoint | None = None, stored: list[dict] | None = None) -> tuple[list[Check], dict]:
    """Run every exact identity on a finite digit word; returns checks and extra data."""
    checks: list[Check] = []
    extra: dict = {}
    states = convergent_list(d.digits)
    total = len(states)

    value = reconstruct(d)
    extra["point"] = value
    try:
        via_matrix = reconstruct_via_matrices(d)
        checks.append(Check("geometric reconstruction = matrix reconstruction",
                            "PASS" if via_matrix == value else "FAIL"))
    except ArithmeticError as exc:
        checks.append(Check("geometric reconstruction = matrix reconstruction", "FAIL", str(exc)))
    if point is not None:
        checks.append(Check("round trip", "PASS" if value == point else "FAIL",
                            "exact" if value == point else f"got {value}"))

    bad = {k: [] for k in ("oracle", "unitary", "det", "nonzero", "cross", "inverse",
                           "norm", "frac", "upper", "lower")}
    prod = IDENTITY_MATRIX.map(GaussianInt.coerce)
    for st in states:
        if st.n:
            prod = prod @ a_gamma(d.digits[st.n - 1]).map(GaussianInt.coerce)
        m = st.matrix()
        if m != prod:
            bad["oracle"].append(st.n)
        if not is_unitary(m):
            bad["unitary"].append(st.n)
        if m.det() != st.sign:
            bad["det"].append(st.n)
        if not st.q:
            bad["nonzero"].append(st.n)
        if st.n and any(tilde_cross_residuals(st)):
            bad["cross"].append(st.n)
        r = qn2_residual(st)
        if any(r[i, j] for i in range(3) for j in range(3)):
            bad["inverse"].append(st.n)
        rep = tilde_report(st)
        if not rep.norm_identity:
            bad["norm"].append(st.n)
        if rep.frac_residuals is not None and any(rep.frac_residuals):
            bad["frac"].append(st.n)
        if rep.upper_ok is False:
            bad["upper"].append(st.n)
        if rep.lower_ok is False:
            bad["lower"].append(st.n)
    checks += [
        _check("recursion = matrix product", bad["oracle"], total),
        _check("Q_n unitary", bad["unitary"], total),
        _check("det Q_n = (-1)^n", bad["det"], total),
        _check("q_n != 0", bad["nonzero"], total),
        _check("tilde column = (-1)^n conj cross products", bad["cross"], total),
        _check("inverse structure of Q_n", bad["inverse"], total),
        _check("|q~_n|^2 = -2 Re(q_n conj q_{n-1})", bad["norm"], total),
        _check("tilde fractions", bad["frac"], total),
        _check("|q~_n|^4 <= 4 |q_n|^2 |q_{n-1}|^2", bad["upper"], total),
        _check("4 |q_n|^2 <= |q~_n|^4 (not valid in general)", bad["lower"], total, warn_only=True),
    ]

    if stored:
        mism = []
        for cert in stored:
            n = cert.get("n")
            if not isinstance(n, int) or not 0 <= n < total:
                mism.append(n)
                continue
            st = states[n]
            for key in ("q", "r", "p"):
                if key in cert and cert[key] != _g(getattr(st, key)):
                    mism.append(n)
                    break
        checks.append(_check("stored certificates match recomputed convergents", mism, len(stored)))

    hs = iterates_from_digits(d)
    exp = Expansion(None, d, hs, "terminated")
    sieg = [to_siegel(h) for h in hs]
    errs = {k: [] for k in ("ident", "cool", "bound", "classical", "fracqn")}
    for st in states:
        if not st.q:
            continue
        c = approx_error(exp, st, value)
        if c.identity_residual != 0:
            errs["ident"].append(st.n)
        if c.cool_residual:
            errs["cool"].append(st.n)
        if not c.bound_holds():
            errs["bound"].append(st.n)
        if st.n + 1 < total and classical_identity_residual(st, states[st.n + 1], sieg[0], sieg[st.n + 1]):
            errs["classical"].append(st.n)
        if st.n and any(fracqn_residuals(st, sieg)):
            errs["fracqn"].append(st.n)
    checks += [
        _check("dist4 * |q_n|^2 = prod |v_i|^2", errs["ident"], total),
        _check("conj(p_n) - conj(r_n) u + conj(q_n) v = (-1)^n prod v_i", errs["cool"], total),
        _check("dist4 <= (1/2)^(n+1)", errs["bound"], total),
        _check("classical formula (sign -1)", errs["classical"], max(total - 1, 0)),
        _check("Q_n (1, u_n, v_n) component identities", errs["fracqn"], max(total - 1, 0)),
    ]

    if d.digits and all(lattice_gauge4(g) >= 81 for g in d.digits):
        rows, viol = [], []
        for st in states[1:]:
            approx = from_siegel(st.approximant())
            gap = dist4(approx, value)
            bound = pringsheim_bound(st.n)
            rows.append({"n": st.n, "bound": bound, "dist_to_final": float(gap) ** 0.25})
            if float(gap) > bound ** 4:
                viol.append(st.n)
        extra["pringsheim"] = rows
        checks.append(_check("geometric bound for gauge >= 3 digits", viol, len(rows)))
    return checks, extra
