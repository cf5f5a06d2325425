"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are written straight to the terminal (bypassing capture) so they
show up in ``pytest -v`` logs whether or not the test fails.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from heiscf.cf import (
    RationalSiegel, approx_error, classical_identity_residual, convergent_list, convergent_matrix,
    expand, fracqn_residuals, pringsheim_bound, pringsheim_eval, qn2_residual, reconstruct,
    siegel_dist4, tilde_cross_residuals, tilde_report,
)
from heiscf.cli import DEFAULT_SEED, DEFAULT_SEED2
from heiscf.dynamics import PrecisionPolicy, birkhoff_histogram, interior_bins
from heiscf.geometric import HPoint, dist4, gauge4, inversion_jacobian_mc, koranyi_inv, left_divide, mul
from heiscf.io import parse_point
from heiscf.lattice import DomainKind
from heiscf.scalars import mp_context
from heiscf.siegel import (
    U_IOTA, embed_unitary, from_siegel, is_unitary, proj_act, siegel_left_divide, siegel_mul, to_siegel,
)

from conftest import irrational_seed
from oracles import nicf_digits, random_digit

KINDS = (DomainKind.CUBE, DomainKind.DIRICHLET)
CORPUS_SIZE = 10_000
MAX_DEN_NORM = 10 ** 6


def report(capsys, number, ok, message):
    with capsys.disabled():
        print(f"\n[criterion {number:>2}] {'PASS' if ok else 'FAIL'}  {message}", flush=True)


def rational_corpus(n, seed=2024):
    """Random rational points whose primitive Siegel lift has ``|q|^2 <= 10^6``."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        dx, dy, dt = rng.randint(1, 24), rng.randint(1, 24), rng.randint(1, 1000)
        h = HPoint(Fraction(rng.randint(-6 * dx, 6 * dx), dx), Fraction(rng.randint(-6 * dy, 6 * dy), dy),
                   Fraction(rng.randint(-30 * dt, 30 * dt), dt))
        if RationalSiegel.from_point(h).q.norm() <= MAX_DEN_NORM:
            out.append(h)
    return out


@pytest.fixture(scope="module")
def corpus():
    """Points, their expansions in both domains, and the round-trip timing."""
    points = rational_corpus(CORPUS_SIZE)
    start = time.perf_counter()
    expansions = {kind: [expand(h, kind) for h in points] for kind in KINDS}
    back = {kind: [reconstruct(e.digits) for e in expansions[kind]] for kind in KINDS}
    elapsed = time.perf_counter() - start
    return points, expansions, back, elapsed


@pytest.fixture(scope="module")
def valid_sequences():
    """10^3 genuine digit sequences (n <= 20): certified prefixes of random 256-bit seeds."""
    rng = random.Random(77)
    out = []
    for i in range(1000):
        kind = KINDS[i % 2]
        e = expand(irrational_seed(rng, 256), kind, max_digits=20)
        out.append(list(e.digits.digits[: rng.randint(1, 20)]))
    return out


def _matrix_violations(states, digits):
    bad = {k: 0 for k in ("unitary", "det", "q_nonzero", "oracle", "cross", "inverse")}
    for st in states:
        m = st.matrix()
        bad["unitary"] += not is_unitary(m)
        bad["det"] += m.det() != st.sign
        bad["q_nonzero"] += not st.q
        bad["oracle"] += m != convergent_matrix(digits[: st.n])
        bad["cross"] += any(tilde_cross_residuals(st))
        r = qn2_residual(st)
        bad["inverse"] += any(r[i, j] for i in range(3) for j in range(3))
    return bad


def test_criterion_01_exact_round_trip(corpus, capsys):
    points, expansions, back, elapsed = corpus
    wrong = sum(b != h for kind in KINDS for b, h in zip(back[kind], points))
    ok = wrong == 0 and elapsed < 60
    report(capsys, 1, ok, f"{wrong} mismatches in {2 * len(points)} round trips "
                          f"(cube + dirichlet, |q|^2 <= 10^6); expand+reconstruct {elapsed:.1f} s (limit 60 s)")
    assert wrong == 0
    assert elapsed < 60


def test_criterion_02_denominator_growth(corpus, capsys):
    points, expansions, _, _ = corpus
    violations = lift_mismatch = checked = drops = steps = 0
    for kind in KINDS:
        for h, e in zip(points, expansions[kind]):
            q = RationalSiegel.from_point(h).q
            n = len(e.digits)
            violations += q.norm() < 2 ** n
            # the last convergent denominator is the primitive lift denominator up to a unit
            states = convergent_list(e.digits.digits)
            last = states[-1]
            lift_mismatch += last.q.norm() != q.norm()
            # monotonicity of |q_n| is only conjectured, so it is measured here, not asserted
            norms = [st.q.norm() for st in states]
            drops += sum(b < a for a, b in zip(norms, norms[1:]))
            steps += len(norms) - 1
            checked += 1
    ok = violations == 0 and lift_mismatch == 0
    report(capsys, 2, ok, f"|q|^2 >= 2^n: {violations} violations over {checked} expansions; "
                          f"|q_n|^2 = |q|^2 at termination: {lift_mismatch} mismatches; "
                          f"(|q_n| decreasing steps: {drops}/{steps}, informational)")
    assert violations == 0 and lift_mismatch == 0


def test_criterion_03_matrix_invariants(corpus, valid_sequences, capsys):
    _, expansions, _, _ = corpus
    totals = {}
    n_states = 0
    sources = [list(e.digits.digits) for kind in KINDS for e in expansions[kind]] + valid_sequences
    for digits in sources:
        states = convergent_list(digits)
        n_states += len(states)
        for k, v in _matrix_violations(states, digits).items():
            totals[k] = totals.get(k, 0) + v
    # arbitrary nonzero digit words: the algebraic identities still hold,
    # q_n may vanish because such words need not be expansions
    rng = random.Random(5)
    arbitrary_zero_q = 0
    for _ in range(1000):
        digits = [HPoint(*random_digit(rng)) for _ in range(rng.randint(1, 20))]
        states = convergent_list(digits)
        bad = _matrix_violations(states, digits)
        arbitrary_zero_q += bad.pop("q_nonzero")
        for k, v in bad.items():
            totals[k] += v
        n_states += len(states)
    ok = not any(totals.values())
    report(capsys, 3, ok, f"{n_states} convergent matrices; violations {totals}; "
                          f"(q_n = 0 on arbitrary non-expansion words: {arbitrary_zero_q}, not counted)")
    assert not any(totals.values())


def _first_expansions(corpus, per_kind=1000):
    points, expansions, _, _ = corpus
    for kind in KINDS:
        yield from zip(points[:per_kind], expansions[kind][:per_kind])


def test_criterion_04_error_formula(corpus, capsys):
    ident = cool = bound = cases = squared_form = 0
    for h, e in _first_expansions(corpus):
        for st in convergent_list(e.digits.digits):
            c = approx_error(e, st, h)
            ident += c.identity_residual != 0
            # the variant with |q_n|^4 in place of |q_n|^2, for comparison only
            squared_form += c.dist4 * c.q_norm ** 2 != c.v_product2
            cool += c.cool_residual != 0
            bound += not c.bound_holds()
            cases += 1
    ok = ident == cool == bound == 0
    report(capsys, 4, ok, f"{cases} approximants: nonzero dist4*|q_n|^2 - prod|v_i|^2: {ident}; "
                          f"nonzero conj(p)-conj(r)u+conj(q)v-(-1)^n prod v: {cool}; "
                          f"dist4 > (1/2)^(n+1): {bound} "
                          f"(variant dist4*|q_n|^4 = prod|v_i|^2: {squared_form} nonzero, not asserted)")
    assert ident == cool == bound == 0


def test_criterion_05_classical_formula(corpus, capsys):
    classical = frac = cases_c = cases_f = 0
    for h, e in _first_expansions(corpus):
        states = convergent_list(e.digits.digits)
        sieg = e.siegel
        for st in states:
            if st.n + 1 < len(states):
                classical += classical_identity_residual(st, states[st.n + 1], sieg[0], sieg[st.n + 1]) != 0
                cases_c += 1
            if st.n:
                frac += any(fracqn_residuals(st, sieg))
                cases_f += 1
    ok = classical == frac == 0
    report(capsys, 5, ok, f"classical formula: {classical}/{cases_c} nonzero residuals; "
                          f"Q_n(1,u_n,v_n) components: {frac}/{cases_f} nonzero residuals")
    assert classical == frac == 0


def test_criterion_06_tilde_column(corpus, valid_sequences, capsys):
    _, expansions, _, _ = corpus
    lower = lower_nonzero = weak = upper = frac = norm_id = cases = 0
    first_lower = None
    sources = [list(e.digits.digits) for kind in KINDS for e in expansions[kind]] + valid_sequences
    for digits in sources:
        for st in convergent_list(digits)[1:]:
            rep = tilde_report(st)
            cases += 1
            if not rep.lower_ok:
                lower += 1
                if st.q_tilde:
                    lower_nonzero += 1
                    if first_lower is None:
                        first_lower = (digits[: st.n], st.q.norm(), st.q_tilde.norm())
            # what does hold: |q~|^2 is even, so it is at least 2 unless q~ = 0
            weak += bool(st.q_tilde) and st.q_tilde.norm() < 2
            upper += not rep.upper_ok
            norm_id += not rep.norm_identity
            frac += rep.frac_residuals is not None and any(rep.frac_residuals)
    # convergence of the tilde points on 100 irrational 256-bit seeds
    rng = random.Random(606)
    slow = []
    worst = 0.0
    for i in range(100):
        h = irrational_seed(rng, 256)
        e = expand(h, KINDS[i % 2], max_digits=40)
        target = to_siegel(e.iterates[0])
        states = convergent_list(e.digits.digits[:30])
        d30 = states[30].tilde_point()
        d = siegel_dist4(d30, target) if d30 is not None else math.inf
        worst = max(worst, float(d))
        if len(e.digits) < 30 or not d < 1e-8:
            slow.append(i)
    report(capsys, 6, upper == 0 and frac == 0 and norm_id == 0 and not slow,
           f"upper |q~|^4 <= 4|q_n|^2|q_n-1|^2: {upper}/{cases} violations; tilde fractions: {frac} nonzero; "
           f"|q~|^2 = -2Re(q_n conj q_n-1): {norm_id} violations; "
           f"tilde dist4 at n=30: worst {worst:.2e} (< 1e-8), {len(slow)}/100 seeds fail")
    report(capsys, 6, lower == 0,
           f"lower 4|q_n|^2 <= |q~|^4: {lower}/{cases} violations ({lower - lower_nonzero} with q~_n = 0, "
           f"{lower_nonzero} with q~_n != 0); |q~|^2 >= 2 for q~ != 0: {weak} violations"
           + (f"; first with q~ != 0: digits {[g.as_ints() for g in first_lower[0]]}, |q_n|^2={first_lower[1]}, "
              f"|q~_n|^2={first_lower[2]}" if first_lower else ""))
    assert upper == 0 and frac == 0 and norm_id == 0 and not slow
    assert lower == 0, "the stated lower bound on |q~_n| fails on genuine expansions"


def _mp(ctx, x):
    return ctx.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else ctx.mpf(x)


def test_criterion_07_pringsheim(capsys):
    ctx = mp_context(256)
    res = pringsheim_eval(itertools.repeat((3, 0, 0)), tolerance=1e-30, max_terms=40)
    target = ((ctx.sqrt(5) - 3) / 2, ctx.mpf(0), ctx.mpf(0))
    hist = {n: pt for n, pt, _ in res.history}
    p40 = hist[40]
    diff = left_divide(HPoint(*(_mp(ctx, c) for c in p40)), HPoint(*target))
    gap40 = float(gauge4(diff)) ** 0.25
    first_ok = next(n for n in sorted(hist)
                    if float(gauge4(left_divide(HPoint(*(_mp(ctx, c) for c in hist[n])), HPoint(*target)))) ** 0.25 < 1e-10)

    rng = random.Random(707)
    violations = pairs = 0
    for _ in range(100):
        stream = []
        while len(stream) < 40:
            g = (rng.randint(-4, 4), rng.randint(-4, 4), rng.randint(-30, 30))
            if gauge4(HPoint(*g)) >= 81:
                stream.append(g)
        r = pringsheim_eval(stream, tolerance=0.0, max_terms=40)
        pts = [pt for _, pt, _ in r.history]
        for n in range(1, len(pts)):
            b4 = Fraction(pringsheim_bound(n)) ** 4
            for m in (n + 1, len(pts)):
                if m <= len(pts) and m != n:
                    pairs += 1
                    violations += dist4(pts[n - 1], pts[m - 1]) > b4
    ok = gap40 < 1e-10 and violations == 0
    report(capsys, 7, ok, f"(3,0,0) stream: gauge gap {gap40:.2e} at n=40 (first below 1e-10 at n={first_ok}); "
                          f"random streams: {violations}/{pairs} bound violations")
    assert gap40 < 1e-10
    assert violations == 0


def test_criterion_08_metric_identities(capsys):
    rng = random.Random(808)

    def rp():
        return HPoint(*(Fraction(rng.randint(-99, 99), rng.randint(1, 40)) for _ in range(3)))

    bad = {k: 0 for k in ("iota", "left_invariance", "gauge_siegel", "siegel_minus", "model")}
    for _ in range(10_000):
        g, h, k = rp(), rp(), rp()
        if h.is_identity() or k.is_identity():
            continue
        bad["iota"] += dist4(koranyi_inv(h), koranyi_inv(k)) * gauge4(h) * gauge4(k) != dist4(h, k)
        bad["left_invariance"] += dist4(mul(g, h), mul(g, k)) != dist4(h, k)
        sh, sk = to_siegel(h), to_siegel(k)
        bad["gauge_siegel"] += sh.gauge4() != gauge4(h)
        bad["siegel_minus"] += siegel_left_divide(sh, sk) != to_siegel(left_divide(h, k))
        bad["model"] += (siegel_mul(sh, sk) != to_siegel(mul(h, k))
                         or proj_act(embed_unitary(g), sh) != to_siegel(mul(g, h))
                         or proj_act(U_IOTA, sh) != to_siegel(koranyi_inv(h))
                         or from_siegel(sh) != h)
    ok = not any(bad.values())
    report(capsys, 8, ok, f"10^4 exact rational tuples, violations {bad}")
    assert ok


def test_criterion_09_inversion_jacobian(capsys):
    rng = np.random.default_rng(909)
    pyrng = random.Random(909)
    worst = 0.0
    for _ in range(20):
        h = HPoint(pyrng.uniform(-1, 1), pyrng.uniform(-1, 1), pyrng.uniform(-1, 1))
        j = inversion_jacobian_mc(h, 1_000_000, rng)
        worst = max(worst, abs(j * gauge4(h) ** 2 - 1))
    ok = worst < 0.01
    report(capsys, 9, ok, f"20 points x 10^6 samples: worst |J * ||h||^8 - 1| = {worst:.4f} (< 0.01)")
    assert ok


def test_criterion_10_ergodic_stability(capsys):
    policy = PrecisionPolicy(256)
    seeds = [parse_point(s).evaluate(256) for s in (DEFAULT_SEED, DEFAULT_SEED2)]
    ok_all = True
    for kind in KINDS:
        start = time.perf_counter()
        h1, _ = birkhoff_histogram(seeds[0], kind, 1_000_000, (8, 8, 8), policy)
        h2, _ = birkhoff_histogram(seeds[1], kind, 1_000_000, (8, 8, 8), policy)
        tv = h1.tv_distance(h2)
        mask = interior_bins(kind, (4, 4, 4))
        empty = int(sum(((h.coarsen(2).counts == 0) & mask).sum() for h in (h1, h2)))
        ok = tv < 0.05 and empty == 0
        ok_all &= ok
        report(capsys, 10, ok, f"{kind.value}: TV(8^3) = {tv:.4f} (< 0.05); {int(mask.sum())} interior 4^3 bins, "
                               f"{empty} empty; {time.perf_counter() - start:.1f} s")
    assert ok_all


def test_criterion_11_axis_reduction(capsys):
    rng = random.Random(1111)
    mismatches = 0
    for i in range(1000):
        den = rng.randint(2, 10 ** 6)
        num = rng.randint(-(den - 1) // 2, (den - 1) // 2) if den > 2 else 0
        x = Fraction(num, den)
        for kind, half_up in ((DomainKind.CUBE, True), (DomainKind.DIRICHLET, False)):
            a0, digits = nicf_digits(x, half_up)
            e = expand(HPoint(x, 0, 0), kind)
            got = [g.as_ints() for g in e.digits.digits]
            mismatches += e.digits.gamma0 != HPoint(a0, 0, 0) or got != [(a, 0, 0) for a in digits]
    ok = mismatches == 0
    report(capsys, 11, ok, f"1000 rationals in (-1/2, 1/2), both domains: {mismatches} mismatches "
                           f"against the 1-D nearest-integer oracle")
    assert ok
