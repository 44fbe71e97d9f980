"""Acceptance suite: one PASS/FAIL line per criterion.

Criteria 6 and 8 are run with the default mixing [[1, 1], [1, -1]] exactly as
stated and fail: with that mixing dΨ(i) = -J dΨ(1), so the orbit maps are
J-antiholomorphic (residual 2‖dΨ(1)‖, not rounding error).  The companion tests
marked ``holomorphic_mixing`` rerun the same checks with [[1, 1], [-1, 1]],
which swaps the two phases of the b-direction, and pass at the same tolerances.
"""
import numpy as np
import pytest

from conftest import cgauss, instance
from kahlerprod import charts, groups, torus
from kahlerprod import nijenhuis as nj
from kahlerprod.campaign import (
    CampaignConfig, brute_force_stabilizer, designated_pair, horizontal_field,
    lattice_points_in_cell, run_campaign, run_nijenhuis, vertical_field, check_rng,
)
from kahlerprod.moment import check_equivariance
from kahlerprod.product import j_squared_residuals

SEED = 20240611


@pytest.fixture
def report(capsys):
    def emit(number: str, passed: bool, detail: str):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if passed else 'FAIL'}: {detail}")
        return passed
    return emit


def _rng(k):
    return np.random.default_rng([SEED, k])


# 1 ---------------------------------------------------------------------------

def test_criterion_01_j_squared(report):
    worst = {}
    for name in ("sphere:1,2", "stiefel:2,4"):
        acs = instance(name).acs
        rng = _rng(1)
        worst[name] = max(j_squared_residuals(acs, acs.sample_point(rng), 1, rng)[0][0] for _ in range(100))
    ok = max(worst.values()) <= 1e-9
    assert report("1", ok, "J^2 = -id, 100 tangents each, max relative residual "
                  + ", ".join(f"{k}: {v:.2e}" for k, v in worst.items()) + " (tol 1e-9)")


# 2 ---------------------------------------------------------------------------

def test_criterion_02_abelian_vanishing(report):
    worst, cases = {}, set()
    for name in ("sphere:1,2", "stiefel-torus:2,4,2"):
        inst = instance(name)
        cfg = CampaignConfig(name, samples={"nijenhuis": 200}, seed=SEED)
        res = run_nijenhuis(inst, cfg, check_rng(SEED, "nijenhuis"))
        assert len(res.rows) == 200
        cases |= {r.part for r in res.rows}
        worst[name] = max(r.residual for r in res.rows)
    ok = max(worst.values()) <= 1e-5 and cases == {"horizontal", "vertical", "mixed", "combined"}
    assert report("2", ok, "abelian N_J over 200 draws each (cases " + "/".join(sorted(cases)) + "), max "
                  + ", ".join(f"{k}: {v:.2e}" for k, v in worst.items()) + " (tol 1e-5)")


# 3 ---------------------------------------------------------------------------

def test_criterion_03_nonabelian_oracle(report):
    acs = instance("stiefel:2,4").acs
    xi, eta = designated_pair(2)
    rng = _rng(3)
    mismatch, norms = 0.0, []
    for _ in range(5):
        q = acs.sample_point(rng)
        N = nj.nijenhuis_tensor(acs, nj.GeneratorField(xi, 1), nj.GeneratorField(eta, 2), q)
        mismatch = max(mismatch, (N - nj.vertical_oracle(acs, xi, eta, q)).norm())
        norms.append(N.norm())
    ok = mismatch <= 1e-5 and min(norms) >= 0.1
    assert report("3", ok, f"U(2) designated pair: |N_J - oracle| max {mismatch:.2e} (tol 1e-5), "
                  f"|N_J| min {min(norms):.3f} (floor 0.1)")


# 4 ---------------------------------------------------------------------------

def test_criterion_04_mixed_vanishing(report):
    acs = instance("stiefel:2,4").acs
    rng = _rng(4)
    worst = 0.0
    count = 0
    for _ in range(5):
        q = acs.sample_point(rng)
        for fh in (1, 2):
            for fv in (1, 2):
                X, Y = horizontal_field(acs, q, fh, rng), vertical_field(acs, q, fv, rng)
                worst = max(worst, nj.nijenhuis_tensor(acs, X, Y, q).norm())
                count += 1
    ok = worst <= 1e-5
    assert report("4", ok, f"stiefel:2,4 horizontal/vertical pairs (same and cross factor), "
                  f"{count} draws, max |N_J| {worst:.2e} (tol 1e-5)")


# 5 ---------------------------------------------------------------------------

def test_criterion_05_equivariance(report):
    m = instance("stiefel:2,4").acs.n1.moment
    rng = _rng(5)
    worst = max(check_equivariance(m, cgauss(rng, (4, 2)), groups.random_element(m.group, rng))
                for _ in range(100))
    ok = worst <= 1e-12
    assert report("5", ok, f"mu(A u^+) = u mu(A) u^+ on 100 random (A, u), max residual {worst:.2e} (tol 1e-12)")


# 6 ---------------------------------------------------------------------------

def _holomorphy(mixing):
    out = {}
    for name in ("sphere:1,2", "stiefel-torus:2,4,1"):
        inst = instance(name)
        act = torus.PsiAction(inst.acs, mixing, inst.circle())
        rng = _rng(6)
        orbit = trans = 0.0
        for _ in range(10):
            q = inst.acs.sample_point(rng)
            z = complex(*rng.uniform(-1, 1, 2))
            orbit = max(orbit, torus.check_orbit_holomorphy(act, q, z))
            trans = max(trans, torus.check_translation_holomorphy(act, z, q, 10, rng))
        out[name] = (orbit, trans)
    return out


def _holo_detail(out):
    return "; ".join(f"{k}: part1 {o:.2e}, part2 {t:.2e}" for k, (o, t) in out.items())


def test_criterion_06_psi_holomorphy(report):
    out = _holomorphy(torus.DEFAULT_MIXING)
    ok = all(o <= 1e-8 and t <= 1e-8 for o, t in out.values())
    assert report("6", ok, "Psi holomorphy with mixing [[1,1],[1,-1]] (tol 1e-8): " + _holo_detail(out)
                  + ("" if ok else "; part 1 fails: orbit maps are J-antiholomorphic for this mixing"))


def test_criterion_06_holomorphic_mixing(report):
    out = _holomorphy(torus.HOLOMORPHIC_MIXING)
    ok = all(o <= 1e-8 and t <= 1e-8 for o, t in out.values())
    assert report("6'", ok, "Psi holomorphy with mixing [[1,1],[-1,1]] (tol 1e-8): " + _holo_detail(out))


def test_criterion_06_failure_is_exact_antiholomorphy():
    """Diagnostic for criterion 6: the default mixing is off by conjugation, not by noise."""
    inst = instance("sphere:1,2")
    act = torus.PsiAction(inst.acs, torus.DEFAULT_MIXING, inst.circle())
    rng = _rng(66)
    for _ in range(5):
        q = inst.acs.sample_point(rng)
        assert torus.check_orbit_antiholomorphy(act, q, 0.2 - 0.7j) <= 1e-12
        assert torus.orbit_invariance_residual(act, q) <= 1e-12


# 7 ---------------------------------------------------------------------------

def test_criterion_07_period_lattice(report):
    from fractions import Fraction
    half = Fraction(1, 2)
    lat = torus.period_lattice(torus.DEFAULT_MIXING)
    gens_ok = {lat.v1, lat.v2} == {(half, half), (half, -half)} and lat.covolume == half
    claim = torus.check_lattice_claim(torus.DEFAULT_MIXING)
    claim_ok = claim.verdict == "NOT contained" and claim.witness == (half, Fraction(0))
    scan_ok = brute_force_stabilizer(torus.DEFAULT_MIXING, 24) == lattice_points_in_cell(lat)
    rng = _rng(7)
    mats = []
    while len(mats) < 10:
        A = tuple(tuple(int(x) for x in row) for row in rng.integers(-5, 6, (2, 2)))
        d = torus.det2(A)
        if d != 0 and abs(d) <= 12:
            mats.append(A)
    random_ok = True
    for A in mats:
        L = torus.period_lattice(A)
        random_ok &= L.covolume * abs(torus.det2(A)) == 1
        random_ok &= brute_force_stabilizer(A, 24) == lattice_points_in_cell(L)
    ok = gens_ok and claim_ok and scan_ok and random_ok
    assert report("7", ok, f"generators {torus.format_vec(lat.v1)}, {torus.format_vec(lat.v2)}, covolume "
                  f"{lat.covolume}; claimed (Z/2)+i(Z/2) {claim.verdict}, witness "
                  f"{torus.format_vec(claim.witness) if claim.witness else None}; (Z/24)^2 scan agrees: {scan_ok}; "
                  f"covolume*|det| = 1 exactly on 10 random matrices: {random_ok}")


# 8 ---------------------------------------------------------------------------

def _charts(mixing):
    inst = instance("sphere:1,2")
    rng = _rng(8)
    act = torus.PsiAction(inst.acs, mixing, inst.circle())
    c = charts.make_chart(act, inst.acs.sample_point(rng))
    d = charts.check_local_diffeo(c, samples=5, rng=rng)
    cl = charts.check_phi_complex_linear(c, 10, rng)
    tr = charts.transition_function(c, charts.shifted_chart(c), grid=5, rng=rng)
    rt = max(tr.max_roundtrip, tr.max_g_residual)
    ok = (d.rank_at_base == d.expected_rank and d.min_sv_at_base > 1e-3 and cl <= 1e-5
          and rt <= 1e-8 and len(tr.samples) == 25 and tr.continuous)
    detail = (f"rank {d.rank_at_base}/{d.expected_rank}, min sv {d.min_sv_at_base:.3f} (> 1e-3); "
              f"complex-linearity {cl:.2e} (tol 1e-5); transition round trip {rt:.2e} on 5x5 grid (tol 1e-8)")
    return ok, detail


def test_criterion_08_charts(report):
    ok, detail = _charts(torus.DEFAULT_MIXING)
    assert report("8", ok, "charts on sphere:1,2 with mixing [[1,1],[1,-1]]: " + detail
                  + ("" if ok else "; complex-linearity fails in the z-plane, inherited from criterion 6"))


def test_criterion_08_holomorphic_mixing(report):
    ok, detail = _charts(torus.HOLOMORPHIC_MIXING)
    assert report("8'", ok, "charts on sphere:1,2 with mixing [[1,1],[-1,1]]: " + detail)


# 9 ---------------------------------------------------------------------------

def test_criterion_09_tensoriality_and_convergence(report):
    acs = instance("stiefel:2,4").acs
    rng = _rng(9)
    q = acs.sample_point(rng)
    xi, eta = designated_pair(2)
    exact = acs.generator_field(0, nj.BRACKET_SIGN * groups.bracket(acs.group, xi, eta), q)
    steps = (0.04, 0.02, 0.01, 0.005)
    errs = [(nj.lie_bracket(acs, nj.GeneratorField(xi, 1), nj.GeneratorField(eta, 1), q,
                            nj.BracketConfig(h)) - exact).norm() for h in steps]
    slope = float(np.polyfit(np.log(steps), np.log(errs), 1)[0])

    worst = 0.0
    for _ in range(5):
        q = acs.sample_point(rng)
        zeta = groups.random_algebra(acs.group, rng)
        Y = nj.ProjectedConstant(cgauss(rng, q.p2.shape), 2)
        base = nj.nijenhuis_tensor(acs, nj.GeneratorField(zeta, 1), Y, q)
        g = groups.generator(acs.group, zeta, q.p1)
        normal = cgauss(rng, q.p1.shape)
        normal -= acs.n1.project(q.p1, normal)
        for X in (nj.ProjectedConstant(g, 1), nj.ProjectedConstant(g + normal, 1)):
            worst = max(worst, (nj.nijenhuis_tensor(acs, X, Y, q) - base).norm())
    ok = 1.7 <= slope <= 2.3 and worst <= 2e-5
    assert report("9", ok, f"N_J extension independence max {worst:.2e} (tol 2e-5); bracket FD slope "
                  f"{slope:.3f} over h in {steps} (range [1.7, 2.3])")


# 10 --------------------------------------------------------------------------

def test_criterion_10_determinism(report, tmp_path):
    from kahlerprod import cli
    import json
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"instance": "stiefel:2,4", "checks": "all", "samples": 10, "seed": 123456789}))
    blobs = []
    for run in range(2):
        out = tmp_path / f"run{run}"
        cli.main(["run", str(cfg), "--out", str(out)])
        blobs.append((out / "residuals.csv").read_bytes())
    threaded = run_campaign(CampaignConfig.from_dict(
        {"instance": "stiefel:2,4", "checks": "all", "samples": 10, "seed": 123456789, "workers": 4})).to_csv()
    ok = blobs[0] == blobs[1] == threaded.encode()
    assert report("10", ok, f"two CLI runs and a 4-worker run with seed 123456789: CSV byte-identical "
                  f"({len(blobs[0])} bytes)")
