"""Acceptance criteria 1 to 10.

Each test prints one line ``criterion <n>: PASS|FAIL <details> (<seconds> s)``.
Run ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import sys
import time

import numpy as np
import pytest

from fembem.bem import (NystromGrid, assemble_bem, eval_potentials, far_field, grid_nodes,
                        log_weight_row, solve_density, trapezoid_weight, unit_directions)
from fembem.coupling import (apply_schur, build_problem, overlap_consistency, reconstruct,
                             schur_matrix, solve_interface, state_far_field)
from fembem.fem import assemble, error_norms, factorize, solve_dirichlet
from fembem.geometry import (PlaneWave, build_structured_mesh, circle, make_medium, smooth_disk,
                             uniform)
from fembem.oracles import mie_far_field, mie_solution, observed_orders

STAR_RECT = (-6.0, 6.0, -8.0, 8.0)
DISK_RECT = (-3.0, 3.0, -3.0, 3.0)
DISK_DIVISIONS = (12, 12)
N_ANGLES = 1000


class Criterion:
    """Times a criterion and prints its verdict line even when an assertion fails."""

    def __init__(self, number, emit, budget=None):
        self.number = number
        self.emit = emit
        self.budget = budget
        self.details = []

    def note(self, text):
        self.details.append(text)

    def check(self, ok, text):
        self.note(text)
        if not ok:
            raise AssertionError(f"criterion {self.number}: {text}")

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        ok = exc_type is None
        if ok and self.budget is not None and elapsed > self.budget:
            ok = False
            self.note(f"runtime above {self.budget:g} s budget")
            exc = AssertionError(f"criterion {self.number}: too slow")
        verdict = "PASS" if ok else "FAIL"
        line = f"criterion {self.number}: {verdict} {'; '.join(self.details)} ({elapsed:.2f} s)"
        self.emit(line)
        if exc_type is None and not ok:
            raise exc
        return False


def plane_wave_far_field_error(curve, k, N, theta, dirs, ref):
    grid = NystromGrid(curve, N)
    phi = solve_density(assemble_bem(grid, k), -np.exp(1j * k * grid.x[:, 0]))
    return float(np.abs(far_field(grid, k, phi, dirs) - ref).max() / np.abs(ref).max())


def disk_medium():
    return smooth_disk(radius=1.0, n0=2.0, inner=0.25)


def disk_run(degree, level, N=40):
    medium = disk_medium()
    mesh = build_structured_mesh(DISK_RECT, level, degree, hetero=medium,
                                 divisions=DISK_DIVISIONS)
    problem = build_problem(mesh, circle(1.25), N, PlaneWave(np.pi), medium)
    state = solve_interface(problem)
    fields = reconstruct(problem, state)
    return problem, state, fields


def disk_truth(theta):
    medium = disk_medium()
    sol = mie_solution("radial", np.pi, 1.0, n0=2.0, inner=0.25, profile=medium.radial_profile)
    return mie_far_field(sol, theta)


@pytest.fixture(scope="module")
def disk_study():
    """Far-field errors and overlap defects of the P3 disk runs, levels 0 to 3."""
    t0 = time.perf_counter()
    theta, dirs = unit_directions(N_ANGLES)
    ref = disk_truth(theta)
    rows = []
    for level in range(4):
        problem, state, fields = disk_run(3, level)
        F = state_far_field(problem, fields[1], dirs)
        err = float(np.abs(F - ref).max() / np.abs(ref).max())
        defect = overlap_consistency(problem, state, 200, seed=0, margin=0.4, fields=fields)
        rows.append({"level": level, "L": problem.mesh.n_free, "h": problem.mesh.h,
                     "error": err, "defect": defect})
    return rows, time.perf_counter() - t0


def test_criterion_1_quadrature_identities(emit):
    with Criterion(1, emit, budget=1.0) as c:
        worst_log, worst_trap = 0.0, 0.0
        for N in (8, 16, 32, 64):
            t = grid_nodes(N)
            for s in np.linspace(-np.pi, np.pi, 7):
                R = log_weight_row(N, s)
                worst_log = max(worst_log, abs(R.sum() + 2 * np.pi * np.log(4)),
                                abs(R @ np.cos(t - s) + 2 * np.pi))
            # nodes are t_j = pi j / N; reducing l*j modulo 2N in integers keeps the
            # integrand free of the rounding in large arguments l*t_j
            j = np.arange(-N + 1, N + 1)
            np.testing.assert_allclose(t, np.pi * j / N, rtol=0, atol=1e-15)
            h = trapezoid_weight(N)
            for ell in range(-2 * N + 1, 2 * N):
                exact = 2 * np.pi if ell == 0 else 0.0
                samples = np.exp(1j * np.pi * ((ell * j) % (2 * N)) / N)
                worst_trap = max(worst_trap, abs(h * samples.sum() - exact))
        c.check(worst_log <= 1e-13, f"log-weight identities max error {worst_log:.1e} <= 1e-13")
        c.check(worst_trap <= 1e-14, f"trapezoid exactness max error {worst_trap:.1e} <= 1e-14")


def test_criterion_2_bem_spectral_accuracy(emit):
    with Criterion(2, emit, budget=5.0) as c:
        k = np.pi
        theta, dirs = unit_directions(N_ANGLES)
        ref = mie_far_field(mie_solution("sound-soft", k, 1.0), theta)
        errs = {N: plane_wave_far_field_error(circle(1.0), k, N, theta, dirs, ref)
                for N in (6, 12, 24, 40, 48)}
        c.check(errs[40] <= 1e-8, f"N=40 error {errs[40]:.2e} <= 1e-8")
        c.check(errs[12] <= 1e-3, f"N=12 error {errs[12]:.2e} <= 1e-3")
        seq = [errs[N] for N in (6, 12, 24, 48)]
        ok = all(b <= a / 10 or b <= 1e-12 for a, b in zip(seq, seq[1:]))
        c.check(ok, "doubling N=6,12,24,48 gives " + ", ".join(f"{e:.1e}" for e in seq))


def test_criterion_3_fem_order(emit):
    with Criterion(3, emit, budget=120.0) as c:
        wave = PlaneWave(np.pi / 4)
        for d in (2, 3):
            hs, errs = [], []
            for level in range(4):
                mesh = build_structured_mesh(STAR_RECT, level, d)
                system = factorize(assemble(mesh, wave.k))
                sol = solve_dirichlet(system, wave(mesh.nodes[mesh.dirichlet]))
                hs.append(mesh.h)
                errs.append(error_norms(sol, wave, wave.gradient)[2])
            orders = observed_orders(hs, errs)
            c.check(np.all(np.abs(orders - d) <= 0.3),
                    f"d={d} H1 orders " + ", ".join(f"{o:.2f}" for o in orders))


def test_criterion_4_pipeline_matches_series(disk_study, emit):
    rows, elapsed = disk_study
    with Criterion(4, emit, budget=300.0 - elapsed) as c:
        errs = [r["error"] for r in rows]
        c.note("errors " + ", ".join(f"{e:.2e}" for e in errs))
        c.check(all(b < a for a, b in zip(errs, errs[1:])), "monotone decrease")
        c.check(errs[-1] < 1e-4, f"finest (L={rows[-1]['L']}) {errs[-1]:.2e} < 1e-4")
        c.note(f"study time {elapsed:.1f} s")


def test_criterion_5_far_field_superconvergence(emit):
    with Criterion(5, emit) as c:
        d = 2
        theta, dirs = unit_directions(N_ANGLES)
        ref = disk_truth(theta)
        hs, errs = [], []
        for level in range(4):
            problem, _, fields = disk_run(d, level)
            F = state_far_field(problem, fields[1], dirs)
            hs.append(problem.mesh.h)
            errs.append(float(np.abs(F - ref).max() / np.abs(ref).max()))
        orders = observed_orders(hs, errs)
        c.check(np.all(orders >= 2 * d - 1),
                f"d={d} far-field orders " + ", ".join(f"{o:.2f}" for o in orders)
                + f" >= {2 * d - 1}")


def test_criterion_6_interface_conditioning(emit):
    with Criterion(6, emit, budget=600.0) as c:
        medium = make_medium("star")
        gamma = circle(3.5)
        counts = {}
        for level in range(4):
            mesh = build_structured_mesh(STAR_RECT, level, 3, hetero=medium)
            for N in (20, 40):
                problem = build_problem(mesh, gamma, N, PlaneWave(np.pi / 4), medium)
                state = solve_interface(problem, tol=1e-8)
                counts[level, N] = state.iterations
        low = list(counts.values())
        c.check(max(low) - min(low) <= 2,
                f"k=pi/4 counts over levels 0-3 and N=20,40 in [{min(low)}, {max(low)}]")
        mesh = build_structured_mesh(STAR_RECT, 2, 3, hetero=medium)
        high = solve_interface(build_problem(mesh, gamma, 80, PlaneWave(4 * np.pi), medium),
                               tol=1e-8).iterations
        ratio = high / max(low)
        c.check(ratio < 16, f"k=4pi count {high}, ratio {ratio:.1f} < 16")


def test_criterion_7_direct_iterative_agreement(emit):
    with Criterion(7, emit) as c:
        medium = make_medium("star")
        mesh = build_structured_mesh(STAR_RECT, 0, 2, hetero=medium)
        problem = build_problem(mesh, circle(3.5), 20, PlaneWave(np.pi / 4), medium)
        it = solve_interface(problem, method="gmres")
        di = solve_interface(problem, method="direct")
        rel = np.abs(it.f_tilde - di.f_tilde).max() / np.abs(di.f_tilde).max()
        c.check(rel <= 1e-6, f"f_tilde relative difference {rel:.1e} <= 1e-6")
        S = schur_matrix(problem)
        rng = np.random.default_rng(0)
        worst = 0.0
        for _ in range(5):
            v = rng.standard_normal(problem.size) + 1j * rng.standard_normal(problem.size)
            Av = apply_schur(problem, v)
            worst = max(worst, np.abs(S @ v - Av).max() / np.abs(Av).max())
        c.check(worst <= 1e-10, f"matrix vs operator {worst:.1e} <= 1e-10")


def test_criterion_8_overlap_consistency(disk_study, emit):
    rows, _ = disk_study
    with Criterion(8, emit) as c:
        defects = [r["defect"] for r in rows]
        c.note("defects " + ", ".join(f"{d:.2e}" for d in defects))
        c.check(all(r["defect"] < 10 * r["error"] for r in rows), "each below 10x far-field error")
        c.check(all(b < a for a, b in zip(defects, defects[1:])), "decreasing")


def test_criterion_9_null_scattering(emit):
    with Criterion(9, emit) as c:
        wave = PlaneWave(np.pi / 4)
        _, dirs = unit_directions(N_ANGLES)
        rect = (-6.0, 6.0, -6.0, 6.0)
        for d in (2, 3):
            hs, mags, scales = [], [], []
            for level in range(3):
                mesh = build_structured_mesh(rect, level, d, hetero=uniform())
                problem = build_problem(mesh, circle(3.5), 40, wave, uniform())
                u_h, phi = reconstruct(problem, solve_interface(problem))
                mags.append(np.abs(state_far_field(problem, phi, dirs)).max())
                # relative H1 error of the interior field, whose exact value is u_inc;
                # |u_inc| = 1 and |grad u_inc| = k give its H1 norm in closed form
                norm = np.sqrt(144.0 * (1.0 + wave.k**2))
                scales.append(error_norms(u_h, wave, wave.gradient)[2] / norm)
                hs.append(mesh.h)
            orders = observed_orders(hs, mags)
            c.check(all(m < s for m, s in zip(mags, scales)),
                    f"d={d} max|F| " + ", ".join(f"{m:.1e}" for m in mags)
                    + " below FEM error " + ", ".join(f"{s:.1e}" for s in scales))
            c.check(np.all(orders >= d), f"d={d} rates " + ", ".join(f"{o:.2f}" for o in orders))


def test_criterion_10_radiation_behaviour(emit):
    with Criterion(10, emit) as c:
        medium = make_medium("star")
        mesh = build_structured_mesh(STAR_RECT, 0, 2, hetero=medium)
        problem = build_problem(mesh, circle(3.5), 20, PlaneWave(np.pi / 4), medium)
        _, phi = reconstruct(problem, solve_interface(problem))
        _, dirs = unit_directions(8)
        r, k = 200.0, problem.k
        F = state_far_field(problem, phi, dirs)
        w = eval_potentials(problem.grid, k, phi, r * dirs)
        approx = np.exp(1j * k * r) / np.sqrt(r) * F
        mismatch = float(np.max(np.abs(w - approx) / np.abs(approx)))
        c.check(mismatch <= 0.02, f"r=200 relative mismatch {mismatch:.1e} <= 2e-2")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
