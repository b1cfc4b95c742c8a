import numpy as np
import pytest
import scipy.linalg as sla
import scipy.sparse as sp

from schrodinger_dpg.dpg_core import (assemble, boundary_pairing,
                                      condition_estimate, element_matrices,
                                      l2_error, l2_error_per_element,
                                      skeleton_pairing, solve)
from schrodinger_dpg.fe_spaces import build_dofmap
from schrodinger_dpg.mesh import build_mesh, build_skeleton
from schrodinger_dpg.physics import (SchrodingerOperator, case_from_derivatives,
                                     gaussian_case)
from schrodinger_dpg.ref_element import (gauss_legendre_1d, gauss_legendre_2d,
                                         legendre_table, tensor_table)
from schrodinger_dpg.spectral import (counterexample_forcing as spectral_counterexample,
                                      counterexample_solution as spectral_solution,
                                      evaluate as spectral_evaluate)


def setup(nx, nt, p=3, dp=1, variant="practical", L=1.0, T=1.0):
    mesh = build_mesh(L, T, nx, nt)
    skel = build_skeleton(mesh)
    return mesh, skel, build_dofmap(mesh, skel, p, dp, variant)


def poly_case(beta=2.0):
    """u = x t, a member of every trial space with inhomogeneous side data."""
    zero = lambda x, t: np.zeros(np.broadcast_shapes(np.shape(x), np.shape(t)),
                                 dtype=complex)
    return case_from_derivatives(
        "bilinear", beta=beta,
        u=lambda x, t: np.asarray(x) * np.asarray(t) + 0j,
        u_t=lambda x, t: np.asarray(x) + 0j,
        u_x=lambda x, t: np.asarray(t) + 0j,
        u_xx=zero)


def rich_poly_case(beta=2.5):
    """A full Q_2 polynomial with complex coefficients."""
    c = 1.0 + 2.0j

    def u(x, t):
        x, t = np.asarray(x), np.asarray(t)
        return c * x**2 * t**2 + x * t - 3j * t**2 + 2.0

    def u_t(x, t):
        x, t = np.asarray(x), np.asarray(t)
        return 2 * c * x**2 * t + x - 6j * t

    def u_x(x, t):
        x, t = np.asarray(x), np.asarray(t)
        return 2 * c * x * t**2 + t

    def u_xx(x, t):
        x, t = np.asarray(x), np.asarray(t)
        return 2 * c * t**2 + 0 * x

    return case_from_derivatives("q2", beta=beta, u=u, u_t=u_t, u_x=u_x, u_xx=u_xx)


class TestElementMatrices:
    def test_gram_hermitian_positive_definite(self):
        for p, dp, beta, shape in ((3, 1, 2.5, (2, 2)), (4, 2, 2.0, (3, 2))):
            mesh, skel, dm = setup(*shape, p=p, dp=dp)
            em = element_matrices(mesh, skel, dm, op=SchrodingerOperator(beta))
            herm = np.max(np.abs(em.gram - em.gram.conj().T))
            assert herm <= 1e-12 * np.max(np.abs(em.gram))
            assert np.min(sla.eigvalsh(em.gram)) > 0

    def test_constant_test_function_gram_entry(self):
        # the first basis function is v = 1, annihilated by the operator,
        # so G[0,0] is just the element area
        mesh, skel, dm = setup(4, 2, p=3)
        em = element_matrices(mesh, skel, dm, op=SchrodingerOperator(2.5))
        np.testing.assert_allclose(em.gram[0, 0], mesh.hx * mesh.ht, rtol=1e-14)

    def test_field_column_against_symbolic_integral(self):
        # (phi, A v)_K with phi = 1 and v = t on the unit element:
        # A v = i, so the integral is conj(i) = -i
        mesh, skel, dm = setup(1, 1, p=3)
        em = element_matrices(mesh, skel, dm, op=SchrodingerOperator(2.0))
        deg = dm.p + dm.dp
        coeff_v = np.zeros((deg + 1) ** 2)
        coeff_v[0] = 0.5                       # constant part of t
        coeff_v[1] =  1.0 / (2.0 * np.sqrt(3))  # orthonormal P1 part of t
        entry = coeff_v @ em.b[:, 0]
        np.testing.assert_allclose(entry, -1j, atol=1e-14)

    def test_zero_data_zero_load(self):
        mesh, skel, dm = setup(2, 2)
        em = element_matrices(mesh, skel, dm, op=SchrodingerOperator(2.0))
        np.testing.assert_allclose(em.load, 0.0, atol=1e-15)

    def test_boundary_lifting_enters_load(self):
        # zero forcing but nonzero inflow data: the load is pure lifting
        mesh, skel, dm = setup(2, 2)
        em = element_matrices(mesh, skel, dm, op=SchrodingerOperator(2.0),
                              boundary_data=lambda x, t: 1.0 + 0 * np.asarray(x))
        assert np.max(np.abs(em.raw_load)) < 1e-15
        assert np.max(np.abs(em.load)) > 1e-3

    def test_exact_solution_annihilates_element_residual(self):
        # with the exact local coefficients the ultraweak identity
        # B x = l holds row by row (consistency of all the inputs)
        case = rich_poly_case()
        mesh, skel, dm = setup(2, 2)
        system = assemble(mesh, skel, dm, case=case)
        x_loc = exact_local_coefficients(case, system, element=3)
        res = system.loads[3] - system.local.b @ x_loc
        assert np.max(np.abs(res)) < 1e-12


def exact_local_coefficients(case, system, element):
    """Project the exact solution onto the local trial unknowns."""
    dm = system.dofmap
    mesh = dm.mesh
    p, fo = dm.p, dm.flux_order
    ix, it = mesh.element_index(element)
    x0, t0 = mesh.element_corner(ix, it)

    rule = gauss_legendre_2d(p + 6)
    tab = tensor_table(rule.x, rule.t, p - 1)
    uvals = case.u(x0 + mesh.hx * rule.x, t0 + mesh.ht * rule.t)
    field = (uvals * rule.weights) @ tab.T   # orthonormal-basis projection

    # trace nodal values on the four edges in local layout order
    edges = {n: e for n, (e, _) in zip(("bottom", "top", "left", "right"),
                                       system.dofmap.skeleton.element_edges(ix, it))}
    from schrodinger_dpg.dpg_core import _local_trace_layout
    layout = _local_trace_layout(p)
    tr = np.zeros(4 * p, dtype=complex)
    for name, cols in layout.items():
        (xa, ta), (xb, tb) = edges[name].endpoints
        s = dm.trace_nodes
        vals = case.u(xa + s * (xb - xa), ta + s * (tb - ta))
        tr[np.asarray(cols)] = vals

    s1, w1 = gauss_legendre_1d(p + 6)
    leg = legendre_table(s1, fo)[0]
    flux = []
    for name in ("left", "right"):
        (xa, ta), (xb, tb) = edges[name].endpoints
        vals = case.u_x(xa + 0 * s1, ta + s1 * (tb - ta))
        flux.append(leg @ (w1 * vals))  # orthonormal Legendre projection
    return np.concatenate([field, tr, np.concatenate(flux)])


class TestAssemble:
    def test_system_dimension_matches_dof_budget(self):
        mesh, skel, dm = setup(1, 1)
        system = assemble(mesh, skel, dm, case=poly_case())
        assert system.matrix.shape == (17, 17)
        assert system.n_free == dm.n_free

    def test_hermitian(self):
        mesh, skel, dm = setup(3, 2, p=3)
        system = assemble(mesh, skel, dm, case=gaussian_case())
        diff = (system.matrix - system.matrix.getH()).toarray()
        assert np.max(np.abs(diff)) <= 1e-10 * np.max(np.abs(system.matrix.toarray()))

    def test_zero_problem(self):
        mesh, skel, dm = setup(2, 2)
        system = assemble(mesh, skel, dm, op=SchrodingerOperator(2.0))
        np.testing.assert_allclose(system.rhs, 0.0, atol=1e-15)
        report = solve(system)
        assert report.eta <= 1e-12
        np.testing.assert_allclose(report.solution.field_coeffs, 0.0, atol=1e-14)

    def test_positive_definite_after_constraints(self):
        mesh, skel, dm = setup(2, 2)
        system = assemble(mesh, skel, dm, case=gaussian_case())
        eigs = np.linalg.eigvalsh(system.matrix.toarray())
        assert eigs.min() > 0


class TestSolve:
    @pytest.mark.parametrize("nmesh", [1, 2])
    def test_polynomial_exactness(self, nmesh):
        case = poly_case()
        mesh, skel, dm = setup(nmesh, nmesh)
        report = solve(assemble(mesh, skel, dm, case=case))
        assert l2_error(report, case.u) < 1e-12
        assert report.residual_rel < 1e-12

    def test_rich_polynomial_reproduced_with_skeleton(self):
        case = rich_poly_case()
        mesh, skel, dm = setup(2, 2)
        report = solve(assemble(mesh, skel, dm, case=case))
        assert l2_error(report, case.u) < 1e-11
        # the recovered trace matches u on interior skeleton nodes
        free = dm.trace_free >= 0
        exact_trace = case.u(dm.trace_points[free, 0], dm.trace_points[free, 1])
        np.testing.assert_allclose(report.solution.trace_values[free],
                                   exact_trace, atol=1e-10)
        # the recovered flux matches du/dx along a vertical edge
        edge = dm.skeleton.vertical[1]  # x = 0.5, t in [0, 0.5]
        coeffs = report.solution.flux_coeffs[dm.skeleton.vertical_id(edge.i, edge.j)]
        s = np.linspace(0, 1, 11)
        vals = coeffs @ legendre_table(s, dm.flux_order)[0]
        exact = case.u_x(0.5 + 0 * s, 0.5 * s)
        np.testing.assert_allclose(vals, exact, atol=1e-10)

    def test_ideal_variant_reproduces_polynomials(self):
        # flux order p instead of p-1; the richer skeleton must not
        # break exactness or definiteness
        case = rich_poly_case()
        mesh, skel, dm = setup(2, 2, variant="ideal")
        assert dm.flux_order == dm.p
        report = solve(assemble(mesh, skel, dm, case=case))
        assert l2_error(report, case.u) < 1e-11

    def test_indicator_tracks_error_under_refinement(self):
        case = gaussian_case()
        errors, etas = [], []
        for n in (2, 4, 8):
            mesh, skel, dm = setup(n, n)
            report = solve(assemble(mesh, skel, dm, case=case))
            errors.append(l2_error(report, case.u))
            etas.append(report.eta)
        assert all(b < a for a, b in zip(etas, etas[1:]))
        assert all(b < a for a, b in zip(errors, errors[1:]))

    def test_galerkin_orthogonality_surrogate(self):
        case = gaussian_case()
        mesh, skel, dm = setup(3, 3)
        system = assemble(mesh, skel, dm, case=case)
        report = solve(system)
        x = np.concatenate([
            report.solution.field_coeffs.ravel(),
            report.solution.trace_values[dm.trace_free >= 0],
            report.solution.flux_coeffs.ravel()])
        gathered = np.zeros(dm.n_free, dtype=complex)
        for e in range(mesh.n_elements):
            x_loc = system.element_solution(x, e)
            res = system.loads[e] - system.local.b @ x_loc
            z = sla.cho_solve(system.local.gram_cho, res)
            contrib = system.local.b.conj().T @ z
            m = system.gidx[e] >= 0
            np.add.at(gathered, system.gidx[e][m], contrib[m])
        assert np.max(np.abs(gathered)) <= 1e-10 * np.max(np.abs(system.rhs))

    def test_cg_agrees_with_direct(self):
        case = gaussian_case()
        mesh, skel, dm = setup(3, 3)
        system = assemble(mesh, skel, dm, case=case)
        direct = solve(system, method="direct")
        iterative = solve(system, method="cg", tol=1e-12)
        diff = np.max(np.abs(direct.solution.field_coeffs
                             - iterative.solution.field_coeffs))
        assert diff < 1e-8

    def test_unknown_method_rejected(self):
        mesh, skel, dm = setup(2, 2)
        system = assemble(mesh, skel, dm, case=poly_case())
        with pytest.raises(ValueError):
            solve(system, method="lobpcg")

    def test_field_point_evaluation(self):
        case = rich_poly_case()
        mesh, skel, dm = setup(2, 2)
        report = solve(assemble(mesh, skel, dm, case=case))
        rng = np.random.default_rng(8)
        x, t = rng.uniform(0, 1, 25), rng.uniform(0, 1, 25)
        np.testing.assert_allclose(report.solution.field_at(x, t),
                                   case.u(x, t), atol=1e-10)


class TestErrors:
    def test_error_vanishes_for_reproduced_solution(self):
        case = poly_case()
        mesh, skel, dm = setup(2, 2)
        report = solve(assemble(mesh, skel, dm, case=case))
        assert l2_error(report, case.u) < 1e-12

    def test_elementwise_sum_is_order_independent(self):
        case = gaussian_case()
        mesh, skel, dm = setup(4, 4)
        report = solve(assemble(mesh, skel, dm, case=case))
        per_el = l2_error_per_element(report.solution, case.u)
        rng = np.random.default_rng(0)
        for _ in range(5):
            perm = rng.permutation(len(per_el))
            assert abs(per_el[perm].sum() - per_el.sum()) <= 1e-14 * per_el.sum()


class TestConditionEstimate:
    def test_identity(self):
        est = condition_estimate(sp.identity(64, format="csr", dtype=complex))
        np.testing.assert_allclose(est.value, 1.0, rtol=1e-6)

    def test_known_diagonal(self):
        d = np.linspace(1.0, 50.0, 80)
        est = condition_estimate(sp.diags(d.astype(complex)).tocsr())
        np.testing.assert_allclose(est.value, 50.0, rtol=1e-2)

    def test_growth_under_refinement(self):
        case = gaussian_case()
        values = []
        for n in (2, 4, 8):
            mesh, skel, dm = setup(n, n)
            system = assemble(mesh, skel, dm, case=case)
            values.append(condition_estimate(system.matrix).value)
        assert values[0] < values[1] < values[2]


class TestUltraweakIdentity:
    @pytest.mark.parametrize("case", [gaussian_case(), rich_poly_case()],
                             ids=["gaussian", "polynomial"])
    def test_manufactured_data_satisfies_the_weak_form(self, case):
        # for any smooth test field v, moving all derivatives onto v via
        # the boundary pairing must reproduce (f, v): this pins the sign
        # conventions of the operator, the forcing and the pairing
        # against each other
        mesh = build_mesh(1, 1, 4, 4)
        skel = build_skeleton(mesh)
        beta = case.beta

        v = lambda x, t: np.exp(np.asarray(x)) * np.cos(np.asarray(t)) + 0j
        v_t = lambda x, t: -np.exp(np.asarray(x)) * np.sin(np.asarray(t)) + 0j
        v_x = v
        v_xx = v

        rule = gauss_legendre_2d(12)
        x0, t0 = mesh.corners()
        xq = x0[:, None] + mesh.hx * rule.x[None, :]
        tq = t0[:, None] + mesh.ht * rule.t[None, :]
        av = 1j * v_t(xq, tq) - 0.5 * beta * v_xx(xq, tq)
        volume = mesh.hx * mesh.ht * np.sum(
            rule.weights * (case.u(xq, tq) * np.conj(av)))
        load = mesh.hx * mesh.ht * np.sum(
            rule.weights * (case.f(xq, tq) * np.conj(v(xq, tq))))
        pairing = skeleton_pairing(mesh, skel, beta, case.u, case.u_x,
                                   v, v_x, q=12)
        residual = abs(volume + pairing - load)
        assert residual <= 1e-10 * max(1.0, abs(load))


class TestCrossSolverAgreement:
    def test_dpg_matches_oracle_on_resolvable_mode(self):
        # one resonant mode (phase rate pi^2) with zero data: the oracle
        # solution is exact for its own truncated forcing, so the DPG
        # error against it is pure discretization error and shrinks at
        # the L2 rate of the field block
        forcing = spectral_counterexample(1)
        oracle = spectral_solution(1)
        u_exact = lambda x, t: spectral_evaluate(oracle, x, t)
        errors = []
        for n in (4, 8, 16):
            mesh, skel, dm = setup(n, n)
            system = assemble(mesh, skel, dm, op=SchrodingerOperator(2.0),
                              forcing=forcing, q_load=10)
            errors.append(l2_error(solve(system), u_exact, q_err=12))
        assert errors[-1] < 1e-3
        rate = np.log2(errors[0] / errors[-1]) / 2.0
        assert rate > 2.5

    def test_oracle_evaluation_paths_agree_on_measured_error(self):
        # measuring the same discrete solution against the closed-form
        # and the quadrature-backed oracle gives the same error
        forcing = spectral_counterexample(2)
        closed = spectral_solution(2)
        from schrodinger_dpg.spectral import SpectralSolution
        quad = SpectralSolution(L=1.0, T=1.0, beta=2.0, M=2,
                                f_modes=closed.f_modes, u_modes=None)
        mesh, skel, dm = setup(8, 8)
        system = assemble(mesh, skel, dm, op=SchrodingerOperator(2.0),
                          forcing=forcing, q_load=12)
        report = solve(system)
        e_closed = l2_error(report, lambda x, t: spectral_evaluate(closed, x, t),
                            q_err=14)
        e_quad = l2_error(report, lambda x, t: spectral_evaluate(quad, x, t),
                          q_err=14)
        assert abs(e_closed - e_quad) <= 1e-9 * e_closed


class TestSkeletonPairing:
    @staticmethod
    def random_smooth_pair(seed):
        rng = np.random.default_rng(seed)
        cw = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        cv = rng.standard_normal(4) + 1j * rng.standard_normal(4)

        def w(x, t):
            x, t = np.asarray(x), np.asarray(t)
            return cw[0] + cw[1] * x**2 + cw[2] * np.sin(2 * x + t) + cw[3] * x * t**2

        def w_x(x, t):
            x, t = np.asarray(x), np.asarray(t)
            return 2 * cw[1] * x + 2 * cw[2] * np.cos(2 * x + t) + cw[3] * t**2

        def v(x, t):
            x, t = np.asarray(x), np.asarray(t)
            return cv[0] + cv[1] * t**2 + cv[2] * np.cos(x - 2 * t) + cv[3] * x**2 * t

        def v_x(x, t):
            x, t = np.asarray(x), np.asarray(t)
            return -cv[2] * np.sin(x - 2 * t) + 2 * cv[3] * x * t

        return w, w_x, v, v_x

    @pytest.mark.parametrize("seed", range(4))
    def test_interior_contributions_cancel(self, seed):
        mesh = build_mesh(1, 1, 4, 4)
        skel = build_skeleton(mesh)
        w, w_x, v, v_x = self.random_smooth_pair(seed)
        beta = 2.0 + 0.5 * seed
        total = skeleton_pairing(mesh, skel, beta, w, w_x, v, v_x, q=10)
        bdry = boundary_pairing(mesh, skel, beta, w, w_x, v, v_x, q=10)
        assert abs(total - bdry) <= 1e-10 * max(1.0, abs(bdry))

    def test_quadratic_trace_identity(self):
        # w = x^2, v = 1: the pairing telescopes to -beta/2 * int_dOmega n_x w_x
        # which is -(beta/2) * (2L * T) * (-1 for left +1 for right) = -beta*L*T...
        # computed directly: left edge contributes +(beta/2)*int 2x|_{x=0}=0,
        # right edge -(beta/2)*int 2L dt = -beta*L*T
        mesh = build_mesh(1, 1, 2, 2)
        skel = build_skeleton(mesh)
        w = lambda x, t: np.asarray(x) ** 2 + 0j
        w_x = lambda x, t: 2.0 * np.asarray(x) + 0j
        one = lambda x, t: np.ones(np.broadcast_shapes(np.shape(x), np.shape(t)),
                                   dtype=complex)
        zero = lambda x, t: np.zeros(np.broadcast_shapes(np.shape(x), np.shape(t)),
                                     dtype=complex)
        beta = 2.0
        total = skeleton_pairing(mesh, skel, beta, w, w_x, one, zero, q=6)
        # i*n_t terms: bottom -i*int x^2 dx, top +i*int x^2 dx: cancel to
        # +i*0; flux terms: -(beta/2)[(+1)*int_right 2*1 - ... ] -> -beta
        # trace-derivative terms vanish since v_x = 0
        np.testing.assert_allclose(total, -beta, atol=1e-12)
