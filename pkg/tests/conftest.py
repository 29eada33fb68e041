"""Shared fixtures: small meshes and ready-to-run scheme configurations."""

import pytest

from vphermite.cases.generators import generate
from vphermite.core.models import CASE_DEFAULTS, CaseId, CaseSpec, HermiteBasisSpec, SchemeConfig
from vphermite.discretization.grid import Mesh1D


@pytest.fixture
def make_setup():
    """Factory returning (SchemeConfig, initial HermiteState) for a case."""

    def factory(
        case: CaseId = CaseId.NEAR_EQUILIBRIUM,
        lam: float = 0.1,
        dt: float = 0.05,
        t_final: float = 0.5,
        order: int = 2,
        n_cells: int = 17,
        n_hermite: int = 8,
        alpha: float = 0.0,
        delta: float | None = None,
    ):
        defaults = CASE_DEFAULTS[case]
        spec = CaseSpec(
            case=case,
            delta=defaults["delta"] if delta is None else delta,
            alpha=alpha,
            k_x=defaults["k_x"],
            domain=defaults["domain"],
            lam=lam,
        )
        mesh = Mesh1D.uniform(*spec.domain, n_cells)
        basis = HermiteBasisSpec(T0=1.0, n_hermite=n_hermite)
        cfg = SchemeConfig(dt=dt, t_final=t_final, order=order, lam=lam, mesh=mesh, basis=basis)
        return cfg, generate(spec, mesh, basis)

    return factory
