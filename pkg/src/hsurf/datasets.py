"""Named example datasets with sampling domains chosen away from g' = 0 and poles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import Field, FieldClass, HoloData
from .holo import parse_expr as parse
from .rotational import RadialField, RotH1Params, RotH2Params


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box in the (u, v) plane, optionally with a disk around ``hole`` removed."""

    u_min: float
    u_max: float
    v_min: float
    v_max: float
    hole: complex | None = None
    hole_radius: float = 0.0

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Uniform points in the domain (rejection sampling for the hole)."""
        out = np.empty(0, dtype=complex)
        while out.size < n:
            m = max(2 * (n - out.size), 16)
            z = rng.uniform(self.u_min, self.u_max, m) + 1j * rng.uniform(self.v_min, self.v_max, m)
            if self.hole is not None:
                z = z[np.abs(z - self.hole) > self.hole_radius]
            out = np.concatenate([out, z])
        return out[:n]


@dataclass(frozen=True)
class Dataset:
    name: str
    field: Field
    c: float
    kind: FieldClass
    domain: Domain


def _holo(name, g, A, B=None, *, kind=FieldClass.H1, c=1.0, c1=0.0, z0=0j, domain) -> Dataset:
    data = HoloData(g=parse(g), A=parse(A), B=parse(B) if B else None, c=c, c1=c1, kind=kind, z0=z0)
    return Dataset(name, data.field(), c, kind, domain)


_BOX = Domain(-1.5, 1.5, -1.5, 1.5)


def example_datasets() -> dict[str, Dataset]:
    """Every worked example used by the verification and acceptance suites."""
    items = [
        _holo("sphere", "z", "1", "z", kind=FieldClass.H2, domain=_BOX),
        _holo("h1_z_exp", "z", "e^z", domain=_BOX),
        _holo("h1_z2_z", "z^2", "z", domain=Domain(-1.5, 1.5, -1.5, 1.5, hole=0j, hole_radius=0.3)),
        _holo("h1_zinv_z2", "z^-1", "z^2", z0=1.0, domain=Domain(-1.5, 1.5, -1.5, 1.5, hole=0j, hole_radius=0.4)),
        _holo("h1_z_sin", "z", "sin(z)", domain=_BOX),
        _holo("h2_sin_z_z", "sin(z)", "z", "z", kind=FieldClass.H2, domain=Domain(-1.1, 1.1, -1.0, 1.0)),
        _holo("h2_sinh_cosh_z2", "sinh(z)", "cosh(z)", "z^2", kind=FieldClass.H2, domain=Domain(-1.0, 1.0, -1.1, 1.1)),
        _holo("h2_z_exp_cos", "z", "e^z", "cos(z)", kind=FieldClass.H2, domain=_BOX),
    ]
    f_data = HoloData(g=parse("e^z"), f=parse("z^1.5"))
    items.append(Dataset("propf_pow_exp", f_data.field(), 1.0, FieldClass.H1, Domain(-1.0, 1.0, -1.0, 1.0)))
    items.append(Dataset("rot_h1_catenoid", RadialField(RotH1Params(1.0, 1.0)), 1.0, FieldClass.H1,
                         Domain(-1.0, 1.0, -np.pi, np.pi)))
    items.append(Dataset("rot_h2_1111", RadialField(RotH2Params(1.0, 1.0, 1.0, 1.0)), 1.0, FieldClass.H2,
                         Domain(-2.0, 2.0, -np.pi, np.pi)))
    return {d.name: d for d in items}


H1_PAPER_EXAMPLES = ("h1_z_exp", "h1_z2_z", "h1_zinv_z2", "h1_z_sin")
H2_PAPER_EXAMPLES = ("h2_sin_z_z", "h2_sinh_cosh_z2", "h2_z_exp_cos")
