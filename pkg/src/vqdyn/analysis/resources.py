from dataclasses import asdict, dataclass
from enum import Enum


class Method(str, Enum):
    REAL_TIME = "real-time-vqa"
    IMAG_SUBSPACE = "imag-time-vqa-subspace"
    GD_SUBSPACE = "gradient-descent-subspace"


@dataclass(frozen=True)
class ResourceEstimate:
    """
    Circuit counts for one parameter update.

    m_circuits: distinct elements of M. f_kinetic / f_potential: circuits for the kinetic
    and potential parts of f in real time. Subspace methods instead evaluate energies,
    each needing d L^2 kinetic circuits plus one computational-basis circuit for V,
    at 2 N_theta shifted parameter points per gradient.
    """

    method: Method
    n_params: int
    dims: int
    points: int
    m_circuits: int
    f_kinetic: int
    f_potential: int
    energy_circuits: int
    gradient_evaluations: int

    @property
    def gradient_circuits(self) -> int:
        return self.energy_circuits * self.gradient_evaluations

    @property
    def total(self) -> int:
        return self.m_circuits + self.f_kinetic + self.f_potential + self.gradient_circuits

    def to_dict(self) -> dict:
        data = asdict(self)
        data["method"] = self.method.value
        data["gradient_circuits"] = self.gradient_circuits
        data["total"] = self.total
        return data


def estimate_circuits(n_params: int, dims: int, points: int, method: Method = Method.REAL_TIME) -> ResourceEstimate:
    """Closed-form circuit counts for N_theta parameters on a d-dimensional grid of L points."""
    for name, value in (("n_params", n_params), ("dims", dims), ("points", points)):
        if value < 1:
            raise ValueError(f"{name} must be positive, got {value}")
    method = Method(method)
    m_circuits = n_params * (n_params + 1) // 2
    energy_circuits = dims * points**2 + 1

    if method == Method.REAL_TIME:
        return ResourceEstimate(
            method, n_params, dims, points, m_circuits,
            f_kinetic=dims * points**2 * n_params,
            f_potential=points**dims * n_params,
            energy_circuits=energy_circuits,
            gradient_evaluations=0,
        )
    return ResourceEstimate(
        method, n_params, dims, points,
        m_circuits=m_circuits if method == Method.IMAG_SUBSPACE else 0,
        f_kinetic=0,
        f_potential=0,
        energy_circuits=energy_circuits,
        gradient_evaluations=2 * n_params,
    )
