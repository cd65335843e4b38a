"""
Rampas radiales f del potencial F(u) = f(d_m²(u)).

Ambas rampas cumplen f(0)=0, f=c3 para s ≥ δ₀², cotas lineales c1·s ≤ f ≤ c2·s
y son C² en la unión con la meseta.
"""
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.errors import NegativeArgument

RampKind = Literal["cubic", "quintic"]


@dataclass(frozen=True)
class Ramp:
    """
    Rampa f(s) = c3·S(s/δ₀²) recortada a c3.

    cubic:   S(x) = 1 − (1 − x)³
    quintic: S(x) = 1 − (1 − x)³(1 + x + x²)
    """
    kind: RampKind
    c3: float
    delta0: float

    @property
    def c1(self) -> float:
        return self.c3 / self.delta0**2

    @property
    def c2(self) -> float:
        return self.c4

    @property
    def c4(self) -> float:
        slope = 3.0 if self.kind == "cubic" else 2.0
        return slope * self.c3 / self.delta0**2

    def _shape(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """S, S', S'' en x ∈ [0, 1]."""
        w = 1.0 - x
        if self.kind == "cubic":
            return 1.0 - w**3, 3.0 * w**2, -6.0 * w
        q = 1.0 + x + x**2
        value = 1.0 - w**3 * q
        first = w**2 * (2.0 + 2.0 * x + 5.0 * x**2)
        second = w * (-2.0 + 4.0 * x - 20.0 * x**2)
        return value, first, second

    def f_eval(self, s):
        """
        Valor y derivada de f en s ≥ 0.

        Returns:
            (f(s), f'(s)); escalares si s es escalar
        """
        s_arr = np.asarray(s, dtype=float)
        if np.any(s_arr < 0.0):
            raise NegativeArgument(f"f solo admite s ≥ 0, recibido min(s)={s_arr.min()}")
        x = np.minimum(s_arr / self.delta0**2, 1.0)
        value, first, _ = self._shape(x)
        plateau = s_arr >= self.delta0**2
        value = np.where(plateau, self.c3, self.c3 * value)
        deriv = np.where(plateau, 0.0, self.c3 * first / self.delta0**2)
        if np.ndim(s) == 0:
            return float(value), float(deriv)
        return value, deriv

    def f_second(self, s) -> np.ndarray:
        """f''(s); se usa para acotar el Hessiano de F."""
        s_arr = np.asarray(s, dtype=float)
        x = np.minimum(s_arr / self.delta0**2, 1.0)
        _, _, second = self._shape(x)
        return np.where(s_arr >= self.delta0**2, 0.0, self.c3 * second / self.delta0**4)

    def value(self, s) -> np.ndarray:
        return self.f_eval(np.asarray(s, dtype=float))[0]

    def centralized(self, gap: float, lam):
        """F̃(λ) = f((dist_m/2 − |λ|)²); par en λ y nula en ±dist_m/2."""
        lam = np.asarray(lam, dtype=float)
        y = gap / 2 - np.abs(lam)
        value = self.value(y**2)
        return float(value) if np.ndim(value) == 0 else value

    def centralized_derivative(self, gap: float, lam):
        """F̃'(λ) = −2·sign(λ)·y·f'(y²) con y = dist_m/2 − |λ|."""
        lam = np.asarray(lam, dtype=float)
        y = gap / 2 - np.abs(lam)
        _, deriv = self.f_eval(y**2)
        return -2.0 * np.sign(lam) * y * deriv
