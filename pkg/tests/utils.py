import numpy as np


def direct_dft(z: np.ndarray) -> np.ndarray:
    """O(N^2) direct summation of the unnormalized forward DFT."""
    n = z.size
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) @ z


def random_signal(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def pure_tone(n: int, k: int = 3, amplitude: float = 1.0) -> np.ndarray:
    return amplitude * np.exp(2j * np.pi * k * np.arange(n) / n)


def direct_power_summary(z: np.ndarray) -> tuple[float, float]:
    power = z.real ** 2 + z.imag ** 2
    mean = power.sum() / power.size
    return float(mean), float(((power - mean) ** 2).sum() / power.size)


def write_rows(path, rows, header: str | None = None):
    lines = ([header] if header else []) + [f"{re},{im}" for re, im in rows]
    path.write_text("\n".join(lines) + "\n")
    return path
