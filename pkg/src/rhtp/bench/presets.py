"""Named benchmark configurations: the MSD, K-sweep and m-sweep experiments."""
from __future__ import annotations

from ..errors import ConfigError
from ..regularizers import DEFAULT_EPS, DEFAULT_GAMMA

DEFAULT_MU = 0.3
DEFAULT_QS = (0.5, 1.0, 1.5, 2.0)
DEFAULT_SEED = 20190501

K_SWEEP = [1, 10, 20, 30, 40, 51, 60, 70, 80, 90, 100, 110, 120, 128]
M_SWEEP = [104, 120, 136, 152, 168, 184, 200, 216, 232, 248, 256]


def standard_algorithms(mu: float = DEFAULT_MU):
    algos = [{"name": "htp", "algorithm": "htp", "mu": mu, "regularizer": None}]
    for q in DEFAULT_QS:
        algos.append(
            {
                "name": f"rhtp-q{q:g}",
                "algorithm": "rhtp",
                "mu": mu,
                "regularizer": {
                    "kind": "smooth_power",
                    "q": q,
                    "eps": DEFAULT_EPS,
                    "gamma": DEFAULT_GAMMA,
                },
            }
        )
    return algos


def _base(name, m, K):
    return {
        "name": name,
        "n": 512,
        "m": m,
        "K": K,
        "num_trials": 100,
        "seed": DEFAULT_SEED,
        "algorithms": standard_algorithms(),
        "success_tol": 1e-6,
        "max_iters": 100,
        "noise_std": 0.0,
        "output_dir": f"results/{name}",
        "workers": 1,
        "save_traces": False,
        "trace_full": False,
        "support_distribution": "uniform",
    }


PRESETS = {
    "paper-msd": lambda: _base("paper-msd", [256], [51]),
    "paper-fig2": lambda: _base("paper-fig2", [256], list(K_SWEEP)),
    "paper-fig3": lambda: _base("paper-fig3", list(M_SWEEP), [51]),
}


def preset(name: str) -> dict:
    """A fresh config dictionary for the named preset."""
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
