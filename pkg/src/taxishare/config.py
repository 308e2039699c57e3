"""Instance configuration and exact integer cost weights."""
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from math import lcm

BATCH_WIDTHS = (1, 2, 4, 8, 16, 32, 64, 128)

_RATIONAL = ("tau", "omega", "alpha", "gamma_wait", "gamma_trip", "walking_speed")
_INTEGER = ("rho", "beta", "t_wait_max", "capacity", "k_elliptic", "k_pd", "k_laststop", "seed")
_CHOICE = {
    "mode": ("karri", "oracle", "both"),
    "pals": ("individual", "collective"),
    "dals": ("individual", "collective"),
}
_BOOL = ("sorted_buckets", "elliptic_pruning", "laststop_stop_rule",
         "pd_domination", "dropoff_domination", "cost_pruning")


@dataclass(frozen=True)
class InstanceConfig:
    """Model parameters (times in deciseconds) plus search toggles.

    The toggles default to the full pruning pipeline; switching one off must
    never change a chosen cost, only the amount of work.
    """
    rho: int = 0
    tau: Fraction = Fraction(1)
    omega: Fraction = Fraction(0)
    alpha: Fraction = Fraction(17, 10)
    beta: int = 1200
    t_wait_max: int = 6000
    gamma_wait: Fraction = Fraction(1)
    gamma_trip: Fraction = Fraction(10)
    capacity: int = 4
    # metres per decisecond; 4.5 km/h
    walking_speed: Fraction = Fraction(1, 8)
    k_elliptic: int = 16
    k_pd: int = 16
    k_laststop: int = 16
    mode: str = "karri"
    pals: str = "collective"
    dals: str = "collective"
    sorted_buckets: bool = True
    elliptic_pruning: bool = True
    laststop_stop_rule: bool = True
    pd_domination: bool = True
    dropoff_domination: bool = True
    cost_pruning: bool = True
    seed: int = 0

    def __post_init__(self):
        for name in _RATIONAL:
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        self.validate()

    def validate(self):
        if self.rho < 0 or self.beta < 0 or self.t_wait_max < 0:
            raise ValueError("rho, beta and max wait must be non-negative")
        for name in ("tau", "omega", "gamma_wait", "gamma_trip"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.alpha < 1:
            raise ValueError("alpha must be at least 1")
        if self.capacity < 1:
            raise ValueError("capacity must be at least 1")
        if self.walking_speed <= 0:
            raise ValueError("walking speed must be positive")
        for name in ("k_elliptic", "k_pd", "k_laststop"):
            if getattr(self, name) not in BATCH_WIDTHS:
                raise ValueError(f"{name} must be one of {BATCH_WIDTHS}")
        for name, choices in _CHOICE.items():
            if getattr(self, name) not in choices:
                raise ValueError(f"{name} must be one of {choices}")

    def with_overrides(self, **kw):
        return replace(self, **kw)

    def weights(self):
        return CostWeights(self)


def parse_value(name, text):
    text = text.strip()
    if name in _RATIONAL:
        return Fraction(text)
    if name in _INTEGER:
        return int(text)
    if name in _BOOL:
        low = text.lower()
        if low in ("1", "true", "on", "yes"):
            return True
        if low in ("0", "false", "off", "no"):
            return False
        raise ValueError(f"bad boolean for {name}: {text!r}")
    if name in _CHOICE:
        return text
    raise KeyError(name)


# config-file spellings accepted in addition to field names
ALIASES = {"max_wait": "t_wait_max", "max-wait": "t_wait_max"}


def load_config(path, base=None):
    """Read a ``key=value`` file; blank lines and ``#`` comments are ignored."""
    values = {}
    known = {f.name for f in fields(InstanceConfig)}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = ALIASES.get(key, key.replace("-", "_"))
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = parse_value(key, val)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return replace(base or InstanceConfig(), **values)


def dump_config(cfg, path):
    with open(path, "w") as fh:
        for f in fields(InstanceConfig):
            v = getattr(cfg, f.name)
            if isinstance(v, bool):
                v = "on" if v else "off"
            fh.write(f"{f.name}={v}\n")


@dataclass(frozen=True)
class CostWeights:
    """Cost weights scaled by a common denominator so costs are exact integers.

    ``scale`` is the multiplier applied to every cost; ``alpha_den`` scales
    trip-time excesses so the rational trip limit stays integral.
    """
    cfg: InstanceConfig
    scale: int = field(init=False)
    w_detour: int = field(init=False)
    w_trip: int = field(init=False)
    w_walk: int = field(init=False)
    w_wait_vio: int = field(init=False)
    w_trip_vio: int = field(init=False)
    w_trip_vio_per_unit: int = field(init=False)
    alpha_num: int = field(init=False)
    alpha_den: int = field(init=False)

    def __post_init__(self):
        c = self.cfg
        a_den = c.alpha.denominator
        scale = lcm(c.tau.denominator, c.omega.denominator,
                    c.gamma_wait.denominator, c.gamma_trip.denominator * a_den)
        s = object.__setattr__
        s(self, "scale", scale)
        s(self, "w_detour", scale)
        s(self, "w_trip", int(c.tau * scale))
        s(self, "w_walk", int(c.omega * scale))
        s(self, "w_wait_vio", int(c.gamma_wait * scale))
        # penalty per excess unit measured in 1/alpha_den deciseconds
        s(self, "w_trip_vio", int(c.gamma_trip * scale / a_den))
        s(self, "w_trip_vio_per_unit", int(c.gamma_trip * scale))
        s(self, "alpha_num", c.alpha.numerator)
        s(self, "alpha_den", a_den)

    def trip_limit_num(self, direct_dist, inf):
        """Maximum trip time times ``alpha_den`` (``inf`` if unreachable)."""
        if direct_dist >= inf:
            return inf
        return self.alpha_num * direct_dist + self.alpha_den * self.cfg.beta

    def to_fraction(self, scaled):
        return Fraction(scaled, self.scale)
