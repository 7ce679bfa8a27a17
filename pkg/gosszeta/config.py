import json
import os
from dataclasses import asdict, dataclass, field, fields


class Config(object):
    base_dir = os.getcwd()

    BASE_EXPORT_PATH = f"{os.path.join(base_dir, 'exports/')}"
    BASE_DIR = base_dir

    DEFAULT_SEED = 20240613

    # pi-adic precision N and the digits materialized for tagged exponents
    DEFAULT_PRECISION = 64
    DEFAULT_DIGITS = 64
    # extra pi-adic digits carried by the curve expansion at infinity
    INFINITY_GUARD = 6

    MONIC_BUDGET = 400000
    MONIC_CHUNK = 4096
    ENUMERATION_BUDGET = 5000000
    FREDHOLM_MAX_DIMENSION = 512
    MINIMIZER_LIMIT = 64

    STABILIZE_MIN_TRUNCATION = 8
    STABILIZE_MAX_DOUBLINGS = 6
    BOX_MAX_DOUBLINGS = 6

    # multiprocessing pool size for per-prime curve characters
    PROCESSES = 1


def ensure_export_dir(path=None):
    path = path or Config.BASE_EXPORT_PATH
    if not os.path.isdir(path):
        os.makedirs(path)
    return path


@dataclass
class RunConfig:
    """
    Everything needed to replay one CLI run.

    :var command: subcommand name
    :var y: exponent descriptor (integer, digits:p:..., ratio:a/c)
    :var f: v-adic place as a polynomial string
    :var xdeg: x-degree D of the computed zeta coefficients
    :var precision: pi-adic precision N
    :var nmax: number of slopes / Fredholm degree
    """
    command: str
    p: int = None
    b: int = 1
    q: int = None
    y: str = '-1'
    f: str = None
    c: int = None
    a4: int = None
    a6: int = None
    g: int = 0
    d: int = 1
    j: int = None
    xdeg: int = 4
    precision: int = Config.DEFAULT_PRECISION
    nmax: int = 3
    samples: int = 5
    format: str = 'json'
    seed: int = Config.DEFAULT_SEED
    budget: int = Config.ENUMERATION_BUDGET
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.q is not None and self.p is not None:
            if self.q != self.p ** self.b:
                raise ValueError(f'q = {self.q} does not equal p^b = '
                                 f'{self.p}^{self.b}')
        if self.b < 1:
            raise ValueError('b must be >= 1')
        for name in ('xdeg', 'precision', 'nmax', 'samples', 'budget'):
            if getattr(self, name) < 0:
                raise ValueError(f'{name} must be non-negative')
        if self.precision < 1:
            raise ValueError('precision must be >= 1')
        if self.format not in ('json', 'table', 'csv'):
            raise ValueError(f'unknown format {self.format}')
        return self

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f'unknown config keys: {sorted(unknown)}')
        return cls(**data)
