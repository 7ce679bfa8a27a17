import csv
import io
import json
import re

from sympy import factorint

from .ff import Poly

_TERM = re.compile(r'^(?:(e?\d+)\*?)?(?:(theta|t|x)(?:\^(\d+))?)?$')


def split_prime_power(q):
    """
    q = p^b -> (p, b)

    :raises ValueError: q is not a prime power
    """
    factors = factorint(q)
    if q < 2 or len(factors) != 1:
        raise ValueError(f'{q} is not a prime power')
    (p, b), = factors.items()
    return int(p), int(b)


def _coefficient(field, text):
    if text is None:
        return field.one
    if text.startswith('e'):
        return field.element(int(text[1:]))
    return field(int(text))


def parse_poly(text, field):
    """
    Read a polynomial in theta such as 'theta^2+1', 't^2+2t+2' or
    'x^3 - x + e5' (eK is the field element with code K).

    :param text: the polynomial
    :param field: FieldSpec of the coefficients
    :rtype: Poly
    """
    clean = text.replace(' ', '')
    if not clean:
        raise ValueError('empty polynomial')
    clean = re.sub(r'(?<=[^+^*])-', '+-', clean)
    coeffs = {}
    for raw in clean.split('+'):
        if not raw:
            raise ValueError(f'cannot parse polynomial {text!r}')
        sign = -1 if raw.startswith('-') else 1
        term = raw.lstrip('-')
        match = _TERM.match(term)
        if not match or not term:
            raise ValueError(f'cannot parse term {raw!r} of {text!r}')
        coef, var, power = match.groups()
        degree = 0 if var is None else int(power or 1)
        value = _coefficient(field, coef) * sign
        coeffs[degree] = coeffs.get(degree, field.zero) + value
    top = max(coeffs)
    return Poly(field, [coeffs.get(k, field.zero) for k in range(top + 1)])


def format_table(header, rows):
    """Fixed-width text table."""
    cells = [[str(c) for c in header]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for k, row in enumerate(cells):
        lines.append('  '.join(c.ljust(w) for c, w in zip(row, widths)))
        if k == 0:
            lines.append('  '.join('-' * w for w in widths))
    return '\n'.join(lines)


def format_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_csv(path, header, rows):
    with open(path, 'w', newline='') as f:
        f.write(format_csv(header, rows))


def dump_json(payload):
    return json.dumps(payload, sort_keys=True, default=str)


def read_config_file(path):
    from .config import RunConfig
    with open(path, 'r') as f:
        return RunConfig.from_json(f.read())


def save_config_file(path, cfg):
    with open(path, 'w') as f:
        f.write(cfg.to_json())
