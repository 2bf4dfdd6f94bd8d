"""Random instance generation and instance file I/O.

Instances model a shift of `tf` half-hour periods (default 16, an 8-hour
shift). Per trailer, in this exact draw order: arrival r ~ U[0, floor(0.75
tf)], processing p ~ U[ceil(tf/8), floor(tf/4)], docking delta ~ U[1, 3],
grace ~ U[3, 5] (due = r + delta + p + grace), waiting penalty f ~ U[5, 10],
and g = 100 f. All uniforms are inclusive integer ranges drawn from the
seeded stream in prng, so a (seed, config) pair maps to one byte-exact file
on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import FormatError, Instance, Trailer
from .prng import Rng


@dataclass(frozen=True)
class GenConfig:
    seed: int
    docks: int
    trailers: int
    tf: int = 16
    relaxed: bool = False  # lift the production-size bounds for desk-scale tests

    def validate(self):
        if self.tf < 4:
            raise ValueError("tf must be >= 4 so the processing-time range is nonempty")
        if self.relaxed:
            if self.docks < 1 or self.trailers < 1:
                raise ValueError("need docks >= 1 and trailers >= 1")
            return
        if not 20 <= self.docks <= 60:
            raise ValueError(f"docks {self.docks} outside [20, 60]; use relaxed mode for other sizes")
        lo, hi = 3 * self.docks, min(4 * self.docks, 200)
        if not lo <= self.trailers <= hi:
            raise ValueError(f"trailers {self.trailers} outside [{lo}, {hi}]; use relaxed mode for other sizes")


def instance_name(cfg: GenConfig) -> str:
    return f"tf_{cfg.docks}_tr_{cfg.trailers}"


def generate(cfg: GenConfig) -> Instance:
    cfg.validate()
    rng = Rng(cfg.seed)
    r_hi = (3 * cfg.tf) // 4
    p_lo = -(-cfg.tf // 8)  # ceil
    p_hi = cfg.tf // 4
    trailers = []
    for j in range(1, cfg.trailers + 1):
        r = rng.randint(0, r_hi)
        p = rng.randint(p_lo, p_hi)
        delta = rng.randint(1, 3)
        grace = rng.randint(3, 5)
        f = rng.randint(5, 10)
        trailers.append(Trailer(id=j, r=r, due=r + delta + p + grace, p=p,
                                delta=delta, f=f, g=100 * f))
    return Instance(name=instance_name(cfg), docks=cfg.docks, horizon=cfg.tf,
                    trailers=tuple(trailers))


# --- instance text format ---------------------------------------------------
#
#   DSTS 1
#   name tf_20_tr_60
#   docks 20
#   horizon 16
#   trailers 60
#   <id> <r> <due> <p> <delta> <f> <g>   one line per trailer, ids ascending

def write_instance(inst: Instance) -> str:
    lines = [
        "DSTS 1",
        f"name {inst.name}",
        f"docks {inst.docks}",
        f"horizon {inst.horizon}",
        f"trailers {inst.n}",
    ]
    for t in inst.trailers:
        lines.append(f"{t.id} {t.r} {t.due} {t.p} {t.delta} {t.f} {t.g}")
    return "\n".join(lines) + "\n"


def read_instance(text: str) -> Instance:
    lines = text.splitlines()
    pos = 0

    def next_line(section: str) -> tuple[int, str]:
        nonlocal pos
        while pos < len(lines) and not lines[pos].strip():
            pos += 1
        if pos >= len(lines):
            raise FormatError(f"unexpected end of file: missing {section}")
        pos += 1
        return pos, lines[pos - 1].strip()

    def keyword(section: str) -> str:
        lineno, line = next_line(section)
        key, _, value = line.partition(" ")
        if key != section:
            raise FormatError(f"line {lineno}: expected {section!r}, got {key!r}")
        return value

    lineno, magic = next_line("header")
    if magic != "DSTS 1":
        raise FormatError(f"line {lineno}: expected 'DSTS 1' header, got {magic!r}")
    name = keyword("name")

    def int_field(section: str) -> int:
        value = keyword(section)
        try:
            return int(value)
        except ValueError:
            raise FormatError(f"{section} must be an integer, got {value!r}")

    docks = int_field("docks")
    horizon = int_field("horizon")
    count = int_field("trailers")
    if count < 1:
        raise FormatError("trailers must be >= 1")
    trailers = []
    for k in range(1, count + 1):
        lineno, line = next_line(f"trailer row {k}")
        parts = line.split()
        if len(parts) != 7:
            raise FormatError(f"line {lineno}: expected 7 fields, got {len(parts)}")
        try:
            vals = [int(x) for x in parts]
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer field in {line!r}")
        if vals[0] != k:
            raise FormatError(f"line {lineno}: trailer id {vals[0]}, expected {k}")
        trailers.append(Trailer(id=vals[0], r=vals[1], due=vals[2], p=vals[3],
                                delta=vals[4], f=vals[5], g=vals[6]))
    while pos < len(lines):
        if lines[pos].strip():
            raise FormatError(f"line {pos + 1}: trailing content {lines[pos].strip()!r}")
        pos += 1
    try:
        return Instance(name=name, docks=docks, horizon=horizon, trailers=tuple(trailers))
    except ValueError as exc:
        raise FormatError(str(exc))
