"""Synthetic surveillance-style stream generation.

Produces input streams matching the bundled rule pack: tracked entities that
appear, emit per-tick behaviour classifications (walking, running, active,
inactive, abrupt) as durative fluents, move around a 384x288 scene as
coordinate samples, and eventually disappear.  Roughly one entity in five is
an unattended object: it appears inactive next to a person and is later
removed.  Deterministic for a fixed seed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .streams import InputRecord

SCENE_W = 384.0
SCENE_H = 288.0

_PERSON_BEHAVIOURS = ("walking", "active", "running", "abrupt")
_BEHAVIOUR_WEIGHTS = (0.45, 0.35, 0.15, 0.05)


@dataclass(frozen=True)
class GenSpec:
    entities: int = 10
    duration: int = 1000  # ticks
    seed: int = 0
    scale_copies: int = 1  # duplicate the scenario with fresh entity names

    def __post_init__(self):
        if self.entities < 1 or self.duration < 10:
            raise ValueError("need at least one entity and ten ticks")
        if self.scale_copies < 1:
            raise ValueError("scale_copies must be positive")


def _walk_speed(behaviour: str, rng: random.Random) -> float:
    if behaviour == "walking":
        return rng.uniform(1.0, 3.0)
    if behaviour == "running":
        return rng.uniform(4.0, 8.0)
    if behaviour == "abrupt":
        return rng.uniform(0.0, 6.0)
    return rng.uniform(0.0, 0.4)  # active: mostly in place


def _gen_person(name: str, spec: GenSpec, rng: random.Random, out: list, idgen) -> list:
    """Emit one person's lifetime; returns (t, x, y) track for object placement."""
    t0 = rng.randrange(0, max(1, spec.duration // 3))
    t1 = rng.randrange(min(t0 + 30, spec.duration - 1), spec.duration)
    out.append(InputRecord(id=idgen(), kind="event", name="appear", args=(name,), t=t0))
    x = rng.uniform(20.0, SCENE_W - 20.0)
    y = rng.uniform(20.0, SCENE_H - 20.0)
    heading = rng.uniform(0.0, 2.0 * math.pi)
    track = []
    t = t0
    while t < t1:
        seg_len = min(rng.randrange(15, 60), t1 - t)
        behaviour = rng.choices(_PERSON_BEHAVIOURS, weights=_BEHAVIOUR_WEIGHTS)[0]
        out.append(
            InputRecord(
                id=idgen(),
                kind="interval",
                name=behaviour,
                args=(name,),
                value="true",
                start=t,
                end=t + seg_len,
            )
        )
        speed = _walk_speed(behaviour, rng)
        for tick in range(t, t + seg_len):
            heading += rng.uniform(-0.3, 0.3)
            x = min(SCENE_W, max(0.0, x + speed * math.cos(heading)))
            y = min(SCENE_H, max(0.0, y + speed * math.sin(heading)))
            track.append((tick, x, y))
            out.append(
                InputRecord(id=idgen(), kind="coord", entity=name, t=tick, x=x, y=y)
            )
        t += seg_len
    out.append(InputRecord(id=idgen(), kind="event", name="disappear", args=(name,), t=t1))
    return track


def _gen_object(name: str, spec: GenSpec, rng: random.Random, out: list, idgen, tracks: list):
    """An object dropped near a person, sitting inactive until it is removed."""
    host = rng.choice(tracks) if tracks else None
    if host:
        ta_idx = rng.randrange(len(host))
        ta, hx, hy = host[ta_idx]
        x = min(SCENE_W, max(0.0, hx + rng.uniform(-10.0, 10.0)))
        y = min(SCENE_H, max(0.0, hy + rng.uniform(-10.0, 10.0)))
    else:
        ta = rng.randrange(0, spec.duration // 2)
        x = rng.uniform(0.0, SCENE_W)
        y = rng.uniform(0.0, SCENE_H)
    td = rng.randrange(min(ta + 20, spec.duration - 1), spec.duration)
    out.append(InputRecord(id=idgen(), kind="event", name="appear", args=(name,), t=ta))
    out.append(
        InputRecord(
            id=idgen(),
            kind="interval",
            name="inactive",
            args=(name,),
            value="true",
            start=ta,
            end=td,
        )
    )
    for tick in range(ta, td):
        out.append(InputRecord(id=idgen(), kind="coord", entity=name, t=tick, x=x, y=y))
    out.append(InputRecord(id=idgen(), kind="event", name="disappear", args=(name,), t=td))


def generate(spec: GenSpec) -> list[InputRecord]:
    """Build a stream per `spec`, sorted by occurrence time."""
    records: list[InputRecord] = []
    counter = 0

    def idgen() -> str:
        nonlocal counter
        counter += 1
        return f"g{counter:07d}"

    for copy in range(spec.scale_copies):
        rng = random.Random(f"{spec.seed}/{copy}")
        suffix = "" if spec.scale_copies == 1 else f"c{copy}"
        tracks: list = []
        for i in range(spec.entities):
            is_object = spec.entities >= 3 and i % 5 == 4
            name = (f"obj{i}" if is_object else f"p{i}") + suffix
            if is_object:
                _gen_object(name, spec, rng, records, idgen, tracks)
            else:
                tracks.append(_gen_person(name, spec, rng, records, idgen))
    records.sort(key=lambda r: (r.t if r.t is not None else r.start, r.id))
    return records
